"""Linear statistics of sine- and Bessel-process eigenvalues."""

import json as _json

from ._rmstat import (  # noqa: F401
    DomainError,
    bessel_kernel,
    bessel_mean,
    bessel_variance_cosine,
    bessel_variance_mellin,
    characteristic_function,
    kac_identity_check,
    montecarlo_statistics,
    sine_kernel,
    sine_prediction,
    t_weight,
    test_functions,
)
from ._rmstat import run_json as _run_json


def run(command, **options):
    """Run a CLI command in-process; returns the parsed JSON report."""
    config = dict(options, command=command)
    return _json.loads(_run_json(_json.dumps(config)))
