"""Randomized Lie-Trotter products of matrix arrays."""

import json as _json

from ._trotter_shuffle import *  # noqa: F401,F403
from ._trotter_shuffle import __version__, run_experiment as _run_experiment


def run(config, out_path=""):
    """Run an experiment from a config dict; writes CSV + sidecar when out_path is given."""
    return _run_experiment(_json.dumps(config), str(out_path))
