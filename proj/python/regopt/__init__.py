"""Row/column-scaled momentum optimizers (C++ core via pybind11)."""

import json as _json

from ._core import (
    CSV_HEADER,
    ConfigInvalid,
    Error,
    IoError,
    Optimizer,
    ShapeMismatch,
    normal,
    racs_iterate,
    rms,
    rms_closed_form,
    singular_values,
)
from ._core import run as _run
from ._core import verify


def run(config):
    """Run an experiment from a config dict or JSON string."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _run(config)


__all__ = [
    "CSV_HEADER",
    "ConfigInvalid",
    "Error",
    "IoError",
    "Optimizer",
    "ShapeMismatch",
    "normal",
    "racs_iterate",
    "rms",
    "rms_closed_form",
    "run",
    "singular_values",
    "verify",
]
