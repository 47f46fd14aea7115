"""Reduction of third-kind integral equations to second- and first-kind form.

Configs are passed as JSON text (or a dict, serialized here); commands return
(exit_code, log) and write their files into `out`.
"""

import json as _json

from . import _kinf
from ._kinf import (
    KinfError,
    basis_values,
    column_decay,
    eval_kernel,
    gauss_hermite,
    hermite_functions,
    hs_norm,
    m_factorize,
    rademacher,
    vanishing_defect,
)

__all__ = [
    "KinfError",
    "basis_values",
    "build_sequence",
    "column_decay",
    "eval_kernel",
    "gauss_hermite",
    "hermite_functions",
    "hs_norm",
    "m_factorize",
    "rademacher",
    "reduce",
    "vanishing_defect",
    "verify",
    "verify_battery",
]


def _text(config):
    return config if isinstance(config, str) else _json.dumps(config)


def build_sequence(config, out="", base_dir=""):
    return _kinf.build_sequence(_text(config), str(out), str(base_dir))


def reduce(config, out="", base_dir=""):
    return _kinf.reduce(_text(config), str(out), str(base_dir))


def verify(config, out="", base_dir=""):
    return _kinf.verify(_text(config), str(out), str(base_dir))


def verify_battery(config, base_dir=""):
    """Runs the property battery without writing files; returns the report dict."""
    return _json.loads(_kinf.verify_battery(_text(config), str(base_dir)))
