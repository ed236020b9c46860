"""Exact classification and extraction for GSV sources.

Sources are dicts shaped like the CLI's JSON files, e.g.
``{"faces": ["H", "T"], "dice": [["1/2", "1/2"]]}``. Rationals are strings.
"""

import json

from . import _gsv
from ._gsv import GsvError, bit_extract_exp, multibit_extract, threshold_extract

__all__ = [
    "GsvError",
    "bit_extract_exp",
    "classify",
    "exact_bias",
    "kernel_basis",
    "multibit_extract",
    "preset",
    "threshold_extract",
]


def _text(source):
    return source if isinstance(source, str) else json.dumps(source)


def preset(name):
    return json.loads(_gsv.preset(name))


def classify(source, epsilon=None):
    return json.loads(_gsv.classify(_text(source), epsilon))


def kernel_basis(source):
    return _gsv.kernel_basis(_text(source))


def exact_bias(source, outputs):
    """Worst-case bias of a +-1 lookup table over all adaptive strategies."""
    return json.loads(_gsv.exact_bias(_text(source), list(outputs)))
