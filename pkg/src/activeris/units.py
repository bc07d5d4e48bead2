"""Decibel conversions and unit-suffixed quantity parsing.

Every dB/linear conversion in the package goes through this module so that
the dBm -> W convention (``10 ** ((x - 30) / 10)``) lives in one place.
"""

import re

import numpy as np

__all__ = [
    "db_to_linear",
    "linear_to_db",
    "dbm_to_watt",
    "watt_to_dbm",
    "dbw_to_watt",
    "parse_quantity",
    "UNIT_KINDS",
]


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(np.asarray(x, dtype=float))


def dbm_to_watt(x_dbm):
    return 10.0 ** ((np.asarray(x_dbm, dtype=float) - 30.0) / 10.0)


def watt_to_dbm(x_w):
    return 10.0 * np.log10(np.asarray(x_w, dtype=float)) + 30.0


def dbw_to_watt(x_dbw):
    return 10.0 ** (np.asarray(x_dbw, dtype=float) / 10.0)


# unit suffix -> (kind, converter to SI)
_UNITS = {
    "W": ("power", lambda v: v),
    "mW": ("power", lambda v: v * 1e-3),
    "dBm": ("power", lambda v: float(dbm_to_watt(v))),
    "dBW": ("power", lambda v: float(dbw_to_watt(v))),
    "m": ("distance", lambda v: v),
    "km": ("distance", lambda v: v * 1e3),
    "Hz": ("frequency", lambda v: v),
    "kHz": ("frequency", lambda v: v * 1e3),
    "MHz": ("frequency", lambda v: v * 1e6),
    "GHz": ("frequency", lambda v: v * 1e9),
    "dB": ("ratio", lambda v: float(db_to_linear(v))),
    "lin": ("ratio", lambda v: v),
    "H": ("inductance", lambda v: v),
    "nH": ("inductance", lambda v: v * 1e-9),
    "F": ("capacitance", lambda v: v),
    "pF": ("capacitance", lambda v: v * 1e-12),
    "Ohm": ("resistance", lambda v: v),
    "V": ("voltage", lambda v: v),
}

UNIT_KINDS = sorted({kind for kind, _ in _UNITS.values()})

_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z]+)\s*$")


def parse_quantity(text, kind):
    """Parse ``"30 dBm"``-style text into an SI float of the given kind.

    Bare numbers are rejected on purpose: a missing suffix is the classic
    dB-versus-linear bug.

    Parameters
    ----------
    text : str
        Number followed by a unit suffix.
    kind : str
        Expected physical kind, one of ``UNIT_KINDS``.

    Returns
    -------
    float
        Value in SI units (W, m, Hz, linear ratio, ...).
    """
    if not isinstance(text, str):
        raise ValueError(f"expected a {kind} with a unit suffix, got bare value {text!r}")
    match = _QUANTITY.match(text)
    if match is None:
        raise ValueError(f"cannot parse {text!r} as a {kind} quantity with a unit suffix")
    value, unit = float(match.group(1)), match.group(2)
    if unit not in _UNITS:
        raise ValueError(f"unknown unit {unit!r} in {text!r}")
    unit_kind, convert = _UNITS[unit]
    if unit_kind != kind:
        raise ValueError(f"{text!r} is a {unit_kind}, expected a {kind}")
    return convert(value)
