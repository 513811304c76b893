"""Unit handling at the configuration boundary.

Everything inside the package is angular frequency (rad/s), seconds and
kelvin.  Conversion from the human-facing units (GHz, MHz, ns, mK, ...)
happens exactly once, here, so that no 2*pi can go missing elsewhere.
"""

from __future__ import annotations

import re

import numpy as np

TWO_PI = 2.0 * np.pi

# ordinary (cyclic) frequency unit -> Hz
_FREQ_SCALE = {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}
_TIME_SCALE = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "µs": 1e-6, "ns": 1e-9, "ps": 1e-12}
_TEMP_SCALE = {"k": 1.0, "mk": 1e-3}

_QUANTITY_RE = re.compile(r"^\s*([-+0-9.eE]+)\s*([a-zA-Zµ]+)\s*$")


class UnitError(ValueError):
    """A scalar was given without a unit, or with one of the wrong kind."""


def ghz(value: float) -> float:
    """Cyclic GHz -> rad/s."""
    return TWO_PI * value * 1e9


def mhz(value: float) -> float:
    """Cyclic MHz -> rad/s."""
    return TWO_PI * value * 1e6


def to_ghz(omega: float) -> float:
    """rad/s -> cyclic GHz."""
    return omega / (TWO_PI * 1e9)


def to_mhz(omega: float) -> float:
    """rad/s -> cyclic MHz."""
    return omega / (TWO_PI * 1e6)


def ns(value: float) -> float:
    return value * 1e-9


def parse_quantity(text: str, kind: str, key: str = "") -> float:
    """Parse ``"120 MHz"``-style scalars into internal units.

    kind is one of ``frequency`` (-> rad/s), ``time`` (-> s) or
    ``temperature`` (-> K).  A missing or mismatched unit is fatal.
    """
    m = _QUANTITY_RE.match(str(text))
    if m is None:
        raise UnitError(
            f"field {key or '<value>'!r}: expected a number with a unit suffix, got {text!r}"
        )
    value = float(m.group(1))
    unit = m.group(2).lower()
    if kind == "frequency":
        if unit not in _FREQ_SCALE:
            raise UnitError(f"field {key!r}: {unit!r} is not a frequency unit")
        return TWO_PI * value * _FREQ_SCALE[unit]
    if kind == "time":
        if unit not in _TIME_SCALE:
            raise UnitError(f"field {key!r}: {unit!r} is not a time unit")
        return value * _TIME_SCALE[unit]
    if kind == "temperature":
        if unit not in _TEMP_SCALE:
            raise UnitError(f"field {key!r}: {unit!r} is not a temperature unit")
        return value * _TEMP_SCALE[unit]
    raise ValueError(f"unknown quantity kind {kind!r}")
