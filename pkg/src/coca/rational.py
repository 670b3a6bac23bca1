"""Exact rational numbers and their extension with +/- infinity.

Every quantity in this package is an exact rational.  The backend is
``gmpy2.mpq`` when gmpy2 is importable (it is noticeably faster on the
arithmetic-heavy fixpoint loops) and ``fractions.Fraction`` otherwise.
Set ``COCA_RATIONAL_BACKEND=fraction`` to force the pure-Python backend.

Parsing always goes through :class:`fractions.Fraction` so that strings
like ``"0.1"`` are read exactly (gmpy2 would route decimal strings through
binary floats).
"""

from __future__ import annotations

import os
from fractions import Fraction

__all__ = [
    "Rat",
    "rat",
    "BACKEND",
    "NEG_INF",
    "POS_INF",
    "Infinite",
    "is_finite",
    "ext_add",
    "ext_neg",
    "ext_min",
    "ext_max",
]

_forced = os.environ.get("COCA_RATIONAL_BACKEND", "").strip().lower()

if _forced in ("", "gmpy2", "mpq"):
    try:
        from gmpy2 import mpq as _mpq

        Rat = _mpq
        BACKEND = "gmpy2"
    except ImportError:
        Rat = Fraction
        BACKEND = "fraction"
elif _forced == "fraction":
    Rat = Fraction
    BACKEND = "fraction"
else:
    raise RuntimeError(
        f"unknown COCA_RATIONAL_BACKEND={_forced!r} (use 'gmpy2' or 'fraction')"
    )


def rat(value) -> "Rat":
    """Coerce ``value`` to an exact rational.

    Accepts ints, existing rationals, and strings in any of the forms
    ``"7"``, ``"-3/4"``, ``"2.5"`` (decimals are exact, not float-rounded).
    Floats are rejected: callers who mean an exact value must say so.
    """
    if isinstance(value, float):
        raise TypeError(f"refusing inexact float {value!r}; pass a string or int")
    if isinstance(value, str):
        return Rat(Fraction(value.strip()))
    return Rat(value)


class Infinite:
    """One of the two infinite endpoints, usable in comparisons with rationals.

    The two instances ``POS_INF`` and ``NEG_INF`` are module-level singletons;
    identity comparison is fine.  Arithmetic is only defined where it is
    unambiguous (adding opposite infinities raises).
    """

    __slots__ = ("_sign",)

    def __init__(self, sign: int):
        self._sign = sign

    # -- ordering against anything rational-like -------------------------
    def __lt__(self, other):
        if self is other:
            return False
        return self._sign < 0

    def __le__(self, other):
        return self is other or self._sign < 0

    def __gt__(self, other):
        if self is other:
            return False
        return self._sign > 0

    def __ge__(self, other):
        return self is other or self._sign > 0

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return hash(("coca-infinite", self._sign))

    def __neg__(self):
        return NEG_INF if self._sign > 0 else POS_INF

    def __add__(self, other):
        if isinstance(other, Infinite) and other._sign != self._sign:
            raise ArithmeticError("cannot add opposite infinities")
        return self

    __radd__ = __add__

    def __repr__(self):
        return "+inf" if self._sign > 0 else "-inf"


POS_INF = Infinite(1)
NEG_INF = Infinite(-1)


def is_finite(x) -> bool:
    return not isinstance(x, Infinite)


def ext_add(x, y):
    """Sum of extended rationals (raises on opposite infinities)."""
    if isinstance(x, Infinite) or isinstance(y, Infinite):
        return x + y if isinstance(x, Infinite) else y + x
    return x + y


def ext_neg(x):
    return -x


def ext_min(x, y):
    return x if x <= y else y


def ext_max(x, y):
    return x if x >= y else y
