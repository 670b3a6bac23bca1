"""Exact rational intervals and finite unions of them.

An :class:`Interval` is a convex subset of the rationals with extended
endpoints and open/closed flags.  Construction always canonicalizes:

* any representation of the empty set becomes the single sentinel
  ``EMPTY`` (lo = +inf, hi = -inf, both sides open);
* infinite endpoints are always open;
* a singleton needs both flags closed, otherwise it is empty.

Canonical form makes structural equality coincide with set equality,
which the rest of the engine relies on (fixpoint detection compares
interval sets directly).

An :class:`IntervalSet` is the canonical decomposition of a finite union
into sorted, maximal (non-mergeable) parts.  Two parts merge when they
overlap or touch with at least one closed side: ``[0,1) ∪ [1,2]`` is one
part, ``[0,1) ∪ (1,2]`` is two.

The only arithmetic the engine ever needs besides intersection and union
is the "scaled update" Minkowski sum with a half-open step interval:
adding ``z > 0`` to a set yields ``S + (0, z]``, adding ``z < 0`` yields
``S + [z, 0)``, and ``z = 0`` is the identity.  That operation is
:func:`iv_minkowski_update` / :func:`is_minkowski_update`.
"""

from __future__ import annotations

from .rational import NEG_INF, POS_INF, Infinite, Rat, is_finite, rat

__all__ = [
    "Interval",
    "IntervalSet",
    "EMPTY",
    "EMPTY_SET",
    "FULL",
    "interval",
    "closed",
    "point",
    "iv_intersect",
    "iv_minkowski_update",
    "iv_closure",
    "is_union",
    "is_intersect",
    "is_minkowski_update",
    "is_contains",
    "is_closure",
    "parse_interval",
    "format_interval",
    "format_interval_set",
]


class Interval:
    """A canonical rational interval.  Treat instances as immutable."""

    __slots__ = ("lo", "hi", "lo_closed", "hi_closed")

    def __init__(self, lo, hi, lo_closed: bool, hi_closed: bool):
        # Trusted constructor: callers outside this module should use
        # interval()/closed()/point(), which canonicalize.
        self.lo = lo
        self.hi = hi
        self.lo_closed = lo_closed
        self.hi_closed = hi_closed

    # -- basic queries ----------------------------------------------------
    def is_empty(self) -> bool:
        return self.lo is POS_INF and self.hi is NEG_INF

    def contains(self, x) -> bool:
        if self.lo_closed:
            if x < self.lo:
                return False
        elif x <= self.lo:
            return False
        if self.hi_closed:
            if x > self.hi:
                return False
        elif x >= self.hi:
            return False
        return True

    def is_subset_of(self, other: "Interval") -> bool:
        if self.is_empty():
            return True
        if other.is_empty():
            return False
        if self.lo < other.lo or (
            self.lo == other.lo and self.lo_closed and not other.lo_closed
        ):
            return False
        if self.hi > other.hi or (
            self.hi == other.hi and self.hi_closed and not other.hi_closed
        ):
            return False
        return True

    # -- dunder -----------------------------------------------------------
    def __eq__(self, other):
        return (
            isinstance(other, Interval)
            and self.lo == other.lo
            and self.hi == other.hi
            and self.lo_closed == other.lo_closed
            and self.hi_closed == other.hi_closed
        )

    def __hash__(self):
        return hash((self.lo, self.hi, self.lo_closed, self.hi_closed))

    def __repr__(self):
        return f"Interval({format_interval(self)!r})"

    def __contains__(self, x):
        return self.contains(x)


EMPTY = Interval(POS_INF, NEG_INF, False, False)
FULL = Interval(NEG_INF, POS_INF, False, False)


def _canon(lo, hi, lo_closed: bool, hi_closed: bool) -> Interval:
    """Canonicalize already-typed endpoints (Rat or Infinite)."""
    if isinstance(lo, Infinite):
        lo_closed = False
    if isinstance(hi, Infinite):
        hi_closed = False
    if lo > hi:
        return EMPTY
    if lo == hi and not (lo_closed and hi_closed):
        return EMPTY
    return Interval(lo, hi, lo_closed, hi_closed)


def interval(lo, hi, lo_closed: bool = True, hi_closed: bool = True) -> Interval:
    """Canonicalizing constructor.  ``lo``/``hi`` may be Rat, int, str or ±inf."""
    if not isinstance(lo, Infinite):
        lo = rat(lo)
    if not isinstance(hi, Infinite):
        hi = rat(hi)
    return _canon(lo, hi, lo_closed, hi_closed)


def closed(lo, hi) -> Interval:
    return interval(lo, hi, True, True)


def point(x) -> Interval:
    x = rat(x)
    return Interval(x, x, True, True)


# -- single-interval operations -------------------------------------------


def iv_intersect(a: Interval, b: Interval) -> Interval:
    """Intersection of two intervals (always an interval)."""
    if a.is_empty() or b.is_empty():
        return EMPTY
    if a.lo > b.lo:
        lo, lc = a.lo, a.lo_closed
    elif b.lo > a.lo:
        lo, lc = b.lo, b.lo_closed
    else:
        lo, lc = a.lo, a.lo_closed and b.lo_closed
    if a.hi < b.hi:
        hi, hc = a.hi, a.hi_closed
    elif b.hi < a.hi:
        hi, hc = b.hi, b.hi_closed
    else:
        hi, hc = a.hi, a.hi_closed and b.hi_closed
    if lo > hi or (lo == hi and not (lc and hc)):
        return EMPTY
    return Interval(lo, hi, lc, hc)


def iv_minkowski_update(a: Interval, z) -> Interval:
    """Image of ``a`` under one scaled update by ``z``.

    Scaling factors range over (0, 1], so a positive update adds (0, z]
    (the lower end opens, the upper end shifts by z and keeps its flag),
    a negative update adds [z, 0) symmetrically, and z = 0 is the identity.
    """
    if a.is_empty():
        return EMPTY
    z = rat(z)
    if z == 0:
        return a
    if z > 0:
        hi = a.hi if isinstance(a.hi, Infinite) else a.hi + z
        return Interval(a.lo, hi, False, a.hi_closed)
    lo = a.lo if isinstance(a.lo, Infinite) else a.lo + z
    return Interval(lo, a.hi, a.lo_closed, False)


def iv_closure(a: Interval) -> Interval:
    """Topological closure: finite endpoints become closed."""
    if a.is_empty():
        return EMPTY
    return Interval(a.lo, a.hi, is_finite(a.lo), is_finite(a.hi))


def _merges_into(hi, hi_closed, nxt: Interval) -> bool:
    # Given a running part ending at (hi, hi_closed) and the next sorted
    # part, decide whether they form one connected piece.
    if nxt.lo < hi:
        return True
    return nxt.lo == hi and (hi_closed or nxt.lo_closed)


class IntervalSet:
    """Canonical finite union of intervals (sorted maximal parts)."""

    __slots__ = ("parts",)

    def __init__(self, intervals=()):
        items = [iv for iv in intervals if not iv.is_empty()]
        if not items:
            self.parts = ()
            return
        items.sort(key=lambda iv: (iv.lo, not iv.lo_closed))
        merged = []
        cur = items[0]
        lo, lc, hi, hc = cur.lo, cur.lo_closed, cur.hi, cur.hi_closed
        for nxt in items[1:]:
            if _merges_into(hi, hc, nxt):
                if nxt.hi > hi:
                    hi, hc = nxt.hi, nxt.hi_closed
                elif nxt.hi == hi:
                    hc = hc or nxt.hi_closed
            else:
                merged.append(Interval(lo, hi, lc, hc))
                lo, lc, hi, hc = nxt.lo, nxt.lo_closed, nxt.hi, nxt.hi_closed
        merged.append(Interval(lo, hi, lc, hc))
        self.parts = tuple(merged)

    # -- constructors ------------------------------------------------------
    @staticmethod
    def of(*intervals) -> "IntervalSet":
        return IntervalSet(intervals)

    @staticmethod
    def _raw(parts: tuple) -> "IntervalSet":
        s = IntervalSet.__new__(IntervalSet)
        s.parts = parts
        return s

    # -- queries -----------------------------------------------------------
    def is_empty(self) -> bool:
        return not self.parts

    def contains(self, x) -> bool:
        return any(p.contains(x) for p in self.parts)

    def is_subset_of(self, other: "IntervalSet") -> bool:
        return all(
            any(p.is_subset_of(q) for q in other.parts) for p in self.parts
        )

    def inf(self):
        """Infimum of the set (NEG_INF if unbounded; POS_INF if empty)."""
        return self.parts[0].lo if self.parts else POS_INF

    def sup(self):
        return self.parts[-1].hi if self.parts else NEG_INF

    def pick_point(self):
        """Some rational in the set (raises on empty)."""
        if not self.parts:
            raise ValueError("empty set has no points")
        return _pick_in(self.parts[0])

    # -- algebra -----------------------------------------------------------
    def union(self, other: "IntervalSet") -> "IntervalSet":
        if not other.parts:
            return self
        if not self.parts:
            return other
        return IntervalSet(self.parts + other.parts)

    def intersect(self, other) -> "IntervalSet":
        if isinstance(other, Interval):
            return IntervalSet._raw(
                tuple(
                    r
                    for p in self.parts
                    for r in (iv_intersect(p, other),)
                    if not r.is_empty()
                )
            )
        out = []
        for p in self.parts:
            for q in other.parts:
                if q.lo > p.hi:
                    break
                r = iv_intersect(p, q)
                if not r.is_empty():
                    out.append(r)
        return IntervalSet._raw(tuple(out))

    def minkowski_update(self, z) -> "IntervalSet":
        z = rat(z)
        if z == 0 or not self.parts:
            return self
        return IntervalSet(iv_minkowski_update(p, z) for p in self.parts)

    def closure(self) -> "IntervalSet":
        return IntervalSet(iv_closure(p) for p in self.parts)

    def complement(self) -> "IntervalSet":
        """The rationals not in this set."""
        if not self.parts:
            return IntervalSet._raw((FULL,))
        out = []
        lo, lc = NEG_INF, False
        for p in self.parts:
            gap = _canon(lo, p.lo, lc, not p.lo_closed)
            if not gap.is_empty():
                out.append(gap)
            lo, lc = p.hi, not p.hi_closed
        if lo is not POS_INF:
            out.append(Interval(lo, POS_INF, lc, False))
        return IntervalSet._raw(tuple(out))

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        return self.intersect(other.complement())

    # -- dunder ------------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, IntervalSet) and self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)

    def __contains__(self, x):
        return self.contains(x)

    def __repr__(self):
        return f"IntervalSet({format_interval_set(self)!r})"


EMPTY_SET = IntervalSet()


def _pick_in(p: Interval):
    """An exact rational inside a nonempty interval."""
    if p.lo_closed:
        return p.lo
    if isinstance(p.lo, Infinite):
        if isinstance(p.hi, Infinite):
            return rat(0)
        return (p.hi - 1) if not p.hi_closed else p.hi
    if isinstance(p.hi, Infinite):
        return p.lo + 1
    # both finite, lo open: strict midpoint works whether hi is open or not
    return (p.lo + p.hi) / 2


# -- set-level op aliases (functional style used by the analysis layers) ---


def is_union(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    return a.union(b)


def is_intersect(a: IntervalSet, b) -> IntervalSet:
    return a.intersect(b)


def is_minkowski_update(a: IntervalSet, z) -> IntervalSet:
    return a.minkowski_update(z)


def is_contains(a: IntervalSet, x) -> bool:
    return a.contains(rat(x))


def is_closure(a: IntervalSet) -> IntervalSet:
    return a.closure()


# -- parsing / formatting ---------------------------------------------------


def _parse_endpoint(tok: str):
    tok = tok.strip()
    low = tok.lower()
    if low in ("inf", "+inf", "oo", "+oo"):
        return POS_INF
    if low in ("-inf", "-oo"):
        return NEG_INF
    return rat(tok)


def parse_interval(text: str) -> Interval:
    """Parse ``"[-5,15]"``, ``"(-inf,inf)"``, ``"(10,18]"``, ``"[1/2,0.75)"``.

    Whitespace around endpoints is ignored.  The result is canonical, so
    degenerate inputs like ``"(3,3]"`` parse to the empty interval, and
    ``"empty"`` names it directly.
    """
    s = text.strip()
    if s.lower() == "empty":
        return EMPTY
    if len(s) < 2 or s[0] not in "[(" or s[-1] not in ")]":
        raise ValueError(f"malformed interval {text!r}")
    body = s[1:-1]
    if body.count(",") != 1:
        raise ValueError(f"malformed interval {text!r}")
    lo_tok, hi_tok = body.split(",")
    try:
        lo = _parse_endpoint(lo_tok)
        hi = _parse_endpoint(hi_tok)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed interval {text!r}: {exc}") from None
    return interval(lo, hi, s[0] == "[", s[-1] == "]")


def _fmt_rat(x) -> str:
    return str(x)


def format_interval(a: Interval) -> str:
    if a.is_empty():
        return "empty"
    lo = "-inf" if a.lo is NEG_INF else _fmt_rat(a.lo)
    hi = "inf" if a.hi is POS_INF else _fmt_rat(a.hi)
    return f"{'[' if a.lo_closed else '('}{lo},{hi}{']' if a.hi_closed else ')'}"


def format_interval_set(s: IntervalSet) -> str:
    if not s.parts:
        return "{}"
    return " u ".join(format_interval(p) for p in s.parts)
