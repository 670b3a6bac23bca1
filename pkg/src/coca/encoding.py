"""Symbolic linear-arithmetic encodings of reachability questions.

This module mirrors the interval machinery of :mod:`coca.intervals` inside
quantifier-free formulas over rational variables so that reachability in
parametric automata can be handed to an SMT solver.

Intervals are represented by four-slot tuples ``(b, t, bot, top)``: ``b`` and
``t`` are linear terms for the endpoints, and ``bot``/``top`` are flags with
``0`` = open, ``1`` = closed, ``2`` = infinite (the matching endpoint term is
ignored on an infinite side).  The tuple denotes the empty set exactly when
both flags differ from 2 and ``b > t``, or ``b = t`` without both sides
closed.  Encodings are not unique; the operations below never rely on
uniqueness, only on the denoted set.

Layers, bottom up:

* ``Lin`` / ``Formula`` -- a tiny AST for linear terms and boolean
  combinations of comparisons, with constant folding.
* ``enc_*`` / ``msum`` -- concrete tuple arithmetic used to build witness
  valuations (the formula-level builders below agree with these pointwise).
* ``build_phi_*`` -- formulas relating interval tuples the way the interval
  operations relate intervals (sum, intersection, membership, inclusion,
  emptiness, gap-at-the-seam disjointness).
* ``psi_*`` -- the same lifted to fixed-length vectors of tuples, which stand
  for finite unions of intervals.
* ``build_sentence`` -- an exists/forall sentence that holds iff the target
  configuration is reachable for some parameter valuation.
* ``encode_acyclic`` -- a purely existential formula for automata whose state
  graph is acyclic.
* ``emit_smtlib`` / ``solve`` -- SMT-LIB 2 text and an external-solver driver.
* ``rescale_to_integer`` -- clears denominators of a witnessing valuation
  when parameters occur only on updates.

Parameter ``x`` becomes the solver variable ``x_<x>``; interval tuples use
``Ib_/It_/Ibot_/Itop_`` prefixes, and the universal copy of a variable gets
the suffix ``_u``.
"""

from __future__ import annotations

import enum
import os
import re
import subprocess
import shlex
import tempfile
from dataclasses import dataclass

from .errors import (
    BadFlag,
    MalformedSolverOutput,
    NotAcyclic,
    ParametricGuardPresent,
    SolverNotFound,
    UnboundVariable,
    UnknownState,
)
from .intervals import EMPTY, Interval, interval
from .model import ParametricCoca, ParamInterval
from .rational import NEG_INF, POS_INF, Rat, is_finite, rat

__all__ = [
    "Lin",
    "Formula",
    "Cmp",
    "And",
    "Or",
    "Not",
    "TRUE",
    "FALSE",
    "lin",
    "f_and",
    "f_or",
    "f_not",
    "f_implies",
    "lt",
    "le",
    "eq",
    "ne",
    "gt",
    "ge",
    "free_vars",
    "IntervalEnc",
    "enc_var",
    "enc_vector",
    "enc_const",
    "enc_of_interval",
    "enc_eval",
    "enc_sum",
    "enc_cap",
    "msum",
    "build_phi_plus",
    "build_phi_cap",
    "build_phi_in",
    "build_phi_subseteq",
    "build_phi_empty",
    "build_phi_dis",
    "psi_in",
    "psi_plus",
    "psi_cap",
    "psi_subseteq",
    "psi_max",
    "build_psi_family",
    "Sentence",
    "build_psi_succ",
    "build_sentence",
    "encode_acyclic",
    "eval_formula",
    "emit_smtlib",
    "SolveResult",
    "solve",
    "rescale_to_integer",
]


# -- linear terms -------------------------------------------------------------


class Lin:
    """Linear term: sum of rational-coefficient variables plus a constant.

    ``coeffs`` is a sorted tuple of (variable name, coefficient) with zero
    coefficients dropped, so structurally equal terms compare equal.  The
    hash is precomputed: terms and formulas are deduplicated heavily during
    construction, and recomputing hashes over shared subtrees dominates
    otherwise.
    """

    __slots__ = ("coeffs", "const", "_hash")

    def __init__(self, coeffs=(), const=rat(0)):
        object.__setattr__(self, "coeffs", tuple(coeffs))
        object.__setattr__(self, "const", const)
        object.__setattr__(self, "_hash", hash((Lin, self.coeffs, const)))

    def __setattr__(self, name, value):
        raise AttributeError("Lin is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, Lin)
            and self._hash == other._hash
            and self.coeffs == other.coeffs
            and self.const == other.const
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Lin({self.coeffs!r}, {self.const!r})"

    @staticmethod
    def var(name: str) -> "Lin":
        return Lin(((name, rat(1)),), rat(0))

    def is_const(self) -> bool:
        return not self.coeffs

    def __add__(self, other):
        other = lin(other)
        acc = dict(self.coeffs)
        for v, c in other.coeffs:
            s = acc.get(v, rat(0)) + c
            if s == 0:
                acc.pop(v, None)
            else:
                acc[v] = s
        return Lin(tuple(sorted(acc.items())), self.const + other.const)

    def __neg__(self):
        return Lin(tuple((v, -c) for v, c in self.coeffs), -self.const)

    def __sub__(self, other):
        return self + (-lin(other))

    def variables(self):
        return [v for v, _ in self.coeffs]


def lin(x) -> Lin:
    """Coerce a term-like value (Lin, variable name, or rational) to Lin."""
    if isinstance(x, Lin):
        return x
    if isinstance(x, str):
        return Lin.var(x)
    return Lin((), rat(x))


# -- formulas ------------------------------------------------------------------


class Formula:
    """Base class for quantifier-free formula nodes (immutable, cached hash)."""

    __slots__ = ("_hash",)

    def __setattr__(self, name, value):
        raise AttributeError("formulas are immutable")

    def __hash__(self):
        return self._hash


def _seal(obj, **fields):
    for k, v in fields.items():
        object.__setattr__(obj, k, v)


class Cmp(Formula):
    """Atomic comparison ``term op 0`` with op in <, <=, =, !=, >, >=."""

    __slots__ = ("op", "term")

    def __init__(self, op: str, term: Lin):
        _seal(self, op=op, term=term, _hash=hash((Cmp, op, term)))

    def __eq__(self, other):
        return (
            isinstance(other, Cmp)
            and self._hash == other._hash
            and self.op == other.op
            and self.term == other.term
        )

    __hash__ = Formula.__hash__

    def __repr__(self):
        return f"Cmp({self.op!r}, {self.term!r})"


class And(Formula):
    __slots__ = ("items",)

    def __init__(self, items):
        items = tuple(items)
        _seal(self, items=items, _hash=hash((And, items)))

    def __eq__(self, other):
        return isinstance(other, And) and self._hash == other._hash and self.items == other.items

    __hash__ = Formula.__hash__

    def __repr__(self):
        return f"And({self.items!r})"


class Or(Formula):
    __slots__ = ("items",)

    def __init__(self, items):
        items = tuple(items)
        _seal(self, items=items, _hash=hash((Or, items)))

    def __eq__(self, other):
        return isinstance(other, Or) and self._hash == other._hash and self.items == other.items

    __hash__ = Formula.__hash__

    def __repr__(self):
        return f"Or({self.items!r})"


class Not(Formula):
    __slots__ = ("item",)

    def __init__(self, item: Formula):
        _seal(self, item=item, _hash=hash((Not, item)))

    def __eq__(self, other):
        return isinstance(other, Not) and self._hash == other._hash and self.item == other.item

    __hash__ = Formula.__hash__

    def __repr__(self):
        return f"Not({self.item!r})"


TRUE = And(())
FALSE = Or(())


def f_and(*items) -> Formula:
    """Conjunction with flattening, de-duplication, and constant folding."""
    flat = []
    for it in items:
        if it == TRUE:
            continue
        if it == FALSE:
            return FALSE
        if isinstance(it, And):
            flat.extend(it.items)
        else:
            flat.append(it)
    flat = list(dict.fromkeys(flat))
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def f_or(*items) -> Formula:
    """Disjunction with flattening, de-duplication, and constant folding."""
    flat = []
    for it in items:
        if it == FALSE:
            continue
        if it == TRUE:
            return TRUE
        if isinstance(it, Or):
            flat.extend(it.items)
        else:
            flat.append(it)
    flat = list(dict.fromkeys(flat))
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def f_not(f: Formula) -> Formula:
    if f == TRUE:
        return FALSE
    if f == FALSE:
        return TRUE
    if isinstance(f, Not):
        return f.item
    return Not(f)


def f_implies(a: Formula, b: Formula) -> Formula:
    return f_or(f_not(a), b)


_CMP_EVAL = {
    "<": lambda s: s < 0,
    "<=": lambda s: s <= 0,
    "=": lambda s: s == 0,
    "!=": lambda s: s != 0,
    ">": lambda s: s > 0,
    ">=": lambda s: s >= 0,
}


def _cmp(op: str, a, b) -> Formula:
    diff = lin(a) - lin(b)
    if diff.is_const():
        return TRUE if _CMP_EVAL[op](diff.const) else FALSE
    return Cmp(op, diff)


def lt(a, b):
    return _cmp("<", a, b)


def le(a, b):
    return _cmp("<=", a, b)


def eq(a, b):
    return _cmp("=", a, b)


def ne(a, b):
    return _cmp("!=", a, b)


def gt(a, b):
    return _cmp(">", a, b)


def ge(a, b):
    return _cmp(">=", a, b)


def free_vars(f) -> set:
    """Free variables of a formula or linear term."""
    if isinstance(f, Lin):
        return set(f.variables())
    if isinstance(f, Cmp):
        return set(f.term.variables())
    if isinstance(f, (And, Or)):
        out = set()
        for it in f.items:
            out |= free_vars(it)
        return out
    if isinstance(f, Not):
        return free_vars(f.item)
    raise TypeError(f"not a formula: {f!r}")


# -- interval encodings ---------------------------------------------------------

FLAG_OPEN, FLAG_CLOSED, FLAG_INF = 0, 1, 2

_CANON_EMPTY = (rat(1), rat(0), 0, 0)


def _check_flag(f):
    try:
        v = rat(f)
    except (TypeError, ValueError) as exc:
        raise BadFlag(f"flag must be 0, 1, or 2, got {f!r}") from exc
    if v == 0:
        return 0
    if v == 1:
        return 1
    if v == 2:
        return 2
    raise BadFlag(f"flag must be 0, 1, or 2, got {f!r}")


def msum(i, j) -> int:
    """Flag of a sum endpoint: infinite dominates, otherwise the more open."""
    i, j = _check_flag(i), _check_flag(j)
    return 2 if max(i, j) == 2 else min(i, j)


def enc_eval(tup) -> Interval:
    """Interval denoted by a concrete tuple (b, t, bot, top)."""
    b, t, bot, top = tup
    bot, top = _check_flag(bot), _check_flag(top)
    lo = NEG_INF if bot == FLAG_INF else rat(b)
    hi = POS_INF if top == FLAG_INF else rat(t)
    return interval(lo, hi, bot == FLAG_CLOSED, top == FLAG_CLOSED)


def enc_of_interval(iv: Interval):
    """A canonical concrete tuple denoting the given interval."""
    if iv.is_empty():
        return _CANON_EMPTY
    if is_finite(iv.lo):
        b, bot = iv.lo, FLAG_CLOSED if iv.lo_closed else FLAG_OPEN
    else:
        b, bot = rat(0), FLAG_INF
    if is_finite(iv.hi):
        t, top = iv.hi, FLAG_CLOSED if iv.hi_closed else FLAG_OPEN
    else:
        t, top = rat(0), FLAG_INF
    return (rat(b), rat(t), bot, top)


def _tuple_empty(tup) -> bool:
    b, t, bot, top = tup
    if bot == FLAG_INF or top == FLAG_INF:
        return False
    return rat(b) > rat(t) or (rat(b) == rat(t) and not (bot == top == FLAG_CLOSED))


def enc_sum(x, y):
    """Concrete tuple arithmetic mirroring ``build_phi_plus``."""
    x = (rat(x[0]), rat(x[1]), _check_flag(x[2]), _check_flag(x[3]))
    y = (rat(y[0]), rat(y[1]), _check_flag(y[2]), _check_flag(y[3]))
    if _tuple_empty(x) or _tuple_empty(y):
        return _CANON_EMPTY
    return (x[0] + y[0], x[1] + y[1], msum(x[2], y[2]), msum(x[3], y[3]))


def enc_cap(x, y):
    """Concrete tuple arithmetic mirroring ``build_phi_cap``."""
    xb, xt, xbot, xtop = rat(x[0]), rat(x[1]), _check_flag(x[2]), _check_flag(x[3])
    yb, yt, ybot, ytop = rat(y[0]), rat(y[1]), _check_flag(y[2]), _check_flag(y[3])
    u = xb if xbot != FLAG_INF else yb
    v = yb if ybot != FLAG_INF else xb
    b = max(u, v)
    u = xt if xtop != FLAG_INF else yt
    v = yt if ytop != FLAG_INF else xt
    t = min(u, v)
    if xb > yb:
        bot = xbot if xbot != FLAG_INF else ybot
    elif xb < yb:
        bot = ybot if ybot != FLAG_INF else xbot
    else:
        bot = min(xbot, ybot)
    if xt < yt:
        top = xtop if xtop != FLAG_INF else ytop
    elif xt > yt:
        top = ytop if ytop != FLAG_INF else xtop
    else:
        top = min(xtop, ytop)
    return (b, t, bot, top)


@dataclass(frozen=True)
class IntervalEnc:
    """Interval tuple whose slots are linear terms (flags may be literal)."""

    b: Lin
    t: Lin
    bot: Lin
    top: Lin

    def slots(self):
        return (self.b, self.t, self.bot, self.top)


def enc_var(stem: str) -> IntervalEnc:
    """Fresh tuple of four variables named after ``stem``."""
    return IntervalEnc(
        Lin.var(f"Ib_{stem}"),
        Lin.var(f"It_{stem}"),
        Lin.var(f"Ibot_{stem}"),
        Lin.var(f"Itop_{stem}"),
    )


def enc_vector(stem: str, n: int) -> tuple:
    return tuple(enc_var(f"{stem}_{i}") for i in range(n))


def enc_const(iv: Interval) -> IntervalEnc:
    b, t, bot, top = enc_of_interval(iv)
    return IntervalEnc(lin(b), lin(t), lin(bot), lin(top))


def enc_names(e: IntervalEnc) -> list:
    """Variable names of a purely variable tuple, in slot order."""
    out = []
    for term in e.slots():
        out.extend(term.variables())
    return out


def _enc_of_tuple(tup) -> IntervalEnc:
    b, t, bot, top = tup
    return IntervalEnc(lin(rat(b)), lin(rat(t)), lin(_check_flag(bot)), lin(_check_flag(top)))


# -- single-interval formulas ---------------------------------------------------


def _doms(*encs) -> Formula:
    """Domain constraints for every non-constant flag term among the tuples."""
    out = []
    for e in encs:
        for flag in (e.bot, e.top):
            if flag.is_const():
                _check_flag(flag.const)
            else:
                out.append(f_or(eq(flag, 0), eq(flag, 1), eq(flag, 2)))
    return f_and(*out)


def _empty_raw(x: IntervalEnc) -> Formula:
    return f_and(
        ne(x.bot, 2),
        ne(x.top, 2),
        f_or(
            gt(x.b, x.t),
            f_and(eq(x.b, x.t), f_not(f_and(eq(x.bot, 1), eq(x.top, 1)))),
        ),
    )


def build_phi_empty(x: IntervalEnc) -> Formula:
    """True iff the tuple denotes the empty set."""
    return f_and(_doms(x), _empty_raw(x))


def _msum_rel(i: Lin, j: Lin, k: Lin) -> Formula:
    """k = msum(i, j), expanded over the flag domain."""
    if i.is_const() and j.is_const():
        return eq(k, msum(i.const, j.const))
    cases = []
    for a in (0, 1, 2):
        for b in (0, 1, 2):
            cases.append(f_and(eq(i, a), eq(j, b), eq(k, msum(a, b))))
    return f_or(*cases)


def build_phi_plus(x: IntervalEnc, y: IntervalEnc, z: IntervalEnc) -> Formula:
    """z denotes the Minkowski sum of x and y.

    Endpointwise sums are only meaningful for nonempty operands; when either
    side is empty, z is pinned to the canonical empty tuple (1,0,0,0).
    """
    either_empty = f_or(_empty_raw(x), _empty_raw(y))
    canon = f_and(eq(z.b, 1), eq(z.t, 0), eq(z.bot, 0), eq(z.top, 0))
    raw = f_and(
        eq(z.b, x.b + y.b),
        eq(z.t, x.t + y.t),
        _msum_rel(x.bot, y.bot, z.bot),
        _msum_rel(x.top, y.top, z.top),
    )
    return f_and(
        _doms(x, y, z),
        f_implies(either_empty, canon),
        f_implies(f_not(either_empty), raw),
    )


def build_phi_cap(x: IntervalEnc, y: IntervalEnc, z: IntervalEnc) -> Formula:
    """z denotes the intersection of x and y.

    Case analysis: an endpoint term only competes when its flag is not 2, so
    the lower bound of the result is the max over the "live" b-terms and its
    flag comes from whichever operand wins the comparison (the more closed
    flag on ties).  The same with min for the upper bound.  The case split is
    over the raw terms, which is sound because a term guarded by flag 2 never
    ends up selected.
    """
    max_b = f_and(
        f_implies(ge(x.b, y.b), eq(z.b, x.b)),
        f_implies(lt(x.b, y.b), eq(z.b, y.b)),
    )
    b_part = f_and(
        f_implies(f_and(ne(x.bot, 2), ne(y.bot, 2)), max_b),
        f_implies(f_and(eq(x.bot, 2), ne(y.bot, 2)), eq(z.b, y.b)),
        f_implies(f_and(ne(x.bot, 2), eq(y.bot, 2)), eq(z.b, x.b)),
        f_implies(f_and(eq(x.bot, 2), eq(y.bot, 2)), max_b),
    )
    min_t = f_and(
        f_implies(le(x.t, y.t), eq(z.t, x.t)),
        f_implies(gt(x.t, y.t), eq(z.t, y.t)),
    )
    t_part = f_and(
        f_implies(f_and(ne(x.top, 2), ne(y.top, 2)), min_t),
        f_implies(f_and(eq(x.top, 2), ne(y.top, 2)), eq(z.t, y.t)),
        f_implies(f_and(ne(x.top, 2), eq(y.top, 2)), eq(z.t, x.t)),
        f_implies(f_and(eq(x.top, 2), eq(y.top, 2)), min_t),
    )
    chi_bot_x = f_and(
        f_implies(ne(x.bot, 2), eq(z.bot, x.bot)),
        f_implies(eq(x.bot, 2), eq(z.bot, y.bot)),
    )
    chi_bot_y = f_and(
        f_implies(ne(y.bot, 2), eq(z.bot, y.bot)),
        f_implies(eq(y.bot, 2), eq(z.bot, x.bot)),
    )
    min_bot = f_and(
        f_implies(le(x.bot, y.bot), eq(z.bot, x.bot)),
        f_implies(gt(x.bot, y.bot), eq(z.bot, y.bot)),
    )
    bot_part = f_and(
        f_implies(gt(x.b, y.b), chi_bot_x),
        f_implies(lt(x.b, y.b), chi_bot_y),
        f_implies(eq(x.b, y.b), min_bot),
    )
    chi_top_x = f_and(
        f_implies(ne(x.top, 2), eq(z.top, x.top)),
        f_implies(eq(x.top, 2), eq(z.top, y.top)),
    )
    chi_top_y = f_and(
        f_implies(ne(y.top, 2), eq(z.top, y.top)),
        f_implies(eq(y.top, 2), eq(z.top, x.top)),
    )
    min_top = f_and(
        f_implies(le(x.top, y.top), eq(z.top, x.top)),
        f_implies(gt(x.top, y.top), eq(z.top, y.top)),
    )
    top_part = f_and(
        f_implies(lt(x.t, y.t), chi_top_x),
        f_implies(gt(x.t, y.t), chi_top_y),
        f_implies(eq(x.t, y.t), min_top),
    )
    return f_and(_doms(x, y, z), b_part, t_part, bot_part, top_part)


def build_phi_in(v, y: IntervalEnc) -> Formula:
    """The value of term v lies in the set denoted by y."""
    v = lin(v)
    return f_and(
        _doms(y),
        f_or(lt(y.b, v), f_and(eq(y.b, v), eq(y.bot, 1)), eq(y.bot, 2)),
        f_or(lt(v, y.t), f_and(eq(y.t, v), eq(y.top, 1)), eq(y.top, 2)),
    )


def build_phi_subseteq(x: IntervalEnc, y: IntervalEnc) -> Formula:
    """The set denoted by x is contained in the set denoted by y.

    The endpoint comparisons only characterize containment for nonempty x, so
    emptiness of x is allowed as a separate disjunct.
    """
    bounds = f_and(
        f_implies(eq(x.bot, 2), eq(y.bot, 2)),
        f_implies(eq(x.top, 2), eq(y.top, 2)),
        f_or(lt(y.b, x.b), f_and(eq(y.b, x.b), le(x.bot, y.bot)), eq(y.bot, 2)),
        f_or(lt(x.t, y.t), f_and(eq(y.t, x.t), le(x.top, y.top)), eq(y.top, 2)),
    )
    return f_and(_doms(x, y), f_or(_empty_raw(x), bounds))


def build_phi_dis(x: IntervalEnc, y: IntervalEnc) -> Formula:
    """x and y do not merge at the seam x.t = y.b.

    Used on top of pairwise disjointness to ensure two touching parts could
    not be replaced by their (larger, still admissible) union: when the upper
    endpoint of x meets the lower endpoint of y, both must be open, leaving
    the seam point uncovered.  Vacuous when either tuple is empty or the
    relevant side is infinite.
    """
    premise = f_and(
        f_not(_empty_raw(x)),
        f_not(_empty_raw(y)),
        ne(x.top, 2),
        ne(y.bot, 2),
        eq(x.t, y.b),
    )
    return f_and(_doms(x, y), f_implies(premise, f_and(eq(x.top, 0), eq(y.bot, 0))))


# -- vector (union-of-intervals) formulas ----------------------------------------


def psi_in(v, ys) -> Formula:
    """v lies in the union denoted by the vector ys."""
    return f_or(*[build_phi_in(v, y) for y in ys])


def psi_plus(xs, y: IntervalEnc, zs) -> Formula:
    """zs is the slotwise Minkowski sum of the vector xs with y."""
    if len(xs) != len(zs):
        raise ValueError("vector length mismatch")
    return f_and(*[build_phi_plus(x, y, z) for x, z in zip(xs, zs)])


def psi_cap(xs, y: IntervalEnc, zs) -> Formula:
    """zs is the slotwise intersection of the vector xs with y."""
    if len(xs) != len(zs):
        raise ValueError("vector length mismatch")
    return f_and(*[build_phi_cap(x, y, z) for x, z in zip(xs, zs)])


def psi_subseteq(xs, ys) -> Formula:
    """Every part of xs is contained in some part of ys.

    Sound as union containment because the ys are constrained elsewhere (via
    ``psi_max``) to be pairwise disjoint and non-mergeable only where needed;
    a nonempty part fits inside a union of disjoint intervals only if it fits
    inside one of them.  With no ys at all, every x must be empty.
    """
    if not ys:
        return f_and(*[build_phi_empty(x) for x in xs])
    return f_and(*[f_or(*[build_phi_subseteq(x, y) for y in ys]) for x in xs])


def psi_max(xs, stem: str):
    """The nonempty parts of xs are pairwise disjoint and non-adjacent.

    Together with ``psi_subseteq`` this makes the vector a canonical
    decomposition of its union.  Disjointness is phrased through auxiliary
    intersection tuples (one per unordered pair, named after ``stem``) that
    are pinned by ``build_phi_cap`` and required empty.  Returns the formula
    together with the auxiliary tuples, which the caller must quantify in the
    same block as xs.
    """
    parts = []
    aux = []
    n = len(xs)
    for i in range(n):
        for j in range(i + 1, n):
            y = enc_var(f"{stem}_{i}_{j}")
            aux.append(y)
            parts.append(build_phi_cap(xs[i], xs[j], y))
            parts.append(build_phi_empty(y))
    for i in range(n):
        for j in range(n):
            if i != j:
                parts.append(build_phi_dis(xs[i], xs[j]))
    return f_and(*parts), tuple(aux)


class _PsiFamily:
    """Length-checked vector formula constructors for a fixed width n."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("vector width must be at least 1")
        self.n = n

    def _check(self, *vectors):
        for v in vectors:
            if len(v) != self.n:
                raise ValueError(f"expected a vector of width {self.n}, got {len(v)}")

    def psi_in(self, v, ys):
        self._check(ys)
        return psi_in(v, ys)

    def psi_plus(self, xs, y, zs):
        self._check(xs, zs)
        return psi_plus(xs, y, zs)

    def psi_cap(self, xs, y, zs):
        self._check(xs, zs)
        return psi_cap(xs, y, zs)

    def psi_subseteq(self, xs, ys):
        self._check(xs, ys)
        return psi_subseteq(xs, ys)

    def psi_max(self, xs, stem="cap"):
        self._check(xs)
        return psi_max(xs, stem)


def build_psi_family(n: int) -> _PsiFamily:
    """Constructors for the vector formulas at width n."""
    return _PsiFamily(n)


# -- the reachability sentence ----------------------------------------------------


@dataclass(frozen=True)
class Sentence:
    """Prenex sentence: exists(exist_vars): exist_body and forall(forall_vars): forall_body."""

    exist_vars: tuple
    forall_vars: tuple
    exist_body: Formula
    forall_body: Formula = TRUE

    def is_existential(self) -> bool:
        return not self.forall_vars


class _NamePool:
    """Deterministic allocator of distinct word-character stems."""

    def __init__(self):
        self._used = set()

    def fresh(self, base: str) -> str:
        s = re.sub(r"[^A-Za-z0-9_]", "_", base) or "v"
        cand, k = s, 2
        while cand in self._used:
            cand = f"{s}{k}"
            k += 1
        self._used.add(cand)
        return cand


def _param_lin(v) -> Lin:
    return Lin.var(f"x_{v}") if isinstance(v, str) else lin(rat(v))


def _enc_guard(g: ParamInterval) -> IntervalEnc:
    if isinstance(g.lo, str) or is_finite(g.lo):
        b, bot = _param_lin(g.lo), lin(FLAG_CLOSED if g.lo_closed else FLAG_OPEN)
    else:
        b, bot = lin(0), lin(FLAG_INF)
    if isinstance(g.hi, str) or is_finite(g.hi):
        t, top = _param_lin(g.hi), lin(FLAG_CLOSED if g.hi_closed else FLAG_OPEN)
    else:
        t, top = lin(0), lin(FLAG_INF)
    return IntervalEnc(b, t, bot, top)


def _psi_step(xs, out_vec, mids, upd: Lin, guard: IntervalEnc) -> Formula:
    """One transition: shift xs by the scaled update, then clip to the guard.

    The set of admissible effects depends on the sign of the update -- (0, z]
    for positive z, [z, 0) for negative, {0} for zero -- so the shift is a
    three-way case split.  With a literal update the split folds to a single
    branch; with a parametric one the sign tests stay in the formula.
    """
    pos = IntervalEnc(lin(0), upd, lin(FLAG_OPEN), lin(FLAG_CLOSED))
    negv = IntervalEnc(upd, lin(0), lin(FLAG_CLOSED), lin(FLAG_OPEN))
    zero = IntervalEnc(lin(0), lin(0), lin(FLAG_CLOSED), lin(FLAG_CLOSED))
    shift = f_and(
        f_implies(gt(upd, 0), psi_plus(xs, pos, mids)),
        f_implies(lt(upd, 0), psi_plus(xs, negv, mids)),
        f_implies(eq(upd, 0), psi_plus(xs, zero, mids)),
    )
    return f_and(shift, psi_cap(mids, guard, out_vec))


def _sentence_stems(pc: ParametricCoca):
    pool = _NamePool()
    state_stem = {r: pool.fresh(r) for r in pc.states}
    trans_stem = [pool.fresh(f"t{k}") for k in range(len(pc.transitions))]
    mid_stem = [pool.fresh(f"m{k}") for k in range(len(pc.transitions))]
    cap_stem = {r: pool.fresh(f"cap_{state_stem[r]}") for r in pc.states}
    return state_stem, trans_stem, mid_stem, cap_stem


def _succ_block(pc, stems, n, suffix):
    """Vectors and per-transition conjuncts "transition vector = image of the
    source vector shifted by the update and clipped to the target guard"."""
    state_stem, trans_stem, mid_stem, _ = stems
    iq = {r: enc_vector(state_stem[r] + suffix, n) for r in pc.states}
    names = []
    for r in pc.states:
        for e in iq[r]:
            names.extend(enc_names(e))
    parts = []
    its = []
    for k, t in enumerate(pc.transitions):
        it = enc_vector(trans_stem[k] + suffix, n)
        mids = enc_vector(mid_stem[k] + suffix, n)
        its.append(it)
        for e in it:
            names.extend(enc_names(e))
        for e in mids:
            names.extend(enc_names(e))
        upd = _param_lin(t.update)
        parts.append(_psi_step(iq[t.src], it, mids, upd, _enc_guard(pc.tau(t.dst))))
    return parts, names, iq, its


def build_psi_succ(pc: ParametricCoca, n: int):
    """Formula tying per-transition vectors to one-step images.

    Returns ``(formula, iq, its)`` where ``iq`` maps each state to its vector
    of interval tuples and ``its`` lists the per-transition output vectors in
    transition order.  Auxiliary shift tuples are free variables of the
    formula, pinned by the sum constraints.
    """
    parts, _, iq, its = _succ_block(pc, _sentence_stems(pc), n, "")
    return f_and(*parts), iq, its


def _candidate_block(pc, stems, n, a, p, suffix):
    """Variables and formula asserting "the state vectors form a reachability
    candidate seeded at p(a)": each transition vector is the image of its
    source vector clipped to the target guard, images flow back into the
    target vector, every state vector is canonically decomposed, and a lies
    in the vector of p."""
    cap_stem = stems[3]
    parts, names, iq, its = _succ_block(pc, stems, n, suffix)
    for k, t in enumerate(pc.transitions):
        parts.append(psi_subseteq(its[k], iq[t.dst]))
    for r in pc.states:
        fm, aux = psi_max(iq[r], cap_stem[r] + suffix)
        parts.append(fm)
        for e in aux:
            names.extend(enc_names(e))
    parts.append(psi_in(lin(rat(a)), iq[p]))
    return f_and(*parts), names, iq


def build_sentence(pc: ParametricCoca, frm, to) -> Sentence:
    """Sentence that holds iff some valuation makes ``to`` reachable from ``frm``.

    The existential block guesses a parameter valuation and a reachability
    candidate containing the target value; the universal block states that
    the guessed candidate is contained in every candidate, i.e. that it is
    the actual reachability map.  Width n = 4(L+1) where L is the number of
    distinct guards, which bounds the parts of any state's reachability set.
    """
    p, a = frm
    q, b = to
    pc.tau(p), pc.tau(q)
    a, b = rat(a), rat(b)
    distinct_guards = len(set(pc.guards))
    n = 4 * (distinct_guards + 1)
    stems = _sentence_stems(pc)
    y_cand, y_names, y_iq = _candidate_block(pc, stems, n, a, p, "")
    z_cand, z_names, z_iq = _candidate_block(pc, stems, n, a, p, "_u")
    xvars = [f"x_{x}" for x in pc.params]
    exist_body = f_and(
        y_cand,
        build_phi_in(lin(a), _enc_guard(pc.tau(p))),
        psi_in(lin(b), y_iq[q]),
    )
    forall_body = f_implies(
        z_cand,
        f_and(*[psi_subseteq(y_iq[r], z_iq[r]) for r in pc.states]),
    )
    exist_vars = tuple(xvars + y_names)
    forall_vars = tuple(z_names)
    if len(set(exist_vars)) != len(exist_vars) or len(set(forall_vars)) != len(forall_vars):
        raise AssertionError("variable name collision in sentence construction")
    return Sentence(exist_vars, forall_vars, exist_body, forall_body)


# -- acyclic automata: purely existential encoding ---------------------------------


def _check_acyclic(pc):
    """Topological check over the state graph; self-loops count as cycles."""
    out_edges = {r: [] for r in pc.states}
    indeg = {r: 0 for r in pc.states}
    for t in pc.transitions:
        out_edges[t.src].append(t.dst)
        indeg[t.dst] += 1
    queue = [r for r in pc.states if indeg[r] == 0]
    seen = 0
    while queue:
        r = queue.pop()
        seen += 1
        for s in out_edges[r]:
            indeg[s] -= 1
            if indeg[s] == 0:
                queue.append(s)
    if seen != len(pc.states):
        raise NotAcyclic("the state graph has a cycle")


def encode_acyclic(pc: ParametricCoca, frm, to) -> Sentence:
    """Existential formula for reachability when the state graph is acyclic.

    Any admissible run in an acyclic graph visits at most |Q| transitions and
    its set of end values is a single interval, so the run is guessed
    directly: index variables t_1..t_|Q| pick transitions, chained interval
    tuples I_0..I_|Q| carry the value sets, and some prefix of the slots ends
    at the target with b inside.  Slots past the chosen prefix remain
    satisfiable no matter what they carry.
    """
    _check_acyclic(pc)
    p, a = frm
    q, b = to
    pc.tau(p), pc.tau(q)
    a, b = rat(a), rat(b)
    xvars = [f"x_{x}" for x in pc.params]
    guard_p = _enc_guard(pc.tau(p))
    zero_len = FALSE
    if p == q and a == b:
        zero_len = build_phi_in(lin(a), guard_p)
    nt = len(pc.transitions)
    nq = len(pc.states)
    if nt == 0:
        return Sentence(tuple(xvars), (), zero_len, TRUE)

    names = []
    tvar = {}
    for i in range(1, nq + 1):
        tvar[i] = Lin.var(f"t_{i}")
        names.append(f"t_{i}")
    ienc = {0: _enc_of_tuple((a, a, FLAG_CLOSED, FLAG_CLOSED))}
    for i in range(1, nq + 1):
        ienc[i] = enc_var(f"s{i}")
        names.extend(enc_names(ienc[i]))

    steps = []
    for i in range(1, nq + 1):
        branches = []
        for j, t in enumerate(pc.transitions):
            mid = enc_var(f"m{i}_{j}")
            names.extend(enc_names(mid))
            step = _psi_step(
                (ienc[i - 1],),
                (ienc[i],),
                (mid,),
                _param_lin(t.update),
                _enc_guard(pc.tau(t.dst)),
            )
            branches.append(f_and(eq(tvar[i], j + 1), step))
        steps.append(f_or(*branches))

    init = f_or(*[eq(tvar[1], j + 1) for j, t in enumerate(pc.transitions) if t.src == p])

    def nxt(u, v):
        pairs = []
        for j, tj in enumerate(pc.transitions):
            for k, tk in enumerate(pc.transitions):
                if tj.dst == tk.src:
                    pairs.append(f_and(eq(u, j + 1), eq(v, k + 1)))
        return f_or(*pairs)

    finals = []
    for m in range(1, nq + 1):
        fin = f_or(*[eq(tvar[m], j + 1) for j, t in enumerate(pc.transitions) if t.dst == q])
        chain = [nxt(tvar[i], tvar[i + 1]) for i in range(1, m)]
        finals.append(f_and(fin, build_phi_in(lin(b), ienc[m]), *chain))

    body = f_or(
        zero_len,
        f_and(build_phi_in(lin(a), guard_p), init, *steps, f_or(*finals)),
    )
    return Sentence(tuple(xvars + names), (), body, TRUE)


# -- evaluation ---------------------------------------------------------------


def _eval_lin(term: Lin, mu) -> Rat:
    s = term.const
    for v, c in term.coeffs:
        if v not in mu:
            raise UnboundVariable(f"no value for variable {v!r}")
        s = s + c * rat(mu[v])
    return s


def eval_formula(f: Formula, mu) -> bool:
    """Evaluate a quantifier-free formula under a full valuation."""
    if isinstance(f, Cmp):
        return _CMP_EVAL[f.op](_eval_lin(f.term, mu))
    if isinstance(f, And):
        return all(eval_formula(it, mu) for it in f.items)
    if isinstance(f, Or):
        return any(eval_formula(it, mu) for it in f.items)
    if isinstance(f, Not):
        return not eval_formula(f.item, mu)
    raise TypeError(f"eval_formula expects a quantifier-free formula, got {f!r}")


def eval_enc(e: IntervalEnc, mu) -> Interval:
    """Interval denoted by a symbolic tuple under a valuation."""
    return enc_eval(tuple(_eval_lin(term, mu) for term in e.slots()))


# -- SMT-LIB emission and solving ----------------------------------------------


def _smt_num(q) -> str:
    q = rat(q)
    n, d = q.numerator, q.denominator
    if d == 1:
        return str(n) if n >= 0 else f"(- {-n})"
    core = f"(/ {abs(n)} {d})"
    return f"(- {core})" if n < 0 else core


def _smt_lin(term: Lin) -> str:
    parts = []
    for v, c in term.coeffs:
        if c == 1:
            parts.append(v)
        else:
            parts.append(f"(* {_smt_num(c)} {v})")
    if term.const != 0 or not parts:
        parts.append(_smt_num(term.const))
    if len(parts) == 1:
        return parts[0]
    return "(+ " + " ".join(parts) + ")"


def _smt_formula(f: Formula) -> str:
    if isinstance(f, Cmp):
        body = _smt_lin(f.term)
        if f.op == "!=":
            return f"(not (= {body} 0))"
        return f"({f.op} {body} 0)"
    if isinstance(f, And):
        if not f.items:
            return "true"
        return "(and " + " ".join(_smt_formula(it) for it in f.items) + ")"
    if isinstance(f, Or):
        if not f.items:
            return "false"
        return "(or " + " ".join(_smt_formula(it) for it in f.items) + ")"
    if isinstance(f, Not):
        return f"(not {_smt_formula(f.item)})"
    raise TypeError(f"not a formula: {f!r}")


def emit_smtlib(f) -> str:
    """SMT-LIB 2 script for a sentence (or bare formula, all-existential)."""
    if not isinstance(f, Sentence):
        f = Sentence(tuple(sorted(free_vars(f))), (), f, TRUE)
    lines = ["(set-logic LRA)"]
    for v in f.exist_vars:
        lines.append(f"(declare-const {v} Real)")
    lines.append(f"(assert {_smt_formula(f.exist_body)})")
    if f.forall_body != TRUE:
        if f.forall_vars:
            binders = " ".join(f"({v} Real)" for v in f.forall_vars)
            lines.append(f"(assert (forall ({binders}) {_smt_formula(f.forall_body)}))")
        else:
            lines.append(f"(assert {_smt_formula(f.forall_body)})")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"


class SolveResult(enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"


def solve(f, solver_command: str, timeout_s: float = 60.0) -> SolveResult:
    """Run an external SMT solver on a sentence / formula / script text.

    ``solver_command`` is a shell-style template such as ``"z3 -in"`` (script
    on stdin) or ``"cvc5 {file}"`` (script written to a temp file substituted
    for ``{file}``).  A wall-clock timeout yields UNKNOWN; the first line of
    standard output reading sat/unsat/unknown decides the result.
    """
    script = f if isinstance(f, str) else emit_smtlib(f)
    argv = shlex.split(solver_command)
    if not argv:
        raise SolverNotFound("empty solver command")
    tmp_path = None
    stdin_text = script
    try:
        if any("{file}" in tok for tok in argv):
            fd, tmp_path = tempfile.mkstemp(suffix=".smt2", text=True)
            with os.fdopen(fd, "w") as fh:
                fh.write(script)
            argv = [tok.replace("{file}", tmp_path) for tok in argv]
            stdin_text = ""
        try:
            proc = subprocess.run(
                argv,
                input=stdin_text,
                capture_output=True,
                text=True,
                timeout=timeout_s,
            )
        except FileNotFoundError as exc:
            raise SolverNotFound(f"cannot run solver {argv[0]!r}") from exc
        except subprocess.TimeoutExpired:
            return SolveResult.UNKNOWN
    finally:
        if tmp_path is not None:
            try:
                os.unlink(tmp_path)
            except OSError:
                pass
    for line in proc.stdout.splitlines():
        tok = line.strip()
        if tok == "sat":
            return SolveResult.SAT
        if tok == "unsat":
            return SolveResult.UNSAT
        if tok == "unknown":
            return SolveResult.UNKNOWN
    blurb = (proc.stdout + proc.stderr).strip()[:200]
    raise MalformedSolverOutput(f"no sat/unsat/unknown in solver output: {blurb!r}")


# -- integer rescaling -----------------------------------------------------------


def rescale_to_integer(mu: dict, pc: ParametricCoca) -> dict:
    """Scale a valuation to integers, preserving witnessed reachability.

    The factor is the product of the denominators of the valuation, so it is
    a positive integer and clears every denominator.  A transition with
    update z contributes effects {alpha * z : 0 < alpha <= 1}; multiplying z
    by lambda >= 1 only enlarges that set (alpha/lambda compensates), so
    every admissible run under mu is still admissible under lambda * mu with
    identical counter values.  This needs guards to be unaffected by the
    scaling, hence parameters may occur only on updates.
    """
    if pc.has_parametric_guard():
        raise ParametricGuardPresent(
            "integer rescaling applies only when parameters occur on updates"
        )
    vals = {x: rat(v) for x, v in mu.items()}
    lam = rat(1)
    for v in vals.values():
        lam = lam * rat(v.denominator)
    return {x: v * lam for x, v in vals.items()}
