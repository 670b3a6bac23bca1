"""Decision procedures for single-guard (plain) automata.

The reachable value set Post_{p,q}(a) of a plain automaton is always an
interval minus at most three points: its two closure endpoints and the
start value a.  Everything here serves to compute that representation
exactly:

* path queries under *sign conditions* (has/lacks a positive or negative
  transition, first or last nonzero sign) — each condition is a tiny DFA
  over edge signs, sets of conditions are DFA products, and existence /
  best-Δ⁺ / best-Δ⁻ queries are BFS / layered DP on the product graph;
* enabledness of a start value, admissible sign cycles, closure
  endpoints, membership of the endpoints and of a itself;
* reachability with equality tests, reduced to plain reachability on
  induced subautomata between tested configurations.

Path-length bounds follow the structure theory: optima only ever need
walks of at most |Q| edges, where |Q| counts the automaton's states.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

from .errors import UnknownState
from .intervals import EMPTY, Interval, IntervalSet, interval, point
from .model import Coca, EqCoca, Transition
from .rational import NEG_INF, POS_INF, is_finite, rat

__all__ = [
    "Cond",
    "cond_paths_exist",
    "cond_paths_opt",
    "enab_test",
    "admissible_cycle",
    "closure_endpoints",
    "a_in_post",
    "endpoint_membership",
    "PostRepr",
    "post_repr",
    "reach",
    "eq_reach",
]


class Cond(enum.IntEnum):
    """Sign conditions on paths.

    FIRST_*/LAST_* are strict: they require a nonzero transition of that
    sign to exist (a path with no nonzero transitions satisfies neither).
    """

    HAS_POS = 1
    HAS_NEG = 2
    NO_POS = 3
    NO_NEG = 4
    FIRST_POS = 5
    FIRST_NEG = 6
    LAST_POS = 7
    LAST_NEG = 8


_CONTRADICTIONS = (
    (Cond.HAS_POS, Cond.NO_POS),
    (Cond.HAS_NEG, Cond.NO_NEG),
    (Cond.FIRST_POS, Cond.FIRST_NEG),
    (Cond.LAST_POS, Cond.LAST_NEG),
    (Cond.FIRST_POS, Cond.NO_POS),
    (Cond.FIRST_NEG, Cond.NO_NEG),
    (Cond.LAST_POS, Cond.NO_POS),
    (Cond.LAST_NEG, Cond.NO_NEG),
)

# Monitor DFAs over edge signs.  Tables are indexed [state][sign] with
# sign 0 = negative, 1 = zero, 2 = positive; -1 blocks the edge.
_MONITORS = {
    Cond.HAS_POS: (0, frozenset({1}), ((0, 0, 1), (1, 1, 1))),
    Cond.HAS_NEG: (0, frozenset({1}), ((1, 0, 0), (1, 1, 1))),
    Cond.NO_POS: (0, frozenset({0}), ((0, 0, -1),)),
    Cond.NO_NEG: (0, frozenset({0}), ((-1, 0, 0),)),
    Cond.FIRST_POS: (0, frozenset({1}), ((-1, 0, 1), (1, 1, 1))),
    Cond.FIRST_NEG: (0, frozenset({1}), ((1, 0, -1), (1, 1, 1))),
    # last-sign tracker: 0 none yet, 1 last was positive, 2 last was negative
    Cond.LAST_POS: (0, frozenset({1}), ((2, 0, 1), (2, 1, 1), (2, 2, 1))),
    Cond.LAST_NEG: (0, frozenset({2}), ((2, 0, 1), (2, 1, 1), (2, 2, 1))),
}


def _normalize_conds(conds):
    cs = tuple(sorted(set(Cond(c) for c in conds)))
    for x, y in _CONTRADICTIONS:
        if x in cs and y in cs:
            raise ValueError(f"contradictory path conditions {x.name} and {y.name}")
    return cs


_R0 = rat(0)


class _Ctx:
    """Per-automaton query context with memoized product-graph queries."""

    def __init__(self, v: Coca):
        self.v = v
        self.n = len(v.states)
        self.idx = {s: i for i, s in enumerate(v.states)}
        self.out = [[] for _ in v.states]
        for t in v.transitions:
            z = t.update
            sign = 0 if z < 0 else (1 if z == 0 else 2)
            self.out[self.idx[t.src]].append((sign, z, self.idx[t.dst]))
        self._exists = {}
        self._opt = {}

    def state(self, s: str) -> int:
        try:
            return self.idx[s]
        except KeyError:
            raise UnknownState(f"unknown state {s!r}") from None

    # -- existence of a condition-satisfying path (any length, incl. 0) ---
    def exists(self, pi: int, qi: int, conds) -> bool:
        key = (pi, qi, conds)
        hit = self._exists.get(key)
        if hit is not None:
            return hit
        mons = [_MONITORS[c] for c in conds]
        start = (pi, tuple(m[0] for m in mons))

        def accepting(node):
            si, ms = node
            return si == qi and all(
                ms[k] in mons[k][1] for k in range(len(mons))
            )

        seen = {start}
        stack = [start]
        found = accepting(start)
        while stack and not found:
            si, ms = stack.pop()
            for sign, _z, di in self.out[si]:
                nxt = []
                for k, m in enumerate(ms):
                    m2 = mons[k][2][m][sign]
                    if m2 < 0:
                        break
                    nxt.append(m2)
                else:
                    node = (di, tuple(nxt))
                    if node not in seen:
                        seen.add(node)
                        if accepting(node):
                            found = True
                            break
                        stack.append(node)
        self._exists[key] = found
        return found

    # -- best positive/negative effect over walks of <= n edges -----------
    def opt(self, pi: int, qi: int, conds, positive: bool):
        """max Δ⁺ (positive=True) or min Δ⁻ over condition-satisfying
        walks of at most |Q| edges; None when no such walk exists."""
        key = (pi, qi, conds, positive)
        if key in self._opt:
            return self._opt[key]
        mons = [_MONITORS[c] for c in conds]
        nmon = len(mons)

        def accepting(node):
            si, ms = node
            return si == qi and all(ms[k] in mons[k][1] for k in range(nmon))

        better = max if positive else min
        best = None

        def fold(node, val):
            nonlocal best
            if accepting(node):
                best = val if best is None else better(best, val)

        layer = {(pi, tuple(m[0] for m in mons)): _R0}
        for node, val in layer.items():
            fold(node, val)
        for _ in range(self.n):
            nxt_layer = {}
            for (si, ms), val in layer.items():
                for sign, z, di in self.out[si]:
                    nxt = []
                    for k in range(nmon):
                        m2 = mons[k][2][ms[k]][sign]
                        if m2 < 0:
                            break
                        nxt.append(m2)
                    else:
                        if positive:
                            v2 = val + z if sign == 2 else val
                        else:
                            v2 = val + z if sign == 0 else val
                        node = (di, tuple(nxt))
                        old = nxt_layer.get(node)
                        if old is None or better(old, v2) != old:
                            nxt_layer[node] = v2
            layer = nxt_layer
            if not layer:
                break
            for node, val in layer.items():
                fold(node, val)
        self._opt[key] = best
        return best


@lru_cache(maxsize=256)
def _ctx(v: Coca) -> _Ctx:
    return _Ctx(v)


# -- public path queries ------------------------------------------------------


def cond_paths_exist(v: Coca, p: str, q: str, conds=()) -> bool:
    """Is there a p->q path (possibly empty) satisfying the conditions?"""
    cs = _normalize_conds(conds)
    ctx = _ctx(v)
    return ctx.exists(ctx.state(p), ctx.state(q), cs)


def cond_paths_opt(v: Coca, p: str, q: str, conds, objective: str):
    """Best cumulative positive (or negative) effect over short walks.

    objective "max-pos" maximizes the sum of positive updates, returning
    -inf when no satisfying walk of at most |Q| edges exists; "min-neg"
    minimizes the sum of negative updates, returning +inf when none
    exists.  Zero-length walks count when p == q and the conditions
    accept the empty path.
    """
    cs = _normalize_conds(conds)
    ctx = _ctx(v)
    if objective == "max-pos":
        r = ctx.opt(ctx.state(p), ctx.state(q), cs, True)
        return NEG_INF if r is None else r
    if objective == "min-neg":
        r = ctx.opt(ctx.state(p), ctx.state(q), cs, False)
        return POS_INF if r is None else r
    raise ValueError(f"unknown objective {objective!r}")


# -- enabledness and cycles ---------------------------------------------------

_ZERO_ONLY = (Cond.NO_NEG, Cond.NO_POS)


def enab_test(v: Coca, a, p: str, q: str) -> bool:
    """Can some admissible run from (p, a) end in q?  (Post nonempty.)"""
    a = rat(a)
    g = v.global_guard
    if not g.contains(a):
        return False
    ctx = _ctx(v)
    pi, qi = ctx.state(p), ctx.state(q)
    lo_hit = a == g.lo
    hi_hit = a == g.hi
    if not lo_hit and not hi_hit:
        return ctx.exists(pi, qi, ())
    if lo_hit and hi_hit:
        return ctx.exists(pi, qi, _ZERO_ONLY)
    if ctx.exists(pi, qi, _ZERO_ONLY):
        return True
    first = (Cond.FIRST_POS,) if lo_hit else (Cond.FIRST_NEG,)
    return ctx.exists(pi, qi, first)


def admissible_cycle(v: Coca, a, p: str, q: str, sign: int) -> bool:
    """Is there a positive (sign > 0) or negative (sign < 0) cycle that
    some admissible run from (p, a) can enter, with q reachable from it?

    Concretely: a transition t of the given sign such that a enables a
    run to t's source, q is graph-reachable from t's source, and t's
    target reaches back to t's source.
    """
    if sign == 0:
        raise ValueError("sign must be positive or negative")
    a = rat(a)
    ctx = _ctx(v)
    qi = ctx.state(q)
    ctx.state(p)
    for t in v.transitions:
        z = t.update
        if (z > 0) if sign > 0 else (z < 0):
            src, dst = ctx.state(t.src), ctx.state(t.dst)
            if (
                ctx.exists(src, qi, ())
                and ctx.exists(dst, src, ())
                and enab_test(v, a, p, t.src)
            ):
                return True
    return False


# -- closure endpoints and membership ----------------------------------------


def _admissible_family(a, g):
    """The path-condition alternatives characterizing admissibility from a.

    Returns a tuple of condition tuples; a path is admissible from a iff
    it satisfies one of them.  Requires a in the guard g.
    """
    lo_hit = a == g.lo
    hi_hit = a == g.hi
    if not lo_hit and not hi_hit:
        return ((),)
    if lo_hit and hi_hit:
        return (_ZERO_ONLY,)
    if lo_hit:
        return (_ZERO_ONLY, (Cond.FIRST_POS,))
    return (_ZERO_ONLY, (Cond.FIRST_NEG,))


def closure_endpoints(v: Coca, a, p: str, q: str):
    """(inf, sup) of the closure of Post_{p,q}(a); (+inf, -inf) when empty."""
    a = rat(a)
    if not enab_test(v, a, p, q):
        return (POS_INF, NEG_INF)
    ctx = _ctx(v)
    pi, qi = ctx.state(p), ctx.state(q)
    g = v.global_guard
    family = _admissible_family(a, g)

    if a == g.hi:
        hi = g.hi
    elif admissible_cycle(v, a, p, q, +1):
        hi = g.hi
    else:
        gain = None
        for conds in family:
            m = ctx.opt(pi, qi, conds, True)
            if m is not None and (gain is None or m > gain):
                gain = m
        assert gain is not None, "enabled query must admit some path"
        cand = a + gain
        hi = g.hi if g.hi < cand else cand

    if a == g.lo:
        lo = g.lo
    elif admissible_cycle(v, a, p, q, -1):
        lo = g.lo
    else:
        drop = None
        for conds in family:
            m = ctx.opt(pi, qi, conds, False)
            if m is not None and (drop is None or m < drop):
                drop = m
        assert drop is not None, "enabled query must admit some path"
        cand = a + drop
        lo = g.lo if g.lo > cand else cand

    return (lo, hi)


def a_in_post(v: Coca, a, p: str, q: str) -> bool:
    """Is the start value itself reachable in q?  (a in Post_{p,q}(a))"""
    a = rat(a)
    if not enab_test(v, a, p, q):
        return False
    ctx = _ctx(v)
    pi, qi = ctx.state(p), ctx.state(q)
    if ctx.exists(pi, qi, _ZERO_ONLY):
        return True
    g = v.global_guard
    lo_hit = a == g.lo
    hi_hit = a == g.hi
    if lo_hit and hi_hit:
        return False
    if lo_hit:
        return ctx.exists(pi, qi, (Cond.FIRST_POS, Cond.LAST_NEG))
    if hi_hit:
        return ctx.exists(pi, qi, (Cond.FIRST_NEG, Cond.LAST_POS))
    return ctx.exists(pi, qi, (Cond.HAS_POS, Cond.HAS_NEG))


def _sup_attained(v, ctx, a, p: str, q: str, c) -> bool:
    """Is the finite supremum c of the closure actually reached?
    Assumes Post nonempty, a < c, c != a, and c in the guard."""
    pi, qi = ctx.state(p), ctx.state(q)
    diff = c - a
    for r in v.states:
        ri = ctx.state(r)
        if not ctx.exists(ri, qi, (Cond.HAS_POS, Cond.NO_NEG)):
            continue
        w = ctx.opt(ri, qi, (Cond.HAS_POS, Cond.NO_NEG), True)
        if w is None:
            continue
        w_clean = ctx.opt(pi, ri, (Cond.NO_NEG,), True)
        if w_clean is not None and w + w_clean >= diff:
            return True
        w_any = ctx.opt(pi, ri, (), True)
        if w_any is not None and w + w_any > diff:
            return True
        if admissible_cycle(v, a, p, r, +1):
            return True
    return False


def _inf_attained(v, ctx, a, p: str, q: str, b) -> bool:
    pi, qi = ctx.state(p), ctx.state(q)
    diff = b - a
    for r in v.states:
        ri = ctx.state(r)
        if not ctx.exists(ri, qi, (Cond.HAS_NEG, Cond.NO_POS)):
            continue
        w = ctx.opt(ri, qi, (Cond.HAS_NEG, Cond.NO_POS), False)
        if w is None:
            continue
        w_clean = ctx.opt(pi, ri, (Cond.NO_POS,), False)
        if w_clean is not None and w + w_clean <= diff:
            return True
        w_any = ctx.opt(pi, ri, (), False)
        if w_any is not None and w + w_any < diff:
            return True
        if admissible_cycle(v, a, p, r, -1):
            return True
    return False


def _endpoint_membership(v, a, p, q, lo, hi) -> frozenset:
    ctx = _ctx(v)
    g = v.global_guard
    if lo == hi:
        # singleton closure: the single point is reachable (Post nonempty)
        return frozenset({"lo", "hi"})
    out = set()
    if is_finite(lo):
        if lo == a:
            if a_in_post(v, a, p, q):
                out.add("lo")
        elif g.contains(lo) and _inf_attained(v, ctx, a, p, q, lo):
            out.add("lo")
    if is_finite(hi):
        if hi == a:
            if a_in_post(v, a, p, q):
                out.add("hi")
        elif g.contains(hi) and _sup_attained(v, ctx, a, p, q, hi):
            out.add("hi")
    return frozenset(out)


def endpoint_membership(v: Coca, a, p: str, q: str) -> frozenset:
    """Which of the closure endpoints belong to Post itself?

    Returns a subset of {"lo", "hi"}; empty when Post is empty or both
    endpoints are merely limits.
    """
    a = rat(a)
    lo, hi = closure_endpoints(v, a, p, q)
    if lo is POS_INF:  # empty sentinel
        return frozenset()
    return _endpoint_membership(v, a, p, q, lo, hi)


# -- the full representation --------------------------------------------------


@dataclass(frozen=True)
class PostRepr:
    """Post_{p,q}(a) = closure minus finitely many excluded points."""

    closure: Interval
    excluded: frozenset

    def is_empty(self) -> bool:
        return self.closure.is_empty()

    def contains(self, x) -> bool:
        x = rat(x)
        return self.closure.contains(x) and x not in self.excluded

    def to_interval_set(self) -> IntervalSet:
        s = IntervalSet.of(self.closure)
        if self.excluded:
            s = s.difference(IntervalSet(point(x) for x in self.excluded))
        return s


def post_repr(v: Coca, a, p: str, q: str) -> PostRepr:
    """Exact representation of the reachable value set Post_{p,q}(a)."""
    a = rat(a)
    lo, hi = closure_endpoints(v, a, p, q)
    if lo is POS_INF:
        return PostRepr(EMPTY, frozenset())
    closure = interval(lo, hi, is_finite(lo), is_finite(hi))
    mem = _endpoint_membership(v, a, p, q, lo, hi)
    excluded = set()
    if is_finite(lo) and "lo" not in mem:
        excluded.add(lo)
    if is_finite(hi) and "hi" not in mem:
        excluded.add(hi)
    if lo < a < hi and not a_in_post(v, a, p, q):
        excluded.add(a)
    return PostRepr(closure, frozenset(excluded))


def reach(v: Coca, p: str, a, q: str, b) -> bool:
    """Is value b reachable in state q from configuration (p, a)?"""
    return post_repr(v, rat(a), p, q).contains(rat(b))


# -- equality tests -----------------------------------------------------------


def _fresh(name, taken):
    cand = name
    while cand in taken:
        cand += "_"
    return cand


def eq_reach(v: EqCoca, p: str, a, q: str, b) -> bool:
    """Reachability for automata with integer equality tests.

    Runs must satisfy every visited state's test.  Reduced to plain
    reachability between consecutive tested configurations: a run can be
    split at the (finitely many) moments it sits in a tested state, and
    between two such moments it moves through untested states only.
    """
    a, b = rat(a), rat(b)
    if p not in v.states or q not in v.states:
        raise UnknownState(f"unknown query state {p!r} or {q!r}")
    g = v.global_guard
    phi_p, phi_q = v.phi(p), v.phi(q)
    if not g.contains(a) or (phi_p is not None and not phi_p.contains(a)):
        return False
    if not g.contains(b) or (phi_q is not None and not phi_q.contains(b)):
        return False

    src = _fresh("__src", v.states)
    snk = _fresh("__snk", v.states + (src,))
    states = v.states + (src, snk)
    transitions = v.transitions + (
        Transition(src, _R0, p),
        Transition(q, _R0, snk),
    )
    tests = dict(v.eq_tests)
    untested = frozenset(s for s in states if s not in tests)

    nodes = [(src, a), (snk, b)]
    nodes.extend((r, z) for r, z in sorted(tests.items()) if g.contains(z))

    def edge(u, x, w, y) -> bool:
        allowed = untested | {u, w}
        sub_states = tuple(s for s in states if s in allowed)
        sub_ts = tuple(
            t
            for t in transitions
            if t.src in allowed and t.dst in allowed and t.src != w and t.dst != u
        )
        return reach(Coca(sub_states, sub_ts, g), u, x, w, y)

    # BFS over tested configurations
    start = (src, a)
    goal = (snk, b)
    seen = {start}
    frontier = [start]
    while frontier:
        u, x = frontier.pop()
        for node in nodes:
            if node in seen:
                continue
            if edge(u, x, node[0], node[1]):
                if node == goal:
                    return True
                seen.add(node)
                frontier.append(node)
    return False
