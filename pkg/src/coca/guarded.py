"""Fixpoint reachability engine for automata with per-state guards.

Computes, for a start configuration ``p(a)``, the map from each state to
the set of counter values some admissible run can carry there.  Plain
iteration of the one-step image (:func:`succ`) converges only when every
reachable set is bounded, so the engine watches the iterates for
*expanding cycles*: admissible cyclic runs whose witness values keep
landing strictly beyond the previous iterate's frontier.  Pumping such a
cycle reaches every value between the witness and the guard boundary it
drifts towards, so the whole guard-clipped ray is added in one step
(:func:`accelerate`) and iteration resumes.

:func:`compute_reach` alternates the two phases until the map stabilizes.
Both phases carry generous iteration budgets derived from the structural
bound on how many interval parts a reachable set can have; exceeding one
(`BudgetExceeded`, `SafeguardTripped`) signals an engine defect, not a
property of the input.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import BudgetExceeded, InvalidCycle, SafeguardTripped
from .intervals import (
    EMPTY_SET,
    Interval,
    IntervalSet,
    format_interval_set,
    interval,
    iv_intersect,
    iv_minkowski_update,
    point,
)
from .rational import NEG_INF, POS_INF, ext_add, ext_neg, rat

__all__ = [
    "ReachMap",
    "ExpandingCycle",
    "Stabilized",
    "Found",
    "succ",
    "succ_pow",
    "find_expanding_cycle",
    "accelerate",
    "compute_reach",
    "greach",
]


class ReachMap:
    """Mapping state -> IntervalSet; states not present are empty.

    Equality and hashing consider the sets only.  ``provenance``, when
    set, records which one-step images produced the map from its
    predecessor: per state, a tuple of ``(transition index, source part
    index, image interval)`` triples.  The cycle finder walks these
    backwards to reconstruct concrete runs.
    """

    __slots__ = ("_sets", "provenance")

    def __init__(self, sets=None, provenance=None):
        clean = {}
        for q, s in (sets or {}).items():
            if isinstance(s, Interval):
                s = IntervalSet.of(s)
            if not s.is_empty():
                clean[q] = s
        self._sets = clean
        self.provenance = provenance

    def get(self, q) -> IntervalSet:
        return self._sets.get(q, EMPTY_SET)

    def states(self) -> tuple:
        return tuple(self._sets)

    def items(self):
        return self._sets.items()

    def is_empty(self) -> bool:
        return not self._sets

    def __eq__(self, other):
        if not isinstance(other, ReachMap):
            return NotImplemented
        return self._sets == other._sets

    def __hash__(self):
        return hash(frozenset(self._sets.items()))

    def __repr__(self):
        inner = ", ".join(
            f"{q}: {format_interval_set(s)}" for q, s in sorted(self._sets.items())
        )
        return "ReachMap({%s})" % inner


@dataclass(frozen=True)
class ExpandingCycle:
    """An admissible cyclic run that outgrows consecutive map iterates.

    ``configs`` is the witness sequence ``(q_0,a_0) .. (q_n,a_n)`` with
    ``q_0 == q_n``; ``steps[m] = (alpha, transition)`` carries config m
    to config m+1.  Counting map iterates from the map the cycle is
    *from*, ``intervals[m]`` is the part of the m-th iterate at ``q_m``
    containing ``a_m``, and ``prev_intervals[m-1]`` is the unique part
    of the previous iterate inside ``intervals[m]`` that the witness
    pushes past: ``a_m >= sup`` of it for ``sign=+1`` (net value drift
    upward), ``a_m <= inf`` for ``sign=-1``.
    """

    sign: int
    configs: tuple
    steps: tuple
    intervals: tuple
    prev_intervals: tuple

    def __len__(self):
        return len(self.steps)


@dataclass(frozen=True)
class Stabilized:
    """Iteration reached a fixpoint; ``map`` is the final (full) map."""

    map: ReachMap


@dataclass(frozen=True)
class Found:
    """An expanding cycle was extracted; ``map`` is the iterate the cycle
    starts from, i.e. the map :func:`accelerate` applies to."""

    cycle: ExpandingCycle
    map: ReachMap


@lru_cache(maxsize=64)
def _incoming(w):
    inc = {q: [] for q in w.states}
    for ti, t in enumerate(w.transitions):
        inc[t.dst].append((ti, t))
    return {q: tuple(v) for q, v in inc.items()}


def succ(w, r: ReachMap) -> ReachMap:
    """One-step image: keep ``r`` and add every guard-clipped transition
    image of it.  Monotone by construction (``r`` is carried verbatim)."""
    inc = _incoming(w)
    sets = {}
    prov = {}
    for qi, q in enumerate(w.states):
        g = w.guards[qi]
        pieces = list(r.get(q).parts)
        entries = []
        for ti, t in inc[q]:
            src = r.get(t.src)
            for pj, part in enumerate(src.parts):
                img = iv_intersect(iv_minkowski_update(part, t.update), g)
                if img.is_empty():
                    continue
                pieces.append(img)
                entries.append((ti, pj, img))
        if pieces:
            sets[q] = IntervalSet(pieces)
        if entries:
            prov[q] = tuple(entries)
    return ReachMap(sets, provenance=prov)


def succ_pow(w, r0: ReachMap, k: int) -> ReachMap:
    """k-fold application of :func:`succ` (stops early on a fixpoint;
    the result is the same).  Equals the set of values reachable from
    r0's configurations by admissible runs of at most k transitions."""
    cur = r0
    for _ in range(k):
        nxt = succ(w, cur)
        if nxt == cur:
            return cur
        cur = nxt
    return cur


# -- expanding-cycle extraction -------------------------------------------


def _preimage_window(v, z):
    """Values u with v = u + alpha*z for some alpha in (0,1]."""
    if z > 0:
        return interval(v - z, v, True, False)
    if z < 0:
        return interval(v, v - z, False, True)
    return point(v)


def _part_containing(iset: IntervalSet, v):
    for p in iset.parts:
        if p.contains(v):
            return p
    return None


def _trace_chain(w, iterates, q, v):
    """Walk provenance backwards from value ``v``, new at ``q`` in the
    latest iterate, reconstructing a concrete admissible run that
    produced it.

    At each step the producer value is chosen to be itself new in its
    own iterate whenever possible; the chain stops at the first old
    value (which is a fine run start).  Returns ``(x, nodes, steps)``
    where ``nodes[m] = (state, value)`` lives in iterate ``x + m`` and
    every node but possibly the first is new there, or None if some
    value has no traceable producer (not expected).
    """
    i = len(iterates) - 1
    nodes = [(q, v)]
    steps_rev = []
    j = i
    state, val = q, v
    while j >= 1:
        prov = (iterates[j].provenance or {}).get(state, ())
        best = None
        for ti, pj, img in prov:
            if not img.contains(val):
                continue
            t = w.transitions[ti]
            window = _preimage_window(val, t.update)
            src_parts = iterates[j - 1].get(t.src).parts
            choice = iv_intersect(window, src_parts[pj])
            if choice.is_empty():
                continue
            if j >= 2:
                fresh = IntervalSet.of(choice).difference(
                    iterates[j - 2].get(t.src)
                )
                if not fresh.is_empty():
                    best = (True, t, fresh.pick_point())
                    break
            if best is None:
                best = (False, t, IntervalSet.of(choice).pick_point())
        if best is None:
            return None
        is_fresh, t, pval = best
        alpha = (val - pval) / t.update if t.update != 0 else rat(1)
        steps_rev.append((alpha, t))
        nodes.append((t.src, pval))
        j -= 1
        state, val = t.src, pval
        if not is_fresh:
            break
    nodes.reverse()
    steps_rev.reverse()
    return j, nodes, steps_rev


def _validate_infix(w, iterates, x, nodes, steps, s, y):
    """Check the expanding-cycle conditions on chain positions s..y and
    build the cycle object, or return None if a condition fails."""
    n = y - s
    vy = nodes[y][1]
    vs = nodes[s][1]
    sign = 1 if vy > vs else -1
    ivs = []
    for m in range(s, y + 1):
        qm, am = nodes[m]
        part = _part_containing(iterates[x + m].get(qm), am)
        if part is None:
            return None
        ivs.append(part)
    if not ivs[0].is_subset_of(ivs[-1]):
        return None
    prevs = []
    for m in range(1, n + 1):
        qm, am = nodes[s + m]
        inner = [
            pp
            for pp in iterates[x + s + m - 1].get(qm).parts
            if pp.is_subset_of(ivs[m])
        ]
        if len(inner) != 1:
            return None
        prev = inner[0]
        pushes = am >= prev.hi if sign == 1 else am <= prev.lo
        if not pushes:
            return None
        prevs.append(prev)
    return ExpandingCycle(
        sign=sign,
        configs=tuple(nodes[s : y + 1]),
        steps=tuple(steps[s:y]),
        intervals=tuple(ivs),
        prev_intervals=tuple(prevs),
    )


def _scan_for_cycle(w, iterates):
    """Try to extract an expanding cycle from the iterate sequence.

    Every value that is new in the latest iterate is traced back to a
    concrete run; each run is scanned (latest revisits first) for a
    state revisit with nonzero drift passing the cycle conditions.
    Returns ``(cycle, anchor index)`` or None.
    """
    latest, prev = iterates[-1], iterates[-2]
    for q in w.states:
        fresh = latest.get(q).difference(prev.get(q))
        for part in fresh.parts:
            chain = _trace_chain(w, iterates, q, IntervalSet.of(part).pick_point())
            if chain is None:
                continue
            x, nodes, steps = chain
            for y in range(len(nodes) - 1, 0, -1):
                qy, vy = nodes[y]
                for s in range(y - 1, -1, -1):
                    if nodes[s][0] != qy or nodes[s][1] == vy:
                        continue
                    cyc = _validate_infix(w, iterates, x, nodes, steps, s, y)
                    if cyc is not None:
                        return cyc, x + s
    return None


def find_expanding_cycle(w, s0: ReachMap, budget: int, trace=None):
    """Iterate :func:`succ` until a fixpoint or an expanding cycle.

    Returns :class:`Stabilized` on a fixpoint.  Otherwise, periodically
    (at iteration counts 8, 16, 32, ... and at the budget) tries to
    extract a cycle from the iterates computed so far; on success
    returns :class:`Found` carrying the cycle and its anchor map — the
    iterate the cycle expands from, which is what :func:`accelerate`
    takes.  Runs of bounded automata stabilize well inside the budgets
    used by :func:`compute_reach`, so exhausting ``budget`` raises
    ``BudgetExceeded`` and indicates a bug.
    """
    iterates = [s0]
    cur = s0
    next_scan = 8
    i = 0
    while i < budget:
        nxt = succ(w, cur)
        i += 1
        if nxt == cur:
            if trace is not None:
                trace({"event": "stabilized", "iteration": i, "map": cur})
            return Stabilized(cur)
        if trace is not None:
            changed = {
                q: len(nxt.get(q).parts)
                for q in nxt.states()
                if nxt.get(q) != cur.get(q)
            }
            trace({"event": "succ", "iteration": i, "changed": changed, "map": nxt})
        iterates.append(nxt)
        cur = nxt
        if i == next_scan or i == budget:
            next_scan *= 2
            hit = _scan_for_cycle(w, iterates)
            if hit is not None:
                cycle, anchor = hit
                if trace is not None:
                    trace(
                        {
                            "event": "found",
                            "iteration": i,
                            "anchor": anchor,
                            "cycle": cycle,
                        }
                    )
                return Found(cycle, iterates[anchor])
    raise BudgetExceeded(
        f"no fixpoint or expanding cycle within {budget} iterations"
    )


# -- acceleration -----------------------------------------------------------


def _revalidate(w, s: ReachMap, c: ExpandingCycle):
    """Re-check every defining clause of the cycle against maps freshly
    recomputed from ``s``; raises InvalidCycle on any mismatch.  Defends
    acceleration (which adds a whole ray) against tracing bugs."""
    n = len(c.steps)
    if n < 1 or len(c.configs) != n + 1:
        raise InvalidCycle("malformed cycle shape")
    if len(c.intervals) != n + 1 or len(c.prev_intervals) != n:
        raise InvalidCycle("malformed cycle interval records")
    if c.sign not in (1, -1):
        raise InvalidCycle("cycle sign must be +1 or -1")
    q0, a0 = c.configs[0]
    qn, an = c.configs[-1]
    if q0 != qn:
        raise InvalidCycle("run does not return to its start state")
    drift_ok = an > a0 if c.sign == 1 else an < a0
    if not drift_ok:
        raise InvalidCycle("net drift does not match the cycle sign")
    for m, (alpha, t) in enumerate(c.steps):
        pm, am = c.configs[m]
        pm1, am1 = c.configs[m + 1]
        if t.src != pm or t.dst != pm1:
            raise InvalidCycle(f"step {m} does not connect its configurations")
        if not 0 < alpha <= 1:
            raise InvalidCycle(f"step {m} scaling factor outside (0,1]")
        if am1 != am + alpha * t.update:
            raise InvalidCycle(f"step {m} value arithmetic is inconsistent")
    maps = [s]
    for _ in range(n):
        maps.append(succ(w, maps[-1]))
    for m in range(n + 1):
        qm, am = c.configs[m]
        part = _part_containing(maps[m].get(qm), am)
        if part is None or part != c.intervals[m]:
            raise InvalidCycle(f"witness {m} is not in its claimed part")
        if m >= 1:
            before = maps[m - 1].get(qm)
            if before.contains(am):
                raise InvalidCycle(f"witness {m} is not new in its iterate")
            inner = [pp for pp in before.parts if pp.is_subset_of(c.intervals[m])]
            if len(inner) != 1 or inner[0] != c.prev_intervals[m - 1]:
                raise InvalidCycle(f"no unique previous part inside part {m}")
            prev = c.prev_intervals[m - 1]
            pushes = am >= prev.hi if c.sign == 1 else am <= prev.lo
            if not pushes:
                raise InvalidCycle(f"witness {m} does not push past the frontier")
    if not c.intervals[0].is_subset_of(c.intervals[-1]):
        raise InvalidCycle("start part does not sit inside the final part")


def accelerate(w, s: ReachMap, c: ExpandingCycle) -> ReachMap:
    """Add everything the cycle can pump to: the guard segment from the
    pivot witness value to the boundary the cycle drifts towards.

    ``c`` must be an expanding cycle from ``s`` (it is re-validated
    first).  The pivot is the cycle position with the least headroom
    between its witness value and the guard boundary in the drift
    direction (ties: earliest position; infinite headroom participates);
    no value can be pumped further than the tightest guard on the loop
    allows, and up to that point every value is attainable by stopping a
    partial traversal early.
    """
    _revalidate(w, s, c)
    n = len(c.steps)
    best_j = 1
    best_delta = None
    for m in range(1, n + 1):
        qm, am = c.configs[m]
        g = w.tau(qm)
        if c.sign == 1:
            delta = ext_add(g.hi, ext_neg(am))
        else:
            delta = ext_add(am, ext_neg(g.lo))
        if best_delta is None or delta < best_delta:
            best_delta = delta
            best_j = m
    qj, aj = c.configs[best_j]
    gj = w.tau(qj)
    if c.sign == 1:
        ray = iv_intersect(gj, interval(aj, POS_INF, True, False))
    else:
        ray = iv_intersect(gj, interval(NEG_INF, aj, False, True))
    sets = dict(s.items())
    sets[qj] = s.get(qj).union(IntervalSet.of(c.intervals[best_j], ray))
    return ReachMap(sets)


# -- the full algorithm ------------------------------------------------------


def compute_reach(w, p: str, a, trace=None) -> ReachMap:
    """Reachability map of the configuration ``p(a)``.

    Seeds ``{p: [a,a]}`` (clipped by the guard; an inadmissible start
    yields the empty map) and alternates cycle search with acceleration
    until the map stabilizes.  The result is the least fixpoint of
    :func:`succ` containing the seed.  ``trace``, if given, receives a
    dict per engine event (``succ``/``found``/``acc``/``stabilized``).
    """
    a = rat(a)
    seed = iv_intersect(point(a), w.tau(p))
    if seed.is_empty():
        return ReachMap()
    nq = len(w.states)
    nt = len(w.transitions)
    budget = 4 * nq * (4 * (nq + 1)) * (nt + 1)
    max_acc = 5 * nq * (2 * nq + 2) + nq
    cur = ReachMap({p: IntervalSet.of(seed)})
    accs = 0
    while True:
        outcome = find_expanding_cycle(w, cur, budget, trace=trace)
        if isinstance(outcome, Stabilized):
            return outcome.map
        accs += 1
        if accs > max_acc:
            raise SafeguardTripped(
                f"{accs} accelerations exceed the structural bound {max_acc}"
            )
        cur = accelerate(w, outcome.map, outcome.cycle)
        if trace is not None:
            trace({"event": "acc", "count": accs, "map": cur})


def greach(w, p: str, a, q: str, b) -> bool:
    """Can an admissible run carry the counter from p(a) to q(b)?"""
    w.tau(q)
    return compute_reach(w, p, a).get(q).contains(rat(b))
