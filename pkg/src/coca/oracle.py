"""Slow reference implementations used to cross-check the engines.

Nothing here is clever: bounded path enumeration with exact interval
images, randomized run sampling on a fixed coefficient grid, brute-force
SAT, and exhaustive valuation grids.  The fast engines are tested against
these on thousands of small random instances; the oracles themselves are
kept simple enough to audit by eye.
"""

from __future__ import annotations

import itertools
import random

from .intervals import (
    EMPTY_SET,
    Interval,
    IntervalSet,
    interval,
    iv_intersect,
    iv_minkowski_update,
    point,
)
from .guarded import ReachMap
from .model import Coca, GuardedCoca, Run, Transition
from .rational import NEG_INF, POS_INF, rat

__all__ = [
    "path_image",
    "enum_post_snapshots",
    "enum_post_bounded",
    "sample_runs",
    "brute_sat",
    "valuation_grid_check",
    "product_valuations",
    "random_guarded",
    "random_plain",
]


def path_image(model, p: str, a, transitions) -> Interval:
    """Exact set of values runs over a fixed transition sequence can reach.

    Folds one scaled-update-then-guard step per transition, starting from
    [a,a] clipped by the start guard.  Empty means no admissible run over
    this sequence exists.
    """
    a = rat(a)
    img = iv_intersect(point(a), model.tau(p))
    state = p
    for t in transitions:
        if t.src != state:
            raise ValueError(f"path does not chain at {t}")
        img = iv_intersect(iv_minkowski_update(img, t.update), model.tau(t.dst))
        if img.is_empty():
            return img
        state = t.dst
    return img


def enum_post_snapshots(model, p: str, a, k: int):
    """Per-depth reachability tables from path enumeration.

    Returns a list ``snaps`` of length k+1 where ``snaps[j]`` maps each
    state to the union of images of all admissible paths from p of length
    at most j.

    The enumeration walks the concrete path tree but prunes a branch when
    its image is already covered by the accumulated same-depth set at its
    state.  Pruning is sound: the covering pieces sit on surviving
    branches, and the one-step image map is monotone and distributes over
    unions, so extensions of a pruned branch are covered by extensions of
    the survivors.  (The fully unpruned walk is kept, inlined, in the
    unit tests for micro instances.)
    """
    a = rat(a)
    seed = iv_intersect(point(a), model.tau(p))
    covered = {s: EMPTY_SET for s in model.states}
    snaps = []

    if seed.is_empty():
        return [dict(covered) for _ in range(k + 1)]

    covered[p] = IntervalSet.of(seed)
    snaps.append(dict(covered))

    out = {}
    for t in model.transitions:
        out.setdefault(t.src, []).append(t)

    frontier = [(p, seed)]
    for _depth in range(1, k + 1):
        nxt_frontier = []
        for state, img in frontier:
            for t in out.get(state, ()):
                nxt = iv_intersect(
                    iv_minkowski_update(img, t.update), model.tau(t.dst)
                )
                if nxt.is_empty():
                    continue
                piece = IntervalSet.of(nxt)
                if piece.is_subset_of(covered[t.dst]):
                    continue
                covered[t.dst] = covered[t.dst].union(piece)
                nxt_frontier.append((t.dst, nxt))
        frontier = nxt_frontier
        snaps.append(dict(covered))
    return snaps


def enum_post_bounded(model, p: str, a, k: int) -> ReachMap:
    """Union of admissible path images of length <= k, grouped by end state."""
    return ReachMap(enum_post_snapshots(model, p, a, k)[k])


_ALPHA_GRID = tuple(rat(f"{i}/8") for i in range(1, 9))


def sample_runs(model, p: str, a, steps: int, trials: int, seed: int = 0):
    """Randomized admissible-run sampling on the coefficient grid {1/8..1}.

    Returns the list of configurations reached (including the start when
    admissible); each trial walks random transitions until a guard fails
    or no transition leaves the current state.  Deterministic per seed.
    """
    rng = random.Random(seed)
    a = rat(a)
    out = {}
    for t in model.transitions:
        out.setdefault(t.src, []).append(t)
    reached = []
    if not model.tau(p).contains(a):
        return reached
    for _ in range(trials):
        state, value = p, a
        reached.append((state, value))
        for _ in range(steps):
            choices = out.get(state)
            if not choices:
                break
            t = rng.choice(choices)
            alpha = rng.choice(_ALPHA_GRID)
            nxt = value + alpha * t.update
            if not model.tau(t.dst).contains(nxt):
                break
            state, value = t.dst, nxt
            reached.append((state, value))
    return reached


def sample_admissible_runs(model, p: str, a, steps: int, trials: int, seed: int = 0):
    """Like :func:`sample_runs` but returns the admissible run objects
    themselves (one maximal admissible prefix per trial, possibly empty)."""
    rng = random.Random(seed)
    a = rat(a)
    out = {}
    for t in model.transitions:
        out.setdefault(t.src, []).append(t)
    runs = []
    if not model.tau(p).contains(a):
        return runs
    for _ in range(trials):
        state, value = p, a
        chosen = []
        for _ in range(steps):
            choices = out.get(state)
            if not choices:
                break
            t = rng.choice(choices)
            alpha = rng.choice(_ALPHA_GRID)
            nxt = value + alpha * t.update
            if not model.tau(t.dst).contains(nxt):
                break
            chosen.append((alpha, t))
            state, value = t.dst, nxt
        runs.append(Run(p, a, tuple(chosen)))
    return runs


# -- SAT ----------------------------------------------------------------------


def brute_sat(cnf):
    """Exhaustive satisfiability check of a CNF given as a list of
    integer-literal lists (DIMACS convention).  Returns (sat, assignment)
    where the assignment maps variable index to bool."""
    n = max((abs(l) for clause in cnf for l in clause), default=0)
    for bits in itertools.product((False, True), repeat=n):
        mu = {i + 1: bits[i] for i in range(n)}
        if all(any(mu[abs(l)] == (l > 0) for l in clause) for clause in cnf):
            return True, mu
    return False, None


# -- parametric grids ---------------------------------------------------------


def product_valuations(params, values):
    """All valuations assigning each parameter one of the given values."""
    values = [rat(v) for v in values]
    for combo in itertools.product(values, repeat=len(params)):
        yield dict(zip(params, combo))


def valuation_grid_check(pm, p: str, a, q: str, b, grid):
    """Does some valuation in the grid make (q,b) reachable from (p,a)?

    Instantiates and runs the guarded fixpoint engine per valuation;
    returns (True, mu) on the first witness, else (False, None).
    """
    from .guarded import greach
    from .model import instantiate

    for mu in grid:
        if greach(instantiate(pm, mu), p, a, q, b):
            return True, mu
    return False, None


# -- random instances ---------------------------------------------------------

# updates stay within [-3, 3], mixing integers and non-integers
_UPDATE_POOL = tuple(
    rat(u)
    for u in (
        "-3", "-2", "-1", "0", "1", "2", "3",
        "1/2", "-1/2", "3/2", "-3/2", "2/3", "-2/3", "5/2", "-5/2", "1/4",
    )
)


def _random_guard(rng: random.Random) -> Interval:
    while True:
        lo = NEG_INF if rng.random() < 0.2 else rat(rng.randint(-10, 10))
        if rng.random() < 0.2:
            hi = POS_INF
        else:
            floor = lo if lo is not NEG_INF else rat(-10)
            hi = rat(rng.randint(int(floor), 10))
        g = interval(lo, hi, rng.random() < 0.7, rng.random() < 0.7)
        if not g.is_empty():
            return g


def _random_transitions(rng, states, m):
    return tuple(
        Transition(rng.choice(states), rng.choice(_UPDATE_POOL), rng.choice(states))
        for _ in range(m)
    )


def random_guarded(seed: int, max_states: int = 5, max_transitions: int = 8) -> GuardedCoca:
    """A small random per-state-guarded automaton (mixed guard shapes,
    mixed integer/rational updates).  Deterministic per seed."""
    rng = random.Random(seed)
    n = rng.randint(1, max_states)
    states = tuple(f"s{i}" for i in range(n))
    guards = tuple(_random_guard(rng) for _ in range(n))
    m = rng.randint(1, max_transitions)
    return GuardedCoca(states, _random_transitions(rng, states, m), guards)


def random_plain(seed: int, max_states: int = 5, max_transitions: int = 8) -> Coca:
    """A small random single-guard automaton whose guard contains an
    integer (so integer queries are meaningful).  Deterministic per seed."""
    rng = random.Random(seed)
    n = rng.randint(1, max_states)
    states = tuple(f"s{i}" for i in range(n))
    while True:
        g = _random_guard(rng)
        if any(g.contains(rat(i)) for i in range(-10, 11)):
            break
    m = rng.randint(1, max_transitions)
    return Coca(states, _random_transitions(rng, states, m), g)
