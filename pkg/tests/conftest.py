import json

import pytest

from coca.model import ParamInterval, ParametricCoca, parse_model


def as_parametric(m):
    """Constant-parameter view of a guarded automaton (no parameters)."""
    guards = tuple(
        ParamInterval(g.lo, g.hi, g.lo_closed, g.hi_closed) for g in m.guards
    )
    return ParametricCoca(m.states, m.transitions, guards, ())


def succ_valuation(w, rmap, n, iq, its):
    """A full valuation of a psi_succ block consistent with ``rmap``.

    Assigns each state vector the canonical decomposition of its set in
    ``rmap`` (padded with empty tuples), and each shift/output vector the
    functional tuple values the step formulas pin.  Returns the valuation;
    ``its[k]`` ends up denoting exactly the one-step image of the source
    set through transition k, clipped to the target guard.
    """
    from coca.encoding import enc_cap, enc_names, enc_of_interval, enc_sum, enc_vector
    from coca.intervals import EMPTY
    from coca.rational import rat

    empty_tup = enc_of_interval(EMPTY)
    mu = {}
    parts_of = {}
    for r in w.states:
        parts = rmap.get(r).parts
        assert len(parts) <= n, (r, len(parts))
        tups = [enc_of_interval(p) for p in parts]
        tups += [empty_tup] * (n - len(tups))
        parts_of[r] = tups
        for e, tup in zip(iq[r], tups):
            mu.update(zip(enc_names(e), tup))
    for k, t in enumerate(w.transitions):
        z = rat(t.update)
        if z > 0:
            seg = (rat(0), z, 0, 1)
        elif z < 0:
            seg = (z, rat(0), 1, 0)
        else:
            seg = (rat(0), rat(0), 1, 1)
        guard_tup = enc_of_interval(w.tau(t.dst))
        mids = enc_vector(f"m{k}", n)
        for i, src_tup in enumerate(parts_of[t.src]):
            mid = enc_sum(src_tup, seg)
            out = enc_cap(mid, guard_tup)
            mu.update(zip(enc_names(mids[i]), mid))
            mu.update(zip(enc_names(its[k][i]), out))
    return mu

# The running example: four states, a positive feeder loop on r, and two
# routes into the unguarded sink q.  Used across the analysis, engine,
# encoding, and CLI tests; the expected reachability values are frozen in
# the tests that consume it.
FIG1_DOC = {
    "type": "guarded",
    "states": [
        {"id": "p", "guard": "[-5,15]"},
        {"id": "r", "guard": "[20,100]"},
        {"id": "rp", "guard": "(-inf,inf)"},
        {"id": "q", "guard": "(-inf,inf)"},
    ],
    "transitions": [
        {"src": "p", "update": "5", "dst": "r"},
        {"src": "r", "update": "-1", "dst": "q"},
        {"src": "p", "update": "3", "dst": "rp"},
        {"src": "rp", "update": "-5", "dst": "q"},
        {"src": "r", "update": "2", "dst": "r"},
    ],
}

# Two-state loop with a single global guard: p -(+2)-> q, q -(-3)-> q
# inside [0,10].  The worked example for most plain-analysis operations.
LOOP_DOC = {
    "type": "coca",
    "states": ["p", "q"],
    "global_guard": "[0,10]",
    "transitions": [
        {"src": "p", "update": "2", "dst": "q"},
        {"src": "q", "update": "-3", "dst": "q"},
    ],
}


@pytest.fixture(scope="session")
def fig1():
    return parse_model(FIG1_DOC)


@pytest.fixture(scope="session")
def loop():
    return parse_model(LOOP_DOC)


@pytest.fixture()
def fig1_path(tmp_path):
    path = tmp_path / "fig1.json"
    path.write_text(json.dumps(FIG1_DOC))
    return str(path)


@pytest.fixture()
def loop_path(tmp_path):
    path = tmp_path / "loop.json"
    path.write_text(json.dumps(LOOP_DOC))
    return str(path)
