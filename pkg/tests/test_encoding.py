"""Tests for the interval encodings, formula families, and SMT plumbing."""

import itertools
import os
import random
import stat

import pytest

from conftest import as_parametric, succ_valuation
from coca.encoding import (
    FALSE,
    TRUE,
    Lin,
    Sentence,
    SolveResult,
    build_phi_cap,
    build_phi_dis,
    build_phi_empty,
    build_phi_in,
    build_phi_plus,
    build_phi_subseteq,
    build_psi_family,
    build_psi_succ,
    build_sentence,
    emit_smtlib,
    enc_cap,
    enc_eval,
    enc_of_interval,
    enc_sum,
    enc_var,
    encode_acyclic,
    eq,
    eval_formula,
    f_and,
    f_implies,
    f_not,
    f_or,
    free_vars,
    ge,
    gt,
    le,
    lin,
    lt,
    msum,
    ne,
    rescale_to_integer,
    solve,
)
from coca.errors import (
    BadFlag,
    MalformedSolverOutput,
    NotAcyclic,
    ParametricGuardPresent,
    SolverNotFound,
    UnboundVariable,
)
from coca.guarded import greach, succ, ReachMap
from coca.intervals import EMPTY, FULL, closed, interval, iv_intersect, point
from coca.model import (
    GuardedCoca,
    ParamInterval,
    ParametricCoca,
    Transition,
    instantiate,
)
from coca.oracle import product_valuations, random_guarded, valuation_grid_check
from coca.rational import NEG_INF, POS_INF, ext_add, is_finite, rat

UNB = ParamInterval(NEG_INF, POS_INF, False, False)


# -- linear terms and formula constructors -------------------------------------


def test_lin_arithmetic():
    x, y = Lin.var("x"), Lin.var("y")
    t = x + y - x + 3
    assert t == y + 3
    assert t.variables() == ["y"]
    assert lin(rat("1/2")).is_const()
    assert lin("x") == x
    with pytest.raises(AttributeError):
        x.const = rat(1)


def test_formula_folding():
    x = Lin.var("x")
    assert f_and() == TRUE
    assert f_or() == FALSE
    assert f_and(TRUE, eq(x, 1), TRUE) == eq(x, 1)
    assert f_and(FALSE, eq(x, 1)) == FALSE
    assert f_or(TRUE, eq(x, 1)) == TRUE
    assert f_not(f_not(eq(x, 1))) == eq(x, 1)
    assert f_implies(FALSE, eq(x, 1)) == TRUE


def test_constant_comparisons_fold():
    assert eq(2, 2) == TRUE
    assert lt(3, 2) == FALSE
    assert ge(rat("1/2"), 0) == TRUE


def test_eval_formula_and_free_vars():
    x, y = Lin.var("x"), Lin.var("y")
    f = f_and(ge(x, 1), f_or(lt(y, 0), eq(x + y, 5)), ne(x, 2), le(y, 100), gt(x, 0))
    assert free_vars(f) == {"x", "y"}
    assert eval_formula(f, {"x": 1, "y": 4})
    assert not eval_formula(f, {"x": 2, "y": 3})
    with pytest.raises(UnboundVariable):
        eval_formula(f, {"x": 1})


# -- interval tuples ------------------------------------------------------------


def test_enc_eval_examples():
    assert enc_eval((rat(2), rat(4), 0, 1)) == interval(rat(2), rat(4), False, True)
    assert enc_eval((rat(1), rat(5), 2, 0)) == interval(NEG_INF, rat(5), False, False)
    assert enc_eval((rat(3), rat(-2), 1, 0)).is_empty()
    with pytest.raises(BadFlag):
        enc_eval((rat(0), rat(1), 3, 1))


def test_msum_examples():
    assert msum(2, 1) == 2
    assert msum(1, 0) == 0
    assert msum(1, 1) == 1
    with pytest.raises(BadFlag):
        msum(4, 0)


PALETTE = [
    EMPTY,
    point(rat(0)),
    point(rat(-3)),
    closed(rat(0), rat(2)),
    interval(rat(-1), rat(4), False, True),
    interval(rat("1/2"), rat("7/2"), True, False),
    interval(rat(-2), rat(2), False, False),
    interval(NEG_INF, rat(1), False, True),
    interval(rat(-1), POS_INF, True, False),
    FULL,
]


def test_enc_of_interval_roundtrip():
    for iv in PALETTE:
        assert enc_eval(enc_of_interval(iv)) == iv


def test_enc_sum_matches_interval_sum():
    for x, y in itertools.product(PALETTE, repeat=2):
        got = enc_eval(enc_sum(enc_of_interval(x), enc_of_interval(y)))
        if x.is_empty() or y.is_empty():
            assert got.is_empty()
        else:
            want = interval(
                ext_add(x.lo, y.lo),
                ext_add(x.hi, y.hi),
                x.lo_closed and y.lo_closed,
                x.hi_closed and y.hi_closed,
            )
            assert got == want, (x, y)


def test_enc_cap_matches_intersection():
    for x, y in itertools.product(PALETTE, repeat=2):
        got = enc_eval(enc_cap(enc_of_interval(x), enc_of_interval(y)))
        assert got == iv_intersect(x, y), (x, y)


# -- single-interval formulas ----------------------------------------------------


def bind(e, tup):
    from coca.encoding import enc_names

    return dict(zip(enc_names(e), tup))


def test_phi_cap_spec_example():
    x, y, z = enc_var("x"), enc_var("y"), enc_var("z")
    f = build_phi_cap(x, y, z)
    tx = enc_of_interval(interval(rat(2), rat(4), False, True))
    ty = enc_of_interval(closed(rat(4), rat(10)))
    mu = {**bind(x, tx), **bind(y, ty), **bind(z, (rat(4), rat(4), 1, 1))}
    assert eval_formula(f, mu)
    mu.update(bind(z, (rat(4), rat(4), 0, 1)))
    assert not eval_formula(f, mu)


def test_phi_plus_spec_example():
    x, y, z = enc_var("x"), enc_var("y"), enc_var("z")
    f = build_phi_plus(x, y, z)
    tx = (rat(2), rat(4), 0, 1)
    ty = (rat(1), rat(1), 1, 1)
    mu = {**bind(x, tx), **bind(y, ty), **bind(z, (rat(3), rat(5), 0, 1))}
    assert eval_formula(f, mu)
    mu.update(bind(z, (rat(3), rat(5), 1, 1)))
    assert not eval_formula(f, mu)


def test_phi_empty_spec_example():
    x = enc_var("x")
    f = build_phi_empty(x)
    assert eval_formula(f, bind(x, (rat(3), rat(-2), 1, 0)))
    assert not eval_formula(f, bind(x, (rat(0), rat(0), 1, 1)))


def test_phi_in_examples():
    y = enc_var("y")
    f5 = build_phi_in(lin(rat(5)), y)
    tup = enc_of_interval(interval(rat(2), rat(4), False, True))
    assert not eval_formula(f5, bind(y, tup))
    assert eval_formula(build_phi_in(lin(rat(3)), y), bind(y, tup))
    assert not eval_formula(build_phi_in(lin(rat(2)), y), bind(y, tup))


def test_phi_flag_domain_enforced():
    y = enc_var("y")
    f = build_phi_in(lin(rat(0)), y)
    assert not eval_formula(f, bind(y, (rat(-1), rat(1), 7, 1)))


def test_phi_semantics_randomized():
    rng = random.Random(5)
    x, y, z = enc_var("x"), enc_var("y"), enc_var("z")
    phi_plus = build_phi_plus(x, y, z)
    phi_cap = build_phi_cap(x, y, z)
    phi_sub = build_phi_subseteq(x, y)
    phi_dis = build_phi_dis(x, y)
    phi_emp = build_phi_empty(x)
    for _ in range(300):
        ivx, ivy = rng.choice(PALETTE), rng.choice(PALETTE)
        tx, ty = enc_of_interval(ivx), enc_of_interval(ivy)
        mu = {**bind(x, tx), **bind(y, ty)}
        # functional outputs are accepted, corrupted outputs rejected
        for phi, out in ((phi_plus, enc_sum(tx, ty)), (phi_cap, enc_cap(tx, ty))):
            assert eval_formula(phi, {**mu, **bind(z, out)})
            bad = (out[0] - 1, out[1] + 1, out[2], out[3])
            assert not eval_formula(phi, {**mu, **bind(z, bad)})
        assert eval_formula(phi_emp, mu) == ivx.is_empty()
        sub = ivx.is_empty() or (not ivy.is_empty() and iv_intersect(ivx, ivy) == ivx)
        assert eval_formula(phi_sub, mu) == sub, (ivx, ivy)
        # phi_dis: if the tuples touch at tx.t == ty.b (both sides finite),
        # the seam point must be uncovered, i.e. both flags open
        if (
            not ivx.is_empty()
            and not ivy.is_empty()
            and tx[3] != 2
            and ty[2] != 2
            and tx[1] == ty[0]
        ):
            dis = tx[3] == 0 and ty[2] == 0
        else:
            dis = True
        assert eval_formula(phi_dis, mu) == dis, (ivx, ivy)


def test_phi_subseteq_empty_container():
    x, y = enc_var("x"), enc_var("y")
    f = build_phi_subseteq(x, y)
    te = enc_of_interval(EMPTY)
    assert eval_formula(f, {**bind(x, te), **bind(y, te)})
    assert not eval_formula(
        f, {**bind(x, enc_of_interval(point(rat(1)))), **bind(y, te)}
    )


# -- vector formulas --------------------------------------------------------------


def vec_bind(xs, ivs):
    mu = {}
    for e, iv in zip(xs, ivs):
        mu.update(bind(e, enc_of_interval(iv)))
    return mu


def cap_aux_bind(xs_tuples, stem):
    from coca.encoding import enc_names, enc_vector

    mu = {}
    n = len(xs_tuples)
    for i in range(n):
        for j in range(i + 1, n):
            e = enc_var(f"{stem}_{i}_{j}")
            mu.update(dict(zip(enc_names(e), enc_cap(xs_tuples[i], xs_tuples[j]))))
    return mu


def test_psi_max_overlap_is_rejected():
    fam = build_psi_family(2)
    xs = (enc_var("a"), enc_var("b"))
    f, aux = fam.psi_max(xs, "k")
    assert len(aux) == 1
    ivs = [interval(rat(1), rat(5), False, False), interval(rat(4), rat(9), False, False)]
    tups = [enc_of_interval(iv) for iv in ivs]
    mu = {**vec_bind(xs, ivs), **cap_aux_bind(tups, "k")}
    assert not eval_formula(f, mu)


def test_psi_max_prolongation_is_rejected():
    fam = build_psi_family(2)
    xs = (enc_var("a"), enc_var("b"))
    f, _ = fam.psi_max(xs, "k")
    ivs = [interval(rat(1), rat(4), True, False), closed(rat(4), rat(10))]
    tups = [enc_of_interval(iv) for iv in ivs]
    mu = {**vec_bind(xs, ivs), **cap_aux_bind(tups, "k")}
    assert not eval_formula(f, mu)


def test_psi_max_canonical_decomposition_accepted():
    fam = build_psi_family(3)
    xs = (enc_var("a"), enc_var("b"), enc_var("c"))
    f, aux = fam.psi_max(xs, "k")
    assert len(aux) == 3
    ivs = [closed(rat(0), rat(1)), interval(rat(3), rat(4), False, False), EMPTY]
    tups = [enc_of_interval(iv) for iv in ivs]
    mu = {**vec_bind(xs, ivs), **cap_aux_bind(tups, "k")}
    assert eval_formula(f, mu)


def test_psi_subseteq_width_one():
    fam = build_psi_family(1)
    xs, ys = (enc_var("a"),), (enc_var("b"),)
    f = fam.psi_subseteq(xs, ys)
    assert eval_formula(
        f, {**vec_bind(xs, [closed(rat(0), rat(1))]), **vec_bind(ys, [closed(rat(0), rat(2))])}
    )
    assert not eval_formula(
        f, {**vec_bind(xs, [closed(rat(0), rat(3))]), **vec_bind(ys, [closed(rat(0), rat(2))])}
    )


def test_psi_family_width_checked():
    fam = build_psi_family(2)
    with pytest.raises(ValueError):
        fam.psi_subseteq((enc_var("a"),), (enc_var("b"), enc_var("c")))
    with pytest.raises(ValueError):
        build_psi_family(0)


# -- the one-step formula block ----------------------------------------------------


def test_psi_succ_accepts_fig1_images(fig1):
    pc = as_parametric(fig1)
    n = 8
    f, iq, its = build_psi_succ(pc, n)
    r0 = ReachMap({"p": point(rat(15))})
    mu = succ_valuation(fig1, r0, n, iq, its)
    assert eval_formula(f, mu)
    # the transition vectors denote the one-step images: corrupt one
    from coca.encoding import enc_names

    k = 0  # p -(+5)-> r ; image of [15,15] clipped to [20,100] is [20,20]
    good = {v: mu[v] for v in enc_names(its[k][0])}
    assert enc_eval(tuple(good.values())) == point(rat(20))
    mu2 = dict(mu)
    mu2.update(dict(zip(enc_names(its[k][0]), enc_of_interval(closed(rat(20), rat(21))))))
    assert not eval_formula(f, mu2)


def test_psi_succ_random_instances():
    from coca.oracle import enum_post_bounded

    done = 0
    for seed in range(70):
        w = random_guarded(seed, max_states=3, max_transitions=4)
        p = w.states[0]
        a = next((rat(c) for c in (0, 1, -2) if w.tau(p).contains(rat(c))), None)
        if a is None:
            continue
        pc = as_parametric(w)
        n = 6
        f, iq, its = build_psi_succ(pc, n)
        r = enum_post_bounded(w, p, a, seed % 3)
        if any(len(r.get(s).parts) > n for s in w.states):
            continue
        mu = succ_valuation(w, r, n, iq, its)
        assert eval_formula(f, mu), seed
        done += 1
    assert done >= 20


# -- the Sigma-2 sentence ------------------------------------------------------------


def test_build_sentence_shape():
    pcw = ParametricCoca(
        ("p", "q"),
        (Transition("p", "z", "q"),),
        (ParamInterval(rat(0), rat(10)), ParamInterval(rat(0), rat(10))),
        ("z",),
    )
    sen = build_sentence(pcw, ("p", 0), ("q", 5))
    assert not sen.is_existential()
    assert "x_z" in sen.exist_vars
    assert set(free_vars(sen.exist_body)) <= set(sen.exist_vars)
    assert set(free_vars(sen.forall_body)) <= set(sen.exist_vars) | set(sen.forall_vars)
    txt = emit_smtlib(sen)
    assert txt.count("(assert") == 2 and txt.count("(forall") == 1
    assert txt.count("declare-const") == len(sen.exist_vars)
    assert txt == emit_smtlib(build_sentence(pcw, ("p", 0), ("q", 5)))


def test_build_sentence_unknown_state():
    pcw = ParametricCoca(("p",), (), (UNB,), ())
    from coca.errors import UnknownState

    with pytest.raises(UnknownState):
        build_sentence(pcw, ("p", 0), ("nope", 5))


# -- acyclic encoding ---------------------------------------------------------------


def shift_tuple(z):
    z = rat(z)
    if z > 0:
        return (rat(0), z, 0, 1)
    if z < 0:
        return (z, rat(0), 1, 0)
    return (rat(0), rat(0), 1, 1)


def set_enc(mu, stem, tup):
    mu[f"Ib_{stem}"], mu[f"It_{stem}"] = rat(tup[0]), rat(tup[1])
    mu[f"Ibot_{stem}"], mu[f"Itop_{stem}"] = rat(tup[2]), rat(tup[3])


def decide_acyclic(pc, frm, to, mu_params):
    """Existential truth of encode_acyclic's body by brute enumeration of
    the transition-index grid, with interval slots forced along the chain."""
    sen = encode_acyclic(pc, frm, to)
    assert sen.is_existential()
    p, a = frm
    w = instantiate(pc, mu_params)
    mu0 = {f"x_{x}": rat(v) for x, v in mu_params.items()}
    nq, nt = len(pc.states), len(pc.transitions)
    if nt == 0:
        return eval_formula(sen.exist_body, mu0)
    zero_tup = (rat(0), rat(0), 0, 0)
    for combo in itertools.product(range(nt), repeat=nq):
        mu = dict(mu0)
        cur = (rat(a), rat(a), 1, 1)
        for i in range(1, nq + 1):
            j = combo[i - 1]
            mu[f"t_{i}"] = j + 1
            for jj in range(nt):
                set_enc(mu, f"m{i}_{jj}", zero_tup)
            t = w.transitions[j]
            mid = enc_sum(cur, shift_tuple(t.update))
            out = enc_cap(mid, enc_of_interval(w.tau(t.dst)))
            set_enc(mu, f"m{i}_{j}", mid)
            set_enc(mu, f"s{i}", out)
            cur = out
        if eval_formula(sen.exist_body, mu):
            return True
    return False


def random_dag(seed, max_states=3, max_trans=4, with_params=False):
    r = random.Random(seed)
    nq = r.randint(1, max_states)
    states = tuple(f"n{i}" for i in range(nq))
    guards = []
    for i in range(nq):
        c = r.random()
        if c < 0.3:
            guards.append(UNB)
        elif c < 0.5:
            guards.append(
                ParamInterval(rat(r.randint(-4, 2)), POS_INF, r.random() < 0.5, False)
            )
        else:
            lo = r.randint(-4, 2)
            guards.append(
                ParamInterval(
                    rat(lo), rat(lo + r.randint(0, 6)), r.random() < 0.7, r.random() < 0.7
                )
            )
    params = []
    trans = []
    nt = r.randint(0, max_trans) if nq > 1 else 0
    for _ in range(nt):
        i = r.randrange(nq - 1)
        j = r.randint(i + 1, nq - 1)
        if with_params and r.random() < 0.5:
            x = f"u{len(params)}"
            params.append(x)
            upd = x
        else:
            upd = rat(r.randint(-3, 3)) / r.choice([1, 1, 2])
        trans.append(Transition(states[i], upd, states[j]))
    return ParametricCoca(states, tuple(trans), tuple(guards), tuple(params))


def test_acyclic_single_parametric_edge():
    pc = ParametricCoca(("p", "q"), (Transition("p", "x", "q"),), (UNB, UNB), ("x",))
    # to q(5): any x >= 5 works via scaling, smaller or negative x cannot
    assert decide_acyclic(pc, ("p", 0), ("q", 5), {"x": 5})
    assert decide_acyclic(pc, ("p", 0), ("q", 5), {"x": 7})
    assert not decide_acyclic(pc, ("p", 0), ("q", 5), {"x": 4})
    assert not decide_acyclic(pc, ("p", 0), ("q", 5), {"x": -5})
    # to q(0): only the zero update reaches 0 exactly (alpha > 0)
    assert decide_acyclic(pc, ("p", 0), ("q", 0), {"x": 0})
    assert not decide_acyclic(pc, ("p", 0), ("q", 0), {"x": 1})
    assert not decide_acyclic(pc, ("p", 0), ("q", 0), {"x": -1})


def test_acyclic_zero_length_runs():
    pc = ParametricCoca(("p",), (), (ParamInterval(rat(0), rat(3)),), ())
    assert decide_acyclic(pc, ("p", 2), ("p", 2), {})
    assert not decide_acyclic(pc, ("p", 2), ("p", 1), {})
    assert not decide_acyclic(pc, ("p", 5), ("p", 5), {})
    assert encode_acyclic(pc, ("p", 5), ("p", 5)).exist_body == FALSE


def test_acyclic_initial_admissibility():
    ok = ParametricCoca(
        ("p", "q"),
        (Transition("p", rat(1), "q"),),
        (ParamInterval(rat(0), rat(0)), UNB),
        (),
    )
    assert decide_acyclic(ok, ("p", 0), ("q", 1), {})
    blocked = ParametricCoca(
        ("p", "q"),
        (Transition("p", rat(1), "q"),),
        (ParamInterval(rat(5), rat(9)), UNB),
        (),
    )
    assert not decide_acyclic(blocked, ("p", 0), ("q", 1), {})


def test_acyclic_rejects_cycles():
    cyc = ParametricCoca(
        ("p", "q"),
        (Transition("p", rat(1), "q"), Transition("q", rat(0), "p")),
        (UNB, UNB),
        (),
    )
    with pytest.raises(NotAcyclic):
        encode_acyclic(cyc, ("p", 0), ("q", 1))
    loop = ParametricCoca(("p",), (Transition("p", rat(1), "p"),), (UNB,), ())
    with pytest.raises(NotAcyclic):
        encode_acyclic(loop, ("p", 0), ("p", 0))


def test_acyclic_agrees_with_engine_plain():
    checked = 0
    for seed in range(40):
        pc = random_dag(seed)
        w = instantiate(pc, {})
        r = random.Random(seed * 7 + 1)
        starts = [
            (s, rat(v))
            for s in pc.states
            for v in range(-4, 5)
            if w.tau(s).contains(rat(v))
        ]
        if not starts:
            continue
        p, a = starts[r.randrange(len(starts))]
        for q in pc.states:
            for b in (a, rat(r.randint(-4, 4)), rat(r.randint(-4, 4)) / 2):
                want = greach(w, p, a, q, b)
                assert decide_acyclic(pc, (p, a), (q, b), {}) == want, (seed, p, a, q, b)
                checked += 1
    assert checked > 100


def test_acyclic_agrees_with_engine_parametric():
    checked = 0
    for seed in range(15):
        pc = random_dag(seed + 500, with_params=True)
        if not pc.params:
            continue
        r = random.Random(seed * 13 + 5)
        grid = list(product_valuations(pc.params, [rat(-2), rat(0), rat("3/2")]))[:8]
        w0 = instantiate(pc, grid[0])
        starts = [
            (s, rat(v))
            for s in pc.states
            for v in range(-4, 5)
            if w0.tau(s).contains(rat(v))
        ]
        if not starts:
            continue
        p, a = starts[r.randrange(len(starts))]
        q = pc.states[r.randrange(len(pc.states))]
        b = rat(r.randint(-4, 4))
        for m in grid[:4]:
            wi = instantiate(pc, m)
            want = wi.tau(p).contains(a) and greach(wi, p, a, q, b)
            assert decide_acyclic(pc, (p, a), (q, b), m) == want, (seed, m)
            checked += 1
    assert checked > 10


# -- SMT-LIB emission and solving -----------------------------------------------------


def test_emit_smtlib_trivial():
    txt = emit_smtlib(eq(Lin.var("x"), 1))
    for frag in ("(set-logic LRA)", "(declare-const x Real)", "(assert", "(check-sat)"):
        assert frag in txt
    assert "forall" not in txt


def test_emit_smtlib_literals():
    assert "(/ " not in emit_smtlib(eq(Lin.var("v"), 3))
    assert "(/ 1 2)" in emit_smtlib(eq(Lin.var("v"), rat("1/2")))
    assert "(- (/ 1 2))" in emit_smtlib(ge(Lin.var("v"), rat("1/2")))


def test_emit_smtlib_acyclic_is_existential():
    pc = ParametricCoca(("p", "q"), (Transition("p", "x", "q"),), (UNB, UNB), ("x",))
    assert "forall" not in emit_smtlib(encode_acyclic(pc, ("p", 0), ("q", 5)))


@pytest.fixture()
def stub(tmp_path):
    def make(name, body):
        path = tmp_path / name
        path.write_text("#!/bin/sh\n" + body + "\n")
        path.chmod(path.stat().st_mode | stat.S_IEXEC)
        return str(path)

    return make


def test_solve_stub_results(stub):
    f = eq(Lin.var("x"), 1)
    assert solve(f, stub("sat.sh", "cat > /dev/null\necho sat")) == SolveResult.SAT
    assert solve(f, stub("un.sh", "cat > /dev/null\necho unsat")) == SolveResult.UNSAT
    assert solve(f, stub("uk.sh", "cat > /dev/null\necho unknown")) == SolveResult.UNKNOWN
    noisy = stub("noise.sh", "cat > /dev/null\necho '(warning: blah)'\necho sat")
    assert solve(f, noisy) == SolveResult.SAT
    assert SolveResult.SAT.value == "sat" and SolveResult.UNSAT.value == "unsat"


def test_solve_file_template_and_raw_script(stub):
    f = eq(Lin.var("x"), 1)
    file_stub = stub("file.sh", 'grep -q "check-sat" "$1" && echo unsat')
    assert solve(f, f"{file_stub} {{file}}") == SolveResult.UNSAT
    assert solve(emit_smtlib(f), stub("s.sh", "cat > /dev/null\necho sat")) == SolveResult.SAT


def test_solve_timeout_returns_unknown(stub):
    slow = stub("slow.sh", "cat > /dev/null\nsleep 30\necho sat")
    assert solve(eq(Lin.var("x"), 1), slow, timeout_s=0.4) == SolveResult.UNKNOWN


def test_solve_error_cases(stub):
    f = eq(Lin.var("x"), 1)
    with pytest.raises(SolverNotFound):
        solve(f, "definitely_missing_binary_xyz")
    with pytest.raises(SolverNotFound):
        solve(f, "")
    with pytest.raises(MalformedSolverOutput):
        solve(f, stub("bad.sh", "cat > /dev/null\necho hello"))


# -- integer rescaling ------------------------------------------------------------------


def test_rescale_spec_examples():
    pm = ParametricCoca(
        ("p", "q"),
        (Transition("p", "x", "q"), Transition("q", "y", "q")),
        (UNB, ParamInterval(rat(0), rat(10))),
        ("x", "y"),
    )
    assert rescale_to_integer({"x": rat("3/2"), "y": rat("1/3")}, pm) == {
        "x": rat(9),
        "y": rat(2),
    }
    assert rescale_to_integer({"x": rat(4), "y": rat(-7)}, pm) == {
        "x": rat(4),
        "y": rat(-7),
    }


def test_rescale_rejects_parametric_guards():
    pm = ParametricCoca(("p",), (), (ParamInterval("x", "x"),), ("x",))
    with pytest.raises(ParametricGuardPresent):
        rescale_to_integer({"x": rat("1/2")}, pm)


def test_rescale_preserves_witnesses():
    witnesses = 0
    for seed in range(250):
        pc = random_dag(seed + 900, with_params=True)
        if not pc.params:
            continue
        r = random.Random(seed)
        grid = list(
            product_valuations(pc.params, [rat("-3/2"), rat("1/3"), rat(1), rat("5/2")])
        )[:16]
        w0 = instantiate(pc, grid[0])
        starts = [
            (s, rat(v))
            for s in pc.states
            for v in range(-3, 4)
            if w0.tau(s).contains(rat(v))
        ]
        if not starts:
            continue
        p, a = starts[r.randrange(len(starts))]
        q = pc.states[-1]
        for b in (rat(r.randint(-3, 3)), rat(r.randint(-3, 3)) / 2):
            ok, mu = valuation_grid_check(pc, p, a, q, b, grid)
            if ok:
                mu2 = rescale_to_integer(mu, pc)
                assert all(v.denominator == 1 for v in mu2.values())
                assert greach(instantiate(pc, mu2), p, a, q, b), (seed, mu, mu2)
                witnesses += 1
    assert witnesses > 20
