"""Automaton models, runs, and the JSON interchange format.

Four flavors of automaton share the same transition structure (a finite
graph with one rational counter updated by scaled transition weights):

* :class:`Coca` — one global guard interval constrains the counter at
  every state.
* :class:`GuardedCoca` — a guard interval per state.
* :class:`EqCoca` — a global guard plus optional integer equality tests
  on a subset of states.
* :class:`ParametricCoca` — per-state guards and updates may mention
  parameters; :func:`instantiate` substitutes a valuation and yields a
  :class:`GuardedCoca`.

All models are frozen and hashable, which the analysis layers use to
memoize derived structures per automaton.

A :class:`Run` is a start configuration plus scaled steps; the
configuration sequence is recovered with :func:`run_trace`, admissibility
(every visited value inside the local guard, and on :class:`EqCoca` also
passing the equality tests) with :func:`run_is_admissible`.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Union

from .errors import (
    BrokenChain,
    DuplicateState,
    MissingParam,
    ModelError,
    ParametricGuardPresent,
    UnknownParam,
    UnknownState,
)
from .intervals import (
    FULL,
    Interval,
    format_interval,
    interval,
    parse_interval,
    point,
)
from .rational import NEG_INF, POS_INF, Infinite, Rat, rat

__all__ = [
    "Transition",
    "Coca",
    "GuardedCoca",
    "EqCoca",
    "ParametricCoca",
    "ParamInterval",
    "Run",
    "instantiate",
    "run_trace",
    "run_is_admissible",
    "run_scale",
    "parse_model",
    "serialize_model",
    "load_model",
]

_PARAM_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

# An update is either an exact rational or a parameter name.
Update = Union[Rat, str]


@dataclass(frozen=True)
class Transition:
    src: str
    update: Update
    dst: str

    def __repr__(self):
        return f"{self.src} --{self.update}--> {self.dst}"


def _check_states(states, transitions):
    if not states:
        raise ModelError("a model needs at least one state")
    seen = set()
    for s in states:
        if not isinstance(s, str) or not s:
            raise ModelError(f"state ids must be nonempty strings, got {s!r}")
        if s in seen:
            raise DuplicateState(f"duplicate state id {s!r}")
        seen.add(s)
    for t in transitions:
        for endpoint in (t.src, t.dst):
            if endpoint not in seen:
                raise UnknownState(f"transition {t} references unknown state {endpoint!r}")


@dataclass(frozen=True)
class Coca:
    """Continuous one-counter automaton with a single global guard."""

    states: tuple
    transitions: tuple
    global_guard: Interval = FULL

    def __post_init__(self):
        _check_states(self.states, self.transitions)
        for t in self.transitions:
            if isinstance(t.update, str):
                raise UnknownParam(
                    f"plain automata take rational updates, got {t.update!r}"
                )

    def tau(self, q: str) -> Interval:
        if q not in self.states:
            raise UnknownState(f"unknown state {q!r}")
        return self.global_guard

    def as_guarded(self) -> "GuardedCoca":
        return GuardedCoca(
            self.states,
            self.transitions,
            tuple(self.global_guard for _ in self.states),
        )


@dataclass(frozen=True)
class GuardedCoca:
    """Automaton with one guard interval per state (aligned with `states`)."""

    states: tuple
    transitions: tuple
    guards: tuple

    def __post_init__(self):
        _check_states(self.states, self.transitions)
        if len(self.guards) != len(self.states):
            raise ModelError("need exactly one guard per state")
        for t in self.transitions:
            if isinstance(t.update, str):
                raise UnknownParam(
                    f"guarded automata take rational updates, got {t.update!r}"
                )
        object.__setattr__(
            self, "_index", {s: i for i, s in enumerate(self.states)}
        )

    def tau(self, q: str) -> Interval:
        try:
            return self.guards[self._index[q]]
        except KeyError:
            raise UnknownState(f"unknown state {q!r}") from None


@dataclass(frozen=True)
class EqCoca:
    """Global-guard automaton with integer equality tests on some states.

    A run must pass every visited state's test (when present) in addition
    to the guard.  Tests are integers by construction; states without a
    test are unconstrained.
    """

    states: tuple
    transitions: tuple
    global_guard: Interval = FULL
    eq_tests: tuple = ()  # sorted (state, Rat) pairs

    def __post_init__(self):
        _check_states(self.states, self.transitions)
        for t in self.transitions:
            if isinstance(t.update, str):
                raise UnknownParam(
                    f"equality-test automata take rational updates, got {t.update!r}"
                )
        for s, z in self.eq_tests:
            if s not in self.states:
                raise UnknownState(f"equality test on unknown state {s!r}")
            if z.denominator != 1:
                raise ModelError(f"equality tests must be integers, got {z}")
        if len({s for s, _ in self.eq_tests}) != len(self.eq_tests):
            raise ModelError("at most one equality test per state")

    def tau(self, q: str) -> Interval:
        if q not in self.states:
            raise UnknownState(f"unknown state {q!r}")
        return self.global_guard

    def phi(self, q: str):
        """The equality-test interval [z,z] for q, or None if unconstrained."""
        for s, z in self.eq_tests:
            if s == q:
                return point(z)
        return None

    def as_plain(self) -> Coca:
        return Coca(self.states, self.transitions, self.global_guard)


@dataclass(frozen=True)
class ParamInterval:
    """Guard interval whose endpoints may be parameters.

    Endpoints are Rat, ±inf, or a parameter name; closedness is fixed
    syntactically (a parametric endpoint is never infinite).
    """

    lo: object
    hi: object
    lo_closed: bool = True
    hi_closed: bool = True

    def is_constant(self) -> bool:
        return not isinstance(self.lo, str) and not isinstance(self.hi, str)

    def constant(self) -> Interval:
        if not self.is_constant():
            raise ParametricGuardPresent(
                f"guard {format_param_interval(self)} is parametric"
            )
        return interval(self.lo, self.hi, self.lo_closed, self.hi_closed)

    def substitute(self, mu: dict) -> Interval:
        lo = mu[self.lo] if isinstance(self.lo, str) else self.lo
        hi = mu[self.hi] if isinstance(self.hi, str) else self.hi
        return interval(lo, hi, self.lo_closed, self.hi_closed)


@dataclass(frozen=True)
class ParametricCoca:
    """Automaton whose updates and guard endpoints may mention parameters."""

    states: tuple
    transitions: tuple
    guards: tuple  # ParamInterval per state
    params: tuple

    def __post_init__(self):
        _check_states(self.states, self.transitions)
        if len(self.guards) != len(self.states):
            raise ModelError("need exactly one guard per state")
        declared = set(self.params)
        if len(declared) != len(self.params):
            raise ModelError("duplicate parameter names")
        for x in self.params:
            if not _PARAM_RE.match(x):
                raise ModelError(f"bad parameter name {x!r}")
        for t in self.transitions:
            if isinstance(t.update, str) and t.update not in declared:
                raise UnknownParam(f"undeclared parameter {t.update!r} in {t}")
        for g in self.guards:
            for end in (g.lo, g.hi):
                if isinstance(end, str) and end not in declared:
                    raise UnknownParam(f"undeclared parameter {end!r} in a guard")

    def tau(self, q: str) -> ParamInterval:
        i = self.states.index(q) if q in self.states else -1
        if i < 0:
            raise UnknownState(f"unknown state {q!r}")
        return self.guards[i]

    def has_parametric_guard(self) -> bool:
        return any(not g.is_constant() for g in self.guards)


def instantiate(p: ParametricCoca, mu: dict) -> GuardedCoca:
    """Substitute a valuation (param -> Rat) into updates and guards.

    Every declared parameter must be present; extra keys are ignored.
    """
    vals = {}
    for x in p.params:
        if x not in mu:
            raise MissingParam(f"valuation is missing parameter {x!r}")
        vals[x] = rat(mu[x])
    transitions = tuple(
        Transition(t.src, vals[t.update] if isinstance(t.update, str) else t.update, t.dst)
        for t in p.transitions
    )
    guards = tuple(g.substitute(vals) for g in p.guards)
    return GuardedCoca(p.states, transitions, guards)


# -- runs ---------------------------------------------------------------------


@dataclass(frozen=True)
class Run:
    """A start configuration and a sequence of (coefficient, transition) steps."""

    start_state: str
    start_value: Rat
    steps: tuple = ()

    def __len__(self):
        return len(self.steps)


def run_trace(model, run: Run):
    """The configuration sequence [(state, value), ...] the run visits.

    Raises BrokenChain when consecutive transitions do not share a state
    or a coefficient is outside (0, 1]; guards are *not* checked here.
    """
    state = run.start_state
    value = rat(run.start_value)
    model.tau(state)  # raises UnknownState on bad start
    trace = [(state, value)]
    for alpha, t in run.steps:
        alpha = rat(alpha)
        if not (0 < alpha <= 1):
            raise BrokenChain(f"coefficient {alpha} outside (0,1]")
        if t.src != state:
            raise BrokenChain(f"step {t} does not start at {state!r}")
        if isinstance(t.update, str):
            raise BrokenChain(f"cannot trace a parametric step {t}")
        state = t.dst
        model.tau(state)
        value = value + alpha * t.update
        trace.append((state, value))
    return trace


def run_is_admissible(model, run: Run) -> bool:
    """True when every visited configuration passes its state's constraints."""
    try:
        trace = run_trace(model, run)
    except BrokenChain:
        return False
    for state, value in trace:
        if not model.tau(state).contains(value):
            return False
        if isinstance(model, EqCoca):
            phi = model.phi(state)
            if phi is not None and not phi.contains(value):
                return False
    return True


def run_scale(run: Run, beta) -> Run:
    """Scale every coefficient by beta in (0,1].

    Scaling a run keeps it chained; admissibility is preserved exactly
    when the guard set is closed under the induced convex contraction
    toward the start value (true for all runs from a guard-interior
    start, and exercised in the tests via sampling).
    """
    beta = rat(beta)
    if not (0 < beta <= 1):
        raise ValueError(f"scale factor {beta} outside (0,1]")
    return Run(
        run.start_state,
        run.start_value,
        tuple((rat(a) * beta, t) for a, t in run.steps),
    )


# -- JSON interchange ---------------------------------------------------------


def _parse_rat_field(v, what: str):
    if isinstance(v, bool) or isinstance(v, float):
        raise ModelError(f"{what} must be an int or an exact string, got {v!r}")
    if isinstance(v, int):
        return rat(v)
    if isinstance(v, str):
        try:
            return rat(v)
        except (ValueError, ZeroDivisionError, TypeError):
            raise ModelError(f"cannot parse {what} {v!r}") from None
    raise ModelError(f"{what} must be an int or string, got {v!r}")


def _parse_update(v, params):
    if isinstance(v, str) and v.strip() in params:
        return v.strip()
    return _parse_rat_field(v, "update")


_ENDPOINT_SPLIT = re.compile(r"\s*,\s*")


def parse_param_interval(text: str, params) -> ParamInterval:
    s = text.strip()
    if len(s) < 2 or s[0] not in "[(" or s[-1] not in ")]":
        raise ModelError(f"malformed guard {text!r}")
    toks = _ENDPOINT_SPLIT.split(s[1:-1].strip())
    if len(toks) != 2:
        raise ModelError(f"malformed guard {text!r}")

    def endpoint(tok):
        if tok in params:
            return tok
        low = tok.lower()
        if low in ("inf", "+inf", "oo", "+oo"):
            return POS_INF
        if low in ("-inf", "-oo"):
            return NEG_INF
        try:
            return rat(tok)
        except (ValueError, ZeroDivisionError, TypeError):
            raise ModelError(f"cannot parse guard endpoint {tok!r}") from None

    return ParamInterval(endpoint(toks[0]), endpoint(toks[1]), s[0] == "[", s[-1] == "]")


def format_param_interval(g: ParamInterval) -> str:
    def end(v):
        if isinstance(v, str):
            return v
        if isinstance(v, Infinite):
            return "-inf" if v is NEG_INF else "inf"
        return str(v)

    return (
        f"{'[' if g.lo_closed else '('}{end(g.lo)},"
        f"{end(g.hi)}{']' if g.hi_closed else ')'}"
    )


def _parse_guard_text(v, what="guard") -> Interval:
    if not isinstance(v, str):
        raise ModelError(f"{what} must be a string like \"[-5,15]\", got {v!r}")
    try:
        return parse_interval(v)
    except ValueError as exc:
        raise ModelError(str(exc)) from None


def parse_model(data):
    """Parse a model from a JSON string or an already-decoded dict."""
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ModelError(f"invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ModelError("model document must be a JSON object")
    kind = data.get("type")
    if kind not in ("coca", "guarded", "eq", "parametric"):
        raise ModelError(f"unknown model type {kind!r}")

    raw_states = data.get("states")
    if not isinstance(raw_states, list) or not raw_states:
        raise ModelError("'states' must be a nonempty list")
    ids, state_guards = [], []
    for entry in raw_states:
        if isinstance(entry, str):
            ids.append(entry)
            state_guards.append(None)
        elif isinstance(entry, dict) and "id" in entry:
            ids.append(entry["id"])
            state_guards.append(entry.get("guard"))
        else:
            raise ModelError(f"bad state entry {entry!r}")

    params = tuple(data.get("params", ())) if kind == "parametric" else ()
    raw_ts = data.get("transitions", [])
    if not isinstance(raw_ts, list):
        raise ModelError("'transitions' must be a list")
    transitions = []
    for entry in raw_ts:
        if not isinstance(entry, dict) or "update" not in entry:
            raise ModelError(f"bad transition entry {entry!r}")
        src = entry.get("src", entry.get("from"))
        dst = entry.get("dst", entry.get("to"))
        if src is None or dst is None:
            raise ModelError(f"bad transition entry {entry!r}")
        upd = (
            _parse_update(entry["update"], params)
            if kind == "parametric"
            else _parse_rat_field(entry["update"], "update")
        )
        transitions.append(Transition(src, upd, dst))
    transitions = tuple(transitions)
    ids = tuple(ids)

    if kind in ("coca", "eq"):
        gg = data.get("global_guard")
        guard = _parse_guard_text(gg, "global_guard") if gg is not None else FULL
        for g in state_guards:
            if g is not None:
                raise ModelError(
                    "per-state guards are not allowed with a global-guard model"
                )
        if kind == "coca":
            return Coca(ids, transitions, guard)
        tests = data.get("eq_tests", {})
        if not isinstance(tests, dict):
            raise ModelError("'eq_tests' must be an object")
        eq = tuple(
            sorted((s, _parse_rat_field(z, f"eq test for {s!r}")) for s, z in tests.items())
        )
        return EqCoca(ids, transitions, guard, eq)

    if kind == "guarded":
        guards = []
        for sid, g in zip(ids, state_guards):
            if g is None:
                guards.append(FULL)
            else:
                guards.append(_parse_guard_text(g, f"guard of {sid!r}"))
        return GuardedCoca(ids, transitions, tuple(guards))

    # parametric
    guards = []
    for sid, g in zip(ids, state_guards):
        if g is None:
            guards.append(ParamInterval(NEG_INF, POS_INF, False, False))
        else:
            guards.append(parse_param_interval(g, params))
    return ParametricCoca(ids, transitions, tuple(guards), params)


def serialize_model(m) -> dict:
    """Canonical JSON-ready dict; parse_model(serialize_model(m)) == m."""

    def t_entry(t):
        upd = t.update if isinstance(t.update, str) else str(t.update)
        return {"src": t.src, "update": upd, "dst": t.dst}

    if isinstance(m, Coca):
        return {
            "type": "coca",
            "states": [{"id": s} for s in m.states],
            "global_guard": format_interval(m.global_guard),
            "transitions": [t_entry(t) for t in m.transitions],
        }
    if isinstance(m, EqCoca):
        return {
            "type": "eq",
            "states": [{"id": s} for s in m.states],
            "global_guard": format_interval(m.global_guard),
            "transitions": [t_entry(t) for t in m.transitions],
            "eq_tests": {s: str(z) for s, z in m.eq_tests},
        }
    if isinstance(m, GuardedCoca):
        return {
            "type": "guarded",
            "states": [
                {"id": s, "guard": format_interval(g)}
                for s, g in zip(m.states, m.guards)
            ],
            "transitions": [t_entry(t) for t in m.transitions],
        }
    if isinstance(m, ParametricCoca):
        return {
            "type": "parametric",
            "params": list(m.params),
            "states": [
                {"id": s, "guard": format_param_interval(g)}
                for s, g in zip(m.states, m.guards)
            ],
            "transitions": [t_entry(t) for t in m.transitions],
        }
    raise TypeError(f"not a model: {m!r}")


def load_model(path: str):
    """Read and parse a model file."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model(fh.read())
