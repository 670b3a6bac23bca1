"""3-CNF satisfiability gadgets over parametric automata.

``gen_sat_gadget`` compiles a CNF formula into an acyclic parametric
automaton with one boolean parameter per CNF variable, such that the target
configuration is reachable for some valuation iff the formula is
satisfiable.  Two constructions are provided:

* ``guards`` -- parameters occur only on guards.  Each variable gadget lets
  the counter pass from p_i(0) to q_i(0) along one of two branches: the upper
  branch climbs to 1 and crosses a [x_i, x_i] guard (forcing x_i = 1), the
  lower branch crosses it at 0 (forcing x_i = 0).  A clause gadget crosses a
  [x_l, x_l] guard at a positive value for a positive literal (so x_l must be
  1) or at 0 for a negated one.
* ``updates`` -- parameters occur only on updates (guards constant).  The
  variable gadget applies x_i scaled into [0, 1] and then either returns to 0
  directly (forcing x_i = 0, since scaling coefficients are positive) or
  checks the value 1 (possible exactly when x_i >= 1).  Clause branches apply
  x_l and check 1 (positive literal) or 0 (negated).

Variable gadgets are chained first, so any traversal fixes every parameter
to a definite truth value before the clause gadgets test them; reachability
under *any* valuation therefore implies satisfiability, and a satisfying
assignment embeds as a 0/1 valuation.  The query runs from the first
variable gadget to the last clause gadget (or the last variable gadget when
there are no clauses).

``parse_dimacs`` reads the usual DIMACS CNF text format.
"""

from __future__ import annotations

from .errors import EmptyClause, ModelError
from .model import ParamInterval, ParametricCoca, Transition
from .rational import rat

__all__ = ["gen_sat_gadget", "parse_dimacs"]

_ZERO = ParamInterval(rat(0), rat(0))
_ONE = ParamInterval(rat(1), rat(1))
_UNIT = ParamInterval(rat(0), rat(1))


def _normalize_cnf(cnf, num_vars):
    clauses = []
    top = 0
    for clause in cnf:
        lits = tuple(int(l) for l in clause)
        if not lits:
            raise EmptyClause("a clause with no literals is unsatisfiable")
        for l in lits:
            if l == 0:
                raise ModelError("literal 0 is not allowed")
            top = max(top, abs(l))
        clauses.append(lits)
    if num_vars is None:
        num_vars = max(top, 1)
    elif top > num_vars:
        raise ModelError(f"literal references variable {top} > num_vars={num_vars}")
    if num_vars < 1:
        raise ModelError("need at least one variable")
    return num_vars, clauses


def gen_sat_gadget(cnf, variant: str = "guards", num_vars: int = None):
    """Compile a CNF (iterable of clauses of nonzero ints) to a reachability query.

    Returns ``(automaton, (start_state, 0), (target_state, 0))``.  Positive
    literal k means variable k, negative means its negation, per DIMACS
    conventions.  ``num_vars`` defaults to the largest variable mentioned.
    """
    if variant not in ("guards", "updates"):
        raise ValueError(f"variant must be 'guards' or 'updates', got {variant!r}")
    num_vars, clauses = _normalize_cnf(cnf, num_vars)
    params = tuple(f"x{i}" for i in range(1, num_vars + 1))

    states = []
    guards = []
    trans = []

    def add(name, guard):
        states.append(name)
        guards.append(guard)
        return name

    for i in range(1, num_vars + 1):
        xg = ParamInterval(f"x{i}", f"x{i}")
        p = add(f"p{i}", _ZERO)
        if variant == "guards":
            a = add(f"v{i}a", _ONE)
            b = add(f"v{i}b", xg)
            c = add(f"v{i}c", xg)
            q = add(f"q{i}", _ZERO)
            trans += [
                Transition(p, rat(1), a),
                Transition(a, rat(0), b),
                Transition(b, rat(-1), q),
                Transition(p, rat(0), c),
                Transition(c, rat(0), q),
            ]
        else:
            a = add(f"v{i}a", _UNIT)
            b = add(f"v{i}b", _ONE)
            q = add(f"q{i}", _ZERO)
            trans += [
                Transition(p, f"x{i}", a),
                Transition(a, rat(0), q),
                Transition(a, rat(0), b),
                Transition(b, rat(-1), q),
            ]
        if i > 1:
            trans.append(Transition(f"q{i-1}", rat(0), p))

    for j, clause in enumerate(clauses, start=1):
        r = add(f"r{j}", _ZERO)
        s = f"s{j}"
        for k, lit in enumerate(clause, start=1):
            v = abs(lit)
            if variant == "guards":
                mid = add(f"c{j}l{k}", ParamInterval(f"x{v}", f"x{v}"))
                if lit > 0:
                    trans += [Transition(r, rat(1), mid), Transition(mid, rat(-1), s)]
                else:
                    trans += [Transition(r, rat(0), mid), Transition(mid, rat(0), s)]
            else:
                if lit > 0:
                    mid = add(f"c{j}l{k}", _ONE)
                    trans += [Transition(r, f"x{v}", mid), Transition(mid, rat(-1), s)]
                else:
                    mid = add(f"c{j}l{k}", _ZERO)
                    trans += [Transition(r, f"x{v}", mid), Transition(mid, rat(0), s)]
        add(s, _ZERO)
        trans.append(
            Transition(f"q{num_vars}" if j == 1 else f"s{j-1}", rat(0), r)
        )

    target = f"s{len(clauses)}" if clauses else f"q{num_vars}"
    pm = ParametricCoca(tuple(states), tuple(trans), tuple(guards), params)
    return pm, ("p1", rat(0)), (target, rat(0))


def parse_dimacs(text: str):
    """Parse DIMACS CNF text to ``(num_vars, clauses)``.

    Comment lines (``c ...``) and the ``p cnf`` header are honored; clauses
    are zero-terminated and may span lines.  A ``%`` line ends the input (a
    convention of some benchmark archives).
    """
    num_vars = None
    tokens = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) < 4 or parts[1] != "cnf":
                raise ModelError(f"bad DIMACS header: {line!r}")
            num_vars = int(parts[2])
            continue
        if line.startswith("%"):
            break
        tokens.extend(line.split())
    clauses = []
    cur = []
    for tok in tokens:
        lit = int(tok)
        if lit == 0:
            clauses.append(tuple(cur))
            cur = []
        else:
            cur.append(lit)
    if cur:
        clauses.append(tuple(cur))
    return num_vars, tuple(clauses)
