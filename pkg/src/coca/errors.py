"""Exception taxonomy shared across the package.

Model errors mean the input description is bad; engine errors mean an
internal bound was violated (a bug in the engine, not in the input);
solver errors concern the external SMT process.
"""

__all__ = [
    "CocaError",
    "ModelError",
    "UnknownState",
    "DuplicateState",
    "MissingParam",
    "UnknownParam",
    "BrokenChain",
    "EmptyClause",
    "ParametricGuardPresent",
    "NotAcyclic",
    "EngineError",
    "BudgetExceeded",
    "SafeguardTripped",
    "InvalidCycle",
    "EncodingError",
    "BadFlag",
    "UnboundVariable",
    "SolverError",
    "SolverNotFound",
    "MalformedSolverOutput",
]


class CocaError(Exception):
    """Base class for every error raised by this package."""


# -- input / model problems -------------------------------------------------


class ModelError(CocaError):
    """The automaton or query description is malformed."""


class UnknownState(ModelError):
    pass


class DuplicateState(ModelError):
    pass


class MissingParam(ModelError):
    """A valuation does not cover every declared parameter."""


class UnknownParam(ModelError):
    """An update or guard references an undeclared parameter."""


class BrokenChain(ModelError):
    """A run's transitions do not chain, or a coefficient is outside (0,1]."""


class EmptyClause(ModelError):
    """A CNF clause with no literals cannot be turned into a gadget."""


class ParametricGuardPresent(ModelError):
    """The operation requires parameters to appear in updates only."""


class NotAcyclic(ModelError):
    """The operation requires an acyclic transition graph."""


# -- engine invariants --------------------------------------------------------


class EngineError(CocaError):
    """An internal bound or invariant failed; indicates an engine bug."""


class BudgetExceeded(EngineError):
    """No expanding cycle was found within the per-phase iteration budget."""


class SafeguardTripped(EngineError):
    """The global acceleration-count safeguard was exceeded."""


class InvalidCycle(EngineError):
    """A claimed expanding cycle failed re-validation."""


# -- encodings / solver -------------------------------------------------------


class EncodingError(CocaError):
    """A formula, valuation, or encoded interval is malformed."""


class BadFlag(EncodingError):
    """An endpoint flag value is outside {0, 1, 2}."""


class UnboundVariable(EncodingError):
    """Formula evaluation hit a variable missing from the valuation."""


class SolverError(CocaError):
    pass


class SolverNotFound(SolverError):
    """The configured solver executable does not exist."""


class MalformedSolverOutput(SolverError):
    """The solver produced no recognizable sat/unsat/unknown verdict."""
