"""Exception types raised across the package."""
from __future__ import annotations



class PGMError(ValueError):
    """Base class for all errors raised by pgmfunctor."""


class UnknownVertexError(PGMError, KeyError):
    pass


class GraphError(PGMError):
    """A graph or graph homomorphism violates its structural invariants."""


class ShapeMismatchError(PGMError):
    """Tensor or diagram boundaries do not line up."""


class StochasticityError(PGMError):
    """A kernel that must be column-stochastic is not."""


class DegenerateNetworkError(PGMError):
    """A Markov network (or unnormalised family) has normalisation constant zero."""


class LimitExceededError(PGMError):
    """A desk-scale safety cap (cliques, state space) was exceeded."""


class NetworkFileError(PGMError):
    """A network file is malformed; ``field`` locates the offending entry."""

    def __init__(self, message: str, field: str = "", line: int | None = None):
        where = field or ""
        if line is not None:
            where = f"line {line}" + (f", {where}" if where else "")
        super().__init__(f"{where}: {message}" if where else message)
        self.field = field
        self.line = line
