"""Nonnegative tensors (morphisms of Mat) and stochastic kernels (FinStoch).

A :class:`Tensor` ``X1 x ... x Xm -> Y1 x ... x Yn`` stores a dense array of
shape ``(|Y1|, ..., |Yn|, |X1|, ..., |Xm|)``: codomain axes first, domain
axes after, row-major, so ``t.entries[y, x] == t(y | x)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ShapeMismatchError, StochasticityError, UnknownVertexError

STOCHASTIC_TOL = 1e-9


@dataclass(frozen=True)
class FiniteSet:
    """A named finite set with ordered, distinct string elements."""

    name: str
    elements: tuple[str, ...]

    def __post_init__(self) -> None:
        elems = tuple(str(e) for e in self.elements)
        if not elems:
            raise ValueError(f"finite set {self.name!r} must be non-empty")
        if len(set(elems)) != len(elems):
            raise ValueError(f"finite set {self.name!r} has repeated elements")
        object.__setattr__(self, "elements", elems)

    @classmethod
    def range(cls, name: str, n: int) -> FiniteSet:
        return cls(name, tuple(str(i) for i in range(n)))

    def __len__(self) -> int:
        return len(self.elements)

    def index(self, element: str) -> int:
        return self.elements.index(element)


class _Degenerate:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "DEGENERATE"

    def __bool__(self) -> bool:
        return False


#: Returned in place of a distribution when the normaliser is zero.
DEGENERATE = _Degenerate()


def _shape(sets: Sequence[FiniteSet]) -> tuple[int, ...]:
    return tuple(len(s) for s in sets)


@dataclass(frozen=True, eq=False)
class Tensor:
    codomain: tuple[FiniteSet, ...]
    domain: tuple[FiniteSet, ...]
    entries: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        cod = tuple(self.codomain)
        dom = tuple(self.domain)
        arr = np.array(self.entries, dtype=float)
        expected = _shape(cod) + _shape(dom)
        if arr.ndim <= 1 and arr.size == int(np.prod(expected, dtype=np.int64)):
            arr = arr.reshape(expected)
        if arr.shape != expected:
            raise ShapeMismatchError(f"entries have shape {arr.shape}, expected {expected}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("tensor entries must be finite")
        if np.any(arr < 0):
            raise ValueError("tensor entries must be nonnegative")
        arr.setflags(write=False)
        object.__setattr__(self, "codomain", cod)
        object.__setattr__(self, "domain", dom)
        object.__setattr__(self, "entries", arr)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.entries.shape

    @property
    def n_cod(self) -> int:
        return len(self.codomain)

    def variables(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.codomain + self.domain)

    def matrix(self) -> np.ndarray:
        """Entries flattened to a ``|Y| x |X|`` matrix."""
        rows = int(np.prod(_shape(self.codomain), dtype=np.int64))
        return self.entries.reshape(rows, -1)

    def __call__(self, *labels: str) -> float:
        """Entry at (codomain labels..., domain labels...)."""
        sets = self.codomain + self.domain
        if len(labels) != len(sets):
            raise ShapeMismatchError(f"expected {len(sets)} labels, got {len(labels)}")
        return float(self.entries[tuple(s.index(x) for s, x in zip(sets, labels))])

    def column_sums(self) -> np.ndarray:
        return self.entries.sum(axis=tuple(range(self.n_cod)))

    def is_stochastic(self, tol: float = STOCHASTIC_TOL) -> bool:
        return bool(np.all(np.abs(self.column_sums() - 1.0) <= tol))

    def allclose(self, other: Tensor, tol: float = 1e-12) -> bool:
        return (
            self.codomain == other.codomain
            and self.domain == other.domain
            and bool(np.all(np.abs(self.entries - other.entries) <= tol))
        )

    def max_deviation(self, other: Tensor) -> float:
        if self.codomain != other.codomain or self.domain != other.domain:
            raise ShapeMismatchError("cannot compare tensors of different types")
        if self.entries.size == 0:
            return 0.0
        return float(np.max(np.abs(self.entries - other.entries)))

    def __repr__(self) -> str:
        cod = ",".join(s.name for s in self.codomain)
        dom = ",".join(s.name for s in self.domain)
        return f"{type(self).__name__}({cod} | {dom}, shape={self.shape})"


class StochasticKernel(Tensor):
    """A tensor whose every column sums to one."""

    def __post_init__(self) -> None:
        super().__post_init__()
        sums = self.column_sums()
        if np.any(np.abs(sums - 1.0) > STOCHASTIC_TOL):
            bad = float(np.max(np.abs(sums - 1.0)))
            raise StochasticityError(f"columns must sum to 1 (max deviation {bad:.3g})")


class Distribution(StochasticKernel):
    """A stochastic kernel with empty domain."""

    def __post_init__(self) -> None:
        if tuple(self.domain):
            raise ShapeMismatchError("a distribution has empty domain")
        super().__post_init__()

    @classmethod
    def of(cls, sets: Sequence[FiniteSet], entries) -> Distribution:
        return cls(tuple(sets), (), entries)


def as_stochastic(t: Tensor) -> StochasticKernel:
    if isinstance(t, StochasticKernel):
        return t
    if not t.domain:
        return Distribution(t.codomain, (), t.entries)
    return StochasticKernel(t.codomain, t.domain, t.entries)


def identity_tensor(sets: Sequence[FiniteSet]) -> StochasticKernel:
    sets = tuple(sets)
    shape = _shape(sets)
    n = int(np.prod(shape, dtype=np.int64))
    return as_stochastic(Tensor(sets, sets, np.eye(n).reshape(shape + shape)))


def kernel_compose(f: Tensor, g: Tensor) -> Tensor:
    """``g . f`` by the Chapman-Kolmogorov sum over the shared middle object."""
    if f.codomain != g.domain:
        raise ShapeMismatchError(
            f"codomain {[s.name for s in f.codomain]} does not match domain {[s.name for s in g.domain]}"
        )
    k = len(f.codomain)
    g_axes = list(range(g.n_cod, g.n_cod + k))
    f_axes = list(range(k))
    out = np.tensordot(g.entries, f.entries, axes=(g_axes, f_axes))
    result = Tensor(g.codomain, f.domain, out)
    if isinstance(f, StochasticKernel) and isinstance(g, StochasticKernel):
        return as_stochastic(result)
    return result


def kernel_tensor(f: Tensor, h: Tensor) -> Tensor:
    """Kronecker product: ``(f x h)(y, w | x, z) = f(y | x) h(w | z)``."""
    outer = np.multiply.outer(f.entries, h.entries)
    a, b = f.n_cod, len(f.domain)
    c, d = h.n_cod, len(h.domain)
    perm = (
        list(range(a))
        + list(range(a + b, a + b + c))
        + list(range(a, a + b))
        + list(range(a + b + c, a + b + c + d))
    )
    result = Tensor(f.codomain + h.codomain, f.domain + h.domain, outer.transpose(perm))
    if isinstance(f, StochasticKernel) and isinstance(h, StochasticKernel):
        return as_stochastic(result)
    return result


def structural_tensor(kind: str, x: FiniteSet) -> Tensor:
    """copy ``X -> X x X``, delete ``X -> I``, compare ``X x X -> X``, omni ``I -> X``."""
    n = len(x)
    if kind == "copy":
        arr = np.zeros((n, n, n))
        arr[np.arange(n), np.arange(n), np.arange(n)] = 1.0
        return as_stochastic(Tensor((x, x), (x,), arr))
    if kind == "delete":
        return as_stochastic(Tensor((), (x,), np.ones(n)))
    if kind == "compare":
        arr = np.zeros((n, n, n))
        arr[np.arange(n), np.arange(n), np.arange(n)] = 1.0
        return Tensor((x,), (x, x), arr)
    if kind == "omni":
        return Tensor((x,), (), np.ones(n))
    raise ValueError(f"unknown structural morphism {kind!r}")


def swap_tensor(x: FiniteSet, y: FiniteSet) -> StochasticKernel:
    """Symmetry ``X x Y -> Y x X``."""
    arr = np.zeros((len(y), len(x), len(x), len(y)))
    for i in range(len(x)):
        for j in range(len(y)):
            arr[j, i, i, j] = 1.0
    return as_stochastic(Tensor((y, x), (x, y), arr))


def normalize_tensor(t: Tensor):
    """Split an empty-domain tensor into ``(Z, distribution)``.

    Returns ``(0.0, DEGENERATE)`` when all entries vanish.
    """
    if t.domain:
        raise ShapeMismatchError("only empty-domain tensors can be normalised")
    z = float(np.sum(t.entries))
    if z <= 0.0:
        return 0.0, DEGENERATE
    return z, Distribution(t.codomain, (), t.entries / z)


def proportional_eq(t1: Tensor, t2: Tensor, tol: float = 1e-12) -> bool:
    """Whether ``lam * t1 == t2`` (entrywise within ``tol``) for some ``lam > 0``.

    ``lam`` is read off at the largest-magnitude entry of ``t1``.  Two
    (numerically) all-zero tensors are proportional.
    """
    if t1.codomain != t2.codomain or t1.domain != t2.domain:
        raise ShapeMismatchError("proportionality needs tensors of the same type")
    a, b = t1.entries, t2.entries
    if a.size == 0:
        return True
    idx = np.unravel_index(int(np.argmax(a)), a.shape)
    if a[idx] <= tol:
        return bool(np.all(a <= tol) and np.all(b <= tol))
    lam = b[idx] / a[idx]
    if lam <= 0:
        return False
    return bool(np.all(np.abs(lam * a - b) <= tol))


def marginalize(d: Tensor, keep: Iterable[str]) -> Distribution:
    """Sum out every variable not named in ``keep``; kept variables stay in their order."""
    if d.domain:
        raise ShapeMismatchError("marginalize expects a distribution")
    names = [s.name for s in d.codomain]
    keep = list(keep)
    for k in keep:
        if k not in names:
            raise UnknownVertexError(k)
    drop = tuple(i for i, n in enumerate(names) if n not in keep)
    kept = tuple(s for s in d.codomain if s.name in keep)
    return Distribution(kept, (), d.entries.sum(axis=drop))


def permute_codomain(t: Tensor, order: Sequence[str]) -> Tensor:
    """Reorder the codomain axes of an empty-domain tensor by variable name."""
    names = [s.name for s in t.codomain]
    perm = [names.index(n) for n in order]
    if sorted(perm) != list(range(len(names))):
        raise ShapeMismatchError(f"{list(order)} is not a permutation of {names}")
    cls = Distribution if isinstance(t, Distribution) else Tensor
    return cls(tuple(t.codomain[i] for i in perm), t.domain, t.entries.transpose(perm))
