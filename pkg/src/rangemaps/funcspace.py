"""Function tables on finite spaces: C(X), C(X,E), tensor sums, ranges, V_X(B)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .lcs import DimensionError, Neighborhood, Seminorm, VectorSpaceModel, as_vector
from .space import FiniteSpace, Symbol


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class ScalarFunction:
    """An element of C(X): one complex value per point, in label order."""

    space: FiniteSpace
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=complex).reshape(-1)
        if v.size != len(self.space):
            raise DimensionError(f"expected {len(self.space)} values, got {v.size}")
        object.__setattr__(self, "values", _frozen(v))

    @classmethod
    def from_mapping(cls, space: FiniteSpace, table: Mapping[str, Any]) -> "ScalarFunction":
        missing = [x for x in space.labels if x not in table]
        if missing:
            raise ValueError(f"function is not total: missing {missing}")
        return cls(space, [complex(table[x]) for x in space.labels])

    @classmethod
    def constant(cls, space: FiniteSpace, c: complex = 1.0) -> "ScalarFunction":
        return cls(space, np.full(len(space), c, dtype=complex))

    @classmethod
    def indicator(cls, space: FiniteSpace, x: str) -> "ScalarFunction":
        v = np.zeros(len(space), dtype=complex)
        v[space.index(x)] = 1.0
        return cls(space, v)

    def __call__(self, x: str) -> complex:
        return complex(self.values[self.space.index(x)])

    def as_dict(self) -> dict[str, complex]:
        return {x: complex(v) for x, v in zip(self.space.labels, self.values)}

    def _check(self, other: "ScalarFunction") -> None:
        if other.space != self.space:
            raise ValueError("scalar functions live on different spaces")

    def __add__(self, other: "ScalarFunction") -> "ScalarFunction":
        self._check(other)
        return ScalarFunction(self.space, self.values + other.values)

    def __sub__(self, other: "ScalarFunction") -> "ScalarFunction":
        self._check(other)
        return ScalarFunction(self.space, self.values - other.values)

    def __mul__(self, other: Any) -> "ScalarFunction":
        if isinstance(other, ScalarFunction):
            self._check(other)
            return ScalarFunction(self.space, self.values * other.values)
        return ScalarFunction(self.space, self.values * complex(other))

    __rmul__ = __mul__

    def __neg__(self) -> "ScalarFunction":
        return ScalarFunction(self.space, -self.values)

    def key(self) -> bytes:
        return self.values.tobytes()


@dataclass(frozen=True, eq=False)
class VectorFunction:
    """An element of C(X,E) stored as an (|X|, d) complex array."""

    space: FiniteSpace
    model: VectorSpaceModel
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=complex)
        n, d = len(self.space), self.model.dimension
        if v.ndim == 1 and d == 1 and v.size == n:
            v = v.reshape(n, 1)
        if v.shape != (n, d):
            raise DimensionError(f"expected values of shape {(n, d)}, got {v.shape}")
        if not np.isfinite(v).all():
            raise ValueError("function values must be finite")
        object.__setattr__(self, "values", _frozen(v))

    @classmethod
    def _trusted(cls, space: FiniteSpace, model: VectorSpaceModel, values: np.ndarray) -> "VectorFunction":
        # arithmetic on validated operands already has the right shape and dtype
        obj = object.__new__(cls)
        object.__setattr__(obj, "space", space)
        object.__setattr__(obj, "model", model)
        object.__setattr__(obj, "values", _frozen(values))
        return obj

    @classmethod
    def from_mapping(
        cls, space: FiniteSpace, model: VectorSpaceModel, table: Mapping[str, Any]
    ) -> "VectorFunction":
        missing = [x for x in space.labels if x not in table]
        if missing:
            raise ValueError(f"function is not total: missing {missing}")
        extra = [x for x in table if x not in space]
        if extra:
            raise ValueError(f"function has values at unknown points {extra}")
        rows = [as_vector(table[x], model.dimension) for x in space.labels]
        return cls(space, model, np.vstack(rows))

    @classmethod
    def zero(cls, space: FiniteSpace, model: VectorSpaceModel) -> "VectorFunction":
        return cls(space, model, np.zeros((len(space), model.dimension), dtype=complex))

    @classmethod
    def constant(cls, space: FiniteSpace, model: VectorSpaceModel, u: Any) -> "VectorFunction":
        u = as_vector(u, model.dimension)
        return cls(space, model, np.tile(u, (len(space), 1)))

    def __call__(self, x: str) -> np.ndarray:
        return self.values[self.space.index(x)]

    def as_dict(self) -> dict[str, np.ndarray]:
        return {x: self.values[i] for i, x in enumerate(self.space.labels)}

    def _check(self, other: "VectorFunction") -> None:
        if other.space != self.space:
            raise ValueError("functions live on different spaces")
        if other.model.dimension != self.model.dimension:
            raise DimensionError("functions take values in different dimensions")

    def __add__(self, other: "VectorFunction") -> "VectorFunction":
        self._check(other)
        return VectorFunction._trusted(self.space, self.model, self.values + other.values)

    def __sub__(self, other: "VectorFunction") -> "VectorFunction":
        self._check(other)
        return VectorFunction._trusted(self.space, self.model, self.values - other.values)

    def __mul__(self, c: Any) -> "VectorFunction":
        return VectorFunction(self.space, self.model, self.values * complex(c))

    __rmul__ = __mul__

    def __neg__(self) -> "VectorFunction":
        return VectorFunction._trusted(self.space, self.model, -self.values)

    def equals(self, other: "VectorFunction", tol: float = 0.0) -> bool:
        """Pointwise equality up to ``tol`` in the model gauge."""
        self._check(other)
        if tol == 0.0:
            return bool(np.array_equal(self.values, other.values))
        return bool(self.model.gauge_rows(self.values - other.values).max() <= tol)

    def distance(self, other: "VectorFunction") -> float:
        self._check(other)
        return float(self.model.gauge_rows(self.values - other.values).max())

    def key(self) -> bytes:
        return self.values.tobytes()


def tensor(f: ScalarFunction, u: Any, model: VectorSpaceModel) -> VectorFunction:
    """The elementary tensor ``x -> f(x) u``."""
    u = as_vector(u, model.dimension)
    return VectorFunction(f.space, model, np.outer(f.values, u))


@dataclass(frozen=True, eq=False)
class TensorSum:
    """A finite sum of elementary tensors, an element of C(X) (x) E."""

    terms: tuple[tuple[ScalarFunction, np.ndarray], ...]
    model: VectorSpaceModel

    def __post_init__(self) -> None:
        terms = []
        for f, u in self.terms:
            terms.append((f, as_vector(u, self.model.dimension)))
        if terms:
            space = terms[0][0].space
            if any(f.space != space for f, _ in terms):
                raise ValueError("tensor terms live on different spaces")
        object.__setattr__(self, "terms", tuple(terms))

    def __add__(self, other: "TensorSum") -> "TensorSum":
        if other.model.dimension != self.model.dimension:
            raise DimensionError("tensor sums take values in different dimensions")
        return TensorSum(self.terms + other.terms, self.model)


def tensor_eval(S: TensorSum, space: FiniteSpace | None = None) -> VectorFunction:
    """Evaluate ``x -> sum_j f_j(x) u_j`` in term order."""
    if not S.terms:
        if space is None:
            raise ValueError("an empty tensor sum needs an explicit space")
        return VectorFunction.zero(space, S.model)
    sp = S.terms[0][0].space
    if space is not None and space != sp:
        raise ValueError("tensor terms do not live on the requested space")
    acc = np.zeros((len(sp), S.model.dimension), dtype=complex)
    for f, u in S.terms:
        acc = acc + np.outer(f.values, u)
    return VectorFunction(sp, S.model, acc)


@dataclass(frozen=True, eq=False)
class RangeSet:
    """Deduplicated value set; representatives pairwise farther apart than ``tol``."""

    model: VectorSpaceModel
    representatives: np.ndarray
    tol: float

    def __len__(self) -> int:
        return self.representatives.shape[0]

    def __iter__(self):
        return iter(self.representatives)


def dedup_rows(model: VectorSpaceModel, rows: np.ndarray, tol: float) -> np.ndarray:
    """Keep the first row of every cluster of rows within ``tol`` of a kept row."""
    kept: list[np.ndarray] = []
    for row in rows:
        if kept and model.gauge_rows(np.vstack(kept) - row).min() <= tol:
            continue
        kept.append(row)
    return _frozen(np.vstack(kept))


def range_of(F: VectorFunction, tol: float = 0.0) -> RangeSet:
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    return RangeSet(F.model, dedup_rows(F.model, F.values, tol), tol)


@dataclass(frozen=True)
class Membership:
    member: bool
    distance: float

    def __bool__(self) -> bool:
        return self.member

    def __iter__(self):
        return iter((self.member, self.distance))


def range_contains(R: RangeSet, v: Any, tol: float = 0.0) -> Membership:
    """Nearest-representative distance in the model gauge; member iff ``<= tol``."""
    vec = as_vector(v, R.model.dimension)
    dist = float(R.model.gauge_rows(R.representatives - vec).min())
    return Membership(dist <= tol, dist)


def compose(F: VectorFunction, phi: Symbol) -> VectorFunction:
    """``(F o phi)(y) = F(phi(y))``."""
    if phi.target != F.space:
        raise ValueError("symbol target does not match the function's domain")
    return VectorFunction._trusted(phi.source, F.model, F.values[phi.indices])


def compose_scalar(f: ScalarFunction, phi: Symbol) -> ScalarFunction:
    if phi.target != f.space:
        raise ValueError("symbol target does not match the function's domain")
    return ScalarFunction(phi.source, f.values[phi.indices])


def in_V(F: VectorFunction, B: Neighborhood, tol: float = 0.0) -> bool:
    """Membership in ``V_X(B)``: every value of ``F`` lies in ``B``."""
    if B.dim != F.model.dimension:
        raise DimensionError("neighborhood and function live in different dimensions")
    return bool(B.contains_rows(F.values, tol).all())


def uniform_seminorm(F: VectorFunction, p: Seminorm) -> float:
    return float(p.evaluate_rows(F.values).max())


def indicator_tensor(
    space: FiniteSpace, model: VectorSpaceModel, x: str, u: Any
) -> VectorFunction:
    return tensor(ScalarFunction.indicator(space, x), u, model)


def stack(functions: Iterable[VectorFunction]) -> np.ndarray:
    return np.stack([F.values for F in functions])


def linear_combination(
    coeffs: Sequence[complex], functions: Sequence[VectorFunction]
) -> VectorFunction:
    if not functions:
        raise ValueError("need at least one function")
    acc = np.zeros_like(functions[0].values)
    for c, F in zip(coeffs, functions):
        functions[0]._check(F)
        acc = acc + complex(c) * F.values
    return VectorFunction(functions[0].space, functions[0].model, acc)
