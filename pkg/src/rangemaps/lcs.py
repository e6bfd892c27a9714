"""Finite-dimensional locally convex models: complex vectors, seminorms, neighborhoods.

A model of E is ``C^d`` together with a finite separating family of seminorms
``p(u) = max_k |(A u)_k|``.  Basic neighborhoods of the origin are finite
intersections of seminorm sublevel sets, which are balanced and convex by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

DEFAULT_TOL = 1e-9


class DimensionError(ValueError):
    """Raised when a vector or matrix does not match the model dimension."""


class SamplingError(RuntimeError):
    """Raised when rejection sampling cannot find a member of a neighborhood."""


def as_vector(u: Any, dim: int | None = None) -> np.ndarray:
    """Coerce ``u`` to a read-only 1-D complex array, checking finiteness."""
    arr = np.array(u, dtype=complex).reshape(-1)
    if arr.size == 0:
        raise DimensionError("vectors must have at least one entry")
    if dim is not None and arr.size != dim:
        raise DimensionError(f"expected dimension {dim}, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector entries must be finite")
    arr.flags.writeable = False
    return arr


def basis_vector(dim: int, k: int) -> np.ndarray:
    e = np.zeros(dim, dtype=complex)
    e[k] = 1.0
    e.flags.writeable = False
    return e


@dataclass(frozen=True, eq=False)
class Seminorm:
    """``p(u) = max_k |(A u)_k|`` for a complex matrix ``A`` of shape (d', d)."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        a = np.array(self.matrix, dtype=complex)
        if a.ndim == 1:
            a = a.reshape(1, -1)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise DimensionError("seminorm matrix must be a non-empty 2-D array")
        if not np.all(np.isfinite(a)):
            raise ValueError("seminorm matrix entries must be finite")
        a.flags.writeable = False
        object.__setattr__(self, "matrix", a)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __call__(self, u: Any) -> float:
        return seminorm_eval(self, u)

    def evaluate_rows(self, values: np.ndarray) -> np.ndarray:
        """Evaluate on every row of an (n, d) array at once."""
        return np.abs(values @ self.matrix.T).max(axis=-1)


def seminorm_eval(p: Seminorm, u: Any) -> float:
    vec = np.asarray(u, dtype=complex).reshape(-1)
    if vec.size != p.dim:
        raise DimensionError(f"seminorm expects dimension {p.dim}, got {vec.size}")
    return float(np.abs(p.matrix @ vec).max())


@dataclass(frozen=True, eq=False)
class VectorSpaceModel:
    """The space ``C^d`` with a finite family of seminorms."""

    dimension: int
    seminorms: tuple[Seminorm, ...]

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ValueError("E must not be the zero space: dimension >= 1")
        sems = tuple(self.seminorms)
        if not sems:
            raise ValueError("a model needs at least one seminorm")
        for p in sems:
            if p.dim != self.dimension:
                raise DimensionError(
                    f"seminorm acts on dimension {p.dim}, model has {self.dimension}"
                )
        object.__setattr__(self, "seminorms", sems)

    @classmethod
    def standard(cls, dimension: int) -> "VectorSpaceModel":
        """Sup-norm model: a single seminorm ``max_k |u_k|``."""
        return cls(dimension, (Seminorm(np.eye(dimension)),))

    def zero(self) -> np.ndarray:
        z = np.zeros(self.dimension, dtype=complex)
        z.flags.writeable = False
        return z

    def vector(self, u: Any) -> np.ndarray:
        return as_vector(u, self.dimension)

    def gauge(self, u: Any) -> float:
        """Max over the family; the distance used by every tolerance comparison."""
        return max(seminorm_eval(p, u) for p in self.seminorms)

    def gauge_rows(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=complex).reshape(-1, self.dimension)
        out = self.seminorms[0].evaluate_rows(values)
        for p in self.seminorms[1:]:
            out = np.maximum(out, p.evaluate_rows(values))
        return out

    @property
    def is_separating(self) -> bool:
        return separating_check(self)


def separating_check(model: VectorSpaceModel) -> bool:
    """True iff the stacked seminorm matrices have full column rank.

    ``p_i(u) = 0`` for all ``i`` means ``A_i u = 0`` for all ``i``, so the family
    separates points exactly when the stacked matrix has trivial kernel.
    """
    stacked = np.vstack([p.matrix for p in model.seminorms])
    return int(np.linalg.matrix_rank(stacked)) == model.dimension


@dataclass(frozen=True)
class Bound:
    seminorm: int
    radius: float

    def __post_init__(self) -> None:
        if not (self.radius > 0 and np.isfinite(self.radius)):
            raise ValueError("neighborhood radii must be positive and finite")


@dataclass(frozen=True, eq=False)
class Neighborhood:
    """``B = {u : p_i(u) <= r_i for every listed (i, r_i)}``."""

    model: VectorSpaceModel
    bounds: tuple[Bound, ...]

    def __post_init__(self) -> None:
        bounds = tuple(self.bounds)
        if not bounds:
            raise ValueError("a neighborhood needs at least one bound")
        for b in bounds:
            if not 0 <= b.seminorm < len(self.model.seminorms):
                raise IndexError(f"no seminorm with index {b.seminorm}")
        object.__setattr__(self, "bounds", bounds)

    @classmethod
    def ball(cls, model: VectorSpaceModel, radius: float, seminorm: int = 0) -> "Neighborhood":
        return cls(model, (Bound(seminorm, float(radius)),))

    @property
    def dim(self) -> int:
        return self.model.dimension

    def contains(self, u: Any, tol: float = 0.0) -> bool:
        return nbr_contains(self, u, tol)

    def contains_rows(self, values: np.ndarray, tol: float = 0.0) -> np.ndarray:
        values = np.asarray(values, dtype=complex).reshape(-1, self.dim)
        ok = np.ones(values.shape[0], dtype=bool)
        for b in self.bounds:
            ok &= self.model.seminorms[b.seminorm].evaluate_rows(values) <= b.radius + tol
        return ok


def nbr_contains(B: Neighborhood, u: Any, tol: float = 0.0) -> bool:
    vec = np.asarray(u, dtype=complex).reshape(-1)
    if vec.size != B.dim:
        raise DimensionError(f"neighborhood lives in dimension {B.dim}, got {vec.size}")
    return all(
        seminorm_eval(B.model.seminorms[b.seminorm], vec) <= b.radius + tol
        for b in B.bounds
    )


@dataclass(frozen=True)
class BalancedConvexResult:
    passed: bool
    samples: int
    counterexample: dict | None = None

    def __bool__(self) -> bool:
        return self.passed


def _default_box(B: Neighborhood) -> float:
    # Twice the half-width of a box guaranteed to sit inside B, so that a fair
    # share of draws land near or outside the boundary.
    scale = np.inf
    for b in B.bounds:
        rowsum = np.abs(B.model.seminorms[b.seminorm].matrix).sum(axis=1).max()
        if rowsum > 0:
            scale = min(scale, b.radius / (np.sqrt(2.0) * rowsum))
    if not np.isfinite(scale):
        scale = max(b.radius for b in B.bounds)
    return 2.0 * float(scale)


def check_balanced_convex(
    B: Any,
    seed: int = 0,
    count: int = 100,
    *,
    box: float | None = None,
    retries: int = 10_000,
    slack: float = 1e-12,
) -> BalancedConvexResult:
    """Sample members of ``B`` and test closure under ``|lambda| <= 1`` scaling and midpoints.

    ``B`` is any object exposing ``dim`` and ``contains(u, tol)``; this lets test
    doubles with arbitrary membership rules be checked too.  ``slack`` absorbs
    rounding at the boundary and is scaled by the largest radius when ``B`` is
    a :class:`Neighborhood`.
    """
    if count < 1:
        raise ValueError("sample count must be >= 1")
    rng = np.random.default_rng(seed)
    dim = B.dim
    if box is None:
        box = _default_box(B) if isinstance(B, Neighborhood) else 1.0
    tol = slack
    if isinstance(B, Neighborhood):
        tol = slack * (1.0 + max(b.radius for b in B.bounds))

    def draw() -> np.ndarray:
        for _ in range(retries):
            u = rng.uniform(-box, box, dim) + 1j * rng.uniform(-box, box, dim)
            if B.contains(u, tol=0.0):
                return u
        raise SamplingError(f"no member of B found in box [-{box}, {box}] after {retries} draws")

    if not B.contains(np.zeros(dim, dtype=complex), tol=tol):
        return BalancedConvexResult(False, 0, {"rule": "origin", "u": np.zeros(dim, complex)})

    for i in range(count):
        u = draw()
        v = draw()
        # a unit-circle scalar, an interior scalar, and the exact rotations by i and -1
        lams = (
            np.exp(2j * np.pi * rng.uniform()),
            rng.uniform() * np.exp(2j * np.pi * rng.uniform()),
            1j,
            -1.0,
        )
        for lam in lams:
            if not B.contains(lam * u, tol=tol):
                return BalancedConvexResult(
                    False, i + 1, {"rule": "balanced", "u": u, "lambda": complex(lam)}
                )
        t = rng.uniform()
        w = (1 - t) * u + t * v
        if not B.contains(w, tol=tol):
            return BalancedConvexResult(
                False, i + 1, {"rule": "convex", "u": u, "v": v, "t": float(t)}
            )
    return BalancedConvexResult(True, count)


def make_model(matrices: Sequence[Any], dimension: int | None = None) -> VectorSpaceModel:
    sems = tuple(Seminorm(m) for m in matrices)
    if dimension is None:
        dimension = sems[0].dim
    return VectorSpaceModel(dimension, sems)

