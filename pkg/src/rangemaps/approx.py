"""Constructive tensor approximation of vector functions on finite spaces.

Given ``F`` and a neighborhood ``B``, pick centers greedily so that the sets
``W_j = {x : F(x) - F(x_j) in B}`` cover the space, build a partition of unity
subordinate to that cover, and form ``G = sum_j h_j (x) F(x_j)``.  Each
``F(x) - G(x)`` is then a convex combination of vectors in ``B``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .funcspace import ScalarFunction, TensorSum, VectorFunction, in_V, tensor_eval, uniform_seminorm
from .lcs import Neighborhood
from .space import FiniteSpace

Strategy = Literal["assignment", "hat"]


class InvalidCover(ValueError):
    pass


@dataclass(frozen=True)
class Cover:
    space: FiniteSpace
    centers: tuple[str, ...]
    sets: tuple[frozenset[str], ...]

    def validate(self) -> None:
        if len(self.centers) != len(self.sets):
            raise InvalidCover("one set per center is required")
        for c, w in zip(self.centers, self.sets):
            if c not in w:
                raise InvalidCover(f"center {c!r} is not in its own set")
        covered = frozenset().union(*self.sets) if self.sets else frozenset()
        missing = [x for x in self.space.labels if x not in covered]
        if missing:
            raise InvalidCover(f"points {missing} are not covered")


@dataclass(frozen=True)
class PartitionOfUnity:
    cover: Cover
    weights: tuple[ScalarFunction, ...]

    def total(self) -> np.ndarray:
        return np.sum([h.values.real for h in self.weights], axis=0)

    def respects_supports(self) -> bool:
        for h, w in zip(self.weights, self.cover.sets):
            for x, val in zip(h.space.labels, h.values):
                if val != 0 and x not in w:
                    return False
        return True


def build_cover(F: VectorFunction, B: Neighborhood) -> Cover:
    labels = F.space.labels
    centers: list[str] = []
    sets: list[frozenset[str]] = []
    covered = np.zeros(len(labels), dtype=bool)
    while not covered.all():
        j = int(np.argmin(covered))  # first uncovered in label order
        member = B.contains_rows(F.values - F.values[j])
        centers.append(labels[j])
        sets.append(frozenset(x for x, m in zip(labels, member) if m))
        covered |= member
        covered[j] = True  # 0_E is in B, but keep termination independent of rounding
    cover = Cover(F.space, tuple(centers), tuple(sets))
    return cover


def _assignment(cover: Cover) -> np.ndarray:
    space = cover.space
    w = np.zeros((len(cover.centers), len(space)))
    for i, x in enumerate(space.labels):
        for j, s in enumerate(cover.sets):
            if x in s:
                w[j, i] = 1.0
                break
        else:
            raise InvalidCover(f"point {x!r} is not covered")
    return w


def _hat(cover: Cover, radius: float | None) -> np.ndarray:
    space = cover.space
    if space.metric is None:
        raise ValueError("the hat strategy needs a metric on the space")
    d = space.metric
    if radius is None:
        radius = float(d.max()) or 1.0
    fallback = _assignment(cover)
    w = np.zeros_like(fallback)
    for j, (c, s) in enumerate(zip(cover.centers, cover.sets)):
        ci = space.index(c)
        for i, x in enumerate(space.labels):
            if x in s:
                w[j, i] = max(0.0, 1.0 - d[i, ci] / radius)
    col = w.sum(axis=0)
    for i in range(len(space)):
        if col[i] > 0:
            w[:, i] /= col[i]
        else:
            w[:, i] = fallback[:, i]
    return w


def build_pou(C: Cover, strategy: Strategy = "assignment", radius: float | None = None) -> PartitionOfUnity:
    """Partition of unity subordinate to ``C``.

    ``assignment`` gives each point full weight on the first center whose set
    contains it.  ``hat`` uses normalized ``max(0, 1 - d(x, x_j)/radius)`` weights
    restricted to each set, falling back to assignment where all weights vanish.
    """
    C.validate()
    if strategy == "assignment":
        w = _assignment(C)
    elif strategy == "hat":
        w = _hat(C, radius)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return PartitionOfUnity(C, tuple(ScalarFunction(C.space, row) for row in w))


@dataclass(frozen=True)
class Certificate:
    cover_centers: tuple[str, ...]
    in_V: bool
    errors_per_seminorm: tuple[float, ...]

    def to_json(self) -> dict:
        return {
            "cover_centers": list(self.cover_centers),
            "in_V": self.in_V,
            "errors_per_seminorm": list(self.errors_per_seminorm),
        }


def tensor_approximate(
    F: VectorFunction,
    B: Neighborhood,
    strategy: Strategy = "assignment",
    radius: float | None = None,
    tol: float = 0.0,
) -> tuple[TensorSum, Certificate]:
    cover = build_cover(F, B)
    pou = build_pou(cover, strategy, radius)
    terms = tuple(
        (h, F(c)) for h, c in zip(pou.weights, cover.centers)
    )
    G = TensorSum(terms, F.model)
    diff = F - tensor_eval(G)
    cert = Certificate(
        cover.centers,
        in_V(diff, B, tol),
        tuple(uniform_seminorm(diff, p) for p in F.model.seminorms),
    )
    return G, cert
