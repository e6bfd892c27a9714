"""Finite point spaces and the (automatically continuous) maps between them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

METRIC_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class FiniteSpace:
    """Ordered distinct labels, optionally with a distance matrix.

    Finite discrete spaces are compact Hausdorff.  Label order is the
    tie-breaking order for every deterministic iteration downstream.
    """

    labels: tuple[str, ...]
    metric: np.ndarray | None = None
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        labels = tuple(str(s) for s in self.labels)
        if not labels:
            raise ValueError("a space must have at least one point")
        if len(set(labels)) != len(labels):
            raise ValueError("space labels must be pairwise distinct")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(labels)})
        if self.metric is not None:
            m = np.array(self.metric, dtype=float)
            if m.shape != (len(labels), len(labels)):
                raise ValueError(f"metric must be {len(labels)}x{len(labels)}")
            m.flags.writeable = False
            object.__setattr__(self, "metric", m)

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label: object) -> bool:
        return label in self._index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteSpace):
            return NotImplemented
        if self.labels != other.labels:
            return False
        if self.metric is None or other.metric is None:
            return self.metric is None and other.metric is None
        return bool(np.array_equal(self.metric, other.metric))

    def __hash__(self) -> int:
        return hash(self.labels)

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"{label!r} is not a point of this space") from None

    @classmethod
    def on_line(cls, points: Sequence[float], labels: Sequence[str] | None = None) -> "FiniteSpace":
        """Points of the real line with the metric ``|x - y|``."""
        pts = np.asarray(points, dtype=float)
        if labels is None:
            labels = [format(p, "g") for p in pts]
        return cls(tuple(labels), np.abs(pts[:, None] - pts[None, :]))


@dataclass(frozen=True)
class MetricCheck:
    passed: bool
    axiom: str | None = None
    points: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.passed


def validate_metric(space: FiniteSpace, tol: float = METRIC_TOL) -> MetricCheck:
    """Check nonnegativity, identity of indiscernibles, symmetry, triangle inequality."""
    if space.metric is None:
        raise ValueError("space has no metric")
    m = space.metric
    labels = space.labels
    n = len(labels)
    for i in range(n):
        if abs(m[i, i]) > tol:
            return MetricCheck(False, "identity", (labels[i],))
    for i in range(n):
        for j in range(n):
            if m[i, j] < -tol:
                return MetricCheck(False, "nonnegativity", (labels[i], labels[j]))
            if i != j and m[i, j] <= tol:
                return MetricCheck(False, "identity", (labels[i], labels[j]))
            if abs(m[i, j] - m[j, i]) > tol:
                return MetricCheck(False, "symmetry", (labels[i], labels[j]))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if m[i, k] > m[i, j] + m[j, k] + tol:
                    return MetricCheck(False, "triangle", (labels[i], labels[j], labels[k]))
    return MetricCheck(True)


@dataclass(frozen=True, eq=False)
class Symbol:
    """A total map ``phi: Y -> X`` stored as a label table."""

    target: FiniteSpace
    source: FiniteSpace
    table: Mapping[str, str]

    def __post_init__(self) -> None:
        table = dict(self.table)
        missing = [y for y in self.source.labels if y not in table]
        if missing:
            raise ValueError(f"symbol is not total: no image for {missing}")
        extra = [y for y in table if y not in self.source]
        if extra:
            raise ValueError(f"symbol table has unknown source points {extra}")
        bad = [x for x in table.values() if x not in self.target]
        if bad:
            raise ValueError(f"symbol maps into unknown target points {bad}")
        ordered = {y: table[y] for y in self.source.labels}
        object.__setattr__(self, "table", ordered)

    def __call__(self, y: str) -> str:
        return self.table[y]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Symbol):
            return NotImplemented
        return (
            self.target == other.target
            and self.source == other.source
            and dict(self.table) == dict(other.table)
        )

    def __hash__(self) -> int:
        return hash(tuple(self.table.items()))

    @property
    def indices(self) -> np.ndarray:
        """Target index of each source point, in source label order."""
        return np.array([self.target.index(self.table[y]) for y in self.source.labels], dtype=int)

    def image(self) -> list[str]:
        hit = set(self.table.values())
        return [x for x in self.target.labels if x in hit]

    @classmethod
    def identity(cls, space: FiniteSpace) -> "Symbol":
        return cls(space, space, {s: s for s in space.labels})

    @classmethod
    def from_indices(cls, target: FiniteSpace, source: FiniteSpace, idx: Sequence[int]) -> "Symbol":
        return cls(target, source, {y: target.labels[int(i)] for y, i in zip(source.labels, idx)})


def symbol_is_surjective(phi: Symbol) -> bool:
    return len(set(phi.table.values())) == len(phi.target)


def missed_points(phi: Symbol) -> list[str]:
    hit = set(phi.table.values())
    return [x for x in phi.target.labels if x not in hit]


@dataclass(frozen=True)
class InjectivityResult:
    injective: bool
    collision: tuple[str, str] | None = None

    def __bool__(self) -> bool:
        return self.injective


def symbol_is_injective(phi: Symbol) -> InjectivityResult:
    """On failure report the first colliding pair ``(y1, y2)`` in source order."""
    seen: dict[str, str] = {}
    for y in phi.source.labels:
        x = phi.table[y]
        if x in seen:
            return InjectivityResult(False, (seen[x], y))
        seen[x] = y
    return InjectivityResult(True)
