"""Scalar functionals on C(X): spectra, the spectral difference condition, and what it forces.

For ``f`` in ``C(X)`` the spectrum is the value set of ``f``.  A functional
``delta`` satisfies the condition when ``delta(0) = 0`` and
``delta(a) - delta(b)`` is a value of ``a - b`` for all ``a, b``; such a
functional is linear and multiplicative, hence zero or a point evaluation.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from .funcspace import ScalarFunction
from .lcs import DEFAULT_TOL
from .sampling import scalar_family
from .space import FiniteSpace

GRID = (0.0, 1.0, -1.0, 1j, -1j)


class ScalarFunctional:
    """A pure map ``C(X) -> C``; evaluations are remembered for a replay check."""

    def __init__(self, space: FiniteSpace, evaluator: Callable[[ScalarFunction], complex], name: str = "delta"):
        self.space = space
        self.evaluator = evaluator
        self.name = name
        self._seen: dict[bytes, complex] = {}
        self._lock = threading.Lock()
        self.impure: list[ScalarFunction] = []

    def __call__(self, f: ScalarFunction) -> complex:
        if f.space != self.space:
            raise ValueError("functional applied to a function on another space")
        val = complex(self.evaluator(f))
        with self._lock:
            prev = self._seen.setdefault(f.key(), val)
            if prev != val:
                self.impure.append(f)
        return val


@dataclass(frozen=True)
class SpectrumSet:
    values: np.ndarray

    def __len__(self) -> int:
        return self.values.size

    def distance(self, z: complex) -> float:
        return float(np.abs(self.values - z).min())

    def __contains__(self, z: object) -> bool:
        return self.distance(complex(z)) == 0.0  # type: ignore[arg-type]


def spectrum(f: ScalarFunction, tol: float = 0.0) -> SpectrumSet:
    """Deduplicated values of ``f`` in label order (first occurrence kept)."""
    kept: list[complex] = []
    for v in f.values:
        if any(abs(v - k) <= tol for k in kept):
            continue
        kept.append(complex(v))
    return SpectrumSet(np.array(kept, dtype=complex))


def ks_family(space: FiniteSpace, seed: int = 0, n_random: int = 6, integer: bool = True) -> list[ScalarFunction]:
    """Indicators, constants 0/1/i, ``i`` times indicators, then seeded random functions."""
    rng = np.random.default_rng([seed, 5])
    return scalar_family(space, rng, n_random, integer)


def grid_family(space: FiniteSpace, grid: Sequence[complex] = GRID) -> list[ScalarFunction]:
    """Every function ``X -> grid``; ``len(grid) ** |X|`` members."""
    return [ScalarFunction(space, vals) for vals in itertools.product(grid, repeat=len(space))]


@dataclass
class HypothesisResult:
    passed: bool
    checked: int
    max_distance: float
    witness: dict | None = None

    def __bool__(self) -> bool:
        return self.passed


def check_ks_hypothesis(
    delta: ScalarFunctional,
    pairs: Sequence[tuple[ScalarFunction, ScalarFunction]] | None = None,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> HypothesisResult:
    """Check ``delta(0) = 0`` and ``delta(a) - delta(b) in sigma(a - b)`` on every pair.

    Without explicit pairs, all ordered pairs of :func:`ks_family` are used.
    """
    space = delta.space
    z = delta(ScalarFunction.constant(space, 0.0))
    if abs(z) > tol:
        return HypothesisResult(False, 0, abs(z), {"rule": "zero", "delta_zero": z, "distance": abs(z)})
    if pairs is None:
        fam = ks_family(space, seed)
        pairs = [(a, b) for a in fam for b in fam]
    worst = 0.0
    cache: dict[bytes, complex] = {}

    def ev(f: ScalarFunction) -> complex:
        k = f.key()
        if k not in cache:
            cache[k] = delta(f)
        return cache[k]

    for n, (a, b) in enumerate(pairs):
        diff = ev(a) - ev(b)
        dist = spectrum(a - b).distance(diff)
        worst = max(worst, dist)
        if dist > tol:
            return HypothesisResult(
                False, n + 1, worst, {"rule": "spectrum", "a": a, "b": b, "difference": diff, "distance": dist}
            )
    return HypothesisResult(True, len(pairs), worst)


@dataclass
class ConclusionResult:
    linearity: float
    multiplicativity: float
    unitality: float
    zero_functional: bool
    point: str | None
    witness: dict | None = None
    worst: dict = field(default_factory=dict)

    def residual(self) -> float:
        return max(self.linearity, self.multiplicativity)


LAMBDAS = (1.0, 1j, -1.0, 2.0, 1 + 1j, -1j)


def check_ks_conclusion(
    delta: ScalarFunctional,
    samples: Sequence[ScalarFunction] | None = None,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    lams: Sequence[complex] = LAMBDAS,
) -> ConclusionResult:
    """Linearity and multiplicativity residuals, then the representing point if any.

    A linear multiplicative functional with ``delta(1) = 1`` is located by
    indicator probing; one vanishing on every sample is reported as the zero
    functional.  Anything else with small residuals is an ambiguity.
    """
    space = delta.space
    if samples is None:
        samples = ks_family(space, seed)
    vals = {f.key(): delta(f) for f in samples}

    def ev(f: ScalarFunction) -> complex:
        k = f.key()
        if k not in vals:
            vals[k] = delta(f)
        return vals[k]

    lin = mult = 0.0
    worst: dict = {}
    for n, (f, g) in enumerate(itertools.product(samples, repeat=2)):
        lam = complex(lams[n % len(lams)])
        r = abs(ev(f + lam * g) - ev(f) - lam * ev(g))
        if r > lin:
            lin, worst["linearity"] = r, {"f": f, "g": g, "lambda": lam}
        r = abs(ev(f * g) - ev(f) * ev(g))
        if r > mult:
            mult, worst["multiplicativity"] = r, {"f": f, "g": g}
    one = ev(ScalarFunction.constant(space, 1.0))
    unit = abs(one - 1.0)
    zero = lin <= tol and mult <= tol and all(abs(v) <= tol for v in vals.values())
    point = None
    witness = None
    if lin <= tol and mult <= tol and unit <= tol:
        probes = [ev(ScalarFunction.indicator(space, x)) for x in space.labels]
        ones = [i for i, v in enumerate(probes) if abs(v - 1.0) <= tol]
        zeros = [i for i, v in enumerate(probes) if abs(v) <= tol]
        if len(ones) == 1 and len(zeros) == len(space) - 1:
            point = space.labels[ones[0]]
        else:
            witness = {"rule": "ambiguity", "candidates": dict(zip(space.labels, probes))}
    elif not zero:
        key = max(("linearity", lin), ("multiplicativity", mult), ("unitality", unit), key=lambda kv: kv[1])[0]
        witness = {"rule": key, **worst.get(key, {"delta_one": one})}
    return ConclusionResult(lin, mult, unit, zero, point, witness, worst)


# ---------------------------------------------------------------------------
# functional catalog


def _point(space: FiniteSpace, params: Mapping[str, Any]) -> int:
    return space.index(params.get("point", space.labels[0]))


def make_functional(space: FiniteSpace, kind: str, params: Mapping[str, Any] | None = None) -> ScalarFunctional:
    """Build a catalog functional.

    kinds: ``evaluation``, ``averaging``, ``conjugate``, ``zero``, ``scaled``,
    ``shifted``, ``square``, ``real-part``.
    """
    params = dict(params or {})
    if kind == "evaluation":
        i = _point(space, params)
        fn = lambda f: f.values[i]  # noqa: E731
    elif kind == "averaging":
        w = params.get("weights")
        if w is None:
            weights = np.full(len(space), 1.0 / len(space))
        else:
            weights = np.array([float(w.get(x, 0.0)) for x in space.labels])
        fn = lambda f: complex(weights @ f.values)  # noqa: E731
    elif kind == "conjugate":
        i = _point(space, params)
        fn = lambda f: np.conj(f.values[i])  # noqa: E731
    elif kind == "zero":
        fn = lambda f: 0.0  # noqa: E731
    elif kind == "scaled":
        i = _point(space, params)
        c = complex(params.get("factor", 2.0))
        fn = lambda f: c * f.values[i]  # noqa: E731
    elif kind == "shifted":
        i = _point(space, params)
        c = complex(params.get("shift", 1.0))
        fn = lambda f: f.values[i] + c  # noqa: E731
    elif kind == "square":
        i = _point(space, params)
        fn = lambda f: f.values[i] ** 2  # noqa: E731
    elif kind == "real-part":
        i = _point(space, params)
        fn = lambda f: f.values[i].real  # noqa: E731
    else:
        raise ValueError(f"unknown functional kind {kind!r}")
    return ScalarFunctional(space, fn, kind)


FUNCTIONAL_KINDS = ("evaluation", "averaging", "conjugate", "zero", "scaled", "shifted", "square", "real-part")


def functional_catalog(space: FiniteSpace) -> list[ScalarFunctional]:
    """Every catalog kind at every point (point-free kinds once)."""
    out = []
    for kind in FUNCTIONAL_KINDS:
        if kind in ("averaging", "zero"):
            out.append(make_functional(space, kind))
        else:
            out += [make_functional(space, kind, {"point": x}) for x in space.labels]
    return out
