"""Analysis of black-box maps ``T: C(X,E) -> C(Y,E)``.

The pipeline normalizes ``T`` by its value at the zero function, checks range
preservation ``Ran(TF - TG) in Ran(F - G)`` on sampled pairs, recovers the
scalar actions ``T(f (x) u) = g (x) u``, extracts the symbol ``phi: Y -> X`` by
indicator probing, checks the intermediate identities (point functionals,
independence from ``u``, additivity on tensors) and finally the representation
``TF = T(0) + F o phi``.  Every failure is reported as a replayable witness.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .codec import enc_function, enc_symbol, enc_vector, to_jsonable
from .funcspace import (
    ScalarFunction,
    VectorFunction,
    compose,
    range_of,
    range_contains,
    tensor,
)
from .lcs import DEFAULT_TOL, DimensionError, VectorSpaceModel, as_vector, basis_vector, separating_check
from .sampling import function_pool, random_function, scalar_family
from .space import FiniteSpace, Symbol, missed_points, symbol_is_injective, symbol_is_surjective

COMPOSITION_CONSISTENT = "composition-consistent"
VIOLATED = "violated"

WITNESS_KINDS = (
    "range-violation",
    "colinearity",
    "ambiguity",
    "point-functional",
    "u-dependence",
    "additivity",
    "representation",
    "purity",
    "evaluator-error",
)


class EvaluatorError(RuntimeError):
    """The map under test failed to produce a valid function for an input."""

    def __init__(self, message: str, F: VectorFunction | None = None):
        super().__init__(message)
        self.F = F


class MapUnderTest:
    """A black-box evaluator ``F -> TF`` between ``C(X,E)`` and ``C(Y,E)``.

    The evaluator may return a :class:`VectorFunction` on ``Y`` or a bare
    ``(|Y|, d)`` array.  Anything else, and any exception it raises, becomes an
    :class:`EvaluatorError`.
    """

    def __init__(
        self,
        domain: FiniteSpace,
        codomain: FiniteSpace,
        model: VectorSpaceModel,
        evaluator: Callable[[VectorFunction], Any],
        name: str = "map",
    ):
        if not separating_check(model):
            raise ValueError("the seminorm family does not separate points")
        self.domain = domain
        self.codomain = codomain
        self.model = model
        self.evaluator = evaluator
        self.name = name

    def __call__(self, F: VectorFunction) -> VectorFunction:
        if F.space != self.domain or F.model.dimension != self.model.dimension:
            raise ValueError("input function does not belong to the map's domain")
        try:
            out = self.evaluator(F)
        except EvaluatorError:
            raise
        except Exception as exc:
            raise EvaluatorError(f"{type(exc).__name__}: {exc}", F) from exc
        return self._coerce(out, F)

    def _coerce(self, out: Any, F: VectorFunction) -> VectorFunction:
        if isinstance(out, VectorFunction):
            if out.space != self.codomain:
                raise EvaluatorError("output is not a function on the codomain", F)
            if out.model.dimension != self.model.dimension:
                raise EvaluatorError(
                    f"dimension mismatch: expected {self.model.dimension}, got {out.model.dimension}", F
                )
            if out.model is not self.model:
                out = VectorFunction(self.codomain, self.model, out.values)
            return out
        try:
            return VectorFunction(self.codomain, self.model, np.asarray(out, dtype=complex))
        except (DimensionError, ValueError, TypeError) as exc:
            raise EvaluatorError(f"dimension mismatch: {exc}", F) from exc


class RecordingMap(MapUnderTest):
    """Memoizing wrapper that remembers every input for an end-of-run replay.

    ``fresh(F)`` bypasses the memo and compares against the remembered output;
    disagreements are collected as purity violations.
    """

    def __init__(self, inner: MapUnderTest):
        super().__init__(inner.domain, inner.codomain, inner.model, inner.evaluator, inner.name)
        self.inner = inner
        self._memo: dict[bytes, tuple[VectorFunction, VectorFunction]] = {}
        self._lock = threading.Lock()
        self.mismatches: list[tuple[VectorFunction, VectorFunction, VectorFunction]] = []

    def __call__(self, F: VectorFunction) -> VectorFunction:
        key = F.key()
        with self._lock:
            hit = self._memo.get(key)
        if hit is not None:
            return hit[1]
        out = self.inner(F)
        with self._lock:
            prev = self._memo.get(key)
            if prev is None:
                self._memo[key] = (F, out)
                return out
        self._note(F, prev[1], out)
        return prev[1]

    def fresh(self, F: VectorFunction) -> VectorFunction:
        first = self(F)
        again = self.inner(F)
        self._note(F, first, again)
        return again

    def _note(self, F: VectorFunction, first: VectorFunction, second: VectorFunction) -> None:
        if not np.array_equal(first.values, second.values):
            with self._lock:
                self.mismatches.append((F, first, second))

    def replay(self) -> None:
        """Re-evaluate every remembered input once, in a fixed (byte) order."""
        with self._lock:
            items = sorted(self._memo.items(), key=lambda kv: kv[0])
        for _, (F, out) in items:
            self._note(F, out, self.inner(F))


class NormalizedMap(MapUnderTest):
    """``T'(F) = T(F) - T(0)``."""

    def __init__(self, base: MapUnderTest, offset: VectorFunction):
        super().__init__(base.domain, base.codomain, base.model, base.evaluator, base.name)
        self.base = base
        self.offset = offset

    def __call__(self, F: VectorFunction) -> VectorFunction:
        return self.base(F) - self.offset

    def fresh(self, F: VectorFunction) -> VectorFunction:
        return getattr(self.base, "fresh", self.base)(F) - self.offset


def normalize(T: MapUnderTest) -> tuple[VectorFunction, NormalizedMap]:
    offset = T(VectorFunction.zero(T.domain, T.model))
    return offset, NormalizedMap(T, offset)


@dataclass
class Witness:
    kind: str
    payload: dict

    def to_json(self) -> dict:
        return {"kind": self.kind, "payload": to_jsonable(self.payload)}


# ---------------------------------------------------------------------------
# range preservation


@dataclass
class RangeCheck:
    passed: bool
    max_distance: float
    checked: int
    witness: Witness | None = None
    nonexpansive_excess: float = 0.0
    nonexpansive_excess_all: float = 0.0
    passed_pairs: list[int] = field(default_factory=list)


def _pair_result(T: MapUnderTest, F: VectorFunction, G: VectorFunction):
    TF = T(F)
    if F.key() == G.key():
        TG = getattr(T, "fresh", T)(G)
    else:
        TG = T(G)
    D = (F - G).values
    TD = (TF - TG).values
    ny, nx, d = TD.shape[0], D.shape[0], D.shape[1]
    diffs = (TD[:, None, :] - D[None, :, :]).reshape(-1, d)
    dist = T.model.gauge_rows(diffs).reshape(ny, nx).min(axis=1)
    excess = max(
        float(p.evaluate_rows(TD).max() - p.evaluate_rows(D).max()) for p in T.model.seminorms
    )
    return dist, excess


def range_distances(T: MapUnderTest, F: VectorFunction, G: VectorFunction) -> np.ndarray:
    """Per ``y``, the gauge distance from ``(TF - TG)(y)`` to ``Ran(F - G)``."""
    TD = T(F) - T(G)
    R = range_of(F - G)
    return np.array([range_contains(R, TD.values[i]).distance for i in range(len(TD.space))])


def check_range_preservation(
    T: MapUnderTest,
    pairs: Sequence[tuple[VectorFunction, VectorFunction]],
    tol: float = DEFAULT_TOL,
    workers: int = 1,
) -> RangeCheck:
    """Check ``Ran(TF - TG) in Ran(F - G)`` on every pair; the first failure is the witness.

    Pairs with ``F == G`` re-evaluate ``T`` without memoization, so an impure
    evaluator shows up as a nonzero difference.
    """
    if not pairs:
        raise ValueError("need at least one pair")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda fg: _pair_result(T, *fg), pairs))
    else:
        results = [_pair_result(T, F, G) for F, G in pairs]

    out = RangeCheck(True, 0.0, len(pairs))
    excess_ok = -np.inf
    excess_all = -np.inf
    for i, ((F, G), (dist, excess)) in enumerate(zip(pairs, results)):
        out.max_distance = max(out.max_distance, float(dist.max()))
        excess_all = max(excess_all, excess)
        if dist.max() <= tol:
            out.passed_pairs.append(i)
            excess_ok = max(excess_ok, excess)
        elif out.witness is None:
            yi = int(np.argmax(dist > tol))
            out.passed = False
            out.witness = Witness(
                "range-violation",
                {"F": F, "G": G, "y": T.codomain.labels[yi], "distance": float(dist[yi])},
            )
    out.nonexpansive_excess = max(0.0, float(excess_ok))
    out.nonexpansive_excess_all = max(0.0, float(excess_all))
    return out


def sample_pairs(
    space: FiniteSpace,
    model: VectorSpaceModel,
    seed: int,
    count: int = 256,
    integer: bool = False,
) -> list[tuple[VectorFunction, VectorFunction]]:
    """Structured pairs first (against zero, self-pairs, indicator pairs), then random ones."""
    rng = np.random.default_rng([seed, 1])
    pool = function_pool(space, model, rng, n_random=16, integer=integer)
    zero = pool[0]
    n_ind = len(space) * model.dimension
    indicators = pool[1 : 1 + n_ind]
    pairs = [(P, zero) for P in pool[1:]]
    pairs += [(P, P) for P in pool[1:4]]
    pairs += [(a, b) for a in indicators for b in indicators if a is not b]
    pairs = pairs[:count]
    while len(pairs) < count:
        if rng.uniform() < 0.5:
            i, j = rng.integers(len(pool), size=2)
            pairs.append((pool[i], pool[j]))
        else:
            pairs.append(
                (random_function(space, model, rng, integer), random_function(space, model, rng, integer))
            )
    return pairs


# ---------------------------------------------------------------------------
# scalar actions and symbol extraction


def _require_nonzero(u: Any, model: VectorSpaceModel) -> np.ndarray:
    u = as_vector(u, model.dimension)
    if not u.any():
        raise ValueError("the probe vector must be nonzero")
    return u


def _action_rows(T: MapUnderTest, u: np.ndarray, f: ScalarFunction) -> tuple[np.ndarray, np.ndarray]:
    V = T(tensor(f, u, T.model)).values
    g = (V @ np.conj(u)) / float(np.vdot(u, u).real)
    resid = T.model.gauge_rows(V - np.outer(g, u))
    return g, resid


def scalar_action(T: MapUnderTest, u: Any, f: ScalarFunction) -> tuple[ScalarFunction, float]:
    """Coefficient ``g`` with ``T(f (x) u)(y) ~ g(y) u`` and the colinearity residual.

    ``g(y)`` is the orthogonal projection coefficient of ``T(f (x) u)(y)`` on
    ``u``; the residual is the largest gauge of what the projection leaves out.
    """
    u = _require_nonzero(u, T.model)
    g, resid = _action_rows(T, u, f)
    return ScalarFunction(T.codomain, g), float(resid.max())


@dataclass
class FunctionalResiduals:
    linearity: np.ndarray
    multiplicativity: np.ndarray
    unitality: np.ndarray
    worst: dict

    def at(self, index: int) -> dict:
        return {
            "linearity": float(self.linearity[index]),
            "multiplicativity": float(self.multiplicativity[index]),
            "unitality": float(self.unitality[index]),
        }


LAMBDAS = (1.0, 1j, -1.0, 2.0, 1 + 1j)


def default_function_pairs(fs: Sequence[ScalarFunction], limit: int = 8) -> list[tuple[int, int]]:
    m = min(len(fs), limit)
    head = [(i, j) for i in range(m) for j in range(i, m)]
    tail = [(i, (i + 1) % len(fs)) for i in range(m, len(fs))]
    return head + tail


def point_functional_residuals(
    T: MapUnderTest,
    u: Any,
    fs: Sequence[ScalarFunction],
    pairs: Sequence[tuple[int, int]] | None = None,
    lams: Sequence[complex] = LAMBDAS,
) -> FunctionalResiduals:
    """Residuals of ``delta_y = (f -> g_f(y))`` being linear, multiplicative, unital, for every ``y``."""
    u = _require_nonzero(u, T.model)
    if pairs is None:
        pairs = default_function_pairs(fs)
    ny = len(T.codomain)
    delta = {}

    def d(f: ScalarFunction) -> np.ndarray:
        k = f.key()
        if k not in delta:
            delta[k] = _action_rows(T, u, f)[0]
        return delta[k]

    lin = np.zeros(ny)
    mult = np.zeros(ny)
    worst: dict = {"linearity": None, "multiplicativity": None}
    for n, (i, j) in enumerate(pairs):
        f, g = fs[i], fs[j]
        lam = complex(lams[n % len(lams)])
        r = np.abs(d(f + lam * g) - d(f) - lam * d(g))
        if r.max() > lin.max():
            worst["linearity"] = {"f": f, "g": g, "lambda": lam, "y": int(np.argmax(r))}
        lin = np.maximum(lin, r)
        r = np.abs(d(f * g) - d(f) * d(g))
        if r.max() > mult.max():
            worst["multiplicativity"] = {"f": f, "g": g, "y": int(np.argmax(r))}
        mult = np.maximum(mult, r)
    unit = np.abs(d(ScalarFunction.constant(T.domain, 1.0)) - 1.0)
    worst["unitality"] = {"y": int(np.argmax(unit))}
    return FunctionalResiduals(lin, mult, unit, worst)


def check_point_functional(
    T: MapUnderTest,
    u: Any,
    y: str,
    fs: Sequence[ScalarFunction],
    pairs: Sequence[tuple[int, int]] | None = None,
    lams: Sequence[complex] = LAMBDAS,
) -> dict:
    res = point_functional_residuals(T, u, fs, pairs, lams)
    return res.at(T.codomain.index(y))


@dataclass
class Extraction:
    symbol: Symbol | None
    probes: np.ndarray  # g_{1_x}(y), shape (|Y|, |X|)
    colinearity: float
    ambiguous: list[str]
    witness: Witness | None = None
    resolved: dict[str, str] = field(default_factory=dict)  # every unambiguous y

    def nearest(self, T: MapUnderTest, tol: float) -> Symbol | None:
        """Best indicator-pattern match per ``y``; ``None`` if any ``y`` is tied."""
        if self.symbol is not None:
            return self.symbol
        nx = self.probes.shape[1]
        idx = []
        for row in self.probes:
            disc = np.array([np.abs(row - np.eye(nx)[k]).max() for k in range(nx)])
            best = disc.min()
            winners = np.flatnonzero(disc <= best + max(tol, 1e-12))
            if len(winners) != 1:
                return None
            idx.append(int(winners[0]))
        return Symbol.from_indices(T.domain, T.codomain, idx)


def extract_symbol(T: MapUnderTest, u: Any, tol: float = DEFAULT_TOL) -> Extraction:
    """Locate ``phi(y)`` as the unique ``x`` with ``g_{1_x}(y) = 1`` and all other probes ``0``.

    Zero or several candidates at some ``y`` produce an ambiguity witness
    listing every probe value; ties are never broken.
    """
    u = _require_nonzero(u, T.model)
    X, Y = T.domain, T.codomain
    probes = np.zeros((len(Y), len(X)), dtype=complex)
    colin = 0.0
    for k, x in enumerate(X.labels):
        g, resid = _action_rows(T, u, ScalarFunction.indicator(X, x))
        probes[:, k] = g
        colin = max(colin, float(resid.max()))
    table: dict[str, str] = {}
    ambiguous: list[str] = []
    for i, y in enumerate(Y.labels):
        row = probes[i]
        ones = np.abs(row - 1.0) <= tol
        zeros = np.abs(row) <= tol
        cands = np.flatnonzero(ones)
        if len(cands) == 1 and np.all(zeros | ones) and zeros.sum() == len(X) - 1:
            table[y] = X.labels[int(cands[0])]
        else:
            ambiguous.append(y)
    if ambiguous:
        y = ambiguous[0]
        row = probes[Y.index(y)]
        witness = Witness(
            "ambiguity",
            {"u": u, "y": y, "candidates": {x: row[k] for k, x in enumerate(X.labels)}},
        )
        return Extraction(None, probes, colin, ambiguous, witness, table)
    return Extraction(Symbol(X, Y, table), probes, colin, [], None, table)


def probe_vectors(dim: int) -> list[np.ndarray]:
    """``e_1``, ``2 e_1``, the other basis vectors and ``e_1 + e_2``.

    Both dependent and independent pairs are present whenever ``dim >= 2``.
    """
    us = [basis_vector(dim, 0), 2.0 * basis_vector(dim, 0)]
    us += [basis_vector(dim, k) for k in range(1, dim)]
    if dim >= 2:
        us.append(basis_vector(dim, 0) + basis_vector(dim, 1))
    return us


@dataclass
class UIndependence:
    residual: float
    witness: Witness | None = None


def check_u_independence(
    T: MapUnderTest, us: Sequence[Any], fs: Sequence[ScalarFunction], tol: float = DEFAULT_TOL
) -> UIndependence:
    """Largest ``|g_{u,f}(y) - g_{v,f}(y)|`` over probe pairs, functions and points."""
    if len(us) < 2:
        raise ValueError("need at least two probe vectors")
    us = [_require_nonzero(u, T.model) for u in us]
    acts = [[_action_rows(T, u, f)[0] for f in fs] for u in us]
    best = 0.0
    witness = None
    for a in range(len(us)):
        for b in range(a + 1, len(us)):
            for k, f in enumerate(fs):
                r = np.abs(acts[a][k] - acts[b][k])
                m = float(r.max())
                if m > best:
                    best = m
                if m > tol and witness is None:
                    yi = int(np.argmax(r > tol))
                    witness = Witness(
                        "u-dependence",
                        {"u": us[a], "v": us[b], "f": f, "y": T.codomain.labels[yi], "residual": float(r[yi])},
                    )
    return UIndependence(best, witness)


def check_tensor_additivity(
    T: MapUnderTest, f: ScalarFunction, u: Any, g: ScalarFunction, v: Any
) -> float:
    """Uniform gauge of ``T(f (x) u + g (x) v) - T(f (x) u) - T(g (x) v)``."""
    fu = tensor(f, u, T.model)
    gv = tensor(g, v, T.model)
    diff = T(fu + gv) - T(fu) - T(gv)
    return float(T.model.gauge_rows(diff.values).max())


@dataclass
class RepresentationCheck:
    residual: float
    F: VectorFunction | None = None
    y: str | None = None


def verify_composition(
    T: MapUnderTest,
    phi: Symbol,
    offset: VectorFunction,
    samples: Sequence[VectorFunction],
    tol: float = DEFAULT_TOL,
) -> RepresentationCheck:
    """Max over samples, points and seminorms of ``p(TF(y) - offset(y) - F(phi(y)))``."""
    worst = RepresentationCheck(0.0)
    for F in samples:
        r = T.model.gauge_rows((T(F) - offset - compose(F, phi)).values)
        i = int(np.argmax(r))
        if r[i] > worst.residual or worst.F is None:
            worst = RepresentationCheck(float(r[i]), F, T.codomain.labels[i])
    return worst


def representation_samples(
    space: FiniteSpace, model: VectorSpaceModel, seed: int, count: int, integer: bool
) -> list[VectorFunction]:
    rng = np.random.default_rng([seed, 2])
    out = [VectorFunction.zero(space, model)]
    for x in space.labels:
        for k in range(model.dimension):
            out.append(tensor(ScalarFunction.indicator(space, x), basis_vector(model.dimension, k), model))
    out += [random_function(space, model, rng, integer) for _ in range(count)]
    return out


# ---------------------------------------------------------------------------
# corollary diagnostics


def preimage_construct(phi: Symbol, offset: VectorFunction, H: VectorFunction) -> VectorFunction:
    """``F`` on ``X`` with ``F o phi + offset = H``, extended by zero off ``phi(Y)``."""
    inj = symbol_is_injective(phi)
    if not inj:
        raise ValueError(f"symbol is not injective: {inj.collision} collide")
    if H.space != phi.source or offset.space != phi.source:
        raise ValueError("H and offset must live on the symbol's source space")
    vals = np.zeros((len(phi.target), H.model.dimension), dtype=complex)
    target = (H - offset).values
    for i, y in enumerate(phi.source.labels):
        vals[phi.target.index(phi.table[y])] = target[i]
    F = VectorFunction(phi.target, H.model, vals)
    if not (compose(F, phi) + offset).equals(H, 0.0):
        # extension by zero is exact unless offset arithmetic rounds
        F_check = compose(F, phi) + offset
        if not F_check.equals(H, 1e-12 * (1 + H.model.gauge_rows(H.values).max())):
            raise ArithmeticError("constructed preimage does not reproduce H")
    return F


def _set_distance(model: VectorSpaceModel, A: np.ndarray, B: np.ndarray) -> float:
    """Largest gauge distance from a row of ``A`` to the rows of ``B``."""
    d = A.shape[1]
    diffs = (A[:, None, :] - B[None, :, :]).reshape(-1, d)
    return float(model.gauge_rows(diffs).reshape(A.shape[0], B.shape[0]).min(axis=1).max())


def _reverse_inclusion_distance(T: MapUnderTest, F: VectorFunction, G: VectorFunction) -> float:
    """Largest distance from a value of ``F - G`` to ``Ran(TF - TG)``."""
    return _set_distance(T.model, (F - G).values, (T(F) - T(G)).values)


def corollary_diagnostics(
    T: MapUnderTest,
    phi: Symbol,
    offset: VectorFunction,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    spot_pairs: int = 64,
    integer: bool = False,
) -> dict:
    """Injectivity/surjectivity of ``T`` read off ``phi``, each backed by a concrete construction."""
    X, Y, model = T.domain, T.codomain, T.model
    e1 = basis_vector(model.dimension, 0)
    out: dict[str, Any] = {}

    surj = symbol_is_surjective(phi)
    out["T_injective"] = surj
    out["range_equality"] = surj
    if not surj:
        x0 = missed_points(phi)[0]
        F = tensor(ScalarFunction.indicator(X, x0), e1, model)
        TF = T(F)
        out["injectivity_witness"] = {
            "x0": x0,
            "F": F,
            "TF_equals_offset": TF.equals(offset, tol),
            "F_nonzero": bool(F.values.any()),
        }
    else:
        out["injectivity_witness"] = None

    pairs = sample_pairs(X, model, seed + 7, spot_pairs, integer)
    reverse_failures = 0
    forward_failures = 0
    for F, G in pairs:
        TD, D = (T(F) - T(G)).values, (F - G).values
        if _set_distance(model, D, TD) > tol:
            reverse_failures += 1
        if _set_distance(model, TD, D) > tol:
            forward_failures += 1
    spot: dict[str, Any] = {
        "pairs": len(pairs),
        "forward_failures": forward_failures,
        "reverse_failures": reverse_failures,
    }
    if surj:
        spot["consistent"] = reverse_failures == 0 and forward_failures == 0
    else:
        F = out["injectivity_witness"]["F"]
        zero = VectorFunction.zero(X, model)
        spot["witness_pair_reverse_distance"] = _reverse_inclusion_distance(T, F, zero)
        spot["consistent"] = spot["witness_pair_reverse_distance"] > tol and forward_failures == 0
    out["range_equality_spot_check"] = spot

    inj = symbol_is_injective(phi)
    out["T_surjective"] = inj.injective
    rng = np.random.default_rng([seed, 3])
    if inj:
        worst = 0.0
        n = 8
        for _ in range(n):
            H = random_function(Y, model, rng, integer)
            F = preimage_construct(phi, offset, H)
            worst = max(worst, T(F).distance(H))
        out["surjectivity_witness"] = None
        out["preimage_checks"] = {"count": n, "max_residual": worst, "exact": worst <= tol}
    else:
        y1, y2 = inj.collision
        H = offset + tensor(ScalarFunction.indicator(Y, y1), e1, model)
        samples = representation_samples(X, model, seed, 16, integer)
        nearest = min(T(F).distance(H) for F in samples)
        out["surjectivity_witness"] = {
            "y1": y1,
            "y2": y2,
            "H": H,
            "min_distance_from_samples": nearest,
            "attained": nearest <= tol,
        }
        out["preimage_checks"] = None
    return out


# ---------------------------------------------------------------------------
# the full pipeline


@dataclass
class AnalysisConfig:
    seed: int = 0
    tol: float = DEFAULT_TOL
    pairs: int = 256
    scalar_samples: int = 8
    verify_samples: int = 48
    spot_pairs: int = 64
    integer_samples: bool | None = None
    workers: int = 1

    @property
    def integer(self) -> bool:
        return self.tol == 0.0 if self.integer_samples is None else self.integer_samples

    def to_json(self) -> dict:
        # worker count is deliberately left out: reports must not depend on it
        return {
            "seed": self.seed,
            "tol": self.tol,
            "pairs": self.pairs,
            "scalar_samples": self.scalar_samples,
            "verify_samples": self.verify_samples,
            "spot_pairs": self.spot_pairs,
            "integer_samples": self.integer,
        }


@dataclass
class ExtractionResult:
    offset: VectorFunction | None
    symbol: Symbol | None
    probe_u: np.ndarray
    residuals: dict
    nearest_symbol: Symbol | None = None
    resolved: dict[str, str] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "resolved": dict(self.resolved),
            "offset": enc_function(self.offset) if self.offset is not None else None,
            "symbol": enc_symbol(self.symbol) if self.symbol is not None else None,
            "nearest_symbol": enc_symbol(self.nearest_symbol) if self.nearest_symbol is not None else None,
            "probe_u": enc_vector(self.probe_u),
            "residuals": to_jsonable(self.residuals),
        }


@dataclass
class AnalysisReport:
    verdict: str
    extraction: ExtractionResult
    witnesses: list[Witness]
    corollary: dict | None
    config: AnalysisConfig
    range_check: RangeCheck | None = None

    @property
    def consistent(self) -> bool:
        return self.verdict == COMPOSITION_CONSISTENT

    def witness_kinds(self) -> list[str]:
        return [w.kind for w in self.witnesses]

    def to_json(self) -> dict:
        ext = self.extraction.to_json()
        return {
            "verdict": self.verdict,
            "offset": ext["offset"],
            "symbol": ext["symbol"],
            "extraction": ext,
            "residuals": ext["residuals"],
            "witnesses": [w.to_json() for w in self.witnesses],
            "corollary": to_jsonable(self.corollary) if self.corollary is not None else None,
            "config": self.config.to_json(),
            "tool": {"name": "rangemaps", "version": __version__},
        }


def classify(T: MapUnderTest, config: AnalysisConfig | None = None) -> AnalysisReport:
    """Run the whole pipeline on ``T`` and return a deterministic report."""
    config = config or AnalysisConfig()
    tol = config.tol
    rec = RecordingMap(T)
    X, Y, model = T.domain, T.codomain, T.model
    u0 = basis_vector(model.dimension, 0)
    witnesses: list[Witness] = []
    residuals: dict[str, Any] = {
        "range": None,
        "colinearity": None,
        "linearity": None,
        "multiplicativity": None,
        "unitality": None,
        "u_independence": None,
        "additivity": None,
        "representation": None,
        "nonexpansive_excess": None,
        "nonexpansive_excess_all": None,
    }
    offset = None
    symbol = None
    nearest = None
    resolved: dict[str, str] = {}
    range_check = None

    try:
        offset, Tn = normalize(rec)

        pairs = sample_pairs(X, model, config.seed, config.pairs, config.integer)
        range_check = check_range_preservation(rec, pairs, tol, config.workers)
        residuals["range"] = range_check.max_distance
        residuals["nonexpansive_excess"] = range_check.nonexpansive_excess
        residuals["nonexpansive_excess_all"] = range_check.nonexpansive_excess_all
        if range_check.witness is not None:
            witnesses.append(range_check.witness)

        rng = np.random.default_rng([config.seed, 4])
        fs = scalar_family(X, rng, config.scalar_samples, config.integer)
        us = probe_vectors(model.dimension)

        colin = 0.0
        colin_w = None
        for u in us:
            for f in fs:
                _, resid = _action_rows(Tn, u, f)
                colin = max(colin, float(resid.max()))
                if colin_w is None and resid.max() > tol:
                    yi = int(np.argmax(resid > tol))
                    colin_w = Witness(
                        "colinearity",
                        {"u": u, "f": f, "y": Y.labels[yi], "residual": float(resid[yi])},
                    )
        residuals["colinearity"] = colin
        if colin_w is not None:
            witnesses.append(colin_w)

        ext = extract_symbol(Tn, u0, tol)
        symbol = ext.symbol
        resolved = ext.resolved
        if ext.witness is not None:
            witnesses.append(ext.witness)

        pf = point_functional_residuals(Tn, u0, fs)
        residuals["linearity"] = float(pf.linearity.max())
        residuals["multiplicativity"] = float(pf.multiplicativity.max())
        residuals["unitality"] = float(pf.unitality.max())
        for prop in ("linearity", "multiplicativity", "unitality"):
            if residuals[prop] > tol:
                probe = dict(pf.worst[prop])
                yi = probe.pop("y")
                witnesses.append(
                    Witness(
                        "point-functional",
                        {"u": u0, "y": Y.labels[yi], "property": prop, "residuals": pf.at(yi), "probe": probe},
                    )
                )
                break

        ui = check_u_independence(Tn, us, fs, tol)
        residuals["u_independence"] = ui.residual
        if ui.witness is not None:
            witnesses.append(ui.witness)

        add = 0.0
        add_w = None
        dims = model.dimension
        probe_pairs = [(us[0], us[1])]
        if dims >= 2:
            probe_pairs += [(us[0], basis_vector(dims, 1)), (basis_vector(dims, 1), us[-1])]
        for a, (u, v) in enumerate(probe_pairs):
            for i in range(len(fs)):
                f, g = fs[i], fs[(i + 1 + a) % len(fs)]
                r = check_tensor_additivity(Tn, f, u, g, v)
                add = max(add, r)
                if r > tol and add_w is None:
                    add_w = Witness("additivity", {"f": f, "u": u, "g": g, "v": v, "residual": r})
        residuals["additivity"] = add
        if add_w is not None:
            witnesses.append(add_w)

        nearest = ext.nearest(Tn, tol)
        if nearest is not None:
            samples = representation_samples(X, model, config.seed, config.verify_samples, config.integer)
            rep = verify_composition(rec, nearest, offset, samples, tol)
            residuals["representation"] = rep.residual
            if rep.residual > tol:
                witnesses.append(
                    Witness(
                        "representation",
                        {"F": rep.F, "y": rep.y, "symbol": nearest, "offset": offset, "residual": rep.residual},
                    )
                )

        rec.replay()
        if rec.mismatches:
            F, first, second = min(rec.mismatches, key=lambda m: m[0].key())
            witnesses.append(Witness("purity", {"F": F, "first": first, "second": second}))
    except EvaluatorError as exc:
        witnesses.append(Witness("evaluator-error", {"message": str(exc), "F": exc.F}))

    finite = [v for v in residuals.values() if isinstance(v, float)]
    all_small = all(
        residuals[k] is not None and residuals[k] <= tol
        for k in (
            "range",
            "colinearity",
            "linearity",
            "multiplicativity",
            "unitality",
            "u_independence",
            "additivity",
            "representation",
        )
    )
    assert all(v >= 0 for v in finite)
    consistent = not witnesses and symbol is not None and all_small
    verdict = COMPOSITION_CONSISTENT if consistent else VIOLATED

    corollary = None
    if consistent:
        corollary = corollary_diagnostics(
            T, symbol, offset, tol, config.seed, config.spot_pairs, config.integer
        )

    extraction = ExtractionResult(
        offset, symbol, u0, residuals, nearest if symbol is None else None, resolved
    )
    return AnalysisReport(verdict, extraction, witnesses, corollary, config, range_check)


def extract(T: MapUnderTest, config: AnalysisConfig | None = None) -> ExtractionResult:
    """Offset and symbol only, without the range and structure checks."""
    config = config or AnalysisConfig()
    offset, Tn = normalize(T)
    ext = extract_symbol(Tn, basis_vector(T.model.dimension, 0), config.tol)
    residuals = {"colinearity": ext.colinearity, "ambiguous_points": ext.ambiguous}
    nearest = ext.nearest(Tn, config.tol) if ext.symbol is None else None
    return ExtractionResult(offset, ext.symbol, basis_vector(T.model.dimension, 0), residuals, nearest, ext.resolved)


# ---------------------------------------------------------------------------
# witness replay


def replay_witness(T: MapUnderTest, w: Witness, tol: float = DEFAULT_TOL) -> bool:
    """Re-evaluate a witness payload against ``T``; True iff it still exhibits a failure."""
    p = w.payload
    Y = T.codomain
    if w.kind == "evaluator-error":
        try:
            T(p["F"])
        except EvaluatorError:
            return True
        return False
    if w.kind == "purity":
        return not np.array_equal(p["first"].values, p["second"].values)
    if w.kind == "range-violation":
        dist = range_distances(T, p["F"], p["G"])
        return bool(dist[Y.index(p["y"])] > tol)
    if w.kind == "representation":
        F = p["F"]
        diff = T(F) - p["offset"] - compose(F, p["symbol"])
        return bool(T.model.gauge(diff(p["y"])) > tol)

    _, Tn = normalize(T)
    if w.kind == "colinearity":
        _, resid = _action_rows(Tn, _require_nonzero(p["u"], T.model), p["f"])
        return bool(resid[Y.index(p["y"])] > tol)
    if w.kind == "ambiguity":
        ext = extract_symbol(Tn, p["u"], tol)
        return p["y"] in ext.ambiguous
    if w.kind == "u-dependence":
        gu, _ = _action_rows(Tn, _require_nonzero(p["u"], T.model), p["f"])
        gv, _ = _action_rows(Tn, _require_nonzero(p["v"], T.model), p["f"])
        i = Y.index(p["y"])
        return bool(abs(gu[i] - gv[i]) > tol)
    if w.kind == "additivity":
        return check_tensor_additivity(Tn, p["f"], p["u"], p["g"], p["v"]) > tol
    if w.kind == "point-functional":
        probe = p["probe"]
        u = _require_nonzero(p["u"], T.model)
        i = Y.index(p["y"])

        def d(f: ScalarFunction) -> complex:
            return _action_rows(Tn, u, f)[0][i]

        if p["property"] == "unitality":
            return abs(d(ScalarFunction.constant(T.domain, 1.0)) - 1.0) > tol
        f, g = probe["f"], probe["g"]
        if p["property"] == "linearity":
            lam = probe["lambda"]
            return abs(d(f + lam * g) - d(f) - lam * d(g)) > tol
        return abs(d(f * g) - d(f) * d(g)) > tol
    raise ValueError(f"unknown witness kind {w.kind!r}")
