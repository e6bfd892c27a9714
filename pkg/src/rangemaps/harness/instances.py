"""Instance specifications and the map generators behind them.

An instance names the spaces, the model of E and a map kind.  Only the
``composition`` kind is range preserving; every other kind in the catalog is
built so that it is genuinely not an offset plus a composition operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from ..analyzer import MapUnderTest
from ..codec import (
    SpecError,
    dec_function,
    dec_matrix,
    dec_model,
    dec_space,
    dec_symbol,
    enc_function,
    enc_matrix,
    enc_model,
    enc_space,
    enc_symbol,
)
from ..funcspace import VectorFunction
from ..lcs import DEFAULT_TOL, Seminorm, VectorSpaceModel, separating_check
from ..sampling import complex_draw, random_function
from ..space import FiniteSpace, Symbol

SCHEMA = 1

MAP_KINDS = (
    "composition",
    "constant",
    "averaging",
    "rotation",
    "direction-dependent",
    "perturbed-composition",
    "external",
)

ADVERSARIAL_KINDS = ("constant", "averaging", "rotation", "direction-dependent", "perturbed-composition")

EXPECTED_WITNESS = {
    "constant": "range-violation",
    "averaging": "ambiguity",
    "rotation": "colinearity",
    "direction-dependent": "u-dependence",
    "perturbed-composition": "representation",
}

QUARTER_TURN = np.array([[0, -1], [1, 0]], dtype=complex)


@dataclass
class InstanceSpec:
    X: FiniteSpace
    Y: FiniteSpace
    model: VectorSpaceModel
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    tol: float = DEFAULT_TOL

    def __post_init__(self) -> None:
        if self.kind not in MAP_KINDS:
            raise SpecError(f"unknown map kind {self.kind!r}")

    @property
    def is_composition(self) -> bool:
        return self.kind == "composition"

    def to_json(self) -> dict:
        p = self.params
        m: dict[str, Any] = {"kind": self.kind}
        if "symbol" in p:
            m["symbol"] = enc_symbol(p["symbol"])
        if "symbols" in p:
            m["symbols"] = [enc_symbol(s) for s in p["symbols"]]
        if "offset" in p:
            m["offset"] = enc_function(p["offset"])
        if "value" in p:
            m["value"] = enc_function(p["value"])
        if "weights" in p:
            w = p["weights"]
            m["weights"] = {
                y: {x: float(w[i, j]) for j, x in enumerate(self.X.labels) if w[i, j] != 0}
                for i, y in enumerate(self.Y.labels)
            }
        if "matrix" in p:
            m["matrix"] = enc_matrix(p["matrix"])
        for key in ("epsilon", "trigger", "at", "command", "timeout"):
            if key in p:
                m[key] = p[key]
        return {
            "schema": SCHEMA,
            "X": enc_space(self.X),
            "Y": enc_space(self.Y),
            "model": enc_model(self.model),
            "map": m,
            "seed": self.seed,
            "tol": self.tol,
        }

    @classmethod
    def from_json(cls, obj: Any) -> "InstanceSpec":
        if not isinstance(obj, Mapping):
            raise SpecError("an instance must be a JSON object")
        if obj.get("schema") != SCHEMA:
            raise SpecError(f"unsupported or missing schema (expected {SCHEMA})")
        for key in ("X", "Y", "model", "map"):
            if key not in obj:
                raise SpecError(f"instance is missing {key!r}")
        X, Y = dec_space(obj["X"]), dec_space(obj["Y"])
        model = dec_model(obj["model"])
        if not separating_check(model):
            raise SpecError("the seminorm family does not separate points")
        m = obj["map"]
        if not isinstance(m, Mapping) or "kind" not in m:
            raise SpecError("'map' needs a 'kind'")
        kind = m["kind"]
        if kind not in MAP_KINDS:
            raise SpecError(f"unknown map kind {kind!r}")
        params = _decode_params(kind, m, X, Y, model)
        seed = obj.get("seed", 0)
        tol = obj.get("tol", DEFAULT_TOL)
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise SpecError("seed must be an integer")
        if not isinstance(tol, (int, float)) or isinstance(tol, bool) or tol < 0:
            raise SpecError("tol must be a nonnegative number")
        return cls(X, Y, model, kind, params, seed, float(tol))


def _decode_params(kind: str, m: Mapping, X: FiniteSpace, Y: FiniteSpace, model: VectorSpaceModel) -> dict:
    p: dict[str, Any] = {}

    def need(key: str) -> Any:
        if key not in m:
            raise SpecError(f"map kind {kind!r} needs {key!r}")
        return m[key]

    if kind != "external":
        p["offset"] = dec_function(m["offset"], Y, model) if "offset" in m else VectorFunction.zero(Y, model)
    if kind in ("composition", "rotation", "perturbed-composition"):
        p["symbol"] = dec_symbol(need("symbol"), X, Y)
    if kind == "constant":
        p["value"] = dec_function(need("value"), Y, model)
    elif kind == "averaging":
        w = need("weights")
        if not isinstance(w, Mapping):
            raise SpecError("weights must map Y labels to {X label: weight}")
        arr = np.zeros((len(Y), len(X)))
        for i, y in enumerate(Y.labels):
            row = w.get(y)
            if not isinstance(row, Mapping) or not row:
                raise SpecError(f"no weights for point {y!r}")
            for x, val in row.items():
                if x not in X:
                    raise SpecError(f"weight at unknown point {x!r}")
                arr[i, X.index(x)] = float(val)
        if (arr < 0).any() or not np.allclose(arr.sum(axis=1), 1.0):
            raise SpecError("weights must be nonnegative and sum to one per point")
        p["weights"] = arr
    elif kind == "rotation":
        mat = dec_matrix(need("matrix"))
        if mat.shape != (model.dimension, model.dimension):
            raise SpecError("rotation matrix must be d x d")
        p["matrix"] = mat
    elif kind == "direction-dependent":
        syms = need("symbols")
        if not isinstance(syms, list) or len(syms) != model.dimension:
            raise SpecError("direction-dependent maps need one symbol per coordinate")
        p["symbols"] = [dec_symbol(s, X, Y) for s in syms]
    elif kind == "perturbed-composition":
        eps = need("epsilon")
        if not isinstance(eps, (int, float)) or eps <= 0:
            raise SpecError("epsilon must be a positive number")
        p["epsilon"] = float(eps)
        trig = m.get("trigger", "nonzero")
        if trig not in ("nonzero", "nonconstant"):
            raise SpecError("trigger must be 'nonzero' or 'nonconstant'")
        p["trigger"] = trig
        at = m.get("at", Y.labels[0])
        if at not in Y:
            raise SpecError(f"perturbation point {at!r} is not in Y")
        p["at"] = at
    elif kind == "external":
        cmd = need("command")
        if isinstance(cmd, str):
            cmd = [cmd]
        if not isinstance(cmd, list) or not cmd or not all(isinstance(c, str) for c in cmd):
            raise SpecError("command must be a string or a list of strings")
        p["command"] = cmd
        timeout = m.get("timeout", 10.0)
        if not isinstance(timeout, (int, float)) or timeout <= 0:
            raise SpecError("timeout must be positive")
        p["timeout"] = float(timeout)
    return p


def generate(spec: InstanceSpec) -> MapUnderTest:
    """A deterministic evaluator for the named kind."""
    X, Y, model, p = spec.X, spec.Y, spec.model, spec.params
    kind = spec.kind

    if kind == "external":
        from .external import ExternalMap

        ext = ExternalMap(p["command"], Y, model, p["timeout"])
        return MapUnderTest(X, Y, model, ext, name="external")

    off = p["offset"].values

    if kind == "composition":
        idx = p["symbol"].indices

        def ev(F):
            return off + F.values[idx]

    elif kind == "constant":
        K = p["value"].values

        def ev(F):
            return K.copy()

    elif kind == "averaging":
        W = p["weights"]

        def ev(F):
            return off + W @ F.values

    elif kind == "rotation":
        idx = p["symbol"].indices
        R = p["matrix"]

        def ev(F):
            return off + F.values[idx] @ R.T

    elif kind == "direction-dependent":
        idxs = [s.indices for s in p["symbols"]]

        def ev(F):
            out = np.empty((len(Y), model.dimension), dtype=complex)
            for k, idx in enumerate(idxs):
                out[:, k] = F.values[idx, k]
            return off + out

    elif kind == "perturbed-composition":
        idx = p["symbol"].indices
        bump = np.zeros((len(Y), model.dimension), dtype=complex)
        bump[Y.index(p["at"]), 0] = p["epsilon"]
        nonconstant = p["trigger"] == "nonconstant"

        def ev(F):
            v = F.values
            fire = bool((v != v[0]).any()) if nonconstant else bool(v.any())
            out = off + v[idx]
            return out + bump if fire else out

    else:
        raise SpecError(f"unknown map kind {kind!r}")

    return MapUnderTest(X, Y, model, ev, name=kind)


# ---------------------------------------------------------------------------
# seeded instances


def _labels(prefix: str, n: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(n))


def random_model(rng: np.random.Generator, dim: int) -> VectorSpaceModel:
    """Half the time the sup-norm model, otherwise a random integer separating family."""
    if rng.uniform() < 0.5:
        return VectorSpaceModel.standard(dim)
    while True:
        n = int(rng.integers(1, 3))
        mats = [complex_draw(rng, (int(rng.integers(1, dim + 1)), dim), True) for _ in range(n)]
        model = VectorSpaceModel(dim, tuple(Seminorm(m) for m in mats))
        if separating_check(model):
            return model


def random_instance(
    kind: str,
    seed: int,
    nx: int | None = None,
    ny: int | None = None,
    dim: int | None = None,
    integer: bool = True,
    tol: float = DEFAULT_TOL,
    model: VectorSpaceModel | None = None,
) -> InstanceSpec:
    """Seeded instance of a catalog kind with |X| <= 4, |Y| <= 3, d <= 2 unless given.

    Sizes are constrained so that adversarial kinds are never accidentally
    compositions: averaging and direction-dependent maps need two points in X,
    rotation and direction-dependent maps need d = 2.
    """
    if kind not in MAP_KINDS or kind == "external":
        raise SpecError(f"cannot generate kind {kind!r}")
    rng = np.random.default_rng([seed, 11])
    min_x = 2 if kind in ("averaging", "direction-dependent") else 1
    if dim is None:
        dim = 2 if kind in ("rotation", "direction-dependent") else int(rng.integers(1, 3))
    if nx is None:
        nx = int(rng.integers(min_x, 5))
    if ny is None:
        ny = int(rng.integers(1, 4))
    if nx < min_x:
        raise SpecError(f"kind {kind!r} needs |X| >= {min_x}")
    if kind in ("rotation", "direction-dependent") and dim != 2:
        raise SpecError(f"kind {kind!r} needs d = 2")
    X, Y = FiniteSpace(_labels("x", nx)), FiniteSpace(_labels("y", ny))
    if model is None:
        model = random_model(rng, dim)
    phi = Symbol.from_indices(X, Y, rng.integers(nx, size=ny))
    offset = random_function(Y, model, rng, integer)
    params: dict[str, Any] = {"offset": offset}
    if kind == "composition":
        params["symbol"] = phi
    elif kind == "constant":
        params["value"] = random_function(Y, model, rng, integer)
    elif kind == "averaging":
        W = np.zeros((ny, nx))
        for i in range(ny):
            k = int(rng.integers(2, nx + 1))
            W[i, rng.choice(nx, size=k, replace=False)] = 1.0 / k
        params["weights"] = W
    elif kind == "rotation":
        params["symbol"] = phi
        params["matrix"] = QUARTER_TURN.copy()
    elif kind == "direction-dependent":
        idx1 = phi.indices
        idx2 = idx1.copy()
        j = int(rng.integers(ny))
        idx2[j] = (idx1[j] + 1 + int(rng.integers(nx - 1))) % nx
        params["symbols"] = [phi, Symbol.from_indices(X, Y, idx2)]
    elif kind == "perturbed-composition":
        params.update(symbol=phi, epsilon=1e-3, trigger="nonzero", at=Y.labels[int(rng.integers(ny))])
    return InstanceSpec(X, Y, model, kind, params, seed, tol)
