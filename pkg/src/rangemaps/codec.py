"""JSON encodings shared by reports, instance files and the child-process protocol.

Complex scalars are ``[re, im]`` pairs, vectors are arrays of pairs, matrices
are row-major arrays of rows.  Functions are ``{"values": {label: vector}}``.
"""

from __future__ import annotations

import json
from typing import Any, Mapping

import numpy as np

from .funcspace import ScalarFunction, TensorSum, VectorFunction
from .lcs import Bound, Neighborhood, Seminorm, VectorSpaceModel
from .space import FiniteSpace, Symbol


class SpecError(ValueError):
    """Malformed JSON input (bad shape, missing keys, unknown labels)."""


def dumps(obj: Any) -> str:
    """Canonical serialization: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def enc_complex(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def dec_complex(obj: Any) -> complex:
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return complex(obj)
    if isinstance(obj, (list, tuple)) and len(obj) == 2 and all(
        isinstance(t, (int, float)) and not isinstance(t, bool) for t in obj
    ):
        return complex(obj[0], obj[1])
    raise SpecError(f"expected a complex scalar [re, im], got {obj!r}")


def enc_vector(u: Any) -> list[list[float]]:
    return [enc_complex(z) for z in np.asarray(u, dtype=complex).reshape(-1)]


def dec_vector(obj: Any, dim: int | None = None) -> np.ndarray:
    if not isinstance(obj, (list, tuple)) or not obj:
        raise SpecError(f"expected a non-empty vector, got {obj!r}")
    vec = np.array([dec_complex(z) for z in obj], dtype=complex)
    if dim is not None and vec.size != dim:
        raise SpecError(f"expected a vector of dimension {dim}, got {vec.size}")
    return vec


def enc_matrix(a: np.ndarray) -> list[list[list[float]]]:
    return [enc_vector(row) for row in np.asarray(a, dtype=complex)]


def dec_matrix(obj: Any) -> np.ndarray:
    if not isinstance(obj, (list, tuple)) or not obj:
        raise SpecError("expected a non-empty matrix")
    rows = [dec_vector(r) for r in obj]
    if len({r.size for r in rows}) != 1:
        raise SpecError("matrix rows have different lengths")
    return np.vstack(rows)


def enc_space(space: FiniteSpace) -> dict:
    out: dict[str, Any] = {"labels": list(space.labels)}
    if space.metric is not None:
        out["metric"] = space.metric.tolist()
    return out


def dec_space(obj: Any) -> FiniteSpace:
    if not isinstance(obj, Mapping) or "labels" not in obj:
        raise SpecError("a space needs a 'labels' list")
    labels = obj["labels"]
    if not isinstance(labels, list) or not all(isinstance(s, str) for s in labels):
        raise SpecError("space labels must be a list of strings")
    try:
        return FiniteSpace(tuple(labels), obj.get("metric"))
    except ValueError as exc:
        raise SpecError(str(exc)) from exc


def enc_model(model: VectorSpaceModel) -> dict:
    return {
        "dimension": model.dimension,
        "seminorms": [enc_matrix(p.matrix) for p in model.seminorms],
    }


def dec_model(obj: Any) -> VectorSpaceModel:
    if isinstance(obj, int) and not isinstance(obj, bool):
        return VectorSpaceModel.standard(obj)
    if not isinstance(obj, Mapping) or "dimension" not in obj:
        raise SpecError("a model needs a 'dimension'")
    dim = obj["dimension"]
    if not isinstance(dim, int) or dim < 1:
        raise SpecError("model dimension must be a positive integer")
    if "seminorms" not in obj:
        return VectorSpaceModel.standard(dim)
    try:
        model = VectorSpaceModel(dim, tuple(Seminorm(dec_matrix(m)) for m in obj["seminorms"]))
    except ValueError as exc:
        raise SpecError(str(exc)) from exc
    return model


def enc_neighborhood(B: Neighborhood) -> dict:
    return {"bounds": [{"seminorm": b.seminorm, "radius": b.radius} for b in B.bounds]}


def dec_neighborhood(obj: Any, model: VectorSpaceModel) -> Neighborhood:
    if not isinstance(obj, Mapping) or not isinstance(obj.get("bounds"), list):
        raise SpecError("a neighborhood needs a 'bounds' list")
    try:
        bounds = tuple(Bound(int(b["seminorm"]), float(b["radius"])) for b in obj["bounds"])
        return Neighborhood(model, bounds)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise SpecError(f"bad neighborhood: {exc}") from exc


def enc_function(F: VectorFunction) -> dict:
    return {"values": {x: enc_vector(F.values[i]) for i, x in enumerate(F.space.labels)}}


def dec_function(obj: Any, space: FiniteSpace, model: VectorSpaceModel) -> VectorFunction:
    if not isinstance(obj, Mapping) or not isinstance(obj.get("values"), Mapping):
        raise SpecError("a function needs a 'values' object")
    table = obj["values"]
    missing = [x for x in space.labels if x not in table]
    if missing:
        raise SpecError(f"function is not total: missing {missing}")
    extra = [x for x in table if x not in space]
    if extra:
        raise SpecError(f"function has values at unknown points {extra}")
    rows = [dec_vector(table[x], model.dimension) for x in space.labels]
    return VectorFunction(space, model, np.vstack(rows))


def enc_scalar(f: ScalarFunction) -> dict:
    return {x: enc_complex(v) for x, v in zip(f.space.labels, f.values)}


def dec_scalar(obj: Any, space: FiniteSpace) -> ScalarFunction:
    if not isinstance(obj, Mapping):
        raise SpecError("a scalar function is an object mapping labels to scalars")
    missing = [x for x in space.labels if x not in obj]
    if missing:
        raise SpecError(f"scalar function is not total: missing {missing}")
    return ScalarFunction(space, [dec_complex(obj[x]) for x in space.labels])


def enc_symbol(phi: Symbol) -> dict:
    return {"table": dict(phi.table)}


def dec_symbol(obj: Any, target: FiniteSpace, source: FiniteSpace) -> Symbol:
    if not isinstance(obj, Mapping) or not isinstance(obj.get("table"), Mapping):
        raise SpecError("a symbol needs a 'table' object")
    try:
        return Symbol(target, source, dict(obj["table"]))
    except ValueError as exc:
        raise SpecError(str(exc)) from exc


def enc_tensor(S: TensorSum) -> dict:
    return {"terms": [{"f": enc_scalar(f), "u": enc_vector(u)} for f, u in S.terms]}


def dec_tensor(obj: Any, space: FiniteSpace, model: VectorSpaceModel) -> TensorSum:
    if not isinstance(obj, Mapping) or not isinstance(obj.get("terms"), list):
        raise SpecError("a tensor sum needs a 'terms' list")
    terms = []
    for t in obj["terms"]:
        if not isinstance(t, Mapping) or "f" not in t or "u" not in t:
            raise SpecError("each tensor term needs 'f' and 'u'")
        terms.append((dec_scalar(t["f"], space), dec_vector(t["u"], model.dimension)))
    return TensorSum(tuple(terms), model)


def to_jsonable(obj: Any) -> Any:
    """Encode payload values recursively (functions, vectors, symbols, numbers)."""
    if isinstance(obj, VectorFunction):
        return enc_function(obj)
    if isinstance(obj, ScalarFunction):
        return enc_scalar(obj)
    if isinstance(obj, Symbol):
        return enc_symbol(obj)
    if isinstance(obj, np.ndarray):
        return enc_vector(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return enc_complex(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    return obj
