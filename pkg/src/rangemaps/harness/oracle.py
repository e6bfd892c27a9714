"""Brute-force symbol recovery, independent of the analyzer's projection and probing code."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ..analyzer import MapUnderTest
from ..funcspace import ScalarFunction, VectorFunction
from ..lcs import DEFAULT_TOL
from ..sampling import random_scalar
from ..space import Symbol

GUARD = 64
N_RANDOM = 50


class OracleGuardError(ValueError):
    pass


@dataclass
class OracleResult:
    scores: np.ndarray  # (|Y|, |X|)
    candidates: list[list[str]]
    symbol: Symbol | None
    tol: float

    def unambiguous_at(self, i: int) -> bool:
        return len(self.candidates[i]) == 1 and self.scores[i].min() <= self.tol

    def to_json(self, T: MapUnderTest) -> dict:
        return {
            "scores": {
                y: {x: float(self.scores[i, j]) for j, x in enumerate(T.domain.labels)}
                for i, y in enumerate(T.codomain.labels)
            },
            "candidates": dict(zip(T.codomain.labels, self.candidates)),
            "symbol": dict(self.symbol.table) if self.symbol is not None else None,
        }


def oracle_extract(
    T: MapUnderTest,
    u=None,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    integer: bool = False,
    n_random: int = N_RANDOM,
) -> OracleResult:
    """Score every (y, x) by ``max_f |g_f(y) - f(x)|`` over indicators and random functions.

    ``g_f`` is the least-squares coefficient of ``T(f (x) u)(y) - T(0)(y)`` on
    ``u``.  The candidate set at ``y`` is the argmin, ties kept.
    """
    X, Y, model = T.domain, T.codomain, T.model
    if len(X) * len(Y) > GUARD:
        raise OracleGuardError(f"|X|*|Y| = {len(X) * len(Y)} exceeds the oracle guard {GUARD}")
    if u is None:
        u = np.eye(model.dimension, dtype=complex)[0]
    u = np.asarray(u, dtype=complex)
    rng = np.random.default_rng([seed, 9])
    family = [ScalarFunction.indicator(X, x) for x in X.labels]
    family += [random_scalar(X, rng, integer) for _ in range(n_random)]

    base = T(VectorFunction.zero(X, model)).values
    scores = np.zeros((len(Y), len(X)))
    for f in family:
        F = VectorFunction(X, model, f.values[:, None] * u[None, :])
        V = T(F).values - base
        coeff, *_ = np.linalg.lstsq(u.reshape(-1, 1), V.T, rcond=None)
        g = coeff.reshape(-1)
        scores = np.maximum(scores, np.abs(g[:, None] - f.values[None, :]))

    tie = max(tol, 1e-12)
    candidates = []
    table = {}
    for i, y in enumerate(Y.labels):
        best = scores[i].min()
        cands = [X.labels[j] for j in np.flatnonzero(scores[i] <= best + tie)]
        candidates.append(cands)
        if len(cands) == 1 and best <= tol:
            table[y] = cands[0]
    symbol = Symbol(X, Y, table) if len(table) == len(Y) else None
    return OracleResult(scores, candidates, symbol, tol)


def compare_extraction(oracle: OracleResult, resolved: Mapping[str, str], T: MapUnderTest) -> dict:
    """Pointwise agreement: both sides unambiguous with equal images, or both ambiguous.

    ``resolved`` maps every point the analyzer resolved to its image.
    """
    rows = []
    agree = True
    for i, y in enumerate(T.codomain.labels):
        o_ok = oracle.unambiguous_at(i)
        a_ok = y in resolved
        same = o_ok == a_ok and (not o_ok or resolved[y] == oracle.candidates[i][0])
        agree &= same
        rows.append(
            {
                "y": y,
                "oracle": oracle.candidates[i] if o_ok else {"ambiguous": oracle.candidates[i]},
                "analyzer": resolved[y] if a_ok else "ambiguous",
                "agree": same,
            }
        )
    return {"agree": agree, "points": rows}
