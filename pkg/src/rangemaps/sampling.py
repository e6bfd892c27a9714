"""Seeded sample families of scalars, vectors and functions.

Continuous draws are uniform on the complex box ``[-2, 2]^2``; the integer
family draws real and imaginary parts from ``{-2, ..., 2}`` so that composition
and subtraction stay exact in floating point.
"""

from __future__ import annotations

import numpy as np

from .funcspace import ScalarFunction, VectorFunction, tensor
from .lcs import VectorSpaceModel, basis_vector
from .space import FiniteSpace

BOX = 2.0


def complex_draw(rng: np.random.Generator, shape, integer: bool) -> np.ndarray:
    if integer:
        re = rng.integers(-2, 3, size=shape)
        im = rng.integers(-2, 3, size=shape)
        return (re + 1j * im).astype(complex)
    return rng.uniform(-BOX, BOX, size=shape) + 1j * rng.uniform(-BOX, BOX, size=shape)


def random_scalar(space: FiniteSpace, rng: np.random.Generator, integer: bool = False) -> ScalarFunction:
    return ScalarFunction(space, complex_draw(rng, len(space), integer))


def random_vector(model: VectorSpaceModel, rng: np.random.Generator, integer: bool = False) -> np.ndarray:
    v = complex_draw(rng, model.dimension, integer)
    if not v.any():
        v[0] = 1.0
    return v


def random_function(
    space: FiniteSpace, model: VectorSpaceModel, rng: np.random.Generator, integer: bool = False
) -> VectorFunction:
    return VectorFunction(space, model, complex_draw(rng, (len(space), model.dimension), integer))


def scalar_family(
    space: FiniteSpace, rng: np.random.Generator, n_random: int, integer: bool = False
) -> list[ScalarFunction]:
    """Indicators, the constants 0, 1 and i, ``i`` times indicators, then random draws."""
    fam = [ScalarFunction.indicator(space, x) for x in space.labels]
    fam += [
        ScalarFunction.constant(space, 0.0),
        ScalarFunction.constant(space, 1.0),
        ScalarFunction.constant(space, 1j),
    ]
    fam += [1j * ScalarFunction.indicator(space, x) for x in space.labels]
    fam += [random_scalar(space, rng, integer) for _ in range(n_random)]
    return fam


def function_pool(
    space: FiniteSpace, model: VectorSpaceModel, rng: np.random.Generator, n_random: int, integer: bool = False
) -> list[VectorFunction]:
    """Zero, indicator tensors ``1_x (x) e_k``, constants, tensor products, random tables."""
    d = model.dimension
    pool = [VectorFunction.zero(space, model)]
    for x in space.labels:
        for k in range(d):
            pool.append(tensor(ScalarFunction.indicator(space, x), basis_vector(d, k), model))
    for x in space.labels:
        pool.append(tensor(ScalarFunction.indicator(space, x), 1j * basis_vector(d, 0), model))
    for k in range(d):
        pool.append(VectorFunction.constant(space, model, basis_vector(d, k)))
    pool.append(VectorFunction.constant(space, model, random_vector(model, rng, integer)))
    n_tensor = max(1, n_random // 2)
    for _ in range(n_tensor):
        pool.append(tensor(random_scalar(space, rng, integer), random_vector(model, rng, integer), model))
    for _ in range(n_random - n_tensor):
        pool.append(random_function(space, model, rng, integer))
    return pool
