import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rangemaps.analyzer import (
    COMPOSITION_CONSISTENT,
    AnalysisConfig,
    MapUnderTest,
    check_range_preservation,
    check_tensor_additivity,
    check_u_independence,
    classify,
    corollary_diagnostics,
    extract_symbol,
    normalize,
    point_functional_residuals,
    preimage_construct,
    probe_vectors,
    range_distances,
    replay_witness,
    sample_pairs,
    scalar_action,
    verify_composition,
)
from rangemaps.codec import dumps
from rangemaps.funcspace import ScalarFunction, VectorFunction, compose, tensor
from rangemaps.harness.instances import ADVERSARIAL_KINDS, EXPECTED_WITNESS, generate, random_instance
from rangemaps.lcs import VectorSpaceModel, basis_vector
from rangemaps.sampling import random_function
from rangemaps.space import FiniteSpace, Symbol

from conftest import vf

AB = FiniteSpace(("a", "b"))
ABC = FiniteSpace(("a", "b", "c"))
P = FiniteSpace(("p",))
PQ = FiniteSpace(("p", "q"))
E1 = VectorSpaceModel.standard(1)
E2 = VectorSpaceModel.standard(2)


def composition_map(X, Y, model, table, offset=None):
    phi = Symbol(X, Y, table)
    off = VectorFunction.zero(Y, model) if offset is None else offset
    return MapUnderTest(X, Y, model, lambda F: compose(F, phi) + off, "composition")


def array_map(X, Y, model, fn):
    return MapUnderTest(X, Y, model, lambda F: fn(F.values), "test map")


# normalize


def test_normalize_examples():
    C0 = vf(PQ, E1, {"p": [3], "q": [-1j]})
    T = composition_map(AB, PQ, E1, {"p": "b", "q": "a"}, C0)
    offset, Tn = normalize(T)
    assert offset.equals(C0)
    F = vf(AB, E1, {"a": [5], "b": [7]})
    assert Tn(F).equals(vf(PQ, E1, {"p": [7], "q": [5]}))

    offset, _ = normalize(composition_map(AB, PQ, E1, {"p": "a", "q": "a"}))
    assert offset.equals(VectorFunction.zero(PQ, E1))

    K = vf(PQ, E1, {"p": [1], "q": [2]})
    offset, Tn = normalize(MapUnderTest(AB, PQ, E1, lambda F: K))
    assert offset.equals(K) and Tn(F).equals(VectorFunction.zero(PQ, E1))


# range preservation


def test_range_composition_many_pairs():
    C0 = vf(PQ, E2, {"p": [1, 2], "q": [0, 1j]})
    T = composition_map(ABC, PQ, E2, {"p": "c", "q": "a"}, C0)
    res = check_range_preservation(T, sample_pairs(ABC, E2, seed=3, count=1000, integer=True), tol=0.0)
    assert res.passed and res.max_distance == 0.0 and res.checked == 1000


def test_range_constant_map_witness():
    K = vf(PQ, E2, {"p": [4, 4], "q": [1, 0]})
    T = MapUnderTest(AB, PQ, E2, lambda F: K)
    F = tensor(ScalarFunction.constant(AB, 1), basis_vector(2, 0), E2)
    G = VectorFunction.zero(AB, E2)
    res = check_range_preservation(T, [(F, G)], tol=1e-9)
    assert not res.passed
    w = res.witness
    assert w.kind == "range-violation" and w.payload["y"] == "p" and w.payload["distance"] == 1.0


def _bumped(phi, y0, eps, trigger):
    i0 = phi.source.index(y0)

    def ev(F):
        out = F.values[phi.indices].copy()
        if trigger(F.values):
            out[i0, 0] += eps
        return out

    return ev


def test_range_perturbed_composition():
    eps = 1e-3
    phi = Symbol(ABC, PQ, {"p": "a", "q": "c"})
    nonconstant = lambda v: bool((v != v[0]).any())  # noqa: E731
    T = MapUnderTest(ABC, PQ, E1, _bumped(phi, "q", eps, nonconstant))
    F = vf(ABC, E1, {"a": [0], "b": [1], "c": [2]})
    zero = VectorFunction.zero(ABC, E1)
    assert check_range_preservation(T, [(F, F)], tol=0.0).passed
    res = check_range_preservation(T, [(F, zero)], tol=1e-4)
    assert not res.passed and res.witness.payload["y"] == "q"
    # oracle: nearest value of F to F(c) + eps
    expected = min(abs(2 + eps - v) for v in (0, 1, 2))
    assert res.witness.payload["distance"] == pytest.approx(expected, abs=1e-15)
    assert check_range_preservation(T, [(F, zero)], tol=1e-2).passed


# scalar action


def test_scalar_action_examples():
    T = composition_map(AB, P, E1, {"p": "b"})
    g, r = scalar_action(T, [2], ScalarFunction.from_mapping(AB, {"a": 3, "b": 4}))
    assert g("p") == 4 and r == 0
    g, r = scalar_action(T, [2], ScalarFunction.constant(AB, 0))
    assert g("p") == 0 and r == 0


def test_scalar_action_rotation():
    R = np.array([[0, -1], [1, 0]])
    T = array_map(AB, P, E2, lambda v: (R @ v[0])[None, :])
    g, r = scalar_action(T, basis_vector(2, 0), ScalarFunction.indicator(AB, "a"))
    # V(p) = e2, projection on e1 is 0, what is left has size 1
    assert g("p") == 0 and r == 1.0


def test_scalar_action_rejects_zero_probe():
    with pytest.raises(ValueError):
        scalar_action(composition_map(AB, P, E1, {"p": "a"}), [0], ScalarFunction.constant(AB, 1))


# point functionals


def test_point_functional_composition_is_exact():
    T = composition_map(ABC, PQ, E1, {"p": "b", "q": "b"})
    fs = [ScalarFunction.indicator(ABC, x) for x in ABC] + [ScalarFunction.from_mapping(ABC, {"a": 2, "b": 1j, "c": -1})]
    res = point_functional_residuals(T, [1], fs)
    assert res.linearity.max() == res.multiplicativity.max() == res.unitality.max() == 0


def test_point_functional_averaging():
    T = array_map(AB, P, E1, lambda v: ((v[0] + v[1]) / 2)[None, :])
    ia = ScalarFunction.indicator(AB, "a")
    res = point_functional_residuals(T, [1], [ia], pairs=[(0, 0)])
    # delta(1_a * 1_a) = 1/2 while delta(1_a)^2 = 1/4
    assert res.multiplicativity[0] == 0.25


def test_point_functional_conjugation():
    T = array_map(AB, P, E1, lambda v: np.conj(v[0])[None, :])
    fs = [ScalarFunction.constant(AB, 0), ScalarFunction.indicator(AB, "a")]
    res = point_functional_residuals(T, [1], fs, pairs=[(0, 1)], lams=[1j])
    assert res.linearity[0] == 2.0


# symbol extraction


def test_extract_composition():
    ext = extract_symbol(composition_map(AB, P, E1, {"p": "b"}), [1], 0.0)
    assert ext.symbol.table == {"p": "b"}
    assert ext.probes.tolist() == [[0, 1]]


def test_extract_averaging_is_ambiguous():
    T = array_map(AB, P, E1, lambda v: ((v[0] + v[1]) / 2)[None, :])
    ext = extract_symbol(T, [1], 1e-9)
    assert ext.symbol is None and ext.ambiguous == ["p"]
    assert ext.witness.kind == "ambiguity"
    assert ext.witness.payload["candidates"] == {"a": 0.5, "b": 0.5}


def test_extract_identity():
    T = MapUnderTest(ABC, ABC, E2, lambda F: F)
    assert extract_symbol(T, basis_vector(2, 0), 0.0).symbol == Symbol.identity(ABC)


# u-independence


def test_u_independence_composition():
    T = composition_map(ABC, PQ, E2, {"p": "c", "q": "a"})
    fs = [ScalarFunction.indicator(ABC, x) for x in ABC]
    res = check_u_independence(T, probe_vectors(2), fs, 0.0)
    assert res.residual == 0 and res.witness is None


def test_u_independence_direction_dependent():
    # coefficient on e1 follows phi1(p) = a, on e2 follows phi2(p) = b
    T = array_map(AB, P, E2, lambda v: np.array([[v[0, 0], v[1, 1]]]))
    res = check_u_independence(T, [basis_vector(2, 0), basis_vector(2, 1)], [ScalarFunction.indicator(AB, "a")], 1e-9)
    assert res.residual == 1.0
    assert res.witness.kind == "u-dependence" and res.witness.payload["y"] == "p"


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_u_independence_scalar_linear_maps(seed):
    # in d = 1 every probe pair is dependent; linear maps then agree exactly up to rounding
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
    T = array_map(ABC, PQ, E1, lambda v: M @ v)
    fs = [ScalarFunction(ABC, rng.normal(size=3) + 1j * rng.normal(size=3)) for _ in range(3)]
    res = check_u_independence(T, [[1], [2], [1j], [1 + 1j]], fs, 1e-9)
    assert res.residual <= 1e-12 * (1 + np.abs(M).sum() * 3)


# additivity


def test_additivity_examples():
    T = composition_map(ABC, PQ, E2, {"p": "c", "q": "c"})
    f = ScalarFunction.from_mapping(ABC, {"a": 1, "b": 2j, "c": -3})
    g = ScalarFunction.indicator(ABC, "c")
    assert check_tensor_additivity(T, f, [1, 2], g, [0, 1j]) == 0


def test_additivity_square_map():
    phi = Symbol(AB, P, {"p": "a"})
    T = MapUnderTest(AB, P, E1, lambda F: (lambda C: C.values + C.values**2)(compose(F, phi)))
    one = ScalarFunction.constant(AB, 1)
    # (2 + 4) - 2 * (1 + 1)
    assert check_tensor_additivity(T, one, [1], one, [1]) == 2.0


def test_additivity_zero_vector():
    T = array_map(AB, P, E1, lambda v: (v[0] ** 3 + 5 * v[1] ** 2)[None, :])
    _, Tn = normalize(T)
    f = ScalarFunction.from_mapping(AB, {"a": 2, "b": -1})
    assert check_tensor_additivity(Tn, f, [1 + 1j], f, [0]) == 0


# representation


def test_verify_composition_exact():
    spec = random_instance("composition", seed=5, nx=4, ny=3, dim=2)
    T = generate(spec)
    samples = [random_function(spec.X, spec.model, np.random.default_rng(i), True) for i in range(200)]
    rep = verify_composition(T, spec.params["symbol"], spec.params["offset"], samples, 0.0)
    assert rep.residual == 0.0


def test_verify_composition_perturbed():
    eps = 1e-3
    phi = Symbol(ABC, PQ, {"p": "a", "q": "c"})
    T = MapUnderTest(ABC, PQ, E1, _bumped(phi, "q", eps, lambda v: bool(v.any())))
    F = vf(ABC, E1, {"a": [0], "b": [1], "c": [2]})
    rep = verify_composition(T, phi, VectorFunction.zero(PQ, E1), [F], 0.0)
    assert rep.residual == pytest.approx(eps, abs=1e-15) and rep.y == "q"


def test_verify_composition_wrong_symbol():
    T = composition_map(ABC, PQ, E1, {"p": "a", "q": "c"})
    wrong = Symbol(ABC, PQ, {"p": "b", "q": "c"})
    samples = [tensor(ScalarFunction.indicator(ABC, x), [1], E1) for x in ABC]
    assert verify_composition(T, wrong, VectorFunction.zero(PQ, E1), samples, 0.0).residual == 1.0


# corollary


def test_corollary_bijective_symbol():
    T = composition_map(AB, PQ, E1, {"p": "a", "q": "b"})
    c = corollary_diagnostics(T, Symbol(AB, PQ, {"p": "a", "q": "b"}), VectorFunction.zero(PQ, E1), 0.0, integer=True)
    assert c["T_injective"] and c["T_surjective"] and c["range_equality"]
    assert c["range_equality_spot_check"]["consistent"]
    assert c["preimage_checks"]["exact"]


def test_corollary_missed_point():
    phi = Symbol(AB, P, {"p": "a"})
    off = vf(P, E2, {"p": [1, -1]})
    T = composition_map(AB, P, E2, {"p": "a"}, off)
    c = corollary_diagnostics(T, phi, off, 0.0, integer=True)
    assert not c["T_injective"] and not c["range_equality"]
    w = c["injectivity_witness"]
    assert w["x0"] == "b" and w["TF_equals_offset"] and w["F_nonzero"]
    assert w["F"].equals(tensor(ScalarFunction.indicator(AB, "b"), basis_vector(2, 0), E2))
    assert c["range_equality_spot_check"]["consistent"]


def test_corollary_collision():
    phi = Symbol(AB, PQ, {"p": "a", "q": "a"})
    T = composition_map(AB, PQ, E1, {"p": "a", "q": "a"})
    c = corollary_diagnostics(T, phi, VectorFunction.zero(PQ, E1), 0.0, integer=True)
    assert not c["T_surjective"]
    w = c["surjectivity_witness"]
    assert (w["y1"], w["y2"]) == ("p", "q")
    assert w["H"].equals(tensor(ScalarFunction.indicator(PQ, "p"), [1], E1))
    assert not w["attained"] and w["min_distance_from_samples"] > 0


# preimage


def test_preimage_examples():
    phi = Symbol(ABC, PQ, {"p": "a", "q": "c"})
    zero = VectorFunction.zero(PQ, E1)
    F = preimage_construct(phi, zero, vf(PQ, E1, {"p": [7], "q": [9]}))
    assert F.equals(vf(ABC, E1, {"a": [7], "b": [0], "c": [9]}))
    off = vf(PQ, E1, {"p": [1j], "q": [2]})
    assert preimage_construct(phi, off, off).equals(VectorFunction.zero(ABC, E1))
    with pytest.raises(ValueError):
        preimage_construct(Symbol(AB, PQ, {"p": "a", "q": "a"}), zero, zero)


# classify


def test_classify_composition_instance():
    spec = random_instance("composition", seed=2, nx=3, ny=3, dim=2)
    rep = classify(generate(spec), AnalysisConfig(tol=0.0))
    phi = spec.params["symbol"]
    assert rep.verdict == COMPOSITION_CONSISTENT
    assert rep.extraction.symbol == phi
    assert rep.extraction.offset.equals(spec.params["offset"])
    for k, v in rep.extraction.residuals.items():
        if k != "nonexpansive_excess_all":
            assert v == 0, k
    from rangemaps.space import symbol_is_injective, symbol_is_surjective

    assert rep.corollary["T_injective"] == symbol_is_surjective(phi)
    assert rep.corollary["T_surjective"] == bool(symbol_is_injective(phi))


def test_classify_averaging():
    T = array_map(AB, P, E1, lambda v: ((v[0] + v[1]) / 2)[None, :])
    rep = classify(T)
    assert rep.verdict == "violated"
    assert {"range-violation", "ambiguity"} <= set(rep.witness_kinds())


def test_classify_rotation():
    R = np.array([[0, -1], [1, 0]])
    T = array_map(AB, P, E2, lambda v: (R @ v[0])[None, :])
    rep = classify(T)
    assert rep.verdict == "violated" and "colinearity" in rep.witness_kinds()


def test_classify_evaluator_error():
    def boom(F):
        raise RuntimeError("no")

    rep = classify(MapUnderTest(AB, P, E1, boom))
    assert rep.witness_kinds() == ["evaluator-error"]
    assert "no" in rep.witnesses[0].payload["message"]


def test_classify_impure_map():
    rng = np.random.default_rng(0)
    T = array_map(AB, P, E1, lambda v: v[:1] + rng.normal())
    rep = classify(T)
    assert rep.verdict == "violated" and "purity" in rep.witness_kinds()


def test_report_json_shape():
    out = classify(composition_map(AB, PQ, E1, {"p": "a", "q": "b"}), AnalysisConfig(tol=0.0)).to_json()
    assert {"verdict", "offset", "symbol", "residuals", "witnesses", "corollary", "config"} <= set(out)
    assert out["symbol"] == {"table": {"p": "a", "q": "b"}}
    json.loads(dumps(out))


# properties


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_round_trip(seed):
    spec = random_instance("composition", seed)
    rep = classify(generate(spec), AnalysisConfig(seed=seed, tol=0.0))
    assert rep.consistent
    assert rep.extraction.symbol == spec.params["symbol"]
    assert rep.extraction.offset.equals(spec.params["offset"], 0.0)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(("composition",) + ADVERSARIAL_KINDS), st.integers(0, 10_000))
def test_non_expansive_on_passing_pairs(kind, seed):
    spec = random_instance(kind, seed)
    tol = 1e-9
    T = generate(spec)
    res = check_range_preservation(T, sample_pairs(spec.X, spec.model, seed, 64), tol)
    assert res.nonexpansive_excess <= tol
    # independent recomputation on the passing pairs
    pairs = sample_pairs(spec.X, spec.model, seed, 64)
    for i in res.passed_pairs[:16]:
        F, G = pairs[i]
        TD = T(F) - T(G)
        for p in spec.model.seminorms:
            lhs = max(p(v) for v in TD.values)
            rhs = max(p(v) for v in (F - G).values)
            assert lhs <= rhs + tol


@pytest.mark.parametrize("kind", ADVERSARIAL_KINDS)
@pytest.mark.parametrize("seed", range(4))
def test_witnesses_replay(kind, seed):
    spec = random_instance(kind, seed)
    T = generate(spec)
    rep = classify(T, AnalysisConfig(seed=seed))
    assert not rep.consistent
    assert EXPECTED_WITNESS[kind] in rep.witness_kinds()
    for w in rep.witnesses:
        assert replay_witness(T, w, 1e-9), w.kind


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_extraction_is_u_invariant(seed):
    spec = random_instance("composition", seed)
    _, Tn = normalize(generate(spec))
    symbols = {extract_symbol(Tn, u, 0.0).symbol for u in probe_vectors(spec.model.dimension)}
    assert symbols == {spec.params["symbol"]}


@pytest.mark.parametrize("kind", ("composition", "averaging", "perturbed-composition"))
def test_concurrent_evaluation_matches_sequential(kind):
    spec = random_instance(kind, 9)
    seq = classify(generate(spec), AnalysisConfig(seed=9, workers=1)).to_json()
    par = classify(generate(spec), AnalysisConfig(seed=9, workers=4)).to_json()
    assert dumps(seq) == dumps(par)


def test_range_distances_matches_brute_force():
    T = array_map(AB, PQ, E1, lambda v: np.array([v[0] * 2, v[1]]))
    F = vf(AB, E1, {"a": [1], "b": [3]})
    G = VectorFunction.zero(AB, E1)
    d = range_distances(T, F, G)
    assert d.tolist() == [min(abs(2 - 1), abs(2 - 3)), 0.0]
