import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from superradiant_eels.fullspace import ladder_basis, product_vector
from superradiant_eels.ladder import (
    LadderState,
    ProductState,
    excitation_variance,
    ladder_from_pulse,
    mean_excitation,
    product_to_ladder,
)


def random_amplitudes(seed, N):
    r = np.random.default_rng(seed)
    a = r.standard_normal(N + 1) + 1j * r.standard_normal(N + 1)
    return a / np.linalg.norm(a)


@given(st.integers(1, 40), st.integers(0, 2**32 - 1))
def test_json_round_trip_pure(N, seed):
    s = LadderState.pure(random_amplitudes(seed, N))
    back = LadderState.from_json(s.to_json())
    assert back.kind == "pure" and back.N == N
    assert np.array_equal(back.amplitudes, s.amplitudes)


@given(st.integers(1, 40), st.integers(0, 2**32 - 1))
def test_json_round_trip_diagonal(N, seed):
    p = np.random.default_rng(seed).dirichlet(np.ones(N + 1))
    s = LadderState.diagonal(p)
    back = LadderState.from_dict(s.to_dict())
    assert np.array_equal(back.weights, s.weights)


def test_validation():
    with pytest.raises(ValueError):
        LadderState.pure([1.0, 1.0])
    with pytest.raises(ValueError):
        LadderState.diagonal([1.2, -0.2])
    with pytest.raises(ValueError):
        LadderState(3, "pure", np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        LadderState(2, "mixed", np.array([1.0, 0.0, 0.0]))
    with pytest.raises(ValueError):
        LadderState.basis(3, 4)
    with pytest.raises(ValueError):
        LadderState.from_dict({"N": 5, "kind": "diagonal", "p": [1.0, 0.0]})
    with pytest.raises(TypeError):
        LadderState.diagonal([0.5, 0.5]).amplitudes


@given(st.integers(1, 200), st.floats(0.0, 2 * math.pi))
def test_pulse_state_statistics(N, area):
    st_ = ladder_from_pulse(N, area)
    p = math.sin(area / 2) ** 2
    assert np.sum(st_.weights) == pytest.approx(1.0, abs=1e-12)
    assert mean_excitation(st_) == pytest.approx(N * p, abs=1e-9 * N)
    assert excitation_variance(st_) == pytest.approx(N * p * (1 - p), abs=1e-8 * N)


@given(st.integers(1, 9), st.floats(0.0, math.pi), st.floats(-3.0, 3.0), st.integers(0, 2**32 - 1))
def test_pulse_state_equals_product_of_rotations(N, area, offset, seed):
    """Third route: tensor product of single-emitter rotations projected on the ladder."""
    u = np.sort(np.random.default_rng(seed).uniform(0, 20, N))
    prod = ProductState.from_rotation(np.full(N, area), u + offset)
    vec = product_vector(prod)
    B = ladder_basis(N, u)
    coeffs = B.conj().T @ vec
    assert np.linalg.norm(vec - B @ coeffs) < 1e-12  # stays on the ladder
    lad = product_to_ladder(prod, u)
    assert lad is not None
    assert np.allclose(lad.amplitudes, coeffs, atol=1e-12)
    ref = ladder_from_pulse(N, area).amplitudes * np.exp(1j * offset * np.arange(N + 1))
    assert np.allclose(lad.amplitudes, ref, atol=1e-12)


def test_product_leaves_ladder_when_phases_mismatch():
    u = np.array([0.0, 1.0, 2.0])
    s = ProductState(np.full(3, math.pi / 2), np.array([0.0, 1.0, 2.5]))
    assert product_to_ladder(s, u) is None
    s = ProductState(np.array([0.5, 0.6, 0.5]), u)
    assert product_to_ladder(s, u) is None


def test_poles_are_always_on_the_ladder():
    u = np.array([0.0, 1.0, 2.0])
    ground = product_to_ladder(ProductState(np.zeros(3), np.array([0.3, 2.0, -1.0])), u)
    assert ground.weights[0] == pytest.approx(1.0)
    up = product_to_ladder(ProductState(np.full(3, math.pi), np.array([0.3, 2.0, -1.0])), u)
    assert up.weights[-1] == pytest.approx(1.0)


def test_rotation_folds_large_areas():
    s = ProductState.from_rotation(np.array([1.5 * math.pi]), np.array([0.2]))
    assert s.polar[0] == pytest.approx(0.5 * math.pi)
    assert s.azimuth[0] == pytest.approx(0.2 + math.pi)
