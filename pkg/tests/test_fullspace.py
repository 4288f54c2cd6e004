import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from superradiant_eels.eels import ElectronComb, spectrum_from_joint
from superradiant_eels.fullspace import (
    MAX_FULL_N,
    CapacityError,
    JointState,
    evolve_blocks,
    full_evolution,
    generator_matrix,
    ladder_basis,
    popcounts,
)
from superradiant_eels.ladder import LadderState, ProductState


def random_product(r, N):
    return ProductState(r.uniform(0, math.pi, N), r.uniform(0, 2 * math.pi, N))


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_norm_conserved(N, seed):
    r = np.random.default_rng(seed)
    g = r.uniform(0, 1.2, N) * np.exp(1j * r.uniform(-3, 3, N))
    j = full_evolution(g, random_product(r, N))
    assert j.norm() == pytest.approx(1.0, abs=1e-12)
    assert spectrum_from_joint(j).probabilities.sum() == pytest.approx(1.0, abs=1e-12)


def test_generator_is_anti_hermitian():
    r = np.random.default_rng(1)
    A = generator_matrix(r.standard_normal(5) + 1j * r.standard_normal(5)).toarray()
    assert np.allclose(A, -A.conj().T)


def test_single_emitter_rotation():
    g = 0.7 * np.exp(0.4j)
    X = np.zeros((2, 1), dtype=complex)
    X[0, 0] = 1.0
    Y = evolve_blocks(X, np.array([np.conj(g)]))
    assert Y[0, 0] == pytest.approx(math.cos(0.7))
    assert Y[1, 0] == pytest.approx(1j * np.conj(g) / 0.7 * math.sin(0.7))


def test_no_interaction_keeps_delta():
    st_ = ProductState(np.full(3, 1.0), np.zeros(3))
    sp = spectrum_from_joint(full_evolution(np.zeros(3), st_))
    assert sp.prob(0) == pytest.approx(1.0)


def test_sideband_bookkeeping():
    N = 3
    j = full_evolution(np.full(N, 0.4), LadderState.basis(N, 1), np.zeros(N))
    # loss l and final excitation n satisfy n - l = 1 (initial excitation)
    assert list(j.charges) == [1]
    assert j.amplitude(0b000, -1) == pytest.approx(j.amplitudes[0, 0])
    assert j.amplitude(0b011, 5) == 0


def test_ladder_basis_orthonormal():
    B = ladder_basis(6, np.linspace(0, 5, 6))
    assert np.allclose(B.conj().T @ B, np.eye(7))
    assert np.all(np.abs(B[popcounts(6) == 2, 2]) > 0)


def test_capacity_limit():
    N = MAX_FULL_N + 1
    with pytest.raises(CapacityError):
        full_evolution(np.full(N, 0.1), ProductState(np.zeros(N), np.zeros(N)))


def test_input_validation():
    with pytest.raises(ValueError):
        full_evolution(np.full(2, 0.1), LadderState.basis(2, 1))
    with pytest.raises(TypeError):
        full_evolution(np.full(2, 0.1), LadderState.diagonal([0.5, 0.5, 0.0]), np.zeros(2))
    with pytest.raises(ValueError):
        full_evolution(np.full(2, 0.1), np.ones(3))


def test_comb_charges():
    comb = ElectronComb(np.array([0.6, 0.8]), offset=-1)
    j = full_evolution(np.full(2, 0.2), ProductState(np.zeros(2), np.zeros(2)), comb=comb)
    assert isinstance(j, JointState)
    assert set(j.charges) == {0, 1}
    assert j.electron_probabilities().sum() == pytest.approx(1.0)
