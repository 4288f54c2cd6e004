"""Exact electron + N-emitter evolution in the full 2^N emitter space.

The generator ``i sum_i (conj(g_i) sigma+_i b + g_i sigma-_i b^dag)`` conserves
``c = n_exc - l`` (excitations minus electron loss), so the joint state is
stored as one 2^N-vector per charge value: within block ``c`` the electron
sideband of configuration ``x`` is ``popcount(x) - c`` and the shift
operators act implicitly. Bit ``i`` of a configuration index is emitter ``i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .coupling import CouplingSet
from .eels import ElectronComb
from .ladder import LadderState, ProductState
from .special import log_binomials

MAX_FULL_N = 16
TAYLOR_TOL = 1e-14
_MAX_TERMS = 200


class CapacityError(RuntimeError):
    """Requested system is too large for the 2^N simulator."""


def popcounts(N: int) -> np.ndarray:
    x = np.arange(2**N)
    bits = (x[:, None] >> np.arange(N)) & 1
    return bits.sum(axis=1)


def config_bits(N: int) -> np.ndarray:
    x = np.arange(2**N)
    return ((x[:, None] >> np.arange(N)) & 1).astype(float)


@dataclass(frozen=True)
class JointState:
    N: int
    charges: np.ndarray  # (B,)
    amplitudes: np.ndarray  # (2^N, B)

    @property
    def sideband_range(self) -> int:
        pc = popcounts(self.N)
        ell = pc[:, None] - self.charges[None, :]
        nz = np.abs(self.amplitudes) > 0
        reach = int(np.max(np.abs(ell[nz]))) if nz.any() else 0
        return max(self.N, reach)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def amplitude(self, config: int, ell: int) -> complex:
        c = bin(config).count("1") - ell
        idx = np.nonzero(self.charges == c)[0]
        return complex(self.amplitudes[config, idx[0]]) if idx.size else 0j

    def electron_probabilities(self) -> np.ndarray:
        L = self.sideband_range
        pc = popcounts(self.N)
        out = np.zeros(2 * L + 1)
        w = np.abs(self.amplitudes) ** 2
        for b, c in enumerate(self.charges):
            np.add.at(out, pc - c + L, w[:, b])
        return out

    def ladder_projection(self, electron_phases) -> np.ndarray:
        """``<n| psi_c>`` for every ladder index n and block; shape (N+1, B)."""
        basis = ladder_basis(self.N, electron_phases)
        return basis.conj().T @ self.amplitudes


def ladder_basis(N: int, electron_phases) -> np.ndarray:
    """Columns are the ladder states ``|m>`` expanded in configurations; shape (2^N, N+1)."""
    u = np.asarray(electron_phases, dtype=float)
    pc = popcounts(N)
    phase = np.exp(1j * (config_bits(N) @ u))
    norm = np.exp(-0.5 * log_binomials(N))
    B = np.zeros((2**N, N + 1), dtype=complex)
    B[np.arange(2**N), pc] = phase * norm[pc]
    return B


def product_vector(s: ProductState) -> np.ndarray:
    vec = np.ones(1, dtype=complex)
    for t, p in zip(s.polar, s.azimuth):
        q = np.array([math.cos(t / 2), np.exp(1j * p) * math.sin(t / 2)])
        vec = np.kron(q, vec)
    return vec


def ladder_vector(st: LadderState, electron_phases) -> np.ndarray:
    return ladder_basis(st.N, electron_phases) @ st.amplitudes


def generator_matrix(raise_coef: np.ndarray) -> sparse.csr_matrix:
    """Sparse ``i sum_i (k_i sigma+_i + conj(k_i) sigma-_i)`` on the 2^N configurations."""
    N = raise_coef.size
    x = np.arange(2**N)
    rows, cols, vals = [], [], []
    for i, k in enumerate(raise_coef):
        if k == 0:
            continue
        ground = x[((x >> i) & 1) == 0]
        excited = ground | (1 << i)
        rows += [excited, ground]
        cols += [ground, excited]
        vals += [np.full(ground.size, 1j * k), np.full(ground.size, 1j * np.conj(k))]
    if not rows:
        return sparse.csr_matrix((2**N, 2**N), dtype=complex)
    return sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(2**N, 2**N)
    )


def evolve_blocks(X: np.ndarray, raise_coef: np.ndarray) -> np.ndarray:
    """Exact action of the exponentiated generator on the block matrix X.

    Scaling: the generator is divided by 2^j until its 1-norm is below 0.5,
    the truncated Taylor series is applied, and the step is repeated 2^j times.
    """
    norm1 = float(np.sum(np.abs(raise_coef)))
    if norm1 == 0.0:
        return X.copy()
    j = 0
    while norm1 / 2**j >= 0.5:
        j += 1
    A = generator_matrix(raise_coef / 2**j)
    Y = X.copy()
    for _ in range(2**j):
        term = Y
        acc = Y.copy()
        ref = np.linalg.norm(Y)
        for k in range(1, _MAX_TERMS):
            term = (A @ term) / k
            acc += term
            if np.linalg.norm(term) < TAYLOR_TOL * ref:
                break
        else:  # pragma: no cover
            raise ArithmeticError("Taylor series did not converge")
        Y = acc
    return Y


def full_evolution(couplings, initial, electron_phases=None,
                   comb: ElectronComb | None = None) -> JointState:
    """Evolve an emitter state and electron comb through the full 2^N space.

    ``couplings`` is a CouplingSet (or array of complex ``g_i``). Ladder states
    are expanded with ``electron_phases`` (``omega0 z_i / v``), which are
    required for them.
    """
    g = couplings.g if isinstance(couplings, CouplingSet) else np.asarray(couplings, complex)
    N = g.size
    if N > MAX_FULL_N:
        raise CapacityError(f"full-space simulation supports N <= {MAX_FULL_N}; use the ladder path")
    if isinstance(initial, ProductState):
        if initial.N != N:
            raise ValueError("state size does not match couplings")
        psi = product_vector(initial)
    elif isinstance(initial, LadderState):
        if initial.kind != "pure":
            raise TypeError("full-space evolution needs a pure state")
        if electron_phases is None:
            raise ValueError("ladder states need electron_phases for expansion")
        if initial.N != N:
            raise ValueError("state size does not match couplings")
        psi = ladder_vector(initial, electron_phases)
    else:
        psi = np.asarray(initial, dtype=complex).reshape(-1)
        if psi.size != 2**N:
            raise ValueError("raw state vector must have 2^N entries")
    comb = comb or ElectronComb.delta()
    pc = popcounts(N)
    charges = np.arange(-comb.indices.max(), N - comb.indices.min() + 1)
    X = np.zeros((2**N, charges.size), dtype=complex)
    for b, c in enumerate(charges):
        k = pc - c
        inside = (k >= comb.offset) & (k < comb.offset + comb.amplitudes.size)
        X[inside, b] = psi[inside] * comb.amplitudes[k[inside] - comb.offset]
    keep = np.any(X != 0, axis=0)
    charges, X = charges[keep], X[:, keep]
    Y = evolve_blocks(X, np.conj(g))
    return JointState(N, charges, Y)
