"""Electron energy-loss spectra from ladder states, kernels and joint states.

Loss index ``l > 0`` means the electron lost ``l`` quanta of ``hbar omega0``;
``l < 0`` means it gained energy. Spectra are stored on a symmetric index
range ``[-L, L]`` with explicit zeros.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .fullspace import JointState
    from .ladder import LadderState
    from .scattering import ScatteringKernel

NORM_TOL = 1e-10


@dataclass(frozen=True)
class EELSSpectrum:
    probabilities: np.ndarray
    hbar_omega0: float = 1.0

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float).reshape(-1)
        if p.size % 2 != 1:
            raise ValueError("spectrum must cover a symmetric loss range [-L, L]")
        if np.any(p < -NORM_TOL):
            raise ValueError("negative probability in spectrum")
        if abs(p.sum() - 1.0) > NORM_TOL:
            raise ValueError(f"spectrum not normalized (sum = {p.sum()!r})")
        p = np.clip(p, 0.0, None)
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)

    @property
    def max_loss(self) -> int:
        return (self.probabilities.size - 1) // 2

    @property
    def losses(self) -> np.ndarray:
        L = self.max_loss
        return np.arange(-L, L + 1)

    @property
    def energies(self) -> np.ndarray:
        """Energy lost by the electron in eV."""
        return self.losses * self.hbar_omega0

    def prob(self, ell: int) -> float:
        L = self.max_loss
        return float(self.probabilities[ell + L]) if -L <= ell <= L else 0.0

    def mean(self) -> float:
        return float(np.dot(self.losses, self.probabilities))

    def std(self) -> float:
        mu = self.mean()
        return math.sqrt(max(float(np.dot((self.losses - mu) ** 2, self.probabilities)), 0.0))

    def padded(self, L: int) -> "EELSSpectrum":
        """Same spectrum on the wider range ``[-L, L]``."""
        if L < self.max_loss:
            raise ValueError("cannot pad to a narrower range")
        extra = L - self.max_loss
        return EELSSpectrum(np.pad(self.probabilities, extra), self.hbar_omega0)


@dataclass(frozen=True)
class ElectronComb:
    """Incoming electron sideband amplitudes ``g_k`` for ``k = offset .. offset + len - 1``."""

    amplitudes: np.ndarray
    offset: int = 0

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if a.size == 0:
            raise ValueError("comb needs at least one tooth")
        if abs(np.sum(np.abs(a) ** 2) - 1.0) > 1e-12:
            raise ValueError("comb amplitudes must be normalized")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def delta(cls) -> "ElectronComb":
        return cls(np.array([1.0 + 0j]))

    @property
    def indices(self) -> np.ndarray:
        return self.offset + np.arange(self.amplitudes.size)

    @property
    def reach(self) -> int:
        return int(np.max(np.abs(self.indices)))

    def amplitude(self, k: int) -> complex:
        i = k - self.offset
        return complex(self.amplitudes[i]) if 0 <= i < self.amplitudes.size else 0j


def spectrum_from_ladder(kernel: "ScatteringKernel", st: "LadderState",
                         hbar_omega0: float = 1.0) -> EELSSpectrum:
    """Spectrum of an unshaped electron; only the ladder populations enter."""
    if kernel.N != st.N:
        raise ValueError(f"kernel is for N={kernel.N}, state has N={st.N}")
    w = st.weights
    p = kernel.D @ (w / w.sum())
    return EELSSpectrum(p / p.sum(), hbar_omega0)


def spectrum_from_joint(j: "JointState", hbar_omega0: float = 1.0) -> EELSSpectrum:
    p = j.electron_probabilities()
    return EELSSpectrum(p / p.sum(), hbar_omega0)


def spectrum_shaped(kernel: "ScatteringKernel", st: "LadderState", comb: ElectronComb,
                    hbar_omega0: float = 1.0) -> EELSSpectrum:
    """Spectrum for a shaped incoming electron and a pure ladder state.

    Paths ending in the same electron sideband and the same final ladder
    state interfere; different final ladder states add incoherently.
    """
    if kernel.N != st.N:
        raise ValueError(f"kernel is for N={kernel.N}, state has N={st.N}")
    N = st.N
    L = N + comb.reach
    c = st.amplitudes
    # amp[n, l' + L] = sum_m g_{l' - (n - m)} c_m s[n, m]
    amp = np.zeros((N + 1, 2 * L + 1), dtype=complex)
    k = comb.indices
    for n in range(N + 1):
        for m in range(N + 1):
            w = c[m] * kernel.s[n, m]
            if w == 0:
                continue
            amp[n, k + (n - m) + L] += w * comb.amplitudes
    p = np.sum(np.abs(amp) ** 2, axis=0)
    return EELSSpectrum(p / p.sum(), hbar_omega0)


def effective_coupling(sp: EELSSpectrum) -> float:
    """``sigma_EELS / (sqrt(2) hbar omega0)``, i.e. std of the loss index over sqrt(2)."""
    return sp.std() / math.sqrt(2.0)


def mixture(spectra, weights) -> EELSSpectrum:
    """Incoherent weighted sum of spectra on a common range."""
    spectra = list(spectra)
    L = max(s.max_loss for s in spectra)
    w = np.asarray(weights, dtype=float)
    p = sum(wi * s.padded(L).probabilities for wi, s in zip(w, spectra))
    return EELSSpectrum(p / p.sum(), spectra[0].hbar_omega0)
