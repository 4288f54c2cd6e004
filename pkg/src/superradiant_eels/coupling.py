"""Electron kinematics, emitter geometry and the electron-emitter coupling.

The coupling of a point-like electron passing an emitter at impact parameter
``r_perp`` is

    g_i = (2 alpha / beta^2) (2 pi / lambda0)
          * (d_perp K1(x) + d_z K0(x) / gamma) * exp(-i omega0 z_i / v),

    x = omega0 r_perp / (gamma v) = 2 pi r_perp / (lambda0 beta gamma),

which is the SI expression with e^2 / (2 pi eps0 hbar) = 2 alpha c folded in
(dipoles in e*nm, lengths in nm).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import ALPHA, C_LIGHT, TWO_PI, energy_to_wavelength, wavelength_to_energy
from .special import bessel_k01

UNIFORM_RTOL = 1e-12


@dataclass(frozen=True)
class ElectronParams:
    beta: float

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"electron speed beta must lie in (0, 1), got {self.beta}")

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt((1.0 - self.beta) * (1.0 + self.beta))

    @property
    def velocity(self) -> float:
        """Speed in nm/fs."""
        return self.beta * C_LIGHT


@dataclass(frozen=True)
class EmitterEnsemble:
    """N identical two-level emitters along the electron trajectory (z axis).

    Construct with either ``lambda0`` (nm) or ``hbar_omega0`` (eV).
    """

    positions: np.ndarray
    impact_params: np.ndarray
    lambda0: float
    d_perp: float = 0.1
    d_z: float = 0.0
    refr_index: float = 1.0

    def __post_init__(self):
        z = np.asarray(self.positions, dtype=float).reshape(-1)
        r = np.asarray(self.impact_params, dtype=float).reshape(-1)
        if r.size == 1 and z.size > 1:
            r = np.full(z.size, r[0])
        if z.size == 0:
            raise ValueError("ensemble needs at least one emitter")
        if r.size != z.size:
            raise ValueError("positions and impact_params must have the same length")
        if z.size > 1 and np.any(np.diff(z) <= 0):
            raise ValueError("positions must be strictly increasing")
        if np.any(r <= 0):
            raise ValueError("impact parameters must be positive")
        if not self.lambda0 > 0:
            raise ValueError("transition wavelength must be positive")
        if self.refr_index < 1.0:
            raise ValueError("refractive index must be >= 1")
        z.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "positions", z)
        object.__setattr__(self, "impact_params", r)

    @classmethod
    def from_energy(cls, positions, impact_params, hbar_omega0: float, **kw) -> "EmitterEnsemble":
        if not hbar_omega0 > 0:
            raise ValueError("transition energy must be positive")
        return cls(positions, impact_params, energy_to_wavelength(hbar_omega0), **kw)

    @classmethod
    def periodic(cls, count: int, dz: float, lambda0: float, r_perp: float = 10.0, z0: float = 0.0,
                 **kw) -> "EmitterEnsemble":
        """Equally spaced chain ``z_i = z0 + i dz`` with a common impact parameter."""
        if count < 1:
            raise ValueError("count must be >= 1")
        z = z0 + dz * np.arange(count)
        return cls(z, np.full(count, float(r_perp)), lambda0, **kw)

    @property
    def count(self) -> int:
        return int(self.positions.size)

    @property
    def omega0(self) -> float:
        """Transition angular frequency in rad/fs."""
        return TWO_PI * C_LIGHT / self.lambda0

    @property
    def hbar_omega0(self) -> float:
        return wavelength_to_energy(self.lambda0)

    def electron_phases(self, e: ElectronParams) -> np.ndarray:
        """Transit phases ``omega0 z_i / v`` seen by the electron."""
        return self.omega0 * self.positions / e.velocity

    def spacing(self, atol: float = 1e-9) -> float | None:
        """Common spacing if the chain is periodic within ``atol`` nm, else None."""
        if self.count < 2:
            return None
        d = np.diff(self.positions)
        if np.max(np.abs(d - d[0])) > atol:
            return None
        return float(np.mean(d))


@dataclass(frozen=True)
class CouplingSet:
    g: np.ndarray
    uniform_magnitude: bool = field(init=False)

    def __post_init__(self):
        g = np.asarray(self.g, dtype=complex).reshape(-1)
        g.setflags(write=False)
        object.__setattr__(self, "g", g)
        mag = np.abs(g)
        ref = mag.max() if mag.size else 0.0
        uniform = bool(ref == 0.0 or np.all(np.abs(mag - mag[0]) <= UNIFORM_RTOL * ref))
        object.__setattr__(self, "uniform_magnitude", uniform)

    def __len__(self):
        return self.g.size

    def ladder_coupling(self, electron_phases) -> complex:
        """Common coupling of the phase-matched ladder.

        The raising term of emitter i carries ``conj(g_i)``; with the transit
        phase removed this is the same number for every emitter.
        """
        if not self.uniform_magnitude:
            raise ValueError("ladder coupling requires uniform |g_i|")
        ref = np.conj(self.g) * np.exp(-1j * np.asarray(electron_phases))
        if ref.size > 1 and np.max(np.abs(ref - ref[0])) > 1e-9 * max(abs(ref[0]), 1e-300):
            raise ValueError("couplings are not phase-locked to the electron transit")
        return complex(ref[0])


def coupling_constant(e: ElectronParams, ens: EmitterEnsemble, emitter_index: int) -> complex:
    """Complex coupling ``g_i`` between the electron and emitter ``emitter_index``."""
    if not 0 <= emitter_index < ens.count:
        raise IndexError(f"emitter index {emitter_index} out of range for N={ens.count}")
    if ens.d_perp == 0.0 and ens.d_z == 0.0:
        return 0j
    x = bessel_argument(e, ens, emitter_index)
    k0, k1 = bessel_k01(x)
    amp = 2.0 * ALPHA / e.beta**2 * (TWO_PI / ens.lambda0)
    amp *= ens.d_perp * k1 + ens.d_z * k0 / e.gamma
    phase = ens.omega0 * ens.positions[emitter_index] / e.velocity
    return amp * complex(math.cos(phase), -math.sin(phase))


def bessel_argument(e: ElectronParams, ens: EmitterEnsemble, emitter_index: int) -> float:
    """``omega0 r_perp / (gamma v)`` for one emitter."""
    return TWO_PI * ens.impact_params[emitter_index] / (ens.lambda0 * e.beta * e.gamma)


def coupling_set(e: ElectronParams, ens: EmitterEnsemble) -> CouplingSet:
    return CouplingSet(np.array([coupling_constant(e, ens, i) for i in range(ens.count)]))


def uniform_couplings(g_mag: float, ens: EmitterEnsemble, e: ElectronParams) -> CouplingSet:
    """Couplings of magnitude ``g_mag`` carrying the transit phases of ``ens``.

    Used when the coupling strength is a model parameter rather than derived
    from dipole and geometry data.
    """
    return CouplingSet(g_mag * np.exp(-1j * ens.electron_phases(e)))
