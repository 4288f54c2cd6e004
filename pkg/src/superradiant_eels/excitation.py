"""Tilted-pulse excitation of the emitter chain and phase-matching sweeps.

A laser crossing the host medium (index n) at angle theta to the chain
reaches emitter i with carrier phase ``omega0 n cos(theta) z_i / c``. The
electron sees the emitters as phase-locked when this equals the transit phase
``omega0 z_i / v`` up to a constant (Cherenkov angle), or up to multiples of
2 pi per period for a periodic chain (hybrid Cherenkov/Smith-Purcell orders).
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .constants import C_LIGHT, TWO_PI
from .coupling import CouplingSet, ElectronParams, EmitterEnsemble, coupling_set, uniform_couplings
from .eels import effective_coupling, spectrum_from_joint, spectrum_from_ladder
from .fullspace import MAX_FULL_N, CapacityError, full_evolution
from .ladder import ProductState, product_to_ladder
from .scattering import exact_elements


@dataclass(frozen=True)
class ExcitationPulse:
    """Resonant pulse at tilt ``theta`` (rad); give ``area`` or ``tau`` with ``rabi_rate``."""

    theta: float
    area: float | None = None
    tau: float | None = None
    rabi_rate: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi / 2 + 1e-12:
            raise ValueError("tilt angle must lie in [0, pi/2]")
        if self.area is None:
            if self.tau is None or self.rabi_rate is None:
                raise ValueError("pulse needs an area or a duration with a Rabi rate")
            if self.tau < 0:
                raise ValueError("pulse duration must be >= 0")
            if not self.rabi_rate > 0:
                raise ValueError("Rabi rate must be > 0")

    @property
    def pulse_area(self) -> float:
        return self.area if self.area is not None else self.rabi_rate * self.tau


@dataclass(frozen=True)
class ExperimentTimings:
    """Electron delay after the pulse versus the ensemble dephasing time (fs)."""

    electron_delay: float
    t2_star: float

    def check(self) -> bool:
        """Warn and return False when the electron arrives after coherence is lost."""
        if self.electron_delay > self.t2_star:
            warnings.warn(
                f"electron delay {self.electron_delay} fs exceeds T2* = {self.t2_star} fs; "
                "the emitters have dephased and leave the ladder",
                RuntimeWarning,
                stacklevel=2,
            )
            return False
        return True


def laser_phases(ens: EmitterEnsemble, theta: float, detuning: float = 0.0) -> np.ndarray:
    """Carrier phase at each emitter, ``(omega0 + detuning) n cos(theta) z_i / c``."""
    return (ens.omega0 + detuning) * ens.refr_index * math.cos(theta) * ens.positions / C_LIGHT


def excite(ens: EmitterEnsemble, pulse: ExcitationPulse, detuning: float = 0.0) -> ProductState:
    phases = laser_phases(ens, pulse.theta, detuning)
    return ProductState.from_rotation(np.full(ens.count, pulse.pulse_area), phases)


def cherenkov_angle(e: ElectronParams, n: float) -> float | None:
    """``arccos(1 / (n beta))``, or None below the Cherenkov threshold."""
    if n < 1.0:
        raise ValueError("refractive index must be >= 1")
    x = 1.0 / (n * e.beta)
    if x > 1.0:
        return None
    return math.acos(x)


def dipole_map(ens: EmitterEnsemble, e: ElectronParams, thetas) -> np.ndarray:
    """``|sum_i exp(i omega0 z_i (n cos(theta)/c - 1/v))|^2`` in units of ``d0^2``."""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    if thetas.size == 0:
        raise ValueError("angle grid is empty")
    k = ens.omega0 * (ens.refr_index * np.cos(thetas) / C_LIGHT - 1.0 / e.velocity)
    amp = np.exp(1j * np.outer(k, ens.positions)).sum(axis=1)
    return np.abs(amp) ** 2


def resonance_angles(ens: EmitterEnsemble, e: ElectronParams, orders=range(-10, 11)) -> dict[int, float]:
    """Tilt angles with ``cos(theta) = 1/(n beta) + q lambda0 / (n dz)`` inside [0, pi/2]."""
    dz = ens.spacing()
    if dz is None:
        raise ValueError("resonance orders need an equally spaced chain")
    n = ens.refr_index
    out = {}
    for q in orders:
        c = 1.0 / (n * e.beta) + q * ens.lambda0 / (n * dz)
        if 0.0 <= c <= 1.0:
            out[int(q)] = math.acos(c)
    return dict(sorted(out.items(), key=lambda kv: kv[1]))


@dataclass
class SweepResult:
    angles: np.ndarray
    areas: np.ndarray
    g_eff: np.ndarray  # (n_angles, n_areas)
    dipole_sq: np.ndarray  # (n_angles,), normalized by N^2
    durations: np.ndarray | None = None
    resonances: dict = field(default_factory=dict)
    ladder_hits: int = 0

    def argmax_angle(self, area_index: int | None = None) -> float:
        col = self.g_eff.max(axis=1) if area_index is None else self.g_eff[:, area_index]
        return float(self.angles[int(np.argmax(col))])

    def rows(self):
        """CSV rows ``theta_deg, tau_fs, area_rad, g_eff, dipole_sq_norm``."""
        for i, th in enumerate(self.angles):
            for j, a in enumerate(self.areas):
                tau = float(self.durations[j]) if self.durations is not None else float("nan")
                yield (math.degrees(th), tau, float(a), float(self.g_eff[i, j]), float(self.dipole_sq[i]))


def _geff_point(ens, e, couplings, pathway, kernel_cache, theta, area, detuning=0.0):
    state = excite(ens, ExcitationPulse(theta, area=area), detuning)
    u = ens.electron_phases(e)
    if pathway == "ladder_fast" and couplings.uniform_magnitude:
        lad = product_to_ladder(state, u)
        if lad is not None:
            g = couplings.ladder_coupling(u)
            if "k" not in kernel_cache:
                kernel_cache["k"] = exact_elements(ens.count, g)
            return effective_coupling(spectrum_from_ladder(kernel_cache["k"], lad)), True
    j = full_evolution(couplings, state, u)
    return effective_coupling(spectrum_from_joint(j)), False


def sweep(ens: EmitterEnsemble, e: ElectronParams, angles, areas=None, *, durations=None,
          rabi_rate: float | None = None, pathway: str = "exact_full", g_mag: float | None = None,
          couplings: CouplingSet | None = None, bandwidth_samples: int = 0, seed: int | None = None,
          workers: int = 1) -> SweepResult:
    """Effective coupling over a (tilt angle, pulse area) grid.

    Pulse areas come from ``areas`` or from ``rabi_rate * durations``. The
    coupling follows from the emitter geometry unless ``g_mag`` or ``couplings`` is supplied.

    ``bandwidth_samples > 0`` enables the experimental finite-bandwidth model:
    g_eff is averaged over carrier detunings drawn from N(0, 1/tau) with
    ``seed``; it requires ``durations``.
    """
    if pathway not in ("exact_full", "ladder_fast"):
        raise ValueError(f"unknown pathway {pathway!r}")
    angles = np.asarray(angles, dtype=float)
    if durations is not None:
        if rabi_rate is None:
            raise ValueError("durations need a Rabi rate")
        durations = np.asarray(durations, dtype=float)
        areas = rabi_rate * durations
    areas = np.atleast_1d(np.asarray(areas, dtype=float))
    if angles.size > 1 and np.any(np.diff(angles) <= 0) or areas.size > 1 and np.any(np.diff(areas) <= 0):
        raise ValueError("sweep grids must be strictly increasing")
    if pathway == "exact_full" and ens.count > MAX_FULL_N:
        raise CapacityError(f"exact_full pathway supports N <= {MAX_FULL_N}")
    if couplings is None:
        couplings = uniform_couplings(g_mag, ens, e) if g_mag is not None else coupling_set(e, ens)
    detunings = np.zeros((areas.size, 1))
    if bandwidth_samples > 0:
        if durations is None or seed is None:
            raise ValueError("the bandwidth model needs durations and a seed")
        rng = np.random.default_rng(seed)
        width = 1.0 / np.maximum(durations, 1e-300)
        detunings = rng.standard_normal((areas.size, bandwidth_samples)) * width[:, None]

    kernel_cache: dict = {}
    if pathway == "ladder_fast" and couplings.uniform_magnitude:
        try:
            kernel_cache["k"] = exact_elements(ens.count, couplings.ladder_coupling(ens.electron_phases(e)))
        except ValueError:
            pass

    def point(ij):
        i, j = ij
        vals, hits = [], 0
        for d in detunings[j]:
            v, hit = _geff_point(ens, e, couplings, pathway, kernel_cache, angles[i], areas[j], d)
            vals.append(v)
            hits += hit
        return float(np.mean(vals)), hits

    grid = [(i, j) for i in range(angles.size) for j in range(areas.size)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            results = list(ex.map(point, grid))
    else:
        results = [point(ij) for ij in grid]
    g_eff = np.array([r[0] for r in results]).reshape(angles.size, areas.size)
    hits = sum(r[1] for r in results)
    dip = dipole_map(ens, e, angles) / ens.count**2
    try:
        res = resonance_angles(ens, e)
    except ValueError:
        c = cherenkov_angle(e, ens.refr_index)
        res = {} if c is None else {0: c}
    return SweepResult(angles, areas, g_eff, dip, durations, res, hits)
