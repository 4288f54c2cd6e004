"""Superradiant relaxation: Dicke rate-equation cascade and long-sample TWA.

Dicke cascade (dense ensemble): ``|m> -> |m-1>`` at rate ``Gamma m (N - m + 1)``.

Long sample: classical spins per emitter, cascaded unidirectional field

    F_i = sigma_i / 2 + sum_{j<i} exp(i omega0 (z_i - z_j) / v) sigma_j,
    d sigma_i / dt = Gamma s_i F_i,
    d s_i / dt     = -4 Gamma Re(conj(sigma_i) F_i),

which conserves ``s_i^2 + 4 |sigma_i|^2`` exactly. The output intensity is
``I = -1/2 d/dt sum_i s_i = 2 Gamma sum_i Re(conj(sigma_i) F_i)`` quanta per
unit time. This is a reconstruction (a semiclassical model), not a unique
prescription.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .coupling import ElectronParams, EmitterEnsemble
from .eels import EELSSpectrum, spectrum_from_ladder
from .ladder import LadderState

DEFAULT_GAMMA = 1e-3  # fs^-1


@dataclass
class DickeTrajectory:
    N: int
    gamma: float
    times: np.ndarray
    populations: np.ndarray  # (T, N+1)
    dense: object = field(default=None, repr=False)

    @property
    def mean_m(self) -> np.ndarray:
        return self.populations @ np.arange(self.N + 1)

    @property
    def intensity(self) -> np.ndarray:
        m = np.arange(self.N + 1)
        return self.gamma * self.populations @ (m * (self.N - m + 1))

    def populations_at(self, t: float) -> np.ndarray:
        if not self.times[0] - 1e-9 <= t <= self.times[-1] + 1e-9:
            raise ValueError(f"delay {t} outside the integrated range [{self.times[0]}, {self.times[-1]}]")
        p = np.clip(self.dense(t), 0.0, None)
        return p / p.sum()


def _cascade_rhs(N, gamma):
    m = np.arange(N + 1)
    down = gamma * m * (N - m + 1)  # rate out of |m>

    def rhs(_t, p):
        out = -down * p
        out[:-1] += down[1:] * p[1:]
        return out

    return rhs


def dicke_cascade(N: int, gamma: float, initial: LadderState, times, rtol: float = 1e-10) -> DickeTrajectory:
    """Integrate the Dicke rate equations from ``initial`` populations."""
    if not gamma > 0:
        raise ValueError("decay rate must be positive")
    if initial.N != N:
        raise ValueError("initial state size does not match N")
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 1 or np.any(np.diff(times) <= 0):
        raise ValueError("times must be a strictly increasing 1-D grid")
    p0 = initial.weights / initial.weights.sum()
    sol = solve_ivp(
        _cascade_rhs(N, gamma), (float(times[0]), float(times[-1])), p0, method="DOP853",
        t_eval=times, rtol=rtol, atol=1e-14, dense_output=True,
    )
    if not sol.success:  # pragma: no cover
        raise ArithmeticError(sol.message)
    return DickeTrajectory(N, gamma, times, sol.y.T.copy(), sol.sol)


@dataclass
class TWAEnsemble:
    N: int
    gamma: float
    seed: int
    times: np.ndarray
    inversion: np.ndarray  # (M, T) excited-emitter count sum_i (1 + s_i)/2
    intensity: np.ndarray  # (M, T)
    emitted: np.ndarray  # (M, T) integrated intensity
    spin_length_error: np.ndarray  # (M,) max |s^2 + 4|sigma|^2 - 1|
    step: float = 0.0

    @property
    def trajectories(self) -> int:
        return self.inversion.shape[0]

    @property
    def mean_m(self) -> np.ndarray:
        return self.inversion.mean(axis=0)

    @property
    def mean_intensity(self) -> np.ndarray:
        return self.intensity.mean(axis=0)

    def peak_delays(self) -> np.ndarray:
        return self.times[np.argmax(self.intensity, axis=1)]

    def inversion_at(self, t: float) -> np.ndarray:
        if not self.times[0] - 1e-9 <= t <= self.times[-1] + 1e-9:
            raise ValueError(f"delay {t} outside the integrated range [{self.times[0]}, {self.times[-1]}]")
        return np.array([np.interp(t, self.times, row) for row in self.inversion])


def _field(sigma, phase):
    # F_i = sigma_i/2 + e^{i u_i} sum_{j<i} e^{-i u_j} sigma_j
    w = sigma * np.conj(phase)
    prior = np.cumsum(w, axis=1) - w
    return 0.5 * sigma + phase * prior


def _derivs(sz, sigma, phase, gamma):
    F = _field(sigma, phase)
    flux = np.real(np.conj(sigma) * F)
    return -4.0 * gamma * flux, gamma * sz * F, 2.0 * gamma * flux.sum(axis=1)


def _initial_batch(idx, N, seed, tip):
    sz = np.full((idx.size, N), math.cos(tip))
    sigma = np.empty((idx.size, N), dtype=complex)
    for r, k in enumerate(idx):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(int(k),)))
        sigma[r] = 0.5 * math.sin(tip) * np.exp(1j * rng.uniform(0.0, 2 * math.pi, N))
    return sz, sigma


def _observe(sz, sigma, phase, gamma):
    inv = 0.5 * (1.0 + sz).sum(axis=1)
    inten = _derivs(sz, sigma, phase, gamma)[2]
    err = np.abs(sz**2 + 4.0 * np.abs(sigma) ** 2 - 1.0).max(axis=1)
    return inv, inten, err


def _batch_adaptive(sz, sigma, phase, gamma, times, rtol):
    M, N = sz.shape

    def rhs(_t, y):
        z = y[: M * N].reshape(M, N)
        sg = (y[M * N: 2 * M * N] + 1j * y[2 * M * N: 3 * M * N]).reshape(M, N)
        dz, dsg, de = _derivs(z, sg, phase, gamma)
        return np.concatenate([dz.ravel(), dsg.real.ravel(), dsg.imag.ravel(), de])

    y0 = np.concatenate([sz.ravel(), sigma.real.ravel(), sigma.imag.ravel(), np.zeros(M)])
    sol = solve_ivp(rhs, (times[0], times[-1]), y0, method="DOP853", t_eval=times,
                    rtol=rtol, atol=1e-12)
    if not sol.success:  # pragma: no cover
        raise ArithmeticError(sol.message)
    for k in range(times.size):
        y = sol.y[:, k]
        z = y[: M * N].reshape(M, N)
        sg = (y[M * N: 2 * M * N] + 1j * y[2 * M * N: 3 * M * N]).reshape(M, N)
        yield z, sg, y[3 * M * N:]


def _batch_rk4(sz, sigma, phase, gamma, times, dt_max):
    emitted = np.zeros(sz.shape[0])
    yield sz, sigma, emitted
    for k in range(1, times.size):
        span = times[k] - times[k - 1]
        n = max(1, math.ceil(span / dt_max - 1e-12))
        h = span / n
        for _ in range(n):
            a1, b1, c1 = _derivs(sz, sigma, phase, gamma)
            a2, b2, c2 = _derivs(sz + 0.5 * h * a1, sigma + 0.5 * h * b1, phase, gamma)
            a3, b3, c3 = _derivs(sz + 0.5 * h * a2, sigma + 0.5 * h * b2, phase, gamma)
            a4, b4, c4 = _derivs(sz + h * a3, sigma + h * b3, phase, gamma)
            sz = sz + h / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4)
            sigma = sigma + h / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4)
            emitted = emitted + h / 6.0 * (c1 + 2 * c2 + 2 * c3 + c4)
        yield sz, sigma, emitted


def _run_batch(idx, N, gamma, seed, phase, times, tip, integrator, dt_max, rtol):
    sz, sigma = _initial_batch(idx, N, seed, tip)
    T = times.size
    inv = np.empty((idx.size, T))
    inten = np.empty((idx.size, T))
    emi = np.empty((idx.size, T))
    length_err = np.zeros(idx.size)
    if integrator == "dop853":
        states = _batch_adaptive(sz, sigma, phase, gamma, times, rtol)
    else:
        states = _batch_rk4(sz, sigma, phase, gamma, times, dt_max)
    for k, (z, sg, emitted) in enumerate(states):
        inv[:, k], inten[:, k], err = _observe(z, sg, phase, gamma)
        emi[:, k] = emitted
        np.maximum(length_err, err, out=length_err)
    return inv, inten, emi, length_err


def twa_long_sample(ens: EmitterEnsemble, e: ElectronParams, gamma: float, trajectories: int, seed: int,
                    times, tip_angle: float | None = None, integrator: str = "dop853",
                    rtol: float = 1e-10, step_factor: float = 0.01, batch: int = 50,
                    workers: int = 1) -> TWAEnsemble:
    """Truncated-Wigner trajectories of a fully inverted long sample.

    Each emitter starts as a unit Bloch vector tipped by ``tip_angle`` from
    the excited pole (default ``1/sqrt(N)``) with an independent uniform
    azimuth per trajectory; the random azimuths seed the emission.

    Trajectory ``k`` draws from ``SeedSequence(seed, spawn_key=(k,))`` and
    trajectories are integrated in fixed batches of ``batch`` consecutive
    indices, so results are bit-identical for any ``workers``.

    ``integrator`` is ``"dop853"`` (adaptive, ``rtol``) or ``"rk4"`` (fixed
    step ``h <= step_factor / (N Gamma)``). The late-time tail of re-excited
    spins is slow, so fixed steps are only practical for short horizons.
    """
    if not gamma > 0:
        raise ValueError("decay rate must be positive")
    if trajectories < 1:
        raise ValueError("need at least one trajectory")
    if integrator not in ("dop853", "rk4"):
        raise ValueError(f"unknown integrator {integrator!r}")
    N = ens.count
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2 or np.any(np.diff(times) <= 0):
        raise ValueError("times must be a strictly increasing grid with >= 2 points")
    tip = 1.0 / math.sqrt(N) if tip_angle is None else float(tip_angle)
    if not 0.0 < tip < math.pi / 2:
        raise ValueError("tip angle must lie in (0, pi/2) for an inverted start")
    phase = np.exp(1j * ens.electron_phases(e))[None, :]
    dt_max = step_factor / (N * gamma)
    batches = [np.arange(s, min(s + batch, trajectories)) for s in range(0, trajectories, batch)]
    args = (N, gamma, seed, phase, times, tip, integrator, dt_max, rtol)
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(lambda b: _run_batch(b, *args), batches))
    else:
        parts = [_run_batch(b, *args) for b in batches]
    inv, inten, emi, err = (np.concatenate([p[i] for p in parts]) for i in range(4))
    return TWAEnsemble(N, gamma, seed, times, inv, inten, emi, err, dt_max if integrator == "rk4" else 0.0)


def timeline_eels(dyn, kernel, delays, hbar_omega0: float = 1.0, interpolate: bool = False) -> list[EELSSpectrum]:
    """Electron spectra at each pump-probe delay.

    Dicke trajectories use the diagonal ladder state at the delay. TWA
    trajectories contribute the spectrum of ``|m>`` with ``m`` the rounded
    inversion (or, with ``interpolate``, a linear blend of the two nearest
    ladder spectra), averaged over trajectories.
    """
    if kernel.N != dyn.N:
        raise ValueError(f"kernel is for N={kernel.N}, dynamics has N={dyn.N}")
    out = []
    for t in np.atleast_1d(delays):
        if isinstance(dyn, DickeTrajectory):
            st = LadderState.diagonal(dyn.populations_at(float(t)))
            out.append(spectrum_from_ladder(kernel, st, hbar_omega0))
            continue
        m = np.clip(dyn.inversion_at(float(t)), 0.0, dyn.N)
        w = np.zeros(dyn.N + 1)
        if interpolate:
            lo = np.floor(m).astype(int)
            frac = m - lo
            hi = np.minimum(lo + 1, dyn.N)
            np.add.at(w, lo, 1.0 - frac)
            np.add.at(w, hi, frac)
        else:
            np.add.at(w, np.rint(m).astype(int), 1.0)
        p = kernel.D @ (w / w.sum())
        out.append(EELSSpectrum(p / p.sum(), hbar_omega0))
    return out
