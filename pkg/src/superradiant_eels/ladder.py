"""Emitter states on the Dicke ladder and per-emitter product states.

Ladder basis (electron frame): with transit phases ``u_i = omega0 z_i / v``,

    |m> = C(N, m)^(-1/2) sum_{|A| = m} exp(i sum_{j in A} u_j) |A>,

so a product state whose excited-state phases follow ``u_i`` up to a common
offset lies on the ladder.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .special import binomial_pmf

MAX_LADDER_N = 1000
NORM_TOL = 1e-12
PHASE_TOL = 1e-9


@dataclass(frozen=True)
class LadderState:
    """Pure (amplitudes) or diagonal (populations) state on the ladder."""

    N: int
    kind: str
    data: np.ndarray

    def __post_init__(self):
        if not 1 <= self.N <= MAX_LADDER_N:
            raise ValueError(f"ladder size N must be in [1, {MAX_LADDER_N}], got {self.N}")
        if self.kind == "pure":
            d = np.asarray(self.data, dtype=complex).reshape(-1)
            total = float(np.sum(np.abs(d) ** 2))
        elif self.kind == "diagonal":
            d = np.asarray(self.data, dtype=float).reshape(-1)
            if np.any(d < -NORM_TOL):
                raise ValueError("populations must be nonnegative")
            total = float(np.sum(d))
        else:
            raise ValueError(f"unknown state kind {self.kind!r}")
        if d.size != self.N + 1:
            raise ValueError(f"expected {self.N + 1} ladder entries, got {d.size}")
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"state not normalized (sum = {total!r})")
        d.setflags(write=False)
        object.__setattr__(self, "data", d)

    @classmethod
    def pure(cls, amplitudes) -> "LadderState":
        a = np.asarray(amplitudes, dtype=complex)
        return cls(a.size - 1, "pure", a)

    @classmethod
    def diagonal(cls, populations) -> "LadderState":
        p = np.asarray(populations, dtype=float)
        return cls(p.size - 1, "diagonal", p)

    @classmethod
    def basis(cls, N: int, m: int) -> "LadderState":
        if not 0 <= m <= N:
            raise ValueError(f"ladder index {m} outside [0, {N}]")
        a = np.zeros(N + 1, dtype=complex)
        a[m] = 1.0
        return cls(N, "pure", a)

    @property
    def amplitudes(self) -> np.ndarray:
        if self.kind != "pure":
            raise TypeError("diagonal states carry populations only")
        return self.data

    @property
    def weights(self) -> np.ndarray:
        """Ladder populations ``|c_m|^2`` or ``p_m``."""
        if self.kind == "pure":
            return np.abs(self.data) ** 2
        return np.clip(self.data, 0.0, None)

    def to_dict(self) -> dict:
        out = {"N": self.N, "kind": self.kind}
        if self.kind == "pure":
            out["re"] = self.data.real.tolist()
            out["im"] = self.data.imag.tolist()
        else:
            out["p"] = self.data.tolist()
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "LadderState":
        if d["kind"] == "pure":
            amps = np.asarray(d["re"], float) + 1j * np.asarray(d["im"], float)
            st = cls.pure(amps)
        else:
            st = cls.diagonal(d["p"])
        if st.N != int(d["N"]):
            raise ValueError("N does not match the amplitude count")
        return st

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "LadderState":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class ProductState:
    """Pure product state ``prod_i [cos(t_i/2)|g> + exp(i p_i) sin(t_i/2)|e>]``."""

    polar: np.ndarray
    azimuth: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.polar, dtype=float).reshape(-1)
        p = np.asarray(self.azimuth, dtype=float).reshape(-1)
        if t.size != p.size or t.size == 0:
            raise ValueError("polar and azimuth must be non-empty and of equal length")
        if np.any(t < 0) or np.any(t > math.pi + 1e-12):
            raise ValueError("Bloch polar angles must lie in [0, pi]")
        p = np.mod(p, 2 * math.pi)
        t.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "polar", t)
        object.__setattr__(self, "azimuth", p)

    @property
    def N(self) -> int:
        return int(self.polar.size)

    @classmethod
    def from_rotation(cls, area, azimuth) -> "ProductState":
        """State after a resonant rotation by ``area`` (any real) with phases ``azimuth``.

        Areas outside [0, pi] are folded back onto the Bloch sphere; the sign
        flip this produces is a per-emitter global phase.
        """
        area = np.broadcast_to(np.asarray(area, dtype=float), np.shape(azimuth))
        a = np.mod(area, 2 * math.pi)
        flip = a > math.pi
        polar = np.where(flip, 2 * math.pi - a, a)
        phase = np.where(flip, np.asarray(azimuth) + math.pi, azimuth)
        return cls(polar, phase)


def ladder_from_pulse(N: int, area: float) -> LadderState:
    """Spin-coherent state reached from the ground state by a rotation of ``area``.

    ``c_m = sqrt(C(N,m)) cos(area/2)^(N-m) sin(area/2)^m``.
    """
    c = math.cos(area / 2)
    s = math.sin(area / 2)
    p = binomial_pmf(N, s * s)
    m = np.arange(N + 1)
    sign = np.where((N - m) % 2 == 1, math.copysign(1.0, c), 1.0)
    sign = sign * np.where(m % 2 == 1, math.copysign(1.0, s), 1.0)
    amps = sign * np.sqrt(p)
    amps /= np.linalg.norm(amps)
    return LadderState(N, "pure", amps.astype(complex))


def product_to_ladder(s: ProductState, electron_phases) -> LadderState | None:
    """Ladder form of a phase-matched product state, or None when it leaves the ladder.

    The state lies on the ladder iff all polar angles agree and the residual
    phases ``phi_i - u_i`` agree modulo 2 pi (tolerance 1e-9 rad). Residuals
    are unconstrained at the poles (ground or fully inverted).
    """
    u = np.asarray(electron_phases, dtype=float).reshape(-1)
    if u.size != s.N:
        raise ValueError("electron_phases must have one entry per emitter")
    t = s.polar
    if np.max(np.abs(t - t[0])) > PHASE_TOL:
        return None
    theta = float(t[0])
    resid = s.azimuth - u
    if theta > math.pi - PHASE_TOL:
        # fully inverted: the phases only add up to a global phase
        amps = np.zeros(s.N + 1, dtype=complex)
        amps[-1] = np.exp(1j * np.sum(resid))
        return LadderState(s.N, "pure", amps)
    if s.N > 1 and theta > PHASE_TOL:
        spread = np.angle(np.exp(1j * (resid - resid[0])))
        if np.max(np.abs(spread)) > PHASE_TOL:
            return None
    base = ladder_from_pulse(s.N, theta).amplitudes
    m = np.arange(s.N + 1)
    return LadderState(s.N, "pure", base * np.exp(1j * m * float(resid[0])))


def mean_excitation(st: LadderState) -> float:
    w = st.weights
    return float(np.dot(np.arange(st.N + 1), w) / np.sum(w))


def excitation_variance(st: LadderState) -> float:
    w = st.weights / np.sum(st.weights)
    m = np.arange(st.N + 1)
    mu = float(np.dot(m, w))
    return float(np.dot((m - mu) ** 2, w))
