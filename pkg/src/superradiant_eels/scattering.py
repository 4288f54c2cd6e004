r"""Ladder scattering kernel of one electron crossing N phase-matched emitters.

For coupling ``g = |g| exp(i chi)`` the kernel elements are

.. math::

    s_{nm} = i^{n-m} e^{i(n-m)\chi} \sqrt{m!\,n!\,(N-n)!\,(N-m)!}
             \sum_k \frac{(-1)^k \cos^{N-(n-m)-2k}|g| \, \sin^{(n-m)+2k}|g|}
                         {k!\,(m-k)!\,(n-m+k)!\,(N-n-k)!}

(the tan/cos^N form rewritten so every term is finite). ``n - m`` is the
number of quanta the electron lost. The sum alternates, so elements whose
largest term exceeds the result by more than ``CANCELLATION_LIMIT`` are
re-evaluated in extended precision.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy.special import jv

from .eels import EELSSpectrum
from .special import log_factorials

G_MAX = math.pi / 2
CANCELLATION_LIMIT = 1e2
_PHASE_POWERS = np.array([1, 1j, -1, -1j])


@dataclass(frozen=True)
class ScatteringKernel:
    """Ladder scattering matrix ``s[n, m]`` and loss kernel ``D[l + N, m] = |s[m+l, m]|^2``."""

    N: int
    g: complex
    s: np.ndarray = field(repr=False)
    D: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        s = np.asarray(self.s, dtype=complex)
        if s.shape != (self.N + 1, self.N + 1):
            raise ValueError(f"kernel must be {(self.N + 1, self.N + 1)}, got {s.shape}")
        s.setflags(write=False)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "D", _loss_kernel(s))

    @property
    def losses(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)

    def final_populations(self, weights) -> np.ndarray:
        """Ladder populations after the interaction for initial populations ``weights``."""
        return np.abs(self.s) ** 2 @ np.asarray(weights, dtype=float)

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "g": [self.g.real, self.g.imag],
            "re": self.s.real.reshape(-1).tolist(),
            "im": self.s.imag.reshape(-1).tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScatteringKernel":
        N = int(d["N"])
        s = (np.asarray(d["re"], float) + 1j * np.asarray(d["im"], float)).reshape(N + 1, N + 1)
        return cls(N, complex(*d["g"]), s)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "ScatteringKernel":
        return cls.from_dict(json.loads(text))


def _loss_kernel(s: np.ndarray) -> np.ndarray:
    N = s.shape[0] - 1
    D = np.zeros((2 * N + 1, N + 1))
    p = np.abs(s) ** 2
    n, m = np.indices(p.shape)
    D[n - m + N, m] = p
    return D


def _real_sums(N: int, gm: float):
    """Real part of the closed-form ladder sums for all (n, m), with the largest |term| per element."""
    lf = log_factorials(N)
    n, m = np.indices((N + 1, N + 1))
    a = n - m
    head = 0.5 * (lf[m] + lf[n] + lf[N - n] + lf[N - m])
    lc = math.log(math.cos(gm)) if math.cos(gm) > 0 else -np.inf
    ls = math.log(math.sin(gm))
    total = np.zeros((N + 1, N + 1))
    comp = np.zeros((N + 1, N + 1))
    biggest = np.zeros((N + 1, N + 1))
    for k in range(N + 1):
        valid = (k <= m) & (a + k >= 0) & (N - n - k >= 0)
        if not valid.any():
            continue
        kk = np.where(valid, k, 0)
        pc = np.where(valid, N - a - 2 * k, 0)
        ps = np.where(valid, a + 2 * k, 0)
        log_t = head - (lf[kk] + lf[np.where(valid, m - k, 0)] + lf[np.where(valid, a + k, 0)]
                        + lf[np.where(valid, N - n - k, 0)])
        with np.errstate(invalid="ignore"):
            log_t = log_t + np.where(pc > 0, pc * lc, 0.0) + np.where(ps > 0, ps * ls, 0.0)
        term = np.exp(np.where(valid, log_t, -np.inf)) * (-1.0 if k % 2 else 1.0)
        biggest = np.maximum(biggest, np.abs(term))
        # Kahan-compensated accumulation over k
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total, biggest


def _mp_element(N: int, n: int, m: int, gm: float, dps: int) -> float:
    with mpmath.workdps(dps):
        g = mpmath.mpf(gm)
        c, s = mpmath.cos(g), mpmath.sin(g)
        f = mpmath.factorial
        head = mpmath.sqrt(f(m) * f(n) * f(N - n) * f(N - m))
        a = n - m
        tot = mpmath.mpf(0)
        for k in range(max(0, -a), min(m, N - n) + 1):
            t = c ** (N - a - 2 * k) * s ** (a + 2 * k) / (f(k) * f(m - k) * f(a + k) * f(N - n - k))
            tot += -t if k % 2 else t
        return float(head * tot)


def exact_elements(N: int, g: complex) -> ScatteringKernel:
    """Analytic ladder scattering kernel for ``N`` emitters and coupling ``g``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    g = complex(g)
    gm = abs(g)
    if gm > G_MAX + 1e-12:
        raise ValueError(f"|g| = {gm} outside the supported range [0, pi/2]")
    gm = min(gm, G_MAX)
    if gm == 0.0:
        return ScatteringKernel(N, g, np.eye(N + 1, dtype=complex))
    real, biggest = _real_sums(N, gm)
    bad = biggest > CANCELLATION_LIMIT * np.abs(real)
    bad &= biggest > 0
    for n, m in zip(*np.nonzero(bad)):
        ratio = biggest[n, m] / max(abs(real[n, m]), 1e-300)
        dps = 25 + int(math.ceil(math.log10(ratio)))
        real[n, m] = _mp_element(N, int(n), int(m), gm, dps)
    n, m = np.indices((N + 1, N + 1))
    a = n - m
    phase = _PHASE_POWERS[a % 4] * np.exp(1j * a * np.angle(g))
    return ScatteringKernel(N, g, real * phase)


def bessel_approx_spectrum(N: int, m: int, g_mag: float, hbar_omega0: float = 1.0,
                           tail: float = 1e-12) -> EELSSpectrum:
    """PINEM-like spectrum ``J_l(2 |g| sqrt(N m - m^2))^2`` for ladder state ``|m>``.

    Valid far from the ladder edges and for small ``|g|``; sidebands beyond
    the point where the remaining tail mass drops below ``tail`` are zeroed
    and the rest renormalized.
    """
    if not 0 < m < N:
        raise ValueError("the Bessel approximation needs 0 < m < N")
    x = 2.0 * abs(g_mag) * math.sqrt(N * m - m * m)
    ell = np.arange(-N, N + 1)
    p = jv(ell, x) ** 2
    # tail mass beyond |l| > L for each L, using the symmetry J_-l^2 = J_l^2
    mags = p[N:]
    beyond = 2.0 * (np.sum(mags) - np.cumsum(mags))
    cut = int(np.argmax(beyond < tail)) if np.any(beyond < tail) else N
    p[np.abs(ell) > cut] = 0.0
    return EELSSpectrum(p / p.sum(), hbar_omega0)
