r"""Special functions needed by the coupling and ladder code.

Modified Bessel functions of the second kind :math:`K_0, K_1` are evaluated
with the ascending series below ``x = 2`` and with Steed's continued fraction
(CF2, Thompson & Barnett) above it. Both branches reach ~1e-15 relative
accuracy, which is far inside the 1e-12 absolute budget on ``[1e-6, 50]``.
"""

import math

import numpy as np
from scipy.special import gammaln, xlogy

EULER_GAMMA = 0.57721566490153286061
_SERIES_LIMIT = 2.0
_EPS = 1e-16
_MAXIT = 10_000


def _check_domain(x):
    if not x > 0.0 or math.isnan(x):
        raise ValueError(f"modified Bessel K requires x > 0, got {x!r}")


def _k01_series(x):
    # K0 = -(ln(x/2) + gamma) I0 + sum_k H_k (x^2/4)^k / (k!)^2
    # K1 = 1/x + ln(x/2) I1 - (x/4) sum_k (psi(k+1) + psi(k+2)) (x^2/4)^k / (k!(k+1)!)
    y = 0.25 * x * x
    lnx2 = math.log(0.5 * x)
    i0 = 0.0
    i1 = 0.0
    s0 = 0.0
    s1 = 0.0
    t0 = 1.0  # (x^2/4)^k / (k!)^2
    t1 = 1.0  # (x^2/4)^k / (k! (k+1)!)
    harmonic = 0.0  # H_k
    k = 0
    while True:
        psi_k1 = harmonic - EULER_GAMMA
        psi_k2 = psi_k1 + 1.0 / (k + 1)
        i0 += t0
        i1 += t1
        s0 += harmonic * t0
        s1 += (psi_k1 + psi_k2) * t1
        k += 1
        t0 *= y / (k * k)
        t1 *= y / (k * (k + 1))
        harmonic += 1.0 / k
        if t0 < _EPS * i0 and t1 < _EPS * i1:
            break
    i1 *= 0.5 * x
    k0 = -(lnx2 + EULER_GAMMA) * i0 + s0
    k1 = 1.0 / x + lnx2 * i1 - 0.25 * x * s1
    return k0, k1


def _k01_cf2(x):
    # Steed's algorithm for CF2 at order mu = 0 (Numerical Recipes, bessik)
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _MAXIT):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            break
    else:  # pragma: no cover
        raise ArithmeticError(f"CF2 did not converge for x={x}")
    h = a1 * h
    k0 = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) / s
    k1 = k0 * (x + 0.5 - h) / x
    return k0, k1


def bessel_k01(x: float) -> tuple[float, float]:
    """Return ``(K0(x), K1(x))`` for scalar ``x > 0``."""
    x = float(x)
    _check_domain(x)
    if x < _SERIES_LIMIT:
        return _k01_series(x)
    return _k01_cf2(x)


def bessel_k0(x: float) -> float:
    """Modified Bessel function of the second kind, order 0."""
    return bessel_k01(x)[0]


def bessel_k1(x: float) -> float:
    """Modified Bessel function of the second kind, order 1."""
    return bessel_k01(x)[1]


def log_factorials(n: int) -> np.ndarray:
    """``ln k!`` for ``k = 0..n``."""
    return gammaln(np.arange(n + 1, dtype=float) + 1.0)


def log_binomials(n: int) -> np.ndarray:
    """``ln C(n, m)`` for ``m = 0..n``."""
    lf = log_factorials(n)
    m = np.arange(n + 1)
    return lf[n] - lf[m] - lf[n - m]


def binomial_pmf(n: int, p: float) -> np.ndarray:
    """Binomial weights ``C(n,m) p^m (1-p)^(n-m)`` computed in log space."""
    m = np.arange(n + 1, dtype=float)
    logw = log_binomials(n) + xlogy(m, p) + xlogy(n - m, 1.0 - p)
    return np.exp(logw)
