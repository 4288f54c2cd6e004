import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import comb

from superradiant_eels.special import bessel_k0, bessel_k01, bessel_k1, binomial_pmf, log_binomials

# mpmath values at 40 digits, frozen
K_TABLE = {
    1e-6: (13.931442073626419413, 999999.99999278427896),
    0.01: (4.7212447301610949651, 99.973894118296247643),
    0.5: (0.92441907122766586178, 1.6564411200033008937),
    1.0: (0.42102443824070833334, 0.60190723019723457474),
    1.9999: (0.11390786025689361566, 0.13988426583169101917),
    2.0: (0.11389387274953343565, 0.13986588181652242728),
    2.0001: (0.11387988708044139592, 0.13984750046881143372),
    5.0: (0.0036910983340425942747, 0.0040446134454521642084),
    20.0: (5.7412378153365242927e-10, 5.8830579695570381777e-10),
    80.0: (2.5251198425054718152e-36, 2.5408531275211700109e-36),
}


@pytest.mark.parametrize("x", sorted(K_TABLE))
def test_k0_k1_frozen_values(x):
    k0, k1 = bessel_k01(x)
    r0, r1 = K_TABLE[x]
    assert k0 == pytest.approx(r0, rel=2e-15, abs=0)
    assert k1 == pytest.approx(r1, rel=2e-15, abs=0)


def test_documented_unit_argument_values():
    assert bessel_k0(1.0) == pytest.approx(0.421024438241, abs=1e-12)
    assert bessel_k1(1.0) == pytest.approx(0.601907230197, abs=1e-12)


def test_small_argument_limit():
    x = 1e-6
    assert x * bessel_k1(x) == pytest.approx(1.0, rel=1e-5)


@pytest.mark.parametrize("x", [0.0, -1.0, -1e-300])
def test_nonpositive_argument_rejected(x):
    with pytest.raises(ValueError):
        bessel_k01(x)


@given(st.floats(min_value=1e-4, max_value=60.0))
def test_matches_mpmath(x):
    k0, k1 = bessel_k01(x)
    assert k0 == pytest.approx(float(mpmath.besselk(0, x)), rel=1e-13)
    assert k1 == pytest.approx(float(mpmath.besselk(1, x)), rel=1e-13)


@given(st.floats(min_value=1e-3, max_value=40.0))
def test_wronskian_type_recurrence(x):
    # K_2 = K_0 + (2/x) K_1 and K_2 > K_1 > K_0 > 0
    k0, k1 = bessel_k01(x)
    k2 = k0 + 2.0 / x * k1
    assert 0 < k0 < k1 < k2
    assert k2 == pytest.approx(float(mpmath.besselk(2, x)), rel=1e-12)


@given(st.floats(min_value=1e-3, max_value=30.0), st.floats(min_value=1e-3, max_value=30.0))
def test_monotone_decreasing(a, b):
    lo, hi = min(a, b), max(a, b)
    if hi - lo < 1e-9 * hi:
        return
    assert bessel_k0(lo) > bessel_k0(hi)
    assert bessel_k1(lo) > bessel_k1(hi)


@pytest.mark.parametrize("n", [1, 5, 30, 200])
def test_log_binomials(n):
    ref = np.log(comb(n, np.arange(n + 1), exact=False))
    assert np.allclose(log_binomials(n), ref, rtol=1e-12, atol=1e-12)


@given(st.integers(min_value=0, max_value=400), st.floats(min_value=0.0, max_value=1.0))
def test_binomial_pmf_normalized(n, p):
    w = binomial_pmf(n, p)
    assert w.shape == (n + 1,)
    assert np.all(w >= 0)
    assert math.isclose(w.sum(), 1.0, rel_tol=1e-12)
    assert math.isclose(float(np.dot(np.arange(n + 1), w)), n * p, rel_tol=1e-10, abs_tol=1e-10)
