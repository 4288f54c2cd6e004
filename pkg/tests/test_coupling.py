import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import constants as sc

from superradiant_eels.constants import energy_to_wavelength, wavelength_to_energy
from superradiant_eels.coupling import (
    CouplingSet,
    ElectronParams,
    EmitterEnsemble,
    bessel_argument,
    coupling_constant,
    coupling_set,
    uniform_couplings,
)


def si_coupling(beta, lambda0_nm, r_nm, d_perp_enm, d_z_enm=0.0):
    """Coupling magnitude evaluated in SI units at 40 digits (independent route)."""
    with mpmath.workdps(40):
        e, eps0, hbar, c = (mpmath.mpf(v) for v in (sc.e, sc.epsilon_0, sc.hbar, sc.c))
        b = mpmath.mpf(beta)
        v = b * c
        gam = 1 / mpmath.sqrt(1 - b**2)
        w = 2 * mpmath.pi * c / (mpmath.mpf(lambda0_nm) * mpmath.mpf("1e-9"))
        x = w * mpmath.mpf(r_nm) * mpmath.mpf("1e-9") / (gam * v)
        dp = e * mpmath.mpf(d_perp_enm) * mpmath.mpf("1e-9")
        dz = e * mpmath.mpf(d_z_enm) * mpmath.mpf("1e-9")
        g = e * w / (2 * mpmath.pi * eps0 * hbar * v**2) * (dp * mpmath.besselk(1, x) + dz * mpmath.besselk(0, x) / gam)
        return float(g)


# the package embeds CODATA 2018 alpha while scipy ships newer constants;
# the two routes agree to ~7e-10 relative
SI_RTOL = 1e-8


def single(r=10.0, lam=500.0, z=0.0, **kw):
    return EmitterEnsemble([z], r, lam, **kw)


def test_bessel_argument_example():
    e = ElectronParams(0.7)
    x = bessel_argument(e, single(), 0)
    oracle = (2 * math.pi / 500.0) * 10.0 / (e.gamma * 0.7)
    assert x == pytest.approx(oracle, rel=1e-14)
    assert x == pytest.approx(0.1282026233557001, rel=1e-13)


def test_coupling_matches_si_evaluation():
    e = ElectronParams(0.7)
    g = coupling_constant(e, single(d_perp=0.1), 0)
    assert cmath.phase(g) == 0.0
    assert abs(g) == pytest.approx(2.8552944296025519e-4, rel=SI_RTOL)
    assert abs(g) == pytest.approx(si_coupling(0.7, 500.0, 10.0, 0.1), rel=SI_RTOL)


def test_longitudinal_dipole_term():
    e = ElectronParams(0.7)
    g = coupling_constant(e, single(d_perp=0.1, d_z=0.05), 0)
    assert abs(g) == pytest.approx(3.147064691147296e-4, rel=SI_RTOL)


@given(
    st.floats(min_value=0.05, max_value=0.99),
    st.floats(min_value=1.0, max_value=2000.0),
    st.floats(min_value=0.5, max_value=100.0),
    st.floats(min_value=0.0, max_value=1.0),
    st.floats(min_value=0.0, max_value=1.0),
)
def test_random_parameters_match_si(beta, lam, r, dp, dz):
    if dp == 0 and dz == 0:
        return
    g = coupling_constant(ElectronParams(beta), single(r, lam, d_perp=dp, d_z=dz), 0)
    ref = si_coupling(beta, lam, r, dp, dz)
    if ref < 1e-250:
        return
    assert abs(g) == pytest.approx(ref, rel=SI_RTOL)


def test_zero_dipole_gives_zero():
    assert coupling_constant(ElectronParams(0.5), single(d_perp=0.0, d_z=0.0), 0) == 0


@given(st.floats(min_value=0.1, max_value=0.95), st.floats(min_value=0.1, max_value=500.0))
def test_phase_ratio_between_displaced_emitters(beta, dz):
    e = ElectronParams(beta)
    ens = EmitterEnsemble([0.0, dz], 10.0, 300.0)
    g1, g2 = (coupling_constant(e, ens, i) for i in range(2))
    expected = cmath.exp(-1j * ens.omega0 * dz / e.velocity)
    assert abs(g2 / g1 - expected) < 1e-12


def test_uniform_magnitude_flags():
    e = ElectronParams(0.7)
    ens = EmitterEnsemble.periodic(6, 25.0, 500.0)
    assert coupling_set(e, ens).uniform_magnitude
    r = np.full(6, 10.0)
    r[3] = 20.0
    assert not coupling_set(e, EmitterEnsemble(ens.positions, r, 500.0)).uniform_magnitude


def test_singleton_set_equals_coupling_constant():
    e = ElectronParams(0.4)
    ens = single(7.0, 250.0, z=3.0)
    assert coupling_set(e, ens).g[0] == coupling_constant(e, ens, 0)


def test_ladder_coupling_removes_transit_phase():
    e = ElectronParams(0.7)
    ens = EmitterEnsemble([0.0, 13.0, 40.0], 10.0, 4.5)
    cs = uniform_couplings(0.3, ens, e)
    assert cs.ladder_coupling(ens.electron_phases(e)) == pytest.approx(0.3)
    derived = coupling_set(e, ens)
    lc = derived.ladder_coupling(ens.electron_phases(e))
    assert abs(lc) == pytest.approx(abs(derived.g[0]), rel=1e-14)


def test_ladder_coupling_rejects_unlocked_phases():
    cs = CouplingSet(np.array([0.1, 0.1j]))
    with pytest.raises(ValueError):
        cs.ladder_coupling([0.0, 0.0])
    with pytest.raises(ValueError):
        CouplingSet(np.array([0.1, 0.2])).ladder_coupling([0.0, 0.0])


@pytest.mark.parametrize("beta", [0.0, 1.0, -0.2, 1.2])
def test_invalid_beta(beta):
    with pytest.raises(ValueError):
        ElectronParams(beta)


def test_ensemble_validation():
    with pytest.raises(ValueError):
        EmitterEnsemble([0.0, 0.0], 10.0, 500.0)
    with pytest.raises(ValueError):
        EmitterEnsemble([0.0, 1.0], [10.0, -1.0], 500.0)
    with pytest.raises(ValueError):
        EmitterEnsemble([0.0], 10.0, -5.0)
    with pytest.raises(ValueError):
        EmitterEnsemble([0.0], 10.0, 500.0, refr_index=0.9)
    with pytest.raises(IndexError):
        coupling_constant(ElectronParams(0.5), single(), 3)


def test_energy_wavelength_round_trip():
    assert wavelength_to_energy(500.0) == pytest.approx(2.479683968, rel=1e-9)
    assert energy_to_wavelength(wavelength_to_energy(123.4)) == pytest.approx(123.4, rel=1e-15)
    ens = EmitterEnsemble.from_energy([0.0], 5.0, 2.0)
    assert ens.hbar_omega0 == pytest.approx(2.0, rel=1e-15)


def test_spacing_detection():
    assert EmitterEnsemble.periodic(5, 10.0, 4.5).spacing() == pytest.approx(10.0)
    assert EmitterEnsemble([0.0, 10.0, 25.0], 5.0, 4.5).spacing() is None
    assert EmitterEnsemble([0.0], 5.0, 4.5).spacing() is None
