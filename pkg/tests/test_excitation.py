import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from superradiant_eels.coupling import ElectronParams, EmitterEnsemble, uniform_couplings
from superradiant_eels.excitation import (
    ExcitationPulse,
    ExperimentTimings,
    cherenkov_angle,
    dipole_map,
    excite,
    laser_phases,
    resonance_angles,
    sweep,
)
from superradiant_eels.fullspace import CapacityError
from superradiant_eels.ladder import product_to_ladder

E07 = ElectronParams(0.7)


def chain(N=10, dz=10.0, lam=4.5, n=1.5, z0=0.0):
    return EmitterEnsemble.periodic(N, dz, lam, z0=z0, refr_index=n)


def test_cherenkov_examples():
    assert math.degrees(cherenkov_angle(E07, 1.5)) == pytest.approx(17.7528, abs=1e-4)
    assert cherenkov_angle(ElectronParams(0.5), 2.0) == 0.0
    assert cherenkov_angle(ElectronParams(0.5), 1.2) is None
    with pytest.raises(ValueError):
        cherenkov_angle(E07, 0.8)


def test_pulse_validation():
    assert ExcitationPulse(0.1, tau=2.0, rabi_rate=0.5).pulse_area == 1.0
    for kw in ({"tau": 1.0}, {"tau": -1.0, "rabi_rate": 1.0}, {"tau": 1.0, "rabi_rate": 0.0}):
        with pytest.raises(ValueError):
            ExcitationPulse(0.1, **kw)
    with pytest.raises(ValueError):
        ExcitationPulse(2.0, area=1.0)


@given(st.integers(1, 12), st.floats(0.0, 2 * math.pi))
def test_cherenkov_excitation_lands_on_ladder(N, area):
    ens = chain(N)
    s = excite(ens, ExcitationPulse(cherenkov_angle(E07, 1.5), area=area))
    assert product_to_ladder(s, ens.electron_phases(E07)) is not None


def test_zero_area_and_normal_incidence():
    ens = chain(5)
    s = excite(ens, ExcitationPulse(0.3, area=0.0))
    assert np.all(s.polar == 0)
    assert np.allclose(laser_phases(ens, math.pi / 2), 0.0, atol=1e-12)


def test_dipole_map_examples():
    ens = chain()
    res = resonance_angles(ens, E07)
    for theta in res.values():
        assert dipole_map(ens, E07, [theta])[0] == pytest.approx(100.0, rel=1e-9)
    single = EmitterEnsemble([3.0], 5.0, 4.5, refr_index=1.5)
    assert np.allclose(dipole_map(single, E07, np.linspace(0, 1.5, 7)), 1.0)
    with pytest.raises(ValueError):
        dipole_map(ens, E07, [])


def test_resonance_angles_example():
    res = {q: math.degrees(t) for q, t in resonance_angles(chain(), E07).items()}
    assert res[0] == pytest.approx(17.7528, abs=1e-3)
    assert res[-1] == pytest.approx(49.27, abs=0.01)
    assert res[-2] == pytest.approx(69.37, abs=0.01)
    assert all(q <= 0 for q in res)
    assert resonance_angles(chain(3), E07) == resonance_angles(chain(40), E07)
    with pytest.raises(ValueError):
        resonance_angles(EmitterEnsemble([0.0, 1.0, 3.0], 5.0, 4.5), E07)


@given(st.floats(0.0, math.pi / 2))
def test_dipole_map_bounded(theta):
    v = dipole_map(chain(), E07, [theta])[0]
    assert 0.0 <= v <= 100.0 + 1e-9


def test_sweep_argmax_and_translation_invariance():
    ens = chain(6)
    deg = np.arange(14.0, 22.01, 0.5)
    kw = dict(g_mag=0.5, pathway="exact_full")
    a = sweep(ens, E07, np.radians(deg), [math.pi / 2], **kw)
    b = sweep(chain(6, z0=37.0), E07, np.radians(deg), [math.pi / 2], **kw)
    assert np.all(a.g_eff >= 0)
    assert abs(math.degrees(a.argmax_angle()) - 17.75) <= 0.5
    assert np.allclose(a.g_eff, b.g_eff, atol=1e-10)


def test_pathways_agree_at_phase_matching():
    ens = chain(6)
    th = np.array([cherenkov_angle(E07, 1.5)])
    areas = np.array([0.4, math.pi / 2, 2.5])
    full = sweep(ens, E07, th, areas, g_mag=0.5, pathway="exact_full")
    fast = sweep(ens, E07, th, areas, g_mag=0.5, pathway="ladder_fast")
    assert fast.ladder_hits == 3
    assert np.allclose(full.g_eff, fast.g_eff, atol=1e-8)


def test_area_dependence_small_coupling_expansion():
    # to O(g^2): g_eff^2 = g^2 (N^2/4 sin^2(phi) + N/2 (1 - sin^2(phi)/2)), coherent plus incoherent part
    N, g = 8, 0.01
    th = [cherenkov_angle(E07, 1.5)]
    tau = np.linspace(0.5, 5.5, 11)
    res = sweep(chain(N), E07, th, durations=tau, rabi_rate=0.5, g_mag=g, pathway="ladder_fast")
    s2 = np.sin(0.5 * tau) ** 2
    expected = g * np.sqrt(N**2 / 4 * s2 + N / 2 * (1 - s2 / 2))
    assert np.allclose(res.g_eff[0], expected, rtol=1e-3)


def test_area_dependence_follows_sine_for_large_ensembles():
    N, g = 400, 1e-4
    th = [cherenkov_angle(E07, 1.5)]
    areas = np.linspace(0.5, math.pi - 0.5, 9)
    res = sweep(chain(N), E07, th, areas, g_mag=g, pathway="ladder_fast")
    assert np.allclose(res.g_eff[0], 0.5 * N * g * np.sin(areas), rtol=0.05)


def test_sweep_is_deterministic_across_workers():
    ens = chain(5)
    deg = np.radians(np.arange(10.0, 30.0, 2.0))
    a = sweep(ens, E07, deg, [1.0, 2.0], g_mag=0.3)
    b = sweep(ens, E07, deg, [1.0, 2.0], g_mag=0.3, workers=4)
    assert np.array_equal(a.g_eff, b.g_eff)


def test_bandwidth_model_requires_seed_and_is_reproducible():
    ens = chain(4)
    th = np.radians([17.0, 18.0])
    with pytest.raises(ValueError):
        sweep(ens, E07, th, durations=[2.0], rabi_rate=0.7, g_mag=0.3, bandwidth_samples=4)
    a = sweep(ens, E07, th, durations=[2.0], rabi_rate=0.7, g_mag=0.3, bandwidth_samples=4, seed=5)
    b = sweep(ens, E07, th, durations=[2.0], rabi_rate=0.7, g_mag=0.3, bandwidth_samples=4, seed=5)
    assert np.array_equal(a.g_eff, b.g_eff)


def test_sweep_validation():
    ens = chain(4)
    with pytest.raises(ValueError):
        sweep(ens, E07, np.radians([20.0, 10.0]), [1.0], g_mag=0.3)
    with pytest.raises(ValueError):
        sweep(ens, E07, np.radians([10.0]), [1.0], g_mag=0.3, pathway="magic")
    with pytest.raises(CapacityError):
        sweep(chain(20), E07, np.radians([10.0]), [1.0], g_mag=0.3)
    couplings = uniform_couplings(0.3, chain(20), E07)
    res = sweep(chain(20), E07, [cherenkov_angle(E07, 1.5)], [1.0], couplings=couplings, pathway="ladder_fast")
    assert res.ladder_hits == 1


def test_timing_warning():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert ExperimentTimings(10.0, 50.0).check()
    with pytest.warns(RuntimeWarning):
        assert not ExperimentTimings(100.0, 50.0).check()
