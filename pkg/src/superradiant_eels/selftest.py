"""Reduced-scale invariant checks run by ``superradiant-eels selftest``."""

from __future__ import annotations

import math
import time

import numpy as np
from scipy.special import jv

from .dynamics import dicke_cascade
from .eels import EELSSpectrum, effective_coupling, spectrum_from_joint, spectrum_from_ladder
from .fullspace import full_evolution
from .ladder import LadderState
from .reconstruct import recover_populations
from .scattering import exact_elements


def _unitarity():
    worst = 0.0
    for N in (1, 2, 5, 20):
        for g in (0.1, 1.0, 1.5):
            s = exact_elements(N, g).s
            worst = max(worst, float(np.max(np.abs(np.sum(np.abs(s) ** 2, axis=0) - 1))))
    return worst < 1e-9, f"max column-norm error {worst:.2e}"


def _oracle():
    worst = 0.0
    for N in (2, 4):
        for g in (0.1, 1.0):
            k = exact_elements(N, g)
            for m in range(N + 1):
                amps = np.zeros(N + 1, dtype=complex)
                amps[m] = 1
                j = full_evolution(np.full(N, np.conj(g)), LadderState.pure(amps), np.zeros(N))
                pl = spectrum_from_joint(j).padded(N).probabilities
                worst = max(worst, float(np.max(np.abs(pl - k.D[:, m]))))
    return worst < 1e-8, f"max |P_full - P_ladder| {worst:.2e}"


def _bessel_identity():
    worst = 0.0
    for x in (0.25, 0.5, 1.0):
        L = 60
        ell = np.arange(-L, L + 1)
        p = jv(ell, 2 * x) ** 2
        worst = max(worst, abs(effective_coupling(EELSSpectrum(p / p.sum())) - x))
    return worst < 1e-10, f"max |g_eff - x| {worst:.2e}"


def _round_trip():
    rng = np.random.default_rng(0)
    k = exact_elements(10, 0.2)
    worst = 0.0
    for _ in range(5):
        p = rng.dirichlet(np.ones(11))
        rep = recover_populations(spectrum_from_ladder(k, LadderState.diagonal(p)), k)
        worst = max(worst, float(np.abs(rep.populations - p).sum()))
    return worst < 1e-6, f"max L1 error {worst:.2e}"


def _dicke_pair():
    gamma = 1.0
    t = np.linspace(0, 3, 31)
    tr = dicke_cascade(2, gamma, LadderState.basis(2, 2), t)
    exact2 = np.exp(-2 * gamma * t)
    exact1 = 2 * gamma * t * np.exp(-2 * gamma * t)
    err = max(np.max(np.abs(tr.populations[:, 2] - exact2)), np.max(np.abs(tr.populations[:, 1] - exact1)))
    return err < 1e-8, f"max population error {err:.2e}"


CHECKS = {
    "unitarity": _unitarity,
    "ladder_vs_full_space": _oracle,
    "bessel_identity": _bessel_identity,
    "reconstruction_round_trip": _round_trip,
    "dicke_two_emitters": _dicke_pair,
}


def run_selftest(verbose: bool = True) -> bool:
    ok_all = True
    for name, fn in CHECKS.items():
        t0 = time.perf_counter()
        ok, detail = fn()
        ok_all &= ok
        if verbose:
            print(f"{'PASS' if ok else 'FAIL'} {name}: {detail} ({time.perf_counter() - t0:.2f} s)")
    return ok_all
