"""Electron energy-loss spectroscopy of collectively excited emitter chains.

A swift electron passing a chain of two-level emitters exchanges quanta
with the Dicke ladder of the ensemble. This package evaluates the exact
ladder scattering kernel, the resulting energy-loss spectra, tilted-pulse
phase matching, superradiant decay and the inversion from spectra back to
ladder populations.
"""

from .coupling import (
    CouplingSet,
    ElectronParams,
    EmitterEnsemble,
    coupling_constant,
    coupling_set,
    uniform_couplings,
)
from .dynamics import DickeTrajectory, TWAEnsemble, dicke_cascade, timeline_eels, twa_long_sample
from .eels import (
    EELSSpectrum,
    ElectronComb,
    effective_coupling,
    mixture,
    spectrum_from_joint,
    spectrum_from_ladder,
    spectrum_shaped,
)
from .excitation import (
    ExcitationPulse,
    ExperimentTimings,
    SweepResult,
    cherenkov_angle,
    dipole_map,
    excite,
    resonance_angles,
    sweep,
)
from .fullspace import CapacityError, JointState, full_evolution
from .ladder import LadderState, ProductState, ladder_from_pulse, product_to_ladder
from .reconstruct import ReconstructionReport, build_kernel_matrix, recover_populations
from .scattering import ScatteringKernel, bessel_approx_spectrum, exact_elements
from .special import bessel_k0, bessel_k1

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
