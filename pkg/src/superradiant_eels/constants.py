"""Physical constants in the package unit system.

Lengths are in nm, times in fs, energies in eV, dipoles in e*nm and
velocities as fractions of c.
"""

import math

HBAR_C = 197.3269804  # eV nm
C_LIGHT = 299.792458  # nm / fs
ALPHA = 7.2973525693e-3  # fine-structure constant e^2 / (4 pi eps0 hbar c)
TWO_PI = 2.0 * math.pi


def wavelength_to_energy(lambda0: float) -> float:
    """Photon energy in eV for a vacuum wavelength in nm."""
    return TWO_PI * HBAR_C / lambda0


def energy_to_wavelength(hbar_omega0: float) -> float:
    return TWO_PI * HBAR_C / hbar_omega0
