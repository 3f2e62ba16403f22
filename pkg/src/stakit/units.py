"""Physical constants and natural-unit conversions.

Everything dynamical in this package is computed with hbar = c = 1 and
energies measured in units of a reference mass (usually the electron's).
This module holds the CODATA anchors needed to translate those numbers
into laboratory units: electronvolts, angstroms, seconds.
"""

from __future__ import annotations

# CODATA 2018 recommended values.
FINE_STRUCTURE = 7.2973525693e-3
"""Dimensionless electromagnetic coupling e^2 / (4 pi eps0 hbar c)."""

HBAR_EV_S = 6.582119569e-16
"""Reduced Planck constant in eV * s."""

HBAR_C_EV_ANGSTROM = 1973.269804
"""hbar * c in eV * angstrom; converts inverse lengths to energies."""

ELECTRON_MASS_EV = 510998.95
"""Electron rest energy m c^2 in eV."""

SPEED_OF_LIGHT_M_S = 299792458.0
"""Exact SI value of c in m / s."""


def inverse_time_per_mass(mass_ev: float = ELECTRON_MASS_EV) -> float:
    """Frequency scale m c^2 / hbar in s^-1 for a rest energy in eV."""
    return mass_ev / HBAR_EV_S


def inverse_length_per_mass(mass_ev: float = ELECTRON_MASS_EV) -> float:
    """Inverse Compton wavelength m c / hbar in m^-1 for a rest energy in eV."""
    # hbar c in eV*m = HBAR_C_EV_ANGSTROM * 1e-10.
    return mass_ev / (HBAR_C_EV_ANGSTROM * 1.0e-10)


def rate_density_si(rate_natural: float, mass_ev: float = ELECTRON_MASS_EV) -> float:
    """Convert a rate per area from mass^3 natural units to s^-1 m^-2.

    One factor of mass becomes a frequency, the remaining two become
    inverse lengths squared.
    """
    return rate_natural * inverse_time_per_mass(mass_ev) * inverse_length_per_mass(mass_ev) ** 2
