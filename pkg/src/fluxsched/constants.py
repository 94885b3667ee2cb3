"""Physical constants and laboratory-unit conversions.

Every Hamiltonian in this package is expressed in plain frequency units,
GHz (energy divided by the Planck constant).  Circuit parameters use
laboratory units throughout: capacitance in fF, inductance in pH,
junction critical current in nA.  Flux biases are loop phases in
radians; the CSV surface uses milli flux quanta.
"""

import math

PHI_0 = 2.067833848e-15
"""Magnetic flux quantum, Wb."""

E_CHARGE = 1.602176634e-19
"""Elementary charge, C."""

H_PLANCK = 6.62607015e-34
"""Planck constant, J s."""

PHI_0_BAR = PHI_0 / (2.0 * math.pi)
"""Reduced flux quantum, Wb/rad."""


def charging_energy(c_fF):
    """Charging energy (2e)^2 / 2C of a capacitance in GHz.

    Arguments:
        c_fF: capacitance in fF.
    """
    if c_fF <= 0.0:
        raise ValueError(f"capacitance must be positive, got {c_fF} fF")
    return (2.0 * E_CHARGE) ** 2 / (2.0 * c_fF * 1e-15) / H_PLANCK / 1e9


def inductive_energy(l_pH):
    """Inductive energy (Phi_0/2pi)^2 / 2L of an inductance in GHz.

    Arguments:
        l_pH: inductance in pH.
    """
    if l_pH <= 0.0:
        raise ValueError(f"inductance must be positive, got {l_pH} pH")
    return PHI_0_BAR**2 / (2.0 * l_pH * 1e-12) / H_PLANCK / 1e9


def josephson_energy(i_nA):
    """Josephson energy (Phi_0/2pi) * I_c of a junction in GHz.

    Arguments:
        i_nA: junction critical current in nA.
    """
    if i_nA <= 0.0:
        raise ValueError(f"critical current must be positive, got {i_nA} nA")
    return PHI_0_BAR * i_nA * 1e-9 / H_PLANCK / 1e9


def rad_to_mphi0(phi_rad):
    """Convert a loop phase in radians to milli flux quanta."""
    return phi_rad / (2.0 * math.pi) * 1e3


def mphi0_to_rad(phi_mphi0):
    """Convert a flux in milli flux quanta to a loop phase in radians."""
    return phi_mphi0 * (2.0 * math.pi) / 1e3
