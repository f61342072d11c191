"""Physical constants and conversions between the I/O units and SI.

The core works in SI throughout. Users talk in Å, eV, Å³ (polarisability
volume), Mb (cross sections), eV·Å⁶ (C6) and eV·Å² (C2); everything that
crosses the boundary goes through this module.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Dict

from scipy import constants as sp

from .errors import UnitError, ValidationError


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA values in SI units, taken from scipy.constants."""

    # Speed of light (m/s)
    c: float = sp.c

    # Reduced Planck constant (J*s)
    hbar: float = sp.hbar

    # Electron volt (J)
    eV: float = sp.eV

    # Vacuum permittivity (F/m)
    eps0: float = sp.epsilon_0

    # Vacuum permeability (N/A^2)
    mu0: float = sp.mu_0

    @property
    def hbar_ev(self) -> float:
        """Reduced Planck constant in eV*s."""
        return self.hbar / self.eV


CONSTANTS = PhysicalConstants()

ANGSTROM = 1e-10
NANOMETER = 1e-9
MEGABARN = 1e-22

LENGTH_UNITS: Dict[str, float] = {
    "A": ANGSTROM,
    "Å": ANGSTROM,
    "angstrom": ANGSTROM,
    "nm": NANOMETER,
    "m": 1.0,
}

VOLUME_UNITS: Dict[str, float] = {
    "A3": ANGSTROM ** 3,
    "Å3": ANGSTROM ** 3,
    "Å³": ANGSTROM ** 3,
    "nm3": NANOMETER ** 3,
    "m3": 1.0,
}

AREA_UNITS: Dict[str, float] = {
    "Mb": MEGABARN,
    "A2": ANGSTROM ** 2,
    "Å2": ANGSTROM ** 2,
    "cm2": 1e-4,
    "m2": 1.0,
}

# Tags accepted by convert_energy_frequency; "wavelength-A" is a vacuum
# wavelength in Å, the others are linear in ω.
FREQUENCY_UNITS = ("eV", "rad/s", "Hz", "wavelength-A", "wavelength-Å")

_QUANTITY_RE = re.compile(
    r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(\S.*?)?\s*$"
)


def _lookup(table: Dict[str, float], unit: str, what: str) -> float:
    try:
        return table[unit]
    except KeyError:
        known = ", ".join(sorted(table))
        raise UnitError(f"Unknown {what} unit '{unit}' (known: {known})")


def convert_length(value: float, from_unit: str, to_unit: str) -> float:
    """Convert a length between Å, nm and m."""
    return value * _lookup(LENGTH_UNITS, from_unit, "length") / _lookup(
        LENGTH_UNITS, to_unit, "length")


def convert_volume(value: float, from_unit: str, to_unit: str) -> float:
    return value * _lookup(VOLUME_UNITS, from_unit, "volume") / _lookup(
        VOLUME_UNITS, to_unit, "volume")


def convert_area(value: float, from_unit: str, to_unit: str) -> float:
    return value * _lookup(AREA_UNITS, from_unit, "area") / _lookup(
        AREA_UNITS, to_unit, "area")


def convert_energy_frequency(value: float, from_unit: str, to_unit: str) -> float:
    """Convert between photon energy (eV), angular frequency (rad/s),
    frequency (Hz) and vacuum wavelength in Å.

    Goes through the angular frequency, so any pair of tags works.
    """
    return _from_omega(_to_omega(value, from_unit), to_unit)


def _to_omega(value: float, unit: str) -> float:
    if unit == "eV":
        return value / CONSTANTS.hbar_ev
    if unit == "rad/s":
        return value
    if unit == "Hz":
        return 2.0 * math.pi * value
    if unit in ("wavelength-A", "wavelength-Å"):
        return omega_from_wavelength(value * ANGSTROM)
    raise UnitError(f"Unknown energy/frequency unit '{unit}' "
                    f"(known: {', '.join(FREQUENCY_UNITS)})")


def _from_omega(omega: float, unit: str) -> float:
    if unit == "eV":
        return omega * CONSTANTS.hbar_ev
    if unit == "rad/s":
        return omega
    if unit == "Hz":
        return omega / (2.0 * math.pi)
    if unit in ("wavelength-A", "wavelength-Å"):
        return wavelength_from_omega(omega) / ANGSTROM
    raise UnitError(f"Unknown energy/frequency unit '{unit}' "
                    f"(known: {', '.join(FREQUENCY_UNITS)})")


def omega_from_wavelength(wavelength: float) -> float:
    """Angular frequency (rad/s) of a vacuum wavelength in meters."""
    if not wavelength > 0:
        raise ValidationError(f"Wavelength must be positive, got {wavelength}")
    return 2.0 * math.pi * CONSTANTS.c / wavelength


def wavelength_from_omega(omega: float) -> float:
    if not omega > 0:
        raise ValidationError(f"Angular frequency must be positive, got {omega}")
    return 2.0 * math.pi * CONSTANTS.c / omega


def wavenumber(omega: float) -> float:
    """k = ω/c in 1/m."""
    return omega / CONSTANTS.c


def retardation_length(omega: float) -> float:
    """c/ω = λ/2π; separations beyond this are retarded."""
    return CONSTANTS.c / omega


# ---- Rates and coefficients ----

def rate_to_width_ev(rate: float) -> float:
    """Decay rate Γ (1/s) to width ħΓ (eV)."""
    return rate * CONSTANTS.hbar_ev


def width_ev_to_rate(width: float) -> float:
    return width / CONSTANTS.hbar_ev


def c6_to_ev_a6(c6: float) -> float:
    """C6 in m⁶/s to the I/O unit eV·Å⁶ (width times distance⁶)."""
    return c6 * CONSTANTS.hbar_ev / ANGSTROM ** 6


def c6_from_ev_a6(value: float) -> float:
    return value * ANGSTROM ** 6 / CONSTANTS.hbar_ev


def c2_to_ev_a2(c2: float) -> float:
    return c2 * CONSTANTS.hbar_ev / ANGSTROM ** 2


def c2_from_ev_a2(value: float) -> float:
    return value * ANGSTROM ** 2 / CONSTANTS.hbar_ev


def polarizability_volume_from_a3(value: float) -> float:
    return value * ANGSTROM ** 3


def polarizability_volume_to_a3(value: float) -> float:
    return value / ANGSTROM ** 3


def cross_section_from_mb(value: float) -> float:
    return value * MEGABARN


# ---- Flag parsing ----

def parse_quantity(text: str, kind: str, default_unit: str) -> float:
    """Parse '10', '10nm', '1e-9 m', '26.8eV' into an SI value.

    kind is one of 'length' (→ m), 'volume' (→ m³), 'area' (→ m²) or
    'frequency' (→ rad/s). A bare number is read in default_unit.
    """
    match = _QUANTITY_RE.match(str(text))
    if not match:
        raise UnitError(f"Cannot parse quantity '{text}'")
    value = float(match.group(1))
    unit = match.group(2) or default_unit

    if kind == "length":
        return convert_length(value, unit, "m")
    if kind == "volume":
        return convert_volume(value, unit, "m3")
    if kind == "area":
        return convert_area(value, unit, "m2")
    if kind == "frequency":
        if unit in LENGTH_UNITS:
            # A bare length given for a frequency is read as a wavelength
            return omega_from_wavelength(convert_length(value, unit, "m"))
        return convert_energy_frequency(value, unit, "rad/s")
    raise UnitError(f"Unknown quantity kind '{kind}'")
