"""Tests for constants and unit conversions."""

import math

import pytest

from icd_photon.errors import UnitError, ValidationError
from icd_photon.units import (
    ANGSTROM,
    CONSTANTS,
    c2_from_ev_a2,
    c2_to_ev_a2,
    c6_from_ev_a6,
    c6_to_ev_a6,
    convert_area,
    convert_energy_frequency,
    convert_length,
    convert_volume,
    cross_section_from_mb,
    omega_from_wavelength,
    parse_quantity,
    polarizability_volume_from_a3,
    polarizability_volume_to_a3,
    rate_to_width_ev,
    retardation_length,
    wavelength_from_omega,
    wavenumber,
    width_ev_to_rate,
)


class TestConstants:
    def test_codata_values(self):
        assert CONSTANTS.c == 299792458.0
        assert CONSTANTS.hbar_ev == pytest.approx(6.582119569e-16, rel=1e-9)

    def test_vacuum_relation(self):
        assert CONSTANTS.eps0 * CONSTANTS.mu0 * CONSTANTS.c ** 2 == pytest.approx(1.0, rel=1e-9)

    def test_frozen(self):
        with pytest.raises(Exception):
            CONSTANTS.c = 1.0


class TestConversions:
    def test_length(self):
        assert convert_length(10.0, "A", "nm") == pytest.approx(1.0)
        assert convert_length(1.0, "nm", "m") == pytest.approx(1e-9)
        assert convert_length(3.0, "Å", "A") == pytest.approx(3.0)

    def test_volume_and_area(self):
        assert convert_volume(1.0, "nm3", "A3") == pytest.approx(1000.0)
        assert convert_area(1.0, "Mb", "m2") == pytest.approx(1e-22)
        assert cross_section_from_mb(2.5) == pytest.approx(2.5e-22)

    def test_unknown_unit(self):
        with pytest.raises(UnitError, match="furlong"):
            convert_length(1.0, "furlong", "m")
        with pytest.raises(UnitError):
            convert_energy_frequency(1.0, "kcal", "eV")

    def test_energy_frequency_paths_agree(self):
        omega = convert_energy_frequency(26.8, "eV", "rad/s")
        assert convert_energy_frequency(omega, "rad/s", "eV") == pytest.approx(26.8)
        hz = convert_energy_frequency(26.8, "eV", "Hz")
        assert hz == pytest.approx(omega / (2 * math.pi))

    def test_480_angstrom_photon(self):
        energy = convert_energy_frequency(480.0, "wavelength-A", "eV")
        # hc = 12398.4 eV·Å
        assert energy == pytest.approx(12398.42 / 480.0, rel=1e-5)

    def test_wavelength_round_trip(self):
        omega = omega_from_wavelength(480 * ANGSTROM)
        assert wavelength_from_omega(omega) == pytest.approx(480 * ANGSTROM)
        assert wavenumber(omega) == pytest.approx(2 * math.pi / (480 * ANGSTROM))

    def test_retardation_length(self):
        omega = omega_from_wavelength(480 * ANGSTROM)
        assert retardation_length(omega) / ANGSTROM == pytest.approx(76.39, abs=0.01)

    def test_non_positive_wavelength(self):
        with pytest.raises(ValidationError):
            omega_from_wavelength(0.0)
        with pytest.raises(ValidationError):
            wavelength_from_omega(-1.0)

    def test_width_rate(self):
        rate = width_ev_to_rate(1e-3)
        assert rate == pytest.approx(1e-3 / CONSTANTS.hbar_ev)
        assert rate_to_width_ev(rate) == pytest.approx(1e-3)

    def test_coefficients(self):
        c6 = c6_from_ev_a6(3.6)
        # 3.6 eV·Å⁶ = 3.6e-60 eV·m⁶ over ħ
        assert c6 == pytest.approx(3.6e-60 / CONSTANTS.hbar_ev)
        assert c6_to_ev_a6(c6) == pytest.approx(3.6)
        assert c2_to_ev_a2(c2_from_ev_a2(0.7)) == pytest.approx(0.7)

    def test_polarizability_volume(self):
        alpha = polarizability_volume_from_a3(0.205)
        assert alpha == pytest.approx(0.205e-30)
        assert polarizability_volume_to_a3(alpha) == pytest.approx(0.205)


class TestParseQuantity:
    def test_bare_number_uses_default_unit(self):
        assert parse_quantity("10", "length", "A") == pytest.approx(1e-9)
        assert parse_quantity("0.205", "volume", "A3") == pytest.approx(0.205e-30)

    def test_explicit_suffix(self):
        assert parse_quantity("10nm", "length", "A") == pytest.approx(1e-8)
        assert parse_quantity("1e-9 m", "length", "A") == pytest.approx(1e-9)
        assert parse_quantity("12 Mb", "area", "Mb") == pytest.approx(1.2e-21)

    def test_frequency(self):
        omega = parse_quantity("26.8eV", "frequency", "eV")
        assert omega == pytest.approx(26.8 / CONSTANTS.hbar_ev)
        assert parse_quantity("1e16 rad/s", "frequency", "eV") == pytest.approx(1e16)

    def test_length_suffix_on_frequency_is_a_wavelength(self):
        omega = parse_quantity("480A", "frequency", "eV")
        assert omega == pytest.approx(omega_from_wavelength(480 * ANGSTROM))

    def test_garbage(self):
        with pytest.raises(UnitError):
            parse_quantity("ten", "length", "A")
        with pytest.raises(UnitError):
            parse_quantity("10 parsecs", "length", "A")
        with pytest.raises(UnitError):
            parse_quantity("10", "mass", "kg")
