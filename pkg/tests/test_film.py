"""Film physics: resonance, impedance, displacement, susceptibility, noise."""

import dataclasses

import numpy as np
import pytest
from scipy.optimize import brentq

from poemrx import film
from poemrx.errors import (
    ApproximationDomain,
    NonPhysicalCoupling,
    ResonanceSingularity,
    TangentPole,
    ThinFilmWarning,
)
from poemrx.film import DriveSignal, FilmGeometry, FilmOscillator, NoiseStrength

from oracles import boundary_value_displacement


def test_phase_velocity_aln(material):
    assert film.phase_velocity(material) == pytest.approx(11268.083, rel=1e-6)


def test_phase_velocity_unit_ratio(material):
    mat = dataclasses.replace(material, c_d=material.rho, c_e=0.0, e33=0.0)
    assert film.phase_velocity(mat) == 1.0


def test_phase_velocity_density_scaling(material):
    heavy = dataclasses.replace(material, rho=4.0 * material.rho, c_e=0.0)
    assert film.phase_velocity(heavy) == pytest.approx(
        film.phase_velocity(material) / 2.0, rel=1e-12
    )


def test_coupling_kt2_aln(material):
    assert film.coupling_kt2(material) == pytest.approx(0.0719434, rel=1e-5)


def test_coupling_kt2_limits(material):
    uncoupled = dataclasses.replace(material, e33=0.0, c_e=0.0)
    assert film.coupling_kt2(uncoupled) == 0.0
    doubled = dataclasses.replace(material, e33=2.0 * material.e33, c_e=0.0)
    assert film.coupling_kt2(doubled) == pytest.approx(
        4.0 * film.coupling_kt2(material), rel=1e-12
    )


def test_coupling_kt2_nonphysical(material):
    # A valid material record always has k_t^2 = 1 - c_e/c_d < 1, so the
    # guard is probed on a record that skips construction-time checks.
    bad = object.__new__(film.MaterialParams)
    for name, value in (("c_d", 1.0), ("e33", 2.0), ("eps_s", 1.0), ("rho", 1.0)):
        object.__setattr__(bad, name, value)
    with pytest.raises(NonPhysicalCoupling):
        film.coupling_kt2(bad)


def test_series_resonance_near_fem_peak(material, geometry):
    f_s = film.series_resonance(material, geometry) / (2.0 * np.pi)
    assert f_s == pytest.approx(994.054e6, rel=1e-5)
    assert abs(f_s - 1001e6) / 1001e6 < 0.02


def test_series_resonance_half_wave_limit(material, geometry):
    uncoupled = dataclasses.replace(material, e33=0.0, c_e=0.0)
    expected = np.pi * film.phase_velocity(uncoupled) / geometry.thickness
    assert film.series_resonance(uncoupled, geometry) == pytest.approx(
        expected, rel=1e-9
    )


def test_series_resonance_inverse_thickness(material, geometry):
    doubled = dataclasses.replace(geometry, thickness=2.0 * geometry.thickness)
    assert film.series_resonance(material, doubled) == pytest.approx(
        film.series_resonance(material, geometry) / 2.0, rel=1e-12
    )


def _zero_impedance_root_hz(material, geometry):
    """Frequency where k_t^2*tan(x) = x, found by bracketed root search."""
    kt2 = film.coupling_kt2(material)
    x = brentq(
        lambda x: kt2 * np.tan(x) - x, 1.2, np.pi / 2.0 - 1e-9, xtol=1e-15
    )
    v_a = film.phase_velocity(material)
    return x * v_a / (np.pi * geometry.thickness)


def test_impedance_minimum_at_resonance_root(material, geometry):
    f_root = _zero_impedance_root_hz(material, geometry)
    for n_points in (2001, 20001):
        freqs = np.linspace(0.95e9, 1.05e9, n_points)
        z = film.input_impedance(material, geometry, 2.0 * np.pi * freqs)
        f_min = freqs[np.argmin(np.abs(z))]
        step = freqs[1] - freqs[0]
        assert abs(f_min - f_root) <= step


def test_impedance_pure_capacitor_without_coupling(material, geometry):
    uncoupled = dataclasses.replace(material, e33=0.0, c_e=0.0)
    omega = 2.0 * np.pi * 0.7e9
    z = film.input_impedance(uncoupled, geometry, omega)
    c0 = film.static_capacitance(uncoupled, geometry)
    assert z == pytest.approx(1.0 / (1j * omega * c0), rel=1e-12)


def test_impedance_blocks_dc(material, geometry):
    z_low = film.input_impedance(material, geometry, 2.0 * np.pi * 1e3)
    z_mid = film.input_impedance(material, geometry, 2.0 * np.pi * 1e8)
    assert abs(z_low) > 1e4 * abs(z_mid)
    assert z_low.imag < 0  # capacitive below resonance


def test_impedance_tangent_pole(material, geometry):
    # beta*L_T = pi puts tan at its pole
    omega_pole = np.pi * film.phase_velocity(material) / geometry.thickness
    with pytest.raises(TangentPole):
        film.input_impedance(material, geometry, omega_pole)


def test_admittance_peak_near_published_value(material, geometry):
    peak = film.admittance_peak(material, geometry, 0.85e9, 1.15e9, 4001)
    assert abs(peak - 1001e6) / 1001e6 < 0.02


def test_admittance_two_point_sweep(material, geometry):
    freqs, y, poles = film.admittance_spectrum(
        material, geometry, 0.85e9, 1.15e9, 2
    )
    assert freqs.tolist() == [0.85e9, 1.15e9]
    assert len(y) == 2 and not poles.any()


def test_admittance_scales_with_area(material, geometry):
    bigger = dataclasses.replace(geometry, length=2.0 * geometry.length)
    _, y1, _ = film.admittance_spectrum(material, geometry, 0.9e9, 1.1e9, 64)
    _, y2, _ = film.admittance_spectrum(material, bigger, 0.9e9, 1.1e9, 64)
    assert np.allclose(y2, 2.0 * y1, rtol=1e-12)


def test_admittance_marks_poles_without_failing(material, geometry):
    f_pole = film.phase_velocity(material) / geometry.thickness / 2.0
    freqs, y, poles = film.admittance_spectrum(
        material, geometry, f_pole - 1.0, f_pole + 1.0, 3
    )
    assert poles[1] and not poles[0] and not poles[2]
    assert np.isnan(y[1].real) and np.isfinite(y[0].real)


def test_undamped_displacement_zero_drive(material, geometry):
    drive = DriveSignal(amplitude=0.0, angular_frequency=2.0 * np.pi * 0.5e9)
    assert film.surface_displacement_undamped(material, geometry, drive) == 0.0


def test_undamped_displacement_matches_boundary_value_oracle(material, geometry):
    omega = 0.5 * film.series_resonance(material, geometry)
    drive = DriveSignal(amplitude=1.0, angular_frequency=omega)
    u = film.surface_displacement_undamped(material, geometry, drive)
    u_ref = boundary_value_displacement(material, geometry, drive)
    assert u == pytest.approx(u_ref, rel=1e-10)


def test_undamped_displacement_linear_in_drive(material, geometry):
    omega = 0.37 * film.series_resonance(material, geometry)
    u = {
        v0: film.surface_displacement_undamped(
            material, geometry, DriveSignal(v0, omega)
        )
        for v0 in (0.5, 1.0, 2.0)
    }
    assert u[1.0] == pytest.approx(2.0 * u[0.5], rel=1e-12)
    assert u[2.0] == pytest.approx(4.0 * u[0.5], rel=1e-12)


def test_undamped_displacement_diverges_at_resonance(material, geometry):
    kt2 = film.coupling_kt2(material)
    x = brentq(lambda x: kt2 * np.tan(x) - x, 1.2, np.pi / 2.0 - 1e-9, xtol=1e-15)
    omega = 2.0 * x * film.phase_velocity(material) / geometry.thickness
    with pytest.raises(ResonanceSingularity):
        film.surface_displacement_undamped(
            material, geometry, DriveSignal(1.0, omega)
        )


def test_damped_displacement_published_amplitude(material, geometry):
    drive = DriveSignal(1.0, film.series_resonance(material, geometry))
    u = film.surface_displacement_damped(material, geometry, drive, q=1000.0)
    assert abs(u) == pytest.approx(1.5e-9, rel=0.01)
    # phase is -90 degrees relative to the drive
    assert np.angle(u) == pytest.approx(-np.pi / 2.0, abs=1e-12)


def test_damped_displacement_closed_form_magnitude(material, geometry):
    drive = DriveSignal(0.7, film.series_resonance(material, geometry))
    q = 2345.0
    u = film.surface_displacement_damped(material, geometry, drive, q)
    expected = 4.0 * q * drive.amplitude * material.e33 / (np.pi**2 * material.c_d)
    assert abs(u) == pytest.approx(expected, rel=1e-12)


def test_damped_displacement_scalings(material, geometry):
    omega_s = film.series_resonance(material, geometry)
    base = film.surface_displacement_damped(
        material, geometry, DriveSignal(1.0, omega_s), 1000.0
    )
    assert film.surface_displacement_damped(
        material, geometry, DriveSignal(0.0, omega_s), 1000.0
    ) == 0.0
    doubled_q = film.surface_displacement_damped(
        material, geometry, DriveSignal(1.0, omega_s), 2000.0
    )
    assert abs(doubled_q) == pytest.approx(2.0 * abs(base), rel=1e-12)


def test_damped_displacement_warns_off_resonance(material, geometry):
    omega = 1.2 * film.series_resonance(material, geometry)
    with pytest.warns(ApproximationDomain):
        film.surface_displacement_damped(
            material, geometry, DriveSignal(1.0, omega), 1000.0
        )


def test_susceptibility_on_resonance_is_imaginary(oscillator):
    chi = film.mechanical_susceptibility(oscillator, oscillator.omega_m)
    expected = 1j / (oscillator.m_eff * oscillator.omega_m * oscillator.gamma_m)
    assert chi == pytest.approx(expected, rel=1e-12)


def test_susceptibility_static_limit(oscillator):
    chi = film.mechanical_susceptibility(oscillator, 0.0)
    assert chi == pytest.approx(
        1.0 / (oscillator.m_eff * oscillator.omega_m**2), rel=1e-12
    )
    assert chi.imag == 0.0


def test_susceptibility_half_power_points():
    osc = FilmOscillator(m_eff=1e-9, omega_m=2.0 * np.pi * 1e9, gamma_m=2.0 * np.pi * 1e5)
    assert osc.q == pytest.approx(1e4)
    peak = abs(film.mechanical_susceptibility(osc, osc.omega_m)) ** 2
    for sign in (-1.0, 1.0):
        val = abs(
            film.mechanical_susceptibility(osc, osc.omega_m + sign * osc.gamma_m / 2)
        ) ** 2
        assert val / peak == pytest.approx(0.5, abs=2.0 / osc.q)


def test_thermal_noise_calibrated_peak(oscillator):
    strength = film.noise_strength_for_peak(oscillator, 3.4e-55)
    psd = film.film_thermal_noise_psd(oscillator, strength, oscillator.omega_m)
    assert psd.value == pytest.approx(3.4e-55, rel=1e-12)


def test_thermal_noise_zero_strength(oscillator):
    psd = film.film_thermal_noise_psd(oscillator, NoiseStrength(0.0), 1e9)
    assert psd.value == 0.0


def test_thermal_noise_shape_factorization(oscillator):
    strength = NoiseStrength(1e-22)
    w1, w2 = 0.97 * oscillator.omega_m, 1.03 * oscillator.omega_m
    n1 = film.film_thermal_noise_psd(oscillator, strength, w1).value
    n2 = film.film_thermal_noise_psd(oscillator, strength, w2).value
    chi1 = abs(film.mechanical_susceptibility(oscillator, w1)) ** 2
    chi2 = abs(film.mechanical_susceptibility(oscillator, w2)) ** 2
    assert n1 / n2 == pytest.approx(chi1 / chi2, rel=1e-12)


def test_thermal_noise_depends_only_on_susceptibility(oscillator):
    # same |chi| -> same PSD, probed via the symmetric pair around the peak
    strength = NoiseStrength(3e-23)
    grid = np.linspace(0.9, 1.1, 41) * oscillator.omega_m
    psd = film.film_thermal_noise_psd(oscillator, strength, grid).value
    chi2 = np.abs(film.mechanical_susceptibility(oscillator, grid)) ** 2
    assert np.allclose(psd, 2.0 * strength.alpha_ex * chi2, rtol=1e-13)


def test_material_consistency_check(material):
    with pytest.raises(ValueError, match="inconsistent elastic moduli"):
        dataclasses.replace(material, c_e=2.0 * material.c_e)
    # supplying the consistent pair is accepted
    ok = dataclasses.replace(material)
    assert ok.c_d == pytest.approx(ok.c_e + ok.e33**2 / ok.eps_s, rel=1e-9)


def test_geometry_thin_film_warning():
    with pytest.warns(ThinFilmWarning):
        FilmGeometry(length=50e-6, width=50e-6, thickness=10e-6)


def test_oscillator_requires_consistent_q():
    with pytest.raises(ValueError, match="q != omega_m/gamma_m"):
        FilmOscillator(m_eff=1e-9, omega_m=1e9, gamma_m=1e6, q=500.0)


def test_fdt_strength_matches_convention(oscillator):
    from scipy import constants

    s = film.fdt_noise_strength(oscillator, 300.0)
    assert s.alpha_ex == pytest.approx(
        2.0 * oscillator.m_eff * oscillator.gamma_m * constants.k * 300.0, rel=1e-12
    )
