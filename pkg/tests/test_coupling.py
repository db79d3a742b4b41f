"""Coupled electro-mechanical transfer, optical spring, output PSD."""

import dataclasses

import numpy as np
import pytest

from poemrx import coupling
from poemrx.coupling import CavityCoupling, CircuitParams
from poemrx.errors import DomainMismatch
from poemrx.film import FilmOscillator, mechanical_susceptibility
from poemrx.psd import displacement_psd, phase_psd, voltage_psd


@pytest.fixture()
def cavity():
    return CavityCoupling(
        detuning=-2.0 * np.pi * 1e9,
        kappa=2.8e7,
        vacuum_coupling=2.0 * np.pi * 1e4,
        n_cav=1e12,
        g_opt=1.2e16,
    )


def test_circuit_susceptibility_on_resonance(circuit):
    chi = coupling.circuit_susceptibility(circuit, circuit.omega_lc)
    expected = 1j / (circuit.inductance * circuit.omega_lc * circuit.gamma_lc)
    assert chi == pytest.approx(expected, rel=1e-12)


def test_circuit_susceptibility_static(circuit):
    chi = coupling.circuit_susceptibility(circuit, 0.0)
    assert chi == pytest.approx(
        1.0 / (circuit.inductance * circuit.omega_lc**2), rel=1e-12
    )


def test_circuit_susceptibility_conjugate_symmetry(circuit):
    omega = 0.87 * circuit.omega_lc
    chi = coupling.circuit_susceptibility(circuit, omega)
    flipped = 1.0 / (
        circuit.inductance
        * (circuit.omega_lc**2 - omega**2 + 1j * omega * circuit.gamma_lc)
    )
    assert abs(chi) == pytest.approx(abs(flipped), rel=1e-12)
    assert np.conj(chi) == pytest.approx(flipped, rel=1e-12)


def test_effective_susceptibility_uncoupled(oscillator, circuit):
    free = dataclasses.replace(circuit, coupling=0.0)
    for omega in (0.0, 0.5 * oscillator.omega_m, oscillator.omega_m):
        assert coupling.effective_susceptibility(
            oscillator, free, omega
        ) == pytest.approx(mechanical_susceptibility(oscillator, omega), rel=1e-15)


def test_effective_susceptibility_weak_coupling_expansion(oscillator, circuit):
    omega = 1.01 * oscillator.omega_m
    chi_m = mechanical_susceptibility(oscillator, omega)
    chi_lc = coupling.circuit_susceptibility(circuit, omega)
    for g in (1e6, 3e6):
        weak = dataclasses.replace(circuit, coupling=g)
        chi_eff = coupling.effective_susceptibility(oscillator, weak, omega)
        first_order = chi_m + g**2 * chi_m**2 * chi_lc
        small = abs(g**2 * chi_m * chi_lc)
        assert small < 1e-3  # still inside the expansion's radius
        floor = 1e-12 * abs(chi_m)  # float noise of the two routes
        assert abs(chi_eff - first_order) <= 2.0 * abs(chi_m) * small**2 + floor


def test_effective_susceptibility_normal_mode_splitting():
    osc = FilmOscillator(m_eff=1.0, omega_m=1.0, gamma_m=1e-3)
    circ = CircuitParams(
        inductance=1.0, omega_lc=1.0, gamma_lc=1e-3, coupling=0.1, r_l=1.0, r_i=1.0
    )
    omega = np.linspace(0.8, 1.2, 4001)
    mag = np.abs(coupling.effective_susceptibility(osc, circ, omega))
    interior = (mag[1:-1] > mag[:-2]) & (mag[1:-1] > mag[2:])
    assert int(np.count_nonzero(interior)) == 2


def test_transfer_zero_without_coupling(oscillator, circuit):
    free = dataclasses.replace(circuit, coupling=0.0)
    omega = np.linspace(0.5, 1.5, 11) * oscillator.omega_m
    assert np.all(coupling.transfer_function(oscillator, free, omega) == 0.0)


def test_transfer_factorization(oscillator, circuit):
    omega = np.linspace(0.9, 1.1, 101) * oscillator.omega_m
    t = coupling.transfer_function(oscillator, circuit, omega)
    re_composed = (
        np.abs(circuit.coupling) ** 2
        * np.abs(coupling.effective_susceptibility(oscillator, circuit, omega)) ** 2
        * np.abs(coupling.circuit_susceptibility(circuit, omega)) ** 2
    )
    assert np.allclose(t, re_composed, rtol=1e-12)


def test_transfer_resonant_closed_form(oscillator, circuit):
    # matched resonances: direct substitution of the two susceptibilities
    omega_r = oscillator.omega_m
    matched = dataclasses.replace(circuit, omega_lc=omega_r)
    chi_m_inv = oscillator.m_eff * (-1j * omega_r * oscillator.gamma_m)
    chi_lc = 1.0 / (matched.inductance * (-1j * omega_r * matched.gamma_lc))
    expected = (
        abs(matched.coupling * chi_lc) ** 2
        / abs(chi_m_inv - matched.coupling**2 * chi_lc) ** 2
    )
    assert coupling.transfer_function(
        oscillator, matched, omega_r
    ) == pytest.approx(expected, rel=1e-12)


def test_optical_spring_vanishes_at_zero_detuning(cavity, oscillator):
    tuned = dataclasses.replace(cavity, detuning=0.0)
    d_omega, g_opt = coupling.optical_spring(tuned, oscillator, oscillator.omega_m)
    assert d_omega == 0.0
    assert g_opt == 0.0


def test_optical_spring_odd_in_detuning(cavity, oscillator):
    rng = np.random.default_rng(5)
    for _ in range(50):
        delta = rng.uniform(-3e9, 3e9)
        omega = rng.uniform(0.3, 3.0) * oscillator.omega_m
        c_plus = dataclasses.replace(cavity, detuning=delta)
        c_minus = dataclasses.replace(cavity, detuning=-delta)
        d1, g1 = coupling.optical_spring(c_plus, oscillator, omega)
        d2, g2 = coupling.optical_spring(c_minus, oscillator, omega)
        assert d1 == pytest.approx(-d2, rel=1e-12, abs=1e-30)
        assert g1 == pytest.approx(-g2, rel=1e-12, abs=1e-30)


def test_optical_spring_red_detuning_cools(oscillator):
    cav = CavityCoupling(
        detuning=-oscillator.omega_m,
        kappa=0.1 * oscillator.omega_m,
        vacuum_coupling=1e4,
        n_cav=1e10,
        g_opt=1e15,
    )
    _, gamma_opt = coupling.optical_spring(cav, oscillator, oscillator.omega_m)
    assert gamma_opt > 0.0


def test_modified_susceptibility_uncoupled(cavity, oscillator):
    dark = dataclasses.replace(cavity, vacuum_coupling=0.0)
    omega = 0.98 * oscillator.omega_m
    assert coupling.modified_susceptibility(
        dark, oscillator, omega
    ) == pytest.approx(mechanical_susceptibility(oscillator, omega), rel=1e-15)


def test_modified_susceptibility_decomposition_identity(cavity, oscillator):
    rng = np.random.default_rng(9)
    for _ in range(100):
        cav = dataclasses.replace(
            cavity,
            detuning=rng.uniform(-5e9, 5e9),
            kappa=rng.uniform(1e6, 1e9),
            vacuum_coupling=rng.uniform(0.0, 1e5),
        )
        omega = rng.uniform(0.2, 3.0) * oscillator.omega_m
        d_omega, g_opt = coupling.optical_spring(cav, oscillator, omega)
        chi_inv = 1.0 / coupling.modified_susceptibility(cav, oscillator, omega)
        m = oscillator.m_eff
        expected = m * (
            oscillator.omega_m**2 + 2.0 * omega * d_omega - omega**2
        ) - 1j * omega * m * (oscillator.gamma_m + g_opt)
        assert chi_inv == pytest.approx(expected, rel=1e-12)


def test_spring_self_energy_two_codings_agree(cavity, oscillator):
    rng = np.random.default_rng(13)
    for _ in range(100):
        cav = dataclasses.replace(
            cavity,
            detuning=rng.uniform(-5e9, 5e9),
            kappa=rng.uniform(1e6, 1e9),
            vacuum_coupling=rng.uniform(1.0, 1e5),
        )
        omega = rng.uniform(0.2, 3.0) * oscillator.omega_m
        sigma = coupling.spring_self_energy(cav, oscillator, omega)
        d_omega, g_opt = coupling.optical_spring(cav, oscillator, omega)
        recomposed = oscillator.m_eff * omega * (2.0 * d_omega - 1j * g_opt)
        assert sigma == pytest.approx(recomposed, rel=1e-12)


def test_output_phase_psd_signal_only():
    k = 5.9e6
    out = coupling.output_phase_psd(
        2.5e-21, voltage_psd(1.0), displacement_psd(0.0), phase_psd(0.0), k
    )
    assert out.value == pytest.approx((2.0 * k) ** 2 * 2.5e-21, rel=1e-12)


def test_output_phase_psd_noise_only():
    k = 5.9e6
    out = coupling.output_phase_psd(
        1e-20, voltage_psd(0.0), displacement_psd(1e-38), phase_psd(1e-41), k
    )
    assert out.value == pytest.approx((2.0 * k) ** 2 * 1e-38 + 1e-41, rel=1e-12)


def test_output_phase_psd_superposition():
    k = 5.9e6
    t = 3e-21

    def out(s_vv, s_xx, s_phi):
        return coupling.output_phase_psd(
            t, voltage_psd(s_vv), displacement_psd(s_xx), phase_psd(s_phi), k
        ).value

    a = out(1e-21, 2e-38, 3e-41)
    b = out(4e-21, 5e-38, 6e-41)
    both = out(5e-21, 7e-38, 9e-41)
    assert both == pytest.approx(a + b, rel=1e-12)


def test_output_phase_psd_rejects_wrong_domains():
    k = 5.9e6
    with pytest.raises(DomainMismatch):
        coupling.output_phase_psd(
            1e-20, displacement_psd(1e-38), displacement_psd(0.0), phase_psd(0.0), k
        )


def test_passive_damping_sign(oscillator, circuit):
    omega = np.linspace(0.1, 3.0, 50) * oscillator.omega_m
    assert np.all(mechanical_susceptibility(oscillator, omega).imag > 0.0)
    assert np.all(coupling.circuit_susceptibility(circuit, omega).imag > 0.0)
