"""Coupled electro-mechanical response in the frequency domain.

The film couples to the LC input circuit through a single coefficient G
chosen so that G^2 * chi_m * chi_lc is dimensionless.  The composed
voltage-to-displacement transfer |G * chi_m_eff * chi_lc|^2, the
radiation-pressure (optical spring) correction to the mechanical
susceptibility, and the output phase PSD of the full receiver live here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .film import FilmOscillator, mechanical_susceptibility
from .psd import NoisePsd, PsdDomain, phase_psd


@dataclass(frozen=True)
class CircuitParams:
    """Series LC input circuit as seen by the film.

    gamma_lc = r_l/inductance for a series resistance r_l; coupling is
    the electromechanical coefficient G.
    """

    inductance: float       # H
    omega_lc: float         # rad/s
    gamma_lc: float         # rad/s
    coupling: float         # N/C-equivalent, makes G^2*chi_m*chi_lc unitless
    r_l: float              # ohm, series (Johnson) resistance
    r_i: float              # ohm, input impedance for power conversion

    def __post_init__(self):
        for name in ("inductance", "omega_lc", "gamma_lc", "r_l", "r_i"):
            if getattr(self, name) <= 0:
                raise ValueError(f"circuit {name} must be positive")
        if self.coupling < 0:
            raise ValueError("coupling must be nonnegative")


@dataclass(frozen=True)
class CavityCoupling:
    """Optical cavity parameters entering the optical-spring correction."""

    detuning: float             # rad/s
    kappa: float                # rad/s
    vacuum_coupling: float      # rad/s
    n_cav: float
    g_opt: float                # rad/(s*m)

    def __post_init__(self):
        if self.kappa <= 0:
            raise ValueError("cavity decay kappa must be positive")
        if self.n_cav < 0:
            raise ValueError("photon number must be nonnegative")
        if self.g_opt <= 0:
            raise ValueError("g_opt must be positive")


def circuit_susceptibility(circuit: CircuitParams, omega):
    """chi_lc = 1/(L*(omega_lc^2 - omega^2 - i*omega*gamma_lc))."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValueError("susceptibility requires omega >= 0")
    chi = 1.0 / (
        circuit.inductance
        * (circuit.omega_lc**2 - omega**2 - 1j * omega * circuit.gamma_lc)
    )
    return complex(chi) if chi.ndim == 0 else chi


def effective_susceptibility(osc: FilmOscillator, circuit: CircuitParams, omega):
    """Film susceptibility dressed by the circuit:
    chi_m_eff = (chi_m^-1 - G^2*chi_lc)^-1.  Reduces to chi_m when G = 0.
    """
    chi_m = mechanical_susceptibility(osc, omega)
    chi_lc = circuit_susceptibility(circuit, omega)
    chi = 1.0 / (1.0 / chi_m - circuit.coupling**2 * chi_lc)
    return complex(chi) if np.ndim(chi) == 0 else chi


def transfer_function(osc: FilmOscillator, circuit: CircuitParams, omega):
    """Voltage-to-displacement power transfer |G*chi_m_eff*chi_lc|^2.

    Dimensionless in the sense (m^2/Hz) per (V^2/Hz); zero iff G = 0.
    """
    chi_eff = effective_susceptibility(osc, circuit, omega)
    chi_lc = circuit_susceptibility(circuit, omega)
    t = np.abs(circuit.coupling * chi_eff * chi_lc) ** 2
    return float(t) if np.ndim(t) == 0 else t


def optical_spring(cav: CavityCoupling, osc: FilmOscillator, omega):
    """Light-induced frequency shift and damping (delta_omega_m, gamma_opt).

    delta_omega_m = g^2*(omega_m/omega)*[ (D+w)/((D+w)^2+k^2/4)
                                        + (D-w)/((D-w)^2+k^2/4) ]
    gamma_opt     = g^2*(omega_m/omega)*[ k/((D+w)^2+k^2/4)
                                        - k/((D-w)^2+k^2/4) ]

    Both vanish at zero detuning and are odd in the detuning; red
    detuning near resonance gives positive gamma_opt (cooling).
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise ValueError("optical spring requires omega > 0")
    g2 = cav.vacuum_coupling**2
    plus = cav.detuning + omega
    minus = cav.detuning - omega
    quarter = cav.kappa**2 / 4.0
    prefactor = g2 * osc.omega_m / omega
    d_omega = prefactor * (plus / (plus**2 + quarter) + minus / (minus**2 + quarter))
    g_opt = prefactor * (
        cav.kappa / (plus**2 + quarter) - cav.kappa / (minus**2 + quarter)
    )
    if np.ndim(d_omega) == 0:
        return float(d_omega), float(g_opt)
    return d_omega, g_opt


def spring_self_energy(cav: CavityCoupling, osc: FilmOscillator, omega):
    """Radiation self-energy Sigma(omega) added to chi_m^-1.

    Sigma = 2*m_eff*omega_m*g^2*[ 1/((D+w)+ik/2) + 1/((D-w)-ik/2) ],
    identically equal to m_eff*omega*(2*delta_omega_m - i*gamma_opt).
    """
    omega = np.asarray(omega, dtype=float)
    g2 = cav.vacuum_coupling**2
    plus = cav.detuning + omega
    minus = cav.detuning - omega
    sigma = (
        2.0
        * osc.m_eff
        * osc.omega_m
        * g2
        * (1.0 / (plus + 1j * cav.kappa / 2.0) + 1.0 / (minus - 1j * cav.kappa / 2.0))
    )
    return complex(sigma) if np.ndim(sigma) == 0 else sigma


def modified_susceptibility(cav: CavityCoupling, osc: FilmOscillator, omega):
    """Mechanical susceptibility including the optical spring:
    chi^-1 = chi_m^-1 + Sigma(omega).  Equals chi_m when g = 0.
    """
    chi_m = mechanical_susceptibility(osc, omega)
    chi = 1.0 / (1.0 / chi_m + spring_self_energy(cav, osc, omega))
    return complex(chi) if np.ndim(chi) == 0 else chi


def output_phase_psd(
    transfer: float,
    s_vv_in: NoisePsd,
    n_xx_th: NoisePsd,
    n_phi_imp: NoisePsd,
    k: float,
) -> NoisePsd:
    """Receiver output phase PSD.

    S_phi = (2k)^2 * (T * S_vv + S_xx_thermal) + S_phi_imprecision,
    linear in every input PSD.
    """
    if transfer < 0:
        raise ValueError("transfer value must be nonnegative")
    s_vv = s_vv_in.require(PsdDomain.VOLTAGE)
    s_xx = n_xx_th.require(PsdDomain.DISPLACEMENT)
    s_imp = n_phi_imp.require(PsdDomain.PHASE)
    return phase_psd((2.0 * k) ** 2 * (transfer * s_vv + s_xx) + s_imp)
