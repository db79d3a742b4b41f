"""Plane-wave steady-state optics of the interferometric readout.

Michelson output current, two-mirror cavity reflectance, the
dual-recycled Fabry-Perot-Michelson output, the quantum noise pair
(imprecision and radiation pressure) and the displacement sensitivity
spectrum of the readout.

Operating point
---------------
The arm cavities are power-recycled and carrier-resonant; the signal
recycling cavity is tuned so the motion sidebands resonate half a free
spectral range away from the carrier.  For 7.5 cm arms that places the
signal resonance at c/(4*L) ~ 1 GHz, where both the displacement
response peaks and the quantum-noise-limited sensitivity is best.  The
quantum noise formulas below therefore take the offset of the analysis
frequency from that signal resonance as their frequency argument.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import constants

from .errors import DegenerateCavity, SidebandLinearization
from .psd import NoisePsd, PsdDomain, displacement_psd, phase_psd
from .film import FilmOscillator, mechanical_susceptibility

_DENOM_TOL = 1e-15


@dataclass(frozen=True)
class MirrorSpec:
    """Amplitude reflection/transmission coefficients plus power loss."""

    r: float
    t: float
    loss: float = 0.0

    def __post_init__(self):
        for name in ("r", "t", "loss"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"mirror {name} must lie in [0, 1]")
        budget = self.r**2 + self.t**2 + self.loss
        if abs(budget - 1.0) > 1e-9:
            raise ValueError(
                f"mirror power budget r^2 + t^2 + loss = {budget:.12f} != 1"
            )

    @classmethod
    def from_power(cls, transmissivity: float, loss: float = 0.0) -> "MirrorSpec":
        """Build from power transmissivity T and power loss."""
        r2 = 1.0 - transmissivity - loss
        if r2 < 0:
            raise ValueError("transmissivity + loss exceeds unity")
        return cls(r=np.sqrt(r2), t=np.sqrt(transmissivity), loss=loss)


@dataclass(frozen=True)
class MirrorModulation:
    """End-mirror motion a_s*cos(omega_s*t + phase)."""

    amplitude: float            # m
    angular_frequency: float    # rad/s
    phase: float = 0.0

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("modulation amplitude must be nonnegative")


@dataclass(frozen=True)
class OpticalLayout:
    """Laser, mirrors and recycling gains of the readout interferometer."""

    laser_power: float                  # W
    wavelength: float                   # m
    arm_north: float                    # m
    arm_east: float                     # m
    bs: MirrorSpec
    itmn: MirrorSpec
    etmn: MirrorSpec
    itme: MirrorSpec
    etme: MirrorSpec
    g_prm: float = 1.0                  # amplitude gain, power recycling
    g_srm: float = 1.0                  # amplitude gain, signal recycling
    responsivity: float = 0.0           # A/W; 0 means derive e*lambda/(h*c)
    lens_loss: float = 1e-5             # per-pass power loss of the lens
    # Mirror phase offsets of the field model; kept configurable but the
    # plane-wave analysis assumes they vanish.
    phi_t: float = 0.0
    phi_r1: float = 0.0
    phi_r2: float = 0.0

    def __post_init__(self):
        if self.laser_power <= 0 or self.wavelength <= 0:
            raise ValueError("laser power and wavelength must be positive")
        if self.arm_north <= 0 or self.arm_east <= 0:
            raise ValueError("arm lengths must be positive")
        if self.g_prm < 1.0 or self.g_srm < 1.0:
            raise ValueError("recycling gains must be >= 1")
        if not 0.0 <= self.lens_loss < 1.0:
            raise ValueError("lens loss must lie in [0, 1)")
        if self.responsivity == 0.0:
            object.__setattr__(
                self, "responsivity", watts_to_ampere(self.wavelength)
            )
        if self.responsivity < 0:
            raise ValueError("responsivity must be nonnegative")


def wave_number(wavelength: float) -> float:
    """Optical wave number 2*pi/lambda, rad/m."""
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    return 2.0 * np.pi / wavelength


def watts_to_ampere(wavelength: float) -> float:
    """Photocurrent per optical watt e*lambda/(h*c) at unit quantum efficiency."""
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    return constants.e * wavelength / (constants.h * constants.c)


def michelson_output_current(
    layout: OpticalLayout, delta_l: float, mod: MirrorModulation, t
):
    """Linearized Michelson photocurrent for a modulated north mirror.

    I = alpha*P0*[cos^2(k0*dL) + k0*a_s*sin(2*k0*dL)*cos(w_s*t + phi_s)],
    valid to first order in the modulation depth k0*a_s.
    """
    k0 = wave_number(layout.wavelength)
    if k0 * mod.amplitude > 1e-3:
        warnings.warn(
            "modulation depth k0*a_s exceeds 1e-3; sideband linearization "
            "is getting inaccurate",
            SidebandLinearization,
            stacklevel=2,
        )
    t = np.asarray(t, dtype=float)
    dc = np.cos(k0 * delta_l) ** 2
    signal = (
        k0
        * mod.amplitude
        * np.sin(2.0 * k0 * delta_l)
        * np.cos(mod.angular_frequency * t + mod.phase)
    )
    out = layout.responsivity * layout.laser_power * (dc + signal)
    return float(out) if out.ndim == 0 else out


def cavity_reflectance(
    input_mirror: MirrorSpec,
    end_mirror: MirrorSpec,
    length: float,
    k0: float,
    x_m: float = 0.0,
) -> complex:
    """Amplitude reflectance of a two-mirror cavity with a movable end mirror.

    r_cav = r1 - r2*t1^2*q / (1 - r1*r2*q) with the round-trip phasor
    q = exp(-i*2*k0*(L - x_m)).  The sign convention conserves energy:
    |r_cav| = 1 for lossless mirrors at any detuning.
    """
    q = np.exp(-2j * k0 * length) * np.exp(2j * k0 * x_m)
    denom = 1.0 - input_mirror.r * end_mirror.r * q
    if abs(denom) < _DENOM_TOL:
        raise DegenerateCavity("cavity exactly resonant with unit round-trip gain")
    return complex(input_mirror.r - end_mirror.r * input_mirror.t**2 * q / denom)


def drfpmi_output_current(layout: OpticalLayout, x_m: float) -> float:
    """Output current of the dual-recycled Fabry-Perot-Michelson readout.

    High-reflectivity limit (arm cavity r -> 1, t << 1):
    I = (alpha/2) * G_prm^2 * G_srm^2 * P0 * |B_east + B_north|^2 with
    B_east  = 1 - t_itme^2*exp(-i2k0*L_E) / (1 - exp(-i2k0*L_E))
    B_north = 1 - t_itmn^2*exp(-i2k0*L_N) / (exp(-i2k0*x_m) - exp(-i2k0*L_N)).

    Arm lengths enter modulo the wavelength, so they encode the
    microscopic operating point, not the macroscopic geometry.
    """
    k0 = wave_number(layout.wavelength)
    qe = np.exp(-2j * k0 * layout.arm_east)
    qn = np.exp(-2j * k0 * layout.arm_north)
    den_e = 1.0 - qe
    den_n = np.exp(-2j * k0 * x_m) - qn
    if abs(den_e) < _DENOM_TOL or abs(den_n) < _DENOM_TOL:
        raise DegenerateCavity("arm cavity bracket denominator vanished")
    bracket_e = 1.0 - layout.itme.t**2 * qe / den_e
    bracket_n = 1.0 - layout.itmn.t**2 * qn / den_n
    return float(
        0.5
        * layout.responsivity
        * layout.g_prm**2
        * layout.g_srm**2
        * layout.laser_power
        * abs(bracket_e + bracket_n) ** 2
    )


@dataclass(frozen=True)
class ArmCavityParams:
    """Numbers derived from the arm cavity mirrors and geometry.

    kappa      : cavity energy decay rate, rad/s
    finesse    : 2*pi / round-trip power loss
    buildup    : resonant circulating power gain t1^2/(1 - r1*r2)^2
    n_cav      : mean intracavity photon number at the carrier
    g_opt      : cavity frequency pull per metre of mirror motion, rad/(s*m)
    omega_sig  : signal-sideband resonance 2*pi*c/(4*L), rad/s
    """

    kappa: float
    finesse: float
    buildup: float
    n_cav: float
    g_opt: float
    omega_sig: float


def derive_arm_cavity(layout: OpticalLayout) -> ArmCavityParams:
    """Standard cavity theory applied to the north arm.

    kappa = c * (round-trip power loss) / (2L); the intracavity photon
    number assumes a carrier-resonant arm fed through the power
    recycling gain; g_opt = k0 * c / (2L).  All three are overridable in
    the run configuration for layouts this derivation does not fit.
    """
    length = layout.arm_north
    itm, etm = layout.itmn, layout.etmn
    round_trip_loss = itm.t**2 + itm.loss + etm.t**2 + etm.loss
    kappa = constants.c * round_trip_loss / (2.0 * length)
    finesse = 2.0 * np.pi / round_trip_loss
    buildup = itm.t**2 / (1.0 - itm.r * etm.r) ** 2
    omega0 = 2.0 * np.pi * constants.c / layout.wavelength
    round_trip_time = 2.0 * length / constants.c
    p_circ = layout.g_prm**2 * layout.laser_power * buildup
    n_cav = p_circ * round_trip_time / (constants.hbar * omega0)
    g_opt = wave_number(layout.wavelength) * constants.c / (2.0 * length)
    omega_sig = np.pi * constants.c / (2.0 * length)
    return ArmCavityParams(
        kappa=kappa,
        finesse=finesse,
        buildup=buildup,
        n_cav=n_cav,
        g_opt=g_opt,
        omega_sig=omega_sig,
    )


def lens_survival(lens_loss: float, finesse: float) -> float:
    """Photon survival per storage time for a lossy intracavity element.

    The lens eats `lens_loss` of the power per pass; over the ~F/pi round
    trips of the cavity storage time the surviving fraction is
    exp(-lens_loss * F/pi).
    """
    if not 0.0 <= lens_loss < 1.0:
        raise ValueError("lens loss must lie in [0, 1)")
    return float(np.exp(-lens_loss * finesse / np.pi))


def response_spectrum(layout: OpticalLayout, mod_freqs, a_s: float):
    """Photocurrent responsivity to end-mirror motion, A per picometre.

    Sideband model: motion at f generates sidebands that are filtered by
    the arm cavity Lorentzian centred on the signal resonance c/(4L).
    The overall ampere scale folds the recycling gains, the resonant
    buildup and the lens survival into one prefactor; the shape and the
    peak location are the meaningful outputs.

    Returns (freqs_hz, response_a_per_pm); all zeros when a_s = 0.
    """
    freqs = np.atleast_1d(np.asarray(mod_freqs, dtype=float))
    if freqs.size == 0:
        raise ValueError("need at least one modulation frequency")
    if a_s < 0:
        raise ValueError("modulation amplitude must be nonnegative")
    if a_s == 0.0:
        return freqs, np.zeros_like(freqs)
    cav = derive_arm_cavity(layout)
    survival = lens_survival(layout.lens_loss, cav.finesse)
    k0 = wave_number(layout.wavelength)
    delta = 2.0 * np.pi * freqs - cav.omega_sig
    lorentzian = 1.0 / np.sqrt(1.0 + 4.0 * delta**2 / cav.kappa**2)
    scale = (
        layout.responsivity
        * layout.laser_power
        * layout.g_prm**2
        * layout.g_srm**2
        * cav.buildup
        * survival
        * 2.0
        * k0
        * 1e-12  # per picometre
    )
    return freqs, scale * lorentzian


def optical_imprecision_psd(
    kappa: float, n_cav: float, g_opt: float, omega
) -> NoisePsd:
    """Quantum measurement imprecision referred to mirror displacement.

    N = kappa*(1 + 4*omega^2/kappa^2) / (16*n_cav*g_opt^2), m^2/Hz.
    `omega` is the offset of the analysis frequency from the cavity
    (signal) resonance.
    """
    if kappa <= 0 or n_cav <= 0 or g_opt <= 0:
        raise ValueError("kappa, n_cav and g_opt must be positive")
    omega = np.asarray(omega, dtype=float)
    value = kappa * (1.0 + 4.0 * omega**2 / kappa**2) / (16.0 * n_cav * g_opt**2)
    return displacement_psd(value)


def radiation_pressure_psd(
    kappa: float, n_cav: float, g_opt: float, chi_m, omega
) -> NoisePsd:
    """Radiation-pressure back-action noise on the mirror, m^2/Hz.

    N = n_cav * (4*hbar^2*g_opt^2/kappa) * (1 + 4*omega^2/kappa^2)^-1
        * |chi_m|^2.
    """
    if kappa <= 0 or g_opt <= 0:
        raise ValueError("kappa and g_opt must be positive")
    if n_cav < 0:
        raise ValueError("photon number must be nonnegative")
    omega = np.asarray(omega, dtype=float)
    value = (
        n_cav
        * 4.0
        * constants.hbar**2
        * g_opt**2
        / kappa
        / (1.0 + 4.0 * omega**2 / kappa**2)
        * np.abs(chi_m) ** 2
    )
    return displacement_psd(value)


def optical_noise_total(
    kappa: float, n_cav: float, g_opt: float, chi_m, omega
) -> NoisePsd:
    """Imprecision plus back-action; bounded below by hbar*|chi_m|.

    The bound is saturated at the photon number that balances the two
    contributions (the standard quantum limit).
    """
    imp = optical_imprecision_psd(kappa, n_cav, g_opt, omega)
    rp = radiation_pressure_psd(kappa, n_cav, g_opt, chi_m, omega)
    return imp + rp


def sql_optimal_photon_number(kappa: float, g_opt: float, chi_m, omega) -> float:
    """Photon number at which imprecision equals back-action."""
    omega = np.asarray(omega, dtype=float)
    c_coeff = kappa * (1.0 + 4.0 * omega**2 / kappa**2) / g_opt**2
    n = c_coeff / (8.0 * constants.hbar * np.abs(chi_m))
    return float(n) if n.ndim == 0 else n


def phase_noise_psd(n_xx: NoisePsd, k: float) -> NoisePsd:
    """Displacement PSD converted to readout phase: N_phi = (2k)^2 * N_x."""
    value = n_xx.require(PsdDomain.DISPLACEMENT)
    return phase_psd((2.0 * k) ** 2 * value)


def noise_limited_sensitivity_spectrum(
    layout: OpticalLayout,
    kappa: float,
    n_cav: float,
    g_opt: float,
    osc: FilmOscillator,
    freqs,
):
    """Displacement sensitivity sqrt(N_xx_optical(f)) in m/sqrt(Hz).

    The quantum noise frequency argument is the offset from the signal
    resonance of the arm cavity; the mechanical susceptibility uses the
    true analysis frequency.  Lens loss degrades the effective photon
    number, so more loss means a worse (larger) curve everywhere.
    """
    freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
    if freqs.size == 0:
        raise ValueError("need at least one frequency")
    cav = derive_arm_cavity(layout)
    n_eff = n_cav * lens_survival(layout.lens_loss, cav.finesse)
    omega = 2.0 * np.pi * freqs
    delta = omega - cav.omega_sig
    chi = mechanical_susceptibility(osc, omega)
    total = optical_noise_total(kappa, n_eff, g_opt, chi, delta)
    return freqs, np.sqrt(total.require(PsdDomain.DISPLACEMENT))
