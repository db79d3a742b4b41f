"""Receiver noise budget, sensitivity and the LNA trade.

Every noise source is referred to a common plane so the minimum
detectable signal follows in closed form:

  S_vv_min = N_electrical + (N_film + N_phi_optical/(2k)^2) / T(omega)

with T the voltage-to-displacement transfer.  Sensitivity over a band is
the integral of that PSD across the band divided by the input impedance,
so a noise floor that rises towards the band edges costs more than the
plain 10*log10(B) bandwidth scaling.

The coupling coefficient G is the one free parameter of the model; it is
calibrated once against a single sensitivity anchor and everything else
follows without further tuning.
"""

from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import constants
from scipy.integrate import simpson
from scipy.optimize import brentq

from .coupling import CircuitParams, transfer_function
from .errors import BandwidthRange, ZeroNoise, ZeroTransfer
from .film import FilmOscillator, NoiseStrength, film_thermal_noise_psd
from .optics import (
    lens_survival,
    optical_imprecision_psd,
    radiation_pressure_psd,
)
from .film import mechanical_susceptibility
from .psd import NoisePsd, PsdDomain, phase_psd, voltage_psd

MILLIWATT = 1e-3


def dbm_from_watts(power_w: float) -> float:
    if power_w <= 0:
        raise ValueError("power must be positive to express in dBm")
    return 10.0 * np.log10(power_w / MILLIWATT)


def watts_from_dbm(power_dbm: float) -> float:
    return MILLIWATT * 10.0 ** (power_dbm / 10.0)


@dataclass(frozen=True)
class LnaParams:
    """Low-noise amplifier with linear power gain and output-referred noise."""

    gain: float         # linear power ratio, >= 1
    noise_psd: float    # V^2/Hz at the LNA output

    def __post_init__(self):
        if self.gain < 1.0:
            raise ValueError("LNA gain must be >= 1")
        if self.noise_psd < 0:
            raise ValueError("LNA noise PSD must be nonnegative")

    @classmethod
    def from_noise_temperature(
        cls, gain_db: float, temperature_k: float, r_l: float
    ) -> "LnaParams":
        """Output-referred noise 2*kB*R_L*T_L*G from a noise temperature.

        Referred back to the input this is the usual 2*kB*R_L*T_L floor.
        """
        gain = 10.0 ** (gain_db / 10.0)
        return cls(gain=gain, noise_psd=2.0 * constants.k * r_l * temperature_k * gain)


@dataclass(frozen=True)
class NoiseComponents:
    """The three receiver-internal noise terms entering the budget."""

    electrical: NoisePsd        # V^2/Hz at the circuit input
    film: NoisePsd              # m^2/Hz on the mirror
    optical_phase: NoisePsd     # rad^2/Hz at the readout

    def __post_init__(self):
        self.electrical.require(PsdDomain.VOLTAGE)
        self.film.require(PsdDomain.DISPLACEMENT)
        self.optical_phase.require(PsdDomain.PHASE)


@dataclass(frozen=True)
class LnaComparison:
    snr_without: float
    snr_with: float
    improved: bool


@dataclass(frozen=True)
class SensitivityResult:
    bandwidth_hz: float
    loss_coefficient: float
    with_lna: bool
    min_power_w: float
    min_power_dbm: float
    min_psd: float      # band-average V^2/Hz, P*R_i/B


def electrical_noise_psd(temperature_k: float, r_l: float) -> NoisePsd:
    """Johnson noise of the circuit resistance, 2*kB*R_L*T in V^2/Hz."""
    if temperature_k < 0:
        raise ValueError("temperature must be nonnegative")
    if r_l <= 0:
        raise ValueError("resistance must be positive")
    return voltage_psd(2.0 * constants.k * r_l * temperature_k)


def output_noise_psd(
    transfer: float, components: NoiseComponents, k: float
) -> NoisePsd:
    """Total output phase noise
    (2k)^2*(T*N_electrical + N_film) + N_phi_optical."""
    if transfer < 0:
        raise ValueError("transfer value must be nonnegative")
    n_el = components.electrical.require(PsdDomain.VOLTAGE)
    n_film = components.film.require(PsdDomain.DISPLACEMENT)
    n_phi = components.optical_phase.require(PsdDomain.PHASE)
    return phase_psd((2.0 * k) ** 2 * (transfer * n_el + n_film) + n_phi)


def system_snr(
    s_vv_in: NoisePsd, components: NoiseComponents, transfer: float, k: float
) -> float:
    """Output SNR: signal path over the composed output noise."""
    signal = (2.0 * k) ** 2 * transfer * s_vv_in.require(PsdDomain.VOLTAGE)
    noise = output_noise_psd(transfer, components, k).value
    if noise == 0.0:
        if signal == 0.0:
            return 0.0
        raise ZeroNoise("total output noise is exactly zero with nonzero signal")
    return float(signal / noise)


def min_signal_psd(
    components: NoiseComponents, transfer: float, k: float
) -> NoisePsd:
    """Input signal PSD achieving unit SNR, solved in closed form.

    SNR is affine in S_vv, so
    S_min = N_electrical + (N_film + N_phi_optical/(2k)^2) / T.
    """
    if transfer == 0.0:
        raise ZeroTransfer("transfer function is zero; no finite minimum signal")
    n_el = components.electrical.require(PsdDomain.VOLTAGE)
    n_film = components.film.require(PsdDomain.DISPLACEMENT)
    n_phi = components.optical_phase.require(PsdDomain.PHASE)
    return voltage_psd(n_el + (n_film + n_phi / (2.0 * k) ** 2) / transfer)


def min_power(s_min: NoisePsd, bandwidth_hz: float, r_i: float):
    """Minimum signal power S*B/R_i for a white minimum PSD.

    Returns (watts, dbm).
    """
    if bandwidth_hz <= 0 or r_i <= 0:
        raise ValueError("bandwidth and input impedance must be positive")
    power = s_min.require(PsdDomain.VOLTAGE) * bandwidth_hz / r_i
    return float(power), dbm_from_watts(power)


def lna_snr_gain(
    s_i: float, n_i: float, n_xx: float, lna: LnaParams
) -> LnaComparison:
    """SNR with and without the amplifier in front of the noisy stage.

    Without: s/(n_i + n_xx).  With: G*s/(G*n_i + n_L + n_xx).  The
    amplifier helps exactly when G > n_L/n_xx + 1; the flag is computed
    from the sign of (G-1)*n_xx - n_L so the threshold is exact.
    """
    if n_i + n_xx <= 0:
        raise ValueError("total noise must be positive")
    snr_without = s_i / (n_i + n_xx)
    snr_with = lna.gain * s_i / (lna.gain * n_i + lna.noise_psd + n_xx)
    improved = (lna.gain - 1.0) * n_xx - lna.noise_psd > 0.0
    return LnaComparison(snr_without, snr_with, improved)


def reference_levels():
    """4G LTE base-station reference sensitivity power levels.

    Rows of (standard, bs_class, bandwidth_hz, dbm).
    """
    return [
        ("E-UTRA", "Wide Area", 5e6, -101.5),
        ("E-UTRA", "Local Area", 5e6, -93.5),
        ("E-UTRA", "Home", 5e6, -93.5),
        ("E-UTRA", "Medium Range", 5e6, -96.5),
        ("NB-IoT", "Wide Area", 3.75e3, -133.3),
        ("NB-IoT", "Local Area", 3.75e3, -125.3),
        ("NB-IoT", "Home", 3.75e3, -125.3),
        ("NB-IoT", "Medium Range", 3.75e3, -128.3),
    ]


def atom_equivalent_sensitivity(
    e_min: float, area: float, antenna_gain: float, bandwidth_hz: float
) -> float:
    """Equivalent power sensitivity of an atomic E-field sensor, watts.

    P = (A / (2*G_A)) * eps0 * c * E_min^2 * B for a field sensitivity
    E_min in V/m/sqrt(Hz), aperture A in m^2 and linear antenna gain.
    """
    if min(e_min, area, antenna_gain, bandwidth_hz) <= 0:
        raise ValueError("all atom-sensitivity arguments must be positive")
    return (
        area
        / (2.0 * antenna_gain)
        * constants.epsilon_0
        * constants.c
        * e_min**2
        * bandwidth_hz
    )


# ---------------------------------------------------------------------------
# Full receiver model: integrand, band power, sweeps and calibration.
# ---------------------------------------------------------------------------

# Grid size for band integration (odd for Simpson); the narrowest
# feature in the integrand is the ~1 MHz mechanical linewidth, so this
# resolves even the 10 MHz band comfortably.
_BAND_POINTS = 1601

_VALID_BAND = (1e3, 10e6)


@dataclass(frozen=True)
class ReceiverModel:
    """Everything needed to evaluate the receiver noise budget vs frequency."""

    oscillator: FilmOscillator
    circuit: CircuitParams
    noise_strength: NoiseStrength
    kappa: float            # arm cavity decay, rad/s
    n_cav: float            # intracavity photons at the carrier
    g_opt: float            # rad/(s*m)
    omega_sig: float        # signal-resonance of the readout, rad/s
    finesse: float
    wave_k: float           # optical wave number 2*pi/lambda, rad/m
    temperature_k: float
    carrier_hz: float
    lens_loss: float
    lna: Optional[LnaParams] = None

    def with_coupling(self, coupling: float) -> "ReceiverModel":
        return dataclasses.replace(
            self, circuit=dataclasses.replace(self.circuit, coupling=coupling)
        )

    def transfer(self, omega):
        return transfer_function(self.oscillator, self.circuit, omega)

    def _n_cav_eff(self, lens_loss: Optional[float]) -> float:
        loss = self.lens_loss if lens_loss is None else lens_loss
        return self.n_cav * lens_survival(loss, self.finesse)

    def electrical_psd(self) -> NoisePsd:
        return electrical_noise_psd(self.temperature_k, self.circuit.r_l)

    def film_psd(self, omega) -> NoisePsd:
        return film_thermal_noise_psd(self.oscillator, self.noise_strength, omega)

    def optical_displacement_psd(self, omega, lens_loss=None) -> NoisePsd:
        """Quantum optical noise as equivalent mirror displacement."""
        n_eff = self._n_cav_eff(lens_loss)
        delta = np.asarray(omega, dtype=float) - self.omega_sig
        chi = mechanical_susceptibility(self.oscillator, omega)
        imp = optical_imprecision_psd(self.kappa, n_eff, self.g_opt, delta)
        rp = radiation_pressure_psd(self.kappa, n_eff, self.g_opt, chi, delta)
        return imp + rp

    def components_at(self, omega, lens_loss=None) -> NoiseComponents:
        opt = self.optical_displacement_psd(omega, lens_loss)
        return NoiseComponents(
            electrical=self.electrical_psd(),
            film=self.film_psd(omega),
            optical_phase=phase_psd((2.0 * self.wave_k) ** 2 * opt.value),
        )

    def input_noise_psd(self, omega, lens_loss=None, with_lna: bool = False):
        """Receiver noise referred to the antenna plane, V^2/Hz.

        Without the LNA this is the unit-SNR minimum signal PSD; with it
        the downstream noise is divided by the gain and the amplifier's
        own floor is added.
        """
        omega = np.asarray(omega, dtype=float)
        n_el = self.electrical_psd().value
        n_film = self.film_psd(omega).value
        n_opt = self.optical_displacement_psd(omega, lens_loss).value
        t_fn = self.transfer(omega)
        bare = n_el + (n_film + n_opt) / t_fn
        if not with_lna:
            return bare
        if self.lna is None:
            raise ValueError("model has no LNA configured")
        return self.lna.noise_psd / self.lna.gain + bare / self.lna.gain

    def band_noise_power(
        self,
        bandwidth_hz: float,
        lens_loss=None,
        with_lna: bool = False,
    ) -> float:
        """Integral of the input-referred noise PSD across the band, watts.

        The band is centred on the carrier; integration uses Simpson's
        rule on a grid fine enough for the mechanical linewidth.
        """
        if bandwidth_hz <= 0:
            raise ValueError("bandwidth must be positive")
        freqs = np.linspace(
            self.carrier_hz - bandwidth_hz / 2.0,
            self.carrier_hz + bandwidth_hz / 2.0,
            _BAND_POINTS,
        )
        psd = self.input_noise_psd(2.0 * np.pi * freqs, lens_loss, with_lna)
        return float(simpson(psd, x=freqs) / self.circuit.r_i)

    def min_detectable_power(
        self, bandwidth_hz: float, lens_loss=None, with_lna: bool = False
    ) -> SensitivityResult:
        power = self.band_noise_power(bandwidth_hz, lens_loss, with_lna)
        loss = self.lens_loss if lens_loss is None else lens_loss
        return SensitivityResult(
            bandwidth_hz=bandwidth_hz,
            loss_coefficient=loss,
            with_lna=with_lna,
            min_power_w=power,
            min_power_dbm=dbm_from_watts(power),
            min_psd=power * self.circuit.r_i / bandwidth_hz,
        )

    def noise_stack(self, channel_noise_dbm: float, bandwidth_hz: float):
        """Labelled output-phase-domain noise contributions at the carrier.

        The wireless channel noise rides the same transfer as the
        signal.  Rows of (component, psd_rad2_per_hz).
        """
        omega_c = 2.0 * np.pi * self.carrier_hz
        t_fn = self.transfer(omega_c)
        four_k2 = (2.0 * self.wave_k) ** 2
        n_ch = (
            watts_from_dbm(channel_noise_dbm) * self.circuit.r_i / bandwidth_hz
        )
        return [
            ("channel", four_k2 * t_fn * n_ch),
            ("electrical", four_k2 * t_fn * self.electrical_psd().value),
            ("film", four_k2 * self.film_psd(omega_c).value),
            ("optical", four_k2 * self.optical_displacement_psd(omega_c).value),
        ]


def sensitivity_sweep(
    model: ReceiverModel,
    bandwidths: Sequence[float],
    losses: Sequence[float],
    with_lna: bool,
):
    """Minimum detectable power over a (bandwidth x loss) grid.

    Sensitivity in dBm strictly worsens with bandwidth and with loss.
    """
    if len(bandwidths) == 0 or len(losses) == 0:
        raise ValueError("bandwidth and loss lists must be nonempty")
    for b in bandwidths:
        if not _VALID_BAND[0] <= b <= _VALID_BAND[1]:
            warnings.warn(
                f"bandwidth {b:g} Hz outside the validated "
                f"{_VALID_BAND[0]:g}..{_VALID_BAND[1]:g} Hz range",
                BandwidthRange,
                stacklevel=2,
            )
    return [
        model.min_detectable_power(b, lens_loss=loss, with_lna=with_lna)
        for b in bandwidths
        for loss in losses
    ]


def calibrate_coupling(
    model: ReceiverModel,
    target_dbm: float = -152.3,
    bandwidth_hz: float = 3.75e3,
    lens_loss: float = 1e-5,
    with_lna: bool = True,
) -> float:
    """Solve for the coupling G that hits the sensitivity anchor.

    The minimum detectable power is monotone decreasing in G on the
    weak-coupling branch, so a bracketed root search is exact.  Raises
    if the anchor lies below the amplifier noise floor (unreachable).
    """
    target_w = watts_from_dbm(target_dbm)

    def gap(log_g: float) -> float:
        trial = model.with_coupling(10.0**log_g)
        return trial.band_noise_power(bandwidth_hz, lens_loss, with_lna) - target_w

    lo, hi = 2.0, 8.5
    if gap(lo) < 0 or gap(hi) > 0:
        raise ValueError("sensitivity anchor is outside the reachable range")
    log_g = brentq(gap, lo, hi, xtol=1e-12, rtol=1e-14)
    return float(10.0**log_g)
