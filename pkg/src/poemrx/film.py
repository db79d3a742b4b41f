"""Closed-form physics of a thickness-mode piezoelectric film.

Covers the driven one-dimensional response of a thin piezoelectric plate
(resonance, electrical input impedance/admittance, surface displacement
with and without damping), the lumped harmonic-oscillator susceptibility
used by the coupled model, and the film's thermal displacement noise.

The 1-D model assumes the lateral dimensions dominate the thickness; a
warning is raised when that stops being true, but the computation is the
caller's responsibility.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import constants

from .errors import (
    NonPhysicalCoupling,
    ResonanceSingularity,
    TangentPole,
    ThinFilmWarning,
    ApproximationDomain,
)
from .psd import NoisePsd, displacement_psd

# Tolerance below which cos(beta*L_T/2) counts as a tangent pole.
_POLE_TOL = 1e-12
# Relative detuning from series resonance beyond which the damped
# closed form is flagged as out of its validity window.
_DAMPED_WINDOW = 0.05


@dataclass(frozen=True)
class MaterialParams:
    """Piezoelectric material constants (all SI).

    c_d is the stiffened elastic modulus (constant electric displacement);
    c_e the unstiffened one.  If c_e is omitted it is derived from
    c_d = c_e + e33^2/eps_s; if both are given they must be consistent.
    """

    c_d: float          # N/m^2
    e33: float          # C/m^2
    eps_s: float        # F/m
    rho: float          # kg/m^3
    c_e: float = 0.0    # N/m^2, derived when 0
    d33: float = 0.0    # C/N, bookkeeping only
    s33: float = 0.0    # m^2/N, bookkeeping only

    def __post_init__(self):
        for name in ("c_d", "eps_s", "rho"):
            if getattr(self, name) <= 0:
                raise ValueError(f"material constant {name} must be positive")
        # e33 = 0 is the valid uncoupled limit used by several identities.
        if self.e33 < 0:
            raise ValueError("material constant e33 must be nonnegative")
        stiffening = self.e33**2 / self.eps_s
        if self.c_e == 0.0:
            object.__setattr__(self, "c_e", self.c_d - stiffening)
        else:
            if abs(self.c_d - (self.c_e + stiffening)) > 1e-6 * self.c_d:
                raise ValueError(
                    "inconsistent elastic moduli: c_d != c_e + e33^2/eps_s"
                )
        if self.c_e <= 0:
            raise ValueError("derived c_e is not positive")


@dataclass(frozen=True)
class FilmGeometry:
    """Film length, width and thickness in metres."""

    length: float
    width: float
    thickness: float

    def __post_init__(self):
        for name in ("length", "width", "thickness"):
            if getattr(self, name) <= 0:
                raise ValueError(f"geometry {name} must be positive")
        if min(self.length, self.width) / self.thickness < 10.0:
            warnings.warn(
                "lateral dimensions are not >> thickness; the 1-D "
                "thickness-mode model is marginal here",
                ThinFilmWarning,
                stacklevel=2,
            )

    @property
    def area(self) -> float:
        return self.length * self.width


@dataclass(frozen=True)
class DriveSignal:
    """Harmonic drive voltage V0*exp(j*(omega*t + phase))."""

    amplitude: float            # V
    angular_frequency: float    # rad/s
    phase: float = 0.0          # rad

    def __post_init__(self):
        if self.angular_frequency <= 0:
            raise ValueError("drive angular frequency must be positive")
        if self.amplitude < 0:
            raise ValueError("drive amplitude must be nonnegative")


@dataclass(frozen=True)
class FilmOscillator:
    """Lumped damped-oscillator equivalent of the thickness mode.

    The same quality factor is used for the driven response and for the
    damping rate gamma_m = omega_m/q of the susceptibility; the two roles
    are assumed to share one Q.
    """

    m_eff: float        # kg
    omega_m: float      # rad/s
    gamma_m: float      # rad/s
    q: float = field(default=0.0)

    def __post_init__(self):
        if self.q == 0.0:
            object.__setattr__(self, "q", self.omega_m / self.gamma_m)
        for name in ("m_eff", "omega_m", "gamma_m", "q"):
            if getattr(self, name) <= 0:
                raise ValueError(f"oscillator {name} must be positive")
        if abs(self.q - self.omega_m / self.gamma_m) > 1e-9 * self.q:
            raise ValueError("inconsistent oscillator: q != omega_m/gamma_m")


@dataclass(frozen=True)
class NoiseStrength:
    """White force-noise intensity alpha_ex in N^2*s."""

    alpha_ex: float

    def __post_init__(self):
        if self.alpha_ex < 0:
            raise ValueError("noise strength must be nonnegative")


def effective_mass(mat: MaterialParams, geom: FilmGeometry) -> float:
    """Half the film mass: the standard thickness-mode lumped equivalent."""
    return mat.rho * geom.area * geom.thickness / 2.0


def phase_velocity(mat: MaterialParams) -> float:
    """Acoustic phase velocity sqrt(c_d/rho) along the thickness, m/s."""
    return np.sqrt(mat.c_d / mat.rho)


def coupling_kt2(mat: MaterialParams) -> float:
    """Electromechanical coupling coefficient e33^2/(c_d*eps_s)."""
    kt2 = mat.e33**2 / (mat.c_d * mat.eps_s)
    if kt2 >= 1.0:
        raise NonPhysicalCoupling(f"k_t^2 = {kt2:.4g} is not physical")
    return kt2


def series_resonance(mat: MaterialParams, geom: FilmGeometry) -> float:
    """Series resonance (v_a/L_T)*sqrt(pi^2 - 8*k_t^2), rad/s.

    Reduces to the half-wave value pi*v_a/L_T as the coupling vanishes.
    """
    kt2 = coupling_kt2(mat)
    arg = np.pi**2 - 8.0 * kt2
    if arg <= 0:
        raise NonPhysicalCoupling(
            f"k_t^2 = {kt2:.4g} exceeds pi^2/8; no series resonance"
        )
    return phase_velocity(mat) / geom.thickness * np.sqrt(arg)


def static_capacitance(mat: MaterialParams, geom: FilmGeometry) -> float:
    """Parallel-plate capacitance L*W*eps_s/L_T of the clamped film."""
    return geom.area * mat.eps_s / geom.thickness


def input_impedance(mat: MaterialParams, geom: FilmGeometry, omega) -> complex:
    """Electrical input impedance of the film under thickness excitation.

    Z = (1/(j*omega*C0)) * (1 - k_t^2 * tan(x)/x) with x = beta*L_T/2.
    Pure 1/(j*omega*C0) capacitor when the coupling vanishes.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise ValueError("impedance requires omega > 0")
    kt2 = coupling_kt2(mat)
    c0 = static_capacitance(mat, geom)
    x = omega / phase_velocity(mat) * geom.thickness / 2.0
    cosx = np.cos(x)
    if np.any(np.abs(cosx) < _POLE_TOL):
        raise TangentPole("drive frequency sits on a tangent pole")
    z = 1.0 / (1j * omega * c0) * (1.0 - kt2 * np.tan(x) / x)
    return complex(z) if z.ndim == 0 else z


def admittance_spectrum(
    mat: MaterialParams,
    geom: FilmGeometry,
    f_start: float,
    f_stop: float,
    n_points: int,
):
    """Uniformly sampled complex admittance Y(f) = 1/Z(f).

    Returns (freqs_hz, admittance, is_pole).  Samples landing on a
    tangent pole are marked instead of aborting the sweep; their
    admittance is reported as NaN.
    """
    if not (f_start < f_stop):
        raise ValueError("need f_start < f_stop")
    if n_points < 2:
        raise ValueError("need at least two sweep points")
    freqs = np.linspace(f_start, f_stop, n_points)
    omega = 2.0 * np.pi * freqs
    kt2 = coupling_kt2(mat)
    c0 = static_capacitance(mat, geom)
    x = omega / phase_velocity(mat) * geom.thickness / 2.0
    is_pole = np.abs(np.cos(x)) < _POLE_TOL
    with np.errstate(all="ignore"):
        z = 1.0 / (1j * omega * c0) * (1.0 - kt2 * np.tan(x) / x)
        y = 1.0 / z
    y = np.where(is_pole, np.nan + 1j * np.nan, y)
    return freqs, y, is_pole


def admittance_peak(mat, geom, f_start, f_stop, n_points) -> float:
    """Frequency of maximum |Y| over the sweep, ignoring pole samples."""
    freqs, y, is_pole = admittance_spectrum(mat, geom, f_start, f_stop, n_points)
    mag = np.where(is_pole, -np.inf, np.abs(y))
    return float(freqs[np.argmax(mag)])


def surface_displacement_undamped(
    mat: MaterialParams, geom: FilmGeometry, drive: DriveSignal
) -> complex:
    """Surface displacement phasor of the lossless film at z = L_T.

    u = e33*D0/(eps_s*c_d*beta) * tan(beta*L_T/2), with the electric
    displacement amplitude D0 = V0*beta*eps_s/(beta*L_T - 2*k_t^2*tan(..)).
    Diverges at the series resonance; callers get a ResonanceSingularity
    there and should switch to the damped model.
    """
    kt2 = coupling_kt2(mat)
    beta = drive.angular_frequency / phase_velocity(mat)
    x = beta * geom.thickness / 2.0
    if abs(np.cos(x)) < _POLE_TOL:
        raise TangentPole("drive frequency sits on a tangent pole")
    tanx = np.tan(x)
    denom = beta * geom.thickness - 2.0 * kt2 * tanx
    if abs(denom) < _POLE_TOL:
        raise ResonanceSingularity(
            "undamped response diverges at resonance; use the damped model"
        )
    d0 = drive.amplitude * beta * mat.eps_s / denom
    u = mat.e33 * d0 / (mat.eps_s * mat.c_d * beta) * tanx
    return u * np.exp(1j * drive.phase)


def surface_displacement_damped(
    mat: MaterialParams, geom: FilmGeometry, drive: DriveSignal, q: float
) -> complex:
    """Resonant surface displacement -j*4*Q*V0*e33/(pi^2*c_d) of the lossy film.

    Valid in a neighbourhood of the series resonance for Q >> 1; driving
    outside a 5% window raises an ApproximationDomain warning.
    """
    if q <= 0:
        raise ValueError("quality factor must be positive")
    omega_s = series_resonance(mat, geom)
    if abs(drive.angular_frequency - omega_s) / omega_s > _DAMPED_WINDOW:
        warnings.warn(
            "damped closed form evaluated more than 5% away from the "
            "series resonance",
            ApproximationDomain,
            stacklevel=2,
        )
    amp = 4.0 * q * drive.amplitude * mat.e33 / (np.pi**2 * mat.c_d)
    return -1j * amp * np.exp(1j * drive.phase)


def mechanical_susceptibility(osc: FilmOscillator, omega):
    """chi_m = 1/(m_eff*(omega_m^2 - omega^2 - i*omega*gamma_m)), m/N."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValueError("susceptibility requires omega >= 0")
    chi = 1.0 / (
        osc.m_eff
        * (osc.omega_m**2 - omega**2 - 1j * omega * osc.gamma_m)
    )
    return complex(chi) if chi.ndim == 0 else chi


def fdt_noise_strength(osc: FilmOscillator, temperature_k: float) -> NoiseStrength:
    """Fluctuation-dissipation force-noise intensity 2*m_eff*gamma_m*kB*T."""
    if temperature_k < 0:
        raise ValueError("temperature must be nonnegative")
    return NoiseStrength(
        2.0 * osc.m_eff * osc.gamma_m * constants.k * temperature_k
    )


def noise_strength_for_peak(osc: FilmOscillator, peak_psd: float) -> NoiseStrength:
    """Force-noise intensity that pins the displacement PSD peak at omega_m."""
    if peak_psd < 0:
        raise ValueError("target peak PSD must be nonnegative")
    chi_peak = abs(mechanical_susceptibility(osc, osc.omega_m))
    return NoiseStrength(peak_psd / (2.0 * chi_peak**2))


def film_thermal_noise_psd(
    osc: FilmOscillator, strength: NoiseStrength, omega
) -> NoisePsd:
    """Thermal displacement noise 2*alpha_ex*|chi_m(omega)|^2, m^2/Hz."""
    chi = mechanical_susceptibility(osc, omega)
    return displacement_psd(2.0 * strength.alpha_ex * np.abs(chi) ** 2)
