"""On-off keying link Monte Carlo over the modelled receiver chain.

The simulation runs in complex baseband at the symbol rate: for signal
bandwidths far below the carrier every transfer in the chain is flat
across the band, so one complex sample per symbol carries the full
in-band statistics.  Envelope convention: a symbol value v represents a
carrier of instantaneous power |v|^2/(2*R_i).

SNR convention: quoted SNRs are mark-level (carrier-to-noise during a
'1' symbol).  Coherent detection on the in-phase quadrature with a
midpoint threshold then gives BER = Q(sqrt(snr/2)).

Reproducibility: bits and noise are drawn from counter-based Philox
streams, one independent substream per fixed-size block, so results are
bit-identical regardless of how blocks would be scheduled.
"""

from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import erfc

from .budget import LnaParams, ReceiverModel, dbm_from_watts, watts_from_dbm
from .errors import InsufficientBits

_BLOCK_BITS = 8192
_WILSON_Z = 1.959963984540054  # two-sided 95%


@dataclass(frozen=True)
class LinkConfig:
    """Parameters of one OOK link run; the seed fully determines it."""

    carrier_hz: float
    bandwidth_hz: float
    bitrate: float
    modulation: str
    signal_power_dbm: float
    channel_noise_dbm: float
    seed: int
    n_bits: int
    lna: Optional[LnaParams] = None
    use_lna: bool = True
    r_i: float = 50.0
    temperature_k: float = 300.0

    def __post_init__(self):
        if self.modulation.lower() != "ook":
            raise ValueError(f"unsupported modulation {self.modulation!r}")
        if self.bitrate > self.bandwidth_hz:
            raise ValueError("bitrate cannot exceed the signal bandwidth")
        if self.n_bits < 1000:
            raise ValueError("need at least 1000 bits for a BER estimate")
        if self.carrier_hz <= 0 or self.bandwidth_hz <= 0 or self.bitrate <= 0:
            raise ValueError("carrier, bandwidth and bitrate must be positive")
        if self.r_i <= 0:
            raise ValueError("input impedance must be positive")


@dataclass(frozen=True)
class BerResult:
    ber: float
    n_errors: int
    n_bits: int
    wilson_ci95: Tuple[float, float]


def wilson_interval(n_errors: int, n_bits: int, z: float = _WILSON_Z):
    """Wilson score interval for a binomial proportion."""
    if n_bits <= 0:
        raise ValueError("need a positive trial count")
    p = n_errors / n_bits
    denom = 1.0 + z**2 / n_bits
    centre = (p + z**2 / (2 * n_bits)) / denom
    half = z * np.sqrt(p * (1 - p) / n_bits + z**2 / (4 * n_bits**2)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def ook_mark_amplitude(signal_power_dbm: float, r_i: float) -> float:
    """Envelope amplitude of the mark symbol for a given average power.

    Equiprobable OOK has half its symbols dark, so the mark carries
    twice the average power: A = 2*sqrt(R_i*P_avg).
    """
    p_avg = watts_from_dbm(signal_power_dbm)
    return 2.0 * np.sqrt(r_i * p_avg)


def ook_modulate(bits, cfg: LinkConfig) -> np.ndarray:
    """Map bits to baseband symbol amplitudes {0, A} in envelope volts."""
    bits = np.asarray(bits)
    if bits.size == 0:
        raise ValueError("bit sequence must be nonempty")
    return ook_mark_amplitude(cfg.signal_power_dbm, cfg.r_i) * bits.astype(float)


def receiver_noise_psd(cfg: LinkConfig, model: Optional[ReceiverModel]) -> float:
    """Receiver-internal noise referred to the antenna plane, V^2/Hz."""
    if model is None:
        return 0.0
    omega_c = 2.0 * np.pi * cfg.carrier_hz
    return float(
        model.input_noise_psd(omega_c, with_lna=cfg.use_lna and model.lna is not None)
    )


def mark_snr(cfg: LinkConfig, model: Optional[ReceiverModel]) -> float:
    """Mark-level SNR: mark PSD over channel plus receiver noise PSD."""
    s_mark = 2.0 * watts_from_dbm(cfg.signal_power_dbm) * cfg.r_i / cfg.bandwidth_hz
    n_ch = watts_from_dbm(cfg.channel_noise_dbm) * cfg.r_i / cfg.bandwidth_hz
    total = n_ch + receiver_noise_psd(cfg, model)
    if total == 0.0:
        return np.inf
    return s_mark / total


def signal_power_for_snr(
    cfg: LinkConfig, model: Optional[ReceiverModel], snr: float
) -> float:
    """Average signal power (dBm) that produces a given mark-level SNR."""
    if snr <= 0:
        raise ValueError("target SNR must be positive")
    n_ch = watts_from_dbm(cfg.channel_noise_dbm) * cfg.r_i / cfg.bandwidth_hz
    total = n_ch + receiver_noise_psd(cfg, model)
    p_avg = snr * total * cfg.bandwidth_hz / (2.0 * cfg.r_i)
    return dbm_from_watts(p_avg)


def analytic_ook_ber(snr: float) -> float:
    """Gaussian-threshold OOK error rate Q(sqrt(snr/2)).

    snr is the mark-level SNR; the in-phase quadrature carries half the
    complex noise power, and the midpoint threshold sits A/2 from each
    level, which gives Q(A/(2*sigma_I)) = Q(sqrt(snr/2)).
    """
    if snr < 0:
        raise ValueError("snr must be nonnegative")
    if np.isinf(snr):
        return 0.0
    return float(0.5 * erfc(np.sqrt(snr) / 2.0))


def _complex_noise(rng, n: int, variance: float) -> np.ndarray:
    if variance == 0.0:
        return np.zeros(n, dtype=complex)
    sigma = np.sqrt(variance / 2.0)
    return sigma * (rng.standard_normal(n) + 1j * rng.standard_normal(n))


def _chain_noise_variances(cfg: LinkConfig, model: Optional[ReceiverModel]):
    """Per-symbol complex noise variances for every insertion point.

    Each PSD (V^2/Hz in the budget convention, power = S*B/R_i) becomes
    an envelope variance 2*S*B.
    """
    b = cfg.bandwidth_hz
    n_ch = watts_from_dbm(cfg.channel_noise_dbm) * cfg.r_i / b
    var_ch = 2.0 * n_ch * b
    if model is None:
        return var_ch, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0
    omega_c = 2.0 * np.pi * cfg.carrier_hz
    with_lna = cfg.use_lna and model.lna is not None
    gain = model.lna.gain if with_lna else 1.0
    var_lna = 2.0 * (model.lna.noise_psd if with_lna else 0.0) * b
    var_johnson = 2.0 * model.electrical_psd().value * b
    t_fn = float(model.transfer(omega_c))
    var_film = 2.0 * model.film_psd(omega_c).value * b
    two_k = 2.0 * model.wave_k
    var_phase = 2.0 * two_k**2 * model.optical_displacement_psd(omega_c).value * b
    return var_ch, var_lna, var_johnson, var_film, var_phase, gain, t_fn, two_k


def _run_block(bits, amplitude, variances, rng):
    """Push one block of symbols through the receiver chain."""
    var_ch, var_lna, var_j, var_film, var_phase, gain, t_fn, two_k = variances
    n = bits.size
    y = amplitude * bits.astype(float) + _complex_noise(rng, n, var_ch)
    y = np.sqrt(gain) * y + _complex_noise(rng, n, var_lna)
    y = y + _complex_noise(rng, n, var_j)
    x = np.sqrt(t_fn) * y + _complex_noise(rng, n, var_film)
    phi = two_k * x + _complex_noise(rng, n, var_phase)
    # Refer the decision variable back to antenna volts.
    return phi / (two_k * np.sqrt(t_fn) * np.sqrt(gain))


def run_link(cfg: LinkConfig, model: Optional[ReceiverModel]) -> BerResult:
    """Monte Carlo OOK run through the full receiver chain.

    Channel noise enters at the antenna, the LNA amplifies signal and
    channel noise while adding its own, the circuit contributes Johnson
    noise, the electro-mechanical transfer applies at band centre, and
    film and optical noise enter in their own domains.  Detection uses
    a midpoint threshold learned from a 1% known-bit pilot prefix,
    which is excluded from the error count.
    """
    n_pilot = max(100, cfg.n_bits // 100)
    n_total = cfg.n_bits + n_pilot
    variances = _chain_noise_variances(cfg, model)
    amplitude = ook_mark_amplitude(cfg.signal_power_dbm, cfg.r_i)

    bits = np.empty(n_total, dtype=np.int64)
    z = np.empty(n_total, dtype=complex)
    start = 0
    block = 0
    while start < n_total:
        stop = min(start + _BLOCK_BITS, n_total)
        rng = np.random.Generator(np.random.Philox(key=cfg.seed).jumped(block))
        blk_bits = rng.integers(0, 2, size=stop - start)
        bits[start:stop] = blk_bits
        z[start:stop] = _run_block(blk_bits, amplitude, variances, rng)
        start = stop
        block += 1

    received = z.real
    pilot_bits, pilot_rx = bits[:n_pilot], received[:n_pilot]
    ones = pilot_rx[pilot_bits == 1]
    zeros = pilot_rx[pilot_bits == 0]
    if ones.size and zeros.size:
        threshold = 0.5 * (ones.mean() + zeros.mean())
    else:
        threshold = amplitude / 2.0
    decided = (received[n_pilot:] > threshold).astype(np.int64)
    n_errors = int(np.count_nonzero(decided != bits[n_pilot:]))
    ber = n_errors / cfg.n_bits
    if 0 < n_errors < 10:
        warnings.warn(
            f"only {n_errors} bit errors observed; BER estimate has low "
            "confidence",
            InsufficientBits,
            stacklevel=2,
        )
    return BerResult(
        ber=ber,
        n_errors=n_errors,
        n_bits=cfg.n_bits,
        wilson_ci95=wilson_interval(n_errors, cfg.n_bits),
    )


def snr_curve(
    cfg: LinkConfig,
    model: Optional[ReceiverModel],
    channel_noise_powers_dbm: Sequence[float],
):
    """Output SNR (dB) versus wireless channel noise power (dBm).

    Monotone nonincreasing in the channel noise; saturates at the
    receiver-noise-limited value once the channel noise is negligible.
    """
    if len(channel_noise_powers_dbm) == 0:
        raise ValueError("need at least one channel noise power")
    rows = []
    for noise_dbm in channel_noise_powers_dbm:
        trial = dataclasses.replace(cfg, channel_noise_dbm=noise_dbm)
        snr = mark_snr(trial, model)
        rows.append((noise_dbm, 10.0 * np.log10(snr)))
    return rows


def capacity_bounds(signal_power_w: float, noise_power_w: float):
    """Spectral-efficiency bounds for the intensity-modulated channel.

    Average-power-constrained intensity channel with Gaussian noise:
    lower bound from a maximum-entropy (half-Gaussian-class) input,
    C >= 0.5*log2(1 + e*s/(2*pi)); upper bound from the Gaussian
    capacity with the same second moment, C <= 0.5*log2(1 + s), where
    s is the received signal-to-noise power ratio.  Both are in
    bit/s/Hz, ordered, monotone, and vanish with the signal.
    """
    if noise_power_w <= 0:
        raise ValueError("noise power must be positive")
    if signal_power_w < 0:
        raise ValueError("signal power must be nonnegative")
    s = signal_power_w / noise_power_w
    lower = 0.5 * np.log2(1.0 + np.e * s / (2.0 * np.pi))
    upper = 0.5 * np.log2(1.0 + s)
    return float(lower), float(upper)
