"""Figure rendering for the CLI report path.

Each sweep-producing command gets one matplotlib figure written next to
its delimited output.  The data file remains the primary artifact; the
figures are a convenience view of the same rows.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

# PNG metadata is pinned so repeated runs produce identical bytes.
_SAVE_KW = {"dpi": 120, "metadata": {"Software": "poemrx"}}


def _column(result, name):
    idx = list(result.columns).index(name)
    return np.array([row[idx] for row in result.rows])


def render_figure(command: str, result, path: str) -> str:
    """Render the table of `command` to a PNG at `path`."""
    renderer = _RENDERERS.get(command)
    if renderer is None:
        return ""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    renderer(ax, result)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path


def _admittance(ax, result):
    f = _column(result, "frequency_hz")
    mag = _column(result, "abs_admittance_s")
    ax.semilogy(f / 1e9, mag, lw=1.0)
    ax.set_xlabel("frequency (GHz)")
    ax.set_ylabel("|Y| (S)")
    ax.set_title("film admittance")
    ax.grid(True, which="both", alpha=0.3)


def _response(ax, result):
    f = _column(result, "frequency_hz")
    r = _column(result, "response_a_per_pm")
    ax.plot(f / 1e9, r, lw=1.0)
    ax.set_xlabel("frequency (GHz)")
    ax.set_ylabel("response (A/pm)")
    ax.set_title("readout response to mirror motion")
    ax.grid(True, alpha=0.3)


def _sensitivity(ax, result):
    if "sensitivity_m_per_rthz" in result.columns:
        f = _column(result, "frequency_hz")
        s = _column(result, "sensitivity_m_per_rthz")
        ax.semilogy(f / 1e9, s, lw=1.0)
        ax.set_xlabel("frequency (GHz)")
        ax.set_ylabel("sensitivity (m/$\\sqrt{\\mathrm{Hz}}$)")
        ax.set_title("noise-limited displacement sensitivity")
        ax.grid(True, which="both", alpha=0.3)
        return
    b = _column(result, "bandwidth_hz")
    loss = _column(result, "loss_coeff")
    dbm = _column(result, "min_power_dbm")
    if len(np.unique(b)) > 1:
        for lv in np.unique(loss):
            sel = loss == lv
            ax.semilogx(b[sel], dbm[sel], marker="o", ms=3, label=f"loss {lv:g}")
        ax.set_xlabel("bandwidth (Hz)")
    else:
        ax.semilogx(loss, dbm, marker="o", ms=3, label=f"B = {b[0]:g} Hz")
        ax.set_xlabel("lens power loss")
    ax.set_ylabel("minimum detectable power (dBm)")
    ax.set_title("receiver sensitivity")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.3)


def _noise_budget(ax, result):
    names = [row[0] for row in result.rows]
    vals = _column(result, "output_psd_rad2_per_hz")
    ax.bar(names, vals)
    ax.set_yscale("log")
    ax.set_ylabel("output phase PSD (rad$^2$/Hz)")
    ax.set_title("noise budget at the carrier")
    ax.grid(True, axis="y", which="both", alpha=0.3)


def _ber(ax, result):
    x = _column(result, "channel_noise_dbm")
    ber = np.clip(_column(result, "ber"), 1e-12, None)
    lo = np.clip(_column(result, "ci_low"), 1e-12, None)
    hi = np.clip(_column(result, "ci_high"), 1e-12, None)
    ax.semilogy(x, ber, marker="o", ms=3)
    ax.fill_between(x, lo, hi, alpha=0.25)
    ax.set_xlabel("channel noise power (dBm)")
    ax.set_ylabel("BER")
    ax.set_title("OOK bit error rate")
    ax.grid(True, which="both", alpha=0.3)


def _snr(ax, result):
    x = _column(result, "channel_noise_dbm")
    s = _column(result, "snr_db")
    ax.plot(x, s, marker="o", ms=3)
    ax.set_xlabel("channel noise power (dBm)")
    ax.set_ylabel("output SNR (dB)")
    ax.set_title("output SNR vs channel noise")
    ax.grid(True, alpha=0.3)


def _capacity(ax, result):
    x = _column(result, "signal_power_dbm")
    lo = _column(result, "capacity_lower_bit_s_hz")
    hi = _column(result, "capacity_upper_bit_s_hz")
    ax.plot(x, lo, label="lower bound")
    ax.plot(x, hi, label="upper bound")
    ax.set_xlabel("received power (dBm)")
    ax.set_ylabel("spectral efficiency (bit/s/Hz)")
    ax.set_title("capacity bounds")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)


def _sweep(ax, result):
    cols = list(result.columns)
    if "min_power_dbm" in cols:
        _sensitivity(ax, result)
    elif "snr_db" in cols:
        _snr(ax, result)
    elif "capacity_lower_bit_s_hz" in cols:
        _capacity(ax, result)
    else:
        w = _column(result, "omega_rad_s")
        t = _column(result, "transfer_dimensionless")
        ax.semilogy(w / (2 * np.pi * 1e9), t, lw=1.0)
        ax.set_xlabel("frequency (GHz)")
        ax.set_ylabel("|G chi_eff chi_lc|$^2$")
        ax.set_title("coupled transfer function")
        ax.grid(True, which="both", alpha=0.3)


_RENDERERS = {
    "admittance": _admittance,
    "response": _response,
    "sensitivity": _sensitivity,
    "noise-budget": _noise_budget,
    "sweep": _sweep,
    "ber": _ber,
    "snr": _snr,
    "capacity": _capacity,
}
