"""Command-line surface: sweeps, link runs and table emission.

Every command reads the same config file (``--config`` or the
POEMRX_CONFIG environment variable; absent means the built-in defaults),
writes delimited output with a fixed column order, and exits with
0 success / 2 usage / 3 config validation / 4 numeric domain / 5 I/O.

Floats are serialized with 17 significant digits so that files
round-trip exactly; identical config and seed give byte-identical
output.  ``--plot`` additionally renders a figure next to the output
file.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from . import budget, config, film, link, optics
from .coupling import (
    circuit_susceptibility,
    effective_susceptibility,
    transfer_function,
)
from .errors import ConfigError, DomainError, IoError, PoemrxError


@dataclass(frozen=True)
class SweepSpec:
    """A one-variable sweep: start, stop, point count, optional log spacing."""

    variable: str
    start: float
    stop: float
    n_points: int
    log: bool = False

    _VARIABLES = ("bandwidth", "loss", "channel_noise", "signal_power", "frequency")

    def __post_init__(self):
        if self.variable not in self._VARIABLES:
            raise ValueError(f"unknown sweep variable {self.variable!r}")
        if not self.start < self.stop:
            raise ValueError("sweep needs start < stop")
        if self.n_points < 2:
            raise ValueError("sweep needs at least two points")

    def values(self) -> np.ndarray:
        if self.log:
            if self.start <= 0:
                raise ValueError("log spacing needs a positive start")
            return np.geomspace(self.start, self.stop, self.n_points)
        return np.linspace(self.start, self.stop, self.n_points)


@dataclass(frozen=True)
class TableResult:
    """Rows plus a fixed column order, ready for csv/json emission."""

    columns: Sequence[str]
    rows: List[tuple]


def _format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _json_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return json.dumps(str(value))


def render(result: TableResult, fmt: str) -> str:
    """Serialize a table as csv or json text (deterministic bytes)."""
    if fmt == "csv":
        lines = [",".join(result.columns)]
        lines.extend(
            ",".join(_format_cell(v) for v in row) for row in result.rows
        )
        return "\n".join(lines) + "\n"
    if fmt == "json":
        row_texts = []
        for row in result.rows:
            pairs = ", ".join(
                f"{json.dumps(col)}: {_json_cell(v)}"
                for col, v in zip(result.columns, row)
            )
            row_texts.append("  {" + pairs + "}")
        if not row_texts:
            return "[]\n"
        return "[\n" + ",\n".join(row_texts) + "\n]\n"
    raise ValueError(f"unknown format {fmt!r}")


def load_table(path: str) -> TableResult:
    """Read back a table emitted by this module (csv or json)."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".json") or text.lstrip().startswith("["):
        data = json.loads(text)
        if not data:
            return TableResult(columns=[], rows=[])
        columns = list(data[0].keys())
        return TableResult(
            columns=columns, rows=[tuple(d[c] for c in columns) for d in data]
        )
    lines = [ln for ln in text.splitlines() if ln]
    columns = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        cells = []
        for cell in ln.split(","):
            if cell in ("true", "false"):
                cells.append(cell == "true")
            else:
                try:
                    cells.append(int(cell))
                except ValueError:
                    try:
                        cells.append(float(cell))
                    except ValueError:
                        cells.append(cell)
        rows.append(tuple(cells))
    return TableResult(columns=columns, rows=rows)


def emit(result: TableResult, fmt: str, path: Optional[str]) -> str:
    """Write (or print) the table; returns the serialized text."""
    text = render(result, fmt)
    if path is None:
        sys.stdout.write(text)
    else:
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise IoError(f"cannot write {path}: {exc}") from exc
    return text


# ---------------------------------------------------------------------------
# Command implementations, each returning a TableResult.
# ---------------------------------------------------------------------------


def cmd_admittance(cfg: config.RunConfig, args) -> TableResult:
    freqs, y, poles = film.admittance_spectrum(
        cfg.material, cfg.geometry, args.fmin, args.fmax, args.points
    )
    if args.out is not None:
        peak = film.admittance_peak(
            cfg.material, cfg.geometry, args.fmin, args.fmax, args.points
        )
        print(f"peak |Y| at {peak:.6g} Hz")
    rows = [
        (float(f), float(v.real), float(v.imag), float(abs(v)), bool(p))
        for f, v, p in zip(freqs, y, poles)
    ]
    return TableResult(
        columns=(
            "frequency_hz",
            "re_admittance_s",
            "im_admittance_s",
            "abs_admittance_s",
            "is_pole",
        ),
        rows=rows,
    )


def cmd_response(cfg: config.RunConfig, args) -> TableResult:
    freqs = np.linspace(args.fmin, args.fmax, args.points)
    freqs, resp = optics.response_spectrum(cfg.optics, freqs, args.amplitude)
    return TableResult(
        columns=("frequency_hz", "response_a_per_pm"),
        rows=[(float(f), float(r)) for f, r in zip(freqs, resp)],
    )


def _sensitivity_row(res: budget.SensitivityResult) -> tuple:
    return (
        res.bandwidth_hz,
        res.loss_coefficient,
        res.with_lna,
        res.min_power_dbm,
        res.min_psd,
    )


_SENS_COLUMNS = (
    "bandwidth_hz",
    "loss_coeff",
    "with_lna",
    "min_power_dbm",
    "min_psd_v2_per_hz",
)


def cmd_sensitivity(cfg: config.RunConfig, args) -> TableResult:
    if args.spectrum:
        lay = dataclasses.replace(cfg.optics, lens_loss=args.loss)
        freqs = np.linspace(args.fmin, args.fmax, args.points)
        cav = cfg.cavity
        freqs, sens = optics.noise_limited_sensitivity_spectrum(
            lay, cav.kappa, cav.n_cav, cav.g_opt, cfg.oscillator, freqs
        )
        return TableResult(
            columns=("frequency_hz", "sensitivity_m_per_rthz"),
            rows=[(float(f), float(s)) for f, s in zip(freqs, sens)],
        )
    model = cfg.receiver_model()
    res = model.min_detectable_power(
        args.bandwidth, lens_loss=args.loss, with_lna=args.lna
    )
    print(
        f"minimum detectable power: {res.min_power_dbm:.1f} dBm "
        f"(bandwidth {args.bandwidth:g} Hz, loss {args.loss:g}, "
        f"LNA {'on' if args.lna else 'off'})"
    )
    return TableResult(columns=_SENS_COLUMNS, rows=[_sensitivity_row(res)])


def cmd_noise_budget(cfg: config.RunConfig, args) -> TableResult:
    model = cfg.receiver_model()
    stack = model.noise_stack(args.channel_noise, cfg.link.bandwidth_hz)
    return TableResult(
        columns=("component", "output_psd_rad2_per_hz"),
        rows=[(name, float(v)) for name, v in stack],
    )


def cmd_sweep(cfg: config.RunConfig, args) -> TableResult:
    spec = SweepSpec(
        variable=args.variable,
        start=args.start,
        stop=args.stop,
        n_points=args.points,
        log=args.log,
    )
    model = cfg.receiver_model()
    values = spec.values()
    if spec.variable == "bandwidth":
        results = budget.sensitivity_sweep(
            model, values, [cfg.optics.lens_loss], args.lna
        )
        return TableResult(_SENS_COLUMNS, [_sensitivity_row(r) for r in results])
    if spec.variable == "loss":
        results = budget.sensitivity_sweep(
            model, [cfg.link.bandwidth_hz], values, args.lna
        )
        return TableResult(_SENS_COLUMNS, [_sensitivity_row(r) for r in results])
    if spec.variable == "channel_noise":
        rows = link.snr_curve(cfg.link, model, values)
        return TableResult(
            columns=("channel_noise_dbm", "snr_db", "ci_low", "ci_high", "n_bits", "seed"),
            rows=[
                (float(x), float(s), float(s), float(s), 0, cfg.link.seed)
                for x, s in rows
            ],
        )
    if spec.variable == "signal_power":
        noise_w = budget.watts_from_dbm(args.channel_noise) + model.band_noise_power(
            cfg.link.bandwidth_hz, with_lna=cfg.link.use_lna
        )
        rows = []
        for p_dbm in values:
            lo, hi = link.capacity_bounds(budget.watts_from_dbm(p_dbm), noise_w)
            rows.append((float(p_dbm), lo, hi))
        return TableResult(
            columns=(
                "signal_power_dbm",
                "capacity_lower_bit_s_hz",
                "capacity_upper_bit_s_hz",
            ),
            rows=rows,
        )
    # frequency sweep of the coupled transfer function
    omega = 2.0 * np.pi * values
    rows = [
        (
            float(w),
            float(transfer_function(cfg.oscillator, cfg.circuit, w)),
            float(abs(effective_susceptibility(cfg.oscillator, cfg.circuit, w))),
            float(abs(circuit_susceptibility(cfg.circuit, w))),
        )
        for w in omega
    ]
    return TableResult(
        columns=(
            "omega_rad_s",
            "transfer_dimensionless",
            "abs_chi_m_eff",
            "abs_chi_lc",
        ),
        rows=rows,
    )


def _ber_rows(cfg: config.RunConfig, noise_values, seed: int):
    model = cfg.receiver_model()
    rows = []
    for noise_dbm in noise_values:
        lc = dataclasses.replace(
            cfg.link, channel_noise_dbm=float(noise_dbm), seed=seed
        )
        res = link.run_link(lc, model)
        rows.append(
            (
                float(noise_dbm),
                res.ber,
                res.wilson_ci95[0],
                res.wilson_ci95[1],
                res.n_bits,
                seed,
            )
        )
    return rows


def cmd_ber(cfg: config.RunConfig, args) -> TableResult:
    seed = cfg.link.seed if args.seed is None else args.seed
    if args.points == 1:
        values = [args.noise_start]
    else:
        values = np.linspace(args.noise_start, args.noise_stop, args.points)
    return TableResult(
        columns=("channel_noise_dbm", "ber", "ci_low", "ci_high", "n_bits", "seed"),
        rows=_ber_rows(cfg, values, seed),
    )


def cmd_snr(cfg: config.RunConfig, args) -> TableResult:
    model = cfg.receiver_model()
    if args.points == 1:
        values = [args.noise_start]
    else:
        values = np.linspace(args.noise_start, args.noise_stop, args.points)
    rows = link.snr_curve(cfg.link, model, values)
    return TableResult(
        columns=("channel_noise_dbm", "snr_db", "ci_low", "ci_high", "n_bits", "seed"),
        rows=[
            (float(x), float(s), float(s), float(s), 0, cfg.link.seed)
            for x, s in rows
        ],
    )


def cmd_capacity(cfg: config.RunConfig, args) -> TableResult:
    model = cfg.receiver_model()
    noise_w = budget.watts_from_dbm(args.channel_noise) + model.band_noise_power(
        cfg.link.bandwidth_hz, with_lna=cfg.link.use_lna
    )
    values = np.linspace(args.power_start, args.power_stop, args.points)
    rows = []
    for p_dbm in values:
        lo, hi = link.capacity_bounds(budget.watts_from_dbm(p_dbm), noise_w)
        rows.append((float(p_dbm), lo, hi))
    return TableResult(
        columns=(
            "signal_power_dbm",
            "capacity_lower_bit_s_hz",
            "capacity_upper_bit_s_hz",
        ),
        rows=rows,
    )


def cmd_reference_table(cfg: config.RunConfig, args) -> TableResult:
    return TableResult(
        columns=("standard", "class", "bandwidth_hz", "dbm"),
        rows=budget.reference_levels(),
    )


def _selftest_checks(cfg: config.RunConfig):
    """Fast closed-form identity checks spanning every module."""
    from scipy import constants

    mat, geom = cfg.material, cfg.geometry
    unit_mat = dataclasses.replace(mat, c_d=mat.rho, c_e=0.0, e33=0.0)
    checks = []

    def ok(name, condition):
        checks.append((name, bool(condition)))

    ok("phase velocity unit ratio", abs(film.phase_velocity(unit_mat) - 1.0) < 1e-12)
    uncoupled = dataclasses.replace(mat, e33=0.0, c_e=0.0)
    half_wave = np.pi * film.phase_velocity(uncoupled) / geom.thickness
    ok(
        "series resonance half-wave limit",
        abs(film.series_resonance(uncoupled, geom) - half_wave) < 1e-9 * half_wave,
    )
    z = film.input_impedance(uncoupled, geom, 2 * np.pi * 1e9)
    z_cap = 1.0 / (
        1j * 2 * np.pi * 1e9 * film.static_capacitance(uncoupled, geom)
    )
    ok("uncoupled film is a pure capacitor", abs(z - z_cap) < 1e-9 * abs(z_cap))
    ok(
        "wave number of a 2*pi metre wave",
        abs(optics.wave_number(2 * np.pi) - 1.0) < 1e-12,
    )
    lam_unit = constants.h * constants.c / constants.e
    ok(
        "watts-to-ampere at hc/e",
        abs(optics.watts_to_ampere(lam_unit) - 1.0) < 1e-12,
    )
    mod = optics.MirrorModulation(amplitude=1e-15, angular_frequency=2 * np.pi * 1e9)
    dark = np.pi / 2 / optics.wave_number(cfg.optics.wavelength)
    ok(
        "michelson dark fringe",
        abs(optics.michelson_output_current(cfg.optics, dark, mod, 0.0)) < 1e-12,
    )
    mirror = optics.MirrorSpec.from_power(0.1)
    blank = optics.MirrorSpec(r=0.0, t=1.0)
    ok(
        "cavity with no end mirror returns r1",
        abs(optics.cavity_reflectance(mirror, blank, 1.0, 1.0) - mirror.r) < 1e-12,
    )
    imp0 = optics.optical_imprecision_psd(1e7, 1e10, 1e15, 0.0).value
    imp1 = optics.optical_imprecision_psd(1e7, 1e10, 1e15, 5e6).value
    ok("imprecision doubles at kappa/2", abs(imp1 / imp0 - 2.0) < 1e-12)
    chi = circuit_susceptibility(cfg.circuit, cfg.circuit.omega_lc)
    ok("circuit susceptibility imaginary on resonance", abs(chi.real) < 1e-9 * abs(chi))
    ok(
        "electrical noise vanishes at T=0",
        budget.electrical_noise_psd(0.0, 1.0).value == 0.0,
    )
    s = budget.voltage_psd(1e-18)
    p1, _ = budget.min_power(s, 1e6, 50.0)
    p2, _ = budget.min_power(s, 2e6, 50.0)
    ok("min power doubles with bandwidth", abs(p2 / p1 - 2.0) < 1e-12)
    ok("reference table has 8 rows", len(budget.reference_levels()) == 8)
    lo, hi = link.capacity_bounds(1e-15, 1e-18)
    ok("capacity bounds ordered", lo <= hi)
    ok("OOK BER at zero SNR is a coin flip", abs(link.analytic_ook_ber(0.0) - 0.5) < 1e-12)
    return checks


def cmd_selftest(cfg: config.RunConfig, args) -> TableResult:
    rows = []
    if args.calibrate:
        model = cfg.receiver_model()
        g = budget.calibrate_coupling(model)
        res = model.with_coupling(g).min_detectable_power(
            3.75e3, lens_loss=1e-5, with_lna=True
        )
        print(f"calibrated coupling_g = {g:.17g}")
        print(f"anchor check: {res.min_power_dbm:.4f} dBm at 3.75 kHz")
        if args.write:
            try:
                with open(args.write, "w", encoding="utf-8") as fh:
                    fh.write(f"[calibration]\ncoupling_g = {g:.17g}\n")
            except OSError as exc:
                raise IoError(f"cannot write {args.write}: {exc}") from exc
        rows.append(("calibration", True))
    checks = _selftest_checks(cfg)
    failed = [name for name, passed in checks if not passed]
    for name, passed in checks:
        print(f"{'ok' if passed else 'FAIL'} - {name}")
        rows.append((name, passed))
    if failed:
        raise DomainError(f"selftest failures: {', '.join(failed)}")
    return TableResult(columns=("check", "passed"), rows=rows)


# ---------------------------------------------------------------------------
# Argument parsing and dispatch.
# ---------------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="config file path (default: env or built-ins)")
    parser.add_argument("--out", help="output file path (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument(
        "--plot", action="store_true", help="render a figure next to --out"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="poemrx",
        description="Piezo-opto-electro-mechanical RF receiver simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("admittance", help="film admittance spectrum")
    _add_common(p)
    p.add_argument("--fmin", type=float, default=0.85e9)
    p.add_argument("--fmax", type=float, default=1.15e9)
    p.add_argument("--points", type=int, default=2001)
    p.set_defaults(func=cmd_admittance)

    p = sub.add_parser("response", help="readout response to mirror motion")
    _add_common(p)
    p.add_argument("--fmin", type=float, default=0.85e9)
    p.add_argument("--fmax", type=float, default=1.15e9)
    p.add_argument("--points", type=int, default=1201)
    p.add_argument("--amplitude", type=float, default=1e-12, help="motion amplitude, m")
    p.set_defaults(func=cmd_response)

    p = sub.add_parser("sensitivity", help="minimum detectable power")
    _add_common(p)
    p.add_argument("--bandwidth", type=float, default=3.75e3)
    p.add_argument("--loss", type=float, default=1e-5)
    lna = p.add_mutually_exclusive_group()
    lna.add_argument("--lna", dest="lna", action="store_true", default=True)
    lna.add_argument("--no-lna", dest="lna", action="store_false")
    p.add_argument(
        "--spectrum",
        action="store_true",
        help="emit the optical noise-limited displacement sensitivity "
        "spectrum (m/sqrt(Hz)) instead of the power budget",
    )
    p.add_argument("--fmin", type=float, default=0.85e9)
    p.add_argument("--fmax", type=float, default=1.15e9)
    p.add_argument("--points", type=int, default=1201)
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("noise-budget", help="output-domain noise stack at the carrier")
    _add_common(p)
    p.add_argument("--channel-noise", type=float, default=-160.0, help="dBm")
    p.set_defaults(func=cmd_noise_budget)

    p = sub.add_parser("sweep", help="one-variable parameter sweep")
    _add_common(p)
    p.add_argument(
        "--variable",
        required=True,
        choices=SweepSpec._VARIABLES,
    )
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--points", type=int, default=25)
    p.add_argument("--log", action="store_true", help="log-spaced points")
    p.add_argument("--channel-noise", type=float, default=-165.0, help="dBm")
    lna = p.add_mutually_exclusive_group()
    lna.add_argument("--lna", dest="lna", action="store_true", default=True)
    lna.add_argument("--no-lna", dest="lna", action="store_false")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ber", help="Monte Carlo OOK bit error rate")
    _add_common(p)
    p.add_argument("--noise-start", type=float, default=-180.0)
    p.add_argument("--noise-stop", type=float, default=-150.0)
    p.add_argument("--points", type=int, default=13)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_ber)

    p = sub.add_parser("snr", help="output SNR vs channel noise power")
    _add_common(p)
    p.add_argument("--noise-start", type=float, default=-180.0)
    p.add_argument("--noise-stop", type=float, default=-150.0)
    p.add_argument("--points", type=int, default=13)
    p.set_defaults(func=cmd_snr)

    p = sub.add_parser("capacity", help="capacity bounds vs received power")
    _add_common(p)
    p.add_argument("--power-start", type=float, default=-170.0)
    p.add_argument("--power-stop", type=float, default=-130.0)
    p.add_argument("--points", type=int, default=21)
    p.add_argument("--channel-noise", type=float, default=-165.0, help="dBm")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("reference-table", help="LTE base-station reference levels")
    _add_common(p)
    p.set_defaults(func=cmd_reference_table)

    p = sub.add_parser("selftest", help="run built-in identity checks")
    _add_common(p)
    p.add_argument(
        "--calibrate",
        action="store_true",
        help="solve the coupling against the sensitivity anchor",
    )
    p.add_argument("--write", help="write the calibrated coupling to this file")
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config.load_config(args.config)
        result = args.func(cfg, args)
        printed_summary = args.func is cmd_selftest or (
            args.func is cmd_sensitivity and not getattr(args, "spectrum", False)
        )
        if args.out is not None or not printed_summary:
            emit(result, args.format, args.out)
        if args.plot:
            from . import report

            base = args.out if args.out else args.command
            report.render_figure(args.command, result, base + ".png")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return exc.exit_code
    except DomainError as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return exc.exit_code
    except IoError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 5
    except PoemrxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
