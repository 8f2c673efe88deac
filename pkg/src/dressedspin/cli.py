"""Command-line interface.

Four subcommands: effective-field, simulate, scan, calibrate.  Frequencies
are reported the way lab notebooks record them, as ordinary frequencies in
kHz (value = omega/2pi); configuration files use the same unit.  CSV output
is deterministic: identical invocations produce byte-identical files.

Exit codes: 0 success, 2 usage/configuration error, 3 numerical failure,
4 fit failure.
"""

import argparse
import math
import sys

from .analysis import (
    ScanSpec,
    calibrate,
    run_scan,
    synthetic_calibration_data,
)
from .config import validate
from .configfile import apply_overrides, load_config
from .effective import floquet_first_order, rectified_field
from .errors import (
    ConfigFileError,
    ConfigurationError,
    DegenerateData,
    DressedSpinError,
    FitDiverged,
    NoConvergence,
    NoOscillation,
    SeriesNotConverged,
    UnitarityLost,
)
from .propagate import analytic_coherences, propagate_spin_half, propagate_bloch_spin1

CSV_SCHEMA = "dressedspin-csv v1"
_KHZ = 2.0 * math.pi * 1e3

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_FIT = 4


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def _write_csv(path, comment_lines, header, rows):
    lines = [f"# {CSV_SCHEMA}"]
    lines += [f"# {c}" for c in comment_lines]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _bundle_comments(config):
    b_xi = config.xi()
    c = [
        f"spin = {config.spin}",
        f"xi = {_fmt(b_xi)}",
        f"omega/2pi_kHz = {_fmt(config.dressing.omega / _KHZ)}",
        f"omega0/omega = ({_fmt(config.static.omega0x / config.dressing.omega)},"
        f"{_fmt(config.static.omega0y / config.dressing.omega)},"
        f"{_fmt(config.static.omega0z / config.dressing.omega)})",
    ]
    for i, t in enumerate(config.tuning):
        c.append(
            f"tuning.{i}: axis={t.axis} amplitude/omega={_fmt(t.amplitude / config.dressing.omega)} "
            f"harmonic={t.harmonic} phase_rad={_fmt(t.phase)}"
        )
    return c


def _load(args):
    config = load_config(args.config)
    if args.set:
        config = apply_overrides(config, args.set)
    return validate(config)


def cmd_effective_field(args) -> int:
    config = _load(args)
    field = rectified_field(config)
    flo = floquet_first_order(config)
    print(f"xi                : {_fmt(config.xi())}")
    print(f"h_x/2pi (kHz)     : {_fmt(field.hx / _KHZ)}")
    print(f"h_y/2pi (kHz)     : {_fmt(field.hy / _KHZ)}")
    print(f"h_z/2pi (kHz)     : {_fmt(field.hz / _KHZ)}")
    print(f"Omega_L/2pi (kHz) : {_fmt(field.omega_L / _KHZ)}")
    print(f"eta               : {_fmt(field.eta)}")
    print(f"p1_norm_max       : {_fmt(flo.p1_norm_max)}")
    if field.eta > 0.3:
        print("warning: eta > 0.3, first-order results are not trustworthy here", file=sys.stderr)
    if args.csv is not None:
        _write_csv(
            args.csv,
            _bundle_comments(config),
            ["hx_kHz", "hy_kHz", "hz_kHz", "omega_L_kHz", "xi", "eta", "p1_norm_max"],
            [[field.hx / _KHZ, field.hy / _KHZ, field.hz / _KHZ, field.omega_L / _KHZ,
              config.xi(), field.eta, flo.p1_norm_max]],
        )
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = _load(args)
    if args.samples < 2:
        raise ConfigFileError("--samples must be >= 2", source="<args>", key="samples")
    if not args.t_end > 0.0:
        raise ConfigFileError("--t-end must be > 0", source="<args>", key="t-end")
    columns = {"t_s": None}
    series = {}
    if args.method in ("analytic", "both"):
        series["an"] = analytic_coherences(config, args.t_end, args.samples)
    if args.method in ("numeric", "both"):
        if config.spin == "one":
            series["num"] = propagate_bloch_spin1(config, args.t_end, args.samples)
        else:
            series["num"] = propagate_spin_half(config, args.t_end, args.samples)
    header = ["t_s"]
    for tag in series:
        header += [f"sx_{tag}", f"sy_{tag}", f"sz_{tag}"]
    any_series = next(iter(series.values()))
    rows = []
    for i, t in enumerate(any_series.times):
        row = [float(t)]
        for tag in series:
            s = series[tag]
            row += [float(s.sx[i]), float(s.sy[i]), float(s.sz[i])]
        rows.append(row)
    comments = _bundle_comments(config)
    for tag, s in series.items():
        if s.degenerate_field:
            comments.append(f"{tag}: degenerate field (Omega_L = 0), coherences frozen")
    _write_csv(args.out, comments, header, rows)
    return EXIT_OK


def cmd_scan(args) -> int:
    config = _load(args)
    if args.points < 2:
        raise ConfigFileError("--points must be >= 2", source="<args>", key="points")
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    lo, hi = args.start, args.stop
    if args.sweep == "phi":
        lo, hi = math.radians(lo), math.radians(hi)
    elif args.sweep == "omega0x":
        lo, hi = lo * _KHZ, hi * _KHZ
    step = (hi - lo) / (args.points - 1)
    grid = [lo + i * step for i in range(args.points)]
    spec = ScanSpec(swept=args.sweep, grid=grid, base=config, methods=methods)
    result = run_scan(spec, jobs=args.jobs)

    if args.sweep == "xi":
        value_col, value_of = "xi", lambda v: v
    elif args.sweep == "phi":
        value_col, value_of = "phi_deg", math.degrees
    else:
        value_col, value_of = "omega0x_kHz", lambda v: v / _KHZ

    header = [value_col]
    for m in methods:
        header.append(f"omega_L_{m}_kHz")
    header += ["eta", "alias", "p1_norm_max", "error"]
    rows = []
    failed = 0
    for row in result.rows:
        out = [value_of(row.value)]
        for m in methods:
            val = getattr(row, m)
            out.append(val / _KHZ if val is not None else None)
        out += [row.eta, row.alias_ambiguous, row.p1_norm_max, ";".join(row.errors)]
        rows.append(out)
        if row.errors and all(getattr(row, m) is None for m in methods):
            failed += 1
    _write_csv(args.out, _bundle_comments(config) + [f"sweep = {args.sweep}"], header, rows)
    if failed == len(result.rows):
        print("error: every scan point failed", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _read_ratio_csv(path):
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = None
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                tag = line[1:].strip()
                if tag.startswith("dressedspin-csv") and tag != CSV_SCHEMA:
                    raise ConfigFileError(
                        f"unknown CSV schema {tag!r} (expected {CSV_SCHEMA!r})",
                        source=str(path),
                        line=lineno,
                    )
                continue
            cells = [c.strip() for c in line.split(",")]
            if header is None:
                header = [c.lower() for c in cells]
                if "omega0x_khz" not in header or "ratio" not in header:
                    raise ConfigFileError(
                        "data CSV needs columns omega0x_kHz, ratio", source=str(path), line=lineno
                    )
                iw, ir = header.index("omega0x_khz"), header.index("ratio")
                continue
            try:
                rows.append((float(cells[iw]) * _KHZ, float(cells[ir])))
            except (ValueError, IndexError):
                raise ConfigFileError("bad data row", source=str(path), line=lineno) from None
    if header is None:
        raise ConfigFileError("empty data file", source=str(path))
    return rows


def cmd_calibrate(args) -> int:
    omega0z = args.omega0z * _KHZ
    omega = args.omega * _KHZ if args.omega is not None else None
    if args.synthetic:
        grid_khz = [1.5 * i for i in range(11)]  # 0..15 kHz nominal transverse field
        data = synthetic_calibration_data(
            [w * _KHZ for w in grid_khz],
            omega0z=omega0z,
            xi=args.true_xi,
            scale=args.true_scale,
            tilt=args.true_tilt,
            noise=args.noise,
            seed=args.seed,
        )
    else:
        if args.data is None:
            raise ConfigFileError("either a data CSV or --synthetic is required", source="<args>", key="data")
        data = _read_ratio_csv(args.data)
        if not data:
            raise ConfigFileError("data file has no rows", source=str(args.data))
    fit = calibrate(data, omega0z=omega0z, omega=omega)
    print(f"scale         : {_fmt(fit.scale)} +- {_fmt(fit.scale_err)}")
    print(f"tilt          : {_fmt(fit.tilt)} +- {_fmt(fit.tilt_err)}")
    print(f"xi            : {_fmt(fit.xi)} +- {_fmt(fit.xi_err)}")
    print(f"residual_norm : {_fmt(fit.residual_norm)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dressedspin",
        description="Dressed-spin dynamics with harmonic tuning fields",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_args(p):
        p.add_argument("config", help="configuration file (see README for the schema)")
        p.add_argument("--set", action="append", default=[], metavar="PATH=VALUE",
                       help="override a configuration value, e.g. static.x=3.5 or tuning.0.phase=45deg")

    p = sub.add_parser("effective-field", help="rectified field, Larmor frequency and diagnostics")
    add_config_args(p)
    p.add_argument("--csv", default=None, help="also write a one-row CSV ('-' for stdout)")
    p.set_defaults(func=cmd_effective_field)

    p = sub.add_parser("simulate", help="coherence time series (analytic and/or numeric)")
    add_config_args(p)
    p.add_argument("--t-end", type=float, required=True, dest="t_end", help="duration in seconds")
    p.add_argument("--samples", type=int, required=True, help="number of samples (>= 2)")
    p.add_argument("--method", choices=("analytic", "numeric", "both"), default="both")
    p.add_argument("--out", default=None, help="output CSV path (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("scan", help="sweep xi, the tuning phase, or the transverse field")
    add_config_args(p)
    p.add_argument("--sweep", choices=("xi", "phi", "omega0x"), required=True)
    p.add_argument("--from", type=float, required=True, dest="start",
                   help="start value (xi: dimensionless, phi: degrees, omega0x: kHz)")
    p.add_argument("--to", type=float, required=True, dest="stop", help="end value")
    p.add_argument("--points", type=int, required=True, help="number of grid points (>= 2)")
    p.add_argument("--methods", default="perturbative",
                   help="comma list from perturbative,monodromy,timeseries")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers across grid points")
    p.add_argument("--out", default=None, help="output CSV path (default stdout)")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("calibrate", help="fit dressed/undressed ratio data for scale, tilt and xi")
    p.add_argument("data", nargs="?", default=None, help="CSV with columns omega0x_kHz, ratio")
    p.add_argument("--omega0z", type=float, required=True, help="fixed omega0z/2pi in kHz")
    p.add_argument("--omega", type=float, default=None, help="drive frequency in kHz (reporting only)")
    p.add_argument("--synthetic", action="store_true", help="generate seeded synthetic data instead")
    p.add_argument("--seed", type=int, default=0, help="seed for the synthetic noise generator")
    p.add_argument("--noise", type=float, default=0.002, help="multiplicative noise level (synthetic)")
    p.add_argument("--true-xi", type=float, default=1.833, dest="true_xi")
    p.add_argument("--true-scale", type=float, default=1.0, dest="true_scale")
    p.add_argument("--true-tilt", type=float, default=0.03, dest="true_tilt")
    p.set_defaults(func=cmd_calibrate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, ConfigFileError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NoConvergence, UnitarityLost, SeriesNotConverged, NoOscillation) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (FitDiverged, DegenerateData) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FIT
    except DressedSpinError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
