"""Command-line front end: figure data files as CSV, single-point reports.

All quantities are dimensionless with gamma = 1 (times in 1/gamma), so the
flags are the products gamma*tau, gamma*T, gamma*t.  Every CSV starts with
a '#' metadata line recording the tool version and the configuration;
identical configurations produce byte-identical files regardless of the
worker count.

Exit status: 0 on success, 1 on usage errors, 2 on numeric failures.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .coherent import CoherentDrive, evolve_two_level
from .oracle import fp_bruteforce, projection_bruteforce
from .pulses import ExponentialPulse, PulseError, PulseShape, SquarePulse, normalize
from .scatter import projection
from .stim_prob import (
    DriveSpec,
    pstim_exact,
    pstim_sin2,
    rabi_timeseries_short,
)

_USAGE_EXIT = 1
_NUMERIC_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; spec wants 1
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(_USAGE_EXIT)


@dataclass(frozen=True)
class Grid:
    start: float
    stop: float
    count: int
    spacing: str = "linear"

    def points(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


def _parse_grid(text: str) -> Grid:
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise argparse.ArgumentTypeError(
            f"grid must be start:stop:count[:log], got {text!r}"
        )
    try:
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: {exc}") from None
    spacing = "linear"
    if len(parts) == 4:
        if parts[3] not in ("linear", "log"):
            raise argparse.ArgumentTypeError(f"grid spacing must be linear or log, got {parts[3]!r}")
        spacing = parts[3]
    if count < 2:
        raise argparse.ArgumentTypeError("grid count must be >= 2")
    if not start < stop:
        raise argparse.ArgumentTypeError("grid start must be < stop")
    if spacing == "log" and start <= 0:
        raise argparse.ArgumentTypeError("log spacing requires start > 0")
    return Grid(start, stop, count, spacing)


def _parse_n_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(sorted({int(v) for v in text.split(",") if v.strip() != ""}))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad n-list {text!r}: {exc}") from None
    if not values:
        raise argparse.ArgumentTypeError("n-list must not be empty")
    if any(n < 0 for n in values):
        raise argparse.ArgumentTypeError("photon numbers must be >= 0")
    return values


def _load_pulse_file(path: str) -> PulseShape:
    data = np.loadtxt(path)
    if data.ndim != 2 or data.shape[1] < 2 or data.shape[0] < 2:
        raise PulseError(f"pulse file {path!r} must have two columns: time amplitude")
    t, amp = data[:, 0], data[:, 1]
    dt = np.diff(t)
    if np.any(dt <= 0):
        raise PulseError("pulse file times must be strictly increasing")
    if np.max(np.abs(dt - dt[0])) > 1e-9 * dt[0]:
        raise PulseError("pulse file must use a uniform time grid")
    return normalize(float(t[0]), float(dt[0]), amp)


def _make_pulse(kind: str, tau: float, path: str | None) -> PulseShape:
    if kind == "exp":
        return ExponentialPulse(tau)
    if kind == "square":
        return SquarePulse(tau)
    if kind == "file":
        if path is None:
            raise PulseError("--pulse file requires --pulse-file PATH")
        return _load_pulse_file(path)
    raise PulseError(f"unknown pulse kind {kind!r}")


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _write_csv(path: str, meta: str, header: list[str], rows) -> None:
    out = sys.stdout if path == "-" else open(path, "w", newline="")
    try:
        out.write(f"# stimemit {__version__} | {meta}\n")
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
    finally:
        if out is not sys.stdout:
            out.close()


# ---------------------------------------------------------------------------
# sweep workers (top level so a process pool can pickle them)
# ---------------------------------------------------------------------------


def _fig2_point(args) -> list[str]:
    gamma_tau, n, bits = args
    r = pstim_exact(DriveSpec(n, ExponentialPulse(gamma_tau)), bits=bits)
    return [_fmt(gamma_tau), str(n), _fmt(r.p_stim), _fmt(pstim_sin2(n, gamma_tau))]


def _fig3_point(args) -> list[list[str]]:
    n, tau, bits, t_points = args
    rows = []
    for r in rabi_timeseries_short(n, tau, 1.0, t_points, bits=bits):
        rows.append(
            [_fmt(r.t), str(n), _fmt(r.p_stim), _fmt(r.p0), _fmt(r.p_stim + r.p0)]
        )
    return rows


def _fig4_point(args) -> list[str]:
    gamma_tau_prime, method = args
    return [_fmt(gamma_tau_prime), _fmt(projection(gamma_tau_prime, 1.0, method))]


def _map_points(fn, points, workers: int):
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            yield from pool.map(fn, points)
    else:
        yield from map(fn, points)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_fig2(args) -> int:
    points = [
        (float(gt), n, args.precision_bits)
        for gt in args.grid.points()
        for n in args.n_list
    ]
    rows = _map_points(_fig2_point, points, args.workers)
    meta = (
        f"fig2 grid={args.grid.start:g}:{args.grid.stop:g}:{args.grid.count}"
        f":{args.grid.spacing} n-list={','.join(map(str, args.n_list))}"
        f" precision-bits={args.precision_bits}"
    )
    _write_csv(args.out, meta, ["gamma_tau", "n", "p_stim_exact", "p_stim_sin2"], rows)
    return 0


def _cmd_fig3(args) -> int:
    grid = args.grid or Grid(0.0, 10.0 * args.tau, 201)
    t_points = [float(t) for t in grid.points()]
    points = [(n, args.tau, args.precision_bits, t_points) for n in args.n_list]
    all_rows = []
    for rows in _map_points(_fig3_point, points, args.workers):
        all_rows.extend(rows)
    # deterministic order: time-major, then n ascending
    all_rows.sort(key=lambda row: (float(row[0]), int(row[1])))
    meta = (
        f"fig3 tau={args.tau:g} grid={grid.start:g}:{grid.stop:g}:{grid.count}"
        f":{grid.spacing} n-list={','.join(map(str, args.n_list))}"
        f" precision-bits={args.precision_bits}"
    )
    _write_csv(args.out, meta, ["gamma_t", "n", "p_stim", "p0", "sum"], all_rows)
    return 0


def _cmd_fig4(args) -> int:
    points = [(float(tp), args.method) for tp in args.grid.points()]
    rows = _map_points(_fig4_point, points, args.workers)
    meta = (
        f"fig4 grid={args.grid.start:g}:{args.grid.stop:g}:{args.grid.count}"
        f":{args.grid.spacing} method={args.method}"
    )
    _write_csv(args.out, meta, ["gamma_tau_prime", "projection"], rows)
    return 0


def _cmd_eval(args) -> int:
    pulse = _make_pulse(args.pulse, args.tau, args.pulse_file)
    drive = DriveSpec(args.n, pulse)
    result = pstim_exact(drive, when=args.t, bits=args.precision_bits)
    fields = [f"p_stim = {result.p_stim:.10g}"]
    if result.p0 is not None:
        fields.append(f"p0 = {result.p0:.10g}")
    fields.append(f"max_term = {float(result.max_term_magnitude):.6g}")
    fields.append(f"precision_bits_used = {result.precision_bits_used}")
    print("  ".join(fields))
    return 0


def _cmd_coherent(args) -> int:
    grid = args.grid or Grid(0.0, 2.0 * args.duration if args.duration > 0 else 1.0, 201)
    t_eval = [float(t) for t in grid.points()]
    drive = CoherentDrive.square(
        args.alpha,
        args.duration,
        gamma=1.0,
        beta_amplitude=args.beta if args.beta is not None else None,
    )
    pairs = evolve_two_level(drive, t_eval)
    overlap_mag = math.exp(pairs[0].overlap_log.real) if pairs else 1.0
    rows = [
        [_fmt(p.t), _fmt(p.p_e()), _fmt(p.p_g()), _fmt(overlap_mag)] for p in pairs
    ]
    meta = (
        f"coherent alpha={args.alpha:g} duration={args.duration:g}"
        f" beta={'alpha' if args.beta is None else f'{args.beta:g}'}"
        f" grid={grid.start:g}:{grid.stop:g}:{grid.count}:{grid.spacing}"
    )
    _write_csv(args.out, meta, ["gamma_t", "p_e", "p_g", "overlap_mag"], rows)
    return 0


def _cmd_oracle(args) -> int:
    if args.which == "fp":
        pulse = _make_pulse(args.pulse, args.tau, args.pulse_file)
        t = args.t if args.t is not None else pulse.support_end()
        value = fp_bruteforce(args.p, t, pulse, 1.0, args.points)
        print(f"fp_bruteforce(p={args.p}, t={t:g}) = {value:.10g}")
    else:
        value = projection_bruteforce(args.tau_prime, 1.0, args.points)
        print(f"projection_bruteforce(gamma_tau_prime={args.tau_prime:g}) = {value:.10g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="stimemit",
        description="Stimulated emission of a two-level atom by pulsed light "
        "(all quantities dimensionless, gamma = 1).",
    )
    parser.add_argument("--version", action="version", version=f"stimemit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grid_required=True):
        p.add_argument("--out", default="-", help="output CSV path (default stdout)")
        p.add_argument("--precision-bits", type=int, default=256,
                       help="working precision for the series (default 256)")
        p.add_argument("--workers", type=int, default=1,
                       help="worker processes for sweeps (default 1)")
        if grid_required:
            p.add_argument("--grid", type=_parse_grid, required=True,
                           help="start:stop:count[:log]")

    p2 = sub.add_parser("fig2", help="P_stim vs pulse length for a list of photon numbers")
    common(p2)
    p2.add_argument("--n-list", type=_parse_n_list, required=True,
                    help="comma-separated photon numbers, e.g. 0,1,144")
    p2.set_defaults(func=_cmd_fig2)

    p3 = sub.add_parser("fig3", help="time-resolved Rabi oscillation (short pulse)")
    p3.add_argument("--out", default="-")
    p3.add_argument("--precision-bits", type=int, default=256)
    p3.add_argument("--workers", type=int, default=1)
    p3.add_argument("--grid", type=_parse_grid, default=None,
                    help="time grid gamma_t start:stop:count[:log] (default 0:10*tau:201)")
    p3.add_argument("--tau", type=float, default=0.01,
                    help="pulse length gamma*tau (default 0.01)")
    p3.add_argument("--n-list", type=_parse_n_list, required=True,
                    help="photon numbers to plot; suggestion: 1,4,16,64")
    p3.set_defaults(func=_cmd_fig3)

    p4 = sub.add_parser("fig4", help="two-photon projection vs projected mode width")
    common(p4)
    p4.add_argument("--method", choices=["closed_form", "quadrature"],
                    default="closed_form")
    p4.set_defaults(func=_cmd_fig4)

    pe = sub.add_parser("eval", help="single-point stimulated-emission report")
    pe.add_argument("--n", type=int, required=True, help="photon number")
    pe.add_argument("--pulse", choices=["exp", "square", "file"], default="exp")
    pe.add_argument("--tau", "--gamma-tau", dest="tau", type=float, default=1.0,
                    help="gamma*tau (exp) or gamma*T (square)")
    pe.add_argument("--pulse-file", default=None,
                    help="two-column 'time amplitude' file (normalized on load)")
    pe.add_argument("--t", type=float, default=None,
                    help="evaluation time gamma*t (default: asymptotic)")
    pe.add_argument("--precision-bits", type=int, default=256)
    pe.set_defaults(func=_cmd_eval)

    pc = sub.add_parser("coherent", help="two-level amplitudes under a square coherent drive")
    pc.add_argument("--out", default="-")
    pc.add_argument("--alpha", type=float, required=True,
                    help="drive amplitude density (units sqrt(gamma))")
    pc.add_argument("--duration", type=float, required=True, help="drive window gamma*T")
    pc.add_argument("--beta", type=float, default=None,
                    help="reference amplitude density (default: alpha)")
    pc.add_argument("--grid", type=_parse_grid, default=None,
                    help="output time grid (default 0:2*duration:201)")
    pc.set_defaults(func=_cmd_coherent)

    po = sub.add_parser("oracle", help="brute-force evaluators for acceptance runs")
    osub = po.add_subparsers(dest="which", required=True)
    ofp = osub.add_parser("fp", help="ordered-simplex Simpson coefficient")
    ofp.add_argument("--p", type=int, required=True, choices=[0, 1, 2])
    ofp.add_argument("--pulse", choices=["exp", "square", "file"], default="exp")
    ofp.add_argument("--tau", "--gamma-tau", dest="tau", type=float, default=1.0)
    ofp.add_argument("--pulse-file", default=None)
    ofp.add_argument("--t", type=float, default=None)
    ofp.add_argument("--points", type=int, default=4001)
    ofp.set_defaults(func=_cmd_oracle)
    opr = osub.add_parser("projection", help="fixed-grid 2-D Simpson projection")
    opr.add_argument("--tau-prime", type=float, required=True)
    opr.add_argument("--points", type=int, default=2001)
    opr.set_defaults(func=_cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 0
    except PulseError as exc:
        print(f"stimemit: bad pulse input: {exc}", file=sys.stderr)
        return _USAGE_EXIT
    except (ArithmeticError, ValueError, OSError) as exc:
        print(f"stimemit: numeric failure: {exc}", file=sys.stderr)
        return _NUMERIC_EXIT


if __name__ == "__main__":
    sys.exit(main())
