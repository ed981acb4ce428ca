"""Command-line interface.

Subcommands:
  solve          energies for one system with one solver
  table1         the built-in four-system comparison benchmark
  phase          total phase integral scanned over energy (diagnostic)
  wavefunction   sampled wave for one solved level

Machine output goes to --out (or stdout) as CSV/JSON at full precision;
--plot renders a PNG next to it.  A JSON config file passed with --config
overrides the command-line flags.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__, plots, potentials, report
from .core import TwoBodySystem, UnitSystem
from .milne import IntegrationConfig, Mode
from .spectrum import solve_level, total_phase, wavefunction_profile

__all__ = ["main"]


def _add_units(parser):
    parser.add_argument("--hbar", type=float, default=1.0, help="action quantum (default 1)")
    parser.add_argument("--c", type=float, default=1.0, help="speed of light (default 1)")


def _add_system(parser):
    parser.add_argument("--mu", type=float, default=1.0, help="reduced mass")
    parser.add_argument("--m1", type=float, default=2.0, help="first mass (m2 is derived)")
    parser.add_argument("--beta", type=float, default=1.0, help="harmonic stiffness")


def _add_output(parser):
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--plot", action="store_true", help="render a PNG next to the output")


def _parse_levels(text: str) -> tuple:
    try:
        levels = tuple(int(part) for part in text.split(",") if part != "")
    except ValueError:
        raise SystemExit(f"error: bad --levels value {text!r}") from None
    if not levels or list(levels) != sorted(levels) or levels[0] < 0:
        raise SystemExit("error: --levels must be ascending non-negative integers")
    return levels


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semirel", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=f"semirel {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="energies for one system with one solver")
    p_solve.add_argument("--mode", choices=("wp", "nr", "exact"), default="wp")
    _add_system(p_solve)
    p_solve.add_argument("--levels", default="0,10,20", help="comma-separated level indices")
    _add_units(p_solve)
    p_solve.add_argument("--accuracy", type=float, default=1e-6, help="exact-solver target")
    p_solve.add_argument("--config", help="JSON config file; overrides flags")
    _add_output(p_solve)

    p_table = sub.add_parser("table1", help="the built-in comparison benchmark")
    p_table.add_argument("--solvers", default="wp,exact,nr", help="subset of wp,exact,nr")
    p_table.add_argument("--levels", default="0,10,20")
    p_table.add_argument("--beta", type=float, default=1.0)
    _add_units(p_table)
    p_table.add_argument("--accuracy", type=float, default=1e-6)
    p_table.add_argument("--config", help="JSON config file; overrides flags")
    _add_output(p_table)

    p_phase = sub.add_parser("phase", help="total phase integral over an energy scan")
    p_phase.add_argument("--mode", choices=("wp", "nr"), default="wp")
    _add_system(p_phase)
    _add_units(p_phase)
    p_phase.add_argument("--eps-min", type=float, required=True)
    p_phase.add_argument("--eps-max", type=float, required=True)
    p_phase.add_argument("--points", type=int, default=101)
    _add_output(p_phase)

    p_wave = sub.add_parser("wavefunction", help="sampled wave for one solved level")
    p_wave.add_argument("--mode", choices=("wp", "nr"), default="wp")
    _add_system(p_wave)
    _add_units(p_wave)
    p_wave.add_argument("--n", type=int, default=0, help="nodal quantum number")
    p_wave.add_argument("--points", type=int, default=None)
    _add_output(p_wave)

    return parser


def _emit(data: bytes, out: str | None) -> None:
    if out:
        with open(out, "wb") as f:
            f.write(data)
    else:
        sys.stdout.write(data.decode("ascii"))


def _plot_path(args, default_stem: str) -> str:
    if args.out:
        stem = args.out.rsplit(".", 1)[0] if "." in args.out.rsplit("/", 1)[-1] else args.out
        return stem + ".png"
    return default_stem + ".png"


def _table_config(args) -> report.RunConfig:
    kwargs = dict(
        beta=args.beta,
        units=UnitSystem(args.hbar, args.c),
        levels=_parse_levels(args.levels),
        accuracy=args.accuracy,
        output_format=args.format,
        output_path=args.out,
    )
    if getattr(args, "mode", None) is not None:  # solve: one system, one solver
        kwargs["systems"] = ((args.mu, args.m1),)
        kwargs["solvers"] = (args.mode,)
    else:
        solvers = tuple(s for s in args.solvers.split(",") if s)
        kwargs["solvers"] = solvers
    config = report.RunConfig(**kwargs)
    if args.config:
        with open(args.config) as f:
            record = json.load(f)
        base = config.to_dict()
        for key, value in record.items():
            if isinstance(value, dict) and isinstance(base.get(key), dict):
                base[key] = {**base[key], **value}
            else:
                base[key] = value
        config = report.RunConfig.from_dict(base)
    return config


_NR_DIGITS = 3


def _human_table(rows) -> str:
    """Rounded console view; machine outputs keep full precision."""
    lines = [f"{'n':>3} {'mu':>7} {'m1':>8} {'eps_exact':>12} {'eps_wp':>10} {'eps_nr':>8}"]
    for r in rows:
        exact = f"{r.eps_exact:.6f}" if r.eps_exact is not None else "-"
        wp = f"{r.eps_wp:.4g}" if r.eps_wp is not None else "-"
        nr = f"{r.eps_nr:.{_NR_DIGITS}g}" if r.eps_nr is not None else "-"
        lines.append(f"{r.n:>3} {r.mu:>7g} {r.m1:>8g} {exact:>12} {wp:>10} {nr:>8}")
    return "\n".join(lines)


def _run_table(args) -> int:
    config = _table_config(args)
    rows = report.reproduce_table1(config)
    data = report.render(rows, config.output_format, config)
    _emit(data, config.output_path)
    if config.output_path:
        print(_human_table(rows))
        print(f"wrote {config.output_path}")
    if args.plot:
        path = plots.plot_comparison(rows, _plot_path(args, "semirel_table"))
        print(f"wrote {path}", file=sys.stderr)
    failed = [(r.mu, r.m1, r.n, solver) for r in rows for solver in r.errors]
    if failed:
        for mu, m1, n, solver in failed:
            msg = next(r for r in rows if (r.mu, r.m1, r.n) == (mu, m1, n)).errors[solver]
            print(f"error: mu={mu:g} m1={m1:g} n={n} [{solver}]: {msg}", file=sys.stderr)
        return 1
    return 0


def _run_phase(args) -> int:
    units = UnitSystem(args.hbar, args.c)
    system = TwoBodySystem.from_reduced(args.mu, args.m1, units)
    spec = potentials.harmonic(args.beta)
    mode = Mode(args.mode)
    if args.points < 2 or not args.eps_min < args.eps_max:
        raise SystemExit("error: need eps-min < eps-max and at least 2 points")
    eps = np.linspace(args.eps_min, args.eps_max, args.points)
    phi = [total_phase(mode, system, spec, float(e)) for e in eps]
    lines = ["eps,phi_total"] + [f"{e:.17g},{p:.17g}" for e, p in zip(eps, phi)]
    _emit(("\n".join(lines) + "\n").encode("ascii"), args.out)
    if args.plot:
        path = plots.plot_phase_scan(eps, phi, _plot_path(args, "semirel_phase"))
        print(f"wrote {path}", file=sys.stderr)
    return 0


def _run_wavefunction(args) -> int:
    units = UnitSystem(args.hbar, args.c)
    system = TwoBodySystem.from_reduced(args.mu, args.m1, units)
    spec = potentials.harmonic(args.beta)
    mode = Mode(args.mode)
    config = IntegrationConfig()
    level = solve_level(mode, system, spec, args.n, config)
    x, psi, phi = wavefunction_profile(mode, system, spec, level, config, points=args.points)
    lines = ["x,psi,phase"] + [f"{a:.17g},{b:.17g},{c:.17g}" for a, b, c in zip(x, psi, phi)]
    _emit(("\n".join(lines) + "\n").encode("ascii"), args.out)
    if args.plot:
        path = plots.plot_wavefunction(x, psi, _plot_path(args, "semirel_wave"), eps=level.eps, n=level.n)
        print(f"wrote {path}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command in ("solve", "table1"):
        return _run_table(args)
    if args.command == "phase":
        return _run_phase(args)
    return _run_wavefunction(args)


if __name__ == "__main__":
    sys.exit(main())
