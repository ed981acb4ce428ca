"""Comparison-table computation and delimited output.

The built-in benchmark configuration runs four two-body systems, specified
by (reduced mass, first mass) pairs, at levels 0/10/20 in a unit harmonic
well, and compares the wave-phase energies against the exact and analytic
non-relativistic references.  Machine outputs always carry full double
precision; CSV rendering is byte-deterministic.
"""

from __future__ import annotations

import dataclasses
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import potentials
from .core import NATURAL_UNITS, TwoBodySystem, UnitSystem
from .exact import exact_salpeter_levels, nr_harmonic_spectrum
from .milne import IntegrationConfig, Mode
from .spectrum import EnergyLevel, solve_spectrum

__all__ = [
    "DEFAULT_SYSTEMS",
    "DEFAULT_LEVELS",
    "SOLVERS",
    "RunConfig",
    "ComparisonRow",
    "reproduce_table1",
    "render",
    "parse_csv",
    "worker_count",
]

DEFAULT_SYSTEMS = ((5.0, 10.0), (5.0, 100.0), (1.0, 2.0), (1.0, 10.0))
DEFAULT_LEVELS = (0, 10, 20)
SOLVERS = ("wp", "exact", "nr")

CSV_HEADER = "n,mu,m1,m2,eps_exact,eps_wp,eps_nr,wp_rel_delta,nr_rel_delta"


@dataclass(frozen=True)
class RunConfig:
    """One comparison run: systems, levels, solvers, and output shape."""

    beta: float = 1.0
    units: UnitSystem = NATURAL_UNITS
    systems: tuple = DEFAULT_SYSTEMS
    levels: tuple = DEFAULT_LEVELS
    solvers: tuple = SOLVERS
    accuracy: float = 1e-6
    integration: IntegrationConfig = IntegrationConfig()
    output_format: str = "csv"
    output_path: str | None = None

    def __post_init__(self):
        if not self.systems:
            raise ValueError("systems must be non-empty")
        if list(self.levels) != sorted(self.levels):
            raise ValueError("levels must be sorted ascending")
        unknown = set(self.solvers) - set(SOLVERS)
        if unknown or not self.solvers:
            raise ValueError(f"solvers must be a non-empty subset of {SOLVERS}, got {self.solvers!r}")
        if self.output_format not in ("csv", "json"):
            raise ValueError(f"output format must be csv or json, got {self.output_format!r}")

    @classmethod
    def from_dict(cls, record: dict) -> "RunConfig":
        kwargs = {}
        if "beta" in record:
            kwargs["beta"] = float(record["beta"])
        if "units" in record:
            kwargs["units"] = UnitSystem(**record["units"])
        if "systems" in record:
            kwargs["systems"] = tuple(
                (float(s["mu"]), float(s["m1"])) if isinstance(s, dict) else (float(s[0]), float(s[1]))
                for s in record["systems"]
            )
        if "levels" in record:
            kwargs["levels"] = tuple(int(n) for n in record["levels"])
        if "solvers" in record:
            kwargs["solvers"] = tuple(record["solvers"])
        if "accuracy" in record:
            kwargs["accuracy"] = float(record["accuracy"])
        if "integration" in record:
            kwargs["integration"] = dataclasses.replace(IntegrationConfig(), **record["integration"])
        output = record.get("output", {})
        if "format" in output:
            kwargs["output_format"] = output["format"]
        if "path" in output:
            kwargs["output_path"] = output["path"]
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "units": {"hbar": self.units.hbar, "c": self.units.c},
            "systems": [{"mu": mu, "m1": m1} for mu, m1 in self.systems],
            "levels": list(self.levels),
            "solvers": list(self.solvers),
            "accuracy": self.accuracy,
            "integration": dataclasses.asdict(self.integration),
            "output": {"format": self.output_format, "path": self.output_path},
        }


@dataclass
class ComparisonRow:
    """One (system, level) record; absent solver cells stay None.

    ``errors`` maps a solver name to its failure message and is carried in
    the JSON diagnostics, not in the CSV columns.
    """

    n: int
    mu: float
    m1: float
    m2: float
    eps_exact: float | None = None
    eps_wp: float | None = None
    eps_nr: float | None = None
    wp_rel_delta: float | None = None
    nr_rel_delta: float | None = None
    errors: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)


def worker_count(n_tasks: int) -> int:
    """Worker cap from SEMIREL_THREADS; 0 or unset means automatic."""
    raw = os.environ.get("SEMIREL_THREADS", "0")
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"SEMIREL_THREADS must be an integer, got {raw!r}") from None
    if cap <= 0:
        cap = os.cpu_count() or 1
    return max(1, min(cap, n_tasks))


def _level_info(level: EnergyLevel) -> dict:
    out = {"residual": level.residual, "bracket": level.bracket}
    out.update(level.info)
    return out


def _solve_column(solver: str, mu: float, m1: float, config: RunConfig):
    """Energies for one (system, solver) pair, one entry per level.

    Returns (values, errors, diagnostics) keyed by level index; a solver
    failure annotates every level of the column.
    """
    values: dict[int, float] = {}
    errors: dict[int, str] = {}
    diags: dict[int, dict] = {}
    system = TwoBodySystem.from_reduced(mu, m1, config.units)
    try:
        if solver == "nr":
            for n in config.levels:
                values[n] = nr_harmonic_spectrum(mu, config.beta, n, config.units)
        elif solver == "exact":
            for level in exact_salpeter_levels(system, config.beta, config.levels, config.accuracy):
                values[level.n] = level.eps
                diags[level.n] = _level_info(level)
        else:
            spec = potentials.harmonic(config.beta)
            for level in solve_spectrum(Mode.WP, system, spec, config.levels, config.integration):
                if level.error is not None:
                    errors[level.n] = level.error
                else:
                    values[level.n] = level.eps
                    diags[level.n] = _level_info(level)
    except Exception as exc:
        for n in config.levels:
            errors.setdefault(n, f"{type(exc).__name__}: {exc}")
    return values, errors, diags


def reproduce_table1(config: RunConfig = RunConfig()) -> list[ComparisonRow]:
    """Compute the comparison table: one row per (system, level).

    Rows are ordered system-major, level-minor.  Solver failures are
    recorded per cell and the run continues.  Columns are computed
    concurrently per (system, solver); SEMIREL_THREADS caps the workers.
    """
    tasks = [(mu, m1, solver) for mu, m1 in config.systems for solver in config.solvers]
    workers = worker_count(len(tasks))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda t: _solve_column(t[2], t[0], t[1], config), tasks))
    else:
        results = [_solve_column(solver, mu, m1, config) for mu, m1, solver in tasks]
    by_key = {task: result for task, result in zip(tasks, results)}

    rows = []
    for mu, m1 in config.systems:
        system = TwoBodySystem.from_reduced(mu, m1, config.units)
        for n in config.levels:
            row = ComparisonRow(n=n, mu=mu, m1=m1, m2=system.m2)
            for solver in config.solvers:
                values, errors, diags = by_key[(mu, m1, solver)]
                if n in values:
                    setattr(row, f"eps_{solver}", values[n])
                if n in errors:
                    row.errors[solver] = errors[n]
                if n in diags:
                    row.diagnostics[solver] = diags[n]
            if row.eps_wp is not None and row.eps_exact is not None:
                row.wp_rel_delta = row.eps_wp / row.eps_exact - 1.0
            if row.eps_nr is not None and row.eps_exact is not None:
                row.nr_rel_delta = row.eps_nr / row.eps_exact - 1.0
            rows.append(row)
    return rows


def _fmt(value: float | None) -> str:
    return "" if value is None else format(value, ".17g")


_ROW_FIELDS = ("eps_exact", "eps_wp", "eps_nr", "wp_rel_delta", "nr_rel_delta")


def render(rows: list[ComparisonRow], output_format: str = "csv", config: RunConfig | None = None) -> bytes:
    """Serialize rows to CSV or JSON bytes.

    CSV: fixed 9-column header, full double precision (17 significant
    digits), LF line endings, empty fields for absent values.  JSON: a
    metadata object (config echo, version, per-cell diagnostics) plus the
    row array under "rows".
    """
    if not rows:
        raise ValueError("rows must be non-empty")
    if output_format == "csv":
        lines = [CSV_HEADER]
        for r in rows:
            cells = [str(r.n), _fmt(r.mu), _fmt(r.m1), _fmt(r.m2)]
            cells += [_fmt(getattr(r, name)) for name in _ROW_FIELDS]
            lines.append(",".join(cells))
        return ("\n".join(lines) + "\n").encode("ascii")
    if output_format == "json":
        import json

        from . import __version__

        payload = {
            "metadata": {
                "tool": "semirel",
                "version": __version__,
                "config": None if config is None else config.to_dict(),
                "diagnostics": [
                    {"n": r.n, "mu": r.mu, "m1": r.m1, "solvers": r.diagnostics, "errors": r.errors}
                    for r in rows
                ],
            },
            "rows": [
                {
                    "n": r.n,
                    "mu": r.mu,
                    "m1": r.m1,
                    "m2": r.m2,
                    **{name: getattr(r, name) for name in _ROW_FIELDS},
                }
                for r in rows
            ],
        }
        return (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode("ascii")
    raise ValueError(f"unknown output format {output_format!r}")


def parse_csv(data: bytes) -> list[ComparisonRow]:
    """Inverse of the CSV rendering; empty fields become None."""
    text = data.decode("ascii")
    lines = [line for line in text.split("\n") if line]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("missing or malformed header")
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        if len(cells) != 9:
            raise ValueError(f"expected 9 fields, got {len(cells)}: {line!r}")
        values = [None if c == "" else float(c) for c in cells[1:]]
        rows.append(ComparisonRow(int(cells[0]), *values))
    return rows
