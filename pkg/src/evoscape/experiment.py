"""Sweep runner: instances x walks -> CSV tables and a gnuplot script.

Config files are flat ``key = value`` text; ``#`` starts a comment. Keys:

=====================  =====================================================
problem                maxsat | dimacs | constant | popcount
n                      variables (maxsat) or dimension (constant, popcount)
clauses                comma list of clause counts, crossed with ``n``
sweep                  explicit points ``N:m, N:m, ...`` (maxsat)
k                      literals per clause (default 3)
dimacs                 instance path (problem = dimacs)
instances              instances per sweep point (default 30)
walks                  neutral walks per instance (default 1000)
walk_length            steps per walk (default 100)
min_usable_length      shortest walk kept for averaging (default 20)
max_lag                largest autocorrelation lag (default 20)
degree_samples         uniform samples for neutral degree (default 10000)
seed                   master seed (default 0)
out                    output directory
timestamp              true | false: write the "# generated" line
jobs                   worker processes (default 1)
=====================  =====================================================

Outputs ``results.csv`` (one row per instance), ``aggregate.csv`` (one row
per sweep point) and ``lags.csv`` (mean rho(k) per point). Each file opens
with a ``# evoscape schema=1`` comment line.
"""

from __future__ import annotations

import concurrent.futures
import csv
import dataclasses
import datetime
import io
import logging
import math
import os
import tempfile
from pathlib import Path
from typing import Sequence

import numpy as np

from .landscape import ConstantLandscape, Landscape, PopcountLandscape
from .maxsat import InstanceSpec, MaxSatLandscape, generate, read_dimacs
from .seeds import aux_rng, instance_seed
from .stats import (
    NoUsableSeriesError,
    average_autocorrelation,
    correlation_length,
    neutral_degree_stats,
    UndefinedCorrelationLengthError,
)
from .walks import WalkConfig, evolvability_walks

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
NA = "NA"
ALPHA_CRITICAL = 4.3

RESULT_COLUMNS = [
    "N",
    "m",
    "alpha",
    "instance",
    "instance_seed",
    "mean_neutral_degree",
    "rho_1",
    "tau",
    "tau_walk_mean",
    "num_walks_used",
    "num_walks_discarded",
]
AGGREGATE_COLUMNS = [
    "N",
    "m",
    "alpha",
    "instances",
    "instances_usable",
    "mean_neutral_degree",
    "rho_1",
    "tau",
    "tau_instance_mean",
    "tau_walk_mean",
    "num_walks_used",
    "num_walks_discarded",
]
LAG_COLUMNS = ["N", "m", "k", "rho"]

PAPER_SWEEPS = {
    16: (39, 59, 64, 69, 74, 79, 99),
    64: (200, 250, 265, 275, 285, 300, 350),
}


class ConfigError(ValueError):
    pass


class SchemaError(ValueError):
    pass


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    problem: str = "maxsat"
    sweep: tuple[tuple[int, int], ...] = ()
    k: int = 3
    dimacs: str | None = None
    instances_per_point: int = 30
    walk: WalkConfig = WalkConfig()
    max_lag: int = 20
    degree_samples: int = 10_000
    output_dir: str = "results"
    master_seed: int = 0
    timestamp: bool = True
    jobs: int = 1

    def __post_init__(self):
        if self.problem not in ("maxsat", "dimacs", "constant", "popcount"):
            raise ConfigError(f"unknown problem {self.problem!r}")
        if self.problem == "dimacs" and not self.dimacs:
            raise ConfigError("problem = dimacs needs a 'dimacs' path")
        if not self.sweep and self.problem != "dimacs":
            raise ConfigError("sweep is empty")
        for n, m in self.sweep:
            if n < 1 or m < 0:
                raise ConfigError(f"invalid sweep point N={n}, m={m}")
            if self.problem == "maxsat" and self.k > n:
                raise ConfigError(f"k={self.k} exceeds N={n}")
        if self.instances_per_point < 1 or self.degree_samples < 1 or self.jobs < 1:
            raise ConfigError("instances, degree_samples and jobs must be positive")
        if not 1 <= self.max_lag <= self.walk.walk_length:
            raise ConfigError("max_lag must lie in [1, walk_length]")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")


def _parse_bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {value!r}")


def _parse_ints(value: str) -> list[int]:
    return [int(tok) for tok in value.replace(",", " ").split()]


def read_config_file(path) -> dict[str, str]:
    """Parse a flat ``key = value`` file into a dict of raw strings."""
    entries = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key = key.strip().lower()
            if key in entries:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            entries[key] = value.strip()
    return entries


_KNOWN_KEYS = {
    "problem", "n", "clauses", "sweep", "k", "dimacs", "instances", "walks",
    "walk_length", "min_usable_length", "max_lag", "degree_samples", "seed",
    "out", "timestamp", "jobs",
}


def config_from_mapping(entries: dict[str, str]) -> ExperimentConfig:
    unknown = sorted(set(entries) - _KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    get = entries.get
    try:
        problem = get("problem", "maxsat").strip().lower()
        ns = _parse_ints(get("n", ""))
        sweep: list[tuple[int, int]] = []
        if "sweep" in entries:
            for tok in entries["sweep"].replace(",", " ").split():
                n, _, m = tok.partition(":")
                sweep.append((int(n), int(m)))
        if problem == "maxsat" and "clauses" in entries:
            if not ns:
                raise ConfigError("'clauses' needs 'n'")
            sweep.extend((n, m) for n in ns for m in _parse_ints(entries["clauses"]))
        if problem in ("constant", "popcount"):
            sweep.extend((n, 0) for n in ns)
        walk = WalkConfig(
            walk_length=int(get("walk_length", 100)),
            num_walks=int(get("walks", 1000)),
            min_usable_length=int(get("min_usable_length", 20)),
        )
        return ExperimentConfig(
            problem=problem,
            sweep=tuple(sweep),
            k=int(get("k", 3)),
            dimacs=get("dimacs"),
            instances_per_point=int(get("instances", 30)),
            walk=walk,
            max_lag=int(get("max_lag", 20)),
            degree_samples=int(get("degree_samples", 10_000)),
            output_dir=get("out", "results"),
            master_seed=int(get("seed", 0)),
            timestamp=_parse_bool(get("timestamp", "true")),
            jobs=int(get("jobs", 1)),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path, overrides: dict[str, str] | None = None) -> ExperimentConfig:
    entries = read_config_file(path)
    entries.update(overrides or {})
    return config_from_mapping(entries)


@dataclasses.dataclass
class ResultRow:
    N: int
    m: int
    alpha: float
    instance: int
    instance_seed: int
    mean_neutral_degree: float
    rho_1: float | None
    tau: float | None
    tau_walk_mean: float | None
    num_walks_used: int
    num_walks_discarded: int
    rho: np.ndarray | None = dataclasses.field(default=None, repr=False)


@dataclasses.dataclass
class ExperimentResult:
    rows: list[ResultRow]
    aggregates: list[dict]
    lag_profiles: list[dict]
    paths: dict[str, Path]


def _fmt(value) -> str:
    if value is None:
        return NA
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return NA if math.isnan(value) else repr(value)
    return str(value)


def build_landscape(config: ExperimentConfig, n: int, m: int, seed: int) -> Landscape:
    if config.problem == "maxsat":
        return MaxSatLandscape(generate(InstanceSpec(n, m, config.k, seed)))
    if config.problem == "dimacs":
        return MaxSatLandscape(read_dimacs(config.dimacs))
    if config.problem == "constant":
        return ConstantLandscape(n)
    return PopcountLandscape(n)


def run_instance(config: ExperimentConfig, n: int, m: int, index: int) -> ResultRow:
    seed = instance_seed(config.master_seed, n, m, index)
    landscape = build_landscape(config, n, m, seed)
    walk = dataclasses.replace(config.walk, seed=seed)
    traces = evolvability_walks(landscape, walk, keep_solutions=False)
    degree = neutral_degree_stats(landscape, config.degree_samples, aux_rng(seed))
    try:
        report = average_autocorrelation(traces, config.max_lag, walk.min_usable_length)
    except NoUsableSeriesError as exc:
        logger.warning("N=%d m=%d instance %d: %s; row written with NA", n, m, index, exc)
        return ResultRow(
            n, m, m / n, index, seed, degree.mean, None, None, None, 0, exc.num_discarded
        )
    return ResultRow(
        N=n,
        m=m,
        alpha=m / n,
        instance=index,
        instance_seed=seed,
        mean_neutral_degree=degree.mean,
        rho_1=float(report.rho[1]),
        tau=report.tau,
        tau_walk_mean=report.tau_walk_mean,
        num_walks_used=report.num_series_used,
        num_walks_discarded=report.num_series_discarded,
        rho=report.rho,
    )


def _tau_or_none(rho1):
    try:
        return correlation_length(rho1)
    except UndefinedCorrelationLengthError:
        return None


def _mean(values):
    values = [v for v in values if v is not None]
    return float(np.mean(values)) if values else None


def aggregate_rows(rows: Sequence[ResultRow]) -> list[dict]:
    """One summary per (N, m), in first-seen order.

    ``tau`` is the correlation length of the instance-averaged rho(1);
    ``tau_instance_mean`` averages the per-instance tau values instead.
    """
    groups: dict[tuple[int, int], list[ResultRow]] = {}
    for row in rows:
        groups.setdefault((row.N, row.m), []).append(row)
    out = []
    for (n, m), group in groups.items():
        rho1 = _mean(r.rho_1 for r in group)
        out.append(
            {
                "N": n,
                "m": m,
                "alpha": m / n,
                "instances": len(group),
                "instances_usable": sum(r.rho_1 is not None for r in group),
                "mean_neutral_degree": _mean(r.mean_neutral_degree for r in group),
                "rho_1": rho1,
                "tau": None if rho1 is None else _tau_or_none(rho1),
                "tau_instance_mean": _mean(r.tau for r in group),
                "tau_walk_mean": _mean(r.tau_walk_mean for r in group),
                "num_walks_used": sum(r.num_walks_used for r in group),
                "num_walks_discarded": sum(r.num_walks_discarded for r in group),
            }
        )
    return out


def lag_profiles(rows: Sequence[ResultRow]) -> list[dict]:
    groups: dict[tuple[int, int], list[np.ndarray]] = {}
    for row in rows:
        groups.setdefault((row.N, row.m), [])
        if row.rho is not None:
            groups[(row.N, row.m)].append(row.rho)
    out = []
    for (n, m), profiles in groups.items():
        if not profiles:
            continue
        mean = np.mean(profiles, axis=0)
        out.extend({"N": n, "m": m, "k": k, "rho": float(v)} for k, v in enumerate(mean))
    return out


def _write_table(path: Path, columns, records, timestamp: bool, table: str):
    buf = io.StringIO()
    buf.write(f"# evoscape schema={SCHEMA_VERSION} table={table}\n")
    if timestamp:
        now = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
        buf.write(f"# generated {now}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rec in records:
        writer.writerow([_fmt(rec[c]) for c in columns])
    path.write_text(buf.getvalue(), encoding="ascii")


def ensure_writable(directory) -> Path:
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    with tempfile.NamedTemporaryFile(dir=path, prefix=".probe-"):
        pass
    return path


def _tasks(config: ExperimentConfig):
    if config.problem == "dimacs":
        formula = read_dimacs(config.dimacs)
        points = [(formula.num_vars, formula.num_clauses)]
    else:
        points = list(config.sweep)
    return [(n, m, i) for n, m in points for i in range(config.instances_per_point)]


def _run_task(args):
    config, n, m, i = args
    return run_instance(config, n, m, i)


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run every (point, instance) and write the three CSV tables.

    Output is a deterministic function of the config; with
    ``timestamp=False`` reruns are byte-identical.
    """
    out = ensure_writable(config.output_dir)
    tasks = _tasks(config)
    if config.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(config.jobs) as pool:
            rows = list(pool.map(_run_task, [(config, *t) for t in tasks]))
    else:
        rows = []
        for n, m, i in tasks:
            rows.append(run_instance(config, n, m, i))
            logger.info("N=%d m=%d instance %d: tau=%s", n, m, i, _fmt(rows[-1].tau))

    aggregates = aggregate_rows(rows)
    lags = lag_profiles(rows)
    paths = {
        "results": out / "results.csv",
        "aggregate": out / "aggregate.csv",
        "lags": out / "lags.csv",
    }
    records = [{c: getattr(r, c) for c in RESULT_COLUMNS} for r in rows]
    _write_table(paths["results"], RESULT_COLUMNS, records, config.timestamp, "results")
    _write_table(paths["aggregate"], AGGREGATE_COLUMNS, aggregates, config.timestamp, "aggregate")
    _write_table(paths["lags"], LAG_COLUMNS, lags, config.timestamp, "lags")
    return ExperimentResult(rows, aggregates, lags, paths)


def _optional_float(value: str, column: str, lineno: int):
    if value == NA:
        return None
    try:
        return float(value)
    except ValueError:
        raise SchemaError(f"column {column!r}, line {lineno}: not a number: {value!r}") from None


_INT_COLUMNS = ("N", "m", "instance", "instance_seed", "num_walks_used", "num_walks_discarded")


def read_results_csv(path) -> list[ResultRow]:
    """Load a ``results.csv`` written by :func:`run_experiment`."""
    with open(path, encoding="ascii") as fh:
        lines = [(i, ln) for i, ln in enumerate(fh, start=1) if not ln.startswith("#")]
    lines = [(i, ln) for i, ln in lines if ln.strip()]
    if not lines:
        raise SchemaError("empty results file: no header row")
    header = next(csv.reader([lines[0][1]]))
    for column in RESULT_COLUMNS:
        if column not in header:
            raise SchemaError(f"missing column {column!r}")
    if len(lines) == 1:
        raise SchemaError("results file has a header but no rows")
    rows = []
    for lineno, line in lines[1:]:
        values = next(csv.reader([line]))
        if len(values) != len(header):
            raise SchemaError(f"line {lineno}: expected {len(header)} fields, got {len(values)}")
        rec = dict(zip(header, values))
        ints = {}
        for column in _INT_COLUMNS:
            try:
                ints[column] = int(rec[column])
            except ValueError:
                raise SchemaError(f"column {column!r}, line {lineno}: not an integer") from None
        rows.append(
            ResultRow(
                alpha=_optional_float(rec["alpha"], "alpha", lineno),
                mean_neutral_degree=_optional_float(
                    rec["mean_neutral_degree"], "mean_neutral_degree", lineno
                ),
                rho_1=_optional_float(rec["rho_1"], "rho_1", lineno),
                tau=_optional_float(rec["tau"], "tau", lineno),
                tau_walk_mean=_optional_float(rec["tau_walk_mean"], "tau_walk_mean", lineno),
                **ints,
            )
        )
    return rows


def emit_plot_script(results_csv, image: str = "tau_vs_m.png") -> str:
    """Gnuplot script drawing tau against m, one curve per N.

    Each curve gets a dashed vertical line at the satisfiability threshold
    m = 4.3 N. Data are inlined, so the script runs on its own.
    """
    rows = read_results_csv(results_csv)
    points = aggregate_rows(rows)
    by_n: dict[int, list[dict]] = {}
    for p in points:
        by_n.setdefault(p["N"], []).append(p)

    out = io.StringIO()
    out.write("# Correlation length of maximal evolvability against the number of clauses.\n")
    out.write(f"# Source: {os.path.basename(str(results_csv))}\n")
    out.write("set terminal pngcairo size 800,500\n")
    out.write(f"set output '{image}'\n")
    out.write("set xlabel 'number of clauses m'\n")
    out.write("set ylabel 'correlation length tau'\n")
    out.write("set key top left\n")
    out.write("set grid\n")
    for n in sorted(by_n):
        out.write(f"$N{n} << EOD\n")
        for p in sorted(by_n[n], key=lambda p: p["m"]):
            if p["tau"] is not None:
                out.write(f"{p['m']} {p['tau']!r}\n")
        out.write("EOD\n")
    for idx, n in enumerate(sorted(by_n), start=1):
        x = ALPHA_CRITICAL * n
        out.write(f"set arrow {idx} from {x!r}, graph 0 to {x!r}, graph 1 nohead dashtype 2\n")
        out.write(f"set label {idx} 'alpha_c N={n}' at {x!r}, graph 0.95 offset 0.5,0\n")
    curves = [
        f"$N{n} using 1:2 with linespoints title 'N={n}'" for n in sorted(by_n)
    ]
    out.write("plot " + ", \\\n     ".join(curves) + "\n")
    return out.getvalue()
