"""Command line entry point: ``evoscape generate|measure|networks|plot``.

Failures print a single line ``evoscape-error: <kind>: <message>`` on
stderr. Exit status is 0 on success, 1 on runtime errors and 2 on usage
errors (bad flags, missing or invalid config).
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from . import experiment
from .maxsat import InstanceSpec, MaxSatLandscape, generate, read_dimacs, write_dimacs
from .stats import DEFAULT_EXHAUSTIVE_LIMIT, enumerate_networks

EXIT_ERROR = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--seed", type=int, help="seed (overrides config)")
    p.add_argument("--out", help="output directory (overrides config)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="evoscape", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="write a random MAX-k-SAT instance as DIMACS")
    _common(p)
    p.add_argument("--n", type=int, help="number of variables")
    p.add_argument("--m", type=int, help="number of clauses")
    p.add_argument("--k", type=int, help="literals per clause (default 3)")

    p = sub.add_parser("measure", help="run an evolvability-autocorrelation sweep")
    _common(p)
    p.add_argument("--jobs", type=int, help="worker processes")
    p.add_argument("--no-timestamp", action="store_true", help="omit the generated-at line")

    p = sub.add_parser("networks", help="enumerate neutral networks of a small instance")
    _common(p)
    p.add_argument("--dimacs", help="instance file; otherwise one is generated")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--method", choices=["bfs", "union-find", "both"])
    p.add_argument("--limit", type=int, help=f"largest N (default {DEFAULT_EXHAUSTIVE_LIMIT})")

    p = sub.add_parser("plot", help="emit a gnuplot script from results.csv")
    _common(p)
    p.add_argument("results", nargs="?", help="results.csv from measure")
    return parser


def _settings(args, keys) -> dict[str, str]:
    """Config file entries overlaid with explicit flags, restricted to ``keys``."""
    entries = {}
    if args.config:
        if not Path(args.config).is_file():
            raise UsageError(f"config file not found: {args.config}")
        try:
            entries = experiment.read_config_file(args.config)
        except experiment.ConfigError as exc:
            raise UsageError(str(exc)) from None
        unknown = sorted(set(entries) - set(keys))
        if unknown:
            raise UsageError(f"unknown config key(s) for {args.command}: {', '.join(unknown)}")
    for key in keys:
        value = getattr(args, key, None)
        if value is not None:
            entries[key] = str(value)
    return entries


def _int(entries, key, default=None):
    if key not in entries:
        if default is None:
            raise UsageError(f"missing required setting {key!r}")
        return default
    try:
        return int(entries[key])
    except ValueError:
        raise UsageError(f"{key!r} must be an integer") from None


def cmd_generate(args) -> int:
    s = _settings(args, ["n", "m", "k", "seed", "out"])
    spec = InstanceSpec(_int(s, "n"), _int(s, "m"), _int(s, "k", 3), _int(s, "seed", 0))
    out = Path(s.get("out", "."))
    out.mkdir(parents=True, exist_ok=True)
    path = out / (
        f"maxsat_n{spec.num_vars}_m{spec.num_clauses}_k{spec.literals_per_clause}"
        f"_seed{spec.seed}.cnf"
    )
    path.write_text(write_dimacs(generate(spec)), encoding="ascii")
    print(path)
    return 0


def cmd_measure(args) -> int:
    if not args.config:
        raise UsageError("measure requires --config")
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    if args.out is not None:
        overrides["out"] = args.out
    if args.jobs is not None:
        overrides["jobs"] = str(args.jobs)
    if args.no_timestamp:
        overrides["timestamp"] = "false"
    if not Path(args.config).is_file():
        raise UsageError(f"config file not found: {args.config}")
    try:
        config = experiment.load_config(args.config, overrides)
    except experiment.ConfigError as exc:
        raise UsageError(str(exc)) from None
    result = experiment.run_experiment(config)
    for agg in result.aggregates:
        print(
            f"N={agg['N']} m={agg['m']} alpha={agg['alpha']:.4f} "
            f"tau={experiment._fmt(agg['tau'])} "
            f"neutral_degree={experiment._fmt(agg['mean_neutral_degree'])}"
        )
    for path in result.paths.values():
        print(path)
    return 0


def cmd_networks(args) -> int:
    s = _settings(args, ["dimacs", "n", "m", "k", "seed", "out", "method", "limit"])
    if "dimacs" in s:
        formula = read_dimacs(s["dimacs"])
    else:
        formula = generate(
            InstanceSpec(_int(s, "n"), _int(s, "m"), _int(s, "k", 3), _int(s, "seed", 0))
        )
    landscape = MaxSatLandscape(formula)
    method = s.get("method", "both")
    if method not in ("bfs", "union-find", "both"):
        raise UsageError(f"unknown method {method!r}")
    limit = _int(s, "limit", DEFAULT_EXHAUSTIVE_LIMIT)
    if method == "both":
        partition = enumerate_networks(landscape, "bfs", limit)
        other = enumerate_networks(landscape, "union-find", limit)
        if not partition.same_partition(other):
            raise RuntimeError("bfs and union-find partitions differ")
    else:
        partition = enumerate_networks(landscape, method, limit)

    out = Path(s.get("out", "."))
    out.mkdir(parents=True, exist_ok=True)
    path = out / "networks.csv"
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["network", "fitness", "size"])
        for i, (fit, size) in enumerate(zip(partition.fitness, partition.sizes)):
            writer.writerow([i, fit, size])
    print(
        f"N={formula.num_vars} m={formula.num_clauses} solutions={int(partition.sizes.sum())} "
        f"networks={partition.num_networks} largest={int(partition.sizes.max())} "
        f"method={method}"
    )
    print(path)
    return 0


def cmd_plot(args) -> int:
    s = _settings(args, ["results", "out", "seed"])
    if "results" not in s:
        raise UsageError("plot requires a results.csv path")
    script = experiment.emit_plot_script(s["results"])
    out = Path(s.get("out", "."))
    out.mkdir(parents=True, exist_ok=True)
    path = out / "tau_vs_m.gp"
    path.write_text(script, encoding="ascii")
    print(path)
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "measure": cmd_measure,
    "networks": cmd_networks,
    "plot": cmd_plot,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
        )
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"evoscape-error: usage: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, RuntimeError) as exc:
        kind = type(exc).__name__
        message = " ".join(str(exc).split())
        print(f"evoscape-error: {kind}: {message}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
