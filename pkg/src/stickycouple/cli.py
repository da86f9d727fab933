"""Command-line batch harness.

Subcommands are thin wrappers over the experiment layer; every run is a pure
function of (config, seed), writes a provenance-headed CSV plus a plain-text
summary, and exits 0 on success, 2 on an invalid configuration (naming the
offending key), 3 on numerical divergence. The default output directory can
be overridden with the STICKYCOUPLE_OUT environment variable.
"""

import argparse
import csv
import os
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from stickycouple.experiments import ConfigError, ResultTable, config_hash, run_experiment
from stickycouple.ode_bayes import DivergenceError

# subcommand -> default experiment kind
_SUBCOMMANDS = {
    "simulate-coupling": "coupling-domination",
    "simulate-sticky": "validate-kernel",
    "bounds": "bounds-report",
    "validate": "validate-kernel",
    "ode-posterior": "ode-bias-sweep",
    "limit-study": "limit-study",
    "run": None,  # kind read from the config file
}


def load_config(path):
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise ConfigError("config", f"config file not found: {path}")
    with open(p, "rb") as fh:
        try:
            return tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError("config", f"config parse error: {exc}")


def write_outputs(table: ResultTable, out_dir: Path, cfg_hash: str, seed: int):
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{table.name}.csv"
    with open(csv_path, "w", newline="") as fh:
        for line in table.provenance(cfg_hash, seed):
            fh.write(line + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    summary_path = out_dir / f"{table.name}.summary.txt"
    with open(summary_path, "w") as fh:
        for line in table.provenance(cfg_hash, seed):
            fh.write(line + "\n")
        for line in table.summary:
            fh.write(line + "\n")
    return csv_path, summary_path


def build_parser():
    parser = argparse.ArgumentParser(
        prog="stickycouple",
        description="Coupling simulations, bound certificates, and step-size studies",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="TOML config file")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--threads", type=int, default=1, help="worker threads")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        kind = _SUBCOMMANDS[args.command]
        cfg_kind = config.get("experiment", {}).get("kind")
        if kind is None:
            if cfg_kind is None:
                raise ConfigError("experiment.kind", "run requires experiment.kind in the config")
            kind = cfg_kind
        elif cfg_kind is not None and cfg_kind != kind:
            raise ConfigError(
                "experiment.kind",
                f"config declares kind {cfg_kind!r} but subcommand implies {kind!r}",
            )
        seed = args.seed
        if seed is None:
            seed = int(config.get("experiment", {}).get("seed", 0))
        if args.threads < 1:
            raise ConfigError("threads", "--threads must be >= 1")
        table = run_experiment(kind, config, seed, threads=args.threads)
    except ConfigError as exc:
        print(f"invalid configuration ({exc.key}): {exc}", file=sys.stderr)
        return 2
    except DivergenceError as exc:
        print(f"numerical divergence: {exc}", file=sys.stderr)
        return 3
    out_dir = Path(args.out or os.environ.get("STICKYCOUPLE_OUT", "results"))
    cfg_hash = config_hash(config)
    csv_path, _ = write_outputs(table, out_dir, cfg_hash, seed)
    for line in table.summary:
        print(line)
    print(f"wrote {csv_path}")
    return table.exit_code


if __name__ == "__main__":
    sys.exit(main())
