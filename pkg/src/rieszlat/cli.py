"""Command-line front end.

    rieszlat <subcommand> [--config FILE] [--out DIR] [--seed N] ...

Subcommands select suites; results land in the output directory as rows.csv,
one SVG per experiment, and manifest.json (written last, so its presence marks
a complete run).  Exit status: 0 all verdicts pass or recorded, 1 at least one
fail verdict, 2 configuration error (in which case nothing is written).

The config file is flat key=value text; list values are comma-separated;
unknown keys are rejected.  Command-line flags override file values.
"""
from __future__ import annotations

import argparse
import sys
import time
from dataclasses import asdict, replace
from pathlib import Path

from . import __version__
from . import report
from .verify import FAIL, ExperimentRow, SweepConfig, run_suites

SUBCOMMAND_SUITES = {
    "riesz": ["riesz_exactness", "opnorm:riesz", "opnorm:j_gamma"],
    "maximal": ["maximal_exactness", "opnorm:fractional_maximal"],
    "atoms": ["atom_validity", "atom_uniform"],
    "opnorm": ["opnorm:riesz", "opnorm:j_gamma", "opnorm:fractional_maximal"],
    "inequalities": ["inequalities"],
    "weaktype": ["weak_type"],
    "all": [
        "inequalities",
        "riesz_exactness",
        "maximal_exactness",
        "opnorm:riesz",
        "opnorm:j_gamma",
        "opnorm:fractional_maximal",
        "atom_validity",
        "atom_uniform",
        "weak_type",
    ],
}


class ConfigError(Exception):
    pass


def parse_config_file(path: str | Path) -> dict[str, str]:
    """key = value lines; blank lines and #-comments ignored."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        mapping[key.strip()] = value.strip()
    return mapping


def load_config(config_path: str | Path | None, **overrides) -> SweepConfig:
    """Config from an optional file plus typed overrides (seed, trials, ...)."""
    mapping = parse_config_file(config_path) if config_path else {}
    try:
        cfg = SweepConfig.from_mapping(mapping)
        cleaned = {k: v for k, v in overrides.items() if v is not None}
        return replace(cfg, **cleaned) if cleaned else cfg
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def emit_report(rows: list[ExperimentRow], out_dir: str | Path) -> list[Path]:
    """Write rows.csv and the per-experiment SVG figures; returns all paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [report.write_rows(rows, out / "rows.csv")]
    paths.extend(report.render_figures(rows, out))
    return paths


def run(
    subcommand: str,
    config_path: str | Path | None = None,
    out_dir: str | Path = "rieszlat-out",
    **overrides,
) -> int:
    """Execute the suites behind `subcommand`, write the report, return the
    exit status (0 clean, 1 failed verdicts, 2 config error)."""
    if subcommand not in SUBCOMMAND_SUITES:
        print(f"config error: unknown subcommand {subcommand!r}", file=sys.stderr)
        return 2
    started = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    try:
        config = load_config(config_path, **overrides)
        rows = run_suites(SUBCOMMAND_SUITES[subcommand], config)
    except (ConfigError, ValueError) as exc:
        # bad keys/values, and grid points violating an operation's preconditions
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out = Path(out_dir)
    paths = emit_report(rows, out)
    failed = sum(1 for r in rows if r.verdict == FAIL)
    exit_status = 1 if failed else 0
    report.write_manifest(
        out / "manifest.json",
        {
            "tool": "rieszlat",
            "version": __version__,
            "subcommand": subcommand,
            "config": asdict(config),
            "started": started,
            "finished": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
            "outputs": sorted(p.name for p in paths),
            "rows": len(rows),
            "failed_rows": failed,
            "exit_status": exit_status,
        },
    )
    return exit_status


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="rieszlat",
        description="lattice operator verification sweeps",
    )
    parser.add_argument("subcommand", choices=sorted(SUBCOMMAND_SUITES))
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--out", default="rieszlat-out", help="output directory")
    parser.add_argument("--seed", type=int, help="override the root seed")
    parser.add_argument("--trials", type=int, help="override the trial count")
    parser.add_argument("--box-radius", type=int, help="override the box radius")
    parser.add_argument(
        "--negative-controls",
        choices=["on", "off"],
        help="run the deliberately broken inputs (their rows fail by design)",
    )
    args = parser.parse_args(argv)
    controls = None if args.negative_controls is None else args.negative_controls == "on"
    return run(
        args.subcommand,
        config_path=args.config,
        out_dir=args.out,
        seed=args.seed,
        trials=args.trials,
        box_radius=args.box_radius,
        negative_controls=controls,
    )


if __name__ == "__main__":
    sys.exit(main())
