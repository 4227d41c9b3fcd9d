"""Command line experiment runner.

    icb run --config osn.cfg --seed 3 --out osn.csv
    icb sweep --config sweep.cfg --jobs 4 --out results.csv
    icb presets --out presets/
    icb savings --volume-tb 8600 --ratio 0.027
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Iterable, List, Optional, TextIO, Union

from .config import PRESET_NOTES, ConfigError, emit_config, load_config, load_sweep, presets
from .engine import MetricsReport, run, traffic_savings
from .topology import TopologyError
from .workload import WorkloadError

log = logging.getLogger("icb")

CSV_HEADER = [
    "scenario", "strategy", "policy", "cache_bytes", "scale", "seed",
    "cache_hit_ratio", "avg_hops", "avg_delay_ms", "replications", "events",
]


def _num(x: Optional[float]) -> str:
    return "NA" if x is None else f"{x:.6f}"


def csv_rows(reports: Iterable[MetricsReport]) -> List[List[str]]:
    ordered = sorted(reports, key=lambda r: (r.config_hash, r.seed))
    return [
        [
            r.scenario, r.strategy, r.policy, str(r.cache_bytes), f"{r.scale:g}", str(r.seed),
            _num(r.cache_hit_ratio), _num(r.avg_hops), _num(r.avg_delay),
            str(r.replication_count), str(r.events_processed),
        ]
        for r in ordered
    ]


def emit_csv(reports: Iterable[MetricsReport], destination: Union[str, Path, TextIO]) -> int:
    """Write reports as CSV ordered by (config hash, seed); returns the row count."""
    rows = csv_rows(reports)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(rows)
    if hasattr(destination, "write"):
        destination.write(buf.getvalue())
    else:
        Path(destination).write_text(buf.getvalue())
    return len(rows)


def _seed_override(args) -> Optional[int]:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("ICB_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"ICB_SEED must be an integer, got {env!r}") from None
    return None


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    seed = _seed_override(args)
    if seed is not None:
        cfg = cfg.replace(seed=seed)
    if args.scale is not None:
        cfg = cfg.replace(scale=args.scale)
    report = run(cfg)
    if args.out:
        emit_csv([report], args.out)
        print(report.summary())
    else:
        print(report.summary(), file=sys.stderr)
        emit_csv([report], sys.stdout)
    return 0


def cmd_sweep(args) -> int:
    spec = load_sweep(args.config)
    seed = _seed_override(args)
    if seed is not None:
        spec = type(spec)(spec.base, spec.axes, (seed,))
    configs = spec.configs()
    if args.scale is not None:
        configs = [c.replace(scale=args.scale) for c in configs]
    log.info("sweep: %d runs, %d job(s)", len(configs), args.jobs)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(run, configs))
    else:
        reports = [run(c) for c in configs]
    n = emit_csv(reports, args.out if args.out else sys.stdout)
    log.info("wrote %d rows", n)
    return 0


def cmd_presets(args) -> int:
    cfgs = presets(strategy=args.strategy, seed=args.seed or 0, topology=args.topology)
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    for key, cfg in cfgs.items():
        if args.scale is not None:
            cfg = cfg.replace(scale=args.scale)
        text = emit_config(cfg, comment=f"preset {key}\n{PRESET_NOTES[cfg.name]}")
        if out:
            (out / f"{key}.cfg").write_text(text)
            print(out / f"{key}.cfg")
        else:
            print(text)
    return 0


def cmd_savings(args) -> int:
    saved = traffic_savings(args.volume_tb, args.ratio)
    print(f"{saved:.1f} TB/day")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="icb", description="CCN caching-strategy simulator")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config_required=True):
        sp.add_argument("--config", required=config_required, help="scenario or sweep file")
        sp.add_argument("--seed", type=int, default=None, help="overrides the config seed (fallback: $ICB_SEED)")
        sp.add_argument("--scale", type=float, default=None, help="desk-scale factor S")
        sp.add_argument("--out", default=None, help="output path")

    sp = sub.add_parser("run", help="simulate one scenario file")
    common(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("sweep", help="simulate a sweep file, one CSV row per run")
    common(sp)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("presets", help="write the six evaluation scenarios")
    sp.add_argument("--out", default=None, help="directory for the .cfg files (default: stdout)")
    sp.add_argument("--strategy", default="LCE")
    sp.add_argument("--topology", default="abilene")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--scale", type=float, default=None)
    sp.set_defaults(func=cmd_presets)

    sp = sub.add_parser("savings", help="daily traffic kept off the core for a hit ratio")
    sp.add_argument("--volume-tb", type=float, required=True, help="daily volume, decimal TB")
    sp.add_argument("--ratio", type=float, required=True, help="cache hit ratio in [0, 1]")
    sp.set_defaults(func=cmd_savings)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be >= 1")
    try:
        return args.func(args)
    except (ConfigError, TopologyError, WorkloadError, ValueError, OSError) as e:
        print(f"icb: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
