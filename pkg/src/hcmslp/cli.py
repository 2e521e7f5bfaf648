"""Command-line entry point: ``hcmslp {sweep,scatter,constellation-dump,validate-config}``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from hcmslp.config import PRESETS, ConfigError, load_config, to_ini
from hcmslp.constellation import build_hcm, build_qam, to_csv
from hcmslp.errors import ConfigurationError
from hcmslp import sim

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="INI file overriding the preset")
    p.add_argument("--preset", choices=sorted(PRESETS), default="desk")
    p.add_argument("--seed", type=int, help="master seed (overrides config)")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hcmslp", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="SER versus transmit power")
    _common(p)
    p.add_argument("--out", required=True, help="output CSV")
    p.add_argument("--trials", type=int)
    p.add_argument("--symbols", type=int, help="symbol slots per trial")
    p.add_argument("--workers", type=int)

    p = sub.add_parser("scatter", help="noise-free received constellation samples")
    _common(p)
    p.add_argument("--out", required=True)
    p.add_argument("--slots", type=int, default=1000, help="symbol slots to collect")
    p.add_argument("--scheme", default="HCM-SLP")
    p.add_argument("--phase", help="phase option, default: first in config")

    p = sub.add_parser("constellation-dump", help="write constellation points as CSV")
    p.add_argument("--kind", choices=("hcm", "qam"), default="hcm")
    p.add_argument("--order", type=int, default=16)
    p.add_argument("--out", required=True)

    p = sub.add_parser("validate-config", help="parse a config and print the resolved values")
    _common(p)
    return ap


def _load(args):
    cfg = load_config(args.config, args.preset)
    run = cfg.run
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    for flag, key in (("trials", "trials"), ("symbols", "symbols_per_trial"), ("workers", "workers")):
        if getattr(args, flag, None) is not None:
            overrides[key] = getattr(args, flag)
    if overrides:
        try:
            run = replace(run, **overrides)
        except ConfigurationError as exc:
            raise ConfigError(str(exc), "<command line>") from None
    return replace(cfg, run=run)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "constellation-dump":
            c = build_hcm(args.order) if args.kind == "hcm" else build_qam(args.order)
            to_csv(c, args.out)
            return EXIT_OK
        cfg = _load(args)
        if args.command == "validate-config":
            sys.stdout.write(to_ini(cfg))
            return EXIT_OK
        if args.command == "sweep":
            records = sim.run_sweep(cfg)
            sim.emit_csv(records, args.out)
            for r in records:
                print(f"{r.scheme:14s} Q={r.Q:8s} {r.power_dbm:7.2f} dBm  SER={r.ser:.3e}"
                      f"  ({r.errors}/{r.symbols}, infeasible={r.infeasible})")
            return EXIT_OK
        if args.command == "scatter":
            rows = sim.noise_free_scatter(cfg, args.slots, args.scheme, args.phase)
            sim.emit_constellation_scatter(rows, args.out)
            return EXIT_OK
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - surfaced as exit status 3
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
