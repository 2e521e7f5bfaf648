"""Scheme ordering at the power where QAM-ZF reaches a target SER.

Calibrates the power from the exact conditional ZF error probability, then
runs all three schemes for Q=2 and Q=4 at that single power.
"""

import argparse
from dataclasses import replace

from hcmslp import sim
from hcmslp.config import load_config


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config")
    ap.add_argument("--preset", default="desk", choices=("desk", "paper"))
    ap.add_argument("--target", type=float, default=1e-2, help="QAM-ZF SER target")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out")
    args = ap.parse_args()

    cfg = load_config(args.config, args.preset)
    p_cal = sim.calibrate_zf_power(cfg, args.target, option="2")
    run = replace(cfg.run, schemes=("QAM-ZF", "QAM-SLP", "HCM-SLP"), phases=("2", "4"),
                  powers_dbm=(round(p_cal, 2),), seed=args.seed)
    records = sim.run_sweep(replace(cfg, run=run))
    print(f"calibrated power {p_cal:.2f} dBm")
    for r in records:
        lo, hi = r.wilson_ci_95
        print(f"{r.scheme:8s} Q={r.Q}  SER {r.ser:.3e}  95% CI [{lo:.3e}, {hi:.3e}]  "
              f"({r.errors}/{r.symbols})")
    if args.out:
        sim.emit_csv(records, args.out)


if __name__ == "__main__":
    main()
