"""Full-size sweep (M = K = 32, N = 64).  Takes hours at the preset trial count.

Use --trials to shorten it; --workers spreads trials over processes.
"""

import argparse
from dataclasses import replace

from hcmslp import sim
from hcmslp.config import load_config


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config")
    ap.add_argument("--trials", type=int, default=4)
    ap.add_argument("--symbols", type=int, default=200)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="paper_scale.csv")
    args = ap.parse_args()

    cfg = load_config(args.config, "paper")
    run = replace(cfg.run, trials=args.trials, symbols_per_trial=args.symbols,
                  workers=args.workers)
    records = sim.run_sweep(replace(cfg, run=run))
    sim.emit_csv(records, args.out)
    for r in records:
        print(f"{r.scheme:8s} Q={r.Q:6s} {r.power_dbm:6.1f} dBm  SER {r.ser:.3e}")


if __name__ == "__main__":
    main()
