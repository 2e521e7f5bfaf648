"""SER versus transmit power on the desk preset, with an optional plot.

    python3 scripts/desk_sweep.py --out results/desk.csv --plot results/desk.png
"""

import argparse
import logging
from dataclasses import replace
from pathlib import Path

from hcmslp import sim
from hcmslp.config import load_config


def plot(records, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for key in sorted({(r.scheme, r.Q) for r in records}):
        rs = [r for r in records if (r.scheme, r.Q) == key and r.errors > 0]
        if rs:
            ax.semilogy([r.power_dbm for r in rs], [r.ser for r in rs], marker="o",
                        label=f"{key[0]}, Q={key[1]}")
    ax.set_xlabel("transmit power (dBm)")
    ax.set_ylabel("SER")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="INI overrides on top of the desk preset")
    ap.add_argument("--out", default="results/desk_sweep.csv")
    ap.add_argument("--plot", help="PNG path (needs matplotlib)")
    ap.add_argument("--trials", type=int)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO)

    cfg = load_config(args.config, "desk")
    run = replace(cfg.run, workers=args.workers,
                  trials=args.trials if args.trials else cfg.run.trials)
    cfg = replace(cfg, run=run)
    records = sim.run_sweep(cfg)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    sim.emit_csv(records, args.out)
    for r in records:
        print(f"{r.scheme:8s} Q={r.Q:6s} {r.power_dbm:6.1f} dBm  SER {r.ser:.3e}")
    if args.plot:
        plot(records, args.plot)


if __name__ == "__main__":
    main()
