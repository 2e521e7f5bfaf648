"""Inverse-power objective of refined versus random RIS phases over channel draws."""

import argparse

import numpy as np

from hcmslp.channel import gen_channels, total_channel
from hcmslp.config import load_config
from hcmslp.phases import inverse_power_objective, random_phases, refine_phases


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--preset", default="desk", choices=("desk", "paper"))
    ap.add_argument("--draws", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = load_config(preset=args.preset)
    rng = np.random.default_rng(args.seed)
    gains = {2: [], 4: []}
    for _ in range(args.draws):
        ch = gen_channels(cfg.geometry, cfg.fading, rng)
        f_rand = inverse_power_objective(total_channel(ch, random_phases(cfg.geometry.N, 4, rng)))
        for Q in gains:
            f = inverse_power_objective(total_channel(ch, refine_phases(ch, Q, rng)))
            gains[Q].append(10 * np.log10(f_rand / f))
    for Q, g in gains.items():
        g = np.array(g)
        print(f"Q={Q}: median gain {np.median(g):.2f} dB, wins {np.mean(g > 0):.0%}")


if __name__ == "__main__":
    main()
