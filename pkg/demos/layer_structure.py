"""Plant an inner layer in a synthetic book and find it again.

Trend followers requote volume into depths 0..gamma* after each mid move.
The correlation between mid velocity and per-depth volume changes is
positive inside that layer on the side the price left, and turns negative
just beyond it. The peak of the cumulative correlation marks the boundary.

    python demos/layer_structure.py [gamma_star] [seed]
"""

import sys
import time

import numpy as np

from lobkn.book import Side, replay
from lobkn.layers import collect_layers, corr_curve, find_gamma_c
from lobkn.synth import SynthConfig, generate


def main(gamma_star=18, seed=0):
    t0 = time.perf_counter()
    cfg = SynthConfig(seed=seed, planted_gamma_c=gamma_star)
    log = generate(cfg)
    ls = collect_layers(replay(log))
    print(f"{len(log)} events -> {len(ls)} transactions in {time.perf_counter() - t0:.1f} s")
    print(f"mid moved over {np.nanmax(ls.mid) - np.nanmin(ls.mid):.1f} ticks\n")

    for side in Side:
        per = corr_curve(ls.velocity, ls.dn[side], k=20, gamma=ls.gamma, side=side)
        cum = corr_curve(ls.velocity, ls.dn[side], k=20, gamma=ls.gamma, side=side,
                         mode="cumulative")
        est = find_gamma_c(per, cum)
        print(f"{side.name.lower()} side, {per.n_blocks} blocks of 20 ticks")
        for g in (0, 5, gamma_star - 1, gamma_star, gamma_star + 1, gamma_star + 3, 50):
            bar = "#" * int(abs(per.at(g)) * 60)
            print(f"  depth {g:3d}  corr {per.at(g):+.3f}  cum {cum.at(g):+.3f}  {bar}")
        print(f"  boundary: peak of |cum| at {est.gamma_c}, sign change at {est.sign_change}"
              f" (planted {gamma_star})\n")


if __name__ == "__main__":
    main(*(int(a) for a in sys.argv[1:3]))
