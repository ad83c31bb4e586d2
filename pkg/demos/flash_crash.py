"""Watch the regime detector through a scripted crash and rebound.

Selling intensifies while bids are withdrawn, so the bid inner layer
thins out. Its depletion rate lambda- turns strongly negative and its
Knudsen number grows as each lot moves the price further; the detector
flags the minus side before the price reaches its low. The last bid then
goes, Kn- becomes infinite, and after a refill the same story plays out
on the offer side during the rebound.

    python demos/flash_crash.py [seed]
"""

import sys

import numpy as np

from lobkn.book import Side, replay
from lobkn.kinetics import KineticParams, detect_regimes, indicators, inner_series
from lobkn.layers import collect_layers
from lobkn.synth import flash_crash_config, generate, phase_ticks


def main(seed=0):
    log = generate(flash_crash_config(seed))
    phases = phase_ticks(log)
    ls = collect_layers(replay(log), gamma_max=10)
    p = KineticParams(4, 4, k=2, S=100)
    ind = indicators(inner_series(ls, p), p)
    reg = detect_regimes(ind, theta_lambda=-0.044, theta_kn=0.1)

    for name in ("normal", "depletion", "exhaustion", "rebound", "recovery"):
        print(f"{name:11s} ticks {phases[name][0]}..{phases[name][1] - 1}")
    print(f"\nminus_regime intervals {reg.intervals(Side.MINUS)}")
    print(f"plus_regime intervals  {reg.intervals(Side.PLUS)}\n")

    d0, d1 = phases["depletion"]
    ex = phases["exhaustion"][1] - 1
    print(" tick     mid       I-    lambda-   Kn-")
    for t in list(range(d0 - 200, d1, 100)) + [ex]:
        j = np.flatnonzero(ind.tick == t)
        if j.size:
            j = j[0]
            print(f"{t:5d}  {ind.mid[j]:9.1f}  {ind.I_bar_minus[j]:5.1f}  "
                  f"{ind.lambda_minus[j]:+.3f}   {ind.Kn_minus[j]:.3f}")


if __name__ == "__main__":
    main(*(int(a) for a in sys.argv[1:2]))
