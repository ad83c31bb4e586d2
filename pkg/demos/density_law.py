"""Kn scales as 1 / <I>: the same flow traded in bigger lots.

The density sweep runs five regimes in which every order carries 1..5 lots.
The price dynamics are unchanged while the inner-layer population grows, so
the mean free path L (price move per lot of inner flow) shrinks in
proportion and Kn * <I> stays constant. Its value is kappa; kappa / theta_Kn
is the population needed for the inner layer to behave like a continuum.

    python demos/density_law.py [seed]
"""

import sys

import numpy as np

from lobkn.book import replay
from lobkn.kinetics import KineticParams, continuum_threshold, fit_kappa, indicators, inner_series
from lobkn.layers import collect_layers
from lobkn.synth import SWEEP_LOTS, density_sweep_config, generate, phase_ticks


def main(seed=0):
    cfg = density_sweep_config(seed)
    log = generate(cfg)
    g = cfg.planted_gamma_c
    p = KineticParams(g, g, k=4, S=100)
    ind = indicators(inner_series(collect_layers(replay(log), gamma_max=10), p), p)
    phases = phase_ticks(log)
    i_bar = (ind.I_bar_minus + ind.I_bar_plus) / 2
    print("lots  <I>      median Kn   Kn*<I>")
    for i, lot in enumerate(SWEEP_LOTS):
        a, b = phases[f"regime_{i}"]
        sel = (ind.tick >= a + p.k * p.S) & (ind.tick < b) & np.isfinite(ind.Kn_sym)
        kn = ind.Kn_sym[sel]
        print(f"{lot:4d}  {i_bar[sel].mean():6.1f}   {np.median(kn):.4f}     "
              f"{np.median(kn * i_bar[sel]):.3f}")
    fit = fit_kappa(ind.Kn_sym, ind.I_bar_minus, ind.I_bar_plus)
    print(f"\nkappa {fit.kappa:.3f}: Kn < 0.1 needs <I> above "
          f"{continuum_threshold(fit.kappa, 0.1):.1f} lots per side")


if __name__ == "__main__":
    main(*(int(a) for a in sys.argv[1:2]))
