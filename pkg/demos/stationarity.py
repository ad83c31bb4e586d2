"""Volume at the best is stationary; volume summed deep into the book is not.

The spectrum of V(0, t) is flat at low frequency (exponent near 0). V(100, t)
follows a slowly drifting deep density and behaves like a random walk
(exponent near 2). Segment means of the first stay put; those of the second
wander far beyond their standard errors.

    python demos/stationarity.py [seed]
"""

import sys

from lobkn.book import Side, replay
from lobkn.layers import collect_layers
from lobkn.series import power_spectrum, spectral_exponent, weak_stationarity_report
from lobkn.synth import SynthConfig, generate


def main(seed=0):
    # about 1.1e5 transactions; the analysis uses the first 1e5
    ls = collect_layers(replay(generate(SynthConfig(seed=seed, n_events=540_000))),
                        gamma_max=100)
    print(f"{len(ls)} ticks\n")
    print("side   depth  alpha   segment-mean gap (pooled SEs)  flagged")
    for side in Side:
        for g in (0, 100):
            V = ls.V(side, g)[:100_000]
            alpha = spectral_exponent(*power_spectrum(V))
            rep = weak_stationarity_report(V)
            print(f"{side.name.lower():5s}  {g:5d}  {alpha:+.2f}   {rep.max_mean_gap:8.1f}"
                  f"                       {rep.flagged}")
    dn = ls.dn[Side.PLUS][:100_000, ls.col(0)]
    print(f"\nincrements dN(0) on the plus side flagged: {weak_stationarity_report(dn).flagged}")


if __name__ == "__main__":
    main(*(int(a) for a in sys.argv[1:2]))
