"""Acceptance criteria, one test each. Every test prints a single
``CRITERION n ...: PASS|FAIL`` line; the lines are repeated in the terminal
summary. Run ``pytest tests/test_acceptance.py -v`` or this file directly."""

import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from lobkn.book import Side, replay
from lobkn.errors import NoSignChange
from lobkn.kinetics import continuum_threshold, fit_mean_free_path, joint_threshold_quantile
from lobkn.layers import collect_layers, corr_curve, find_gamma_c
from lobkn.series import power_spectrum, spectral_exponent
from lobkn.synth import (SynthConfig, correlated_rates, density_sweep_config, flash_crash_config,
                         generate, generate_known_slope)

from checks import crash_ok, crash_report, sweep_report
from oracles import block_means, cumulative_volume, depth_counts, naive_snapshots, pearson, random_log

pytestmark = pytest.mark.acceptance

RESULTS = {}
HERE = Path(__file__).resolve().parent


def report(n, name, ok, detail):
    line = f"CRITERION {n} {name}: {'PASS' if ok else 'FAIL'} ({detail})"
    RESULTS[n] = line
    print(line, flush=True)
    assert ok, line


# -- 1 -------------------------------------------------------------------------------------


def _oracle_layers(log, gmin=-10, gmax=100, v_depths=(0, 1, 2, 5, 10, 20, 50, 100)):
    snaps = naive_snapshots(log)

    def best(levels, side):
        if not levels:
            return None
        return max(levels) if side is Side.MINUS else min(levels)

    mids, n, dn, dv = [], {s: [] for s in Side}, {s: [] for s in Side}, {s: [] for s in Side}
    for prev, curr in zip(snaps[:-1], snaps[1:]):
        bm, bp = best(curr[Side.MINUS], Side.MINUS), best(curr[Side.PLUS], Side.PLUS)
        mids.append(np.nan if bm is None or bp is None else (bm + bp) / 2)
        for side in Side:
            ref = best(prev[side], side)
            if ref is None:
                ref = best(curr[side], side)
            if ref is None:
                zero = [0] * (gmax - gmin + 1)
                n[side].append(zero)
                dn[side].append(zero)
                dv[side].append([0] * len(v_depths))
                continue
            now = depth_counts(curr[side], side, ref, gmin, gmax)
            before = depth_counts(prev[side], side, ref, gmin, gmax)
            n[side].append(now)
            dn[side].append([a - b for a, b in zip(now, before)])
            dv[side].append([cumulative_volume(curr[side], side, ref, g)
                             - cumulative_volume(prev[side], side, ref, g) for g in v_depths])
    first = snaps[0]
    bm, bp = best(first[Side.MINUS], Side.MINUS), best(first[Side.PLUS], Side.PLUS)
    mid0 = np.nan if bm is None or bp is None else (bm + bp) / 2
    mids = np.array(mids)
    vel = np.diff(np.concatenate([[mid0], mids]))
    return (mids, vel, {s: np.array(n[s]) for s in Side}, {s: np.array(dn[s]) for s in Side},
            {s: np.array(dv[s]) for s in Side}, np.array(v_depths))


def _oracle_corr(vel, B, k):
    bv = block_means(vel, k)
    keep = np.isfinite(bv)
    return np.array([pearson(bv[keep], block_means(B[:, j], k)[keep]) for j in range(B.shape[1])])


def test_criterion_1_oracle_equivalence():
    t0 = time.perf_counter()
    log = random_log(0, 1000, crossing=True)
    ls = collect_layers(replay(log))
    mids, vel, n, dn, dv, vd = _oracle_layers(log)
    k = 5  # about 250 ticks; k = 5 leaves ~50 blocks
    exact = (np.array_equal(ls.mid, mids, equal_nan=True)
             and np.array_equal(ls.velocity, vel, equal_nan=True))
    worst = 0.0
    for side in Side:
        exact &= np.array_equal(ls.n[side], n[side]) and np.array_equal(ls.dn[side], dn[side])
        exact &= np.array_equal(ls.delta_v(side)[:, vd], dv[side])
        exact &= np.array_equal(ls.V(side, 100), n[side][:, 10:].sum(axis=1))
        per = corr_curve(ls.velocity, ls.dn[side], k=k, gamma=ls.gamma, side=side)
        cum = corr_curve(ls.velocity, ls.dn[side], k=k, gamma=ls.gamma, side=side,
                         mode="cumulative")
        want_per = _oracle_corr(vel, dn[side], k)
        want_cum = _oracle_corr(vel, np.cumsum(dn[side][:, 10:], axis=1), k)
        for got, want in ((per.corr, want_per), (cum.corr, want_cum)):
            exact &= np.array_equal(np.isnan(got), np.isnan(want))
            ok = np.isfinite(want)
            rel = np.abs(got[ok] - want[ok]) / np.maximum(np.abs(want[ok]), 1e-300)
            worst = max(worst, float(rel.max()))
    elapsed = time.perf_counter() - t0
    ok = bool(exact) and worst <= 1e-9 and elapsed < 5
    report(1, "oracle equivalence", ok,
           f"{len(ls)} ticks, integer layers exact={bool(exact)}, "
           f"max corr rel err {worst:.1e}, {elapsed:.2f} s")


# -- 2 -------------------------------------------------------------------------------------


def _gamma_c_run(arg):
    g, seed = arg
    t0 = time.perf_counter()
    ls = collect_layers(replay(generate(SynthConfig(seed=seed, planted_gamma_c=g))))
    out = []
    for side in Side:
        per = corr_curve(ls.velocity, ls.dn[side], k=20, gamma=ls.gamma, side=side)
        cum = corr_curve(ls.velocity, ls.dn[side], k=20, gamma=ls.gamma, side=side,
                         mode="cumulative")
        try:
            r = find_gamma_c(per, cum)
            out.append((r.gamma_c, r.sign_change))
        except NoSignChange as e:
            out.append((e.peak, None))
    return g, seed, out, time.perf_counter() - t0


def test_criterion_2_gamma_c_recovery():
    jobs = [(g, s) for g in (10, 18, 24) for s in range(10)]
    runs = [_gamma_c_run(j) for j in jobs]
    slowest = max(r[3] for r in runs)
    counts, ok = {}, slowest < 60
    for g in (10, 18, 24):
        for i, side in enumerate(Side):
            hits = sum(1 for gg, _, out, _ in runs if gg == g
                       and out[i][1] is not None
                       and abs(out[i][0] - g) <= 2 and abs(out[i][1] - out[i][0]) <= 2)
            counts[(g, side.name.lower())] = hits
            ok &= hits >= 9
    detail = ", ".join(f"g*={g} {s} {c}/10" for (g, s), c in counts.items())
    report(2, "gamma_c recovery", ok, f"{detail}; slowest run {slowest:.1f} s")


# -- 3 -------------------------------------------------------------------------------------


def test_criterion_3_mean_free_path_recovery():
    ok, parts = True, []
    for L in (0.34, 0.38, 1.49):
        hits = 0
        for trial in range(100):
            v, f = generate_known_slope(SynthConfig(seed=trial), L, L / 10, n_blocks=100)
            hits += abs(fit_mean_free_path(v, f, S=100) / L - 1) <= 0.10
        parts.append(f"L*={L} {hits}/100")
        ok &= hits >= 95
    report(3, "mean free path recovery", ok, ", ".join(parts))


# -- 4 -------------------------------------------------------------------------------------


def test_criterion_4_inverse_density_law():
    rep = sweep_report(density_sweep_config(0))
    particles = continuum_threshold(rep["kappa"], 0.1)
    ok = rep["cv"] < 0.2 and particles > 5
    report(4, "inverse density law", ok,
           f"Kn*<I> per regime {np.round(rep['prod'], 3).tolist()}, CV {rep['cv']:.3f}, "
           f"kappa {rep['kappa']:.3f}, kappa/theta_Kn {particles:.1f}")


# -- 5 -------------------------------------------------------------------------------------


def test_criterion_5_spectral_contrast():
    # one stationary book, seed 0, first 10**5 ticks, both sides
    ls = collect_layers(replay(generate(SynthConfig(seed=0, n_events=800_000))), gamma_max=100)
    n = 100_000
    ok, parts = len(ls) >= n, []
    for side in Side:
        a0 = spectral_exponent(*power_spectrum(ls.V(side, 0)[:n]))
        a100 = spectral_exponent(*power_spectrum(ls.V(side, 100)[:n]))
        ok &= -0.3 <= a0 <= 0.3 and 1.6 <= a100 <= 2.4
        parts.append(f"{side.name.lower()} alpha(V0) {a0:.2f}, alpha(V100) {a100:.2f}")
    report(5, "spectral contrast", ok, f"{len(ls)} ticks; " + "; ".join(parts))


# -- 6 -------------------------------------------------------------------------------------


def test_criterion_6_flash_crash_detection():
    cfg = flash_crash_config(0)
    a, b = crash_report(cfg), crash_report(cfg)
    same = (a["log"] == b["log"] and a["minus_first"] == b["minus_first"]
            and a["phases"] == b["phases"])
    ok = crash_ok(a) and same
    report(6, "flash crash detection", ok,
           f"minus_regime from tick {a['minus_first']} vs crash minimum at {a['t_min']}, "
           f"I- {a['I_before']:.1f} -> {a['I_end']:.0f} over depletion, "
           f"<I+> depletion/normal {a['plus_ratio']:.2f}, Kn- inf at exhaustion "
           f"{a['kn_inf_at_exhaustion']}, plus_regime in rebound {a['plus_in_rebound']}, "
           f"deterministic {same}")


# -- 7 -------------------------------------------------------------------------------------


def test_criterion_7_joint_quantile():
    rng = np.random.default_rng(2024)
    a, b = rng.standard_normal(1_000_000), rng.standard_normal(1_000_000)
    jq = joint_threshold_quantile(a, b, p=0.05)
    frac = float(np.mean((a < jq.theta) & (b < jq.theta)))
    lm, lp = correlated_rates(1_000_000, -0.58, seed=7)
    rho = joint_threshold_quantile(lm, lp).cross_corr
    ok = abs(frac - 0.05) <= 0.005 and abs(rho + 0.58) <= 0.1
    report(7, "joint quantile", ok,
           f"theta {jq.theta:.4f}, joint fraction {frac:.4f}, rho {rho:.3f}")


# -- 8 -------------------------------------------------------------------------------------


def test_criterion_8_invariant_suite():
    res = subprocess.run([sys.executable, "-m", "pytest", "-q", "-m", "invariant",
                          "-p", "no:cacheprovider", str(HERE)],
                         capture_output=True, text=True, cwd=HERE.parent)
    tail = res.stdout.strip().splitlines()[-1] if res.stdout.strip() else res.stderr[-200:]
    report(8, "invariant suite", res.returncode == 0, tail)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-p", "no:cacheprovider"]))
