"""Command-line surface: ``lobkn <subcommand> [options]``.

Exit status is 0 on success, 2 for bad input (unparseable logs, invalid
books, bad options) and 3 when the data are too short for the requested
estimate.
"""

from __future__ import annotations

import argparse
import contextlib
import math
import sys
from typing import Optional

import numpy as np

from . import io as lio
from .book import MarketSpec, Side, replay
from .errors import InputError, InsufficientData, NoSignChange
from .kinetics import (CORRELATION_K, DETECTOR_PARAMS, KNUDSEN_PARAMS, KineticParams,
                       detect_regimes, fit_kappa, indicators, inner_series,
                       joint_threshold_quantile, mean_free_path_diagnostics)
from .layers import collect_layers, corr_curve, find_gamma_c
from .series import (coarse_grain, power_spectrum, spectral_exponent,
                     weak_stationarity_report)
from .synth import (SCENARIOS, SynthConfig, density_sweep_config, flash_crash_config,
                    generate)

EXIT_OK, EXIT_INPUT, EXIT_DATA = 0, 2, 3

# default block sizes per stage
_DEFAULT_K = {"corr": CORRELATION_K, "mfp": KNUDSEN_PARAMS["k"], "knudsen": KNUDSEN_PARAMS["k"],
              "kappa": KNUDSEN_PARAMS["k"], "rates": KNUDSEN_PARAMS["k"],
              "detect": DETECTOR_PARAMS["k"]}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # argparse already exits 2; keep the message format fixed
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_INPUT)


def _common(p: argparse.ArgumentParser, log: bool = True):
    if log:
        p.add_argument("log", help="event log CSV ('-' for stdin)")
    p.add_argument("--delta-x", type=float, default=1.0, help="tick size in price units")
    p.add_argument("--delta-n", type=float, default=1.0, help="lot size in volume units")
    p.add_argument("--symbol", default="SYN")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")


def _kinetic(p: argparse.ArgumentParser):
    p.add_argument("--k", type=int, default=None, help="ticks per coarse-graining block")
    p.add_argument("--window-s", type=int, default=100, help="blocks per rolling window")
    p.add_argument("--gamma-max", type=int, default=100)
    p.add_argument("--gamma-c-minus", type=int, default=18)
    p.add_argument("--gamma-c-plus", type=int, default=18)
    p.add_argument("--theta-kn", type=float, default=0.1)
    p.add_argument("--theta-lambda", type=float, default=None,
                   help="depletion threshold; default is the joint 5%% quantile of the data")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="lobkn", description="Kinetic indicators for limit order books.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("replay", help="per-tick best prices and replay statistics")
    _common(p)

    p = sub.add_parser("spectrum", help="power spectra of V_gamma at chosen depths")
    _common(p)
    _kinetic(p)
    p.add_argument("--side", choices=("minus", "plus"), default="minus")
    p.add_argument("--depths", default=None, help="comma list, default 0 and gamma-max")
    p.add_argument("--segments", type=int, default=16)

    for name, hlp in (("corr", "velocity/flow correlation curves and gamma_c"),
                      ("mfp", "coarse-grained (f, v) scatter and mean free paths"),
                      ("knudsen", "per-tick indicator records (JSON lines)"),
                      ("kappa", "inverse-density fit of Kn against <I>"),
                      ("rates", "joint depletion-rate sample and threshold quantile"),
                      ("detect", "flagged depletion intervals"),
                      ("profile", "V_gamma profiles at chosen ticks")):
        p = sub.add_parser(name, help=hlp)
        _common(p)
        _kinetic(p)
        if name == "rates":
            p.add_argument("--p", type=float, default=0.05)
        if name == "profile":
            p.add_argument("--ticks", required=True, help="comma list of tick indices")

    p = sub.add_parser("synth", help="generate a synthetic event log")
    _common(p, log=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scenario", choices=SCENARIOS, default="stationary")
    p.add_argument("--n-events", type=int, default=None)
    p.add_argument("--gamma-c", type=int, default=None, help="planted inner-layer depth")
    return ap


# -- helpers ------------------------------------------------------------------------


@contextlib.contextmanager
def _output(path: str):
    if path == "-":
        yield sys.stdout
        sys.stdout.flush()
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _events(args):
    spec = MarketSpec(args.symbol, args.delta_x, args.delta_n)
    if args.log == "-":
        return list(lio.parse_event_log(sys.stdin, spec)), spec
    try:
        fh = open(args.log, newline="")
    except OSError as e:
        raise InputError(f"cannot open {args.log}: {e.strerror}") from None
    with fh:
        return list(lio.parse_event_log(fh, spec)), spec


def _params(args, command: str) -> KineticParams:
    k = args.k if args.k is not None else _DEFAULT_K.get(command, KNUDSEN_PARAMS["k"])
    return KineticParams(args.gamma_c_minus, args.gamma_c_plus, k, args.window_s, args.theta_kn)


def _layers(args):
    events, spec = _events(args)
    g = max(args.gamma_max, getattr(args, "gamma_c_minus", 0), getattr(args, "gamma_c_plus", 0))
    return collect_layers(replay(events, spec), gamma_max=g), spec


def _indicators(args, command):
    ls, spec = _layers(args)
    params = _params(args, command)
    return indicators(inner_series(ls, params), params), params, spec


def _theta_lambda(args, ind) -> tuple[float, Optional[object]]:
    if args.theta_lambda is not None:
        return args.theta_lambda, None
    q = joint_threshold_quantile(ind.lambda_minus, ind.lambda_plus,
                                 ind.params.theta_lambda_quantile)
    return q.theta, q


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"expected a comma list of integers, got {text!r}") from None


# -- subcommands ----------------------------------------------------------------------


def cmd_replay(args):
    events, spec = _events(args)
    rp = replay(events, spec)
    ticks, ts, xm, xp = [], [], [], []
    for snap in rp:
        st = snap.state
        ticks.append(st.tick_index)
        ts.append(snap.marker.timestamp_ms)
        xm.append(math.nan if st.x_minus is None else st.x_minus)
        xp.append(math.nan if st.x_plus is None else st.x_plus)
    xm, xp = np.array(xm, float), np.array(xp, float)
    notes = [f"events {rp.n_events}", f"transactions {rp.n_transactions}",
             f"dt_ms {rp.dt_ms}", f"delta_x {spec.delta_x}", f"delta_n {spec.delta_n}"]
    with _output(args.out) as out:
        lio.write_columns(out, ("tick", "ts_ms", "x_minus", "x_plus", "mid"),
                          np.array(ticks, np.int64), np.array(ts, np.int64), xm, xp,
                          (xm + xp) / 2, comments=notes)


def cmd_spectrum(args):
    ls, _ = _layers(args)
    side = Side(args.side)
    depths = _ints(args.depths) if args.depths else [0, args.gamma_max]
    cols, names, notes = [], [], []
    omega = None
    for g in depths:
        if not 0 <= g <= ls.gamma[-1]:
            raise InputError(f"depth {g} outside 0..{int(ls.gamma[-1])}")
        V = ls.V(side, g)
        omega, S = power_spectrum(V, n_segments=args.segments)
        alpha = spectral_exponent(omega, S)
        rep = weak_stationarity_report(V)
        cols.append(S)
        names.append(f"S_V{g}")
        notes.append(f"depth {g} alpha {alpha!r} stationarity_flag {rep.flagged}")
    with _output(args.out) as out:
        lio.write_columns(out, ["omega"] + names, omega, *cols, comments=notes)


def cmd_corr(args):
    ls, _ = _layers(args)
    k = args.k if args.k is not None else CORRELATION_K
    cols, names, notes = [], [], []
    for side in Side:
        per = corr_curve(ls.velocity, ls.dn[side], k=k, gamma=ls.gamma, side=side)
        cum = corr_curve(ls.velocity, ls.dn[side], k=k, gamma=ls.gamma, side=side,
                         mode="cumulative")
        try:
            gc = find_gamma_c(per, cum)
            notes.append(f"{side} gamma_c {gc.gamma_c} sign_change {gc.sign_change} "
                         f"agreement {gc.method_agreement} orientation {gc.orientation}")
        except NoSignChange as e:
            notes.append(f"{side} gamma_c {e.peak} sign_change none")
        cum_full = np.full(per.gamma.size, np.nan)
        cum_full[np.searchsorted(per.gamma, cum.gamma)] = cum.corr
        cols += [per.corr, cum_full]
        names += [f"corr_{side}", f"cum_{side}"]
        notes.append(f"{side} blocks {per.n_blocks} k {k} missing {per.missing.tolist()}")
    with _output(args.out) as out:
        lio.write_columns(out, ["gamma"] + names, ls.gamma, *cols, comments=notes)


def cmd_mfp(args):
    ls, _ = _layers(args)
    params = _params(args, "mfp")
    inner = inner_series(ls, params)
    k, S = params.k, params.S
    series = {
        "minus": (inner.v_minus, inner.f_minus),
        "plus": (inner.v_plus, inner.f_plus),
        "sym": (inner.v, inner.f_i),
    }
    cols, names, notes = [], [], []
    for name, (v, f) in series.items():
        vb = coarse_grain(v, k).values
        fb = coarse_grain(f.astype(float), k).values
        ok = np.isfinite(vb)
        vb, fb = vb[ok][-S:], fb[ok][-S:]
        if vb.size < S:
            raise InsufficientData(f"{vb.size} valid blocks for {name} (< {S})")
        d = mean_free_path_diagnostics(vb, fb)
        L = d["L"] if name == "sym" else abs(d["L"])
        notes.append(f"L_{name} {L!r} slope {d['L']!r} intercept_fit {d['intercept']!r}")
        cols += [fb, vb]
        names += [f"f_{name}", f"v_{name}"]
    with _output(args.out) as out:
        lio.write_columns(out, names, *cols, comments=[f"k {k} S {S}"] + notes)


def cmd_knudsen(args):
    ind, params, spec = _indicators(args, "knudsen")
    theta, _ = (args.theta_lambda, None) if args.theta_lambda is not None else (None, None)
    recs = ind.records(theta, args.theta_kn)
    with _output(args.out) as out:
        lio.write_indicator_jsonl(recs, out, params.fingerprint(), spec.symbol)


def cmd_kappa(args):
    ind, params, _ = _indicators(args, "kappa")
    fit = fit_kappa(ind.Kn_sym, ind.I_bar_minus, ind.I_bar_plus)
    per = fit_kappa((ind.Kn_minus, ind.Kn_plus), ind.I_bar_minus, ind.I_bar_plus,
                    mode="per_side")
    ibar = (ind.I_bar_minus + ind.I_bar_plus) / 2
    notes = [f"kappa {fit.kappa!r} r2 {fit.r2!r} bins {fit.n_bins} samples {fit.n_samples}",
             f"kappa_minus {per[0].kappa!r} kappa_plus {per[1].kappa!r}",
             f"continuum_population {fit.kappa / args.theta_kn!r}"]
    with _output(args.out) as out:
        lio.write_columns(out, ("tick", "I_bar", "inv_I_bar", "Kn_sym"), ind.tick, ibar,
                          1.0 / ibar, ind.Kn_sym, comments=notes)


def cmd_rates(args):
    ind, params, _ = _indicators(args, "rates")
    q = joint_threshold_quantile(ind.lambda_minus, ind.lambda_plus, args.p)
    notes = [f"theta {q.theta!r} p {args.p!r} fraction {q.fraction!r}",
             f"cross_corr {q.cross_corr!r} n {q.n}"]
    with _output(args.out) as out:
        lio.write_columns(out, ("tick", "lambda_minus", "lambda_plus"), ind.tick,
                          ind.lambda_minus, ind.lambda_plus, comments=notes)


def cmd_detect(args):
    ind, params, _ = _indicators(args, "detect")
    theta, q = _theta_lambda(args, ind)
    reg = detect_regimes(ind, theta, args.theta_kn)
    notes = [f"theta_lambda {theta!r} ({'quantile' if q is not None else 'given'})",
             f"theta_kn {args.theta_kn!r} k {params.k} S {params.S}"]
    rows = [(str(side), a, b) for side in Side for a, b in reg.intervals(side)]
    for side in Side:
        notes.append(f"{side} intervals {len(reg.intervals(side))}")
    with _output(args.out) as out:
        for c in notes:
            out.write(f"# {c}\n")
        out.write("# side first_tick last_tick\n")
        for side, a, b in rows:
            out.write(f"{side} {a} {b}\n")


def cmd_profile(args):
    ls, _ = _layers(args)
    want = _ints(args.ticks)
    cols, names = [], []
    for t in want:
        hit = np.flatnonzero(ls.ticks == t)
        if hit.size == 0:
            raise InputError(f"tick {t} not in 1..{int(ls.ticks[-1]) if len(ls) else 0}")
        i = int(hit[0])
        for side in Side:
            n = ls.n[side][i, ls.col(0):]
            cols += [n, np.cumsum(n)]
            names += [f"N_{side}_{t}", f"V_{side}_{t}"]
    g = ls.gamma[ls.col(0):]
    with _output(args.out) as out:
        lio.write_columns(out, ["gamma"] + names, g, *cols)


def cmd_synth(args):
    kw = dict(seed=args.seed, scenario=args.scenario)
    if args.n_events is not None:
        kw["n_events"] = args.n_events
    if args.gamma_c is not None:
        kw["planted_gamma_c"] = args.gamma_c
    if args.scenario in ("flash_crash", "one_sided_halt"):
        cfg = flash_crash_config(**kw)
    elif args.scenario == "density_sweep":
        cfg = density_sweep_config(**kw)
    else:
        cfg = SynthConfig(**kw)
    log = generate(cfg)
    with _output(args.out) as out:
        lio.write_event_log(log, out)


COMMANDS = {
    "replay": cmd_replay, "spectrum": cmd_spectrum, "corr": cmd_corr, "mfp": cmd_mfp,
    "knudsen": cmd_knudsen, "kappa": cmd_kappa, "rates": cmd_rates, "detect": cmd_detect,
    "profile": cmd_profile, "synth": cmd_synth,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        COMMANDS[args.command](args)
    except BrokenPipeError:
        # reader went away (e.g. piped into head); not an error of ours
        sys.stderr.close()
        return EXIT_OK
    except InsufficientData as e:
        sys.stderr.write(f"error: insufficient data: {e}\n")
        return EXIT_DATA
    except (InputError, ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
