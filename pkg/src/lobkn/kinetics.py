"""Inner-layer flows, mean free path, Knudsen numbers, depletion rates, detector.

Conventions
-----------
* Time unit is one transaction tick; all rates are per tick.
* ``f`` is the net change of resting volume at depths 0..gamma_c on a side,
  ``I`` the volume resting there, both measured against the previous best.
* Per-side velocities are best-price increments, ``v_minus = x^-(t) - x^-(t-1)``
  and likewise for plus, so ``(v_minus + v_plus) / 2`` is the mid velocity.
* Rolling quantities at tick t use the ``S`` blocks of ``k`` ticks that end at
  t, i.e. the window ``[t - S*k + 1, t]``.
* A Knudsen number is ``inf`` when the side is empty at t or nothing rested in
  its inner layer over the window; it is NaN when the mean free path could not
  be estimated.
"""

from __future__ import annotations

import hashlib
import json
import math
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass, field, fields
from typing import NamedTuple, Optional

import numpy as np

from .book import BookState, Side, Snapshot
from .errors import ConfigInvalid, DegenerateRegressor, EmptyInnerLayer, InsufficientData
from .layers import LayerSeries, layer_delta, layer_frames, layer_profile, reference_best
from .series import CoarseSeries

MINUS_REGIME = "minus_regime"
PLUS_REGIME = "plus_regime"
ONE_SIDED = "one_sided_book"


@dataclass(frozen=True)
class KineticParams:
    gamma_c_minus: int = 18
    gamma_c_plus: int = 18
    k: int = 4
    S: int = 100
    theta_kn: float = 0.1
    theta_lambda_quantile: float = 0.05

    def __post_init__(self):
        if min(self.gamma_c_minus, self.gamma_c_plus) < 1:
            raise ConfigInvalid("gamma_c must be >= 1")
        if self.k < 1:
            raise ConfigInvalid("k must be >= 1")
        if self.S < 10:
            raise ConfigInvalid("S must be >= 10")
        if not 0 < self.theta_lambda_quantile < 1:
            raise ConfigInvalid("theta_lambda_quantile must lie in (0, 1)")

    def gamma_c(self, side: Side) -> int:
        return self.gamma_c_minus if side is Side.MINUS else self.gamma_c_plus

    def fingerprint(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


# paper settings for the three stages
CORRELATION_K = 20
KNUDSEN_PARAMS = dict(k=4, S=100)
DETECTOR_PARAMS = dict(k=2, S=100)


@dataclass(frozen=True)
class InnerLayerSample:
    tick: int
    f_minus: int
    f_plus: int
    c_minus: int
    c_plus: int
    a_minus: int
    a_plus: int
    I_minus: int
    I_plus: int
    v: float
    v_minus: float = math.nan
    v_plus: float = math.nan
    one_sided: frozenset = frozenset()

    @property
    def f_i(self) -> int:
        """Combined flow f^- - f^+, the regressor for the mid velocity."""
        return self.f_minus - self.f_plus


def _diff(a, b):
    return math.nan if a is None or b is None else float(a - b)


def inner_flow(prev: BookState, curr: BookState, params: KineticParams) -> InnerLayerSample:
    out = {}
    for side in Side:
        g = params.gamma_c(side)
        d = layer_delta(prev, curr, side, (0, g))
        prof = layer_profile(curr, side, reference_best(prev, curr, side), g, 0)
        out[side] = (int(d.delta_n_gamma.sum()), int(d.adds.sum()), int(d.removes.sum()),
                     int(prof.n_gamma.sum()))
    vm = _diff(curr.x_minus, prev.x_minus)
    vp = _diff(curr.x_plus, prev.x_plus)
    empty = frozenset(s for s in Side if curr.best(s) is None)
    (fm, cm, am, im), (fp, cp, ap, ip) = out[Side.MINUS], out[Side.PLUS]
    return InnerLayerSample(curr.tick_index, fm, fp, cm, cp, am, ap, im, ip,
                            (vm + vp) / 2, vm, vp, empty)


@dataclass
class InnerSeries:
    """Columnar per-tick inner-layer samples (one row per snapshot pair)."""

    ticks: np.ndarray
    mid: np.ndarray
    v: np.ndarray
    v_minus: np.ndarray
    v_plus: np.ndarray
    f_minus: np.ndarray
    f_plus: np.ndarray
    c_minus: np.ndarray
    c_plus: np.ndarray
    a_minus: np.ndarray
    a_plus: np.ndarray
    I_minus: np.ndarray
    I_plus: np.ndarray
    empty_minus: np.ndarray
    empty_plus: np.ndarray

    def __len__(self):
        return self.ticks.size

    def side(self, side: Side):
        """(v_j, f_j, I_j, empty_j) arrays for one side."""
        if side is Side.MINUS:
            return self.v_minus, self.f_minus, self.I_minus, self.empty_minus
        return self.v_plus, self.f_plus, self.I_plus, self.empty_plus

    @property
    def f_i(self) -> np.ndarray:
        return self.f_minus - self.f_plus

    def sample(self, i: int) -> InnerLayerSample:
        empty = frozenset(s for s, e in ((Side.MINUS, self.empty_minus[i]),
                                         (Side.PLUS, self.empty_plus[i])) if e)
        return InnerLayerSample(
            int(self.ticks[i]), int(self.f_minus[i]), int(self.f_plus[i]),
            int(self.c_minus[i]), int(self.c_plus[i]), int(self.a_minus[i]),
            int(self.a_plus[i]), int(self.I_minus[i]), int(self.I_plus[i]),
            float(self.v[i]), float(self.v_minus[i]), float(self.v_plus[i]), empty)

    @classmethod
    def from_arrays(cls, **cols) -> "InnerSeries":
        """Build from raw arrays, e.g. to drive the estimators with synthetic flows."""
        n = len(next(iter(cols.values())))
        zeros = np.zeros(n, dtype=np.int64)
        nan = np.full(n, np.nan)
        base = dict(ticks=np.arange(1, n + 1), mid=nan, v=nan, v_minus=nan, v_plus=nan,
                    f_minus=zeros, f_plus=zeros, c_minus=zeros, c_plus=zeros,
                    a_minus=zeros, a_plus=zeros, I_minus=zeros, I_plus=zeros,
                    empty_minus=np.zeros(n, bool), empty_plus=np.zeros(n, bool))
        base.update({k: np.asarray(v) for k, v in cols.items()})
        return cls(**base)


def inner_series(source, params: KineticParams) -> InnerSeries:
    """Inner-layer samples for every snapshot pair of a replay.

    ``source`` is an iterable of snapshots or an already collected
    :class:`LayerSeries` covering depths 0..max(gamma_c).
    """
    gm, gp = params.gamma_c_minus, params.gamma_c_plus
    if isinstance(source, LayerSeries):
        z = source.col(0)
        nm, np_ = source.n[Side.MINUS], source.n[Side.PLUS]
        dm, dp = source.dn[Side.MINUS], source.dn[Side.PLUS]
        xm, xp = source.x_minus, source.x_plus
        ticks, mid, v = source.ticks, source.mid, source.velocity
        vm, vp = xm - source.prev_x_minus, xp - source.prev_x_plus
    else:
        g = max(gm, gp)
        cols = {k: [] for k in ("t", "xm", "xp", "pxm", "pxp", "nm", "np", "dm", "dp")}
        for fr in layer_frames(source, 0, g):
            cols["t"].append(fr.tick)
            cols["xm"].append(fr.x_minus)
            cols["xp"].append(fr.x_plus)
            cols["pxm"].append(fr.prev_x_minus)
            cols["pxp"].append(fr.prev_x_plus)
            cols["nm"].append(fr.n_minus)
            cols["np"].append(fr.n_plus)
            cols["dm"].append(fr.dn_minus)
            cols["dp"].append(fr.dn_plus)
        def fl(a):
            return np.array([np.nan if x is None else x for x in a], dtype=float)
        def mat(a):
            return np.array(a, dtype=np.int64).reshape(-1, g + 1)
        ticks = np.array(cols["t"], dtype=np.int64)
        xm, xp, pxm, pxp = fl(cols["xm"]), fl(cols["xp"]), fl(cols["pxm"]), fl(cols["pxp"])
        mid = (xm + xp) / 2
        v = mid - (pxm + pxp) / 2
        vm, vp = xm - pxm, xp - pxp
        nm, np_, dm, dp = mat(cols["nm"]), mat(cols["np"]), mat(cols["dm"]), mat(cols["dp"])
        z = 0
    dm_in, dp_in = dm[:, z : z + gm + 1], dp[:, z : z + gp + 1]
    return InnerSeries(
        ticks, mid, v, vm, vp,
        dm_in.sum(axis=1).astype(np.int64), dp_in.sum(axis=1).astype(np.int64),
        np.maximum(dm_in, 0).sum(axis=1).astype(np.int64),
        np.maximum(dp_in, 0).sum(axis=1).astype(np.int64),
        np.maximum(-dm_in, 0).sum(axis=1).astype(np.int64),
        np.maximum(-dp_in, 0).sum(axis=1).astype(np.int64),
        nm[:, z : z + gm + 1].sum(axis=1).astype(np.int64),
        np_[:, z : z + gp + 1].sum(axis=1).astype(np.int64),
        np.isnan(xm), np.isnan(xp),
    )


# -- mean free path ------------------------------------------------------------


def _values(x):
    return x.values if isinstance(x, CoarseSeries) else np.asarray(x, dtype=float)


def fit_mean_free_path(v_blocks, f_blocks, S: Optional[int] = None) -> float:
    """Zero-intercept least-squares slope of v on f over the last ``S`` blocks.

    Units are ticks per volume unit. Raises :class:`DegenerateRegressor` when
    every flow in the window is zero.
    """
    v, f = _values(v_blocks), _values(f_blocks)
    if v.size != f.size:
        raise ValueError("v and f block series must be aligned")
    if S is not None:
        if v.size < S:
            raise InsufficientData(f"need {S} blocks, have {v.size}")
        v, f = v[-S:], f[-S:]
    sff = float(np.dot(f, f))
    if sff == 0:
        raise DegenerateRegressor("all flows in the window are zero")
    return float(np.dot(f, v)) / sff


def mean_free_path_diagnostics(v_blocks, f_blocks, S: Optional[int] = None) -> dict:
    """Zero-intercept slope next to the ordinary slope/intercept of the same window."""
    v, f = _values(v_blocks), _values(f_blocks)
    if S is not None:
        v, f = v[-S:], f[-S:]
    L = fit_mean_free_path(v, f)
    slope, intercept = (np.polyfit(f, v, 1) if np.ptp(f) > 0 else (math.nan, math.nan))
    resid = v - L * f
    return dict(L=L, slope_with_intercept=float(slope), intercept=float(intercept),
                n=int(v.size), residual_dot_f=float(np.dot(resid, f)))


def knudsen(L_minus: float, L_plus: float, params: KineticParams,
            empty_minus: bool = False, empty_plus: bool = False):
    """(Kn_minus, Kn_plus, Kn_sym). Empty sides give inf, missing L gives NaN."""
    kn_m = math.inf if empty_minus else L_minus / params.gamma_c_minus
    kn_p = math.inf if empty_plus else L_plus / params.gamma_c_plus
    return kn_m, kn_p, _sym(kn_m, kn_p)


def _sym(a, b):
    if math.isinf(a) or math.isinf(b):
        return math.inf
    return (a + b) / 2


# -- depletion rates -------------------------------------------------------------


def depletion_rate(f_bar: float, i_bar: float) -> float:
    """Relative rate of change of the inner-layer population, per tick."""
    if not i_bar > 0:
        raise EmptyInnerLayer("no particles in the inner layer over the window")
    return f_bar / i_bar


def halving_time(lam: float) -> Optional[float]:
    """Ticks needed to halve the inner-layer population at rate ``lam`` (None if lam >= 0)."""
    if lam >= 0:
        return None
    return math.log(2) / abs(lam)


class JointQuantile(NamedTuple):
    theta: float
    fraction: float  # realized fraction of pairs with both rates below theta
    cross_corr: float
    n: int


def joint_threshold_quantile(lam_minus, lam_plus, p: float = 0.05,
                             min_samples: int = 1000) -> JointQuantile:
    """Smallest sample value theta with P(lam_minus < theta and lam_plus < theta) >= p."""
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    a = np.asarray(getattr(lam_minus, "values", lam_minus), dtype=float)
    b = np.asarray(getattr(lam_plus, "values", lam_plus), dtype=float)
    ok = np.isfinite(a) & np.isfinite(b)
    a, b = a[ok], b[ok]
    n = a.size
    if n < min_samples:
        raise InsufficientData(f"{n} paired rates (< {min_samples})")
    # both below theta  <=>  max(a, b) < theta
    m = np.sort(np.maximum(a, b))
    grid = np.unique(m)
    below = np.searchsorted(m, grid, side="left")
    hit = np.flatnonzero(below >= p * n)
    theta = float(grid[hit[0]]) if hit.size else float(np.nextafter(m[-1], np.inf))
    frac = float(np.count_nonzero(m < theta)) / n
    cc = float(np.corrcoef(a, b)[0, 1]) if np.std(a) > 0 and np.std(b) > 0 else math.nan
    return JointQuantile(theta, frac, cc, n)


# -- rolling indicator fold --------------------------------------------------------


def _block_sums(x: np.ndarray, k: int) -> np.ndarray:
    """Sum of x over the k ticks ending at each tick (NaN before the first full block)."""
    out = np.full(x.size, np.nan)
    if x.size >= k:
        c = np.concatenate(([0.0], np.cumsum(x, dtype=float)))
        out[k - 1 :] = c[k:] - c[:-k]
    return out


def _strided_sums(p: np.ndarray, k: int, S: int) -> np.ndarray:
    """Sum of p over ticks t, t-k, ..., t-(S-1)k (NaN where incomplete)."""
    out = np.full(p.size, np.nan)
    for r in range(k):
        idx = np.arange(r, p.size, k)
        if idx.size < S:
            continue
        c = np.concatenate(([0.0], np.cumsum(p[idx])))
        out[idx[S - 1 :]] = c[S:] - c[:-S]
    return out


def _rolling_sum(x: np.ndarray, w: int) -> np.ndarray:
    out = np.full(x.size, np.nan)
    if x.size >= w:
        c = np.concatenate(([0.0], np.cumsum(x, dtype=float)))
        out[w - 1 :] = c[w:] - c[:-w]
    return out


def _rolling_slope(v: np.ndarray, f: np.ndarray, k: int, S: int):
    """Zero-intercept slope of block-summed v on f over S blocks ending at each tick.

    Blocks containing an undefined velocity are dropped; fewer than S/2
    valid blocks leaves the slope undefined. Returns (slope, n_valid).
    """
    bad = ~np.isfinite(v)
    bv = _block_sums(np.where(bad, 0.0, v), k)
    bf = _block_sums(f.astype(float), k)
    nbad = _block_sums(bad.astype(float), k)
    valid = (nbad == 0)
    pv = np.where(valid, bv * bf, 0.0)
    pf = np.where(valid, bf * bf, 0.0)
    sfv = _strided_sums(pv, k, S)
    sff = _strided_sums(pf, k, S)
    nvalid = _strided_sums(valid.astype(float), k, S)
    with np.errstate(invalid="ignore", divide="ignore"):
        slope = np.where((sff > 0) & (nvalid >= S / 2), sfv / np.where(sff > 0, sff, 1), np.nan)
    return slope, nvalid


@dataclass(frozen=True)
class IndicatorRecord:
    tick: int
    mid: float
    L_minus: float
    L_plus: float
    L_sym: float
    Kn_minus: float
    Kn_plus: float
    Kn_sym: float
    I_bar_minus: float
    I_bar_plus: float
    f_bar_minus: float
    f_bar_plus: float
    lambda_minus: float
    lambda_plus: float
    flags: frozenset = field(default_factory=frozenset)

    def kn(self, side: Side) -> float:
        return self.Kn_minus if side is Side.MINUS else self.Kn_plus

    def lam(self, side: Side) -> float:
        return self.lambda_minus if side is Side.MINUS else self.lambda_plus


@dataclass
class Indicators:
    """Columnar indicator series, one row per tick with a full window."""

    params: KineticParams
    tick: np.ndarray
    mid: np.ndarray
    L_minus: np.ndarray
    L_plus: np.ndarray
    L_sym: np.ndarray
    Kn_minus: np.ndarray
    Kn_plus: np.ndarray
    Kn_sym: np.ndarray
    I_bar_minus: np.ndarray
    I_bar_plus: np.ndarray
    f_bar_minus: np.ndarray
    f_bar_plus: np.ndarray
    lambda_minus: np.ndarray
    lambda_plus: np.ndarray
    empty_minus: np.ndarray
    empty_plus: np.ndarray

    def __len__(self):
        return self.tick.size

    def kn(self, side: Side) -> np.ndarray:
        return self.Kn_minus if side is Side.MINUS else self.Kn_plus

    def lam(self, side: Side) -> np.ndarray:
        return self.lambda_minus if side is Side.MINUS else self.lambda_plus

    def i_bar(self, side: Side) -> np.ndarray:
        return self.I_bar_minus if side is Side.MINUS else self.I_bar_plus

    def records(self, theta_lambda: Optional[float] = None,
                theta_kn: Optional[float] = None) -> list[IndicatorRecord]:
        if theta_lambda is not None:
            flags_m, flags_p = _regime_masks(self, theta_lambda,
                                             self.params.theta_kn if theta_kn is None else theta_kn)
        out = []
        names = [f.name for f in fields(IndicatorRecord) if f.name != "flags"]
        cols = [getattr(self, n) for n in names]
        for i in range(len(self)):
            flags = set()
            if self.empty_minus[i] or self.empty_plus[i]:
                flags.add(ONE_SIDED)
            if theta_lambda is not None:
                if flags_m[i]:
                    flags.add(MINUS_REGIME)
                if flags_p[i]:
                    flags.add(PLUS_REGIME)
            vals = [int(c[i]) if n == "tick" else float(c[i]) for n, c in zip(names, cols)]
            out.append(IndicatorRecord(*vals, flags=frozenset(flags)))
        return out


def indicators(inner: InnerSeries, params: KineticParams) -> Indicators:
    """Rolling L, Kn, inner-layer means and depletion rates at every tick.

    Rows start at the first tick whose window of ``S*k`` ticks is complete.
    """
    k, S = params.k, params.S
    w = S * k
    if len(inner) < w:
        raise InsufficientData(f"{len(inner)} ticks, need {w} for one window")
    out = {}
    for side, name in ((Side.MINUS, "minus"), (Side.PLUS, "plus")):
        v, f, I, empty = inner.side(side)
        slope, _ = _rolling_slope(v, f, k, S)
        L = np.abs(slope)
        sum_i = _rolling_sum(I.astype(float), w)
        sum_f = _rolling_sum(f.astype(float), w)
        with np.errstate(invalid="ignore", divide="ignore"):
            lam = np.where(sum_i > 0, sum_f / np.where(sum_i > 0, sum_i, 1), np.nan)
        kn = L / params.gamma_c(side)
        kn = np.where(empty | (sum_i == 0), np.inf, kn)
        out[name] = (L, kn, sum_i / w, sum_f / w, lam)
    L_sym, _ = _rolling_slope(inner.v, inner.f_i, k, S)
    kn_m, kn_p = out["minus"][1], out["plus"][1]
    with np.errstate(invalid="ignore"):
        kn_sym = np.where(np.isinf(kn_m) | np.isinf(kn_p), np.inf, (kn_m + kn_p) / 2)
    s = slice(w - 1, None)
    return Indicators(
        params, inner.ticks[s], inner.mid[s],
        out["minus"][0][s], out["plus"][0][s], L_sym[s],
        kn_m[s], kn_p[s], kn_sym[s],
        out["minus"][2][s], out["plus"][2][s], out["minus"][3][s], out["plus"][3][s],
        out["minus"][4][s], out["plus"][4][s],
        inner.empty_minus[s], inner.empty_plus[s],
    )


# -- inverse-density law ---------------------------------------------------------------


class KappaFit(NamedTuple):
    kappa: float
    r2: float
    n_bins: int
    n_samples: int


def _kappa_binned(kn: np.ndarray, ibar: np.ndarray, min_count: int, min_samples: int) -> KappaFit:
    kn = np.asarray(kn, dtype=float)
    ibar = np.asarray(ibar, dtype=float)
    ok = np.isfinite(kn) & np.isfinite(ibar) & (ibar > 0)
    kn, ibar = kn[ok], ibar[ok]
    if kn.size < min_samples:
        raise InsufficientData(f"{kn.size} usable samples (< {min_samples})")
    bins = np.floor(ibar).astype(np.int64)
    xs, ys = [], []
    order = np.argsort(bins, kind="stable")
    b_sorted = bins[order]
    starts = np.flatnonzero(np.r_[True, b_sorted[1:] != b_sorted[:-1]])
    for lo, hi in zip(starts, np.r_[starts[1:], b_sorted.size]):
        if hi - lo < min_count:
            continue
        sel = order[lo:hi]
        # median of 1/I keeps exact inverse data exact under even-count medians
        xs.append(np.median(1.0 / ibar[sel]))
        ys.append(np.median(kn[sel]))
    if len(xs) < 2:
        raise InsufficientData("fewer than 2 populated density bins")
    x, y = np.array(xs), np.array(ys)
    kappa = float(np.dot(x, y) / np.dot(x, x))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum((y - kappa * x) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res == 0 else 0.0)
    return KappaFit(kappa, r2, len(xs), int(kn.size))


def fit_kappa(kn, i_bar_minus, i_bar_plus, mode: str = "symmetric",
              min_count: int = 5, min_samples: int = 100):
    """Fit Kn = kappa / <I> through the origin on per-bin medians.

    ``mode="symmetric"``: ``kn`` is the symmetric Knudsen series, regressed on
    the two-side mean population. ``mode="per_side"``: ``kn`` is a pair
    ``(kn_minus, kn_plus)`` and a :class:`KappaFit` is returned per side.
    """
    if mode == "symmetric":
        ibar = (np.asarray(i_bar_minus, float) + np.asarray(i_bar_plus, float)) / 2
        return _kappa_binned(kn, ibar, min_count, min_samples)
    if mode == "per_side":
        kn_m, kn_p = kn
        return (_kappa_binned(kn_m, i_bar_minus, min_count, min_samples),
                _kappa_binned(kn_p, i_bar_plus, min_count, min_samples))
    raise ValueError(f"unknown mode {mode!r}")


def continuum_threshold(kappa: float, theta_kn: float = 0.1) -> float:
    """Minimum mean inner-layer population per side for Kn < theta_kn."""
    return kappa / theta_kn


# -- detector -----------------------------------------------------------------------


def _regime_masks(ind: Indicators, theta_lambda: float, theta_kn: float):
    masks = []
    for side in Side:
        lam, kn = ind.lam(side), ind.kn(side)
        with np.errstate(invalid="ignore"):
            # NaN compares False: undefined rates or Kn never fire
            masks.append((lam < theta_lambda) & (kn > theta_kn))
    return masks


def _intervals(ticks: np.ndarray, mask: np.ndarray) -> list[tuple[int, int]]:
    out = []
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        return out
    breaks = np.flatnonzero(np.diff(idx) > 1)
    for lo, hi in zip(np.r_[0, breaks + 1], np.r_[breaks, idx.size - 1]):
        out.append((int(ticks[idx[lo]]), int(ticks[idx[hi]])))
    return out


@dataclass
class Regimes:
    ticks: np.ndarray
    minus: np.ndarray  # bool per tick
    plus: np.ndarray
    theta_lambda: float
    theta_kn: float

    def mask(self, side: Side) -> np.ndarray:
        return self.minus if side is Side.MINUS else self.plus

    def intervals(self, side: Side) -> list[tuple[int, int]]:
        """Contiguous flagged ticks merged into inclusive (first, last) intervals."""
        return _intervals(self.ticks, self.mask(side))


def detect_regimes(records, theta_lambda: float, theta_kn: float = 0.1) -> Regimes:
    """Flag side j at tick t iff lambda_j < theta_lambda and Kn_j > theta_kn.

    An infinite Knudsen number exceeds any threshold; an undefined rate never
    fires.
    """
    if isinstance(records, Indicators):
        m, p = _regime_masks(records, theta_lambda, theta_kn)
        return Regimes(records.tick, m, p, theta_lambda, theta_kn)
    recs = list(records)
    ticks = np.array([r.tick for r in recs], dtype=np.int64)
    masks = []
    for side in Side:
        lam = np.array([r.lam(side) for r in recs], dtype=float)
        kn = np.array([r.kn(side) for r in recs], dtype=float)
        with np.errstate(invalid="ignore"):
            masks.append((lam < theta_lambda) & (kn > theta_kn))
    return Regimes(ticks, masks[0], masks[1], theta_lambda, theta_kn)
