"""Depth-axis view of the book and the velocity/order-flow correlation analysis.

Depth is measured in ticks from the best price of the *previous* transaction
snapshot on the same side, positive away from the spread:

    gamma = sign(side) * (Q - x_side(t - 1)),   sign(minus) = -1, sign(plus) = +1

so a new bid placed one tick above the previous best bid sits at gamma = -1.
Each depth corresponds to exactly one price, hence per-depth adds/removes are
simply the positive/negative parts of the per-price volume change.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .book import BookState, Side, Snapshot
from .errors import DegenerateVariance, InsufficientData, NoPeak, NoSignChange
from .series import TickSeries

GAMMA_MIN = -10
GAMMA_MAX = 100
MIN_BLOCKS = 30


def depth_of(Q: int, side: Side, ref_best: int) -> int:
    return side.sign * (Q - ref_best)


def _depth_window(levels, side: Side, ref: Optional[int], gmin: int, gmax: int) -> np.ndarray:
    """Volumes ordered by depth gmin..gmax against ``ref`` (zeros if ref is None)."""
    if ref is None:
        return np.zeros(gmax - gmin + 1, dtype=np.int64)
    if side is Side.MINUS:
        return levels.window(ref - gmax, ref - gmin)[::-1]
    return levels.window(ref + gmin, ref + gmax)


@dataclass(frozen=True)
class DepthProfile:
    side: Side
    ref_best: Optional[int]
    gamma: np.ndarray
    n_gamma: np.ndarray
    tick: int = 0

    @property
    def v_gamma(self) -> np.ndarray:
        """Cumulative volume from depth 0 up to each depth >= 0."""
        return np.cumsum(self.n_gamma[self.gamma >= 0])

    def V(self, g: int) -> int:
        return int(self.v_gamma[g])


@dataclass(frozen=True)
class LayerDelta:
    side: Side
    gamma: np.ndarray
    delta_n_gamma: np.ndarray
    adds: np.ndarray
    removes: np.ndarray

    @property
    def delta_v_gamma(self) -> np.ndarray:
        """Change of the cumulative volume, summed from depth 0 (negative depths excluded)."""
        return np.cumsum(self.delta_n_gamma[self.gamma >= 0])


def layer_profile(state: BookState, side: Side, ref_best: Optional[int],
                  gamma_max: int = GAMMA_MAX, gamma_min: int = GAMMA_MIN) -> DepthProfile:
    if gamma_max < 0:
        raise ValueError("gamma_max must be >= 0")
    n = _depth_window(state.levels(side), side, ref_best, gamma_min, gamma_max)
    return DepthProfile(side, ref_best, np.arange(gamma_min, gamma_max + 1), n, state.tick_index)


def reference_best(prev: BookState, curr: BookState, side: Side) -> Optional[int]:
    """Best price that depths are measured against for the pair (prev, curr)."""
    ref = prev.best(side)
    return curr.best(side) if ref is None else ref


def layer_delta(prev: BookState, curr: BookState, side: Side,
                gamma_range: tuple[int, int] = (GAMMA_MIN, GAMMA_MAX)) -> LayerDelta:
    gmin, gmax = gamma_range
    ref = reference_best(prev, curr, side)
    d = (_depth_window(curr.levels(side), side, ref, gmin, gmax)
         - _depth_window(prev.levels(side), side, ref, gmin, gmax))
    return LayerDelta(side, np.arange(gmin, gmax + 1), d, np.maximum(d, 0), np.maximum(-d, 0))


class LayerFrame(NamedTuple):
    """Everything the downstream estimators need from one snapshot pair."""

    tick: int
    timestamp_ms: int
    x_minus: Optional[int]
    x_plus: Optional[int]
    prev_x_minus: Optional[int]
    prev_x_plus: Optional[int]
    n_minus: np.ndarray  # N_gamma(gamma, t) against the previous best
    n_plus: np.ndarray
    dn_minus: np.ndarray  # Delta N_gamma(gamma, t)
    dn_plus: np.ndarray

    @property
    def mid(self) -> float:
        if self.x_minus is None or self.x_plus is None:
            return np.nan
        return (self.x_minus + self.x_plus) / 2

    @property
    def prev_mid(self) -> float:
        if self.prev_x_minus is None or self.prev_x_plus is None:
            return np.nan
        return (self.prev_x_minus + self.prev_x_plus) / 2


def layer_frames(snapshots: Iterable[Snapshot], gamma_min: int = GAMMA_MIN,
                 gamma_max: int = GAMMA_MAX) -> Iterator[LayerFrame]:
    """Stream one :class:`LayerFrame` per consecutive snapshot pair."""
    prev = None
    for snap in snapshots:
        curr = snap.state if isinstance(snap, Snapshot) else snap
        if prev is not None:
            out = {}
            for side in Side:
                ref = reference_best(prev, curr, side)
                now = _depth_window(curr.levels(side), side, ref, gamma_min, gamma_max)
                before = _depth_window(prev.levels(side), side, ref, gamma_min, gamma_max)
                out[side] = (now, now - before)
            yield LayerFrame(
                curr.tick_index, curr.last_transaction_ts,
                curr.x_minus, curr.x_plus, prev.x_minus, prev.x_plus,
                out[Side.MINUS][0], out[Side.PLUS][0], out[Side.MINUS][1], out[Side.PLUS][1],
            )
        prev = curr


@dataclass
class LayerSeries:
    """Per-tick depth arrays collected from a replay (rows = ticks, cols = depths)."""

    gamma: np.ndarray
    ticks: np.ndarray
    timestamps: np.ndarray
    x_minus: np.ndarray  # float, NaN when the side is empty
    x_plus: np.ndarray
    prev_x_minus: np.ndarray
    prev_x_plus: np.ndarray
    mid: np.ndarray
    velocity: np.ndarray  # mid(t) - mid(t-1)
    n: dict  # Side -> (T, G) int array
    dn: dict

    def __len__(self):
        return self.ticks.size

    def col(self, g: int) -> int:
        return int(g - self.gamma[0])

    def V(self, side: Side, g: int) -> np.ndarray:
        """V_gamma(g, t) for every tick."""
        z = self.col(0)
        return self.n[side][:, z : self.col(g) + 1].sum(axis=1)

    def delta_v(self, side: Side) -> np.ndarray:
        """Delta V_gamma for depths 0..gamma_max, shape (T, gamma_max + 1)."""
        return np.cumsum(self.dn[side][:, self.col(0):], axis=1)

    def deltas(self, side: Side) -> list[LayerDelta]:
        d = self.dn[side]
        return [LayerDelta(side, self.gamma, r, np.maximum(r, 0), np.maximum(-r, 0)) for r in d]


def collect_layers(snapshots: Iterable[Snapshot], gamma_min: int = GAMMA_MIN,
                   gamma_max: int = GAMMA_MAX, dtype=np.int32) -> LayerSeries:
    rows = {s: ([], []) for s in Side}
    ticks, ts, xm, xp, pxm, pxp = [], [], [], [], [], []
    for fr in layer_frames(snapshots, gamma_min, gamma_max):
        ticks.append(fr.tick)
        ts.append(fr.timestamp_ms)
        xm.append(np.nan if fr.x_minus is None else fr.x_minus)
        xp.append(np.nan if fr.x_plus is None else fr.x_plus)
        pxm.append(np.nan if fr.prev_x_minus is None else fr.prev_x_minus)
        pxp.append(np.nan if fr.prev_x_plus is None else fr.prev_x_plus)
        rows[Side.MINUS][0].append(fr.n_minus)
        rows[Side.MINUS][1].append(fr.dn_minus)
        rows[Side.PLUS][0].append(fr.n_plus)
        rows[Side.PLUS][1].append(fr.dn_plus)
    G = gamma_max - gamma_min + 1
    def stack(r):
        return np.array(r, dtype=dtype).reshape(-1, G)
    xm, xp = np.array(xm, dtype=float), np.array(xp, dtype=float)
    pxm, pxp = np.array(pxm, dtype=float), np.array(pxp, dtype=float)
    mid = (xm + xp) / 2
    return LayerSeries(
        np.arange(gamma_min, gamma_max + 1), np.array(ticks, dtype=np.int64),
        np.array(ts, dtype=np.int64), xm, xp, pxm, pxp, mid, mid - (pxm + pxp) / 2,
        {s: stack(rows[s][0]) for s in Side}, {s: stack(rows[s][1]) for s in Side},
    )


# -- correlation -------------------------------------------------------------


class BlockCorrelator:
    """One-pass Pearson correlation of a scalar against a vector of columns.

    Feed per-tick values with :meth:`push`; every ``k`` ticks the block means
    enter Welford-style co-moment accumulators. Blocks touching a NaN in the
    scalar are dropped. Accumulators merge associatively.
    """

    def __init__(self, n_cols: int, k: int = 1):
        self.k = k
        self.n = 0
        self.mean_a = 0.0
        self.mean_b = np.zeros(n_cols)
        self.m2_a = 0.0
        self.m2_b = np.zeros(n_cols)
        self.c_ab = np.zeros(n_cols)
        self._buf_a = []
        self._buf_b = []

    def push(self, a: float, b) -> None:
        self._buf_a.append(a)
        self._buf_b.append(b)
        if len(self._buf_a) == self.k:
            a_blk = np.mean(self._buf_a)
            b_blk = np.mean(np.asarray(self._buf_b, dtype=float), axis=0)
            self._buf_a.clear()
            self._buf_b.clear()
            if np.isfinite(a_blk):
                self.push_block(a_blk, b_blk)

    def push_block(self, a: float, b) -> None:
        self.n += 1
        da = a - self.mean_a
        self.mean_a += da / self.n
        db = b - self.mean_b
        self.mean_b = self.mean_b + db / self.n
        self.m2_a += da * (a - self.mean_a)
        self.m2_b = self.m2_b + db * (b - self.mean_b)
        self.c_ab = self.c_ab + da * (b - self.mean_b)

    def merge(self, other: "BlockCorrelator") -> "BlockCorrelator":
        out = BlockCorrelator(self.mean_b.size, self.k)
        n = self.n + other.n
        if n == 0:
            return out
        da = other.mean_a - self.mean_a
        db = other.mean_b - self.mean_b
        w = self.n * other.n / n
        out.n = n
        out.mean_a = self.mean_a + da * other.n / n
        out.mean_b = self.mean_b + db * other.n / n
        out.m2_a = self.m2_a + other.m2_a + da * da * w
        out.m2_b = self.m2_b + other.m2_b + db * db * w
        out.c_ab = self.c_ab + other.c_ab + da * db * w
        return out

    def corr(self) -> np.ndarray:
        """Correlation per column; NaN where a column (or the scalar) is constant."""
        denom = np.sqrt(self.m2_a * self.m2_b)
        with np.errstate(invalid="ignore", divide="ignore"):
            r = np.where(denom > 0, self.c_ab / np.where(denom > 0, denom, 1.0), np.nan)
        return np.clip(r, -1.0, 1.0)


@dataclass(frozen=True)
class CorrCurve:
    gamma: np.ndarray
    corr: np.ndarray  # NaN marks a degenerate (constant) depth
    side: Optional[Side]
    k: int
    n_blocks: int
    mode: str = "per_depth"

    @property
    def missing(self) -> np.ndarray:
        return self.gamma[~np.isfinite(self.corr)]

    def at(self, g: int) -> float:
        return float(self.corr[int(np.flatnonzero(self.gamma == g)[0])])


def _delta_matrix(deltas, gamma) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(deltas, np.ndarray):
        if gamma is None:
            raise ValueError("gamma axis required with an array of deltas")
        return np.asarray(gamma), deltas
    deltas = list(deltas)
    if not deltas:
        raise InsufficientData("no layer deltas")
    return deltas[0].gamma, np.array([d.delta_n_gamma for d in deltas])


def corr_curve(v, deltas, k: int = 20, mode: str = "per_depth", side: Optional[Side] = None,
               gamma=None, min_blocks: int = MIN_BLOCKS) -> CorrCurve:
    """Coarse-grained correlation of velocity with per-depth or cumulative flow.

    ``deltas`` is a sequence of :class:`LayerDelta` aligned with ``v`` (one per
    tick) or a ``(T, G)`` array together with its ``gamma`` axis.
    """
    if mode not in ("per_depth", "cumulative"):
        raise ValueError(f"unknown mode {mode!r}")
    a = v.values if isinstance(v, TickSeries) else np.asarray(v, dtype=float)
    gamma, B = _delta_matrix(deltas, gamma)
    if side is None and not isinstance(deltas, np.ndarray):
        side = deltas[0].side
    if B.shape[0] != a.size:
        raise ValueError(f"velocity has {a.size} ticks, deltas {B.shape[0]}")
    if mode == "cumulative":
        keep = gamma >= 0
        gamma, B = gamma[keep], np.cumsum(B[:, keep], axis=1)
    n_blocks = a.size // k
    if n_blocks < min_blocks:
        raise InsufficientData(f"{n_blocks} blocks of {k} ticks (< {min_blocks})")
    acc = BlockCorrelator(gamma.size, k)
    a_blk = a[: n_blocks * k].reshape(n_blocks, k).mean(axis=1)
    b_blk = B[: n_blocks * k].reshape(n_blocks, k, -1).mean(axis=1)
    for ab, bb in zip(a_blk, b_blk):
        if np.isfinite(ab):
            acc.push_block(ab, bb)
    if acc.n < min_blocks:
        raise InsufficientData(f"{acc.n} valid blocks (< {min_blocks})")
    if acc.m2_a <= 0:
        raise DegenerateVariance("velocity is constant over all blocks")
    return CorrCurve(gamma, acc.corr(), side, k, acc.n, mode)


class GammaC(NamedTuple):
    gamma_c: int  # peak of |cumulative correlation|
    method_agreement: int  # |peak - sign change|
    sign_change: int  # last depth before the per-depth correlation flips sign
    orientation: int  # sign of the inner-layer correlation (+1 or -1)


def _peak(cum: CorrCurve) -> int:
    sel = (cum.gamma > 0) & np.isfinite(cum.corr)
    if not sel.any():
        raise NoPeak("cumulative correlation undefined at every depth > 0")
    g, r = cum.gamma[sel], np.abs(cum.corr[sel])
    return int(g[np.flatnonzero(r == r.max())[0]])


def _sign_change(per: CorrCurve, orientation: int) -> Optional[int]:
    sel = (per.gamma > 0) & np.isfinite(per.corr) & (per.corr != 0)
    g, s = per.gamma[sel], np.sign(per.corr[sel])
    hits = np.flatnonzero((s[:-1] == orientation) & (s[1:] == -orientation))
    return int(g[hits[0]]) if hits.size else None


def find_gamma_c(curve_per_depth: CorrCurve, curve_cumulative: CorrCurve,
                 min_gamma_max: int = 30) -> GammaC:
    """Locate the inner-layer boundary from both correlation curves.

    Primary estimate: the depth > 0 maximizing the absolute cumulative
    correlation (smallest depth on ties). Secondary: the first depth > 0 whose
    per-depth correlation has the inner-layer sign while the next valid depth
    has the opposite sign. The inner-layer sign is taken from the cumulative
    peak rather than assumed per side.
    """
    for c in (curve_per_depth, curve_cumulative):
        if c.gamma.min() > 0 or c.gamma.max() < min_gamma_max:
            raise InsufficientData(f"curves must span depths 0..{min_gamma_max}")
    peak = _peak(curve_cumulative)
    orientation = int(np.sign(curve_cumulative.at(peak))) or 1
    sc = _sign_change(curve_per_depth, orientation)
    if sc is None:
        err = NoSignChange("per-depth correlation never changes sign")
        err.peak = peak
        raise err
    return GammaC(peak, abs(peak - sc), sc, orientation)
