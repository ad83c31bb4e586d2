"""Synthetic order flow with planted ground truth.

The generator runs in rounds. Each round it

1. lets trend followers react to the previous round's mid-price move: on
   the side the price moved away from, volume is requoted from the band of
   depths just beyond the planted boundary into depths ``0..gamma*``; on the
   side the price moved toward, volume retreats the other way;
2. draws zero-intelligence flow: inner-layer deposits and cancellations that
   keep the inner population near ``inner_density_target``, occasional
   placements inside the spread, and a balanced add/cancel random walk deeper
   in the book;
3. lets the deep density drift as a slow log random walk, so that the deep
   volume wanders like an integrated process while the inner layer stays put;
4. sends market orders that execute one unit at a time at the best price.

Depths are measured from the best price left by the previous transaction,
matching how the analysis measures them. All randomness comes from a
counter-based Philox stream, so a seed fixes the log on every platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np

from .book import Action, OrderBook, OrderEvent, Side
from .errors import ConfigInvalid

SCENARIOS = ("stationary", "density_sweep", "flash_crash", "one_sided_halt")
SWEEP_LOTS = (1, 2, 3, 4, 5)



@dataclass(frozen=True)
class SynthConfig:
    """Generator settings. Rates are per round unless noted; a round carries
    on average ``2 * market_order_rate`` transactions."""

    seed: int = 0
    n_events: int = 100_000
    base_depth_rate: float = 0.002  # deep add/cancel operations per level per round
    cancel_rate: float = 0.03  # cancellations per resting inner lot per round
    market_order_rate: float = 1.0  # market orders per round per side
    trend_follow_strength: float = 1.5  # lots requoted per tick of mid move
    planted_gamma_c: int = 18
    inner_density_target: Optional[float] = None  # lots at depths 0..gamma*, default 2.5 per level
    scenario: str = "stationary"
    requote_orders: bool = True  # requote whole orders rather than single lots
    requote_cap: float = math.inf  # mid moves beyond this many ticks get no extra response
    band_width: int = 3  # requote band just beyond gamma*
    band_rate: Optional[float] = None  # add/cancel ops per band level per round
    deep_levels: int = 100  # deepest depth reached by the deep random walk
    deep_walk: float = 0.01  # per-round step of the log deep density (0 keeps it fixed)
    deep_relax: float = 0.05  # fraction of the deep volume gap closed per round
    seed_levels: int = 1000  # initial book extent, far beyond any price excursion
    inside_spread_prob: float = 0.1
    max_order_size: int = 4  # zero-intelligence order sizes are uniform on 1..max lots
    crash_market: float = 3.0  # market-order multiplier on the crashing side
    crash_withdrawal: float = 0.02  # fraction of resting lots withdrawn per crash round
    halt_rounds: int = 50  # rounds with an empty minus side (one_sided_halt)
    start_price: int = 100_000
    ms_per_round: int = 40

    def __post_init__(self):
        rates = (self.base_depth_rate, self.cancel_rate, self.market_order_rate,
                 self.trend_follow_strength, self.target, self.inside_spread_prob,
                 self.crash_market, self.crash_withdrawal, self.deep_walk, self.deep_relax)
        if any(not r >= 0 for r in rates):
            raise ConfigInvalid("rates must be nonnegative")
        if self.planted_gamma_c < 1:
            raise ConfigInvalid("planted_gamma_c must be >= 1")
        if self.n_events < 1000:
            raise ConfigInvalid("n_events must be >= 1000")
        if self.scenario not in SCENARIOS:
            raise ConfigInvalid(f"unknown scenario {self.scenario!r}")
        if self.band_width < 1:
            raise ConfigInvalid("band_width must be >= 1")
        if self.deep_levels <= self.planted_gamma_c + self.band:
            raise ConfigInvalid("deep_levels must exceed gamma* plus the band width")
        if self.max_order_size < 1:
            raise ConfigInvalid("max_order_size must be >= 1")
        if self.seed_levels < self.deep_levels:
            raise ConfigInvalid("seed_levels must be >= deep_levels")
        if self.market_order_rate <= 0:
            raise ConfigInvalid("market_order_rate must be positive")

    @property
    def band_ops(self) -> float:
        if self.band_rate is not None:
            return self.band_rate
        # default: half the per-level intensity of inner-layer flow
        return 0.5 * (2 * self.cancel_rate * self.target + self.market_order_rate) / (
            self.planted_gamma_c + 1)

    @property
    def band(self) -> int:
        return self.band_width

    @property
    def target(self) -> float:
        if self.inner_density_target is None:
            return 2.5 * (self.planted_gamma_c + 1)
        return self.inner_density_target


def flash_crash_config(seed: int = 0, **kw) -> SynthConfig:
    """Reference crash fixture: shallow inner layer, unit orders, dense book.

    Pairs with detector settings ``k=2, S=100`` and ``gamma_c = 4``.
    """
    base = dict(seed=seed, n_events=60_000, scenario="flash_crash", planted_gamma_c=4,
                inner_density_target=40.0, max_order_size=1, trend_follow_strength=1.0,
                requote_orders=False, deep_walk=0.0, crash_withdrawal=0.003)
    base.update(kw)
    return SynthConfig(**base)


def density_sweep_config(seed: int = 0, **kw) -> SynthConfig:
    """Reference density sweep: five lot-size regimes over a shallow inner layer."""
    base = dict(seed=seed, n_events=200_000, scenario="density_sweep", planted_gamma_c=3,
                inner_density_target=20.0, max_order_size=1, trend_follow_strength=1.0,
                requote_orders=False, deep_walk=0.0)
    base.update(kw)
    return SynthConfig(**base)


class SynthLog(list):
    """List of :class:`OrderEvent` with scenario annotations.

    ``phases`` maps a phase name to the half-open event-offset range
    ``(start, stop)`` it occupies.
    """

    def __init__(self, events=(), config=None, phases=None):
        super().__init__(events)
        self.config = config
        self.phases = dict(phases or {})


class _Stream:
    """Buffered uniforms from a Philox generator plus small samplers."""

    def __init__(self, seed: int, chunk: int = 1 << 15):
        self._gen = np.random.Generator(np.random.Philox(seed))
        self._chunk = chunk
        self._buf = []
        self._i = 0

    def u(self) -> float:
        if self._i >= len(self._buf):
            self._buf = self._gen.random(self._chunk).tolist()
            self._i = 0
        x = self._buf[self._i]
        self._i += 1
        return x

    def below(self, n: int) -> int:
        return min(int(self.u() * n), n - 1)

    def poisson(self, lam: float) -> int:
        if lam <= 0:
            return 0
        if lam > 30:
            # normal approximation keeps the draw O(1) for large means
            z = math.sqrt(-2 * math.log(1 - self.u())) * math.cos(2 * math.pi * self.u())
            return max(0, int(round(lam + math.sqrt(lam) * z)))
        # inversion
        x, p = 0, math.exp(-lam)
        s, u = p, self.u()
        while u > s:
            x += 1
            p *= lam / x
            s += p
        return x

    def binomial(self, n: np.ndarray, p: float) -> np.ndarray:
        """Vectorized draws straight from the underlying generator."""
        return self._gen.binomial(n, p)

    def exponential(self, mean: float) -> float:
        return -mean * math.log(1 - self.u())


class _Flow:
    """Event emitter that keeps its own book so every event is valid."""

    def __init__(self, cfg: SynthConfig, rng: _Stream):
        self.cfg = cfg
        self.rng = rng
        self.book = OrderBook()
        self.events: list[OrderEvent] = []
        self.ts = 0
        self.ref = {Side.MINUS: None, Side.PLUS: None}  # best at the last transaction
        self.lot = 1  # volume units per generator lot
        self.deep_density = 1.0  # lots per deep level, set by seed_book
        self.deep_log = {Side.MINUS: 0.0, Side.PLUS: 0.0}

    # -- primitives ----------------------------------------------------------

    def emit(self, side, price, action, volume=1):
        """Emit ``volume`` units (not lots)."""
        ev = OrderEvent(self.ts, side, int(price), action, int(volume))
        marker = self.book.apply(ev)
        self.events.append(ev)
        if marker is not None:
            self.ref = {s: self.book.best(s) for s in Side}
        return marker

    def price_at(self, side: Side, depth: int) -> int:
        return self.ref_best(side) + side.sign * depth

    def ref_best(self, side: Side) -> int:
        r = self.ref[side]
        if r is None:
            r = self.book.best(side)
        if r is None:
            other = self.book.best(side.opposite)
            r = (self.cfg.start_price if other is None else other) + side.sign
        return r

    def window(self, side: Side, d0: int, d1: int) -> np.ndarray:
        """Volumes in lots at depths d0..d1 (inclusive) against the reference best."""
        ref = self.ref_best(side)
        if side is Side.MINUS:
            w = self.book.window(side, ref - d1, ref - d0)[::-1]
        else:
            w = self.book.window(side, ref + d0, ref + d1)
        return w if self.lot == 1 else w // self.lot

    def add(self, side: Side, depth: int, volume: int = 1):
        price = self.price_at(side, depth)
        other = self.book.best(side.opposite)
        if other is not None and (price - other) * side.sign <= 0:
            # never cross: keep the order one tick behind the opposite best
            price = other + side.sign
        self.emit(side, price, Action.ADD, volume * self.lot)

    def cancel_in(self, side: Side, d0: int, d1: int, n: int, weighted: bool = True,
                  sized: bool = False) -> list[int]:
        """Up to ``n`` cancel events at depths d0..d1; returns the lots cancelled by each.

        Levels are picked in proportion to their volume (``weighted``) or
        uniformly among non-empty ones. ``sized`` cancels draw an order size
        instead of a single unit.
        """
        if n <= 0:
            return []
        w = self.window(side, d0, d1)
        done = []
        for _ in range(n):
            tot = int(w.sum())
            if tot <= 0:
                break
            if weighted:
                r = self.rng.below(tot)
                j = int(np.searchsorted(np.cumsum(w), r, side="right"))
            else:
                nz = np.flatnonzero(w)
                j = int(nz[self.rng.below(nz.size)])
            q = min(self.order_size(), int(w[j])) if sized else 1
            self.emit(side, self.price_at(side, d0 + j), Action.CANCEL, q * self.lot)
            w[j] -= q
            done.append(q)
        return done

    def order_size(self) -> int:
        return 1 + self.rng.below(self.cfg.max_order_size)

    def execute(self, side: Side, volume: int = 1):
        """Market order consuming ``volume`` lots, one transaction per lot."""
        for _ in range(volume):
            best = self.book.best(side)
            if best is None:
                return
            self.emit(side, best, Action.EXECUTE, self.lot)

    def inner(self, side: Side) -> int:
        return int(self.window(side, 0, self.cfg.planted_gamma_c).sum())

    def spread(self) -> Optional[int]:
        a, b = self.book.best(Side.PLUS), self.book.best(Side.MINUS)
        return None if a is None or b is None else a - b

    # -- flow components ---------------------------------------------------------

    def seed_book(self, density: float):
        """Initial book: inner layer at the target density, deep levels behind it."""
        cfg, g = self.cfg, self.cfg.planted_gamma_c
        mid = cfg.start_price
        per_inner = max(1, int(round(density / (g + 1))))
        deep = max(1, int(round(per_inner)))
        self.deep_density = float(deep)
        for side in Side:
            base = mid + side.sign * 1
            for d in range(cfg.seed_levels + 1):
                vol = per_inner if d <= g else deep
                self.emit(side, base + side.sign * d, Action.ADD, vol)
        self.ref = {s: self.book.best(s) for s in Side}

    def purge(self, side: Side, frac: float, depth: int):
        """Withdraw each resting lot within ``depth`` of the best with probability ``frac``."""
        w = self.window(side, 0, depth)
        q = self.rng.binomial(w, frac)
        for j in np.flatnonzero(q).tolist():
            self.emit(side, self.price_at(side, j), Action.CANCEL, int(q[j]) * self.lot)

    def set_lot(self, lot: int):
        """Switch the lot size, rounding every resting level to whole new lots."""
        old = self.lot
        for side in Side:
            for price, have in list(self.book.snapshot().levels(side).items()):
                lots = have // old + (have % old > 0)
                want = lots * lot
                if want > have:
                    self.emit(side, price, Action.ADD, want - have)
                elif want < have:
                    self.emit(side, price, Action.CANCEL, have - want)
        self.lot = lot

    def trend_follow(self, dm: float, strength: float):
        """Requote after a mid move of ``dm`` ticks.

        The side the price moved away from pulls volume from the band into the
        inner layer; the side it moved toward pushes inner volume out to the
        band. The amount is ``strength * |dm|`` units, stochastically rounded.
        """
        if not dm or strength <= 0:
            return
        g, band = self.cfg.planted_gamma_c, self.cfg.band
        sized = self.cfg.requote_orders
        x = strength * min(abs(dm), self.cfg.requote_cap)
        if sized:
            x /= (self.cfg.max_order_size + 1) / 2
        n = int(x) + (self.rng.u() < x - int(x))
        for side in Side:
            trailing = (dm > 0) == (side is Side.MINUS)
            if trailing:
                for q in self.cancel_in(side, g + 1, g + band, n, weighted=False, sized=sized):
                    self.add(side, self.rng.below(g + 1), q)
            else:
                for q in self.cancel_in(side, 0, g, n, weighted=False, sized=sized):
                    self.add(side, g + 1 + self.rng.below(band), q)

    def zero_intelligence(self, side: Side, target: float, add_scale: float = 1.0,
                          cancel_scale: float = 1.0, deep_cancel_bias: float = 0.0,
                          market_rate: Optional[float] = None, inside_spread: bool = True):
        cfg, g = self.cfg, self.cfg.planted_gamma_c
        I = self.inner(side)
        mean_size = (cfg.max_order_size + 1) / 2
        # deposits balance cancellations at the target plus the market orders
        # expected against this side
        m = cfg.market_order_rate if market_rate is None else market_rate
        n_add = self.rng.poisson(add_scale * (cfg.cancel_rate * target + m) / mean_size)
        n_cancel = self.rng.poisson(cancel_scale * cfg.cancel_rate * I / mean_size)
        self.cancel_in(side, 0, g, n_cancel, sized=True)
        p_inside = cfg.inside_spread_prob if inside_spread else 0.0
        for _ in range(n_add):
            s = self.spread()
            if s is not None and s > 1 and self.rng.u() < p_inside:
                self.add(side, -1 - self.rng.below(s - 1), self.order_size())
            else:
                self.add(side, self.rng.below(g + 1), self.order_size())
        band = cfg.band
        n_band = self.rng.poisson(cfg.band_ops * band)
        for _ in range(n_band):
            if self.rng.u() < 0.5 + deep_cancel_bias:
                self.cancel_in(side, g + 1, g + band, 1, weighted=False)
            else:
                self.add(side, g + 1 + self.rng.below(band))
        n_deep = self.rng.poisson(cfg.base_depth_rate * (cfg.deep_levels - g))
        for _ in range(n_deep):
            if self.rng.u() < 0.5 + deep_cancel_bias:
                self.cancel_in(side, g + 1, cfg.deep_levels, 1, weighted=False)
            else:
                self.add(side, g + 1 + self.rng.below(cfg.deep_levels - g))
        if cfg.deep_walk > 0:
            self.deep_drift(side)

    def deep_drift(self, side: Side):
        """Let the deep density do a log random walk and pull the deep volume after it."""
        cfg, g = self.cfg, self.cfg.planted_gamma_c + self.cfg.band
        w = self.deep_log[side] + cfg.deep_walk * (2 * self.rng.u() - 1) * math.sqrt(3)
        if abs(w) > 2.0:  # reflect to keep the density within e^(+-2) of its start
            w = math.copysign(4.0, w) - w
        self.deep_log[side] = w
        levels = cfg.deep_levels - g
        have = int(self.window(side, g + 1, cfg.deep_levels).sum())
        gap = self.deep_density * levels * math.exp(w) - have
        # whole orders keep the event overhead of the drift small
        n = self.rng.poisson(cfg.deep_relax * abs(gap) / ((cfg.max_order_size + 1) / 2))
        if gap < 0:
            self.cancel_in(side, g + 1, cfg.deep_levels, n, weighted=True, sized=True)
        else:
            for _ in range(n):
                self.add(side, g + 1 + self.rng.below(levels), self.order_size())

    def market(self, rate_minus: float, rate_plus: float):
        n = {Side.MINUS: self.rng.poisson(rate_minus), Side.PLUS: self.rng.poisson(rate_plus)}
        order = [Side.MINUS, Side.PLUS] if self.rng.u() < 0.5 else [Side.PLUS, Side.MINUS]
        for side in order:
            self.execute(side, n[side])

    def mid(self) -> Optional[float]:
        a, b = self.book.best(Side.PLUS), self.book.best(Side.MINUS)
        return None if a is None or b is None else (a + b) / 2

    def round(self, target_minus, target_plus, strength, dm, side_kw=None, market=None):
        """One round; returns the mid move (ticks) observed during it."""
        before = self.mid()
        self.ts += max(1, int(round(self.rng.exponential(self.cfg.ms_per_round))))
        self.trend_follow(dm, strength)
        for side, tgt in ((Side.MINUS, target_minus), (Side.PLUS, target_plus)):
            self.zero_intelligence(side, tgt, **(side_kw or {}).get(side, {}))
        m = self.cfg.market_order_rate
        self.market(*(market or (m, m)))
        after = self.mid()
        return 0.0 if before is None or after is None else after - before


def _run_stationary(flow: _Flow, n_events: int, target: float, strength: float):
    dm = 0.0
    while len(flow.events) < n_events:
        dm = flow.round(target, target, strength, dm)


def generate(config: SynthConfig) -> SynthLog:
    """Deterministic event log for ``config`` (same seed, same log)."""
    if config.scenario in ("flash_crash", "one_sided_halt"):
        return generate_flash_crash(config)
    flow = _Flow(config, _Stream(config.seed))
    flow.seed_book(config.target)
    phases = {"seed": (0, len(flow.events))}
    if config.scenario == "stationary":
        _run_stationary(flow, config.n_events, config.target,
                        config.trend_follow_strength)
        phases["stationary"] = (phases["seed"][1], len(flow.events))
    else:  # density_sweep: consecutive regimes of equal event counts
        # regime i trades in lots of SWEEP_LOTS[i] units: the same flow in
        # lots, so the particle density scales while the dynamics do not
        per = config.n_events // len(SWEEP_LOTS)
        for i, lot in enumerate(SWEEP_LOTS):
            start = len(flow.events)
            flow.ts += config.ms_per_round
            flow.set_lot(lot)
            _run_stationary(flow, start + per, config.target,
                            config.trend_follow_strength)
            phases[f"regime_{i}"] = (start, len(flow.events))
    return SynthLog(flow.events, config, phases)


def generate_flash_crash(config: SynthConfig) -> SynthLog:
    """Scripted crash on the minus side followed by a rebound.

    Phases, as event-offset ranges in ``SynthLog.phases``:

    * ``normal``      stationary flow;
    * ``depletion``   sell market orders intensify while bids stop arriving and
      resting bids are withdrawn, until the minus inner layer holds at most
      about 1/10 of its target population;
    * ``exhaustion``  the remaining bids are withdrawn and the last one is
      executed, leaving the minus side empty at a transaction;
    * ``halt``        buy orders keep trading against an empty minus side
      (one round for ``flash_crash``, ``halt_rounds`` for ``one_sided_halt``);
    * ``refill``      bids return well below the last trade;
    * ``rebound``     buy market orders dominate while offers are withdrawn,
      depleting the plus side;
    * ``recovery``    stationary flow.
    """
    if config.scenario not in ("flash_crash", "one_sided_halt"):
        raise ConfigInvalid("generate_flash_crash needs scenario 'flash_crash' or 'one_sided_halt'")
    cfg = config
    flow = _Flow(cfg, _Stream(cfg.seed))
    flow.seed_book(cfg.target)
    g, target, m = cfg.planted_gamma_c, cfg.target, cfg.market_order_rate
    phases = {"seed": (0, len(flow.events))}
    start = len(flow.events)

    def mark(name):
        nonlocal start
        phases[name] = (start, len(flow.events))
        start = len(flow.events)

    dm = 0.0
    while len(flow.events) < int(0.4 * cfg.n_events):
        dm = flow.round(target, target, cfg.trend_follow_strength, dm)
    mark("normal")

    def deplete(side: Side, stop) -> None:
        other = side.opposite
        cm = cfg.crash_market * m
        rates = (cm, 0.3 * m) if side is Side.MINUS else (0.3 * m, cm)
        # the passive side holds its population and does not chase the price
        # into the widening spread; without trend followers it would settle
        # above its normal level, hence the lower deposit scale
        kw = {side: dict(add_scale=0.1),
              other: dict(add_scale=0.8, market_rate=0.3 * m, inside_spread=False)}
        # the event budget bounds a depletion that never thins the layer
        while not stop() and len(flow.events) < cfg.n_events:
            flow.purge(side, cfg.crash_withdrawal, cfg.seed_levels)
            flow.round(target, target, 0.0, 0.0, side_kw=kw, market=rates)
            if flow.book.best(side) is None:
                break

    # stop once a smoothed inner population is down to a tenth of its target
    # and the current one agrees; the smoothing keeps a momentary dip from
    # ending the phase early
    def inner_volume(side):
        return int(flow.window(side, 0, g).sum())

    def thinned(side):
        ema[side] += 0.05 * (inner_volume(side) - ema[side])
        return 10 * ema[side] <= target and 10 * inner_volume(side) <= target

    ema = {s: float(target) for s in Side}
    deplete(Side.MINUS, lambda: thinned(Side.MINUS))
    mark("depletion")

    # withdraw what is left, deepest first, then trade the final unit
    while flow.book.best(Side.MINUS) is not None:
        flow.ts += 1
        best = flow.book.best(Side.MINUS)
        levels = flow.book.snapshot().levels(Side.MINUS)
        if len(levels) > 1:
            low = min(levels)
            flow.emit(Side.MINUS, low, Action.CANCEL, levels[low])
        elif levels[best] > flow.lot:
            flow.emit(Side.MINUS, best, Action.CANCEL, levels[best] - flow.lot)
        else:
            flow.execute(Side.MINUS, 1)
    mark("exhaustion")

    halt = 1 if cfg.scenario == "flash_crash" else cfg.halt_rounds
    for _ in range(halt):
        flow.ts += cfg.ms_per_round
        flow.zero_intelligence(Side.PLUS, target)
        flow.execute(Side.PLUS, 1)
    mark("halt")

    flow.ts += cfg.ms_per_round
    floor = flow.book.best(Side.PLUS) - (g + 4)
    per_level = max(1, round(target / (g + 1)))
    for d in range(cfg.seed_levels + 1):
        flow.emit(Side.MINUS, floor - d, Action.ADD, per_level * flow.lot)
    mark("refill")

    deplete(Side.PLUS, lambda: thinned(Side.PLUS))
    if flow.book.best(Side.PLUS) is None:
        flow.ts += cfg.ms_per_round
        bid = flow.book.best(Side.MINUS)
        for d in range(cfg.seed_levels + 1):
            flow.emit(Side.PLUS, bid + g + 4 + d, Action.ADD, per_level * flow.lot)
    mark("rebound")

    dm = 0.0
    while len(flow.events) < cfg.n_events:
        dm = flow.round(target, target, cfg.trend_follow_strength, dm)
    mark("recovery")
    return SynthLog(flow.events, cfg, phases)


def phase_ticks(log: SynthLog) -> dict:
    """Map each phase of ``log`` to the half-open tick range ``(first, stop)``
    of transactions triggered by events inside it."""
    from .book import replay

    offsets, ticks = [], []
    for snap in replay(log):
        offsets.append(snap.marker.offset)
        ticks.append(snap.marker.tick)
    offsets, ticks = np.asarray(offsets), np.asarray(ticks)
    out = {}
    for name, (a, b) in log.phases.items():
        i, j = np.searchsorted(offsets, [a, b])
        first = int(ticks[i]) if i < ticks.size else int(ticks[-1]) + 1 if ticks.size else 0
        out[name] = (first, first + int(j - i))
    return out


class KnownSlope(NamedTuple):
    v: np.ndarray
    f: np.ndarray


def generate_known_slope(config: SynthConfig, L_star: float, noise_sigma: float,
                         n_blocks: int = 100) -> KnownSlope:
    """Block series with v = L_star * f + N(0, noise_sigma), bypassing the book."""
    if not L_star > 0:
        raise ConfigInvalid("L_star must be positive")
    gen = np.random.Generator(np.random.Philox(config.seed))
    f = gen.normal(0.0, 1.0, n_blocks)
    v = L_star * f + (gen.normal(0.0, noise_sigma, n_blocks) if noise_sigma > 0 else 0.0)
    return KnownSlope(v, f)


def correlated_rates(n: int, rho: float, seed: int = 0, scale: float = 1.0):
    """Pairs of Gaussian rates with correlation ``rho`` (for the joint-quantile tests)."""
    if not -1 <= rho <= 1:
        raise ConfigInvalid("rho must lie in [-1, 1]")
    gen = np.random.Generator(np.random.Philox(seed))
    z1 = gen.standard_normal(n)
    z2 = gen.standard_normal(n)
    return scale * z1, scale * (rho * z1 + math.sqrt(1 - rho * rho) * z2)
