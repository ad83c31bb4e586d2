"""Order-book state maintained from an ordered event stream.

Prices are integer ticks (multiples of the minimum price increment) and
volumes are integer units (multiples of the minimum order size).  The book is
level-aggregated: only the outstanding volume per price is tracked, never
individual orders.

Event time advances by one for every transaction, so :func:`replay` emits one
snapshot per execution and nothing for pure additions or cancellations.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import (
    BookError,
    CancelOnEmptyLevel,
    EmptySide,
    ExecuteBeyondDepth,
    NegativeVolume,
    NonMonotonicTimestamp,
)


class Side(enum.Enum):
    MINUS = "minus"  # bids, buy side
    PLUS = "plus"  # asks, sell side

    @property
    def sign(self) -> int:
        return -1 if self is Side.MINUS else 1

    @property
    def opposite(self) -> "Side":
        return Side.PLUS if self is Side.MINUS else Side.MINUS

    def __str__(self):
        return self.value


class Action(enum.Enum):
    ADD = "add"
    CANCEL = "cancel"
    EXECUTE = "execute"


@dataclass(frozen=True)
class MarketSpec:
    symbol: str = "SYN"
    delta_x: float = 1.0
    delta_n: float = 1.0

    def __post_init__(self):
        if not (self.delta_x > 0 and self.delta_n > 0):
            raise ValueError("delta_x and delta_n must be positive")

    def price(self, ticks):
        return ticks * self.delta_x

    def volume(self, units):
        return units * self.delta_n


@dataclass(frozen=True, slots=True)
class OrderEvent:
    timestamp_ms: int
    side: Side
    price: int
    action: Action
    volume: int


class Transaction(NamedTuple):
    """Marker attached to every snapshot: what made event time advance."""

    tick: int
    timestamp_ms: int
    offset: int
    side: Side  # side whose resting volume was consumed
    price: int  # last price traded
    volume: int


class BestPrices(NamedTuple):
    x_minus: int
    x_plus: int
    mid_half: int  # x_minus + x_plus, i.e. the mid-price in half-ticks

    @property
    def mid(self) -> float:
        return self.mid_half / 2

    @property
    def size(self) -> int:
        """Particle size in ticks, x+ - x-."""
        return self.x_plus - self.x_minus

    @property
    def size_inclusive(self) -> int:
        """Particle size counting both best levels, x+ - x- + 1. Reported only."""
        return self.x_plus - self.x_minus + 1


class Ladder(Mapping):
    """Immutable price -> volume mapping for one side, backed by a dense array.

    Zero-volume prices are not keys. ``window`` gives fast contiguous access.
    """

    __slots__ = ("side", "_base", "_vol", "_best", "_count")

    def __init__(self, side: Side, base: int = 0, vol=None, best=None, count=None):
        self.side = side
        self._base = base
        self._vol = np.zeros(0, dtype=np.int64) if vol is None else vol
        self._vol.flags.writeable = False
        if count is None:
            nz = np.flatnonzero(self._vol)
            count = int(nz.size)
            if best is None and count:
                best = base + int(nz[-1] if side is Side.MINUS else nz[0])
        self._best = best
        self._count = count

    @classmethod
    def from_dict(cls, side: Side, levels: Mapping[int, int]) -> "Ladder":
        levels = {int(p): int(v) for p, v in levels.items() if v}
        if any(v < 0 for v in levels.values()):
            raise ValueError("volumes must be nonnegative")
        if not levels:
            return cls(side)
        lo, hi = min(levels), max(levels)
        vol = np.zeros(hi - lo + 1, dtype=np.int64)
        for p, v in levels.items():
            vol[p - lo] = v
        return cls(side, lo, vol)

    @property
    def best(self) -> Optional[int]:
        """Highest bid (minus) or lowest ask (plus); None when the side is empty."""
        return self._best

    @property
    def total(self) -> int:
        return int(self._vol.sum())

    def get(self, price, default=0):
        i = price - self._base
        if 0 <= i < self._vol.size:
            v = int(self._vol[i])
            if v:
                return v
        return default

    def __getitem__(self, price):
        v = self.get(price, 0)
        if not v:
            raise KeyError(price)
        return v

    def __iter__(self) -> Iterator[int]:
        return (self._base + int(i) for i in np.flatnonzero(self._vol))

    def __len__(self):
        return self._count

    def __repr__(self):
        return f"Ladder({self.side}, {dict(self.items())})"

    def window(self, lo: int, hi: int) -> np.ndarray:
        """Volumes at prices lo..hi inclusive, zero outside the stored range."""
        out = np.zeros(hi - lo + 1, dtype=np.int64)
        a = max(lo, self._base)
        b = min(hi, self._base + self._vol.size - 1)
        if a <= b:
            out[a - lo : b - lo + 1] = self._vol[a - self._base : b - self._base + 1]
        return out


class _MutableLadder:
    __slots__ = ("side", "base", "vol", "best", "count")

    def __init__(self, side: Side):
        self.side = side
        self.base = 0
        self.vol = np.zeros(0, dtype=np.int64)
        self.best = None
        self.count = 0

    @classmethod
    def from_ladder(cls, ladder: Ladder) -> "_MutableLadder":
        m = cls(ladder.side)
        m.base = ladder._base
        m.vol = ladder._vol.copy()
        m.best = ladder._best
        m.count = ladder._count
        return m

    def freeze(self) -> Ladder:
        return Ladder(self.side, self.base, self.vol.copy(), self.best, self.count)

    def get(self, price: int) -> int:
        i = price - self.base
        if 0 <= i < self.vol.size:
            return int(self.vol[i])
        return 0

    def _reserve(self, price: int):
        n = self.vol.size
        if n == 0:
            self.base = price - 128
            self.vol = np.zeros(256, dtype=np.int64)
            return
        if self.base <= price < self.base + n:
            return
        margin = max(n, 256)
        lo = min(self.base, price - margin)
        hi = max(self.base + n, price + margin + 1)
        vol = np.zeros(hi - lo, dtype=np.int64)
        vol[self.base - lo : self.base - lo + n] = self.vol
        self.base, self.vol = lo, vol

    def add(self, price: int, volume: int):
        self._reserve(price)
        i = price - self.base
        if self.vol[i] == 0:
            self.count += 1
        self.vol[i] += volume
        if self.best is None:
            self.best = price
        elif self.side is Side.MINUS:
            if price > self.best:
                self.best = price
        elif price < self.best:
            self.best = price

    def remove(self, price: int, volume: int):
        i = price - self.base
        self.vol[i] -= volume
        if self.vol[i] == 0:
            self.count -= 1
            if price == self.best:
                self._rescan(i)

    def _rescan(self, i: int):
        if self.count == 0:
            self.best = None
        elif self.side is Side.MINUS:
            self.best = self.base + int(np.flatnonzero(self.vol[:i])[-1])
        else:
            self.best = self.base + i + 1 + int(np.flatnonzero(self.vol[i + 1 :])[0])


@dataclass(frozen=True)
class BookState:
    levels_minus: Ladder
    levels_plus: Ladder
    tick_index: int = 0
    last_transaction_ts: Optional[int] = None

    @classmethod
    def empty(cls) -> "BookState":
        return cls(Ladder(Side.MINUS), Ladder(Side.PLUS))

    @classmethod
    def from_levels(cls, minus: Mapping[int, int], plus: Mapping[int, int], **kw) -> "BookState":
        return cls(Ladder.from_dict(Side.MINUS, minus), Ladder.from_dict(Side.PLUS, plus), **kw)

    def levels(self, side: Side) -> Ladder:
        return self.levels_minus if side is Side.MINUS else self.levels_plus

    def best(self, side: Side) -> Optional[int]:
        return self.levels(side).best

    @property
    def x_minus(self) -> Optional[int]:
        return self.levels_minus.best

    @property
    def x_plus(self) -> Optional[int]:
        return self.levels_plus.best

    def as_dicts(self) -> tuple[dict, dict]:
        return dict(self.levels_minus.items()), dict(self.levels_plus.items())


class OrderBook:
    """Mutable engine behind :func:`apply_event` and :func:`replay`."""

    def __init__(self, state: Optional[BookState] = None):
        state = state or BookState.empty()
        self._sides = {
            Side.MINUS: _MutableLadder.from_ladder(state.levels_minus),
            Side.PLUS: _MutableLadder.from_ladder(state.levels_plus),
        }
        self.tick_index = state.tick_index
        self.last_transaction_ts = state.last_transaction_ts

    def best(self, side: Side) -> Optional[int]:
        return self._sides[side].best

    def volume(self, side: Side, price: int) -> int:
        return self._sides[side].get(price)

    def level_count(self, side: Side) -> int:
        return self._sides[side].count

    def window(self, side: Side, lo: int, hi: int) -> np.ndarray:
        m = self._sides[side]
        out = np.zeros(hi - lo + 1, dtype=np.int64)
        a, b = max(lo, m.base), min(hi, m.base + m.vol.size - 1)
        if a <= b:
            out[a - lo : b - lo + 1] = m.vol[a - m.base : b - m.base + 1]
        return out

    def snapshot(self) -> BookState:
        return BookState(
            self._sides[Side.MINUS].freeze(),
            self._sides[Side.PLUS].freeze(),
            self.tick_index,
            self.last_transaction_ts,
        )

    def apply(self, ev: OrderEvent, offset: Optional[int] = None) -> Optional[Transaction]:
        """Apply one event in place; return a marker if it was a transaction."""
        vol = ev.volume
        if vol < 1:
            raise NegativeVolume(f"volume must be >= 1, got {vol}", offset)
        ladder = self._sides[ev.side]
        if ev.action is Action.ADD:
            return self._add(ev, offset)
        if ev.action is Action.CANCEL:
            have = ladder.get(ev.price)
            if have == 0:
                raise CancelOnEmptyLevel(f"cancel at empty {ev.side} level {ev.price}", offset)
            if have < vol:
                raise NegativeVolume(
                    f"cancel of {vol} exceeds {have} resting at {ev.side} {ev.price}", offset
                )
            ladder.remove(ev.price, vol)
            return None
        # execute: consumes resting volume at the best price of ev.side
        if ladder.best is None:
            raise ExecuteBeyondDepth(f"execute on empty {ev.side} side", offset)
        if ev.price != ladder.best:
            raise ExecuteBeyondDepth(
                f"execute at {ev.price} but {ev.side} best is {ladder.best}", offset
            )
        have = ladder.get(ev.price)
        if have < vol:
            raise ExecuteBeyondDepth(f"execute of {vol} exceeds {have} at best", offset)
        ladder.remove(ev.price, vol)
        return self._transact(ev, offset, ev.side, ev.price, vol)

    def _add(self, ev: OrderEvent, offset):
        own = self._sides[ev.side]
        other = self._sides[ev.side.opposite]
        remaining = ev.volume
        traded = 0
        last = None
        # crossing add: trade against the opposite side in price priority
        while remaining and other.best is not None and _crosses(ev.side, ev.price, other.best):
            last = other.best
            take = min(remaining, other.get(last))
            other.remove(last, take)
            remaining -= take
            traded += take
        if remaining:
            own.add(ev.price, remaining)
        if traded:
            return self._transact(ev, offset, ev.side.opposite, last, traded)
        return None

    def _transact(self, ev, offset, side, price, volume) -> Transaction:
        self.tick_index += 1
        self.last_transaction_ts = ev.timestamp_ms
        return Transaction(self.tick_index, ev.timestamp_ms, offset, side, price, volume)


def _crosses(side: Side, price: int, opposite_best: int) -> bool:
    return price >= opposite_best if side is Side.MINUS else price <= opposite_best


def apply_event(state: BookState, ev: OrderEvent, offset: Optional[int] = None) -> BookState:
    """Return the state after ``ev``; ``state`` itself is left untouched."""
    book = OrderBook(state)
    book.apply(ev, offset)
    return book.snapshot()


def best_and_mid(state: BookState) -> BestPrices:
    """Best bid, best ask and the mid-price in half-ticks.

    Raises :class:`EmptySide` when either side has no orders; the mid-price is
    then undefined and the Knudsen number on that side diverges.
    """
    xm, xp = state.x_minus, state.x_plus
    if xm is None:
        raise EmptySide(Side.MINUS)
    if xp is None:
        raise EmptySide(Side.PLUS)
    return BestPrices(xm, xp, xm + xp)


class Snapshot(NamedTuple):
    state: BookState
    marker: Transaction


class Replay:
    """Pull-based replay: iterating yields one :class:`Snapshot` per transaction.

    After exhaustion ``dt_ms`` holds the realized mean calendar time between
    transactions (a reporting constant only).
    """

    def __init__(self, log: Iterable[OrderEvent], spec: Optional[MarketSpec] = None,
                 initial: Optional[BookState] = None):
        self._log = log
        self.spec = spec or MarketSpec()
        self._initial = initial
        self.n_events = 0
        self.n_transactions = 0
        self.first_ts = None
        self.last_ts = None
        self.final_state: Optional[BookState] = None

    @property
    def dt_ms(self) -> Optional[float]:
        if self.n_transactions < 2:
            return None
        return (self.last_ts - self.first_ts) / (self.n_transactions - 1)

    def __iter__(self) -> Iterator[Snapshot]:
        book = OrderBook(self._initial)
        prev_ts = None
        for offset, ev in enumerate(self._log):
            if prev_ts is not None and ev.timestamp_ms < prev_ts:
                raise NonMonotonicTimestamp(
                    f"timestamp {ev.timestamp_ms} < {prev_ts} at event {offset}"
                )
            prev_ts = ev.timestamp_ms
            self.n_events += 1
            marker = book.apply(ev, offset)
            if marker is not None:
                self.n_transactions += 1
                if self.first_ts is None:
                    self.first_ts = marker.timestamp_ms
                self.last_ts = marker.timestamp_ms
                yield Snapshot(book.snapshot(), marker)
        self.final_state = book.snapshot()


def replay(log: Iterable[OrderEvent], spec: Optional[MarketSpec] = None) -> Replay:
    return Replay(log, spec)


__all__ = [
    "Action",
    "BestPrices",
    "BookError",
    "BookState",
    "Ladder",
    "MarketSpec",
    "OrderBook",
    "OrderEvent",
    "Replay",
    "Side",
    "Snapshot",
    "Transaction",
    "apply_event",
    "best_and_mid",
    "replay",
]
