"""Event-log CSV, indicator JSONL and column-text exports.

Event logs are text CSV with the header ``ts_ms,side,price_ticks,action,volume_units``.
Sides are ``B`` (bid, minus) and ``S`` (ask, plus); actions are ``A`` (add),
``C`` (cancel) and ``X`` (execute). Every field is an integer apart from the
two codes, and a row that does not fit aborts the parse with its line number.
"""

from __future__ import annotations

import dataclasses
import json
import math
import re
from collections.abc import Iterable, Iterator
from typing import IO, Optional

import numpy as np

from .book import Action, MarketSpec, OrderEvent, Side
from .errors import MalformedRow, NonMonotonicTimestamp, UnknownAction

HEADER = "ts_ms,side,price_ticks,action,volume_units"

_SIDE_CODE = {"B": Side.MINUS, "S": Side.PLUS}
_ACTION_CODE = {"A": Action.ADD, "C": Action.CANCEL, "X": Action.EXECUTE}
_SIDE_OUT = {v: k for k, v in _SIDE_CODE.items()}
_ACTION_OUT = {v: k for k, v in _ACTION_CODE.items()}
_INT = re.compile(r"-?[0-9]+")


class EventLog(Iterable):
    """Lazy, re-checking view over an event-log stream.

    Iterating parses one row at a time, so memory stays bounded whatever the
    file size. A stream can be iterated once.
    """

    def __init__(self, stream: IO[str], spec: Optional[MarketSpec] = None):
        self.stream = stream
        self.spec = spec or MarketSpec()
        self._used = False

    def __iter__(self) -> Iterator[OrderEvent]:
        if self._used:
            raise RuntimeError("event log stream already consumed")
        self._used = True
        return _parse_rows(self.stream)


def _int_field(text: str, name: str, line: int) -> int:
    if not _INT.fullmatch(text):
        raise MalformedRow(f"line {line}: {name} {text!r} is not an integer", line)
    return int(text)


def _parse_rows(stream) -> Iterator[OrderEvent]:
    first = stream.readline()
    if first.rstrip("\r\n") != HEADER:
        raise MalformedRow(f"line 1: expected header {HEADER!r}", 1)
    prev_ts = None
    for line_no, raw in enumerate(stream, start=2):
        row = raw.rstrip("\r\n")
        parts = row.split(",")
        if len(parts) != 5:
            raise MalformedRow(f"line {line_no}: expected 5 fields, got {len(parts)}", line_no)
        ts = _int_field(parts[0], "ts_ms", line_no)
        side = _SIDE_CODE.get(parts[1])
        if side is None:
            raise MalformedRow(f"line {line_no}: side {parts[1]!r} is not B or S", line_no)
        price = _int_field(parts[2], "price_ticks", line_no)
        action = _ACTION_CODE.get(parts[3])
        if action is None:
            raise UnknownAction(f"line {line_no}: action {parts[3]!r} is not A, C or X", line_no)
        vol = _int_field(parts[4], "volume_units", line_no)
        if vol < 1:
            raise MalformedRow(f"line {line_no}: volume_units must be >= 1", line_no)
        if prev_ts is not None and ts < prev_ts:
            raise NonMonotonicTimestamp(f"line {line_no}: ts_ms {ts} < {prev_ts}", line_no)
        prev_ts = ts
        yield OrderEvent(ts, side, price, action, vol)


def parse_event_log(stream: IO[str], spec: Optional[MarketSpec] = None) -> EventLog:
    return EventLog(stream, spec)


def read_event_log(path, spec: Optional[MarketSpec] = None) -> list[OrderEvent]:
    """Read a whole log file into memory."""
    with open(path, newline="") as fh:
        return list(parse_event_log(fh, spec))


def format_event(ev: OrderEvent) -> str:
    return (f"{ev.timestamp_ms},{_SIDE_OUT[ev.side]},{ev.price},"
            f"{_ACTION_OUT[ev.action]},{ev.volume}")


def write_event_log(events: Iterable[OrderEvent], stream: IO[str]) -> int:
    """Write ``events`` with the header; returns the number of rows."""
    stream.write(HEADER + "\n")
    n = 0
    for ev in events:
        stream.write(format_event(ev) + "\n")
        n += 1
    return n


# -- numeric exports -------------------------------------------------------------


def _num(x):
    """JSON-safe number: ints stay ints, inf becomes "inf", NaN becomes null."""
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if math.isnan(x):
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


KN_FIELDS = ("Kn_minus", "Kn_plus", "Kn_sym")


def indicator_record_dict(rec, fingerprint: str, symbol: str) -> dict:
    """Flat mapping of one indicator record plus provenance fields."""
    out = {}
    for f in dataclasses.fields(rec):
        name, val = f.name, getattr(rec, f.name)
        if name == "flags":
            out[name] = sorted(val)
        else:
            out[name] = _num(val)
    for name in KN_FIELDS:
        out[name + "_inf"] = bool(math.isinf(getattr(rec, name)))
    out["config"] = fingerprint
    out["symbol"] = symbol
    return out


def write_indicator_jsonl(records: Iterable, stream: IO[str], fingerprint: str,
                          symbol: str = "SYN") -> int:
    n = 0
    for rec in records:
        stream.write(json.dumps(indicator_record_dict(rec, fingerprint, symbol),
                                allow_nan=False) + "\n")
        n += 1
    return n


def read_indicator_jsonl(stream: IO[str]) -> list[dict]:
    """Inverse of :func:`write_indicator_jsonl` with "inf" mapped back to float."""
    out = []
    for line in stream:
        d = json.loads(line)
        for k, v in d.items():
            if v == "inf":
                d[k] = math.inf
            elif v == "-inf":
                d[k] = -math.inf
            elif v is None:
                d[k] = math.nan
        out.append(d)
    return out


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def write_columns(stream: IO[str], names: Iterable[str], *columns, comments: Iterable[str] = ()) -> int:
    """Whitespace-separated columns with a ``#`` header, full round-trip precision."""
    for c in comments:
        stream.write(f"# {c}\n")
    stream.write("# " + " ".join(names) + "\n")
    cols = [np.asarray(c) for c in columns]
    n = len(cols[0]) if cols else 0
    for i in range(n):
        stream.write(" ".join(_fmt(c[i]) for c in cols) + "\n")
    return n
