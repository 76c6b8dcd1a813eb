"""Tick ingestion, previous-tick resampling, length alignment and calendar-horizon slicing.

Timestamps are integer nanoseconds since the Unix epoch, UTC. All month
boundaries are calendar-UTC.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import date, datetime, timezone
from typing import BinaryIO, Sequence

import numpy as np

from .errors import DataError, EmptyInputError, HorizonError, TickParseError

NS_PER_S = 1_000_000_000

SERIES_KINDS = ("price", "return", "volatility")


@dataclass(frozen=True)
class TickRecord:
    """One raw trade: timestamp in ns since epoch and a positive price."""

    timestamp: int
    price: float


@dataclass(frozen=True)
class SampledSeries:
    """Equally spaced series: values plus (start_time, delta) grid metadata.

    delta is the sampling interval in ns; kind is one of 'price', 'return',
    'volatility'.
    """

    values: np.ndarray
    start_time: int
    delta: int
    kind: str = "price"

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.ndim != 1 or len(self.values) < 1:
            raise DataError("series must be a non-empty 1-D sequence")
        if self.delta <= 0:
            raise DataError("delta must be a positive number of nanoseconds")
        if self.kind not in SERIES_KINDS:
            raise DataError(f"unknown series kind {self.kind!r}")
        if not np.all(np.isfinite(self.values)):
            raise DataError("series values must be finite")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def end_time(self) -> int:
        """Timestamp of the last sample."""
        return self.start_time + (len(self.values) - 1) * self.delta

    def times(self) -> np.ndarray:
        return self.start_time + self.delta * np.arange(len(self.values), dtype=np.int64)

    def with_values(self, values: np.ndarray, kind: str | None = None,
                    start_time: int | None = None) -> "SampledSeries":
        return SampledSeries(
            values=values,
            start_time=self.start_time if start_time is None else start_time,
            delta=self.delta,
            kind=self.kind if kind is None else kind,
        )


@dataclass(frozen=True)
class HorizonSpec:
    """Calendar partition: expanding window of `months` months from `year_start`."""

    year_start: date
    months: int

    def __post_init__(self):
        if not 1 <= self.months <= 12:
            raise HorizonError(f"months must be in [1, 12], got {self.months}")

    def end_ns(self) -> int:
        """Start of the month after the horizon, as ns since epoch (exclusive bound)."""
        return _month_boundary_ns(self.year_start, self.months)

    def start_ns(self) -> int:
        return _month_boundary_ns(self.year_start, 0)


def _month_boundary_ns(year_start: date, months_ahead: int) -> int:
    month0 = year_start.year * 12 + (year_start.month - 1) + months_ahead
    dt = datetime(month0 // 12, month0 % 12 + 1, 1, tzinfo=timezone.utc)
    return int(dt.timestamp()) * NS_PER_S


def parse_ticks(source: BinaryIO | bytes) -> list[TickRecord]:
    """Parse the tick CSV format (`timestamp_ns,price` header) into sorted records.

    A stable sort by timestamp is applied, so ticks sharing a timestamp keep
    file order (the last one wins downstream in resample).
    """
    if isinstance(source, bytes):
        source = io.BytesIO(source)
    text = io.TextIOWrapper(source, encoding="utf-8", newline="")
    reader = csv.reader(text)
    records: list[TickRecord] = []
    for line_no, row in enumerate(reader, start=1):
        if line_no == 1:
            if row != ["timestamp_ns", "price"]:
                raise TickParseError(line_no, f"bad header {row!r}")
            continue
        if not row or row == [""]:
            continue
        if len(row) != 2:
            raise TickParseError(line_no, f"expected 2 fields, got {len(row)}")
        try:
            ts = int(row[0])
            price = float(row[1])
        except ValueError as exc:
            raise TickParseError(line_no, str(exc)) from None
        if not np.isfinite(price) or price <= 0:
            raise DataError(f"line {line_no}: non-positive or non-finite price {row[1]}")
        records.append(TickRecord(ts, price))
    if not records:
        raise EmptyInputError("tick source contains no records")
    records.sort(key=lambda r: r.timestamp)  # stable
    return records


def resample(ticks: Sequence[TickRecord], delta: int) -> SampledSeries:
    """Previous-tick resampling onto a grid starting at the first tick.

    Grid point t takes the price of the latest tick with timestamp <= t; the
    grid ends at the last grid point not beyond the last tick.
    """
    if not ticks:
        raise EmptyInputError("cannot resample an empty tick sequence")
    if delta <= 0:
        raise DataError("delta must be positive")
    ts = np.array([t.timestamp for t in ticks], dtype=np.int64)
    px = np.array([t.price for t in ticks], dtype=float)
    t0 = int(ts[0])
    n_grid = int((int(ts[-1]) - t0) // delta) + 1
    grid = t0 + delta * np.arange(n_grid, dtype=np.int64)
    # searchsorted 'right' - 1 picks the last tick at or before each grid time;
    # for equal timestamps the last one in (stable-sorted) file order wins.
    idx = np.searchsorted(ts, grid, side="right") - 1
    return SampledSeries(values=px[idx], start_time=t0, delta=int(delta), kind="price")


def align_lengths(series: list[SampledSeries]) -> list[SampledSeries]:
    """Truncate every series from the end to the minimum length; order preserved."""
    if not series:
        raise EmptyInputError("align_lengths requires a non-empty list")
    deltas = {s.delta for s in series}
    if len(deltas) != 1:
        raise DataError(f"all series must share delta, got {sorted(deltas)}")
    n_min = min(len(s) for s in series)
    return [s.with_values(s.values[:n_min]) for s in series]


def slice_horizon(series: SampledSeries, spec: HorizonSpec,
                  mode: str = "expanding") -> SampledSeries:
    """Slice a series to the calendar horizon.

    mode='expanding' (default): prefix covering months 1..M from year_start.
    mode='monthly': the disjoint month M only.
    """
    if mode not in ("expanding", "monthly"):
        raise ValueError(f"unknown horizon mode {mode!r}")
    end_ns = spec.end_ns()
    if series.end_time < end_ns - series.delta:
        raise HorizonError(
            f"series ends at {series.end_time} ns, before the {spec.months}-month "
            f"horizon boundary {end_ns} ns"
        )
    times = series.times()
    lo_ns = _month_boundary_ns(spec.year_start, spec.months - 1) if mode == "monthly" \
        else series.start_time
    mask = (times >= lo_ns) & (times < end_ns)
    if not mask.any():
        raise HorizonError("no samples fall inside the requested horizon")
    return series.with_values(series.values[mask],
                              start_time=int(times[mask][0]))


# --- sampled-series cache CSV ------------------------------------------------

def write_series_csv(series: SampledSeries, path) -> None:
    """Write the cache format: comment header with kind/delta, then t_ns,value rows."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# kind={series.kind} delta_ns={series.delta}\n")
        fh.write("t_ns,value\n")
        for t, v in zip(series.times(), series.values):
            fh.write(f"{t},{float(v)!r}\n")


def read_series_csv(path) -> SampledSeries:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header.startswith("# "):
            raise DataError(f"{path}: missing cache comment header")
        meta = dict(item.split("=", 1) for item in header[2:].split())
        kind = meta["kind"]
        delta = int(meta["delta_ns"])
        col_header = fh.readline().strip()
        if col_header != "t_ns,value":
            raise DataError(f"{path}: bad column header {col_header!r}")
        times = []
        values = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            t_s, v_s = line.split(",")
            times.append(int(t_s))
            values.append(float(v_s))
    if not values:
        raise EmptyInputError(f"{path}: no samples")
    return SampledSeries(values=np.array(values), start_time=times[0],
                         delta=delta, kind=kind)
