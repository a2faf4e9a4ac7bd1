"""Fixed-width traffic series and weekday profiles."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Iterable, Sequence

import numpy as np

from .ingest import EmailRecord

WEEKDAYS = ("Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday")


@dataclass(frozen=True)
class TimeSeries:
    start_epoch: int
    bin_width_seconds: int
    counts: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.counts)

    @property
    def bin_starts(self) -> list[int]:
        return [self.start_epoch + i * self.bin_width_seconds for i in range(len(self.counts))]

    def rebin(self, factor: int) -> "TimeSeries":
        """Sum groups of ``factor`` consecutive bins (the tail group may be short)."""
        if factor < 1:
            raise ValueError("factor must be >= 1")
        arr = np.asarray(self.counts, dtype=np.int64)
        pad = (-len(arr)) % factor
        arr = np.concatenate([arr, np.zeros(pad, dtype=np.int64)]).reshape(-1, factor).sum(axis=1)
        return TimeSeries(self.start_epoch, self.bin_width_seconds * factor, tuple(arr.tolist()))

    def to_csv(self, stream) -> None:
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(["bin_start_epoch", "count"])
        w.writerows(zip(self.bin_starts, self.counts))


def _bins(window: tuple[int, int], bin_width: int) -> int:
    start, end = window
    if bin_width <= 0:
        raise ValueError(f"bin width must be positive, got {bin_width}")
    if start > end:
        raise ValueError(f"window start {start} after end {end}")
    return math.ceil((end - start) / bin_width)


def emails_per_bin(records: Iterable[EmailRecord], window: tuple[int, int], bin_width: int = 60) -> TimeSeries:
    """Messages per half-open bin ``[t, t + width)``; one count per record."""
    n = _bins(window, bin_width)
    start, end = window
    counts = [0] * n
    for rec in records:
        if start <= rec.timestamp < end:
            counts[(rec.timestamp - start) // bin_width] += 1
    return TimeSeries(start, bin_width, tuple(counts))


def senders_per_bin(records: Iterable[EmailRecord], window: tuple[int, int], bin_width: int = 60) -> TimeSeries:
    """Distinct sender addresses per bin."""
    n = _bins(window, bin_width)
    start, end = window
    seen: list[set] = [set() for _ in range(n)]
    for rec in records:
        if start <= rec.timestamp < end:
            seen[(rec.timestamp - start) // bin_width].add(rec.sender)
    return TimeSeries(start, bin_width, tuple(len(s) for s in seen))


def record_window(records: Sequence[EmailRecord], bin_width: int = 60) -> tuple[int, int]:
    """Smallest bin-aligned half-open window covering every record."""
    if not records:
        return (0, 0)
    lo = min(r.timestamp for r in records)
    hi = max(r.timestamp for r in records)
    lo -= lo % bin_width
    return lo, hi - hi % bin_width + bin_width


@dataclass
class WeekdayProfile:
    totals: dict[str, int] = field(default_factory=dict)
    friday_ratio: float | None = None
    utc_offset_hours: float = 0.0

    def to_json(self) -> str:
        return json.dumps(
            {
                "totals": self.totals,
                "friday_ratio": self.friday_ratio,
                "utc_offset_hours": self.utc_offset_hours,
            },
            indent=2,
        )


def weekday_profile(records: Iterable[EmailRecord], utc_offset_hours: float = 0.0) -> WeekdayProfile:
    """Message totals per local weekday and Friday / mean(Mon-Thu).

    The ratio is ``None`` when Monday to Thursday carry no traffic.
    """
    tz = timezone(timedelta(hours=utc_offset_hours))
    totals = dict.fromkeys(WEEKDAYS, 0)
    for rec in records:
        totals[WEEKDAYS[datetime.fromtimestamp(rec.timestamp, tz).weekday()]] += 1
    mon_thu = sum(totals[d] for d in WEEKDAYS[:4]) / 4.0
    ratio = totals["Friday"] / mon_thu if mon_thu > 0 else None
    return WeekdayProfile(totals, ratio, utc_offset_hours)
