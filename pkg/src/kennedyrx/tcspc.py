"""Receiver-side data pipeline: time-tag files, binning, decoding, statistics.

File formats (text, UTF-8, LF line endings):

* event file -- line 1 is exactly ``timestamp_ps``; each following line is
  one base-10 nonnegative integer, non-decreasing top to bottom;
* bit file -- line 1 is exactly ``bit``; each following line is ``0`` or
  ``1``, one per signal bin;
* stats CSV -- header
  ``n_bits,n0,n1,n_e01,n_e10,e01,e10,e_total,ci95_total``, one data row.

Decoding is threshold detection: a bin with at least one photocount reads
as bit 1, an empty bin as bit 0.  The two conditional error channels are
e01 (click in a transmitted-0 bin) and e10 (no click in a transmitted-1
bin).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._fmt import fmt
from .model import TimingConfig

EVENT_FILE_HEADER = "timestamp_ps"
BIT_FILE_HEADER = "bit"
STATS_CSV_HEADER = "n_bits,n0,n1,n_e01,n_e10,e01,e10,e_total,ci95_total"


class EventFileError(ValueError):
    """Base class for time-tag / bit file format violations."""


class MissingHeaderError(EventFileError):
    """First line is not the required header."""


class MalformedLineError(EventFileError):
    """A data line is not a bare nonnegative base-10 integer (or valid bit)."""


class NonMonotoneTimestampError(EventFileError):
    """A timestamp decreases relative to its predecessor."""


def parse_event_file(path) -> np.ndarray:
    """Read an event file into a sorted int64 timestamp array."""
    lines = _read_lines(path, EVENT_FILE_HEADER)
    values = np.empty(len(lines), dtype=np.int64)
    for i, line in enumerate(lines):
        if not (line.isascii() and line.isdigit()):
            raise MalformedLineError(
                f"{path}: line {i + 2}: expected a nonnegative integer, got {line!r}"
            )
        values[i] = int(line)
    if values.size > 1:
        drops = np.nonzero(np.diff(values) < 0)[0]
        if drops.size:
            bad = int(drops[0]) + 1
            raise NonMonotoneTimestampError(
                f"{path}: line {bad + 2}: timestamp {values[bad]} is earlier than "
                f"the preceding {values[bad - 1]}"
            )
    return values


def write_event_file(events, path) -> None:
    """Write sorted timestamps in the event-file format."""
    ts = np.ascontiguousarray(events, dtype=np.int64)
    if ts.size > 1 and np.any(np.diff(ts) < 0):
        raise ValueError("events must be sorted non-decreasing")
    if ts.size and ts[0] < 0:
        raise ValueError("timestamps must be nonnegative")
    _write_lines(path, EVENT_FILE_HEADER, map(str, ts.tolist()))


def parse_bit_file(path) -> np.ndarray:
    """Read a bit file into a uint8 array of 0/1."""
    lines = _read_lines(path, BIT_FILE_HEADER)
    bits = np.empty(len(lines), dtype=np.uint8)
    for i, line in enumerate(lines):
        if line == "0":
            bits[i] = 0
        elif line == "1":
            bits[i] = 1
        else:
            raise MalformedLineError(f"{path}: line {i + 2}: expected 0 or 1, got {line!r}")
    return bits


def write_bit_file(bits, path) -> None:
    """Write a transmitted/decoded bit stream in the bit-file format."""
    arr = np.asarray(getattr(bits, "bits", bits), dtype=np.uint8)
    if arr.size and arr.max() > 1:
        raise ValueError("bit values must be 0 or 1")
    _write_lines(path, BIT_FILE_HEADER, map(str, arr.tolist()))


def _read_lines(path, header: str) -> list[str]:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":  # trailing newline
        lines.pop()
    if not lines or lines[0] != header:
        got = lines[0] if lines else "<empty file>"
        raise MissingHeaderError(f"{path}: line 1: expected header {header!r}, got {got!r}")
    return lines[1:]


def _write_lines(path, header: str, body) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header)
        fh.write("\n")
        for line in body:
            fh.write(line)
            fh.write("\n")


def bin_events(events, timing: TimingConfig, guard_fraction: float = 0.0) -> np.ndarray:
    """Count events per half-period bin, optionally discarding guard margins.

    Bin k covers [k*T + g, (k+1)*T - g) relative to the start offset, with
    g = guard_fraction * T; events inside the discarded margins do not
    count.  Events outside the record span raise.
    """
    if not (0.0 <= guard_fraction <= 0.4):
        raise ValueError(f"guard_fraction must be in [0, 0.4], got {guard_fraction!r}")
    ts = np.ascontiguousarray(events, dtype=np.int64)
    t_bin = timing.bin_duration_ps
    rel = ts - timing.start_offset_ps
    if ts.size and (rel.min() < 0 or rel.max() >= timing.span_ps):
        raise ValueError(
            f"events outside the record span [{timing.start_offset_ps}, "
            f"{timing.start_offset_ps + timing.span_ps}) ps"
        )
    idx = rel // t_bin
    if guard_fraction > 0.0:
        guard = guard_fraction * t_bin
        pos = rel - idx * t_bin
        keep = (pos >= guard) & (pos < t_bin - guard)
        idx = idx[keep]
    return np.bincount(idx, minlength=timing.n_bits).astype(np.int64)


def decode(counts) -> np.ndarray:
    """Threshold decoding: bit 1 iff the bin has at least one count."""
    arr = np.asarray(counts)
    return (arr >= 1).astype(np.uint8)


@dataclass(frozen=True)
class ErrorStats:
    """Error accounting of one transmitted/decoded comparison."""

    n_bits: int
    n0: int
    n1: int
    n_e01: int
    n_e10: int
    e01: float
    e10: float
    e_total: float
    ci95_total: float

    def csv_row(self) -> str:
        return ",".join(
            [
                str(self.n_bits),
                str(self.n0),
                str(self.n1),
                str(self.n_e01),
                str(self.n_e10),
                fmt(self.e01),
                fmt(self.e10),
                fmt(self.e_total),
                fmt(self.ci95_total),
            ]
        )


def compare(tx, rx) -> ErrorStats:
    """Count the two conditional error channels between bit streams.

    e_total carries a normal-approximation 95% half-width
    1.96 * sqrt(p(1-p)/n); the half-width is reported as 0 when p is
    exactly 0 or 1.
    """
    tx_arr = np.asarray(getattr(tx, "bits", tx), dtype=np.uint8)
    rx_arr = np.asarray(getattr(rx, "bits", rx), dtype=np.uint8)
    if tx_arr.shape != rx_arr.shape:
        raise ValueError(f"length mismatch: tx has {tx_arr.size} bits, rx has {rx_arr.size}")
    n = int(tx_arr.size)
    if n == 0:
        raise ValueError("cannot compare empty bit streams")
    n1 = int(np.count_nonzero(tx_arr))
    n0 = n - n1
    n_e01 = int(np.count_nonzero((tx_arr == 0) & (rx_arr == 1)))
    n_e10 = int(np.count_nonzero((tx_arr == 1) & (rx_arr == 0)))
    e01 = n_e01 / n0 if n0 else 0.0
    e10 = n_e10 / n1 if n1 else 0.0
    e_total = (n_e01 + n_e10) / n
    if e_total in (0.0, 1.0):
        ci = 0.0
    else:
        ci = 1.96 * np.sqrt(e_total * (1.0 - e_total) / n)
    return ErrorStats(
        n_bits=n,
        n0=n0,
        n1=n1,
        n_e01=n_e01,
        n_e10=n_e10,
        e01=e01,
        e10=e10,
        e_total=e_total,
        ci95_total=float(ci),
    )


def write_stats_csv(stats: ErrorStats, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(STATS_CSV_HEADER)
        fh.write("\n")
        fh.write(stats.csv_row())
        fh.write("\n")


@dataclass(frozen=True)
class CountHistogram:
    """Photocount frequencies keyed by transmitted bit value."""

    bit0: dict[int, int]
    bit1: dict[int, int]


def photocount_histogram(counts, tx) -> CountHistogram:
    """Empirical photocount frequencies per transmitted bit value."""
    arr = np.asarray(counts, dtype=np.int64)
    tx_arr = np.asarray(getattr(tx, "bits", tx), dtype=np.uint8)
    if arr.shape != tx_arr.shape:
        raise ValueError(f"length mismatch: {arr.size} counts vs {tx_arr.size} bits")
    out = []
    for bit in (0, 1):
        sel = arr[tx_arr == bit]
        freq = np.bincount(sel) if sel.size else np.zeros(0, dtype=np.int64)
        out.append({n: int(c) for n, c in enumerate(freq)})
    return CountHistogram(bit0=out[0], bit1=out[1])
