"""Panel data: CSV ingestion, validation, descriptive statistics.

CSV layout::

    dmu,period,in:<name>,...,out:<name>,...

The ``in:``/``out:`` prefixes declare each column's role. Periods are opaque
labels ordered by first appearance in the file unless an explicit order is
given.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterable, Sequence

import numpy as np

from .errors import (
    DimensionError,
    DuplicateKeyError,
    EmptyFileError,
    EmptyPanelError,
    EmptySelectionError,
    HeaderError,
    InputError,
    LookupFailure,
    NegativeValueError,
    NonFiniteError,
    NonNumericError,
    PeriodOrderError,
    RaggedRowError,
)

INPUT_PREFIX = "in:"
OUTPUT_PREFIX = "out:"
STD_CONVENTION = "sample (n-1 denominator)"


@dataclass(frozen=True)
class DmuRecord:
    dmu_id: str
    period: str
    inputs: tuple[float, ...]
    outputs: tuple[float, ...]


@dataclass(frozen=True)
class PanelDataset:
    """Immutable collection of DMU records over ordered periods."""

    input_names: tuple[str, ...]
    output_names: tuple[str, ...]
    periods: tuple[str, ...]
    records: tuple[DmuRecord, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "input_names", tuple(self.input_names))
        object.__setattr__(self, "output_names", tuple(self.output_names))
        object.__setattr__(self, "periods", tuple(self.periods))
        object.__setattr__(self, "records", tuple(self.records))
        if not self.input_names or not self.output_names:
            raise DimensionError("a dataset needs at least one input and one output")
        if not self.records:
            raise EmptyPanelError("a dataset needs at least one record")
        if len(set(self.periods)) != len(self.periods):
            raise PeriodOrderError(f"duplicate period labels in {self.periods}")
        index = {}
        for rec in self.records:
            key = (rec.dmu_id, rec.period)
            if key in index:
                raise InputError(f"duplicate record for dmu {rec.dmu_id!r} in period {rec.period!r}")
            if len(rec.inputs) != len(self.input_names) or len(rec.outputs) != len(self.output_names):
                raise DimensionError(f"record {key} does not match the dataset dimensions")
            if rec.period not in self.periods:
                raise PeriodOrderError(f"record {key} has undeclared period {rec.period!r}")
            values = rec.inputs + rec.outputs
            if not all(math.isfinite(v) for v in values):
                raise NonFiniteError(f"record {key} has non-finite values")
            if any(v < 0 for v in values):
                raise InputError(f"record {key} has negative values")
            index[key] = rec
        object.__setattr__(self, "_index", index)

    @property
    def dims(self) -> tuple[int, int]:
        return len(self.input_names), len(self.output_names)

    def get(self, dmu_id: str, period: str) -> DmuRecord:
        try:
            return self._index[(dmu_id, period)]
        except KeyError:
            if period not in self.periods:
                raise LookupFailure(f"unknown period {period!r}") from None
            raise LookupFailure(f"dmu {dmu_id!r} has no record in period {period!r}") from None

    def has(self, dmu_id: str, period: str) -> bool:
        return (dmu_id, period) in self._index

    def period_records(self, period: str) -> list[DmuRecord]:
        if period not in self.periods:
            raise LookupFailure(f"unknown period {period!r}")
        return [r for r in self.records if r.period == period]

    def dmu_ids(self, period: str | None = None) -> list[str]:
        """DMU ids in dataset order, optionally restricted to one period."""
        recs = self.records if period is None else self.period_records(period)
        return list(dict.fromkeys(r.dmu_id for r in recs))

    def matrices(self, period: str) -> tuple[list[str], np.ndarray, np.ndarray]:
        """``(ids, X, Y)`` for one period; rows are DMUs."""
        recs = self.period_records(period)
        ids = [r.dmu_id for r in recs]
        X = np.array([r.inputs for r in recs], dtype=float).reshape(len(recs), len(self.input_names))
        Y = np.array([r.outputs for r in recs], dtype=float).reshape(len(recs), len(self.output_names))
        return ids, X, Y

    def with_records(self, records: Iterable[DmuRecord], periods: Sequence[str] | None = None) -> "PanelDataset":
        return PanelDataset(self.input_names, self.output_names,
                            self.periods if periods is None else tuple(periods), tuple(records))


def _parse_number(text: str, line: int, column: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise NonNumericError(f"value {text!r} is not a number", line, column) from None
    if not math.isfinite(value):
        raise NonNumericError(f"value {text!r} is not finite", line, column)
    if value < 0:
        raise NegativeValueError(f"negative value {text!r}", line, column)
    return value


def _parse_header(header: list[str]) -> tuple[list[tuple[str, str]], list[str], list[str]]:
    cells = [h.strip() for h in header]
    if len(cells) < 4 or cells[0].lower() != "dmu" or cells[1].lower() != "period":
        raise HeaderError("header must start with 'dmu,period' followed by in:/out: columns", line=1)
    roles = []
    for col, name in enumerate(cells[2:], start=3):
        if name.startswith(INPUT_PREFIX):
            role, label = "in", name[len(INPUT_PREFIX):].strip()
        elif name.startswith(OUTPUT_PREFIX):
            role, label = "out", name[len(OUTPUT_PREFIX):].strip()
        else:
            raise HeaderError(f"column {name!r} lacks an 'in:' or 'out:' prefix", line=1, column=col)
        if not label:
            raise HeaderError("empty variable name", line=1, column=col)
        roles.append((role, label))
    inputs = [label for role, label in roles if role == "in"]
    outputs = [label for role, label in roles if role == "out"]
    if not inputs or not outputs:
        raise HeaderError("header must declare at least one 'in:' and one 'out:' column", line=1)
    for names in (inputs, outputs):
        dupes = [n for n, c in Counter(names).items() if c > 1]
        if dupes:
            raise HeaderError(f"duplicate variable names {dupes}", line=1)
    return roles, inputs, outputs


def parse_panel_csv(source: BinaryIO | bytes | str | Path,
                    period_order: Sequence[str] | None = None) -> PanelDataset:
    """Parse a panel CSV into a :class:`PanelDataset`.

    ``source`` may be a binary stream, raw bytes, or a filesystem path.
    Every malformed input raises a :class:`~frontier_bench.errors.ParseError`
    subclass carrying the line (and column where meaningful).
    """
    if isinstance(source, (str, Path)):
        raw = Path(source).read_bytes()
    elif isinstance(source, (bytes, bytearray)):
        raw = bytes(source)
    else:
        raw = source.read()
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise NonNumericError(f"file is not valid UTF-8: {exc}") from None

    rows = csv.reader(io.StringIO(text, newline=""))
    header = None
    for header in rows:
        if any(cell.strip() for cell in header):
            break
    else:
        header = None
    if header is None:
        raise EmptyFileError("empty file", line=1)
    roles, input_names, output_names = _parse_header(header)
    width = len(roles) + 2

    records = []
    seen: dict[tuple[str, str], int] = {}
    periods: dict[str, None] = {}
    for row in rows:
        line = rows.line_num
        if not any(cell.strip() for cell in row):
            continue
        if len(row) != width:
            raise RaggedRowError(f"expected {width} fields, found {len(row)}", line)
        dmu, period = row[0].strip(), row[1].strip()
        if not dmu:
            raise NonNumericError("empty dmu identifier", line, 1)
        if not period:
            raise NonNumericError("empty period label", line, 2)
        key = (dmu, period)
        if key in seen:
            raise DuplicateKeyError(
                f"duplicate record for dmu {dmu!r} in period {period!r} "
                f"(lines {seen[key]} and {line})",
                (seen[key], line),
            )
        seen[key] = line
        ins, outs = [], []
        for col, ((role, _), cell) in enumerate(zip(roles, row[2:]), start=3):
            value = _parse_number(cell.strip(), line, col)
            (ins if role == "in" else outs).append(value)
        records.append(DmuRecord(dmu, period, tuple(ins), tuple(outs)))
        periods.setdefault(period)
    if not records:
        raise EmptyFileError("file has a header but no data rows", line=2)

    order = list(periods)
    if period_order is not None:
        wanted = [str(p).strip() for p in period_order]
        if sorted(wanted) != sorted(order) or len(set(wanted)) != len(wanted):
            raise PeriodOrderError(
                f"period order {wanted} must list exactly the periods in the file {order}"
            )
        order = wanted
    return PanelDataset(tuple(input_names), tuple(output_names), tuple(order), tuple(records))


def format_number(value: float) -> str:
    """Shortest round-tripping text for a float; integral values drop '.0'."""
    if value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def write_panel_csv(dataset: PanelDataset, stream: io.TextIOBase | None = None) -> str:
    """Serialise in schema order (inputs then outputs), LF line endings."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["dmu", "period"]
                    + [INPUT_PREFIX + n for n in dataset.input_names]
                    + [OUTPUT_PREFIX + n for n in dataset.output_names])
    rank = {p: i for i, p in enumerate(dataset.periods)}
    for rec in sorted(dataset.records, key=lambda r: rank[r.period]):
        writer.writerow([rec.dmu_id, rec.period] + [format_number(v) for v in rec.inputs + rec.outputs])
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text


@dataclass(frozen=True)
class VariableStats:
    variable_name: str
    kind: str
    count: int
    mean: float
    median: float
    mode: float | None
    standard_deviation: float
    minimum: float
    maximum: float
    coefficient_of_variation: float | None


def _mode(values: Sequence[float]) -> float | None:
    counts = Counter(values)
    top = max(counts.values())
    if top < 2:
        return None
    # smallest of the most frequent values keeps the result order-independent
    return min(v for v, c in counts.items() if c == top)


def summarize(name: str, kind: str, values: Sequence[float]) -> VariableStats:
    values = [float(v) for v in values]
    if not values:
        raise EmptySelectionError(f"no values for {name!r}")
    mean = statistics.fmean(values)
    std = statistics.stdev(values) if len(values) > 1 else 0.0
    return VariableStats(
        variable_name=name,
        kind=kind,
        count=len(values),
        mean=mean,
        median=float(statistics.median(values)),
        mode=_mode(values),
        standard_deviation=std,
        minimum=min(values),
        maximum=max(values),
        coefficient_of_variation=std / mean if mean > 0 else None,
    )


def descriptive_stats(dataset: PanelDataset, period: str | None = None) -> list[VariableStats]:
    """Per-variable summary over one period, or every record when ``period`` is None.

    Standard deviation uses the sample (n-1) denominator; a single observation
    reports 0. ``mode`` is None when no value repeats.
    """
    records = dataset.records if period is None else dataset.period_records(period)
    if not records:
        raise EmptySelectionError(f"no records for period {period!r}")
    stats = [summarize(name, "input", [r.inputs[i] for r in records])
             for i, name in enumerate(dataset.input_names)]
    stats += [summarize(name, "output", [r.outputs[i] for r in records])
              for i, name in enumerate(dataset.output_names)]
    return stats


def balanced_subpanel(dataset: PanelDataset, periods: Sequence[str] | None = None
                      ) -> tuple[PanelDataset, list[str]]:
    """Keep only DMUs observed in every requested period.

    Returns the restricted dataset and the ids of the DMUs dropped, in
    first-appearance order.
    """
    periods = tuple(dataset.periods if periods is None else periods)
    if len(periods) < 2:
        raise EmptySelectionError("a balanced subpanel needs at least two periods")
    for p in periods:
        if p not in dataset.periods:
            raise LookupFailure(f"unknown period {p!r}")
    wanted = set(periods)
    keep, skipped = [], []
    for dmu in dataset.dmu_ids():
        if all(dataset.has(dmu, p) for p in periods):
            keep.append(dmu)
        else:
            skipped.append(dmu)
    if not keep:
        raise EmptyPanelError(f"no DMU is observed in all of {list(periods)}")
    kept = set(keep)
    records = [r for r in dataset.records if r.dmu_id in kept and r.period in wanted]
    return dataset.with_records(records, periods), skipped
