"""CSV ingestion, return transforms, sample construction and exports."""

import csv
import json
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError
from .models import Sample
from .stats import TestReport


@dataclass
class RawSeries:
    """A univariate series, optionally with ISO-8601 timestamps."""

    values: np.ndarray
    timestamps: list | None = None
    label: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1:
            raise DataError("series values must be one-dimensional")
        if not np.isfinite(self.values).all():
            raise DataError("series contains non-finite values")
        if self.timestamps is not None:
            if len(self.timestamps) != len(self.values):
                raise DataError("timestamps and values differ in length")
            parsed = []
            for i, ts in enumerate(self.timestamps):
                try:
                    parsed.append(datetime.fromisoformat(str(ts)))
                except ValueError as exc:
                    raise DataError(f"timestamp {ts!r} (row {i + 1}) is not ISO-8601") from exc
            for i in range(1, len(parsed)):
                if parsed[i] <= parsed[i - 1]:
                    raise DataError(
                        f"timestamps not strictly increasing at row {i + 1}: "
                        f"{self.timestamps[i - 1]!r} -> {self.timestamps[i]!r}"
                    )

    def __len__(self):
        return len(self.values)


def load_csv(path, value_column: str, timestamp_column: str | None = None) -> RawSeries:
    """Read one value column (and optionally a timestamp column) from a CSV file.

    The file needs a header row; rows with missing or unparsable values are
    rejected with their row numbers.
    """
    path = Path(path)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise DataError(f"{path}: empty file")
            for col in filter(None, (value_column, timestamp_column)):
                if col not in reader.fieldnames:
                    raise DataError(f"{path}: no column named {col!r}; "
                                    f"found {reader.fieldnames}")
            values, stamps, bad = [], [], []
            for i, rec in enumerate(reader, start=2):  # header is line 1
                raw = (rec.get(value_column) or "").strip()
                try:
                    values.append(float(raw))
                except ValueError:
                    bad.append(i)
                    continue
                if timestamp_column:
                    stamps.append((rec.get(timestamp_column) or "").strip())
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if bad:
        raise DataError(f"{path}: missing or unparsable {value_column!r} in rows {bad}")
    if not values:
        raise DataError(f"{path}: no data rows")
    return RawSeries(values=np.array(values),
                     timestamps=stamps if timestamp_column else None,
                     label=value_column)


def log_diff_returns(series: RawSeries) -> RawSeries:
    """Log-difference returns: out[t] = log(v[t+1]) - log(v[t]).

    Timestamps, when present, shift to the later date of each pair.
    """
    v = series.values
    if len(v) < 2:
        raise DataError("need at least two observations to form returns")
    if (v <= 0).any():
        idx = int(np.argmax(v <= 0))
        raise DataError(f"nonpositive value at row {idx + 1}; log returns undefined")
    out = np.diff(np.log(v))
    stamps = series.timestamps[1:] if series.timestamps is not None else None
    return RawSeries(values=out, timestamps=stamps, label=f"dlog({series.label})")


def make_regression_sample(y_series: RawSeries, x_series: RawSeries) -> Sample:
    """Pair two aligned series into a d = 1 regression sample."""
    if len(y_series) != len(x_series):
        raise DataError(f"series lengths differ: y has {len(y_series)}, x has {len(x_series)}")
    return Sample(x=x_series.values[:, None], y=y_series.values.copy())


def lag_embed(series: RawSeries, d: int) -> Sample:
    """Autoregressive design: rows (Y_{t-1}, ..., Y_{t-d}) with response Y_t."""
    if d < 1:
        raise ConfigError("lag count must be at least 1")
    v = series.values
    if len(v) <= d:
        raise DataError(f"series of length {len(v)} cannot be embedded with {d} lag(s)")
    n = len(v) - d
    x = np.empty((n, d))
    for j in range(d):
        x[:, j] = v[d - 1 - j:d - 1 - j + n]
    return Sample(x=x, y=v[d:].copy())


def export_trajectory(profile, path, timestamps: list | None = None) -> None:
    """Write the CUSUM profile as a two-column CSV (s,value or date,value).

    The profile has n+1 entries (k = 0..n); in date mode row k >= 1 carries
    the timestamp of observation k and row 0 is left blank.
    """
    profile = np.asarray(profile, dtype=float)
    n = len(profile) - 1
    if timestamps is not None and len(timestamps) != n:
        raise DataError(f"profile of length n+1={n + 1} needs {n} timestamps, "
                        f"got {len(timestamps)}")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if timestamps is None:
            writer.writerow(["s", "value"])
            for k, v in enumerate(profile):
                writer.writerow(["%.17g" % (k / n), "%.17g" % v])
        else:
            writer.writerow(["date", "value"])
            writer.writerow(["", "%.17g" % profile[0]])
            for k in range(1, n + 1):
                writer.writerow([timestamps[k - 1], "%.17g" % profile[k]])


def load_trajectory(path):
    """Read a trajectory CSV back; returns (labels, values)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        labels, values = [], []
        for rec in reader:
            labels.append(rec[0])
            values.append(float(rec[1]))
    return header, labels, np.array(values)


def export_report(report: TestReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")


def load_report(path) -> TestReport:
    try:
        with open(path, encoding="utf-8") as fh:
            return TestReport.from_dict(json.load(fh))
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise DataError(f"cannot parse report {path}: {exc}") from exc


def export_sample(sample: Sample, path, timestamps: list | None = None) -> None:
    """Write a sample as CSV with columns x (or x1..xd), y at full precision."""
    if timestamps is not None and len(timestamps) != sample.n:
        raise DataError("timestamps and sample differ in length")
    cols = ["x"] if sample.d == 1 else [f"x{j + 1}" for j in range(sample.d)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        header = (["date"] if timestamps is not None else []) + cols + ["y"]
        writer.writerow(header)
        for i in range(sample.n):
            row = [timestamps[i]] if timestamps is not None else []
            row += ["%.17g" % v for v in sample.x[i]]
            row.append("%.17g" % sample.y[i])
            writer.writerow(row)


def load_sample(path) -> Sample:
    """Read a sample CSV produced by ``export_sample``."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        names = reader.fieldnames or []
        xcols = [c for c in names if c == "x" or (c.startswith("x") and c[1:].isdigit())]
        if not xcols or "y" not in names:
            raise DataError(f"{path}: expected x (or x1..xd) and y columns, found {names}")
        xs, ys = [], []
        for rec in reader:
            xs.append([float(rec[c]) for c in xcols])
            ys.append(float(rec["y"]))
    return Sample(x=np.array(xs), y=np.array(ys))
