"""Delimited-text dataset loading and report serialization.

Bundled datasets (raw, unscaled features):

========  =====  ==  ==========================================
name      n      d   notes
========  =====  ==  ==========================================
iris      150    4   label = species id (0, 1, 2)
cats      144    2   body weight (kg), heart weight (g); sex is
                     the label column and is not a feature
bcw       569    30  Wisconsin diagnostic; label 1 = malignant
========  =====  ==  ==========================================

The Olivetti faces and 20-newsgroups matrices are not bundled; pass your
own :class:`DatasetManifest` pointing at an exported feature matrix.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Optional

import numpy as np

from .core import Dataset

__all__ = [
    "DatasetError",
    "DatasetManifest",
    "BUILTIN_MANIFESTS",
    "OPTIONAL_MANIFESTS",
    "builtin_manifest",
    "load_dataset",
    "load_builtin",
    "save_dataset",
    "REPORT_COLUMNS",
    "ReportRow",
    "report_rows",
    "render_report",
    "write_report",
    "read_report",
]


class DatasetError(Exception):
    """A dataset file is missing or malformed."""


@dataclass(frozen=True)
class DatasetManifest:
    path: str
    feature_columns: tuple
    label_column: Optional[int] = None
    delimiter: str = ","
    has_header: bool = True
    name: str = ""
    loss_scale: float = 1.0  # divide losses by this when displaying

    def __post_init__(self):
        object.__setattr__(self, "feature_columns", tuple(int(c) for c in self.feature_columns))
        if not self.feature_columns:
            raise DatasetError("feature_columns must not be empty")
        if self.label_column is not None and self.label_column in self.feature_columns:
            raise DatasetError("label_column must not also be a feature column")
        if len(self.delimiter) != 1:
            raise DatasetError("delimiter must be a single character")


def _data_path(filename: str) -> str:
    return str(resources.files("smartigan").joinpath("data", filename))


BUILTIN_MANIFESTS = {
    "iris": DatasetManifest(_data_path("iris.csv"), (0, 1, 2, 3), 4, name="iris"),
    "cats": DatasetManifest(_data_path("cats.csv"), (1, 2), 0, name="cats"),
    "bcw": DatasetManifest(_data_path("bcw.csv"), tuple(range(30)), 30, name="bcw", loss_scale=1e7),
}

# Known shapes of the third-party matrices; the user supplies the files.
OPTIONAL_MANIFESTS = {
    "olivetti": (400, 4096, 40),
    "20ng-a": (200, 5000, 2),
    "20ng-b": (500, 5000, 5),
    "20ng-c": (1000, 5000, 10),
}


def builtin_manifest(name: str) -> DatasetManifest:
    try:
        return BUILTIN_MANIFESTS[name]
    except KeyError:
        raise DatasetError(
            f"unknown dataset {name!r}; bundled: {', '.join(sorted(BUILTIN_MANIFESTS))}"
        ) from None


def load_dataset(manifest: DatasetManifest) -> Dataset:
    """Parse a delimited file into a :class:`Dataset`.

    Every feature cell must parse as a finite float; anything else raises
    :class:`DatasetError` naming the 1-based line and 0-based column.
    Label cells that are integers are used as-is, otherwise distinct label
    strings are numbered in sorted order.
    """
    if not os.path.isfile(manifest.path):
        raise DatasetError(f"{manifest.path}: no such file")
    with open(manifest.path, newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f, delimiter=manifest.delimiter))
    first = 1 if manifest.has_header else 0
    body = [(i + 1, r) for i, r in enumerate(rows) if i >= first and r]
    if not body:
        raise DatasetError(f"{manifest.path}: no data rows")
    width = len(body[0][1])
    needed = max(manifest.feature_columns + ((manifest.label_column,) if manifest.label_column is not None else ()))
    if needed >= width:
        raise DatasetError(f"{manifest.path}: column {needed} requested but rows have {width} fields")

    points = np.empty((len(body), len(manifest.feature_columns)), dtype=np.float64)
    raw_labels = []
    for r, (line, row) in enumerate(body):
        if len(row) != width:
            raise DatasetError(f"{manifest.path}:{line}: expected {width} fields, found {len(row)}")
        for c, col in enumerate(manifest.feature_columns):
            cell = row[col].strip()
            try:
                v = float(cell)
            except ValueError:
                raise DatasetError(
                    f"{manifest.path}:{line}: column {col}: {cell!r} is not a number"
                ) from None
            if not math.isfinite(v):
                raise DatasetError(f"{manifest.path}:{line}: column {col}: non-finite value {cell!r}")
            points[r, c] = v
        if manifest.label_column is not None:
            raw_labels.append(row[manifest.label_column].strip())

    labels = None
    if manifest.label_column is not None:
        try:
            labels = np.array([int(v) for v in raw_labels], dtype=np.int64)
        except ValueError:
            names = sorted(set(raw_labels))
            ids = {v: i for i, v in enumerate(names)}
            labels = np.array([ids[v] for v in raw_labels], dtype=np.int64)
    name = manifest.name or os.path.splitext(os.path.basename(manifest.path))[0]
    return Dataset(points, labels, name=name)


def load_builtin(name: str) -> Dataset:
    return load_dataset(builtin_manifest(name))


def save_dataset(data: Dataset, path: str) -> DatasetManifest:
    """Write features (full precision) and labels, if any, as CSV."""
    d = data.d
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        header = [f"x{t}" for t in range(d)]
        if data.labels is not None:
            header.append("label")
        w.writerow(header)
        for i in range(data.n):
            row = [repr(float(v)) for v in data.points[i]]
            if data.labels is not None:
                row.append(str(int(data.labels[i])))
            w.writerow(row)
    return DatasetManifest(
        path, tuple(range(d)), d if data.labels is not None else None, name=data.name
    )


REPORT_COLUMNS = (
    "dataset",
    "algorithm",
    "k",
    "runs",
    "mean_loss",
    "std_loss",
    "min_loss",
    "mean_nmi",
    "pct_vs_baseline",
)


@dataclass(frozen=True)
class ReportRow:
    dataset: str
    algorithm: str
    k: int
    runs: int
    mean_loss: float
    std_loss: float
    min_loss: float
    mean_nmi: Optional[float] = None
    pct_vs_baseline: Optional[float] = None


def report_rows(reports: Iterable) -> list:
    """Flatten RunReports and PairedComparisons into :class:`ReportRow` s."""
    rows = []
    for rep in reports:
        if isinstance(rep, ReportRow):
            rows.append(rep)
        elif hasattr(rep, "report_rows"):
            rows.extend(rep.report_rows())
        else:
            loss = float(rep.final_loss)
            rows.append(
                ReportRow(rep.dataset, rep.algorithm, int(rep.k), 1, loss, 0.0, loss, rep.nmi, None)
            )
    return rows


def _fmt(v) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def _cells(row: ReportRow) -> list:
    return [_fmt(getattr(row, c)) for c in REPORT_COLUMNS]


def render_report(reports, format: str = "csv", title: Optional[str] = None) -> str:
    """Format a results table as CSV or markdown text.

    Floats are printed with 6 decimals; missing NMI or percentage cells are
    left blank.  The CSV starts with the fixed ``REPORT_COLUMNS`` header;
    the markdown form may carry a ``title`` line above the table.
    """
    rows = report_rows(reports)
    if not rows:
        raise ValueError("nothing to write")
    buf = io.StringIO()
    if format == "csv":
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for r in rows:
            w.writerow(_cells(r))
    elif format in ("markdown", "markdown_table"):
        if title:
            buf.write(f"{title}\n\n")
        buf.write("| " + " | ".join(REPORT_COLUMNS) + " |\n")
        buf.write("|" + "|".join("---" for _ in REPORT_COLUMNS) + "|\n")
        for r in rows:
            buf.write("| " + " | ".join(_cells(r)) + " |\n")
    else:
        raise ValueError(f"unknown report format {format!r}")
    return buf.getvalue()


def write_report(reports, path: str, format: str = "csv", title: Optional[str] = None) -> None:
    """Write :func:`render_report` output to ``path``."""
    text = render_report(reports, format, title)
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            f.write(text)
    except OSError as exc:
        raise DatasetError(f"cannot write report to {path}: {exc}") from exc


def read_report(path: str) -> list:
    """Inverse of :func:`write_report` for the CSV format."""
    def opt(v):
        return None if v == "" else float(v)

    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if tuple(reader.fieldnames or ()) != REPORT_COLUMNS:
            raise DatasetError(f"{path}: unexpected header {reader.fieldnames}")
        return [
            ReportRow(
                r["dataset"], r["algorithm"], int(r["k"]), int(r["runs"]),
                float(r["mean_loss"]), float(r["std_loss"]), float(r["min_loss"]),
                opt(r["mean_nmi"]), opt(r["pct_vs_baseline"]),
            )
            for r in reader
        ]
