"""Canonical CSV codec for scan datasets plus class-distribution summaries.

Schema: header `label,height_m,d000,...,d270` (the height_m column is
optional and detected from the header), one labeled scan per data row.
Distances are rendered with 4 decimal places, '.' decimal separator and
'\\n' line endings, so a written file is byte-stable across platforms.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Optional

import numpy as np

from .core import (
    NUM_BEAMS,
    ClassLabel,
    Dataset,
    LabeledScan,
    label_codec,
    validate_scan,
)
from .errors import RowError, SchemaError

DISTANCE_COLUMNS = tuple(f"d{k:03d}" for k in range(NUM_BEAMS))
HEADER_WITH_HEIGHT = "label,height_m," + ",".join(DISTANCE_COLUMNS)
HEADER_NO_HEIGHT = "label," + ",".join(DISTANCE_COLUMNS)


@dataclass
class DatasetSummary:
    counts: dict[ClassLabel, int]
    total: int
    feature_min: np.ndarray
    feature_max: np.ndarray
    feature_mean: np.ndarray

    def to_json(self) -> str:
        payload = {
            "total": self.total,
            "counts": {label.name: self.counts[label] for label in ClassLabel},
            "features": {
                "min": self.feature_min.tolist(),
                "max": self.feature_max.tolist(),
                "mean": self.feature_mean.tolist(),
            },
        }
        return json.dumps(payload, indent=2)


def parse_dataset(stream: IO[str], provenance: str = "") -> Dataset:
    """Parse the canonical CSV into a Dataset; row order is preserved.

    Every row passes through validate_scan, so out-of-range or non-finite
    distances are imputed per the clipping rule. Errors carry 1-based line
    numbers.
    """
    header_line = stream.readline().rstrip("\r\n")
    has_height = _check_header(header_line)
    expected_fields = (2 if has_height else 1) + NUM_BEAMS

    rows: list[LabeledScan] = []
    for line_number, line in enumerate(stream, start=2):
        line = line.rstrip("\r\n")
        if not line:
            continue
        fields = line.split(",")
        if len(fields) != expected_fields:
            raise RowError(
                line_number,
                f"expected {expected_fields} fields, got {len(fields)}",
            )
        try:
            label = label_codec(fields[0])
        except Exception as exc:
            raise RowError(line_number, str(exc)) from exc
        height: Optional[float] = None
        offset = 1
        if has_height:
            offset = 2
            if fields[1] != "":
                try:
                    height = float(fields[1])
                except ValueError as exc:
                    raise RowError(
                        line_number, f"unparseable height_m {fields[1]!r}"
                    ) from exc
        try:
            ranges = [float(v) for v in fields[offset:]]
        except ValueError as exc:
            raise RowError(line_number, f"unparseable distance: {exc}") from exc
        rows.append(LabeledScan(scan=validate_scan(ranges, height), label=label))

    return Dataset(rows=rows, provenance=provenance)


def write_dataset(dataset: Dataset, stream: IO[str]) -> None:
    """Serialize a Dataset to the canonical CSV form.

    The height_m column is emitted when any row carries a height; rows
    without one get an empty field. parse(write(d)) = d for datasets whose
    distances sit on the 4-decimal grid.
    """
    has_height = any(row.scan.height_m is not None for row in dataset.rows)
    stream.write((HEADER_WITH_HEIGHT if has_height else HEADER_NO_HEIGHT) + "\n")
    for row in dataset.rows:
        fields = [row.label.name]
        if has_height:
            h = row.scan.height_m
            fields.append("" if h is None else f"{h:.4f}")
        fields.extend(f"{r:.4f}" for r in row.scan.ranges)
        stream.write(",".join(fields) + "\n")


def summarize(dataset: Dataset) -> DatasetSummary:
    """Exact per-class counts and per-feature min/max/mean."""
    matrix = dataset.feature_matrix()
    return DatasetSummary(
        counts=dataset.class_counts(),
        total=len(dataset),
        feature_min=matrix.min(axis=0),
        feature_max=matrix.max(axis=0),
        feature_mean=matrix.mean(axis=0),
    )


def _check_header(header_line: str) -> bool:
    columns = header_line.split(",")
    if columns and columns[0].startswith("﻿"):
        columns[0] = columns[0].lstrip("﻿")
    for candidate, has_height in ((HEADER_WITH_HEIGHT, True), (HEADER_NO_HEIGHT, False)):
        if columns == candidate.split(","):
            return has_height
    expected = set(HEADER_WITH_HEIGHT.split(","))
    missing = sorted(expected - set(columns) - {"height_m"})
    raise SchemaError(
        "malformed header; expected `label[,height_m],d000,...,d270`"
        + (f" (missing columns: {', '.join(missing[:5])}...)" if missing else "")
    )
