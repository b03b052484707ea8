"""Domain types for labeled 2D range slices.

A scan is a single horizontal slice of an indoor space: 271 beam distances
covering 270 degrees at 1 degree pitch (beam k points at -135 + k degrees
relative to the sensor heading). Distances are meters, clipped to the
sensor envelope [0.001, 30.0].
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DimensionError, EmptyDatasetError, UnknownLabelError

NUM_BEAMS = 271
MIN_RANGE_M = 0.001
MAX_RANGE_M = 30.0
BEAM_ANGLES_DEG = tuple(-135.0 + k for k in range(NUM_BEAMS))


class ClassLabel(IntEnum):
    """The four place categories, in canonical index order."""

    corridor = 0
    staircase = 1
    restroom = 2
    shared_space = 3


LABEL_NAMES = tuple(label.name for label in ClassLabel)
NUM_CLASSES = len(LABEL_NAMES)


def label_codec(value) -> ClassLabel:
    """Decode a class label from its canonical string or index.

    Strings are matched case-insensitively; hyphens and spaces are treated
    as underscores. Raises UnknownLabelError for anything else.
    """
    if isinstance(value, ClassLabel):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        if 0 <= int(value) < NUM_CLASSES:
            return ClassLabel(int(value))
        raise UnknownLabelError(
            f"label index {value!r} out of range; valid indices are 0..{NUM_CLASSES - 1}"
        )
    if isinstance(value, str):
        normalized = value.strip().lower().replace("-", "_").replace(" ", "_")
        if normalized in LABEL_NAMES:
            return ClassLabel[normalized]
    raise UnknownLabelError(
        f"unknown label {value!r}; valid labels are {', '.join(LABEL_NAMES)}"
    )


@dataclass(frozen=True, eq=False)
class Scan:
    """One 271-beam range slice. `height_m` is capture-height metadata only."""

    ranges: np.ndarray
    height_m: Optional[float] = None

    def __post_init__(self):
        self.ranges.setflags(write=False)

    def __eq__(self, other):
        if not isinstance(other, Scan):
            return NotImplemented
        return (
            np.array_equal(self.ranges, other.ranges)
            and self.height_m == other.height_m
        )


def validate_scan(raw: Sequence[float], height_m: Optional[float] = None) -> Scan:
    """Build a valid Scan from raw beam distances.

    Out-of-range and non-finite readings are imputed rather than dropped so
    the feature dimension stays fixed: values above 30 m or non-finite
    become 30.0 (no-return), values at or below the lower clip become
    0.001 m. A wrong beam count raises DimensionError.
    """
    ranges = np.asarray(raw, dtype=np.float64)
    if ranges.ndim != 1 or ranges.shape[0] != NUM_BEAMS:
        raise DimensionError(
            f"expected {NUM_BEAMS} beam distances, got {ranges.size}"
        )
    ranges = np.where(np.isfinite(ranges), ranges, MAX_RANGE_M)
    ranges = np.clip(ranges, MIN_RANGE_M, MAX_RANGE_M)
    if height_m is not None:
        height_m = float(height_m)
        if height_m < 0 or not math.isfinite(height_m):
            raise ValueError(f"height_m must be finite and non-negative, got {height_m}")
    return Scan(ranges=ranges, height_m=height_m)


@dataclass(frozen=True)
class LabeledScan:
    scan: Scan
    label: ClassLabel


@dataclass
class Dataset:
    """An ordered, non-empty collection of labeled scans."""

    rows: list[LabeledScan]
    provenance: str = ""

    def __post_init__(self):
        if not self.rows:
            raise EmptyDatasetError("a dataset must contain at least one row")

    def __len__(self) -> int:
        return len(self.rows)

    def feature_matrix(self) -> np.ndarray:
        return np.stack([row.scan.ranges for row in self.rows])

    def label_vector(self) -> np.ndarray:
        return np.array([int(row.label) for row in self.rows], dtype=np.int64)

    def class_counts(self) -> dict[ClassLabel, int]:
        counts = {label: 0 for label in ClassLabel}
        for row in self.rows:
            counts[row.label] += 1
        return counts

    def subset(self, indices: Iterable[int], provenance: str = "") -> "Dataset":
        return Dataset(
            rows=[self.rows[i] for i in indices],
            provenance=provenance or self.provenance,
        )
