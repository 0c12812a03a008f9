"""Flat-file containers: feature matrices, label vectors, probability matrices.

Files are headerless CSV (one instance per line) for features and
probabilities, and one integer per line for labels. Loaded containers are
immutable and safe to share across threads.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DataFormatError, EmptyInputError

ROW_SUM_TOL = 1e-6


def _freeze(arr):
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FeatureMatrix:
    """n x d matrix of per-instance feature (or gradient-embedding) vectors."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise DataFormatError(f"feature matrix must be 2-D and nonempty, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise DataFormatError("feature matrix contains non-finite entries")
        object.__setattr__(self, "values", _freeze(v))

    @property
    def rows(self):
        return self.values.shape[0]

    @property
    def dims(self):
        return self.values.shape[1]


@dataclass(frozen=True)
class LabelVector:
    """Integer class labels in [0, num_classes)."""

    labels: np.ndarray
    num_classes: int

    def __post_init__(self):
        lab = np.asarray(self.labels, dtype=np.int64)
        if lab.ndim != 1 or lab.size < 1:
            raise DataFormatError("label vector must be 1-D and nonempty")
        if self.num_classes < 1:
            raise DataFormatError("num_classes must be >= 1")
        bad = np.flatnonzero((lab < 0) | (lab >= self.num_classes))
        if bad.size:
            raise DataFormatError(
                f"label {lab[bad[0]]} at position {bad[0]} outside [0, {self.num_classes})"
            )
        lab.setflags(write=False)
        object.__setattr__(self, "labels", lab)

    def __len__(self):
        return self.labels.size


@dataclass(frozen=True)
class ProbabilityMatrix:
    """Row-stochastic n x C matrix of predicted class probabilities."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise DataFormatError("probability matrix must be 2-D and nonempty")
        if np.any(v < 0) or np.any(v > 1):
            bad = np.argwhere((v < 0) | (v > 1))[0]
            raise DataFormatError(
                f"probability entry out of [0,1] at row {bad[0]}, column {bad[1]}"
            )
        sums = v.sum(axis=1)
        off = np.flatnonzero(np.abs(sums - 1.0) > ROW_SUM_TOL)
        if off.size:
            raise DataFormatError(
                f"row {off[0]} sums to {sums[off[0]]:.8g}, expected 1 within {ROW_SUM_TOL}"
            )
        object.__setattr__(self, "values", _freeze(v))

    @property
    def rows(self):
        return self.values.shape[0]

    @property
    def num_classes(self):
        return self.values.shape[1]


def _parse_csv(path):
    """Parse a headerless CSV of reals, enforcing rectangularity per line."""
    rows = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise DataFormatError(
                    f"{path}: ragged row at line {lineno}: "
                    f"expected {width} fields, got {len(fields)}"
                )
            try:
                row = [float(tok) for tok in fields]
            except ValueError as exc:
                raise DataFormatError(f"{path}: non-numeric token at line {lineno}: {exc}") from exc
            if not all(np.isfinite(row)):
                raise DataFormatError(f"{path}: non-finite value at line {lineno}")
            rows.append(row)
    if not rows:
        raise EmptyInputError(f"{path}: file contains no data rows")
    return np.array(rows, dtype=np.float64)


def load_features(path):
    """Load a FeatureMatrix from headerless CSV."""
    return FeatureMatrix(_parse_csv(path))


def save_features(matrix, path):
    """Write a FeatureMatrix as CSV with 17 significant digits (round-trip exact)."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in matrix.values:
            fh.write(",".join("%.17g" % x for x in row))
            fh.write("\n")


def load_labels(path, num_classes):
    """Load a LabelVector (one integer per line) and validate the class range."""
    labels = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            tok = line.strip()
            if not tok:
                continue
            try:
                labels.append(int(tok))
            except ValueError as exc:
                raise DataFormatError(f"{path}: non-integer token at line {lineno}: {tok!r}") from exc
    if not labels:
        raise EmptyInputError(f"{path}: file contains no labels")
    return LabelVector(np.array(labels, dtype=np.int64), num_classes)


def load_probabilities(path):
    """Load a row-stochastic ProbabilityMatrix from headerless CSV."""
    return ProbabilityMatrix(_parse_csv(path))
