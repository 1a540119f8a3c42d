#!/usr/bin/env python3
"""
🗂️ DATASETS - Complete data, missingness masks and amputed data
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from .errors import DataFormatError, DimensionMismatchError, ValidationError


def _default_columns(n_cols: int) -> List[str]:
    return [f"V{j + 1}" for j in range(n_cols)]


@dataclass
class CompleteDataset:
    """n x d matrix of finite reals with column names"""

    values: np.ndarray
    columns: List[str] = field(default_factory=list)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise DataFormatError(f"expected a 2-D matrix, got {values.ndim} dimension(s)")
        bad = np.argwhere(~np.isfinite(values))
        if bad.size:
            row, col = (int(x) for x in bad[0])
            raise DataFormatError("non-finite value in complete dataset", row=row,
                                  column=self.columns[col] if self.columns else str(col))
        self.values = values
        if not self.columns:
            self.columns = _default_columns(values.shape[1])
        self.columns = [str(c) for c in self.columns]
        if len(self.columns) != values.shape[1]:
            raise DimensionMismatchError(f"{len(self.columns)} column names for {values.shape[1]} columns")

    @property
    def shape(self):
        return self.values.shape

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.values, columns=self.columns)

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "CompleteDataset":
        return cls(frame.to_numpy(dtype=float), list(frame.columns))


@dataclass
class MissingnessMask:
    """n x d indicator matrix; 1 marks a missing cell"""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim != 2:
            raise DataFormatError("mask must be a 2-D matrix")
        if not np.all((values == 0) | (values == 1)):
            raise DataFormatError("mask entries must be 0 or 1")
        self.values = values.astype(np.uint8)

    @property
    def shape(self):
        return self.values.shape

    def complete_rows(self) -> np.ndarray:
        """Boolean vector, True where a row has no missing cell"""
        return ~self.values.any(axis=1)


@dataclass
class AmputedDataset:
    """Complete data with missing cells hidden; a cell is NA iff its mask entry is 1"""

    values: np.ma.MaskedArray
    columns: List[str]

    @property
    def shape(self):
        return self.values.shape

    @property
    def mask(self) -> MissingnessMask:
        return MissingnessMask(np.ma.getmaskarray(self.values).astype(np.uint8))

    def observed(self, column: int) -> np.ndarray:
        """Observed values of one column, in row order"""
        return self.values[:, column].compressed()

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.values.filled(np.nan), columns=self.columns)

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "AmputedDataset":
        data = frame.to_numpy(dtype=float)
        return cls(np.ma.masked_invalid(data), [str(c) for c in frame.columns])


def as_matrix(y) -> np.ndarray:
    """Plain float matrix from a CompleteDataset or array-like"""
    if isinstance(y, CompleteDataset):
        return y.values
    return CompleteDataset(np.asarray(y, dtype=float)).values


def as_dataset(y, columns: Optional[Sequence[str]] = None) -> CompleteDataset:
    if isinstance(y, CompleteDataset):
        return y
    return CompleteDataset(np.asarray(y, dtype=float), list(columns or []))


def check_probabilities(p, shape) -> np.ndarray:
    """Validate a missingness probability matrix against the data shape"""
    matrix = np.asarray(p, dtype=float)
    if matrix.ndim == 0:
        matrix = np.full(shape, float(matrix))
    if matrix.shape != tuple(shape):
        raise DimensionMismatchError(f"probability matrix has shape {matrix.shape}, data has {tuple(shape)}")
    if np.any(~np.isfinite(matrix)) or np.any(matrix < 0.0) or np.any(matrix > 1.0):
        raise ValidationError("probabilities", "entries must lie in [0, 1]")
    return matrix


def apply_mask(y, m) -> AmputedDataset:
    """X = NA where m = 1, Y elsewhere"""
    dataset = as_dataset(y)
    mask = m if isinstance(m, MissingnessMask) else MissingnessMask(m)
    if mask.shape != dataset.shape:
        raise DimensionMismatchError(f"mask shape {mask.shape} differs from data shape {dataset.shape}")
    return AmputedDataset(np.ma.MaskedArray(dataset.values.copy(), mask=mask.values.astype(bool)),
                          list(dataset.columns))
