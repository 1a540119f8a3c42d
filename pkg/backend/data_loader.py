#!/usr/bin/env python3
"""
📥 DATA LOADER - CSV ingestion, serialisation and the bundled mtcars data
"""

import logging
import os
from typing import List, Optional, Union

import numpy as np
import pandas as pd

from config.settings import Config
from .datasets import AmputedDataset, CompleteDataset, MissingnessMask, as_dataset
from .errors import DataFormatError, ValidationError

logger = logging.getLogger(__name__)

NA_TOKEN = 'NA'
FLOAT_FORMAT = '%.17g'


class DataLoader:
    """Reads and writes datasets, masks and probability matrices as CSV"""

    def __init__(self, na_token: str = NA_TOKEN):
        self.na_token = na_token

    def _read_text(self, path: str) -> pd.DataFrame:
        if not os.path.exists(path):
            raise DataFormatError(f"no such file: {path}")
        try:
            frame = pd.read_csv(path, dtype=str, keep_default_na=False, na_filter=False, encoding='utf-8')
        except pd.errors.ParserError as e:
            raise DataFormatError(f"ragged CSV {path}: {e}")
        except (UnicodeDecodeError, pd.errors.EmptyDataError) as e:
            raise DataFormatError(f"unreadable CSV {path}: {e}")
        if frame.shape[1] == 0:
            raise DataFormatError(f"no columns in {path}")
        if not isinstance(frame.index, pd.RangeIndex):
            # pandas turns surplus leading fields into an index
            raise DataFormatError("ragged CSV: row has too many fields", row=0)
        short = frame.isna().to_numpy()
        if short.any():
            row, col = np.argwhere(short)[0]
            raise DataFormatError("ragged CSV: row has too few fields", row=int(row), column=frame.columns[col])
        return frame

    def _parse(self, frame: pd.DataFrame, allow_na: bool) -> np.ndarray:
        values = np.empty(frame.shape)
        for j, name in enumerate(frame.columns):
            text = frame[name].str.strip()
            missing = (text == self.na_token).to_numpy()
            if missing.any() and not allow_na:
                raise DataFormatError("NA in a dataset loaded as complete",
                                      row=int(np.flatnonzero(missing)[0]), column=name)
            parsed = pd.to_numeric(text.where(~missing), errors='coerce').to_numpy(dtype=float)
            bad = np.isnan(parsed) & ~missing
            if bad.any():
                row = int(np.flatnonzero(bad)[0])
                raise DataFormatError(f"unparseable numeral {frame[name].iloc[row]!r}", row=row, column=name)
            values[:, j] = parsed
        return values

    def load_csv(self, path: str) -> CompleteDataset:
        frame = self._read_text(path)
        dataset = CompleteDataset(self._parse(frame, allow_na=False), list(frame.columns))
        logger.info("loaded %s: %d rows x %d columns", path, dataset.n_rows, dataset.n_cols)
        return dataset

    def load_amputed(self, path: str) -> AmputedDataset:
        frame = self._read_text(path)
        values = self._parse(frame, allow_na=True)
        return AmputedDataset(np.ma.masked_invalid(values), list(frame.columns))

    def load_mask(self, path: str) -> MissingnessMask:
        frame = self._read_text(path)
        return MissingnessMask(self._parse(frame, allow_na=False).astype(int))

    def save_csv(self, data: Union[CompleteDataset, AmputedDataset], path: str) -> str:
        data.to_frame().to_csv(path, index=False, na_rep=self.na_token, float_format=FLOAT_FORMAT,
                               lineterminator='\n')
        return path

    def save_mask(self, mask: MissingnessMask, path: str, columns: List[str]) -> str:
        pd.DataFrame(mask.values.astype(int), columns=columns).to_csv(path, index=False, lineterminator='\n')
        return path

    def save_assignment(self, assignment: np.ndarray, path: str) -> str:
        """Scenario index of every row, in the caller's row order"""
        pd.DataFrame({'scenario': np.asarray(assignment, dtype=int)}).to_csv(path, index=False, lineterminator='\n')
        return path

    def save_matrix(self, matrix: np.ndarray, path: str, columns: List[str]) -> str:
        pd.DataFrame(np.asarray(matrix, dtype=float), columns=columns).to_csv(
            path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
        return path


def range_transform(y, sort_by: Optional[Union[int, str]] = None) -> CompleteDataset:
    """Map each column onto [0, 1] by (x - min) / (max - min); optionally stable-sort rows"""
    dataset = as_dataset(y)
    low, high = dataset.values.min(axis=0), dataset.values.max(axis=0)
    constant = np.flatnonzero(high == low)
    if constant.size:
        raise ValidationError(f"columns.{dataset.columns[constant[0]]}", "constant column cannot be range-transformed")
    values = (dataset.values - low) / (high - low)
    if sort_by is not None:
        if isinstance(sort_by, str):
            if sort_by not in dataset.columns:
                raise ValidationError("sort_by", f"unknown column {sort_by!r}")
            column = dataset.columns.index(sort_by)
        else:
            column = int(sort_by)
            if not 0 <= column < dataset.n_cols:
                raise ValidationError("sort_by", f"column index {column} outside 0..{dataset.n_cols - 1}")
        values = values[np.argsort(values[:, column], kind='stable')]
    return CompleteDataset(values, list(dataset.columns))


def load_csv(path: str) -> CompleteDataset:
    return DataLoader().load_csv(path)


def save_csv(data: Union[CompleteDataset, AmputedDataset], path: str) -> str:
    return DataLoader().save_csv(data, path)


def load_mtcars() -> CompleteDataset:
    return load_csv(Config.mtcars_path())


def load_mtcars01() -> CompleteDataset:
    """mtcars range-transformed to [0, 1], rows sorted by increasing mpg"""
    return range_transform(load_mtcars(), sort_by='mpg')
