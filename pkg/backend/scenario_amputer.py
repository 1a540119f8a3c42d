#!/usr/bin/env python3
"""
🎭 SCENARIO AMPUTER - Pattern-based multivariate amputation

Rows are shuffled, split into K scenarios, and each row receives its
scenario's pattern with a logistic probability of its weighted sum score,
otherwise it stays complete.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from .datasets import AmputedDataset, MissingnessMask, apply_mask, as_dataset
from .errors import DimensionMismatchError, ValidationError
from .rng import Purpose, generator

logger = logging.getLogger(__name__)

FREQUENCY_TOLERANCE = 1e-9


def largest_remainder(frequencies: Sequence[float], total: int) -> np.ndarray:
    """Integer sizes summing to total; leftover units go to the largest fractional parts"""
    quotas = np.asarray(frequencies, dtype=float) * total
    sizes = np.floor(quotas).astype(int)
    leftover = total - int(sizes.sum())
    # stable sort keeps lower scenario indices first among equal remainders
    order = np.argsort(-(quotas - sizes), kind='stable')
    sizes[order[:leftover]] += 1
    return sizes


@dataclass
class ScenarioSpec:
    """K missingness patterns, their allocation and their weighted sum scores

    `weights[k]` is (w_k0, w_k1, ..., w_kd). Exactly one of `frequencies`
    and `partition` is given; a partition lists positions in the (possibly
    permuted) row order.
    """

    patterns: np.ndarray
    weights: np.ndarray
    frequencies: Optional[List[float]] = None
    partition: Optional[List[List[int]]] = None
    permute_rows: bool = True

    def __post_init__(self):
        self.patterns = np.asarray(self.patterns, dtype=np.uint8)
        if self.patterns.ndim != 2 or not np.all(self.patterns <= 1):
            raise ValidationError("patterns", "expected K rows of 0/1 entries")
        n_scenarios, n_cols = self.patterns.shape
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.shape != (n_scenarios, n_cols + 1):
            raise ValidationError("weights", f"expected shape ({n_scenarios}, {n_cols + 1}), got {self.weights.shape}")
        if not np.all(np.isfinite(self.weights)):
            raise ValidationError("weights", "must be finite")
        if (self.frequencies is None) == (self.partition is None):
            raise ValidationError("allocation", "give exactly one of 'frequencies' and 'partition'")
        if self.frequencies is not None:
            freqs = np.asarray(self.frequencies, dtype=float)
            if freqs.shape != (n_scenarios,) or np.any(freqs < 0):
                raise ValidationError("frequencies", f"need {n_scenarios} nonnegative values")
            if abs(freqs.sum() - 1.0) > FREQUENCY_TOLERANCE:
                raise ValidationError("frequencies", f"must sum to 1, got {freqs.sum()}")
            self.frequencies = freqs.tolist()
        else:
            if len(self.partition) != n_scenarios:
                raise ValidationError("partition", f"need {n_scenarios} row lists")
            self.partition = [[int(r) for r in rows] for rows in self.partition]
        for k in range(n_scenarios):
            referenced = np.flatnonzero((self.weights[k, 1:] != 0) & (self.patterns[k] == 1))
            if referenced.size:
                logger.warning("scenario %d weights reference pattern-missing columns %s",
                               k, referenced.tolist())

    @property
    def n_cols(self) -> int:
        return self.patterns.shape[1]

    def allocation(self, n_rows: int) -> List[np.ndarray]:
        """Positions (in shuffled order) belonging to each scenario"""
        if self.partition is not None:
            members = sorted(r for rows in self.partition for r in rows)
            if members != list(range(n_rows)):
                raise ValidationError("partition", f"must cover rows 0..{n_rows - 1} disjointly")
            return [np.asarray(rows, dtype=int) for rows in self.partition]
        sizes = largest_remainder(self.frequencies, n_rows)
        for k, (size, freq) in enumerate(zip(sizes, self.frequencies)):
            if size == 0 and freq > 0:
                raise ValidationError(f"frequencies[{k}]", f"positive frequency gives no rows out of {n_rows}")
        bounds = np.concatenate([[0], np.cumsum(sizes)])
        return [np.arange(bounds[k], bounds[k + 1]) for k in range(len(sizes))]

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {'patterns': self.patterns.tolist(), 'weights': self.weights.tolist(),
                                'permute_rows': self.permute_rows}
        if self.frequencies is not None:
            data['frequencies'] = list(self.frequencies)
        else:
            data['partition'] = self.partition
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ScenarioSpec":
        if 'patterns' not in data or 'weights' not in data:
            raise ValidationError("scenario", "'patterns' and 'weights' are required")
        return cls(data['patterns'], data['weights'], data.get('frequencies'),
                   data.get('partition'), bool(data.get('permute_rows', True)))


def scenario_ampute(y, spec: ScenarioSpec, seed: int) -> Tuple[MissingnessMask, AmputedDataset, np.ndarray]:
    """Returns the mask, the amputed data and each row's scenario index (original row order)"""
    dataset = as_dataset(y)
    n_rows, n_cols = dataset.shape
    if spec.n_cols != n_cols:
        raise DimensionMismatchError(f"patterns have width {spec.n_cols}, data has {n_cols} columns")

    if spec.permute_rows:
        order = generator(seed, Purpose.ROW_PERMUTATION).permutation(n_rows)
    else:
        order = np.arange(n_rows)
    assignment = np.empty(n_rows, dtype=int)
    for k, positions in enumerate(spec.allocation(n_rows)):
        assignment[order[positions]] = k

    scores = spec.weights[assignment, 0] + np.einsum('ij,ij->i', spec.weights[assignment, 1:], dataset.values)
    draws = generator(seed, Purpose.SCENARIO_DRAWS).random(n_rows)
    hit = draws < expit(scores)
    values = np.where(hit[:, None], spec.patterns[assignment], 0).astype(np.uint8)
    mask = MissingnessMask(values)
    logger.info("scenario amputation: %d scenarios, %d of %d rows amputed",
                spec.patterns.shape[0], int(hit.sum()), n_rows)
    return mask, apply_mask(dataset, mask), assignment
