#!/usr/bin/env python3
"""
📊 ANALYTICS - Joint missingness probabilities and indicator correlations

Closed forms through the survival copula, Frechet-Hoeffding correlation
bounds, and Monte-Carlo estimates of the same quantities from sampled masks.
"""

import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np

from config.settings import Config
from .copulas import CopulaSpec
from .datasets import MissingnessMask
from .errors import DegenerateMarginError, DimensionMismatchError, ValidationError

logger = logging.getLogger(__name__)

Cell = Tuple[int, int]
MaskStack = Union[np.ndarray, Sequence[MissingnessMask]]


@dataclass
class CellSelection:
    """Ordered cells S with their marginal missingness probabilities p_S"""

    cells: List[Cell]
    probabilities: List[float]

    def __post_init__(self):
        self.cells = [(int(i), int(j)) for i, j in self.cells]
        self.probabilities = [float(p) for p in self.probabilities]
        if len(set(self.cells)) != len(self.cells):
            raise ValidationError("cells", "cells must be distinct")
        if len(self.probabilities) != len(self.cells):
            raise DimensionMismatchError(f"{len(self.probabilities)} probabilities for {len(self.cells)} cells")
        if any(not 0.0 <= p <= 1.0 for p in self.probabilities):
            raise ValidationError("probabilities", "must lie in [0, 1]")


def _check_margin(p: float, name: str) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValidationError(name, "must lie in [0, 1]")
    if p in (0.0, 1.0):
        raise DegenerateMarginError("correlation undefined for degenerate margin")
    return p


def joint_missingness_prob(copula_on_s: CopulaSpec, p_s: Sequence[float]) -> float:
    """P(M = 1 on every cell of S) = survival copula at p_S"""
    return copula_on_s.survival_cdf(p_s)


def joint_complete_prob(copula_on_s: CopulaSpec, p_s: Sequence[float]) -> float:
    """P(M = 0 on every cell of S) = C_S(1 - p_S)"""
    return copula_on_s.cdf(1.0 - np.asarray(p_s, dtype=float))


def row_missing_prob(row_copula: CopulaSpec, p_row: Sequence[float]) -> float:
    """Probability that a whole row is missing under a shared row copula"""
    return joint_missingness_prob(row_copula, p_row)


def product_joint_prob(row_copula: CopulaSpec, selection: CellSelection) -> float:
    """Joint missingness over cells from several rows with iid row copulas

    Rows are independent, so the probability splits into one survival copula
    value per row, with unselected coordinates set to 1.
    """
    by_row = defaultdict(lambda: np.ones(row_copula.dim))
    for (i, j), p in zip(selection.cells, selection.probabilities):
        if not 0 <= j < row_copula.dim:
            raise DimensionMismatchError(f"column {j} outside the row copula of dim {row_copula.dim}")
        by_row[i][j] = p
    return float(np.prod([row_copula.survival_cdf(point) for point in by_row.values()]))


def pairwise_correlation(bivariate_copula: CopulaSpec, p1: float, p2: float) -> float:
    """Pearson correlation of two missingness indicators"""
    if bivariate_copula.dim != 2:
        raise DimensionMismatchError(f"expected a bivariate copula, got dim {bivariate_copula.dim}")
    p1, p2 = _check_margin(p1, "p1"), _check_margin(p2, "p2")
    joint = bivariate_copula.survival_cdf([p1, p2])
    return (joint - p1 * p2) / math.sqrt(p1 * (1.0 - p1) * p2 * (1.0 - p2))


def correlation_bounds(p1: float, p2: float) -> Tuple[float, float]:
    """Attainable (min, max) correlation of Bernoulli(p1) and Bernoulli(p2) indicators"""
    p1, p2 = _check_margin(p1, "p1"), _check_margin(p2, "p2")
    scale = math.sqrt(p1 * (1.0 - p1) * p2 * (1.0 - p2))
    rho_min = (max(p1 + p2 - 1.0, 0.0) - p1 * p2) / scale
    rho_max = (min(p1, p2) - p1 * p2) / scale
    return rho_min, rho_max


def stack_masks(masks: MaskStack) -> np.ndarray:
    """(R, n, d) indicator array from a mask list or an existing array"""
    if isinstance(masks, np.ndarray):
        stacked = masks
    else:
        stacked = np.stack([m.values if isinstance(m, MissingnessMask) else np.asarray(m) for m in masks])
    if stacked.ndim != 3:
        raise DimensionMismatchError(f"expected R x n x d masks, got shape {stacked.shape}")
    return stacked


def _indicators(masks: np.ndarray, cells: Sequence[Cell]) -> np.ndarray:
    rows = [i for i, _ in cells]
    cols = [j for _, j in cells]
    return masks[:, rows, cols]


def empirical_joint_prob(masks: MaskStack, cells: Union[CellSelection, Sequence[Cell]]) -> Tuple[float, float]:
    """Fraction of masks with every selected cell missing, with a 95% half width"""
    stacked = stack_masks(masks)
    if stacked.shape[0] < Config.MC_MIN_SAMPLES:
        raise ValidationError("masks", f"need at least {Config.MC_MIN_SAMPLES} masks, got {stacked.shape[0]}")
    chosen = cells.cells if isinstance(cells, CellSelection) else [(int(i), int(j)) for i, j in cells]
    hits = np.all(_indicators(stacked, chosen) == 1, axis=1)
    estimate = float(hits.mean())
    return estimate, 1.96 * math.sqrt(estimate * (1.0 - estimate) / stacked.shape[0])


def empirical_correlation(masks: MaskStack, cell_a: Cell, cell_b: Cell) -> float:
    stacked = stack_masks(masks)
    series = _indicators(stacked, [cell_a, cell_b]).astype(float)
    if np.any(series.std(axis=0) == 0.0):
        raise DegenerateMarginError("correlation undefined: an indicator series has zero variance")
    return float(np.corrcoef(series[:, 0], series[:, 1])[0, 1])
