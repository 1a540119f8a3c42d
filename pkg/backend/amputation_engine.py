#!/usr/bin/env python3
"""
✂️ AMPUTATION ENGINE - Copula-driven Bernoulli missingness masks

All modes threshold copula uniforms against marginal probabilities:
M_ij = 1{U_ij <= p_ij}. Survival flips are skipped for radially symmetric
copulas, where U and 1 - U share a law.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import beta as beta_dist

from config.settings import Config
from .copulas import CopulaSpec
from .datasets import (AmputedDataset, MissingnessMask, apply_mask, as_dataset,
                       check_probabilities)
from .errors import DimensionMismatchError, ValidationError
from .missingness_model import LogisticMissModel, compute_probs
from .rng import Purpose, generator, row_blocks

logger = logging.getLogger(__name__)

AmputationResult = Tuple[MissingnessMask, AmputedDataset]


def _check_probability(value: float, name: str) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValidationError(name, f"must lie in [0, 1], got {value}")
    return value


@lru_cache(maxsize=None)
def _note_skipped_flip(family: str) -> None:
    logger.warning("survival flip skipped for radially symmetric %s copula; pass force_flip=True to apply it",
                   family)


def _orient(u: np.ndarray, copula: CopulaSpec, force_flip: bool) -> np.ndarray:
    """Turn copula draws into draws from the survival copula"""
    if force_flip or not copula.is_radially_symmetric():
        return 1.0 - u
    _note_skipped_flip(copula.family)
    return u


def ampute_rows_iid(y, p, row_copula: CopulaSpec, seed: int, workers: Optional[int] = None,
                    force_flip: bool = False) -> AmputationResult:
    """Rows share one copula; cells within a row depend through it"""
    dataset = as_dataset(y)
    probs = check_probabilities(p, dataset.shape)
    if row_copula.dim != dataset.n_cols:
        raise DimensionMismatchError(f"row copula has dim {row_copula.dim}, data has {dataset.n_cols} columns")
    u = _orient(row_copula.sample(dataset.n_rows, seed, workers), row_copula, force_flip)
    mask = MissingnessMask((u <= probs).astype(np.uint8))
    logger.info("rows-iid amputation of %dx%d with %s: %d cells masked",
                dataset.n_rows, dataset.n_cols, row_copula.family, int(mask.values.sum()))
    return mask, apply_mask(dataset, mask)


def ampute_rows_independent(y, p, row_copulas: Sequence[CopulaSpec], seed: int,
                            workers: Optional[int] = None) -> AmputationResult:
    """Each row i draws from its own copula C_i; rows are independent"""
    dataset = as_dataset(y)
    probs = check_probabilities(p, dataset.shape)
    if len(row_copulas) != dataset.n_rows:
        raise DimensionMismatchError(f"{len(row_copulas)} row copulas for {dataset.n_rows} rows")
    for i, spec in enumerate(row_copulas):
        if spec.dim != dataset.n_cols:
            raise DimensionMismatchError(f"row copula {i} has dim {spec.dim}, data has {dataset.n_cols} columns")

    def draw(block):
        _, start, stop = block
        rows = []
        for i in range(start, stop):
            spec = row_copulas[i]
            u = spec.sample_with(generator(seed, Purpose.PER_ROW_COPULA, i), 1)[0]
            rows.append(_orient(u, spec, False))
        return np.vstack(rows)

    blocks = list(row_blocks(dataset.n_rows, Config.ROW_BLOCK_SIZE))
    workers = workers or Config.WORKERS
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            u = np.vstack(list(pool.map(draw, blocks)))
    else:
        u = np.vstack([draw(block) for block in blocks])
    mask = MissingnessMask((u <= probs).astype(np.uint8))
    return mask, apply_mask(dataset, mask)


@dataclass
class CellGroup:
    """Cells amputed together (all or none) with probability p"""

    cells: List[Tuple[int, int]]
    p: float

    def __post_init__(self):
        self.cells = [(int(i), int(j)) for i, j in self.cells]
        self.p = _check_probability(self.p, "p")
        if not self.cells:
            raise ValidationError("cells", "a group needs at least one cell")

    def to_dict(self) -> Dict[str, Any]:
        return {'cells': [list(c) for c in self.cells], 'p': self.p}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CellGroup":
        if 'cells' in data:
            cells = data['cells']
        elif 'rows' in data and 'columns' in data:
            cells = [(i, j) for i in data['rows'] for j in data['columns']]
        else:
            raise ValidationError("groups", "each group needs 'cells' or 'rows' and 'columns'")
        return cls(cells, data.get('p', 1.0))


@dataclass
class CellSetGroupSpec:
    groups: List[CellGroup]
    cross_copula: CopulaSpec
    default_p: float = 0.0

    def __post_init__(self):
        self.default_p = _check_probability(self.default_p, "default_p")
        if self.cross_copula.dim != len(self.groups):
            raise ValidationError("cross_copula",
                                  f"dim {self.cross_copula.dim} differs from the number of groups ({len(self.groups)})")
        seen = set()
        for k, group in enumerate(self.groups):
            overlap = seen.intersection(group.cells)
            if overlap:
                raise ValidationError(f"groups[{k}]", f"cell {sorted(overlap)[0]} belongs to another group")
            seen.update(group.cells)

    def to_dict(self) -> Dict[str, Any]:
        return {'groups': [g.to_dict() for g in self.groups],
                'cross_copula': self.cross_copula.to_dict(), 'default_p': self.default_p}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CellSetGroupSpec":
        if 'groups' not in data or 'cross_copula' not in data:
            raise ValidationError("cell_sets", "'groups' and 'cross_copula' are required")
        return cls([CellGroup.from_dict(g) for g in data['groups']],
                   CopulaSpec.from_dict(data['cross_copula']), data.get('default_p', 0.0))


def ampute_cell_sets(y, spec: CellSetGroupSpec, seed: int, force_flip: bool = False) -> AmputationResult:
    """One shared uniform per group; cells outside every group use default_p"""
    dataset = as_dataset(y)
    n_rows, n_cols = dataset.shape
    for k, group in enumerate(spec.groups):
        for i, j in group.cells:
            if not (0 <= i < n_rows and 0 <= j < n_cols):
                raise ValidationError(f"groups[{k}]", f"cell ({i}, {j}) outside the {n_rows}x{n_cols} data")
    shared = _orient(spec.cross_copula.sample(1, seed)[0], spec.cross_copula, force_flip)
    if spec.default_p > 0.0:
        background = generator(seed, Purpose.CELL_UNIFORMS).random((n_rows, n_cols))
        values = (background <= spec.default_p).astype(np.uint8)
    else:
        values = np.zeros((n_rows, n_cols), dtype=np.uint8)
    for group, v in zip(spec.groups, shared):
        rows, cols = zip(*group.cells)
        values[list(rows), list(cols)] = 1 if v <= group.p else 0
    mask = MissingnessMask(values)
    logger.debug("cell-set amputation: %d groups, shared uniforms %s", len(spec.groups), shared)
    return mask, apply_mask(dataset, mask)


@dataclass
class MonotoneMixtureSpec:
    """Drop-out rows: complete with probability 1 - miss_row_prob, else cut at a Beta quantile"""

    miss_row_prob: float
    alpha: float
    beta: float
    row_dependence: CopulaSpec = field(repr=False)

    def __post_init__(self):
        self.miss_row_prob = _check_probability(self.miss_row_prob, "miss_row_prob")
        for name in ("alpha", "beta"):
            if not float(getattr(self, name)) > 0.0:
                raise ValidationError(name, "must be positive")
            setattr(self, name, float(getattr(self, name)))

    def to_dict(self) -> Dict[str, Any]:
        return {'miss_row_prob': self.miss_row_prob, 'alpha': self.alpha, 'beta': self.beta,
                'row_dependence': self.row_dependence.to_dict()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "MonotoneMixtureSpec":
        try:
            return cls(data['miss_row_prob'], data['alpha'], data['beta'],
                       CopulaSpec.from_dict(data['row_dependence']))
        except KeyError as missing:
            raise ValidationError(f"monotone.{missing.args[0]}", "required key missing")


def _row_uniforms(row_dependence: CopulaSpec, n_rows: int, seed: int) -> np.ndarray:
    if row_dependence.dim != n_rows:
        raise DimensionMismatchError(f"row dependence has dim {row_dependence.dim}, data has {n_rows} rows")
    return row_dependence.sample(1, seed)[0]


def _cutoff_mask(cutoffs: np.ndarray, n_cols: int) -> np.ndarray:
    """M_ij = 1 for every column at or after the row's cut-off"""
    return (np.arange(n_cols)[None, :] >= np.asarray(cutoffs)[:, None]).astype(np.uint8)


def ampute_monotone_mixture(y, spec: MonotoneMixtureSpec, seed: int) -> AmputationResult:
    dataset = as_dataset(y)
    n_rows, n_cols = dataset.shape
    u = _row_uniforms(spec.row_dependence, n_rows, seed)
    selector = generator(seed, Purpose.MIXTURE_SELECTOR).random(n_rows)
    quantiles = beta_dist.ppf(u, spec.alpha, spec.beta)
    cut = np.clip(np.ceil(n_cols * quantiles).astype(int) - 1, 0, n_cols - 1)
    cutoffs = np.where(selector < spec.miss_row_prob, cut, n_cols)
    mask = MissingnessMask(_cutoff_mask(cutoffs, n_cols))
    logger.info("monotone mixture: %d of %d rows incomplete", int((cutoffs < n_cols).sum()), n_rows)
    return mask, apply_mask(dataset, mask)


def ampute_monotone_uniform(y, row_dependence: CopulaSpec, seed: int) -> AmputationResult:
    """Cut-off J_i = ceil((d + 1) U_i) - 1, every value in 0..d equally likely"""
    dataset = as_dataset(y)
    n_rows, n_cols = dataset.shape
    u = _row_uniforms(row_dependence, n_rows, seed)
    cutoffs = np.clip(np.ceil((n_cols + 1) * u).astype(int) - 1, 0, n_cols)
    mask = MissingnessMask(_cutoff_mask(cutoffs, n_cols))
    return mask, apply_mask(dataset, mask)


def ampute_monotone_discrete(y, cutoff_probs: Sequence[float], row_dependence: CopulaSpec,
                             seed: int) -> AmputationResult:
    """Cut-off J_i drawn from a probability vector over 0..d by the quantile of U_i"""
    dataset = as_dataset(y)
    n_rows, n_cols = dataset.shape
    probs = np.asarray(cutoff_probs, dtype=float)
    if probs.shape != (n_cols + 1,):
        raise DimensionMismatchError(f"need {n_cols + 1} cut-off probabilities, got {probs.size}")
    if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
        raise ValidationError("cutoff_probs", "must be nonnegative and sum to 1")
    u = _row_uniforms(row_dependence, n_rows, seed)
    cutoffs = np.minimum(np.searchsorted(np.cumsum(probs), u, side='left'), n_cols)
    mask = MissingnessMask(_cutoff_mask(cutoffs, n_cols))
    return mask, apply_mask(dataset, mask)


def monotone_probabilities(cutoffs: Sequence[int], n_cols: int) -> np.ndarray:
    """Degenerate probabilities p_ij = 1{j >= J_i}; the mask is then copula-free"""
    cutoffs = np.asarray(cutoffs, dtype=int)
    if np.any(cutoffs < 0) or np.any(cutoffs > n_cols):
        raise ValidationError("cutoffs", f"must lie in 0..{n_cols}")
    return _cutoff_mask(cutoffs, n_cols).astype(float)


def ampute_mechanism(y, model: LogisticMissModel, row_copula: CopulaSpec, seed: int,
                     workers: Optional[int] = None) -> Tuple[MissingnessMask, AmputedDataset, np.ndarray]:
    """P from the logistic model, then rows-iid amputation; P is returned for audit"""
    probs = compute_probs(model, y)
    mask, amputed = ampute_rows_iid(y, probs, row_copula, seed, workers)
    return mask, amputed, probs
