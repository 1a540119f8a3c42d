#!/usr/bin/env python3
"""
🩹 IMPUTER - Complete-case estimation and FCS imputation with predictive mean matching
"""

import logging
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import linalg

from config.settings import Config
from .datasets import AmputedDataset, CompleteDataset
from .errors import ImputationError, ValidationError
from .rng import Purpose, generator

logger = logging.getLogger(__name__)


def complete_case_mean(x: AmputedDataset, column: int) -> float:
    """Mean of `column` over rows with no missing cell at all"""
    if not 0 <= column < x.shape[1]:
        raise ValidationError("column", f"out of range 0..{x.shape[1] - 1}")
    complete = x.mask.complete_rows()
    if not complete.any():
        raise ImputationError("no complete rows for complete-case analysis")
    return float(np.mean(x.values.data[complete, column]))


class PMMImputer:
    """Fully conditional specification with predictive mean matching

    Each sweep visits the incomplete columns in order: a least-squares fit on
    the rows where the column was observed, a Gaussian draw of the
    coefficients around the fit, then every missing cell receives the
    observed value of one of the `donors` rows with the closest predictions.
    """

    def __init__(self, donors: int = Config.PMM_DONORS, iterations: int = Config.PMM_ITERATIONS,
                 predictors: Optional[Dict[int, Sequence[int]]] = None):
        if donors < 1:
            raise ValidationError("donors", "must be >= 1")
        if iterations < 0:
            raise ValidationError("iterations", "must be >= 0")
        self.donors = int(donors)
        self.iterations = int(iterations)
        self.predictors = {int(k): [int(c) for c in v] for k, v in (predictors or {}).items()}

    def _design(self, filled: np.ndarray, column: int) -> np.ndarray:
        others = self.predictors.get(column)
        if others is None:
            others = [k for k in range(filled.shape[1]) if k != column]
        return np.column_stack([np.ones(filled.shape[0]), filled[:, others]])

    @staticmethod
    def _factor(gram: np.ndarray, column: int) -> np.ndarray:
        """Lower Cholesky factor of X'X, ridged when singular or ill-conditioned"""
        try:
            if np.linalg.cond(gram) < Config.MAX_CONDITION:
                return linalg.cholesky(gram, lower=True)
        except linalg.LinAlgError:
            pass
        logger.warning("singular design for column %d, ridge %.0e applied", column, Config.RIDGE_LAMBDA)
        return linalg.cholesky(gram + Config.RIDGE_LAMBDA * np.eye(gram.shape[0]), lower=True)

    def _draw_coefficients(self, design: np.ndarray, target: np.ndarray, column: int,
                           gen: np.random.Generator) -> np.ndarray:
        lower = self._factor(design.T @ design, column)
        beta_hat = linalg.cho_solve((lower, True), design.T @ target)
        residuals = target - design @ beta_hat
        dof = max(design.shape[0] - design.shape[1], 1)
        sigma = np.sqrt(residuals @ residuals / dof)
        # L^{-T} z has covariance (X'X)^{-1}
        noise = linalg.solve_triangular(lower, gen.standard_normal(design.shape[1]), trans='T', lower=True)
        return beta_hat + sigma * noise

    def _match(self, predicted_obs: np.ndarray, predicted_miss: np.ndarray, observed: np.ndarray,
               gen: np.random.Generator) -> np.ndarray:
        k = min(self.donors, observed.size)
        distance = np.abs(predicted_miss[:, None] - predicted_obs[None, :])
        # stable sort: equal distances keep the lower row index first
        nearest = np.argsort(distance, axis=1, kind='stable')[:, :k]
        pick = gen.integers(0, k, size=predicted_miss.size)
        return observed[nearest[np.arange(predicted_miss.size), pick]]

    def impute_once(self, x: AmputedDataset, gen: np.random.Generator) -> np.ndarray:
        missing = np.ma.getmaskarray(x.values)
        filled = x.values.data.astype(float).copy()
        incomplete = [j for j in range(filled.shape[1]) if missing[:, j].any()]
        for j in incomplete:
            observed = filled[~missing[:, j], j]
            filled[missing[:, j], j] = gen.choice(observed, size=int(missing[:, j].sum()))
        for sweep in range(self.iterations):
            for j in incomplete:
                obs_rows, miss_rows = ~missing[:, j], missing[:, j]
                design = self._design(filled, j)
                target = filled[obs_rows, j]
                beta = self._draw_coefficients(design[obs_rows], target, j, gen)
                filled[miss_rows, j] = self._match(design[obs_rows] @ beta, design[miss_rows] @ beta,
                                                   target, gen)
            logger.debug("PMM sweep %d done over %d columns", sweep + 1, len(incomplete))
        return filled

    def impute(self, x: AmputedDataset, n_imputations: int, seed: int) -> List[CompleteDataset]:
        if n_imputations < 1:
            raise ValidationError("n_imputations", "must be >= 1")
        if x.shape[1] < 2:
            raise ValidationError("x", "need at least 2 columns")
        missing = np.ma.getmaskarray(x.values)
        for j in range(x.shape[1]):
            if missing[:, j].all():
                raise ImputationError(f"column {x.columns[j]} has no observed values")
        if not missing.any():
            return [CompleteDataset(x.values.data.copy(), list(x.columns)) for _ in range(n_imputations)]
        return [CompleteDataset(self.impute_once(x, generator(seed, Purpose.IMPUTATION, t)), list(x.columns))
                for t in range(n_imputations)]


def pmm_impute(x: AmputedDataset, donors: int = Config.PMM_DONORS, n_imputations: int = Config.PMM_IMPUTATIONS,
               gibbs_iterations: int = Config.PMM_ITERATIONS, *, seed: int,
               predictors: Optional[Dict[int, Sequence[int]]] = None) -> List[CompleteDataset]:
    """m completed datasets by FCS + predictive mean matching"""
    return PMMImputer(donors, gibbs_iterations, predictors).impute(x, n_imputations, seed)
