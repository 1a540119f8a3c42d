#!/usr/bin/env python3
"""
🎯 BIAS STUDY - Repeated amputation and mean estimation

Each replication amputes the dataset under one mechanism, estimates the
target column's mean (complete cases or FCS + PMM multiple imputation) and
records the bias against the complete-data mean.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Tuple, Union

import numpy as np
import pandas as pd

from config.settings import Config
from .amputation_engine import ampute_mechanism
from .copulas import CopulaSpec
from .datasets import CompleteDataset
from .errors import ImputationError, ValidationError
from .imputer import PMMImputer, complete_case_mean
from .missingness_model import LogisticMissModel
from .rng import Purpose, check_seed, derive_seed

logger = logging.getLogger(__name__)


class Estimator(str, Enum):
    COMPLETE_CASE = "complete-case"
    PMM_MICE = "pmm-mice"


@dataclass
class Mechanism:
    label: str
    model: LogisticMissModel
    copula: CopulaSpec

    def to_dict(self) -> Dict[str, Any]:
        return {'label': self.label, 'model': self.model.to_dict(), 'copula': self.copula.to_dict()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Mechanism":
        if not {'label', 'model', 'copula'} <= set(data):
            raise ValidationError("mechanisms", "each mechanism needs 'label', 'model' and 'copula'")
        return cls(str(data['label']), LogisticMissModel.from_dict(data['model']),
                   CopulaSpec.from_dict(data['copula']))


@dataclass
class BiasStudyConfig:
    dataset: CompleteDataset
    mechanisms: List[Mechanism]
    seed: int
    target: Union[int, str] = 'qsec'
    replications: int = Config.BIAS_REPLICATIONS
    estimator: Estimator = Estimator.COMPLETE_CASE
    imputations: int = Config.PMM_IMPUTATIONS
    gibbs_iterations: int = Config.PMM_ITERATIONS
    donors: int = Config.PMM_DONORS
    workers: int = 1

    def __post_init__(self):
        self.seed = check_seed(self.seed)
        self.estimator = Estimator(self.estimator)
        for name in ('replications', 'imputations', 'donors'):
            if int(getattr(self, name)) < 1:
                raise ValidationError(name, "must be >= 1")
        if not self.mechanisms:
            raise ValidationError("mechanisms", "at least one mechanism is required")
        for mechanism in self.mechanisms:
            if mechanism.model.n_cols != self.dataset.n_cols or mechanism.copula.dim != self.dataset.n_cols:
                raise ValidationError(f"mechanisms.{mechanism.label}", "dimension differs from the dataset")

    @property
    def target_index(self) -> int:
        if isinstance(self.target, str):
            if self.target not in self.dataset.columns:
                raise ValidationError("target", f"unknown column {self.target!r}")
            return self.dataset.columns.index(self.target)
        if not 0 <= int(self.target) < self.dataset.n_cols:
            raise ValidationError("target", "column index out of range")
        return int(self.target)


@dataclass
class BiasSample:
    label: str
    replication: int
    estimate: float
    bias: float
    imputation_means: List[float] = field(default_factory=list)
    donor_violations: int = 0


@dataclass
class BiasFailure:
    label: str
    replication: int
    reason: str


@dataclass
class BiasStudyResult:
    samples: List[BiasSample]
    failures: List[BiasFailure]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([{'mechanism': s.label, 'replication': s.replication,
                              'estimate': s.estimate, 'bias': s.bias} for s in self.samples],
                            columns=['mechanism', 'replication', 'estimate', 'bias'])

    def summary(self) -> pd.DataFrame:
        return summarize(self)

    def biases(self, label: str) -> np.ndarray:
        return np.array([s.bias for s in self.samples if s.label == label])


def _donor_violations(imputed: np.ndarray, observed_by_column: List[np.ndarray], missing: np.ndarray) -> int:
    count = 0
    for j, observed in enumerate(observed_by_column):
        rows = missing[:, j]
        if rows.any():
            count += int((~np.isin(imputed[rows, j], observed)).sum())
    return count


def _replicate(cfg: BiasStudyConfig, index: int, mechanism: Mechanism, rep: int,
               truth: float) -> Union[BiasSample, BiasFailure]:
    seed = derive_seed(cfg.seed, Purpose.REPLICATION, index, rep)
    _, amputed, _ = ampute_mechanism(cfg.dataset, mechanism.model, mechanism.copula, seed)
    column = cfg.target_index
    try:
        if cfg.estimator is Estimator.COMPLETE_CASE:
            estimate = complete_case_mean(amputed, column)
            return BiasSample(mechanism.label, rep, estimate, estimate - truth)
        completed = PMMImputer(cfg.donors, cfg.gibbs_iterations).impute(amputed, cfg.imputations, seed)
    except ImputationError as e:
        logger.warning("%s replication %d failed: %s", mechanism.label, rep, e)
        return BiasFailure(mechanism.label, rep, str(e))
    missing = np.ma.getmaskarray(amputed.values)
    observed = [amputed.observed(j) for j in range(amputed.shape[1])]
    means = [float(np.mean(c.values[:, column])) for c in completed]
    violations = sum(_donor_violations(c.values, observed, missing) for c in completed)
    estimate = float(np.mean(means))
    return BiasSample(mechanism.label, rep, estimate, estimate - truth, means, violations)


def run_bias_study(cfg: BiasStudyConfig) -> BiasStudyResult:
    truth = float(np.mean(cfg.dataset.values[:, cfg.target_index]))
    jobs: List[Tuple[int, Mechanism, int]] = [(index, mechanism, rep)
                                               for index, mechanism in enumerate(cfg.mechanisms)
                                               for rep in range(cfg.replications)]
    logger.info("bias study: %d mechanisms x %d replications, estimator %s",
                len(cfg.mechanisms), cfg.replications, cfg.estimator.value)

    def work(job):
        return _replicate(cfg, job[0], job[1], job[2], truth)

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(work, jobs))
    else:
        outcomes = [work(job) for job in jobs]
    samples = [o for o in outcomes if isinstance(o, BiasSample)]
    failures = [o for o in outcomes if isinstance(o, BiasFailure)]
    if failures:
        logger.warning("%d replications without an estimate", len(failures))
    return BiasStudyResult(samples, failures)


def summarize(result: BiasStudyResult) -> pd.DataFrame:
    """Per-mechanism mean bias and quartiles, in mechanism order of first appearance"""
    columns = ['mechanism', 'replications', 'failures', 'mean_bias', 'q1', 'median', 'q3',
               'min', 'max']
    labels = list(dict.fromkeys([s.label for s in result.samples] + [f.label for f in result.failures]))
    rows = []
    for label in labels:
        biases = result.biases(label)
        n_failed = sum(1 for f in result.failures if f.label == label)
        if biases.size:
            q1, median, q3 = np.quantile(biases, [0.25, 0.5, 0.75])
            stats = [float(biases.mean()), float(q1), float(median), float(q3),
                     float(biases.min()), float(biases.max())]
        else:
            stats = [float('nan')] * 6
        rows.append([label, int(biases.size), n_failed, *stats])
    return pd.DataFrame(rows, columns=columns)
