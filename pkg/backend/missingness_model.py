#!/usr/bin/env python3
"""
🧮 MISSINGNESS MODEL - Logistic marginal missingness probabilities

logit(p_ij) = b0 + sum_k b_k * y_ik, with coefficients stored per cell,
per column, globally, or per explicit group of rows.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit, logit

from .datasets import as_matrix
from .errors import DimensionMismatchError, ValidationError

logger = logging.getLogger(__name__)

WIDE_RANGE = (0.001, 0.999)
NARROW_EPS = 0.05


class SharingMode(str, Enum):
    PER_CELL = "per-cell"
    PER_COLUMN = "per-column"
    GLOBAL = "global"
    PER_GROUP = "per-group"


class MechanismKind(str, Enum):
    MCAR = "MCAR"
    MAR = "MAR"
    MNAR = "MNAR"


class Flavor(str, Enum):
    NONE = "none"
    SUICIDE = "suicide"
    GROUP = "group"


@dataclass(frozen=True)
class MechanismLabel:
    kind: MechanismKind
    degree: int
    flavor: Flavor = Flavor.NONE

    def __str__(self):
        if self.flavor is Flavor.NONE:
            return f"{self.kind.value} (degree {self.degree})"
        return f"{self.flavor.value} {self.kind.value} (degree {self.degree})"


@dataclass
class CellRule:
    """Intercept plus weighted covariates for one cell (or a shared set of cells)

    `own_weight` multiplies the value of the cell's own column, which lets a
    single shared rule express suicide MNAR across every column.
    """

    intercept: float = 0.0
    weights: Dict[int, float] = field(default_factory=dict)
    own_weight: float = 0.0

    def __post_init__(self):
        self.intercept = float(self.intercept)
        self.own_weight = float(self.own_weight)
        self.weights = {int(k): float(v) for k, v in self.weights.items()}
        values = [self.intercept, self.own_weight, *self.weights.values()]
        if not all(math.isfinite(v) for v in values):
            raise ValidationError("rule", "coefficients must be finite")

    def effective_weights(self, column: int) -> Dict[int, float]:
        """Covariate weights for `column`, own weight folded in"""
        merged = dict(self.weights)
        if self.own_weight != 0.0:
            merged[column] = merged.get(column, 0.0) + self.own_weight
        return merged

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {'intercept': self.intercept}
        if self.weights:
            data['weights'] = {k: v for k, v in sorted(self.weights.items())}
        if self.own_weight:
            data['own_weight'] = self.own_weight
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CellRule":
        if not isinstance(data, dict):
            raise ValidationError("rule", "expected a mapping")
        return cls(data.get('intercept', 0.0), data.get('weights') or {}, data.get('own_weight', 0.0))


@dataclass
class LogisticMissModel:
    """Logistic missingness model over an n x d dataset

    rules layout by mode:
      per-cell    n x d nested list of CellRule
      per-column  list of d CellRule
      global      single CellRule
      per-group   K lists of d CellRule, with `groups` holding K row lists
    Columns in `complete_columns` are never amputed (p = 0).
    """

    mode: SharingMode
    n_cols: int
    rules: Any
    groups: List[List[int]] = field(default_factory=list)
    complete_columns: List[int] = field(default_factory=list)

    def __post_init__(self):
        self.mode = SharingMode(self.mode)
        self.complete_columns = sorted({int(c) for c in self.complete_columns})
        self._validate()

    # -- structure ----------------------------------------------------------

    def _validate(self):
        d = self.n_cols
        if d < 1:
            raise ValidationError("n_cols", "must be >= 1")
        for c in self.complete_columns:
            if not 0 <= c < d:
                raise ValidationError("complete_columns", f"column {c} out of range 0..{d - 1}")
        if self.mode is SharingMode.GLOBAL:
            if not isinstance(self.rules, CellRule):
                raise ValidationError("rules", "global mode takes a single rule")
        elif self.mode is SharingMode.PER_COLUMN:
            self._check_row_of_rules(self.rules, "rules")
        elif self.mode is SharingMode.PER_CELL:
            for i, row in enumerate(self.rules):
                self._check_row_of_rules(row, f"rules[{i}]")
        else:
            if len(self.rules) != len(self.groups) or not self.groups:
                raise ValidationError("groups", "one rule row is required per group")
            for k, row in enumerate(self.rules):
                self._check_row_of_rules(row, f"rules[{k}]")
            members = [r for g in self.groups for r in g]
            if len(members) != len(set(members)):
                raise ValidationError("groups", "row groups must be disjoint")
        for rule in self.iter_rules():
            for k in rule.weights:
                if not 0 <= k < d:
                    raise ValidationError("weights", f"column {k} out of range 0..{d - 1}")

    def _check_row_of_rules(self, row, name):
        if len(row) != self.n_cols or not all(isinstance(r, CellRule) for r in row):
            raise ValidationError(name, f"expected {self.n_cols} rules")

    def iter_rules(self):
        if self.mode is SharingMode.GLOBAL:
            yield self.rules
        elif self.mode is SharingMode.PER_COLUMN:
            yield from self.rules
        else:
            for row in self.rules:
                yield from row

    def row_rules(self, n_rows: int, column: int):
        """Yield (row indices, rule) covering every row for one column"""
        if self.mode is SharingMode.GLOBAL:
            yield np.arange(n_rows), self.rules
        elif self.mode is SharingMode.PER_COLUMN:
            yield np.arange(n_rows), self.rules[column]
        elif self.mode is SharingMode.PER_CELL:
            if len(self.rules) != n_rows:
                raise DimensionMismatchError(f"per-cell model has {len(self.rules)} rows, data has {n_rows}")
            for i in range(n_rows):
                yield np.array([i]), self.rules[i][column]
        else:
            covered = sorted(r for g in self.groups for r in g)
            if covered != list(range(n_rows)):
                raise ValidationError("groups", f"row groups must partition rows 0..{n_rows - 1}")
            for rows, rule_row in zip(self.groups, self.rules):
                yield np.asarray(rows, dtype=int), rule_row[column]

    def column_rules(self, column: int) -> List[CellRule]:
        if self.mode is SharingMode.GLOBAL:
            return [self.rules]
        if self.mode is SharingMode.PER_COLUMN:
            return [self.rules[column]]
        return [row[column] for row in self.rules]

    # -- serialisation ------------------------------------------------------

    def to_dict(self) -> Dict[str, Any]:
        if self.mode is SharingMode.GLOBAL:
            rules: Any = self.rules.to_dict()
        elif self.mode is SharingMode.PER_COLUMN:
            rules = [r.to_dict() for r in self.rules]
        else:
            rules = [[r.to_dict() for r in row] for row in self.rules]
        data = {'mode': self.mode.value, 'n_cols': self.n_cols, 'rules': rules}
        if self.groups:
            data['groups'] = [list(map(int, g)) for g in self.groups]
        if self.complete_columns:
            data['complete_columns'] = list(self.complete_columns)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LogisticMissModel":
        try:
            mode = SharingMode(data.get('mode', 'per-column'))
        except ValueError:
            raise ValidationError("model.mode", f"unknown sharing mode {data.get('mode')!r}")
        if 'rules' not in data or 'n_cols' not in data:
            raise ValidationError("model", "'n_cols' and 'rules' are required")
        raw = data['rules']
        if mode is SharingMode.GLOBAL:
            rules: Any = CellRule.from_dict(raw)
        elif mode is SharingMode.PER_COLUMN:
            rules = [CellRule.from_dict(r) for r in raw]
        else:
            rules = [[CellRule.from_dict(r) for r in row] for row in raw]
        return cls(mode, int(data['n_cols']), rules, data.get('groups') or [],
                   data.get('complete_columns') or [])


def compute_probs(model: LogisticMissModel, y) -> np.ndarray:
    """Marginal missingness probabilities p_ij = expit(linear predictor)"""
    values = as_matrix(y)
    n_rows, n_cols = values.shape
    if n_cols != model.n_cols:
        raise DimensionMismatchError(f"model has {model.n_cols} columns, data has {n_cols}")
    linear = np.empty((n_rows, n_cols))
    for j in range(n_cols):
        for rows, rule in model.row_rules(n_rows, j):
            eta = np.full(rows.size, rule.intercept)
            for k, beta in rule.effective_weights(j).items():
                eta += beta * values[rows, k]
            linear[rows, j] = eta
    bad = np.argwhere(~np.isfinite(linear))
    if bad.size:
        i, j = (int(x) for x in bad[0])
        raise ValidationError(f"cell[{i},{j}]", "non-finite linear predictor")
    probs = expit(linear)
    if model.complete_columns:
        probs[:, model.complete_columns] = 0.0
    return probs


def implied_coefficients(p_target: float, eps: float, c_min: float, c_max: float,
                         n_covariates: int = 1) -> Tuple[float, float]:
    """(beta0, beta_each) keeping p in [p - eps, p + eps] for covariates in [c_min, c_max]"""
    if not c_min < c_max:
        raise ValidationError("c_min", f"must be below c_max ({c_min} >= {c_max})")
    if not 0.0 < p_target - eps or not p_target + eps < 1.0 or eps < 0:
        raise ValidationError("eps", f"[{p_target - eps}, {p_target + eps}] must lie inside (0, 1)")
    if isinstance(n_covariates, bool) or int(n_covariates) != n_covariates or n_covariates < 1:
        raise ValidationError("n_covariates", "must be >= 1")
    low, high = float(logit(p_target - eps)), float(logit(p_target + eps))
    beta_each = (high - low) / (n_covariates * (c_max - c_min))
    beta0 = low - c_min * n_covariates * beta_each
    return beta0, beta_each


def classify_mechanism(model: LogisticMissModel, column: int) -> MechanismLabel:
    """MCAR / MAR / MNAR label of one column's missingness"""
    if not 0 <= column < model.n_cols:
        raise ValidationError("column", f"out of range 0..{model.n_cols - 1}")
    if column in model.complete_columns:
        return MechanismLabel(MechanismKind.MCAR, 0)
    degree = 0
    own_dependent = False
    for rule in model.column_rules(column):
        active = {k for k, beta in rule.effective_weights(column).items() if beta != 0.0}
        degree = max(degree, len(active))
        own_dependent = own_dependent or column in active
    if degree == 0:
        return MechanismLabel(MechanismKind.MCAR, 0)
    if not own_dependent:
        return MechanismLabel(MechanismKind.MAR, degree)
    return MechanismLabel(MechanismKind.MNAR, degree, Flavor.SUICIDE if degree == 1 else Flavor.GROUP)


# Model builders for the mtcars01 experiment ladder


def calibration(p: float, wide: bool) -> Tuple[float, float]:
    """(p, eps) for the narrow [p - 0.05, p + 0.05] or wide [0.001, 0.999] band"""
    if wide:
        low, high = WIDE_RANGE
        return (low + high) / 2.0, (high - low) / 2.0
    return p, NARROW_EPS


def mcar_model(p: float, n_cols: int) -> LogisticMissModel:
    if not 0.0 < p < 1.0:
        raise ValidationError("p", "MCAR model needs p in (0, 1); use a literal probability matrix otherwise")
    return LogisticMissModel(SharingMode.GLOBAL, n_cols, CellRule(float(logit(p))))


def mar_model(n_cols: int, driver: int = 0, p: float = 1 / 3, wide: bool = False,
              c_min: float = 0.0, c_max: float = 1.0) -> LogisticMissModel:
    """Driver column kept complete; every other column depends on it alone"""
    beta0, beta = implied_coefficients(*calibration(p, wide), c_min, c_max, 1)
    rules = [CellRule(beta0, {driver: beta}) for _ in range(n_cols)]
    return LogisticMissModel(SharingMode.PER_COLUMN, n_cols, rules, complete_columns=[driver])


def suicide_mnar_model(n_cols: int, p: float = 1 / 3, wide: bool = False,
                       c_min: float = 0.0, c_max: float = 1.0) -> LogisticMissModel:
    beta0, beta = implied_coefficients(*calibration(p, wide), c_min, c_max, 1)
    return LogisticMissModel(SharingMode.GLOBAL, n_cols, CellRule(beta0, own_weight=beta))


def group_mnar_model(n_cols: int, p: float = 1 / 3, wide: bool = False,
                     c_min: float = 0.0, c_max: float = 1.0,
                     covariates: Optional[Sequence[int]] = None) -> LogisticMissModel:
    """Every column depends on all `covariates` (default: all columns) with equal weights"""
    covariates = list(range(n_cols)) if covariates is None else [int(k) for k in covariates]
    beta0, beta = implied_coefficients(*calibration(p, wide), c_min, c_max, len(covariates))
    rule = CellRule(beta0, {k: beta for k in covariates})
    return LogisticMissModel(SharingMode.GLOBAL, n_cols, rule)
