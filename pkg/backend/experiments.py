#!/usr/bin/env python3
"""
🧪 EXPERIMENTS - Ready-made amputation setups on the 32 x 11 mtcars01 grid

Row and column indices are 0-based.
"""

from typing import Dict, List, Optional, Sequence

from .amputation_engine import CellGroup, CellSetGroupSpec, MonotoneMixtureSpec
from .bias_study import Mechanism
from .copulas import (BlockProductCopula, ComonotoneCopula, CopulaSpec, CountermonotoneCopula,
                      HomogeneousGaussCopula, IndependenceCopula)
from .errors import ValidationError
from .missingness_model import mar_model, mcar_model, suicide_mnar_model

# Gauss parameter giving indicator correlation 0.5 at p = 1/3
HALF_CORRELATION_RHO = 0.7181
MTCARS_SHAPE = (32, 11)

# Imputation settings for the bias study, selected with `simulate --preset`
BIAS_PRESETS: Dict[str, Dict[str, int]] = {
    'default': {'imputations': 5, 'gibbs_iterations': 5, 'donors': 5},
    'extended': {'imputations': 30, 'gibbs_iterations': 50, 'donors': 5},
}


def _block(rows, cols):
    return [(i, j) for i in rows for j in cols]


SMILEY_EYES = _block(range(6, 9), [2, 3, 7, 8])
SMILEY_MOUTH = [(20, 2), (20, 8), (21, 3), (21, 7)] + _block([22], range(4, 7))
LEFT_CHEEK = _block(range(13, 17), [1, 2])
RIGHT_CHEEK = _block(range(13, 17), [8, 9])


def smiley_spec(cheeks: str = 'comonotone', cheek_p: float = 0.5) -> CellSetGroupSpec:
    """Eyes and mouth always missing; cheeks missing together or, for 'countermonotone', exactly one"""
    face = CellGroup(SMILEY_EYES + SMILEY_MOUTH, 1.0)
    if cheeks == 'comonotone':
        return CellSetGroupSpec([face, CellGroup(LEFT_CHEEK + RIGHT_CHEEK, cheek_p)], IndependenceCopula(2))
    if cheeks == 'countermonotone':
        cross = BlockProductCopula([([0], IndependenceCopula(1)), ([1, 2], CountermonotoneCopula())])
        return CellSetGroupSpec([face, CellGroup(LEFT_CHEEK, cheek_p), CellGroup(RIGHT_CHEEK, cheek_p)], cross)
    raise ValidationError("cheeks", f"expected 'comonotone' or 'countermonotone', got {cheeks!r}")


def survey_blocks_spec(n_rows: int, first_rows: int, first_column: int, second_column: int) -> CellSetGroupSpec:
    """Column `first_column` missing for rows < first_rows, `second_column` for the rest"""
    if not 0 < first_rows < n_rows:
        raise ValidationError("first_rows", f"must lie strictly between 0 and {n_rows}")
    return CellSetGroupSpec([CellGroup(_block(range(first_rows), [first_column]), 1.0),
                             CellGroup(_block(range(first_rows, n_rows), [second_column]), 1.0)],
                            IndependenceCopula(2))


def row_dependence(kind: str, n_rows: int, rho: float = HALF_CORRELATION_RHO) -> CopulaSpec:
    if kind == 'independence':
        return IndependenceCopula(n_rows)
    if kind == 'gauss':
        return HomogeneousGaussCopula(rho, n_rows)
    if kind == 'comonotone':
        return ComonotoneCopula(n_rows)
    raise ValidationError("dependence", f"unknown row dependence {kind!r}")


def monotone_spec(alpha: float, beta: float, dependence: str = 'independence',
                  n_rows: int = MTCARS_SHAPE[0], miss_row_prob: float = 1 / 3) -> MonotoneMixtureSpec:
    return MonotoneMixtureSpec(miss_row_prob, alpha, beta, row_dependence(dependence, n_rows))


def mcar_grid(n_cols: int = MTCARS_SHAPE[1], probabilities=(1 / 3, 1 / 5),
              rhos=(0.0, HALF_CORRELATION_RHO, 1.0)) -> List[Mechanism]:
    """MCAR mechanisms over Gauss row copulas of increasing dependence"""
    return [Mechanism(f"MCAR p={p:.3g} rho={rho:.4g}", mcar_model(p, n_cols), HomogeneousGaussCopula(rho, n_cols))
            for p in probabilities for rho in rhos]


def bias_mechanisms(n_cols: int = MTCARS_SHAPE[1], rhos: Optional[Sequence[float]] = None,
                    p: float = 1 / 3) -> List[Mechanism]:
    """MCAR plus narrow and wide MAR and suicide-MNAR, once per Gauss row copula in `rhos`

    A single rho keeps the plain labels; a grid appends " rho=<value>" to each.
    """
    rhos = list(rhos) if rhos is not None else [HALF_CORRELATION_RHO]
    if not rhos:
        raise ValidationError("rhos", "need at least one correlation")
    models = [
        ("MCAR", mcar_model(p, n_cols)),
        ("MAR narrow", mar_model(n_cols, p=p, wide=False)),
        ("MAR wide", mar_model(n_cols, p=p, wide=True)),
        ("MNAR narrow", suicide_mnar_model(n_cols, p=p, wide=False)),
        ("MNAR wide", suicide_mnar_model(n_cols, p=p, wide=True)),
    ]
    mechanisms = []
    for rho in rhos:
        copula = HomogeneousGaussCopula(rho, n_cols)
        suffix = f" rho={rho:.4g}" if len(rhos) > 1 else ""
        mechanisms.extend(Mechanism(label + suffix, model, copula) for label, model in models)
    return mechanisms
