#!/usr/bin/env python3
"""
🔗 COPULA CORE - Construction, sampling and evaluation of copulas

Families: independence, comonotone, countermonotone, Gauss (general and
homogeneous), survival transforms, convex combinations and block products.
Every amputation mode draws its uniforms through `CopulaSpec.sample`.
"""

import itertools
import logging
import math
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import ndtr, ndtri

from config.settings import Config
from .errors import DimensionMismatchError, UseMonteCarloError, ValidationError
from .normal_cdf import bvn_cdf
from .rng import Purpose, derive_seed, generator, row_blocks

logger = logging.getLogger(__name__)

# n_rows x dim matrix with entries in [UNIFORM_CLAMP, 1 - UNIFORM_CLAMP]
UniformSample = np.ndarray


def pivoted_cholesky(matrix: np.ndarray, tolerance: float) -> np.ndarray:
    """Factor F with F @ F.T == matrix; rejects matrices that are not PSD.

    Diagonal pivoting keeps singular PSD matrices (e.g. rho = 1) factorable:
    once every remaining pivot is below `tolerance` the Schur complement is
    treated as zero.
    """
    a = np.array(matrix, dtype=float, copy=True)
    dim = a.shape[0]
    perm = np.arange(dim)
    lower = np.zeros_like(a)
    for k in range(dim):
        j = k + int(np.argmax(np.diag(a)[k:]))
        pivot = a[j, j]
        if pivot < -tolerance:
            raise ValidationError("correlation", f"not positive semidefinite (pivot {pivot:.3g})")
        a[[k, j], :] = a[[j, k], :]
        a[:, [k, j]] = a[:, [j, k]]
        lower[[k, j], :k] = lower[[j, k], :k]
        perm[[k, j]] = perm[[j, k]]
        if pivot <= tolerance:
            if np.max(np.abs(a[k:, k:])) > tolerance:
                raise ValidationError("correlation", "not positive semidefinite")
            break
        lower[k, k] = math.sqrt(pivot)
        lower[k + 1:, k] = a[k + 1:, k] / lower[k, k]
        a[k + 1:, k + 1:] -= np.outer(lower[k + 1:, k], lower[k + 1:, k])
    factor = np.empty_like(lower)
    factor[perm] = lower
    return factor


class CopulaSpec(ABC):
    """Declarative copula description: sampling, CDF and survival CDF"""

    family = ""
    _registry: Dict[str, type] = {}

    def __init__(self, dim: int):
        if isinstance(dim, bool) or int(dim) != dim or dim < 1:
            raise ValidationError("dim", f"must be a positive integer, got {dim!r}")
        self._dim = int(dim)

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        if cls.family:
            CopulaSpec._registry[cls.family] = cls

    @property
    def dim(self) -> int:
        return self._dim

    # -- sampling -----------------------------------------------------------

    @abstractmethod
    def _draw(self, gen: np.random.Generator, n_rows: int) -> np.ndarray:
        """Raw (unclamped) draws of n_rows rows"""

    def sample_with(self, gen: np.random.Generator, n_rows: int) -> UniformSample:
        """Draw n_rows rows from an explicit generator, clamped to the open interval"""
        clamp = Config.UNIFORM_CLAMP
        return np.clip(self._draw(gen, n_rows), clamp, 1.0 - clamp)

    def sample(self, n_rows: int, seed: int, workers: Optional[int] = None) -> UniformSample:
        """Sample n_rows iid rows; identical output for any worker count"""
        if isinstance(n_rows, bool) or int(n_rows) != n_rows or n_rows < 1:
            raise ValidationError("n_rows", f"must be >= 1, got {n_rows!r}")
        blocks = list(row_blocks(int(n_rows), Config.ROW_BLOCK_SIZE))

        def draw(block: Tuple[int, int, int]) -> np.ndarray:
            index, start, stop = block
            return self.sample_with(generator(seed, Purpose.COPULA_ROWS, index), stop - start)

        workers = workers or Config.WORKERS
        if workers > 1 and len(blocks) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(draw, blocks))
        else:
            parts = [draw(block) for block in blocks]
        logger.debug("sampled %d rows of %s in %d blocks", n_rows, self.family, len(blocks))
        return np.vstack(parts)

    # -- evaluation ---------------------------------------------------------

    def _check_point(self, point: Sequence[float]) -> np.ndarray:
        u = np.asarray(point, dtype=float).reshape(-1)
        if u.size != self.dim:
            raise DimensionMismatchError(f"point has {u.size} coordinates, copula has dim {self.dim}")
        if np.any(~np.isfinite(u)) or np.any(u < 0.0) or np.any(u > 1.0):
            raise ValidationError("point", "coordinates must lie in [0, 1]")
        return u

    @abstractmethod
    def _cdf(self, u: np.ndarray) -> float:
        """C(u) for a validated point"""

    def cdf(self, point: Sequence[float]) -> float:
        u = self._check_point(point)
        if np.any(u == 0.0):
            return 0.0
        return float(self._cdf(u))

    def _survival_cdf(self, u: np.ndarray) -> float:
        """Inclusion-exclusion over the 2^dim corners"""
        if self.dim > Config.SURVIVAL_IE_CAP:
            raise UseMonteCarloError(
                f"use-monte-carlo: survival CDF of dim {self.dim} exceeds the "
                f"inclusion-exclusion cap {Config.SURVIVAL_IE_CAP}"
            )
        flipped = 1.0 - u
        total = 0.0
        for corner in itertools.product((0, 1), repeat=self.dim):
            chosen = np.array(corner, dtype=bool)
            point = np.where(chosen, flipped, 1.0)
            value = 0.0 if np.any(point == 0.0) else self._cdf(point)
            total += value if chosen.sum() % 2 == 0 else -value
        return min(1.0, max(0.0, total))

    def survival_cdf(self, point: Sequence[float], exploit_symmetry: bool = True) -> float:
        u = self._check_point(point)
        if exploit_symmetry and self.is_radially_symmetric():
            return 0.0 if np.any(u == 0.0) else float(self._cdf(u))
        return float(self._survival_cdf(u))

    @abstractmethod
    def is_radially_symmetric(self) -> bool:
        """True only when symmetry is certified structurally"""

    def mc_cdf(self, point: Sequence[float], n_samples: int, seed: int) -> Tuple[float, float]:
        """Monte-Carlo estimate of C(point) with a 95% half width"""
        u = self._check_point(point)
        if n_samples < Config.MC_MIN_SAMPLES:
            raise ValidationError("n_samples", f"must be >= {Config.MC_MIN_SAMPLES}")
        draws = self.sample(n_samples, derive_seed(seed, Purpose.MC_CDF))
        estimate = float(np.mean(np.all(draws <= u, axis=1)))
        half_width = 1.96 * math.sqrt(estimate * (1.0 - estimate) / n_samples)
        return estimate, half_width

    # -- serialisation ------------------------------------------------------

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        """Config-file representation"""

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CopulaSpec":
        if not isinstance(data, dict) or 'family' not in data:
            raise ValidationError("copula", "expected a mapping with a 'family' key")
        family = str(data['family']).lower()
        if family not in CopulaSpec._registry:
            raise ValidationError("copula.family", f"unknown family {family!r}")
        try:
            return CopulaSpec._registry[family]._from_dict(data)
        except KeyError as missing:
            raise ValidationError(f"copula.{missing.args[0]}", "required key missing")

    @classmethod
    @abstractmethod
    def _from_dict(cls, data: Dict[str, Any]) -> "CopulaSpec":
        """Family-specific constructor from a mapping"""

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_dict()})"


class IndependenceCopula(CopulaSpec):
    """C(u) = prod u_j"""

    family = "independence"

    def _draw(self, gen, n_rows):
        return gen.random((n_rows, self.dim))

    def _cdf(self, u):
        return float(np.prod(u))

    def is_radially_symmetric(self):
        return True

    def to_dict(self):
        return {'family': self.family, 'dim': self.dim}

    @classmethod
    def _from_dict(cls, data):
        return cls(data['dim'])


class ComonotoneCopula(CopulaSpec):
    """C(u) = min u_j; stochastic representation (U, ..., U)"""

    family = "comonotone"

    def _draw(self, gen, n_rows):
        return np.repeat(gen.random((n_rows, 1)), self.dim, axis=1)

    def _cdf(self, u):
        return float(np.min(u))

    def is_radially_symmetric(self):
        return True

    def to_dict(self):
        return {'family': self.family, 'dim': self.dim}

    @classmethod
    def _from_dict(cls, data):
        return cls(data['dim'])


class CountermonotoneCopula(CopulaSpec):
    """C(u1, u2) = max(u1 + u2 - 1, 0); stochastic representation (U, 1 - U)"""

    family = "countermonotone"

    def __init__(self, dim: int = 2):
        if dim != 2:
            raise ValidationError("dim", "countermonotone copula exists only for dim = 2")
        super().__init__(2)

    def _draw(self, gen, n_rows):
        u = gen.random(n_rows)
        return np.column_stack([u, 1.0 - u])

    def _cdf(self, u):
        return max(float(u[0] + u[1] - 1.0), 0.0)

    def is_radially_symmetric(self):
        return True

    def to_dict(self):
        return {'family': self.family}

    @classmethod
    def _from_dict(cls, data):
        return cls(data.get('dim', 2))


class GaussCopula(CopulaSpec):
    """Copula of N(0, P) for a correlation matrix P"""

    family = "gauss"

    def __init__(self, correlation: Sequence[Sequence[float]]):
        matrix = np.asarray(correlation, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValidationError("correlation", "must be a square matrix")
        super().__init__(matrix.shape[0])
        if not np.all(np.isfinite(matrix)):
            raise ValidationError("correlation", "entries must be finite")
        if not np.allclose(matrix, matrix.T, atol=Config.PSD_TOLERANCE, rtol=0.0):
            raise ValidationError("correlation", "must be symmetric")
        if not np.allclose(np.diag(matrix), 1.0, atol=Config.PSD_TOLERANCE, rtol=0.0):
            raise ValidationError("correlation", "must have unit diagonal")
        if np.any(np.abs(matrix) > 1.0 + Config.PSD_TOLERANCE):
            raise ValidationError("correlation", "entries must lie in [-1, 1]")
        self.correlation = matrix
        self._factor = pivoted_cholesky(matrix, Config.PSD_TOLERANCE)

    def _draw(self, gen, n_rows):
        normals = gen.standard_normal((n_rows, self.dim)) @ self._factor.T
        return ndtr(normals)

    def _cdf(self, u):
        # margins of a Gauss copula are Gauss copulas: drop coordinates at 1
        active = np.flatnonzero(u < 1.0)
        if active.size == 0:
            return 1.0
        if active.size == 1:
            return float(u[active[0]])
        if active.size == 2:
            i, j = active
            return bvn_cdf(float(ndtri(u[i])), float(ndtri(u[j])), float(self.correlation[i, j]))
        raise UseMonteCarloError(
            f"use-monte-carlo: exact Gauss copula CDF is limited to 2 active coordinates, got {active.size}"
        )

    def is_radially_symmetric(self):
        return True

    def to_dict(self):
        return {'family': self.family, 'correlation': self.correlation.tolist()}

    @classmethod
    def _from_dict(cls, data):
        return cls(data['correlation'])


class HomogeneousGaussCopula(GaussCopula):
    """Gauss copula with P = rho J + (1 - rho) I, rho in [0, 1]"""

    family = "homogeneous-gauss"

    def __init__(self, rho: float, dim: int):
        if not 0.0 <= float(rho) <= 1.0:
            raise ValidationError("rho", f"must lie in [0, 1], got {rho!r}")
        if isinstance(dim, bool) or int(dim) != dim or dim < 1:
            raise ValidationError("dim", f"must be a positive integer, got {dim!r}")
        self.rho = float(rho)
        dim = int(dim)
        super().__init__(self.rho * np.ones((dim, dim)) + (1.0 - self.rho) * np.eye(dim))

    def to_dict(self):
        return {'family': self.family, 'rho': self.rho, 'dim': self.dim}

    @classmethod
    def _from_dict(cls, data):
        return cls(data['rho'], data['dim'])


class SurvivalCopula(CopulaSpec):
    """Copula of 1 - U for U ~ inner"""

    family = "survival"

    def __init__(self, inner: CopulaSpec):
        super().__init__(inner.dim)
        self.inner = inner

    def _draw(self, gen, n_rows):
        return 1.0 - self.inner._draw(gen, n_rows)

    def _cdf(self, u):
        return self.inner.survival_cdf(u)

    def _survival_cdf(self, u):
        return self.inner.cdf(u)

    def is_radially_symmetric(self):
        return self.inner.is_radially_symmetric()

    def to_dict(self):
        return {'family': self.family, 'inner': self.inner.to_dict()}

    @classmethod
    def _from_dict(cls, data):
        return cls(CopulaSpec.from_dict(data['inner']))


class ConvexCombinationCopula(CopulaSpec):
    """lambda * C1 + (1 - lambda) * C2"""

    family = "convex-combination"

    def __init__(self, lam: float, first: CopulaSpec, second: CopulaSpec):
        if first.dim != second.dim:
            raise ValidationError("second", f"dimension {second.dim} differs from first ({first.dim})")
        if not 0.0 <= float(lam) <= 1.0:
            raise ValidationError("lambda", f"must lie in [0, 1], got {lam!r}")
        super().__init__(first.dim)
        self.lam = float(lam)
        self.first = first
        self.second = second

    def _draw(self, gen, n_rows):
        selector = gen.random(n_rows)
        first = self.first._draw(gen, n_rows)
        second = self.second._draw(gen, n_rows)
        return np.where((selector <= self.lam)[:, None], first, second)

    def _cdf(self, u):
        return self.lam * self.first.cdf(u) + (1.0 - self.lam) * self.second.cdf(u)

    def _survival_cdf(self, u):
        return (self.lam * self.first.survival_cdf(u, exploit_symmetry=False)
                + (1.0 - self.lam) * self.second.survival_cdf(u, exploit_symmetry=False))

    def is_radially_symmetric(self):
        return self.first.is_radially_symmetric() and self.second.is_radially_symmetric()

    def to_dict(self):
        return {'family': self.family, 'lambda': self.lam,
                'first': self.first.to_dict(), 'second': self.second.to_dict()}

    @classmethod
    def _from_dict(cls, data):
        return cls(data['lambda'], CopulaSpec.from_dict(data['first']), CopulaSpec.from_dict(data['second']))


class BlockProductCopula(CopulaSpec):
    """Independent blocks, each with its own copula, interleaved by index set"""

    family = "block-product"

    def __init__(self, blocks: Sequence[Tuple[Sequence[int], CopulaSpec]]):
        if not blocks:
            raise ValidationError("blocks", "at least one block is required")
        self.blocks: List[Tuple[np.ndarray, CopulaSpec]] = []
        seen: List[int] = []
        for position, (indices, spec) in enumerate(blocks):
            index_array = np.asarray(list(indices), dtype=int)
            if index_array.size != spec.dim:
                raise ValidationError(f"blocks[{position}]",
                                      f"{index_array.size} indices for a copula of dim {spec.dim}")
            self.blocks.append((index_array, spec))
            seen.extend(index_array.tolist())
        dim = len(seen)
        if sorted(seen) != list(range(dim)):
            raise ValidationError("blocks", f"index sets must partition 0..{dim - 1}")
        super().__init__(dim)

    def _draw(self, gen, n_rows):
        out = np.empty((n_rows, self.dim))
        for indices, spec in self.blocks:
            out[:, indices] = spec._draw(gen, n_rows)
        return out

    def _cdf(self, u):
        return float(np.prod([spec.cdf(u[indices]) for indices, spec in self.blocks]))

    def _survival_cdf(self, u):
        return float(np.prod([spec.survival_cdf(u[indices], exploit_symmetry=False)
                              for indices, spec in self.blocks]))

    def is_radially_symmetric(self):
        return all(spec.is_radially_symmetric() for _, spec in self.blocks)

    def to_dict(self):
        return {'family': self.family,
                'blocks': [{'indices': indices.tolist(), 'copula': spec.to_dict()}
                           for indices, spec in self.blocks]}

    @classmethod
    def _from_dict(cls, data):
        return cls([(block['indices'], CopulaSpec.from_dict(block['copula'])) for block in data['blocks']])


# Operation-style entry points


def sample(spec: CopulaSpec, n_rows: int, seed: int, workers: Optional[int] = None) -> UniformSample:
    return spec.sample(n_rows, seed, workers)


def cdf(spec: CopulaSpec, point: Sequence[float]) -> float:
    return spec.cdf(point)


def survival_cdf(spec: CopulaSpec, point: Sequence[float]) -> float:
    return spec.survival_cdf(point)


def is_radially_symmetric(spec: CopulaSpec) -> bool:
    return spec.is_radially_symmetric()


def mc_cdf(spec: CopulaSpec, point: Sequence[float], n_samples: int, seed: int) -> Tuple[float, float]:
    return spec.mc_cdf(point, n_samples, seed)


def copula_from_dict(data: Dict[str, Any]) -> CopulaSpec:
    return CopulaSpec.from_dict(data)
