#!/usr/bin/env python3
"""
🔗 COMMANDS - Subcommand handlers for the amputation CLI
"""

import logging
import os
import sys
from typing import Any, Dict, List, Optional

import numpy as np

from backend.analytics import correlation_bounds, joint_missingness_prob, pairwise_correlation
from backend.copulas import CopulaSpec, SurvivalCopula
from backend.data_loader import DataLoader
from backend.errors import ConfigError, UseMonteCarloError
from backend.experiments import monotone_spec
from backend.imputer import pmm_impute
from backend.missingness_model import implied_coefficients
from backend.rng import check_seed
from config.schema import AmputationConfig, StudyConfig, load_yaml, merge_overrides
from config.settings import Config
from .heatmap import render_heatmap

logger = logging.getLogger(__name__)

RUN_OVERRIDES = ('seed', 'replications', 'out_dir', 'data', 'workers')


class CommandHandlers:
    """One method per subcommand; results go to `out`, logs to stderr"""

    def __init__(self, amputation_core, out=None):
        self.amputation_core = amputation_core
        self.out = out or sys.stdout

    # -- helpers ------------------------------------------------------------

    def _print(self, text: str = ""):
        self.out.write(text + "\n")

    def _table(self, rows: List[List[Any]], headers: List[str]):
        cells = [[self._format(v) for v in row] for row in rows]
        widths = [max(len(h), *(len(r[k]) for r in cells)) if cells else len(h) for k, h in enumerate(headers)]
        self._print("  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip())
        for row in cells:
            self._print("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip())

    @staticmethod
    def _format(value) -> str:
        if isinstance(value, float):
            return f"{value:.6g}"
        return str(value)

    def _overrides(self, args) -> Dict[str, Any]:
        return {key: getattr(args, key, None) for key in RUN_OVERRIDES}

    def _raw_config(self, args, forced_mode: Optional[str] = None) -> Dict[str, Any]:
        if not args.config:
            raise ConfigError("--config is required")
        raw = merge_overrides(load_yaml(args.config), self._overrides(args))
        if forced_mode:
            if raw.get('mode', forced_mode) != forced_mode:
                raise ConfigError(f"config mode {raw['mode']!r} does not match the {forced_mode} command")
            raw['mode'] = forced_mode
        if getattr(args, 'emit_assignment', False):
            raw['emit_assignment'] = True
        return raw

    def _report_run(self, result: Dict[str, Any]) -> Dict[str, Any]:
        if result['success']:
            for index, replication in enumerate(result['replications']):
                summary = replication['missingness']
                self._print(f"replication {index}: {summary['cells_missing']} cells missing "
                            f"({summary['fraction_missing']:.4f}), {summary['complete_rows']} complete rows")
            self._print(f"outputs written to {result['out_dir']}")
        return result

    @staticmethod
    def _copula_from_args(args, dim: Optional[int] = None) -> CopulaSpec:
        if getattr(args, 'copula_config', None):
            return CopulaSpec.from_dict(load_yaml(args.copula_config))
        family = args.copula
        data: Dict[str, Any] = {'family': family}
        if family in ('independence', 'comonotone'):
            data['dim'] = dim or args.dim
        elif family == 'homogeneous-gauss':
            if args.rho is None:
                raise ConfigError("--rho is required for homogeneous-gauss")
            data.update(rho=args.rho, dim=dim or args.dim)
        elif family != 'countermonotone':
            raise ConfigError(f"--copula {family!r} needs --copula-config")
        return CopulaSpec.from_dict(data)

    # -- subcommands --------------------------------------------------------

    def ampute(self, args) -> Dict[str, Any]:
        cfg = AmputationConfig.from_dict(self._raw_config(args))
        return self._report_run(self.amputation_core.run_amputation(cfg))

    def scenario(self, args) -> Dict[str, Any]:
        cfg = AmputationConfig.from_dict(self._raw_config(args, 'scenario'))
        return self._report_run(self.amputation_core.run_amputation(cfg))

    def monotone(self, args) -> Dict[str, Any]:
        if args.config:
            raw = self._raw_config(args, 'monotone')
        else:
            if args.seed is None:
                raise ConfigError("--seed is required")
            dataset = self.amputation_core.resolve_data(args.data or 'mtcars01')
            spec = monotone_spec(args.alpha, args.beta, args.dependence, dataset.n_rows, args.miss_row_prob)
            raw = {'schema_version': Config.CONFIG_SCHEMA_VERSION, 'mode': 'monotone',
                   'data': args.data or 'mtcars01', 'monotone': {'kind': 'beta-mixture', **spec.to_dict()}}
            raw = merge_overrides(raw, self._overrides(args))
        cfg = AmputationConfig.from_dict(raw)
        return self._report_run(self.amputation_core.run_amputation(cfg))

    def analyze(self, args) -> Dict[str, Any]:
        if args.quantity == 'bounds':
            rho_min, rho_max = correlation_bounds(args.p1, args.p2)
            self._table([[args.p1, args.p2, rho_min, rho_max]], ['p1', 'p2', 'rho_min', 'rho_max'])
            return {'success': True, 'rho_min': rho_min, 'rho_max': rho_max}
        if args.quantity == 'correlation':
            copula = self._copula_from_args(args, dim=2)
            rho = pairwise_correlation(copula, args.p1, args.p2)
            rho_min, rho_max = correlation_bounds(args.p1, args.p2)
            self._table([[copula.family, args.p1, args.p2, rho, rho_min, rho_max]],
                        ['copula', 'p1', 'p2', 'rho', 'rho_min', 'rho_max'])
            return {'success': True, 'rho': rho}
        copula = self._copula_from_args(args)
        p = broadcast(args.p, copula.dim)
        try:
            value, half_width, method = joint_missingness_prob(copula, p), 0.0, 'exact'
        except UseMonteCarloError:
            if not args.mc_samples or args.seed is None:
                raise
            # all cells missing <=> the survival copula lies below p
            value, half_width = SurvivalCopula(copula).mc_cdf(p, args.mc_samples, check_seed(args.seed))
            method = 'monte-carlo'
            logger.info("exact evaluation unavailable, used %d Monte-Carlo samples", args.mc_samples)
        self._table([[copula.family, copula.dim, method, value, half_width]],
                    ['copula', 'dim', 'method', 'joint_missing', 'half_width'])
        return {'success': True, 'joint': value, 'method': method}

    def coeffs(self, args) -> Dict[str, Any]:
        beta0, beta = implied_coefficients(args.p, args.eps, args.cmin, args.cmax, args.k)
        self._table([[beta0, beta, args.p - args.eps, args.p + args.eps]], ['beta0', 'beta', 'p_min', 'p_max'])
        return {'success': True, 'beta0': beta0, 'beta': beta}

    def simulate(self, args) -> Dict[str, Any]:
        raw = load_yaml(args.config) if args.config else {'schema_version': Config.CONFIG_SCHEMA_VERSION}
        raw = merge_overrides(raw, {**self._overrides(args), 'estimator': args.estimator,
                                    'boxplot': True if args.boxplot else None,
                                    'preset': args.preset, 'rhos': args.rhos})
        study = StudyConfig.from_dict(raw)
        result = self.amputation_core.run_study(study)
        if result['success']:
            summary = result['summary']
            self._table(summary.values.tolist(), list(summary.columns))
            if result['failures']:
                self._print(f"{result['failures']} replication(s) without an estimate")
            self._print(f"outputs written to {result['out_dir']}")
        return result

    def impute(self, args) -> Dict[str, Any]:
        if args.seed is None:
            raise ConfigError("--seed is required")
        loader = DataLoader()
        amputed = loader.load_amputed(args.input)
        completed = pmm_impute(amputed, args.donors, args.imputations, args.iterations, seed=check_seed(args.seed))
        os.makedirs(args.out_dir, exist_ok=True)
        paths = [loader.save_csv(dataset, os.path.join(args.out_dir, f"imputed_{t + 1:02d}.csv"))
                 for t, dataset in enumerate(completed)]
        self._print(f"{len(paths)} imputed dataset(s) written to {args.out_dir}")
        return {'success': True, 'outputs': paths}

    def render(self, args) -> Dict[str, Any]:
        if args.input in ('mtcars', 'mtcars01'):
            data = self.amputation_core.resolve_data(args.input)
        else:
            data = DataLoader().load_amputed(args.input)
        path = render_heatmap(data, args.output, args.palette, args.cell_size)
        self._print(f"heatmap written to {path}")
        return {'success': True, 'output': path}

    def status(self) -> Dict[str, Any]:
        status = self.amputation_core.get_system_status()
        self._table([[k, v] for k, v in status.items()], ['setting', 'value'])
        return {'success': True, **status}


def broadcast(values: List[float], dim: int) -> np.ndarray:
    """A single value repeated to `dim` coordinates, or the values as given"""
    return np.full(dim, values[0]) if len(values) == 1 else np.asarray(values, dtype=float)
