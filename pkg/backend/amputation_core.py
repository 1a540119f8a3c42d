#!/usr/bin/env python3
"""
🔍 AMPUTATION CORE - Runs configured amputations and studies end to end
"""

import logging
import os
import platform
import sys
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from config.settings import Config
from .amputation_engine import (ampute_cell_sets, ampute_mechanism, ampute_monotone_discrete,
                                ampute_monotone_mixture, ampute_monotone_uniform, ampute_rows_iid,
                                ampute_rows_independent)
from .bias_study import run_bias_study
from .data_loader import DataLoader, load_mtcars, load_mtcars01
from .datasets import AmputedDataset, CompleteDataset, MissingnessMask
from .errors import AmputationError, ConfigError
from .experiments import bias_mechanisms
from .missingness_model import compute_probs
from .report_generator import ReportGenerator
from .rng import Purpose, derive_seed
from .scenario_amputer import scenario_ampute

logger = logging.getLogger(__name__)


class AmputationCore:
    """Orchestrates data loading, amputation, persistence and reports"""

    def __init__(self):
        self.run_history: List[Dict[str, Any]] = []
        self.data_loader = DataLoader()
        self.report_generator = ReportGenerator()

    def get_system_status(self) -> Dict[str, Any]:
        return {
            'version': Config.get_version(),
            'platform': sys.platform,
            'python_version': platform.python_version(),
            'numpy_version': np.__version__,
            'mtcars_available': os.path.exists(Config.mtcars_path()),
            'workers': Config.WORKERS,
            'row_block_size': Config.ROW_BLOCK_SIZE,
            'survival_ie_cap': Config.SURVIVAL_IE_CAP,
            'log_folder': Config.LOG_FOLDER,
            'runs_completed': len(self.run_history),
        }

    def resolve_data(self, reference: str) -> CompleteDataset:
        """'mtcars', 'mtcars01' or a CSV path"""
        if reference == 'mtcars':
            return load_mtcars()
        if reference == 'mtcars01':
            return load_mtcars01()
        return self.data_loader.load_csv(reference)

    # -- amputation runs ----------------------------------------------------

    def _probabilities(self, cfg, dataset: CompleteDataset) -> np.ndarray:
        if cfg.model is not None:
            return compute_probs(cfg.model, dataset)
        value = cfg.probabilities
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return np.full(dataset.shape, float(value))
        return np.asarray(value, dtype=float)

    def _row_copulas(self, cfg, n_rows: int):
        if isinstance(cfg.row_copulas, list):
            return cfg.row_copulas
        default, overrides = cfg.row_copulas['default'], cfg.row_copulas['rows']
        return [overrides.get(i, default) for i in range(n_rows)]

    def ampute(self, cfg, dataset: CompleteDataset,
               seed: int) -> Tuple[MissingnessMask, AmputedDataset, Optional[np.ndarray], Optional[np.ndarray]]:
        """One replication: (mask, amputed data, probabilities or None, scenario assignment or None)"""
        mode = cfg.mode
        if mode == 'rows-iid':
            probs = self._probabilities(cfg, dataset)
            return (*ampute_rows_iid(dataset, probs, cfg.copula, seed, cfg.workers), probs, None)
        if mode == 'rows-independent':
            probs = self._probabilities(cfg, dataset)
            copulas = self._row_copulas(cfg, dataset.n_rows)
            return (*ampute_rows_independent(dataset, probs, copulas, seed, cfg.workers), probs, None)
        if mode == 'mechanism':
            mask, amputed, probs = ampute_mechanism(dataset, cfg.model, cfg.copula, seed, cfg.workers)
            return mask, amputed, probs, None
        if mode == 'cell-sets':
            return (*ampute_cell_sets(dataset, cfg.cell_sets, seed), None, None)
        if mode == 'monotone':
            kind = cfg.monotone['kind']
            if kind == 'beta-mixture':
                result = ampute_monotone_mixture(dataset, cfg.monotone['spec'], seed)
            elif kind == 'uniform':
                result = ampute_monotone_uniform(dataset, cfg.monotone['row_dependence'], seed)
            else:
                result = ampute_monotone_discrete(dataset, cfg.monotone['cutoff_probs'],
                                                  cfg.monotone['row_dependence'], seed)
            return (*result, None, None)
        if mode == 'scenario':
            mask, amputed, assignment = scenario_ampute(dataset, cfg.scenario, seed)
            return mask, amputed, None, assignment
        raise ConfigError(f"unknown mode {mode!r}")

    def _write_replication(self, cfg, out_dir: str, dataset: CompleteDataset, seed: int,
                           replication: int) -> Dict[str, Any]:
        mask, amputed, probs, assignment = self.ampute(cfg, dataset, seed)
        os.makedirs(out_dir, exist_ok=True)
        columns = list(dataset.columns)
        outputs = {
            'amputed': self.data_loader.save_csv(amputed, os.path.join(out_dir, 'amputed.csv')),
            'mask': self.data_loader.save_mask(mask, os.path.join(out_dir, 'mask.csv'), columns),
        }
        if probs is not None:
            outputs['probabilities'] = self.data_loader.save_matrix(
                probs, os.path.join(out_dir, 'probabilities.csv'), columns)
        if assignment is not None and cfg.emit_assignment:
            outputs['assignment'] = self.data_loader.save_assignment(
                assignment, os.path.join(out_dir, 'assignment.csv'))
        metadata = {'mode': cfg.mode, 'seed': seed, 'replication': replication,
                    'rows': dataset.n_rows, 'columns': dataset.n_cols}
        # out_dir and workers leave the outputs unchanged
        settings = {k: v for k, v in cfg.to_dict().items() if k not in ('out_dir', 'workers')}
        report = self.report_generator.generate_run_report(metadata, outputs, mask, columns, settings)
        outputs['report'] = self.report_generator.write_report(report, os.path.join(out_dir, 'report.json'))
        return {'outputs': outputs, 'missingness': report['missingness']}

    def run_amputation(self, cfg) -> Dict[str, Any]:
        """Run every replication of an AmputationConfig and write its artifacts"""
        try:
            dataset = self.resolve_data(cfg.data)
            logger.info("running %s amputation on %s (%dx%d), %d replication(s)",
                        cfg.mode, cfg.data, dataset.n_rows, dataset.n_cols, cfg.replications)
            os.makedirs(cfg.out_dir, exist_ok=True)
            resolved = self.report_generator.write_resolved_config(
                cfg.to_dict(), os.path.join(cfg.out_dir, 'resolved_config.yaml'))
            replications = []
            for r in range(cfg.replications):
                seed = cfg.seed if r == 0 else derive_seed(cfg.seed, Purpose.MASK_REPLICATION, r)
                out_dir = cfg.out_dir if cfg.replications == 1 else os.path.join(cfg.out_dir, f"rep_{r:04d}")
                replications.append(self._write_replication(cfg, out_dir, dataset, seed, r))
            result = {'success': True, 'mode': cfg.mode, 'out_dir': cfg.out_dir,
                      'resolved_config': resolved, 'replications': replications}
        except (AmputationError, OSError) as e:
            logger.error("amputation run failed: %s", e)
            result = {'success': False, 'error': str(e), 'error_type': type(e).__name__}
        self.run_history.append({k: v for k, v in result.items() if k != 'replications'})
        return result

    def run_study(self, study_cfg) -> Dict[str, Any]:
        """Run a bias study from a StudyConfig and write its tables"""
        try:
            dataset = self.resolve_data(study_cfg.data)
            cfg = study_cfg.to_study(dataset, bias_mechanisms(dataset.n_cols, rhos=study_cfg.rhos))
            result = run_bias_study(cfg)
            os.makedirs(study_cfg.out_dir, exist_ok=True)
            resolved = self.report_generator.write_resolved_config(
                study_cfg.to_dict(), os.path.join(study_cfg.out_dir, 'resolved_config.yaml'))
            paths = self.report_generator.write_bias_outputs(result, study_cfg.out_dir, study_cfg.boxplot)
            outcome = {'success': True, 'out_dir': study_cfg.out_dir, 'resolved_config': resolved,
                       'outputs': paths, 'summary': result.summary(), 'failures': len(result.failures),
                       'donor_violations': sum(s.donor_violations for s in result.samples)}
        except (AmputationError, OSError) as e:
            logger.error("bias study failed: %s", e)
            outcome = {'success': False, 'error': str(e), 'error_type': type(e).__name__}
        self.run_history.append({k: v for k, v in outcome.items() if k != 'summary'})
        return outcome
