#!/usr/bin/env python3
"""
📄 REPORT GENERATOR - Run reports, integrity hashes and bias-study outputs
"""

import hashlib
import json
import logging
import os
from typing import Any, Dict, List, Optional

import numpy as np
import yaml

from config.settings import Config
from .datasets import MissingnessMask

logger = logging.getLogger(__name__)


class ReportGenerator:
    """Reproducible JSON reports; no timestamps, so reruns compare byte for byte"""

    def missingness_summary(self, mask: MissingnessMask, columns: List[str]) -> Dict[str, Any]:
        """Overall and per-column missing fractions, complete rows and distinct row patterns"""
        values = mask.values
        patterns, counts = np.unique(values, axis=0, return_counts=True)
        order = np.lexsort(patterns.T[::-1])
        return {
            'cells_missing': int(values.sum()),
            'fraction_missing': float(values.mean()) if values.size else 0.0,
            'per_column': {name: float(values[:, j].mean()) for j, name in enumerate(columns)},
            'complete_rows': int(mask.complete_rows().sum()),
            'complete_row_fraction': float(mask.complete_rows().mean()) if values.shape[0] else 0.0,
            'patterns': [{'pattern': ''.join(map(str, patterns[k])), 'rows': int(counts[k])} for k in order],
        }

    def generate_run_report(self, metadata: Dict[str, Any], outputs: Dict[str, str],
                            mask: Optional[MissingnessMask] = None,
                            columns: Optional[List[str]] = None,
                            config: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        report = {
            'report_metadata': self._generate_report_metadata(metadata),
            'outputs': {name: {'file': os.path.basename(path), 'sha256': self._file_hash(path)}
                        for name, path in sorted(outputs.items())},
        }
        if config is not None:
            report['report_metadata']['config_sha256'] = self._generate_data_hash(config)
        if mask is not None:
            report['missingness'] = self.missingness_summary(mask, columns or [])
        return report

    def write_report(self, report: Dict[str, Any], path: str) -> str:
        with open(path, 'w', encoding='utf-8') as f:
            f.write(self._generate_json_report(report))
        logger.info("report written to %s", path)
        return path

    def write_resolved_config(self, config: Dict[str, Any], path: str) -> str:
        """YAML artifact that reproduces the run when fed back"""
        with open(path, 'w', encoding='utf-8') as f:
            yaml.safe_dump(config, f, sort_keys=True, default_flow_style=None)
        return path

    def write_bias_outputs(self, result, out_dir: str, boxplot: bool = False) -> Dict[str, str]:
        """bias_samples.csv, bias_summary.csv and optionally bias_boxplot.png"""
        os.makedirs(out_dir, exist_ok=True)
        paths = {
            'samples': os.path.join(out_dir, 'bias_samples.csv'),
            'summary': os.path.join(out_dir, 'bias_summary.csv'),
        }
        result.to_frame().to_csv(paths['samples'], index=False, float_format='%.17g', lineterminator='\n')
        result.summary().to_csv(paths['summary'], index=False, float_format='%.17g', lineterminator='\n')
        if boxplot:
            paths['boxplot'] = self._bias_boxplot(result, os.path.join(out_dir, 'bias_boxplot.png'))
        return paths

    def _bias_boxplot(self, result, path: str) -> str:
        import matplotlib
        matplotlib.use('Agg')
        import matplotlib.pyplot as plt

        summary = result.summary()
        labels = [label for label in summary['mechanism'] if result.biases(label).size]
        fig, ax = plt.subplots(figsize=(1.6 * max(len(labels), 2), 4))
        ax.boxplot([result.biases(label) for label in labels])
        ax.set_xticks(range(1, len(labels) + 1))
        ax.set_xticklabels(labels, rotation=20)
        ax.axhline(0.0, color='grey', linewidth=0.8, linestyle='--')
        ax.set_ylabel('bias of the mean')
        fig.tight_layout()
        # no matplotlib version tag in the PNG
        fig.savefig(path, dpi=100, metadata={'Software': None})
        plt.close(fig)
        return path

    def _generate_report_metadata(self, metadata: Dict[str, Any]) -> Dict[str, Any]:
        return {'tool': 'ampute', 'version': Config.get_version(), **metadata}

    def _file_hash(self, path: str) -> str:
        """SHA-256 of a written output for integrity verification"""
        digest = hashlib.sha256()
        with open(path, 'rb') as f:
            for chunk in iter(lambda: f.read(65536), b''):
                digest.update(chunk)
        return digest.hexdigest()

    def _generate_data_hash(self, data: Dict) -> str:
        data_str = json.dumps(data, sort_keys=True)
        return hashlib.sha256(data_str.encode()).hexdigest()

    def _generate_json_report(self, report_data: Dict) -> str:
        return json.dumps(report_data, indent=2, sort_keys=True) + '\n'
