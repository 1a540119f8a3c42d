"""
🧾 CONFIG SCHEMA - YAML run configurations for amputation runs and bias studies
"""

import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import yaml

from backend.amputation_engine import CellSetGroupSpec, MonotoneMixtureSpec
from backend.bias_study import BiasStudyConfig, Estimator, Mechanism
from backend.copulas import CopulaSpec
from backend.errors import AmputationError, ConfigError
from backend.experiments import BIAS_PRESETS
from backend.missingness_model import LogisticMissModel
from backend.rng import check_seed
from backend.scenario_amputer import ScenarioSpec
from .settings import Config

MODES = ('rows-iid', 'rows-independent', 'cell-sets', 'monotone', 'scenario', 'mechanism')
MONOTONE_KINDS = ('beta-mixture', 'uniform', 'discrete')

# keys each mode needs on top of the common ones
REQUIRED_KEYS = {
    'rows-iid': ('copula', 'probabilities'),
    'rows-independent': ('row_copulas', 'probabilities'),
    'cell-sets': ('cell_sets',),
    'monotone': ('monotone',),
    'scenario': ('scenario',),
    'mechanism': ('copula', 'model'),
}


def load_yaml(path: str) -> Dict[str, Any]:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid YAML in {path}: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return data


def merge_overrides(raw: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Flag values win over file values; None means 'not given'"""
    merged = dict(raw)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return merged


def _check_version(raw: Dict[str, Any]):
    version = raw.get('schema_version')
    if version is None:
        raise ConfigError("missing key 'schema_version'")
    if version != Config.CONFIG_SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r} (expected {Config.CONFIG_SCHEMA_VERSION})")


def _seed(raw: Dict[str, Any]) -> int:
    if raw.get('seed') is None:
        raise ConfigError("missing key 'seed' (give it in the config or with --seed)")
    try:
        return check_seed(raw['seed'])
    except AmputationError as e:
        raise ConfigError(str(e))


def _positive_int(raw: Dict[str, Any], key: str, default: int) -> int:
    value = raw.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError(f"'{key}' must be a positive integer, got {value!r}")
    return value


def _apply_preset(raw: Dict[str, Any]) -> Dict[str, Any]:
    preset = raw.get('preset')
    if preset is None:
        return raw
    if not isinstance(preset, str) or preset not in BIAS_PRESETS:
        raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(BIAS_PRESETS)}")
    merged = {**BIAS_PRESETS[preset], **raw}
    del merged['preset']
    return merged


def _rhos(raw: Dict[str, Any]) -> Optional[List[float]]:
    """Gauss correlations of the default mechanism grid, each in [0, 1]"""
    value = raw.get('rhos')
    if value is None:
        return None
    if not isinstance(value, list) or not value:
        raise ConfigError(f"'rhos' must be a nonempty list, got {value!r}")
    for rho in value:
        if isinstance(rho, bool) or not isinstance(rho, (int, float)) or not 0.0 <= rho <= 1.0:
            raise ConfigError(f"'rhos' entries must be numbers in [0, 1], got {rho!r}")
    return [float(rho) for rho in value]


@dataclass
class AmputationConfig:
    """One amputation run: mode, dependence, probabilities, seed and outputs"""

    mode: str
    data: str
    seed: int
    replications: int = 1
    workers: int = 1
    out_dir: str = 'output'
    sections: Dict[str, Any] = field(default_factory=dict)

    # parsed mode-specific objects
    copula: Optional[CopulaSpec] = None
    row_copulas: Any = None
    probabilities: Any = None
    model: Optional[LogisticMissModel] = None
    cell_sets: Optional[CellSetGroupSpec] = None
    monotone: Optional[Dict[str, Any]] = None
    scenario: Optional[ScenarioSpec] = None
    emit_assignment: bool = False

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "AmputationConfig":
        _check_version(raw)
        mode = raw.get('mode')
        if mode not in MODES:
            raise ConfigError(f"'mode' must be one of {', '.join(MODES)}, got {mode!r}")
        missing = [k for k in ('data',) + REQUIRED_KEYS[mode] if k not in raw]
        if missing:
            raise ConfigError(f"mode {mode} is missing key(s): {', '.join(missing)}")
        sections = {k: raw[k] for k in REQUIRED_KEYS[mode]}
        cfg = cls(mode, str(raw['data']), _seed(raw), _positive_int(raw, 'replications', 1),
                  _positive_int(raw, 'workers', 1), str(raw.get('out_dir', 'output')), sections,
                  emit_assignment=bool(raw.get('emit_assignment', False)))
        try:
            cfg._parse_sections()
        except ConfigError:
            raise
        except (AmputationError, KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"invalid {mode} configuration: {e}")
        return cfg

    def _parse_sections(self):
        s = self.sections
        if 'copula' in s:
            self.copula = CopulaSpec.from_dict(s['copula'])
        if 'probabilities' in s:
            self.probabilities = s['probabilities']
            if isinstance(self.probabilities, dict):
                self.model = LogisticMissModel.from_dict(self.probabilities['model'])
        if 'model' in s:
            self.model = LogisticMissModel.from_dict(s['model'])
        if 'row_copulas' in s:
            self.row_copulas = self._parse_row_copulas(s['row_copulas'])
        if 'cell_sets' in s:
            self.cell_sets = CellSetGroupSpec.from_dict(s['cell_sets'])
        if 'monotone' in s:
            self.monotone = self._parse_monotone(s['monotone'])
        if 'scenario' in s:
            self.scenario = ScenarioSpec.from_dict(s['scenario'])

    @staticmethod
    def _parse_row_copulas(value):
        """A list of n copulas, or {'default': copula, 'rows': {row: copula}}"""
        if isinstance(value, list):
            return [CopulaSpec.from_dict(c) for c in value]
        if isinstance(value, dict) and 'default' in value:
            return {'default': CopulaSpec.from_dict(value['default']),
                    'rows': {int(i): CopulaSpec.from_dict(c) for i, c in (value.get('rows') or {}).items()}}
        raise ConfigError("'row_copulas' must be a list or a mapping with 'default'")

    @staticmethod
    def _parse_monotone(value):
        kind = value.get('kind', 'beta-mixture')
        if kind not in MONOTONE_KINDS:
            raise ConfigError(f"monotone 'kind' must be one of {', '.join(MONOTONE_KINDS)}")
        if kind == 'beta-mixture':
            return {'kind': kind, 'spec': MonotoneMixtureSpec.from_dict(value)}
        if 'row_dependence' not in value:
            raise ConfigError("monotone section is missing key 'row_dependence'")
        parsed = {'kind': kind, 'row_dependence': CopulaSpec.from_dict(value['row_dependence'])}
        if kind == 'discrete':
            if 'cutoff_probs' not in value:
                raise ConfigError("discrete monotone section is missing key 'cutoff_probs'")
            parsed['cutoff_probs'] = [float(p) for p in value['cutoff_probs']]
        return parsed

    def to_dict(self) -> Dict[str, Any]:
        """Resolved configuration; feeding it back reproduces the run"""
        data = {'schema_version': Config.CONFIG_SCHEMA_VERSION, 'mode': self.mode, 'data': self.data,
                'seed': self.seed, 'replications': self.replications, 'workers': self.workers,
                'out_dir': self.out_dir}
        if self.emit_assignment:
            data['emit_assignment'] = True
        if self.copula is not None:
            data['copula'] = self.copula.to_dict()
        if 'probabilities' in self.sections:
            data['probabilities'] = ({'model': self.model.to_dict()} if isinstance(self.probabilities, dict)
                                     else self.probabilities)
        if 'model' in self.sections:
            data['model'] = self.model.to_dict()
        if self.row_copulas is not None:
            if isinstance(self.row_copulas, list):
                data['row_copulas'] = [c.to_dict() for c in self.row_copulas]
            else:
                data['row_copulas'] = {'default': self.row_copulas['default'].to_dict(),
                                       'rows': {i: c.to_dict() for i, c in self.row_copulas['rows'].items()}}
        if self.cell_sets is not None:
            data['cell_sets'] = self.cell_sets.to_dict()
        if self.monotone is not None:
            kind = self.monotone['kind']
            if kind == 'beta-mixture':
                data['monotone'] = {'kind': kind, **self.monotone['spec'].to_dict()}
            else:
                data['monotone'] = {'kind': kind, 'row_dependence': self.monotone['row_dependence'].to_dict()}
                if kind == 'discrete':
                    data['monotone']['cutoff_probs'] = self.monotone['cutoff_probs']
        if self.scenario is not None:
            data['scenario'] = self.scenario.to_dict()
        return data


@dataclass
class StudyConfig:
    """Bias-study run: the study settings plus data and output locations"""

    data: str
    seed: int
    mechanisms: Optional[List[Mechanism]]
    target: Any = 'qsec'
    replications: int = Config.BIAS_REPLICATIONS
    estimator: str = Estimator.COMPLETE_CASE.value
    imputations: int = Config.PMM_IMPUTATIONS
    gibbs_iterations: int = Config.PMM_ITERATIONS
    donors: int = Config.PMM_DONORS
    workers: int = 1
    out_dir: str = 'output'
    boxplot: bool = False
    rhos: Optional[List[float]] = None

    @classmethod
    def from_dict(cls, raw: Dict[str, Any]) -> "StudyConfig":
        """Parse a study mapping; a `preset` name fills the imputation settings the mapping leaves out"""
        _check_version(raw)
        raw = _apply_preset(raw)
        try:
            mechanisms = None
            if raw.get('mechanisms') is not None:
                mechanisms = [Mechanism.from_dict(m) for m in raw['mechanisms']]
            estimator = Estimator(raw.get('estimator', Estimator.COMPLETE_CASE.value)).value
        except (AmputationError, ValueError) as e:
            raise ConfigError(f"invalid study configuration: {e}")
        gibbs = raw.get('gibbs_iterations', Config.PMM_ITERATIONS)
        if isinstance(gibbs, bool) or not isinstance(gibbs, int) or gibbs < 0:
            raise ConfigError("'gibbs_iterations' must be a nonnegative integer")
        return cls(str(raw.get('data', 'mtcars01')), _seed(raw), mechanisms, raw.get('target', 'qsec'),
                   _positive_int(raw, 'replications', Config.BIAS_REPLICATIONS), estimator,
                   _positive_int(raw, 'imputations', Config.PMM_IMPUTATIONS), gibbs,
                   _positive_int(raw, 'donors', Config.PMM_DONORS), _positive_int(raw, 'workers', 1),
                   str(raw.get('out_dir', 'output')), bool(raw.get('boxplot', False)), _rhos(raw))

    def to_dict(self) -> Dict[str, Any]:
        data = {'schema_version': Config.CONFIG_SCHEMA_VERSION, 'data': self.data, 'seed': self.seed,
                'target': self.target, 'replications': self.replications, 'estimator': self.estimator,
                'imputations': self.imputations, 'gibbs_iterations': self.gibbs_iterations,
                'donors': self.donors, 'workers': self.workers, 'out_dir': self.out_dir,
                'boxplot': self.boxplot}
        if self.mechanisms is not None:
            data['mechanisms'] = [m.to_dict() for m in self.mechanisms]
        if self.rhos is not None:
            data['rhos'] = list(self.rhos)
        return data

    def to_study(self, dataset, default_mechanisms: List[Mechanism]) -> BiasStudyConfig:
        return BiasStudyConfig(dataset, self.mechanisms or default_mechanisms, self.seed, self.target,
                               self.replications, Estimator(self.estimator), self.imputations,
                               self.gibbs_iterations, self.donors, self.workers)
