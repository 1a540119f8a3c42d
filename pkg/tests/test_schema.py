import pytest

from backend.copulas import HomogeneousGaussCopula
from backend.errors import ConfigError
from backend.experiments import bias_mechanisms
from config.schema import AmputationConfig, StudyConfig, load_yaml, merge_overrides
from config.settings import Config


def _rows_iid(**extra):
    raw = {'schema_version': Config.CONFIG_SCHEMA_VERSION, 'mode': 'rows-iid', 'data': 'mtcars01',
           'seed': 11, 'copula': {'family': 'homogeneous-gauss', 'rho': 0.5, 'dim': 11},
           'probabilities': 0.3}
    raw.update(extra)
    return raw


class TestAmputationConfig:

    def test_parses_rows_iid(self):
        cfg = AmputationConfig.from_dict(_rows_iid(replications=3))
        assert cfg.mode == 'rows-iid'
        assert isinstance(cfg.copula, HomogeneousGaussCopula)
        assert cfg.probabilities == 0.3
        assert cfg.replications == 3
        assert cfg.workers == 1

    @pytest.mark.parametrize('version', [None, 0, 2, '1'])
    def test_schema_version(self, version):
        raw = _rows_iid()
        if version is None:
            del raw['schema_version']
        else:
            raw['schema_version'] = version
        with pytest.raises(ConfigError, match='schema_version'):
            AmputationConfig.from_dict(raw)

    def test_missing_seed(self):
        raw = _rows_iid()
        del raw['seed']
        with pytest.raises(ConfigError, match='seed'):
            AmputationConfig.from_dict(raw)

    def test_negative_seed(self):
        with pytest.raises(ConfigError):
            AmputationConfig.from_dict(_rows_iid(seed=-4))

    def test_missing_mode_key(self):
        raw = _rows_iid()
        del raw['copula']
        with pytest.raises(ConfigError, match='copula'):
            AmputationConfig.from_dict(raw)

    def test_unknown_mode(self):
        with pytest.raises(ConfigError, match='mode'):
            AmputationConfig.from_dict(_rows_iid(mode='shuffle'))

    def test_bad_section_becomes_config_error(self):
        with pytest.raises(ConfigError, match='rows-iid'):
            AmputationConfig.from_dict(_rows_iid(copula={'family': 'clayton', 'dim': 11}))

    @pytest.mark.parametrize('value', [0, -1, 2.5, True])
    def test_replications_must_be_positive_int(self, value):
        with pytest.raises(ConfigError, match='replications'):
            AmputationConfig.from_dict(_rows_iid(replications=value))

    def test_resolved_config_reproduces(self):
        cfg = AmputationConfig.from_dict(_rows_iid(out_dir='runs/a'))
        again = AmputationConfig.from_dict(cfg.to_dict())
        assert again.to_dict() == cfg.to_dict()

    def test_monotone_sections(self):
        raw = {'schema_version': Config.CONFIG_SCHEMA_VERSION, 'mode': 'monotone', 'data': 'mtcars01',
               'seed': 5, 'monotone': {'kind': 'discrete', 'cutoff_probs': [0.5] + [0.05] * 10,
                                       'row_dependence': {'family': 'independence', 'dim': 32}}}
        cfg = AmputationConfig.from_dict(raw)
        assert cfg.monotone['kind'] == 'discrete'
        assert AmputationConfig.from_dict(cfg.to_dict()).to_dict() == cfg.to_dict()

        del raw['monotone']['cutoff_probs']
        with pytest.raises(ConfigError, match='cutoff_probs'):
            AmputationConfig.from_dict(raw)

    def test_row_copulas_mapping(self):
        raw = _rows_iid(mode='rows-independent', row_copulas={
            'default': {'family': 'independence', 'dim': 11},
            'rows': {3: {'family': 'comonotone', 'dim': 11}}})
        cfg = AmputationConfig.from_dict(raw)
        assert cfg.row_copulas['rows'][3].family == 'comonotone'
        assert AmputationConfig.from_dict(cfg.to_dict()).to_dict() == cfg.to_dict()


class TestStudyConfig:

    def test_defaults(self):
        study = StudyConfig.from_dict({'schema_version': Config.CONFIG_SCHEMA_VERSION, 'seed': 3})
        assert study.data == 'mtcars01'
        assert study.target == 'qsec'
        assert study.replications == Config.BIAS_REPLICATIONS
        assert study.estimator == 'complete-case'
        assert (study.imputations, study.gibbs_iterations, study.donors) == (5, 5, 5)
        assert study.mechanisms is None

    def test_round_trip(self):
        study = StudyConfig.from_dict({'schema_version': Config.CONFIG_SCHEMA_VERSION, 'seed': 3,
                                       'estimator': 'pmm-mice', 'replications': 10, 'boxplot': True})
        assert StudyConfig.from_dict(study.to_dict()) == study

    def test_unknown_estimator(self):
        with pytest.raises(ConfigError):
            StudyConfig.from_dict({'schema_version': Config.CONFIG_SCHEMA_VERSION, 'seed': 3,
                                   'estimator': 'hot-deck'})

    def test_negative_gibbs_iterations(self):
        with pytest.raises(ConfigError, match='gibbs_iterations'):
            StudyConfig.from_dict({'schema_version': Config.CONFIG_SCHEMA_VERSION, 'seed': 3,
                                   'gibbs_iterations': -1})


class TestFiles:

    def test_load_yaml(self, write_config):
        path = write_config({'mode': 'rows-iid', 'seed': 1})
        assert load_yaml(path)['seed'] == 1

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match='not found'):
            load_yaml(str(tmp_path / 'absent.yaml'))

    def test_invalid_yaml(self, tmp_path):
        path = tmp_path / 'bad.yaml'
        path.write_text('mode: [unclosed\n', encoding='utf-8')
        with pytest.raises(ConfigError, match='invalid YAML'):
            load_yaml(str(path))

    def test_top_level_must_be_mapping(self, tmp_path):
        path = tmp_path / 'list.yaml'
        path.write_text('- 1\n- 2\n', encoding='utf-8')
        with pytest.raises(ConfigError, match='mapping'):
            load_yaml(str(path))

    def test_merge_overrides(self):
        merged = merge_overrides({'seed': 1, 'replications': 2}, {'seed': 9, 'replications': None})
        assert merged == {'seed': 9, 'replications': 2}


class TestStudyPresetsAndRhos:

    def _raw(self, **extra):
        return {'schema_version': Config.CONFIG_SCHEMA_VERSION, 'seed': 3, **extra}

    def test_extended_preset(self):
        study = StudyConfig.from_dict(self._raw(preset='extended'))
        assert (study.imputations, study.gibbs_iterations, study.donors) == (30, 50, 5)
        assert 'preset' not in study.to_dict()

    def test_explicit_keys_beat_the_preset(self):
        study = StudyConfig.from_dict(self._raw(preset='extended', imputations=7))
        assert (study.imputations, study.gibbs_iterations) == (7, 50)

    @pytest.mark.parametrize('preset', ['huge', ['extended']])
    def test_unknown_preset(self, preset):
        with pytest.raises(ConfigError, match='preset'):
            StudyConfig.from_dict(self._raw(preset=preset))

    def test_rhos_round_trip(self):
        study = StudyConfig.from_dict(self._raw(rhos=[0, 0.7181, 1]))
        assert study.rhos == [0.0, 0.7181, 1.0]
        assert StudyConfig.from_dict(study.to_dict()) == study

    @pytest.mark.parametrize('rhos', [[], 0.5, [1.5], [-0.1], [True], ['high']])
    def test_invalid_rhos(self, rhos):
        with pytest.raises(ConfigError, match='rhos'):
            StudyConfig.from_dict(self._raw(rhos=rhos))

    def test_rhos_expand_the_default_mechanisms(self, mtcars01):
        study = StudyConfig.from_dict(self._raw(rhos=[0.0, 1.0]))
        cfg = study.to_study(mtcars01, bias_mechanisms(mtcars01.n_cols, rhos=study.rhos))
        assert [m.copula.rho for m in cfg.mechanisms] == [0.0] * 5 + [1.0] * 5
