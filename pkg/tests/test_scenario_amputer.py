import math

import numpy as np
import pytest
from scipy.special import logit
from scipy.stats import chisquare

from backend.amputation_engine import ampute_rows_iid
from backend.copulas import ComonotoneCopula
from backend.errors import DimensionMismatchError, ValidationError
from backend.scenario_amputer import ScenarioSpec, largest_remainder, scenario_ampute


def test_largest_remainder():
    np.testing.assert_array_equal(largest_remainder([1 / 3, 1 / 3, 1 / 3], 32), [11, 11, 10])
    np.testing.assert_array_equal(largest_remainder([0.5, 0.25, 0.25], 10), [5, 3, 2])
    assert largest_remainder([0.1, 0.2, 0.7], 7).sum() == 7


class TestSpec:

    def test_weights_shape(self):
        with pytest.raises(ValidationError):
            ScenarioSpec([[1, 0]], [[0.0, 0.0]], frequencies=[1.0])

    def test_exactly_one_allocation(self):
        with pytest.raises(ValidationError):
            ScenarioSpec([[1, 0]], [[0.0, 0.0, 0.0]])
        with pytest.raises(ValidationError):
            ScenarioSpec([[1, 0]], [[0.0, 0.0, 0.0]], frequencies=[1.0], partition=[[0]])

    def test_frequencies_sum_to_one(self):
        with pytest.raises(ValidationError):
            ScenarioSpec([[1, 0], [0, 1]], np.zeros((2, 3)), frequencies=[0.5, 0.6])

    def test_positive_frequency_needs_rows(self):
        spec = ScenarioSpec([[1, 0], [0, 1]], np.zeros((2, 3)), frequencies=[0.99, 0.01])
        with pytest.raises(ValidationError):
            spec.allocation(10)

    def test_warns_about_weights_on_pattern_columns(self, caplog):
        ScenarioSpec([[1, 0]], [[0.0, 2.0, 0.0]], frequencies=[1.0])
        assert 'pattern-missing columns' in caplog.text

    def test_round_trip(self):
        spec = ScenarioSpec([[1, 0, 1], [0, 1, 1]], [[0.5, 0, 1, 0], [-1, 1, 0, 0]], partition=[[0, 2], [1]],
                            permute_rows=False)
        assert ScenarioSpec.from_dict(spec.to_dict()).to_dict() == spec.to_dict()


class TestAmputation:

    def test_rows_receive_their_pattern_or_nothing(self, mtcars01, seed):
        patterns = [[1] * 5 + [0] * 6, [0] * 6 + [1] * 5, [1, 0] * 5 + [1]]
        weights = np.zeros((3, 12))
        weights[:, 0] = 10.0
        spec = ScenarioSpec(patterns, weights, frequencies=[1 / 3, 1 / 3, 1 / 3])
        mask, amputed, assignment = scenario_ampute(mtcars01, spec, seed)
        np.testing.assert_array_equal(np.bincount(assignment), [11, 11, 10])
        for i, k in enumerate(assignment):
            assert list(mask.values[i]) in (patterns[k], [0] * 11)
        assert np.ma.getmaskarray(amputed.values).sum() == mask.values.sum()

    def test_partition_without_permutation(self, seed):
        spec = ScenarioSpec([[1, 1], [0, 1]], [[20.0, 0, 0], [20.0, 0, 0]], partition=[[0, 1], [2]],
                            permute_rows=False)
        mask, _, assignment = scenario_ampute(np.zeros((3, 2)), spec, seed)
        np.testing.assert_array_equal(assignment, [0, 0, 1])
        np.testing.assert_array_equal(mask.values, [[1, 1], [1, 1], [0, 1]])

    def test_scores_use_the_data(self, seed):
        data = np.vstack([np.zeros((50, 2)), np.ones((50, 2))])
        spec = ScenarioSpec([[1, 1]], [[-30.0, 60.0, 0.0]], frequencies=[1.0])
        mask, _, _ = scenario_ampute(data, spec, seed)
        assert mask.values[:50].sum() == 0
        assert mask.values[50:].all()

    def test_deterministic(self, mtcars01, seed):
        spec = ScenarioSpec([[1] * 11], [[0.0] * 12], frequencies=[1.0])
        first = scenario_ampute(mtcars01, spec, seed)
        second = scenario_ampute(mtcars01, spec, seed)
        np.testing.assert_array_equal(first[0].values, second[0].values)
        np.testing.assert_array_equal(first[2], second[2])

    def test_pattern_width(self, mtcars01, seed):
        spec = ScenarioSpec([[1, 0]], [[0.0, 0.0, 0.0]], frequencies=[1.0])
        with pytest.raises(DimensionMismatchError):
            scenario_ampute(mtcars01, spec, seed)

    @pytest.mark.slow
    def test_all_ones_pattern_matches_comonotone_rows(self, seed):
        n_rows, n_cols = 10_000, 11
        data = np.random.default_rng(3).random((n_rows, n_cols))
        weights = np.zeros((1, n_cols + 1))
        weights[0, 0] = float(logit(1 / 3))
        spec = ScenarioSpec([[1] * n_cols], weights, frequencies=[1.0])
        scenario_mask, _, _ = scenario_ampute(data, spec, seed)
        copula_mask, _ = ampute_rows_iid(data, 1 / 3, ComonotoneCopula(n_cols), seed + 1)
        a = scenario_mask.values.all(axis=1).mean()
        b = copula_mask.values.all(axis=1).mean()
        pooled = (a + b) / 2
        z = (a - b) / math.sqrt(pooled * (1 - pooled) * 2 / n_rows)
        # two-sample proportion test at the 1% level
        assert abs(z) < 2.576
        assert np.array_equal(scenario_mask.values.any(axis=1), scenario_mask.values.all(axis=1))


@pytest.mark.slow
def test_row_permutation_spreads_scenarios_evenly():
    spec = ScenarioSpec([[1, 0], [0, 1], [1, 1]], np.zeros((3, 3)), frequencies=[0.5, 0.25, 0.25])
    data = np.zeros((8, 2))
    n_seeds = 10_000
    counts = np.zeros((8, 3), dtype=int)
    for seed in range(n_seeds):
        _, _, assignment = scenario_ampute(data, spec, seed)
        np.testing.assert_array_equal(np.bincount(assignment, minlength=3), [4, 2, 2])
        counts[np.arange(8), assignment] += 1
    expected = n_seeds * np.array([0.5, 0.25, 0.25])
    for row in counts:
        assert chisquare(row, expected).pvalue > 0.01 / 8
