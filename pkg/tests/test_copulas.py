import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import ndtri

from backend.copulas import (BlockProductCopula, ComonotoneCopula, ConvexCombinationCopula, CopulaSpec,
                             CountermonotoneCopula, GaussCopula, HomogeneousGaussCopula, IndependenceCopula,
                             SurvivalCopula, copula_from_dict, pivoted_cholesky)
from backend.errors import DimensionMismatchError, UseMonteCarloError, ValidationError
from backend.normal_cdf import bvn_cdf
from config.settings import Config


class TestConstruction:

    def test_countermonotone_only_in_two_dimensions(self):
        assert CountermonotoneCopula().dim == 2
        with pytest.raises(ValidationError):
            CountermonotoneCopula(3)

    def test_gauss_rejects_invalid_matrices(self):
        with pytest.raises(ValidationError, match='symmetric'):
            GaussCopula([[1.0, 0.2], [0.3, 1.0]])
        with pytest.raises(ValidationError, match='unit diagonal'):
            GaussCopula([[2.0, 0.0], [0.0, 1.0]])
        with pytest.raises(ValidationError, match='positive semidefinite'):
            GaussCopula([[1.0, 0.9, -0.9], [0.9, 1.0, 0.9], [-0.9, 0.9, 1.0]])

    def test_singular_correlation_is_factorable(self):
        matrix = np.ones((4, 4))
        factor = pivoted_cholesky(matrix, Config.PSD_TOLERANCE)
        np.testing.assert_allclose(factor @ factor.T, matrix, atol=1e-12)
        assert HomogeneousGaussCopula(1.0, 4).dim == 4

    def test_convex_combination_checks(self):
        with pytest.raises(ValidationError):
            ConvexCombinationCopula(0.5, IndependenceCopula(2), IndependenceCopula(3))
        with pytest.raises(ValidationError):
            ConvexCombinationCopula(1.5, IndependenceCopula(2), ComonotoneCopula(2))

    def test_block_product_needs_a_partition(self):
        with pytest.raises(ValidationError):
            BlockProductCopula([([0, 2], IndependenceCopula(2))])
        with pytest.raises(ValidationError):
            BlockProductCopula([([0], IndependenceCopula(2))])

    def test_homogeneous_rho_range(self):
        with pytest.raises(ValidationError):
            HomogeneousGaussCopula(-0.1, 3)


class TestSampling:

    def test_shape_and_open_interval(self):
        u = IndependenceCopula(3).sample(500, 1)
        assert u.shape == (500, 3)
        assert u.min() >= Config.UNIFORM_CLAMP and u.max() <= 1.0 - Config.UNIFORM_CLAMP

    def test_same_output_for_any_worker_count(self):
        spec = HomogeneousGaussCopula(0.5, 4)
        serial = spec.sample(3000, 11, workers=1)
        threaded = spec.sample(3000, 11, workers=4)
        np.testing.assert_array_equal(serial, threaded)

    def test_comonotone_and_countermonotone_representations(self):
        u = ComonotoneCopula(5).sample(100, 3)
        assert np.all(u == u[:, :1])
        v = CountermonotoneCopula().sample(100, 3)
        np.testing.assert_allclose(v[:, 0] + v[:, 1], 1.0, atol=1e-12)

    def test_convex_selector_picks_the_first_child_up_to_lambda(self):
        def comonotone_rows(lam):
            u = ConvexCombinationCopula(lam, ComonotoneCopula(2), CountermonotoneCopula()).sample(20_000, 8)
            return u[:, 0] == u[:, 1]

        assert comonotone_rows(1.0).all()
        assert not comonotone_rows(0.0).any()
        share = comonotone_rows(0.3).mean()
        assert abs(share - 0.3) < 4 * np.sqrt(0.3 * 0.7 / 20_000)

    def test_independent_columns_are_uncorrelated(self):
        u = IndependenceCopula(2).sample(100_000, 5)
        assert abs(np.corrcoef(u[:, 0], u[:, 1])[0, 1]) <= 0.02

    def test_rejects_bad_row_count(self):
        with pytest.raises(ValidationError):
            IndependenceCopula(2).sample(0, 1)


class TestEvaluation:

    def test_closed_forms(self):
        point = [0.3, 0.6, 0.9]
        assert IndependenceCopula(3).cdf(point) == pytest.approx(0.3 * 0.6 * 0.9)
        assert ComonotoneCopula(3).cdf(point) == pytest.approx(0.3)
        assert CountermonotoneCopula().cdf([0.3, 0.6]) == 0.0
        assert CountermonotoneCopula().cdf([0.7, 0.6]) == pytest.approx(0.3)

    def test_zero_coordinate_gives_zero(self):
        assert HomogeneousGaussCopula(0.5, 5).cdf([0.2, 0.0, 0.3, 0.4, 0.5]) == 0.0

    def test_gauss_uses_bivariate_normal(self):
        spec = GaussCopula([[1.0, 0.4], [0.4, 1.0]])
        expected = bvn_cdf(float(ndtri(0.3)), float(ndtri(0.8)), 0.4)
        assert spec.cdf([0.3, 0.8]) == pytest.approx(expected, abs=1e-12)

    def test_gauss_drops_coordinates_at_one(self):
        spec = HomogeneousGaussCopula(0.6, 5)
        assert spec.cdf([0.3, 1.0, 1.0, 0.4, 1.0]) == pytest.approx(
            HomogeneousGaussCopula(0.6, 2).cdf([0.3, 0.4]), abs=1e-12)

    def test_gauss_above_two_active_coordinates_refuses(self):
        with pytest.raises(UseMonteCarloError):
            HomogeneousGaussCopula(0.5, 3).cdf([0.2, 0.3, 0.4])

    def test_point_validation(self):
        with pytest.raises(DimensionMismatchError):
            IndependenceCopula(3).cdf([0.5, 0.5])
        with pytest.raises(ValidationError):
            IndependenceCopula(2).cdf([0.5, 1.5])

    def test_inclusion_exclusion_agrees_with_symmetry(self, rng):
        spec = GaussCopula([[1.0, -0.35], [-0.35, 1.0]])
        for point in rng.uniform(0.05, 0.95, size=(20, 2)):
            assert spec.survival_cdf(point, exploit_symmetry=False) == pytest.approx(spec.cdf(point), abs=1e-9)

    @settings(max_examples=200, deadline=None)
    @given(data=st.data(), dim=st.integers(3, 6))
    def test_symmetry_shortcut_matches_inclusion_exclusion(self, data, dim):
        point = data.draw(st.lists(st.floats(0.01, 0.99), min_size=dim, max_size=dim))
        specs = [
            IndependenceCopula(dim),
            ComonotoneCopula(dim),
            ConvexCombinationCopula(0.4, ComonotoneCopula(dim), IndependenceCopula(dim)),
            BlockProductCopula([([0, dim - 1], CountermonotoneCopula()),
                                (range(1, dim - 1), ComonotoneCopula(dim - 2))]),
            BlockProductCopula([([1, 0], HomogeneousGaussCopula(0.6, 2)),
                                (range(2, dim), IndependenceCopula(dim - 2))]),
        ]
        for spec in specs:
            assert spec.is_radially_symmetric()
            assert spec.survival_cdf(point) == pytest.approx(spec.survival_cdf(point, exploit_symmetry=False),
                                                             abs=1e-9)
        assert specs[0].survival_cdf(point) == pytest.approx(float(np.prod(point)), abs=1e-12)
        assert specs[1].survival_cdf(point) == pytest.approx(min(point), abs=1e-12)

    def test_survival_of_survival_is_the_copula(self):
        inner = ConvexCombinationCopula(0.3, ComonotoneCopula(2), IndependenceCopula(2))
        spec = SurvivalCopula(SurvivalCopula(inner))
        assert spec.cdf([0.4, 0.7]) == pytest.approx(inner.cdf([0.4, 0.7]), abs=1e-12)

    def test_convex_combination_is_linear(self):
        spec = ConvexCombinationCopula(0.25, ComonotoneCopula(2), CountermonotoneCopula())
        assert spec.cdf([0.6, 0.7]) == pytest.approx(0.25 * 0.6 + 0.75 * 0.3)

    def test_block_product_factorises(self):
        spec = BlockProductCopula([([0, 2], ComonotoneCopula(2)), ([1], IndependenceCopula(1))])
        assert spec.cdf([0.3, 0.5, 0.6]) == pytest.approx(0.3 * 0.5)
        assert spec.survival_cdf([0.3, 0.5, 0.6], exploit_symmetry=False) == pytest.approx(0.3 * 0.5)

    def test_inclusion_exclusion_cap(self):
        spec = IndependenceCopula(Config.SURVIVAL_IE_CAP + 1)
        point = [0.5] * spec.dim
        with pytest.raises(UseMonteCarloError):
            spec.survival_cdf(point, exploit_symmetry=False)
        assert spec.survival_cdf(point) == pytest.approx(0.5 ** spec.dim)

    @pytest.mark.slow
    def test_monte_carlo_agrees_with_exact(self, rng):
        spec = ConvexCombinationCopula(0.4, HomogeneousGaussCopula(0.6, 2), CountermonotoneCopula())
        for k, point in enumerate(rng.uniform(0.1, 0.9, size=(20, 2))):
            estimate, half_width = spec.mc_cdf(point, 100_000, 1000 + k)
            # half width is a 95% interval; 4 of them leaves room for 20 points
            assert abs(estimate - spec.cdf(point)) <= 4 * max(half_width, 1e-3)

    def test_monte_carlo_needs_enough_samples(self):
        with pytest.raises(ValidationError):
            IndependenceCopula(2).mc_cdf([0.5, 0.5], 10, 1)


class TestSerialisation:

    def test_nested_round_trip(self):
        spec = BlockProductCopula([
            ([0], IndependenceCopula(1)),
            ([1, 2], SurvivalCopula(ConvexCombinationCopula(0.2, CountermonotoneCopula(),
                                                             GaussCopula([[1.0, 0.3], [0.3, 1.0]])))),
        ])
        rebuilt = copula_from_dict(spec.to_dict())
        assert rebuilt.to_dict() == spec.to_dict()
        assert rebuilt.cdf([0.3, 0.4, 0.5]) == pytest.approx(spec.cdf([0.3, 0.4, 0.5]))

    def test_unknown_family(self):
        with pytest.raises(ValidationError, match='copula.family'):
            CopulaSpec.from_dict({'family': 'clayton', 'dim': 2})

    def test_missing_key_names_the_field(self):
        with pytest.raises(ValidationError, match='copula.rho'):
            CopulaSpec.from_dict({'family': 'homogeneous-gauss', 'dim': 3})
