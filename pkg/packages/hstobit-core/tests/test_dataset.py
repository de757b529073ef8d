"""Tests for TobitDataset: censoring indicators, validation, subsetting and standardization."""

import numpy as np
import pytest
from hstobit_core import DomainError, SchemaError, TobitDataset, censoring_indicators


class TestCensoringIndicators:
    def test_threshold_value_is_censored(self):
        np.testing.assert_array_equal(censoring_indicators([0.0, 0.5, -0.0, 2.0], 0.0), [0, 1, 0, 1])

    def test_nonzero_threshold(self):
        np.testing.assert_array_equal(censoring_indicators([1.0, 1.5, 3.0], 1.5), [0, 0, 1])

    def test_non_finite(self):
        with pytest.raises(DomainError, match="finite"):
            censoring_indicators([1.0, np.nan], 0.0)
        with pytest.raises(DomainError, match="finite"):
            censoring_indicators([1.0], np.inf)


class TestTobitDataset:
    def test_shapes_and_indicators(self, small_data):
        assert (small_data.n, small_data.p) == (6, 2)
        np.testing.assert_array_equal(small_data.d, [1, 0, 1, 0, 1, 1])
        assert small_data.censored_fraction == pytest.approx(2 / 6)
        assert small_data.feature_names == ("x1", "x2")

    def test_arrays_are_read_only(self, small_data):
        with pytest.raises(ValueError):
            small_data.X[0, 0] = 9.0
        with pytest.raises(ValueError):
            small_data.y[0] = 9.0

    def test_input_is_copied(self):
        X = np.ones((2, 1))
        data = TobitDataset(X=X, y=np.array([1.0, 2.0]))
        X[0, 0] = 5.0
        assert data.X[0, 0] == 1.0

    def test_one_dimensional_X(self):
        with pytest.raises(DomainError, match="two-dimensional"):
            TobitDataset(X=np.ones(3), y=np.ones(3))

    def test_length_mismatch(self):
        with pytest.raises(DomainError, match="expected"):
            TobitDataset(X=np.ones((3, 2)), y=np.ones(4))

    def test_non_finite_X(self):
        X = np.ones((2, 2))
        X[1, 1] = np.nan
        with pytest.raises(DomainError, match="non-finite"):
            TobitDataset(X=X, y=np.ones(2))

    def test_response_below_threshold(self):
        with pytest.raises(DomainError, match="fall below the censoring threshold"):
            TobitDataset(X=np.ones((3, 1)), y=np.array([1.0, -0.5, 0.0]), c=0.0)

    def test_feature_name_count(self):
        with pytest.raises(DomainError, match="Got 1 feature names for 2 columns"):
            TobitDataset(X=np.ones((2, 2)), y=np.ones(2), feature_names=("a",))

    @pytest.mark.parametrize("name", ["iteration", "sigma2", "tau2"])
    def test_reserved_feature_name(self, name):
        with pytest.raises(SchemaError, match="reserved"):
            TobitDataset(X=np.ones((2, 2)), y=np.array([1.0, 0.0]), feature_names=(name, "x2"))

    def test_duplicate_feature_names(self):
        with pytest.raises(SchemaError, match="unique"):
            TobitDataset(X=np.ones((2, 2)), y=np.array([1.0, 0.0]), feature_names=("a", "a"))

    def test_all_censored_is_valid(self):
        data = TobitDataset(X=np.ones((3, 1)), y=np.full(3, -1.0), c=-1.0)
        assert data.censored_fraction == 1.0

    def test_subset_keeps_metadata(self, small_data):
        part = small_data.standardized().subset([1, 4])
        assert part.n == 2
        assert part.feature_names == small_data.feature_names
        assert part.scales is not None
        np.testing.assert_array_equal(part.d, [0, 1])


class TestStandardization:
    def test_unit_sd_without_centring(self, small_data):
        scaled = small_data.standardized()
        np.testing.assert_allclose(scaled.X.std(axis=0, ddof=1), 1.0)
        np.testing.assert_allclose(scaled.X * scaled.scales, small_data.X)
        np.testing.assert_array_equal(scaled.y, small_data.y)

    def test_idempotent(self, small_data):
        scaled = small_data.standardized()
        assert scaled.standardized() is scaled

    def test_constant_column_keeps_scale_one(self):
        X = np.column_stack([np.full(4, 3.0), [1.0, 2.0, 3.0, 4.0]])
        scaled = TobitDataset(X=X, y=np.ones(4)).standardized()
        assert scaled.scales[0] == 1.0
        np.testing.assert_array_equal(scaled.X[:, 0], 3.0)

    def test_single_row(self):
        scaled = TobitDataset(X=np.array([[2.0, 4.0]]), y=np.array([1.0])).standardized()
        np.testing.assert_array_equal(scaled.scales, [1.0, 1.0])

    def test_coefficients_map_back(self, small_data):
        scaled = small_data.standardized()
        beta_scaled = np.array([0.7, -1.2])
        beta = scaled.to_original_scale(beta_scaled)
        np.testing.assert_allclose(small_data.X @ beta, scaled.X @ beta_scaled)

    def test_unscaled_dataset_passes_coefficients_through(self, small_data):
        np.testing.assert_array_equal(small_data.to_original_scale([1.0, 2.0]), [1.0, 2.0])
