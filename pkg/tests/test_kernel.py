import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from targetsel.datastore import FeatureMatrix
from targetsel.errors import DegenerateFeatureError, ShapeError
from targetsel.kernel import KernelConfig, SimilarityKernel, build_kernel, regularize_psd


def fm(rows):
    return FeatureMatrix(np.array(rows, dtype=float))


class TestBuildKernel:
    def test_orthogonal_cosine(self):
        k = build_kernel(fm([[1, 0]]), fm([[0, 1]]), KernelConfig(transform="none"))
        assert k.values[0, 0] == pytest.approx(0.0, abs=1e-15)

    def test_orthogonal_shift_scale(self):
        k = build_kernel(fm([[1, 0]]), fm([[0, 1]]), KernelConfig())
        assert k.values[0, 0] == pytest.approx(0.5)

    @pytest.mark.parametrize("transform", ["none", "shift-scale", "clip"])
    def test_parallel_vectors(self, transform):
        k = build_kernel(fm([[2, 0]]), fm([[1, 0]]), KernelConfig(transform=transform))
        assert k.values[0, 0] == pytest.approx(1.0)

    def test_dimension_mismatch(self):
        with pytest.raises(ShapeError):
            build_kernel(fm([[1, 0]]), fm([[1, 0, 0]]), KernelConfig())

    def test_zero_norm_row_names_index(self):
        with pytest.raises(DegenerateFeatureError, match="row 1"):
            build_kernel(fm([[1, 0], [0, 0]]), fm([[1, 0]]), KernelConfig())

    def test_dot_metric(self):
        k = build_kernel(fm([[2, 0]]), fm([[3, 1]]), KernelConfig(metric="dot", transform="none"))
        assert k.values[0, 0] == pytest.approx(6.0)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 8), st.integers(1, 6))
    def test_within_set_unit_diagonal_and_range(self, seed, n, d):
        rng = np.random.default_rng(seed)
        a = FeatureMatrix(rng.standard_normal((n, d)) + 0.01)
        k = build_kernel(a, a, KernelConfig())
        assert k.symmetric
        np.testing.assert_array_equal(k.values, k.values.T)
        np.testing.assert_array_equal(np.diag(k.values), np.ones(n))
        assert np.all(k.values >= 0.0) and np.all(k.values <= 1.0)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 7), st.integers(1, 7), st.integers(1, 5))
    def test_transpose_consistency(self, seed, r, c, d):
        rng = np.random.default_rng(seed)
        a = FeatureMatrix(rng.standard_normal((r, d)))
        b = FeatureMatrix(rng.standard_normal((c, d)))
        ab = build_kernel(a, b, KernelConfig())
        ba = build_kernel(b, a, KernelConfig())
        np.testing.assert_array_equal(ab.values.T, ba.values)


class TestRegularizePsd:
    def test_identity_ridge(self):
        k = SimilarityKernel(np.eye(2), symmetric=True)
        out = regularize_psd(k, 1e-6)
        np.testing.assert_allclose(np.diag(out.values), [1.000001, 1.000001])

    def test_zero_ridge_unchanged(self):
        k = SimilarityKernel(np.eye(2), symmetric=True)
        assert regularize_psd(k, 0.0) is k

    def test_rank_one_plus_ridge_eigenvalues(self):
        k = SimilarityKernel(np.ones((2, 2)), symmetric=True)
        out = regularize_psd(k, 0.5)
        np.testing.assert_allclose(out.values, [[1.5, 1.0], [1.0, 1.5]])
        assert np.linalg.eigvalsh(out.values).min() == pytest.approx(0.5)

    def test_requires_symmetric(self):
        with pytest.raises(ShapeError):
            regularize_psd(SimilarityKernel(np.array([[1.0, 0.5]])), 0.1)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 8))
    def test_cholesky_succeeds_after_ridge(self, seed, n):
        rng = np.random.default_rng(seed)
        a = FeatureMatrix(rng.standard_normal((n, n + 2)))
        k = build_kernel(a, a, KernelConfig())
        ridged = regularize_psd(k, 1e-6)
        factor = np.linalg.cholesky(ridged.values)
        assert np.all(np.diag(factor) > 0)
