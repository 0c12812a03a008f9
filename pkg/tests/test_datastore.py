import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from targetsel.datastore import (
    FeatureMatrix,
    LabelVector,
    ProbabilityMatrix,
    load_features,
    load_labels,
    load_probabilities,
    save_features,
)
from targetsel.errors import DataFormatError, EmptyInputError


def write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestLoadFeatures:
    def test_identity_layout(self, tmp_path):
        m = load_features(write(tmp_path, "1.0,0.0\n0.0,1.0"))
        assert m.rows == 2 and m.dims == 2
        np.testing.assert_array_equal(m.values, np.eye(2))

    def test_single_row(self, tmp_path):
        m = load_features(write(tmp_path, "1.0,2.0,3.0"))
        assert (m.rows, m.dims) == (1, 3)

    def test_ragged_row_names_line(self, tmp_path):
        with pytest.raises(DataFormatError, match="line 2"):
            load_features(write(tmp_path, "1.0,2.0\n3.0"))

    def test_non_numeric_token(self, tmp_path):
        with pytest.raises(DataFormatError, match="non-numeric"):
            load_features(write(tmp_path, "1.0,abc"))

    def test_non_finite(self, tmp_path):
        with pytest.raises(DataFormatError, match="non-finite"):
            load_features(write(tmp_path, "1.0,inf"))

    def test_empty_file(self, tmp_path):
        with pytest.raises(EmptyInputError):
            load_features(write(tmp_path, ""))

    def test_loaded_matrix_is_immutable(self, tmp_path):
        m = load_features(write(tmp_path, "1.0,2.0"))
        with pytest.raises(ValueError):
            m.values[0, 0] = 5.0


class TestRoundTrip:
    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 6), d=st.integers(1, 5))
    def test_save_load_exact(self, tmp_path_factory, seed, n, d):
        rng = np.random.default_rng(seed)
        m = FeatureMatrix(rng.standard_normal((n, d)) * 10.0 ** rng.integers(-8, 8))
        path = tmp_path_factory.mktemp("rt") / "m.csv"
        save_features(m, path)
        back = load_features(path)
        np.testing.assert_array_equal(back.values, m.values)


class TestLoadLabels:
    def test_basic(self, tmp_path):
        lv = load_labels(write(tmp_path, "0\n1\n0"), num_classes=2)
        assert list(lv.labels) == [0, 1, 0]

    def test_out_of_range(self, tmp_path):
        with pytest.raises(DataFormatError, match="outside"):
            load_labels(write(tmp_path, "2"), num_classes=2)

    def test_sparse_classes_ok(self, tmp_path):
        lv = load_labels(write(tmp_path, "1\n1"), num_classes=10)
        assert list(lv.labels) == [1, 1]

    def test_non_integer(self, tmp_path):
        with pytest.raises(DataFormatError, match="non-integer"):
            load_labels(write(tmp_path, "1.5"), num_classes=2)


class TestLoadProbabilities:
    def test_single_row(self, tmp_path):
        p = load_probabilities(write(tmp_path, "0.5,0.5"))
        np.testing.assert_array_equal(p.values, [[0.5, 0.5]])

    def test_bad_row_sum(self, tmp_path):
        with pytest.raises(DataFormatError, match="sums to"):
            load_probabilities(write(tmp_path, "0.6,0.3"))

    def test_two_rows(self, tmp_path):
        p = load_probabilities(write(tmp_path, "1.0,0.0\n0.25,0.75"))
        assert (p.rows, p.num_classes) == (2, 2)

    def test_negative_entry(self, tmp_path):
        with pytest.raises(DataFormatError, match="out of"):
            load_probabilities(write(tmp_path, "-0.5,1.5"))


def test_label_vector_validates_range():
    with pytest.raises(DataFormatError):
        LabelVector(np.array([0, 3]), num_classes=3)


def test_probability_matrix_validates_rows():
    with pytest.raises(DataFormatError):
        ProbabilityMatrix(np.array([[0.7, 0.7]]))
