import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from iqls.exceptions import InvalidArgumentError, RankDeficientError
from iqls.linalg import Dataset, classical_ls, gram, mse, sse


@pytest.mark.parametrize(
    "X, y, w, expected",
    [
        ([[1], [1]], [0, 0], [0], 0.0),
        ([[1]], [2], [0.5], 2.25),
        ([[1, 1], [1, -1]], [3, 1], [2, 1], 0.0),
    ],
)
def test_sse_examples(X, y, w, expected):
    assert sse(Dataset(X, y), w) == expected


@pytest.mark.parametrize(
    "X, y, w, expected",
    [
        ([[1], [1]], [0, 0], [0], 0.0),
        ([[1]], [2], [0.5], 2.25),
        ([[1], [1]], [1, 3], [2], 1.0),
    ],
)
def test_mse_examples(X, y, w, expected):
    assert mse(Dataset(X, y), w) == expected


def test_gram_examples():
    gc = gram(Dataset([[1], [1]], [1, 1]))
    np.testing.assert_array_equal(gc.G, [[2]])
    np.testing.assert_array_equal(gc.h, [2])
    assert gc.yy == 2

    gc = gram(Dataset([[1, 0], [0, 1]], [3, 4]))
    np.testing.assert_array_equal(gc.G, np.eye(2))
    np.testing.assert_array_equal(gc.h, [3, 4])
    assert gc.yy == 25

    gc = gram(Dataset([[1, 2]], [1]))
    np.testing.assert_array_equal(gc.G, [[1, 2], [2, 4]])
    np.testing.assert_array_equal(gc.h, [1, 2])
    assert gc.yy == 1


@pytest.mark.parametrize(
    "X, y, expected",
    [
        ([[1], [1]], [2, 2], [2]),
        ([[1, 1], [1, -1]], [3, 1], [2, 1]),
        ([[1], [1]], [1, 3], [2]),
    ],
)
def test_classical_ls_examples(X, y, expected):
    np.testing.assert_allclose(classical_ls(Dataset(X, y)), expected, rtol=1e-14)


def test_dimension_mismatch_is_rejected():
    ds = Dataset([[1, 2]], [1])
    with pytest.raises(InvalidArgumentError):
        sse(ds, [1.0])
    with pytest.raises(InvalidArgumentError):
        mse(ds, [1.0, 2.0, 3.0])


@pytest.mark.parametrize(
    "X, y",
    [
        ([[1, 2]], [1, 2]),
        ([1, 2], [1, 2]),
        ([[np.nan]], [1]),
        ([[1.0]], [np.inf]),
        (np.zeros((0, 2)), np.zeros(0)),
    ],
)
def test_invalid_datasets(X, y):
    with pytest.raises(InvalidArgumentError):
        Dataset(X, y)


def test_rank_deficient_names_pivot():
    X = [[1, 2], [2, 4], [3, 6]]
    with pytest.raises(RankDeficientError, match="pivot 1") as info:
        classical_ls(Dataset(X, [1, 2, 3]))
    assert info.value.pivot == 1


def test_zero_matrix_is_rank_deficient():
    with pytest.raises(RankDeficientError):
        classical_ls(Dataset([[0.0], [0.0]], [1, 2]))


def test_consistent_system_residual(rng):
    X = rng.normal(size=(50, 4))
    y = X @ np.array([1.5, -2.0, 0.25, 3.0])
    ds = Dataset(X, y)
    w = classical_ls(ds)
    assert sse(ds, w) <= 1e-16 * float(y @ y) + 1e-20


finite = st.floats(-100, 100, allow_nan=False, allow_infinity=False)


@st.composite
def dataset_and_weights(draw):
    n = draw(st.integers(1, 12))
    d = draw(st.integers(1, 4))
    X = draw(arrays(np.float64, (n, d), elements=finite))
    y = draw(arrays(np.float64, (n,), elements=finite))
    w = draw(arrays(np.float64, (d,), elements=finite))
    return Dataset(X, y), w


@given(dataset_and_weights())
def test_sse_nonnegative(case):
    ds, w = case
    assert sse(ds, w) >= 0


@given(dataset_and_weights())
def test_gram_factorization_matches_direct_sse(case):
    ds, w = case
    gc = gram(ds)
    direct = sse(ds, w)
    # the expansion cancels terms of size |y|^2 + |Xw|^2
    scale = gc.yy + float(np.sum((ds.X @ w) ** 2)) + direct
    assert abs(gc.sse(w) - direct) <= 1e-9 * max(direct, 1e-300) + 1e-12 * scale
    np.testing.assert_array_equal(gc.G, gc.G.T)
    assert np.all(np.diag(gc.G) >= 0)


def test_gram_sse_relative_agreement_random(rng):
    for _ in range(200):
        n, d = rng.integers(1, 30), rng.integers(1, 6)
        ds = Dataset(rng.normal(size=(n, d)), rng.normal(size=n))
        w = rng.normal(size=d)
        assert gram(ds).sse(w) == pytest.approx(sse(ds, w), rel=1e-9)


def test_classical_ls_normal_equation_residual(rng):
    for _ in range(50):
        n, d = rng.integers(10, 60), rng.integers(1, 8)
        X = rng.normal(size=(n, d))
        ds = Dataset(X, rng.normal(size=n))
        gc = gram(ds)
        w = classical_ls(ds)
        assert np.max(np.abs(gc.G @ w - gc.h)) <= 1e-8 * (1 + np.max(np.abs(gc.h)))
