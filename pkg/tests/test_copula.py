import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from scipy.spatial.distance import cdist
from scipy.special import psi

from cefacies.copula import (
    EPS_FLOOR,
    DataMatrix,
    ce_with_label,
    copula_entropy,
    jitter_labels,
    knn_entropy,
    kth_neighbor_distances,
    rank_transform,
)
from cefacies.errors import DegenerateError, InputError


def brute_force_knn_entropy(points, k):
    """Reference estimator: dense Chebyshev distance matrix plus scipy's psi."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n, d = points.shape
    dist = np.sort(cdist(points, points, "chebyshev"), axis=1)
    eps = dist[:, k]
    eps = np.where(eps == 0, EPS_FLOOR, eps)
    return -psi(k) + psi(n) + d * np.log(2) + d * np.mean(np.log(eps))


def gaussian_pair(rho, n, seed):
    rng = np.random.default_rng(seed)
    return rng.multivariate_normal([0.0, 0.0], [[1.0, rho], [rho, 1.0]], size=n)


# -- DataMatrix ---------------------------------------------------------------

def test_datamatrix_rejects_nan():
    with pytest.raises(InputError, match="non-finite"):
        DataMatrix([[1.0, np.nan], [2.0, 3.0]], ["a", "b"])


def test_datamatrix_rejects_duplicate_names():
    with pytest.raises(InputError, match="duplicate"):
        DataMatrix(np.zeros((3, 2)), ["a", "a"])


def test_datamatrix_rejects_single_row():
    with pytest.raises(InputError):
        DataMatrix([[1.0, 2.0]], ["a", "b"])


def test_datamatrix_is_read_only():
    m = DataMatrix(np.zeros((3, 2)), ["a", "b"])
    with pytest.raises(ValueError):
        m.values[0, 0] = 1.0


# -- rank_transform -----------------------------------------------------------

def test_rank_tie_free_column():
    u = rank_transform(np.array([3.2, 1.1, 2.5])).u.ravel()
    assert u.tolist() == [3 / 3, 1 / 3, 2 / 3]


def test_rank_full_tie():
    assert rank_transform(np.array([5.0, 5.0])).u.ravel().tolist() == [0.75, 0.75]


@pytest.mark.parametrize("x", [1.0, 1000.0])
def test_rank_scaled_column(x):
    u = rank_transform(np.array([x, 2 * x, 3 * x])).u.ravel()
    assert u.tolist() == [1 / 3, 2 / 3, 3 / 3]


def test_rank_rejects_non_finite():
    with pytest.raises(InputError):
        rank_transform(np.array([1.0, np.inf, 2.0]))


@settings(max_examples=60)
@given(arrays(np.float64, st.tuples(st.integers(2, 40), st.integers(1, 3)),
              elements=st.floats(-1e6, 1e6, allow_nan=False)))
def test_rank_properties(values):
    n = values.shape[0]
    u = rank_transform(values).u
    assert np.all(u > 0) and np.all(u <= 1)
    for j in range(values.shape[1]):
        col = values[:, j]
        # order isomorphism, including ties
        assert np.array_equal(col[:, None] < col[None, :], u[:, j][:, None] < u[:, j][None, :])
        if np.unique(col).size == n:
            assert sorted(u[:, j].tolist()) == [(i + 1) / n for i in range(n)]


# -- knn_entropy --------------------------------------------------------------

def test_knn_entropy_four_points_closed_form():
    # each point's nearest neighbour is 0.25 away, so the sum of logs is 4 ln(1/4);
    # psi(4) - psi(1) = 1 + 1/2 + 1/3
    expected = 11 / 6 + math.log(2) + math.log(0.25)
    got = knn_entropy(np.array([[0.25], [0.5], [0.75], [1.0]]), k=1)
    assert got == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(1.1401861527733880, abs=1e-15)


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("k", [1, 3, 7])
@pytest.mark.parametrize("d", [1, 2, 3])
def test_knn_entropy_matches_brute_force(seed, k, d):
    pts = np.random.default_rng(seed).uniform(size=(300, d))
    assert knn_entropy(pts, k) == pytest.approx(brute_force_knn_entropy(pts, k), abs=1e-12)


def test_knn_entropy_with_duplicates_matches_brute_force():
    rng = np.random.default_rng(3)
    pts = rng.integers(0, 5, size=(200, 2)) / 5.0
    assert knn_entropy(pts, 3) == pytest.approx(brute_force_knn_entropy(pts, 3), abs=1e-12)


def test_kth_neighbor_distances_excludes_self():
    d = kth_neighbor_distances(np.array([[0.0], [1.0], [3.0]]), 1)
    assert d.tolist() == [1.0, 1.0, 2.0]


def test_knn_entropy_uniform_square_near_zero():
    vals = [knn_entropy(np.random.default_rng(s).uniform(size=(2000, 2)), 3) for s in range(10)]
    assert abs(np.mean(vals)) < 0.05


def test_knn_entropy_comonotone_strongly_negative():
    x = np.random.default_rng(0).normal(size=500)
    u = rank_transform(np.column_stack([x, x])).u
    assert knn_entropy(u, 3) < -1


def test_knn_entropy_deterministic():
    pts = np.random.default_rng(1).uniform(size=(500, 2))
    assert knn_entropy(pts, 3) == knn_entropy(pts.copy(), 3)


def test_knn_entropy_errors():
    pts = np.random.default_rng(1).uniform(size=(4, 2))
    with pytest.raises(DegenerateError):
        knn_entropy(pts, 4)
    with pytest.raises(InputError):
        knn_entropy(pts, 0)
    with pytest.raises(DegenerateError, match="identical"):
        knn_entropy(np.ones((10, 2)), 3)


# -- copula_entropy -----------------------------------------------------------

def test_ce_independent_normals_near_zero():
    vals = [copula_entropy(DataMatrix(np.random.default_rng(s).normal(size=(2000, 2)), ["a", "b"]), 3).value
            for s in range(10)]
    assert abs(np.mean(vals)) < 0.05


@pytest.mark.parametrize("rho", [0.3, 0.6, 0.9])
def test_ce_gaussian_oracle(rho):
    truth = 0.5 * math.log(1 - rho ** 2)
    vals = [copula_entropy(DataMatrix(gaussian_pair(rho, 2000, s), ["a", "b"]), 3).value for s in range(10)]
    assert abs(np.mean(vals) - truth) < 0.08


def test_ce_exp_transform_bit_identical():
    z = gaussian_pair(0.7, 1000, 4)
    a = copula_entropy(DataMatrix(z, ["a", "b"]), 3)
    b = copula_entropy(DataMatrix(np.column_stack([z[:, 0], np.exp(z[:, 1])]), ["a", "b"]), 3)
    assert a.value == b.value


def test_ce_row_permutation_and_column_swap_exact():
    z = gaussian_pair(0.5, 800, 5)
    base = copula_entropy(DataMatrix(z, ["a", "b"]), 3).value
    perm = np.random.default_rng(0).permutation(len(z))
    assert copula_entropy(DataMatrix(z[perm], ["a", "b"]), 3).value == base
    assert copula_entropy(DataMatrix(z[:, ::-1], ["b", "a"]), 3).value == base


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.01, 100.0), st.floats(-50.0, 50.0))
def test_ce_monotone_invariance_property(seed, scale, shift):
    z = gaussian_pair(0.4, 300, seed)
    base = copula_entropy(DataMatrix(z, ["a", "b"]), 3).value
    moved = np.column_stack([scale * z[:, 0] + shift, z[:, 1] ** 3])
    assert copula_entropy(DataMatrix(moved, ["a", "b"]), 3).value == base


def test_ce_rejects_single_column():
    with pytest.raises(InputError):
        copula_entropy(DataMatrix(np.zeros((10, 1)) + np.arange(10)[:, None], ["a"]), 3)


def test_ce_rejects_small_n():
    with pytest.raises(DegenerateError):
        copula_entropy(DataMatrix(np.arange(6.0).reshape(3, 2), ["a", "b"]), 3)


def test_ce_estimate_fields():
    est = copula_entropy(DataMatrix(gaussian_pair(0.2, 100, 0), ["a", "b"]), 4)
    assert (est.k, est.n, est.d, est.n_floored) == (4, 100, 2, 0)
    assert math.isfinite(est.value)


# -- ce_with_label ------------------------------------------------------------

def test_ce_feature_equal_to_label_strongly_negative():
    label = np.random.default_rng(0).integers(1, 4, size=500)
    est = ce_with_label(DataMatrix(label.astype(float), ["f"]), label, 0, 3)
    assert est.value < -0.5
    # every point coincides with at least k others of its class
    assert est.n_floored == 500


def test_ce_label_null_with_jitter():
    vals = []
    for s in range(10):
        rng = np.random.default_rng(s)
        f = rng.uniform(size=2000)
        label = rng.integers(1, 4, size=2000)
        vals.append(ce_with_label(DataMatrix(f, ["f"]), label, 0, 3, jitter=True, seed=s).value)
    assert abs(np.mean(vals)) < 0.07


def test_ce_label_default_ties_put_null_far_below_zero():
    # average-rank ties put the label on c lines; the offset is shared by all features
    rng = np.random.default_rng(0)
    f = rng.uniform(size=2000)
    label = rng.integers(1, 4, size=2000)
    assert ce_with_label(DataMatrix(f, ["f"]), label, 0, 3).value < -3


@pytest.mark.parametrize("jitter", [False, True])
def test_ce_class_mean_plus_noise_beats_independent(jitter):
    rng = np.random.default_rng(11)
    label = rng.integers(1, 4, size=1000)
    informative = label + rng.normal(0, 0.3, size=1000)
    independent = rng.normal(0, 1, size=1000)
    feats = DataMatrix(np.column_stack([informative, independent]), ["inf", "ind"])
    a = ce_with_label(feats, label, "inf", 3, jitter=jitter, seed=2).value
    b = ce_with_label(feats, label, "ind", 3, jitter=jitter, seed=2).value
    assert a < b


def test_ce_with_label_rejects_constant_label():
    with pytest.raises(DegenerateError, match="constant"):
        ce_with_label(DataMatrix(np.arange(10.0), ["f"]), np.ones(10, dtype=int), 0)


def test_ce_with_label_rejects_length_mismatch():
    with pytest.raises(InputError):
        ce_with_label(DataMatrix(np.arange(10.0), ["f"]), np.arange(9) % 2, 0)


def test_jitter_is_seeded_and_bounded():
    label = np.repeat([1, 2, 3], 30)
    a, b = jitter_labels(label, 7), jitter_labels(label, 7)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, jitter_labels(label, 8))
    assert np.max(np.abs(a - label)) < 1e-6
    # class order survives the jitter
    blocks = a.reshape(3, -1)
    assert np.all(blocks[:-1].max(axis=1) < blocks[1:].min(axis=1))
