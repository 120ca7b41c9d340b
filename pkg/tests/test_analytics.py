import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sklearn.metrics import adjusted_rand_score

from fraqtal.analytics import (FeatureMatrix, _assign, cluster_summary, correlation_matrix,
                               jacobi_eigh, kmeans_fit, pca_fit_transform, relabel_by_size,
                               standardize)


def fm(*cols, names=None):
    rows = np.column_stack(cols).astype(float)
    return FeatureMatrix(tuple(names or [f"x{i}" for i in range(rows.shape[1])]), rows)


def blobs(sigma=0.1, n=50, seed=7):
    rng = np.random.default_rng(seed)
    centers = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]])
    truth = np.repeat(np.arange(3), n)
    return centers[truth] + rng.normal(0, sigma, (3 * n, 2)), truth, centers


# --------------------------------------------------------------- matrices

def test_from_records_drops_bad_rows():
    X = FeatureMatrix.from_records(("a", "b"), [(1, 2), (3, float("nan")), ("", 1), (4, 5), (1,)])
    assert X.shape == (2, 2) and X.dropped == 3
    np.testing.assert_array_equal(X.column("b"), [2, 5])


def test_standardize_examples():
    st_ = standardize(fm([1, 3]))
    np.testing.assert_allclose(st_.matrix.rows[:, 0], [-1, 1])
    flat = standardize(fm([5, 5, 5], [1, 2, 3], names=["c", "v"]))
    np.testing.assert_array_equal(flat.matrix.column("c"), [0, 0, 0])
    assert flat.flagged == ("c",)


def test_standardize_moments():
    X = fm(*np.random.default_rng(0).normal(3, 5, (4, 40)))
    z = standardize(X).matrix.rows
    np.testing.assert_allclose(z.mean(axis=0), 0, atol=1e-12)
    np.testing.assert_allclose(z.std(axis=0), 1, atol=1e-12)


def test_standardize_needs_two_rows():
    with pytest.raises(ValueError):
        standardize(fm([1.0]))


def test_correlation_negation_is_exact():
    x = np.random.default_rng(5).normal(size=37)
    corr, flagged = correlation_matrix(fm(x, -x))
    assert corr[0, 1] == -1.0 and corr[0, 0] == 1.0 and flagged == ()


def test_correlation_with_constant():
    corr, flagged = correlation_matrix(fm([1, 2, 3], [4, 4, 4], names=["x", "k"]))
    assert corr[0, 1] == 0.0 and corr[1, 1] == 0.0
    assert flagged == ("k",)


def test_correlation_matches_numpy():
    X = np.random.default_rng(2).normal(size=(30, 5))
    corr, _ = correlation_matrix(fm(*X.T))
    np.testing.assert_allclose(corr, np.corrcoef(X.T), atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 40), st.integers(1, 6))
def test_correlation_invariants(seed, n, m):
    X = np.random.default_rng(seed).normal(size=(n, m))
    corr, _ = correlation_matrix(fm(*X.T))
    np.testing.assert_allclose(corr, corr.T, atol=1e-12)
    assert np.all(np.abs(corr) <= 1)
    assert np.all(np.diag(corr) == 1.0)


# -------------------------------------------------------------------- PCA

@pytest.mark.parametrize("seed", range(5))
def test_jacobi_matches_lapack(seed):
    a = np.random.default_rng(seed).normal(size=(6, 6))
    a = a + a.T
    vals, vecs = jacobi_eigh(a)
    np.testing.assert_allclose(np.sort(vals), np.linalg.eigvalsh(a), atol=1e-10)
    np.testing.assert_allclose(a @ vecs, vecs * vals, atol=1e-10)
    np.testing.assert_allclose(vecs.T @ vecs, np.eye(6), atol=1e-12)


def test_pca_rank_one():
    x = np.arange(10.0)
    model, _ = pca_fit_transform(fm(x, 2 * x))
    np.testing.assert_allclose(model.explained_variance_ratio, [1.0, 0.0], atol=1e-8)


def test_pca_components_orthonormal():
    X = fm(*np.random.default_rng(4).normal(size=(3, 50)))
    model, _ = pca_fit_transform(X)
    np.testing.assert_allclose(model.components @ model.components.T, np.eye(2), atol=1e-8)


@pytest.mark.parametrize("theta_deg", [0, 17, 45, 110, 160])
def test_pca_recovers_rotation(theta_deg):
    rng = np.random.default_rng(theta_deg)
    raw = rng.normal(size=(4000, 2)) * np.sqrt([10.0, 1.0])
    t = math.radians(theta_deg)
    rot = np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])
    pts = raw @ rot.T
    model, _ = pca_fit_transform(fm(*pts.T), scale=False)
    pc1 = model.components[0]
    angle = math.degrees(math.acos(min(1.0, abs(pc1 @ rot[:, 0]))))
    assert angle < 2.0


def test_pca_reconstruction_and_centered_scores():
    rng = np.random.default_rng(9)
    basis = rng.normal(size=(2, 4))
    X = fm(*(rng.normal(size=(60, 2)) @ basis).T)
    model, scores = pca_fit_transform(X)
    z = standardize(X).matrix.rows
    np.testing.assert_allclose(scores @ model.components, z, atol=1e-8)
    np.testing.assert_allclose(scores.mean(axis=0), 0, atol=1e-10)
    np.testing.assert_allclose(model.transform(X.rows), scores, atol=1e-12)


def test_pca_sign_convention():
    model, _ = pca_fit_transform(fm(*np.random.default_rng(1).normal(size=(3, 20))))
    for row in model.components:
        assert row[np.argmax(np.abs(row))] > 0


def test_pca_needs_three_rows():
    with pytest.raises(ValueError):
        pca_fit_transform(fm([1, 2], [3, 5]))


# ---------------------------------------------------------------- k-means

def test_kmeans_single_cluster():
    x = np.random.default_rng(0).normal(size=(20, 3))
    m = kmeans_fit(x, k=1)
    np.testing.assert_allclose(m.centroids[0], x.mean(axis=0), atol=1e-12)
    assert np.all(m.labels == 0)


def test_kmeans_planted_blobs():
    x, truth, _ = blobs()
    m = kmeans_fit(x, k=3, seed=1)
    assert adjusted_rand_score(truth, m.labels) == 1.0


def test_kmeans_duplicate_rows_share_labels():
    x, _, _ = blobs(n=10)
    doubled = np.vstack([x, x])
    m = kmeans_fit(doubled, k=3)
    np.testing.assert_array_equal(m.labels[:30], m.labels[30:])


def test_kmeans_deterministic():
    x, _, _ = blobs(sigma=2.0)
    a, b = kmeans_fit(x, k=3, seed=42), kmeans_fit(x, k=3, seed=42)
    np.testing.assert_array_equal(a.labels, b.labels)
    assert a.centroids.tobytes() == b.centroids.tobytes()


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 5))
def test_kmeans_inertia_monotone_and_fixed_point(seed, k):
    x = np.random.default_rng(seed).normal(size=(30, 2))
    m = kmeans_fit(x, k=k, seed=seed, n_init=1)
    hist = m.inertia_history
    assert all(b <= a + 1e-9 * max(1.0, a) for a, b in zip(hist, hist[1:]))
    labels, _ = _assign(x, m.centroids)
    np.testing.assert_array_equal(labels, m.labels)


def test_kmeans_rejects_too_few_points():
    with pytest.raises(ValueError):
        kmeans_fit(np.zeros((2, 2)), k=3)


def test_kmeans_identical_points_keeps_clusters_nonempty_where_possible():
    x = np.vstack([np.zeros((5, 2)), np.ones((5, 2))])
    m = kmeans_fit(x, k=2)
    assert sorted(np.bincount(m.labels)) == [5, 5]


def test_relabel_by_size():
    x = np.vstack([np.zeros((2, 1)), np.full((5, 1), 10.0), np.full((3, 1), 20.0)])
    m = relabel_by_size(kmeans_fit(x, k=3))
    assert np.bincount(m.labels).tolist() == [5, 3, 2]
    assert m.centroids[0, 0] == 10.0


def test_cluster_summary_single():
    X = fm([1.0, 2.0, 6.0], [0.0, 0.0, 3.0])
    (s,) = cluster_summary(X, [0, 0, 0])
    assert s.count == 3 and s.means == {"x0": 3.0, "x1": 1.0}


def test_cluster_summary_planted():
    x, truth, centers = blobs(n=60)
    X = fm(*x.T)
    summary = cluster_summary(X, relabel_by_size(kmeans_fit(x, k=3)).labels)
    assert sum(s.count for s in summary) == 180
    found = sorted((s.means["x0"], s.means["x1"]) for s in summary)
    bound = 3 * 0.1 / math.sqrt(60)
    for (mx, my), (cx, cy) in zip(found, sorted(map(tuple, centers))):
        assert abs(mx - cx) <= bound and abs(my - cy) <= bound
