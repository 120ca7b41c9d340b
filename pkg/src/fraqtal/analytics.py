"""Corpus statistics: standardization, correlation, PCA and k-means."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .rng import KMEANS_CONST, SplitMix64, splitmix64


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    column_names: tuple[str, ...]
    rows: np.ndarray
    dropped: int = 0

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[1] != len(self.column_names):
            raise ValueError(f"rows shape {rows.shape} does not match {len(self.column_names)} columns")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_records(cls, column_names, records) -> "FeatureMatrix":
        """Build from row sequences, dropping (and counting) rows with missing or non-finite values."""
        kept, dropped = [], 0
        for rec in records:
            try:
                vals = [float(v) for v in rec]
            except (TypeError, ValueError):
                dropped += 1
                continue
            if len(vals) != len(column_names) or not all(math.isfinite(v) for v in vals):
                dropped += 1
                continue
            kept.append(vals)
        rows = np.array(kept, dtype=np.float64).reshape(len(kept), len(column_names))
        return cls(tuple(column_names), rows, dropped)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows.shape

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.column_names.index(name)]


@dataclass(frozen=True, eq=False)
class Standardized:
    matrix: FeatureMatrix
    means: np.ndarray
    scales: np.ndarray
    flagged: tuple[str, ...]


def standardize(X: FeatureMatrix) -> Standardized:
    """Z-score each column with the population std; constant columns become zeros and are flagged."""
    rows = X.rows
    if rows.shape[0] < 2:
        raise ValueError("standardize needs at least 2 rows")
    means = rows.mean(axis=0)
    centered = rows - means
    stds = np.sqrt((centered ** 2).mean(axis=0))
    constant = stds == 0
    scales = np.where(constant, 1.0, stds)
    z = np.where(constant, 0.0, centered / scales)
    flagged = tuple(n for n, c in zip(X.column_names, constant) if c)
    return Standardized(FeatureMatrix(X.column_names, z), means, scales, flagged)


def correlation_matrix(X: FeatureMatrix) -> tuple[np.ndarray, tuple[str, ...]]:
    """Pearson correlations plus the names of zero-variance columns.

    Every entry involving a zero-variance column, its diagonal included, is
    reported as 0.
    """
    rows = X.rows
    n, m = rows.shape
    if n < 2:
        raise ValueError("correlation needs at least 2 rows")
    centered = rows - rows.mean(axis=0)
    ss = (centered ** 2).sum(axis=0)
    flat = ss == 0
    corr = np.zeros((m, m))
    for i in range(m):
        if flat[i]:
            continue
        corr[i, i] = 1.0
        for j in range(i + 1, m):
            if flat[j]:
                continue
            r = float(np.dot(centered[:, i], centered[:, j])) / math.sqrt(ss[i] * ss[j])
            corr[i, j] = corr[j, i] = min(1.0, max(-1.0, r))
    flagged = tuple(name for name, f in zip(X.column_names, flat) if f)
    return corr, flagged


# -------------------------------------------------------------------- PCA

def jacobi_eigh(a: np.ndarray, tol: float = 1e-12, max_sweeps: int = 100):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvectors as columns,
    unsorted. Sweeps stop once the off-diagonal Frobenius norm drops below
    ``tol``.
    """
    a = np.array(a, dtype=np.float64)
    m = a.shape[0]
    v = np.eye(m)
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum(a ** 2) - np.sum(np.diag(a) ** 2)))
        if off < tol:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(m)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                a[p, q] = a[q, p] = 0.0
                v = v @ rot
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    return np.diag(a).copy(), v


@dataclass(frozen=True, eq=False)
class PcaModel:
    column_names: tuple[str, ...]
    means: np.ndarray
    scales: np.ndarray
    components: np.ndarray
    explained_variance_ratio: np.ndarray
    eigenvalues: np.ndarray

    def transform(self, rows: np.ndarray) -> np.ndarray:
        return ((np.asarray(rows, dtype=np.float64) - self.means) / self.scales) @ self.components.T


def pca_fit_transform(X: FeatureMatrix, n_components: int = 2, scale: bool = True):
    """Fit PCA on the z-scored columns (or only centered when ``scale`` is False).

    Components are unit rows sorted by descending eigenvalue, each signed so
    that its largest-magnitude entry is positive. Returns ``(model, scores)``.
    """
    n, m = X.shape
    if n < 3:
        raise ValueError("PCA needs at least 3 rows")
    if m < n_components:
        raise ValueError(f"PCA to {n_components} components needs at least {n_components} columns")
    if scale:
        st = standardize(X)
        z, means, scales = st.matrix.rows, st.means, st.scales
    else:
        means = X.rows.mean(axis=0)
        scales = np.ones(m)
        z = X.rows - means
    cov = (z.T @ z) / n
    evals, evecs = jacobi_eigh(cov)
    order = sorted(range(m), key=lambda i: (-evals[i], i))
    evals = np.clip(evals[order], 0.0, None)
    evecs = evecs[:, order]
    comps = evecs[:, :n_components].T.copy()
    for row in comps:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    total = evals.sum()
    ratio = evals[:n_components] / total if total > 0 else np.zeros(n_components)
    model = PcaModel(X.column_names, means, scales, comps, ratio, evals)
    return model, z @ comps.T


# ---------------------------------------------------------------- k-means

@dataclass(frozen=True, eq=False)
class KMeansModel:
    k: int
    centroids: np.ndarray
    labels: np.ndarray
    inertia: float
    n_iter: int = 0
    inertia_history: tuple[float, ...] = field(default_factory=tuple)


def _sq_dists(x: np.ndarray, c: np.ndarray) -> np.ndarray:
    return ((x[:, None, :] - c[None, :, :]) ** 2).sum(axis=2)


def _assign(x: np.ndarray, c: np.ndarray):
    d = _sq_dists(x, c)
    labels = np.argmin(d, axis=1)  # ties go to the lowest centroid index
    return labels, d[np.arange(len(x)), labels]


def _plus_plus(x: np.ndarray, k: int, rng: SplitMix64) -> np.ndarray:
    n = len(x)
    centers = [x[rng.randbelow(n)]]
    closest = ((x - centers[0]) ** 2).sum(axis=1)
    for _ in range(1, k):
        total = closest.sum()
        if total <= 0:
            idx = rng.randbelow(n)
        else:
            cdf = np.cumsum(closest)
            idx = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
            idx = min(idx, n - 1)
        centers.append(x[idx])
        closest = np.minimum(closest, ((x - x[idx]) ** 2).sum(axis=1))
    return np.array(centers)


def _lloyd(x, centroids, k, max_iter, tol):
    history = []
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        labels, d = _assign(x, centroids)
        history.append(float(d.sum()))
        new = np.empty_like(centroids)
        taken = set()
        for j in range(k):
            members = labels == j
            if members.any():
                new[j] = x[members].mean(axis=0)
                continue
            # empty: reseed at the point farthest from its assigned centroid
            for idx in np.argsort(-d, kind="stable"):
                if int(idx) not in taken:
                    taken.add(int(idx))
                    new[j] = x[idx]
                    d[idx] = 0.0
                    break
        shift = float(np.sqrt(((new - centroids) ** 2).sum(axis=1)).max())
        centroids = new
        if shift < tol:
            break
    labels, d = _assign(x, centroids)
    history.append(float(d.sum()))
    return centroids, labels, float(d.sum()), n_iter, history


def kmeans_fit(X, k: int = 3, seed: int = 0, n_init: int = 10, max_iter: int = 300,
               tol: float = 1e-6) -> KMeansModel:
    """k-means++ seeding and Lloyd iterations; best of ``n_init`` restarts by inertia.

    Restart ``r`` draws from its own stream, and ties in inertia keep the
    earliest restart, so the result depends only on ``(X, k, seed)``.
    """
    x = np.asarray(X.rows if isinstance(X, FeatureMatrix) else X, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("k-means expects a 2-D array")
    if k < 1 or len(x) < k:
        raise ValueError(f"k-means needs N >= k >= 1 (N={len(x)}, k={k})")
    best = None
    for r in range(n_init):
        rng = SplitMix64(splitmix64((seed ^ KMEANS_CONST) + r))
        init = _plus_plus(x, k, rng)
        cents, labels, inertia, n_iter, hist = _lloyd(x, init, k, max_iter, tol)
        if best is None or inertia < best.inertia:
            best = KMeansModel(k, cents, labels, inertia, n_iter, tuple(hist))
    return best


def relabel_by_size(model: KMeansModel) -> KMeansModel:
    """Renumber clusters so id 0 is the largest; equal sizes keep their old order."""
    counts = np.bincount(model.labels, minlength=model.k)
    order = sorted(range(model.k), key=lambda j: (-counts[j], j))
    remap = np.empty(model.k, dtype=np.intp)
    remap[order] = np.arange(model.k)
    return KMeansModel(model.k, model.centroids[order], remap[model.labels], model.inertia,
                       model.n_iter, model.inertia_history)


@dataclass(frozen=True)
class ClusterSummary:
    cluster: int
    count: int
    means: dict


def cluster_summary(X: FeatureMatrix, labels) -> list[ClusterSummary]:
    """Per-cluster counts and raw feature means, largest cluster first."""
    labels = np.asarray(labels)
    if len(labels) != X.shape[0]:
        raise ValueError("labels do not align with rows")
    out = []
    for j in np.unique(labels):
        members = X.rows[labels == j]
        means = {name: float(v) for name, v in zip(X.column_names, members.mean(axis=0))}
        out.append(ClusterSummary(int(j), int(len(members)), means))
    out.sort(key=lambda s: (-s.count, s.cluster))
    return out
