"""PCA by randomized SVD with a cumulative explained-variance cutoff.

The solver follows the randomized range-finder scheme: project onto a seeded
Gaussian test matrix with oversampling, stabilize with QR power iterations,
then take the exact SVD of the small projected matrix.  Components are
capped (default 2000) and then truncated at the smallest prefix reaching the
variance target (default 90%); if no prefix reaches the target, all capped
components are retained.

The variance-ratio denominator defaults to the total variance of the
centered training data; ``denominator="captured"`` instead normalizes by the
variance captured by the computed components.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import lpio
from .seeding import derive_rng


class ParameterError(ValueError):
    pass


class InsufficientDataError(ValueError):
    pass


def randomized_svd(matrix, k, oversample=10, power_iters=4, seed=0):
    """Approximate rank-k SVD; returns (U n x k, S length k, V d x k)."""
    matrix = np.asarray(matrix, dtype=np.float64)
    n, d = matrix.shape
    if not 1 <= k <= min(n, d):
        raise ParameterError(f"k={k} outside [1, {min(n, d)}]")
    if k + oversample > min(n, d):
        raise ParameterError(
            f"k + oversample = {k + oversample} exceeds min(n, d) = {min(n, d)}"
        )
    rng = derive_rng(seed, "randomized-svd")
    omega = rng.standard_normal((d, k + oversample))
    sample = matrix @ omega
    q, _ = np.linalg.qr(sample)
    for _ in range(power_iters):
        q, _ = np.linalg.qr(matrix.T @ q)
        q, _ = np.linalg.qr(matrix @ q)
    small = q.T @ matrix
    u_small, s, vt = np.linalg.svd(small, full_matrices=False)
    u = q @ u_small
    return u[:, :k], s[:k], vt[:k].T


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray                      # (d,)
    components: np.ndarray                # (m, d) orthonormal rows
    explained_variance: np.ndarray        # (m,) non-increasing
    explained_variance_ratio: np.ndarray  # (m,)
    retained: int

    def save(self, path):
        lpio.save_tensors(path, {
            "mean": self.mean,
            "components": self.components,
            "explained_variance": self.explained_variance,
            "explained_variance_ratio": self.explained_variance_ratio,
            "retained": np.array([self.retained], dtype=np.float32),
        })

    @classmethod
    def load(cls, path):
        e = lpio.load_tensors(path)
        return cls(
            mean=e["mean"].astype(np.float64),
            components=e["components"].astype(np.float64),
            explained_variance=e["explained_variance"].astype(np.float64),
            explained_variance_ratio=e["explained_variance_ratio"].astype(np.float64),
            retained=int(e["retained"][0]),
        )


def pca_fit(train, cap=2000, variance_target=0.9, seed=0,
            oversample=10, power_iters=4, denominator="total"):
    """Fit PCA on a FeatureMatrix's rows (see module docstring)."""
    n, d = train.n, train.d
    if n < 2:
        raise InsufficientDataError("PCA needs at least 2 training rows")
    x = train.data.astype(np.float64)
    mean = x.mean(axis=0)
    centered = x - mean

    k = min(cap, n - 1, d)
    # total variance in one pass; matches explained_variance's 1/(n-1) scaling
    total_variance = float(np.sum(centered * centered)) / (n - 1)

    oversample = min(oversample, min(n, d) - k)
    if k == min(n, d):
        # randomized projection degenerates to the full problem
        u, s, vt = np.linalg.svd(centered, full_matrices=False)
        v = vt[:k].T
        s = s[:k]
    else:
        _, s, v = randomized_svd(centered, k, oversample, power_iters, seed)

    explained = (s ** 2) / (n - 1)
    if denominator == "total":
        denom = total_variance
    elif denominator == "captured":
        denom = float(explained.sum())
    else:
        raise ParameterError(f"unknown denominator mode '{denominator}'")
    if denom <= 0:
        ratios = np.zeros(k)
    else:
        ratios = explained / denom

    cumulative = np.cumsum(ratios)
    # 1e-12 slack absorbs rounding when ratios sum to the target exactly
    above = np.nonzero(cumulative >= variance_target - 1e-12)[0]
    retained = int(above[0]) + 1 if len(above) else k
    retained = max(1, min(retained, k))

    return PcaModel(
        mean=mean,
        components=v.T,
        explained_variance=explained,
        explained_variance_ratio=ratios,
        retained=retained,
    )


def pca_transform(model, m):
    """Project rows onto the retained components; metadata preserved."""
    if m.d != len(model.mean):
        raise ParameterError(f"matrix has {m.d} features, model expects {len(model.mean)}")
    basis = model.components[:model.retained]
    projected = (m.data.astype(np.float64) - model.mean) @ basis.T
    return replace(m, data=projected.astype(np.float32))
