"""PCA with a 90% explained-variance cutoff, via randomized SVD.

High-dimensional tap features are reduced to at most 2000 components; the
retained dimensionality is the shortest prefix of components reaching 90%
of the data variance.
"""

import numpy as np

from irislayers.features import FeatureMatrix
from irislayers.pca import pca_fit, pca_transform

rng = np.random.default_rng(0)

# data living (almost) in a 5-dim subspace of 400-dim space
basis = rng.normal(size=(5, 400))
coeffs = rng.normal(size=(120, 5)) * [3.0, 2.5, 2.0, 1.5, 1.0]
data = (coeffs @ basis + 0.01 * rng.normal(size=(120, 400))).astype(np.float32)
fm = FeatureMatrix(data=data, labels=np.zeros(120, dtype=np.int64))

model = pca_fit(fm, cap=2000, variance_target=0.9, seed=0)
print(f"computed components: {model.components.shape[0]}")
print(f"retained at 90% variance: {model.retained}")
ratios = model.explained_variance_ratio
print("cumulative ratio by component:",
      np.round(np.cumsum(ratios[:7]), 3))

reduced = pca_transform(model, fm)
print(f"transformed features: {fm.d} -> {reduced.d} columns")

# projection preserves pairwise geometry inside the retained subspace
d_in = np.linalg.norm(data[0].astype(np.float64) - data[1], ord=2)
d_out = np.linalg.norm(reduced.data[0].astype(np.float64) - reduced.data[1])
print(f"pair distance before/after: {d_in:.3f} / {d_out:.3f}")
