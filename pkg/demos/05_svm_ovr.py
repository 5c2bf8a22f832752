"""One-vs-rest linear SVM trained by dual coordinate descent.

One binary hinge-loss classifier per class; prediction takes the class with
the maximal decision value.
"""

import numpy as np

from irislayers.svm import decision_scores, predict, train_binary, train_ovr

rng = np.random.default_rng(0)

# three Gaussian blobs
centers = [(0.0, 0.0), (4.0, 0.0), (0.0, 4.0)]
X = np.vstack([rng.normal(scale=0.4, size=(30, 2)) + c for c in centers])
y = np.repeat(np.arange(3), 30)

model = train_ovr(X, y, C=10.0, seed=0)
acc = np.mean(predict(model, X) == y)
print(f"3-blob train accuracy: {acc:.3f}")
print(f"classes: {model.classes}")
print(f"decision scores of sample 0: {np.round(decision_scores(model, X[:1])[0], 2)}")

# the binary solver converges to the known hard-margin solution
Xb = np.array([[-1.0], [1.0]])
m = train_binary(Xb, np.array([-1.0, 1.0]), C=1000.0, tol=1e-8, max_iter=5000)
print(f"two-point hard margin: w = {m.w[0]:.4f} (expect 1), b = {m.b:.4f} (expect 0)")

# per-epoch dual objective is non-decreasing
history = []
train_binary(X, np.where(y == 0, 1.0, -1.0), C=1.0, max_iter=50,
             objective_history=history)
print(f"dual objective, epochs 1..5: {np.round(history[:5], 3)}")
