"""One-vs-rest linear SVM trained by dual coordinate descent.

Each binary problem minimizes (1/2)||w||^2 + C * sum_i max(0, 1 - y_i w.x_i)
over the bias-augmented representation (a constant-1 feature appended to
every row, so w's last entry is the bias).  The dual box-constrained QP is
solved coordinate-wise with seeded per-epoch shuffling; training terminates
when the largest projected-gradient violation in an epoch drops below
``tol`` or after ``max_iter`` epochs.
"""

from dataclasses import dataclass

import numpy as np

from . import lpio
from .seeding import derive_rng


class ParameterError(ValueError):
    pass


class ShapeError(ValueError):
    pass


class DegenerateLabelsError(ValueError):
    pass


@dataclass(frozen=True)
class LinearBinaryModel:
    w: np.ndarray
    b: float


@dataclass(frozen=True)
class OvRModel:
    classes: np.ndarray
    models: tuple
    C: float


def primal_objective(X, y, w, b, C, include_bias=True):
    """Hinge-loss primal value; ``include_bias`` matches the augmented
    formulation the solver actually minimizes (bias regularized too)."""
    margins = 1.0 - y * (X @ w + b)
    reg = float(w @ w) + (b * b if include_bias else 0.0)
    return 0.5 * reg + C * float(np.sum(np.maximum(margins, 0.0)))


def train_binary(X, y, C=1.0, tol=1e-4, max_iter=1000, seed=0,
                 objective_history=None):
    """Dual coordinate descent for the L1-hinge linear SVM.

    ``objective_history``, when a list, receives the dual objective after
    every epoch; coordinate descent makes it non-decreasing (the primal
    value is not monotone along the dual path).
    """
    if C <= 0 or tol <= 0:
        raise ParameterError(f"C and tol must be positive (C={C}, tol={tol})")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or len(y) != X.shape[0]:
        raise ShapeError(f"X {X.shape} incompatible with {len(y)} labels")
    n, d = X.shape

    # bias via feature augmentation: w_aug = (w, b), x_aug = (x, 1)
    Xa = np.hstack([X, np.ones((n, 1))])
    q_diag = np.einsum("ij,ij->i", Xa, Xa)
    alpha = np.zeros(n)
    w = np.zeros(d + 1)
    rng = derive_rng(seed, "svm-binary")
    order = np.arange(n)

    for _ in range(max_iter):
        rng.shuffle(order)
        max_violation = 0.0
        for i in order:
            grad = y[i] * (Xa[i] @ w) - 1.0
            if alpha[i] <= 0.0:
                violation = max(-grad, 0.0)
            elif alpha[i] >= C:
                violation = max(grad, 0.0)
            else:
                violation = abs(grad)
            if violation > max_violation:
                max_violation = violation
            if violation > 1e-14:
                new_alpha = min(max(alpha[i] - grad / q_diag[i], 0.0), C)
                delta = new_alpha - alpha[i]
                if delta != 0.0:
                    alpha[i] = new_alpha
                    w += delta * y[i] * Xa[i]
        if objective_history is not None:
            objective_history.append(float(alpha.sum() - 0.5 * (w @ w)))
        if max_violation < tol:
            break
    return LinearBinaryModel(w=w[:d].copy(), b=float(w[d]))


def train_ovr(X, labels, C=1.0, tol=1e-4, max_iter=1000, seed=0):
    """One binary model per class (that class +1, rest -1); classes sorted."""
    labels = np.asarray(labels)
    classes = np.unique(labels)
    if len(classes) < 2:
        raise DegenerateLabelsError("one-vs-rest needs at least 2 distinct labels")
    models = []
    for c in classes:
        y = np.where(labels == c, 1.0, -1.0)
        models.append(train_binary(X, y, C=C, tol=tol, max_iter=max_iter,
                                   seed=derive_rng(seed, "svm-ovr", c).integers(2**63)))
    return OvRModel(classes=classes, models=tuple(models), C=C)


def decision_scores(model, X):
    """n x n_classes raw decision values w_c . x + b_c."""
    X = np.asarray(X, dtype=np.float64)
    d = len(model.models[0].w)
    if X.ndim != 2 or X.shape[1] != d:
        raise ShapeError(f"X {X.shape} incompatible with weight dimension {d}")
    W = np.stack([m.w for m in model.models])
    b = np.array([m.b for m in model.models])
    return X @ W.T + b


def predict(model, X):
    """Class with the maximal score; ties broken by the lowest class id."""
    scores = decision_scores(model, X)
    return model.classes[np.argmax(scores, axis=1)]


def save_ovr(model, path):
    entries = {"classes": model.classes.astype(np.float32),
               "C": np.array([model.C], dtype=np.float32)}
    for c, m in zip(model.classes, model.models):
        entries[f"class{int(c)}.w"] = m.w
        entries[f"class{int(c)}.b"] = np.array([m.b], dtype=np.float32)
    lpio.save_tensors(path, entries)


def load_ovr(path):
    e = lpio.load_tensors(path)
    classes = e["classes"].astype(np.int64)
    models = tuple(
        LinearBinaryModel(w=e[f"class{int(c)}.w"].astype(np.float64),
                          b=float(e[f"class{int(c)}.b"][0]))
        for c in classes
    )
    return OvRModel(classes=classes, models=models, C=float(e["C"][0]))
