"""Splitting, accuracy, ROC / TPR@FMR, sub-split statistics, layer sweep.

The layer sweep runs, for each tapped conv layer: feature extraction ->
flatten -> min-max scaling (fit on the training split) -> PCA (fit on the
training split) -> one-vs-rest SVM -> test accuracy.  The best layer (by
accuracy, lowest tap on ties) additionally gets an ROC curve with TPR@FMR
and stratified sub-split statistics.

ROC protocol: for each test row, the decision score against its true class
is a genuine score and the scores against every other class are impostor
scores; the curve is an exact threshold sweep over the distinct score
values (scores >= threshold count as matches), so it depends only on score
order.  TPR@FMR uses the step-function convention: the TPR at the sweep
point with the largest FMR not exceeding the target, without interpolation.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import svm as svm_mod
from .features import FeatureMatrix, flatten, minmax_fit, minmax_transform
from .model import forward_with_taps
from .normalize import replicate_channels
from .pca import pca_fit, pca_transform
from .seeding import derive_rng


class ParameterError(ValueError):
    pass


class StratificationError(ValueError):
    pass


class DegenerateScoresError(ValueError):
    pass


@dataclass(frozen=True)
class SplitPlan:
    train_indices: np.ndarray
    test_indices: np.ndarray
    fraction: float
    seed: int


def _round_half_up(x):
    return int(np.floor(x + 0.5))


def stratified_split(labels, fraction=0.7, seed=0):
    """Per-class split: round(s * fraction) train rows, clamped to [1, s-1]."""
    labels = np.asarray(labels)
    if not 0 < fraction < 1:
        raise ParameterError(f"fraction must be in (0, 1), got {fraction}")
    train, test = [], []
    for c in np.unique(labels):
        idx = np.nonzero(labels == c)[0]
        if len(idx) < 2:
            raise StratificationError(f"class {c} has only {len(idx)} sample(s)")
        n_train = min(max(_round_half_up(len(idx) * fraction), 1), len(idx) - 1)
        rng = derive_rng(seed, "split", c)
        perm = rng.permutation(len(idx))
        train.extend(idx[perm[:n_train]])
        test.extend(idx[perm[n_train:]])
    return SplitPlan(
        train_indices=np.array(sorted(train)),
        test_indices=np.array(sorted(test)),
        fraction=fraction,
        seed=seed,
    )


def accuracy(predictions, truth):
    predictions = np.asarray(predictions)
    truth = np.asarray(truth)
    if len(predictions) != len(truth) or len(truth) == 0:
        raise ParameterError(
            f"need equal non-empty lengths, got {len(predictions)} and {len(truth)}"
        )
    return float(np.mean(predictions == truth))


@dataclass(frozen=True)
class RocCurve:
    fmr: np.ndarray   # non-decreasing along the sweep
    tpr: np.ndarray
    genuine_count: int
    impostor_count: int


def roc_from_genuine_impostor(genuine, impostor):
    """Exact threshold sweep over the distinct score values."""
    genuine = np.asarray(genuine, dtype=np.float64)
    impostor = np.asarray(impostor, dtype=np.float64)
    if len(genuine) == 0 or len(impostor) == 0:
        raise DegenerateScoresError("need at least one genuine and one impostor score")
    thresholds = np.unique(np.concatenate([genuine, impostor]))[::-1]
    gs = np.sort(genuine)
    ims = np.sort(impostor)
    # count of scores >= t via binary search on the sorted arrays
    tpr = (len(gs) - np.searchsorted(gs, thresholds, side="left")) / len(gs)
    fmr = (len(ims) - np.searchsorted(ims, thresholds, side="left")) / len(ims)
    return RocCurve(
        fmr=np.concatenate([[0.0], fmr]),
        tpr=np.concatenate([[0.0], tpr]),
        genuine_count=len(genuine),
        impostor_count=len(impostor),
    )


def roc_from_scores(model, X_test, truth):
    """Genuine/impostor construction from OvR decision values."""
    truth = np.asarray(truth)
    scores = svm_mod.decision_scores(model, X_test)
    class_pos = {c: j for j, c in enumerate(model.classes)}
    cols = np.array([class_pos[t] for t in truth])
    rows = np.arange(len(truth))
    genuine = scores[rows, cols]
    mask = np.ones_like(scores, dtype=bool)
    mask[rows, cols] = False
    impostor = scores[mask]
    return roc_from_genuine_impostor(genuine, impostor)


def tpr_at_fmr(curve, fmr_target=0.001):
    """TPR at the sweep point with the largest FMR <= target."""
    ok = np.nonzero(curve.fmr <= fmr_target)[0]
    if len(ok) == 0:
        return 0.0
    return float(curve.tpr[ok[-1]])


@dataclass(frozen=True)
class SubsplitSummary:
    accuracies: tuple
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float


def subsplit_stats(model, test_matrix, truth, n_splits=10, keep=0.8, seed=0):
    """Accuracy of the trained model on stratified sub-splits of the test set.

    Each sub-split keeps ``keep`` of every class (the rest is discarded);
    quartiles by linear interpolation of order statistics.
    """
    truth = np.asarray(truth)
    accs = []
    for split_id in range(n_splits):
        plan = stratified_split(truth, fraction=keep,
                                seed=int(derive_rng(seed, "subsplit", split_id).integers(2**63)))
        kept = plan.train_indices
        preds = svm_mod.predict(model, np.asarray(test_matrix)[kept])
        accs.append(accuracy(preds, truth[kept]))
    arr = np.array(accs)
    return SubsplitSummary(
        accuracies=tuple(accs),
        minimum=float(arr.min()),
        q1=float(np.percentile(arr, 25)),
        median=float(np.percentile(arr, 50)),
        q3=float(np.percentile(arr, 75)),
        maximum=float(arr.max()),
    )


@dataclass(frozen=True)
class PipelineConfig:
    """Stage parameters for the per-layer pipeline."""

    pca_cap: int = 2000
    variance_target: float = 0.9
    oversample: int = 10
    power_iters: int = 4
    pca_denominator: str = "total"
    svm_c: float = 1.0
    svm_tol: float = 1e-4
    svm_max_iter: int = 1000
    post_activation: bool = False
    n_subsplits: int = 10
    subsplit_keep: float = 0.8
    fmr_target: float = 0.001
    seed: int = 0
    threads: int = 1


@dataclass(frozen=True)
class TapResult:
    tap: int
    layer_name: str
    feature_len: int
    pca_dims: int
    accuracy: float


@dataclass(frozen=True)
class EvalReport:
    per_tap: tuple            # TapResult, ordered by tap index
    best_tap: int
    roc: RocCurve
    tpr_at_fmr_target: float
    fmr_target: float
    subsplit: SubsplitSummary
    seed: int

    def to_dict(self):
        roc = None
        if self.roc is not None:
            roc = {
                "points": [[float(f), float(t)] for f, t in zip(self.roc.fmr, self.roc.tpr)],
                "genuine_count": self.roc.genuine_count,
                "impostor_count": self.roc.impostor_count,
            }
        subsplit = None
        if self.subsplit is not None:
            subsplit = {
                "accuracies": list(self.subsplit.accuracies),
                "summary": {
                    "min": self.subsplit.minimum,
                    "q1": self.subsplit.q1,
                    "median": self.subsplit.median,
                    "q3": self.subsplit.q3,
                    "max": self.subsplit.maximum,
                },
            }
        return {
            "per_tap": [vars(t) for t in self.per_tap],
            "best_tap": self.best_tap,
            "roc": roc,
            "tpr_at_fmr": {"target": self.fmr_target, "value": self.tpr_at_fmr_target},
            "subsplit": subsplit,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, doc):
        roc = None
        if doc["roc"] is not None:
            points = np.array(doc["roc"]["points"], dtype=np.float64)
            points = points.reshape(-1, 2)
            roc = RocCurve(
                fmr=points[:, 0], tpr=points[:, 1],
                genuine_count=doc["roc"]["genuine_count"],
                impostor_count=doc["roc"]["impostor_count"],
            )
        subsplit = None
        if doc["subsplit"] is not None:
            subsplit = SubsplitSummary(
                accuracies=tuple(doc["subsplit"]["accuracies"]),
                minimum=doc["subsplit"]["summary"]["min"],
                q1=doc["subsplit"]["summary"]["q1"],
                median=doc["subsplit"]["summary"]["median"],
                q3=doc["subsplit"]["summary"]["q3"],
                maximum=doc["subsplit"]["summary"]["max"],
            )
        return cls(
            per_tap=tuple(TapResult(**t) for t in doc["per_tap"]),
            best_tap=doc["best_tap"],
            roc=roc,
            tpr_at_fmr_target=doc["tpr_at_fmr"]["value"],
            fmr_target=doc["tpr_at_fmr"]["target"],
            subsplit=subsplit,
            seed=doc["seed"],
        )


def extract_tap_features(model_spec, textures, labels, taps=None,
                         post_activation=False, threads=1):
    """Forward every normalized texture; returns {tap: FeatureMatrix}."""
    names = dict(model_spec.tap_table())

    def run_one(texture):
        return forward_with_taps(model_spec, replicate_channels(texture),
                                 taps=taps, post_activation=post_activation)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            all_taps = list(pool.map(run_one, textures))
    else:
        all_taps = [run_one(t) for t in textures]

    matrices = {}
    for tap in sorted(all_taps[0]):
        data = np.stack([flatten(sample[tap]) for sample in all_taps])
        matrices[tap] = FeatureMatrix(data=data, labels=np.asarray(labels),
                                      tap=tap, layer_name=names[tap])
    return matrices


def evaluate_tap(fm, plan, config):
    """Scale -> PCA -> OvR SVM for one tap; returns (TapResult, model, test data)."""
    train = FeatureMatrix(fm.data[plan.train_indices], fm.labels[plan.train_indices],
                          fm.tap, fm.layer_name)
    test = FeatureMatrix(fm.data[plan.test_indices], fm.labels[plan.test_indices],
                         fm.tap, fm.layer_name)

    scaler = minmax_fit(train)
    train_s = minmax_transform(scaler, train)
    test_s = minmax_transform(scaler, test)

    pca_model = pca_fit(train_s, cap=config.pca_cap,
                        variance_target=config.variance_target,
                        seed=int(derive_rng(config.seed, "pca", fm.tap).integers(2**63)),
                        oversample=config.oversample,
                        power_iters=config.power_iters,
                        denominator=config.pca_denominator)
    train_p = pca_transform(pca_model, train_s)
    test_p = pca_transform(pca_model, test_s)

    ovr = svm_mod.train_ovr(train_p.data, train_p.labels, C=config.svm_c,
                            tol=config.svm_tol, max_iter=config.svm_max_iter,
                            seed=int(derive_rng(config.seed, "svm", fm.tap).integers(2**63)))
    preds = svm_mod.predict(ovr, test_p.data)
    acc = accuracy(preds, test_p.labels)
    result = TapResult(tap=fm.tap, layer_name=fm.layer_name,
                       feature_len=fm.d, pca_dims=pca_model.retained, accuracy=acc)
    return result, ovr, test_p


def layer_sweep(model_spec, textures, labels, plan, taps=None,
                config=PipelineConfig()):
    """Per-tap evaluation plus best-tap ROC and sub-split statistics."""
    matrices = extract_tap_features(model_spec, textures, labels, taps=taps,
                                    post_activation=config.post_activation,
                                    threads=config.threads)

    if not matrices:
        return EvalReport(per_tap=(), best_tap=None, roc=None,
                          tpr_at_fmr_target=0.0, fmr_target=config.fmr_target,
                          subsplit=None, seed=config.seed)

    def run_tap(tap):
        try:
            return evaluate_tap(matrices[tap], plan, config)
        except Exception as exc:
            raise RuntimeError(f"tap {tap} pipeline failed: {exc}") from exc

    order = sorted(matrices)
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            outcomes = list(pool.map(run_tap, order))
    else:
        outcomes = [run_tap(t) for t in order]

    results = [r for r, _, _ in outcomes]
    best_pos = max(range(len(results)),
                   key=lambda i: (results[i].accuracy, -results[i].tap))
    best_result, best_ovr, best_test = outcomes[best_pos]

    curve = roc_from_scores(best_ovr, best_test.data, best_test.labels)
    tpr = tpr_at_fmr(curve, config.fmr_target)
    stats = subsplit_stats(best_ovr, best_test.data, best_test.labels,
                           n_splits=config.n_subsplits, keep=config.subsplit_keep,
                           seed=int(derive_rng(config.seed, "subsplit-root").integers(2**63)))
    return EvalReport(
        per_tap=tuple(results),
        best_tap=best_result.tap,
        roc=curve,
        tpr_at_fmr_target=tpr,
        fmr_target=config.fmr_target,
        subsplit=stats,
        seed=config.seed,
    )
