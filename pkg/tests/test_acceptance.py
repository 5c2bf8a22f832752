"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Run with ``pytest -s tests/test_acceptance.py -v`` to see the per-criterion
PASS/FAIL lines on the console.  Every tolerance is pinned in the assertion
it belongs to; the end-to-end sweep additionally pins the observed best-tap
accuracy as a regression constant.
"""

import functools

import numpy as np

from irislayers.evaluate import (PipelineConfig, layer_sweep,
                                 roc_from_genuine_impostor, stratified_split,
                                 subsplit_stats, tpr_at_fmr)
from irislayers.features import FeatureMatrix
from irislayers.model import ConvSpec, build_spec, conv2d, forward_with_taps, init_random
from irislayers.pca import pca_fit
from irislayers.report import emit
from irislayers.svm import predict, primal_objective, train_binary, train_ovr
from irislayers.synthgen import SynthConfig, generate
from irislayers.dataset import load_normalized
from oracles import (brute_force_tpr_at_fmr, jacobi_svd, naive_conv2d,
                     svm_dual_oracle)

# Best-tap accuracy observed on the first verified run of the end-to-end
# sweep (mini preset, 20 classes x 10 samples, seed 42); regression constant.
PINNED_BEST_TAP_ACCURACY = 1.0


def criterion(label):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"FAIL: {label}")
                raise
            print(f"PASS: {label}")
        return wrapper
    return deco


@criterion("tap census: 53 conv taps, GAP length 2048")
def test_tap_census():
    spec = build_spec("resnet50")
    assert spec.num_taps == 53
    assert len(spec.tap_table()) == 53
    _, gap = forward_with_taps(spec, np.zeros((3, 32, 32), dtype=np.float32),
                               taps=[1], return_gap=True)
    assert gap.shape == (2048,)


@criterion("feature-size range on 3x64x512: min 16384, max 524288")
def test_feature_size_range():
    spec = build_spec("resnet50")
    taps = forward_with_taps(spec, np.zeros((3, 64, 512), dtype=np.float32))
    sizes = [t.size for t in taps.values()]
    assert len(sizes) == 53
    assert min(sizes) == 16384
    assert max(sizes) == 524288


@criterion("fully-convolutional contract: 33x33, 64x512, 224x224 inputs")
def test_fully_convolutional():
    spec = build_spec("resnet50")
    for h, w in ((33, 33), (64, 512), (224, 224)):
        out, gap = forward_with_taps(spec, np.zeros((3, h, w), dtype=np.float32),
                                     taps=[1, 53], return_gap=True)
        assert out[1].shape[1:] == ((h + 1) // 2, (w + 1) // 2)
        assert gap.shape == (2048,)


@criterion("convolution oracle: 100 random shapes within 1e-5")
def test_conv_oracle():
    rng = np.random.default_rng(1001)
    checked = 0
    while checked < 100:
        c_in = int(rng.integers(1, 5))
        c_out = int(rng.integers(1, 5))
        kh, kw = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        sh, sw = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        ph, pw = int(rng.integers(0, 3)), int(rng.integers(0, 3))
        h, w = int(rng.integers(1, 10)), int(rng.integers(1, 10))
        if h + 2 * ph < kh or w + 2 * pw < kw:
            continue
        spec = ConvSpec(c_in, c_out, (kh, kw), (sh, sw), (ph, pw))
        spec.weights = rng.normal(size=spec.weights.shape).astype(np.float32)
        if rng.integers(2):
            spec.bias = rng.normal(size=c_out).astype(np.float32)
        x = rng.normal(size=(c_in, h, w)).astype(np.float32)
        got = conv2d(x, spec)
        want = naive_conv2d(x, spec.weights, spec.bias, (sh, sw), (ph, pw))
        assert got.shape == want.shape
        assert np.max(np.abs(got - want)) < 1e-5
        checked += 1


def _fm(data):
    data = np.asarray(data, dtype=np.float32)
    return FeatureMatrix(data=data, labels=np.zeros(data.shape[0], dtype=np.int64))


@criterion("PCA oracle: 25 matrices within 1e-6 rel, angles < 1e-4; cutoff examples")
def test_pca_oracle():
    rng = np.random.default_rng(1002)
    for trial in range(25):
        n = int(rng.integers(10, 45))
        d = int(rng.integers(10, 51))
        data = rng.normal(size=(n, d)) * rng.uniform(0.5, 5.0, size=d)
        fm = _fm(data)
        model = pca_fit(fm, cap=2000, seed=trial)
        centered = fm.data.astype(np.float64)
        centered -= centered.mean(axis=0)
        _, s_ref, v_ref = jacobi_svd(centered)
        k = model.components.shape[0]
        s_got = np.sqrt(model.explained_variance * (n - 1))
        np.testing.assert_allclose(s_got, s_ref[:k], rtol=1e-6)
        cut = model.retained
        gap = s_ref[cut - 1] - s_ref[cut] if cut < len(s_ref) else np.inf
        if gap > 1e-3:
            cross = np.linalg.svd(model.components[:cut] @ v_ref[:, :cut],
                                  compute_uv=False)
            angles = np.arccos(np.clip(cross, -1.0, 1.0))
            assert angles.max() < 1e-4

    # 90%-cutoff example 1: exact 3-dimensional subspace -> retained 3
    basis = rng.normal(size=(3, 50))
    coeffs = rng.normal(size=(40, 3)) * [1.2, 1.0, 0.8]
    model = pca_fit(_fm(coeffs @ basis + rng.normal(size=50)),
                    variance_target=0.9, seed=0)
    assert model.retained == 3

    # 90%-cutoff example 2: isotropic 10-column data -> retained 9
    g = rng.normal(size=(60, 11))
    g -= g.mean(axis=0)
    q, _ = np.linalg.qr(g)
    model = pca_fit(_fm(q[:, :10]), variance_target=0.9, seed=1)
    assert model.retained == 9


@criterion("SVM oracle: hard margin, QP objective 1e-3, blobs 100%, XOR <= 75%")
def test_svm_oracle():
    # analytic two-point hard margin: w = 1, b = 0
    X = np.array([[-1.0], [1.0]])
    y = np.array([-1.0, 1.0])
    m = train_binary(X, y, C=1000.0, tol=1e-6, max_iter=5000, seed=0)
    assert abs(m.w[0] - 1.0) < 1e-2
    assert abs(m.b) < 1e-2

    # tiny problems against the independent QP solve of the dual
    rng = np.random.default_rng(1003)
    for trial in range(8):
        n = int(rng.integers(4, 21))
        d = int(rng.integers(1, 4))
        X = rng.normal(size=(n, d))
        y = np.where(rng.random(n) < 0.5, -1.0, 1.0)
        if len(np.unique(y)) < 2:
            y[0] = -y[0]
        C = float(rng.choice([0.1, 1.0, 10.0]))
        m = train_binary(X, y, C=C, tol=1e-8, max_iter=20000, seed=trial)
        assert primal_objective(X, y, m.w, m.b, C) <= svm_dual_oracle(X, y, C) + 1e-3

    # separable blobs -> 100% train accuracy
    X, labels = [], []
    for cls, center in enumerate([(0.0, 0.0), (4.0, 0.0), (0.0, 4.0)]):
        X.append(rng.normal(scale=0.15, size=(10, 2)) + center)
        labels.extend([cls] * 10)
    X, labels = np.vstack(X), np.array(labels)
    model = train_ovr(X, labels, C=10.0, seed=0)
    assert np.mean(predict(model, X) == labels) == 1.0

    # XOR is not linearly separable
    X = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
    y = np.array([0, 0, 1, 1])
    model = train_ovr(X, y, C=100.0, max_iter=2000, seed=1)
    assert np.mean(predict(model, X) == y) <= 0.75


@criterion("ROC oracle: exact 200/2000 sweep, perfect separation, identical multiset")
def test_roc_oracle():
    rng = np.random.default_rng(1004)
    genuine = rng.normal(loc=1.0, size=200)
    impostor = rng.normal(loc=0.0, size=2000)
    curve = roc_from_genuine_impostor(genuine, impostor)
    for target in (0.0, 0.001, 0.01, 0.1):
        assert tpr_at_fmr(curve, target) == \
            brute_force_tpr_at_fmr(genuine, impostor, target)

    perfect = roc_from_genuine_impostor(genuine + 100.0, impostor)
    assert tpr_at_fmr(perfect, 0.0) == 1.0

    same = rng.normal(size=300)
    flat = roc_from_genuine_impostor(same, same.copy())
    np.testing.assert_array_equal(flat.tpr, flat.fmr)


@criterion("split contracts: 7/3 at 0.7, exactly 10 sub-split accuracies, deterministic")
def test_split_contracts():
    labels = np.repeat(np.arange(6), 10)
    plan = stratified_split(labels, fraction=0.7, seed=0)
    for c in range(6):
        assert np.sum(labels[plan.train_indices] == c) == 7
        assert np.sum(labels[plan.test_indices] == c) == 3
    plan2 = stratified_split(labels, fraction=0.7, seed=0)
    np.testing.assert_array_equal(plan.train_indices, plan2.train_indices)

    rng = np.random.default_rng(1005)
    X, y = [], []
    for cls, center in enumerate([(0.0, 0.0), (3.0, 0.0), (0.0, 3.0)]):
        X.append(rng.normal(scale=0.6, size=(20, 2)) + center)
        y.extend([cls] * 20)
    X, y = np.vstack(X), np.array(y)
    model = train_ovr(X, y, C=1.0, seed=2)
    stats = subsplit_stats(model, X, y, n_splits=10, keep=0.8, seed=3)
    assert len(stats.accuracies) == 10
    stats2 = subsplit_stats(model, X, y, n_splits=10, keep=0.8, seed=3)
    assert stats.accuracies == stats2.accuracies


def _end_to_end_run(root):
    manifest = generate(SynthConfig(seed=42), root / "images")
    textures, labels = load_normalized(manifest)
    spec = init_random(build_spec("mini"), 42)
    plan = stratified_split(labels, fraction=0.7, seed=42)
    report = layer_sweep(spec, textures, labels, plan,
                         config=PipelineConfig(seed=42, threads=1))
    emit(report, root / "out")
    return report


@criterion("end-to-end sweep: seed 42 byte-identical twice, accuracy >= 3x chance")
def test_end_to_end_sweep(tmp_path):
    r1 = _end_to_end_run(tmp_path / "run1")
    r2 = _end_to_end_run(tmp_path / "run2")
    images1 = sorted((tmp_path / "run1" / "images").iterdir())
    for f in images1:
        assert f.read_bytes() == (tmp_path / "run2" / "images" / f.name).read_bytes()
    assert (tmp_path / "run1" / "out" / "report.json").read_bytes() == \
        (tmp_path / "run2" / "out" / "report.json").read_bytes()

    best = max(t.accuracy for t in r1.per_tap)
    chance = 1.0 / 20.0
    assert best >= 3.0 * chance
    assert best == PINNED_BEST_TAP_ACCURACY
    assert r2.best_tap == r1.best_tap
