"""End to end: synthesize a dataset, sweep taps, report the best layer.

Small configuration for a quick run: 5 classes, the mini preset, three taps.
Each tap's features go through min-max scaling, PCA, and a one-vs-rest SVM;
the best tap additionally gets an ROC and 10 stratified sub-split stats.
"""

import tempfile
from pathlib import Path

from irislayers.dataset import load_normalized
from irislayers.evaluate import PipelineConfig, layer_sweep, stratified_split
from irislayers.model import build_spec, init_random
from irislayers.report import emit
from irislayers.synthgen import SynthConfig, generate

root = Path(tempfile.mkdtemp())
manifest = generate(SynthConfig(n_classes=5, samples_per_class=8,
                                image_size=128, seed=11), root / "images")
textures, labels = load_normalized(manifest)
print(f"dataset: {len(labels)} normalized textures, {labels.max() + 1} classes")

spec = init_random(build_spec("mini"), seed=11)
plan = stratified_split(labels, fraction=0.7, seed=11)
report = layer_sweep(spec, textures, labels, plan, taps=[1, 4, 8],
                     config=PipelineConfig(seed=11, svm_max_iter=200))

print(f"\n{'tap':>4} {'layer':<22} {'feat len':>9} {'pca':>4} {'acc':>6}")
for t in report.per_tap:
    print(f"{t.tap:>4} {t.layer_name:<22} {t.feature_len:>9,} "
          f"{t.pca_dims:>4} {t.accuracy:>6.3f}")

print(f"\nbest tap: {report.best_tap}")
print(f"TPR @ FMR {report.fmr_target}: {report.tpr_at_fmr_target:.3f}")
print(f"sub-split accuracies: {[round(a, 2) for a in report.subsplit.accuracies]}")

files = emit(report, root / "out")
print(f"report files: {[f.name for f in files]}")
