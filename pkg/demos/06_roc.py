"""Verification ROC: genuine vs impostor decision scores.

Each test sample contributes one genuine score (against its true class) and
n_classes - 1 impostor scores; the ROC sweeps every distinct score value and
we read off TPR at a 0.1% false match rate.
"""

import numpy as np

from irislayers.evaluate import roc_from_genuine_impostor, tpr_at_fmr

rng = np.random.default_rng(0)

# partly overlapping score distributions
genuine = rng.normal(loc=2.0, scale=1.0, size=500)
impostor = rng.normal(loc=0.0, scale=1.0, size=5000)

curve = roc_from_genuine_impostor(genuine, impostor)
print(f"sweep points: {len(curve.fmr)} "
      f"({curve.genuine_count} genuine / {curve.impostor_count} impostor)")

for target in (0.001, 0.01, 0.1):
    print(f"TPR @ FMR {target:>5}: {tpr_at_fmr(curve, target):.4f}")

# perfectly separated scores give TPR 1.0 at FMR 0
perfect = roc_from_genuine_impostor(genuine + 100, impostor)
print(f"separated case, TPR @ FMR 0: {tpr_at_fmr(perfect, 0.0):.1f}")
