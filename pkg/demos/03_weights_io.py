"""Weight interchange: models round-trip through the LPWT container.

LPWT is a little-endian binary format of named float32 tensors with a CRC32
trailer.  Model weights, PCA models, and SVM models all use it.
"""

import tempfile
from pathlib import Path

import numpy as np

from irislayers import lpio
from irislayers.model import (build_spec, forward_with_taps, init_random,
                              load_weights, save_weights)

out = Path(tempfile.mkdtemp())

spec = init_random(build_spec("mini"), seed=3)
path = out / "mini.lpwt"
save_weights(spec, path)
print(f"saved {path.stat().st_size:,} bytes")

# raw container view: named tensors
entries = lpio.load_tensors(path)
print(f"{len(entries)} entries, e.g.:")
for name in list(entries)[:4]:
    print(f"  {name}: {entries[name].shape}")

# load validates completeness and shapes against the preset
back = load_weights(path, "mini")
x = np.random.default_rng(1).random((3, 64, 512)).astype(np.float32)
a = forward_with_taps(spec, x, taps=[1])[1]
b = forward_with_taps(back, x, taps=[1])[1]
print(f"round-trip max activation diff: {np.max(np.abs(a - b)):.2e}")
