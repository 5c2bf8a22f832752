"""Feature taps: every conv layer of the network is a numbered tap.

Builds the full 50-layer residual network, lists its 53 tap points, and runs
one forward pass on a normalized-texture-shaped input to show the range of
flattened activation sizes available as features.
"""

import numpy as np

from irislayers.model import build_spec, forward_with_taps, init_random

spec = init_random(build_spec("resnet50"), seed=0)
print(f"preset resnet50: {spec.num_taps} conv taps")

table = spec.tap_table()
for tap, name in table[:5]:
    print(f"  tap {tap:2d} -> {name}")
print("  ...")
for tap, name in table[-2:]:
    print(f"  tap {tap:2d} -> {name}")

# iris textures are 64x512; replicate to 3 channels and run the whole net
x = np.random.default_rng(0).random((3, 64, 512)).astype(np.float32)
taps, gap = forward_with_taps(spec, x, return_gap=True)

sizes = {tap: t.size for tap, t in taps.items()}
print(f"\nflattened feature lengths on 3x64x512:")
print(f"  smallest: {min(sizes.values()):,}")
print(f"  largest:  {max(sizes.values()):,}")
print(f"  GAP vector after the last stage: {gap.shape[0]}")

# the network is fully convolutional: any input >= 32x32 works
small = forward_with_taps(spec, np.zeros((3, 33, 33), dtype=np.float32), taps=[1])
print(f"\n33x33 input also runs; tap 1 shape {small[1].shape}")
