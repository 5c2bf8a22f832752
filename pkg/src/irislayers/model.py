"""Fully-convolutional residual network inference with per-layer taps.

Tensors are float32 numpy arrays laid out (channels, height, width).
Convolution is cross-correlation with zero padding.  Two presets are
provided:

``resnet50``
    stem (7x7 stride-2 conv, BN, relu, 3x3 stride-2 maxpool) followed by
    four stages of bottleneck blocks with counts (3, 4, 6, 3); 53 conv
    layers in total (1 stem + 48 block convs + 4 projections).

``mini``
    stem plus a single stage of 2 bottleneck blocks (8 conv layers); small
    enough for fast tests while exercising every code path.

Tap numbering follows forward execution order starting at 1 (the stem conv);
within a stage's first block the projection conv is numbered after that
block's third conv.  Taps capture the raw conv output before batchnorm by
default; ``post_activation=True`` instead captures the output after the
batchnorm (and relu, where one immediately follows) attached to that conv.

Downsampling blocks place their stride on the first 1x1 conv by default
(classic bottleneck layout); ``stride_on_3x3=True`` selects the common
alternative used by several frameworks.  Weight shapes are identical in
both layouts.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import lpio
from .seeding import derive_rng


class ShapeError(ValueError):
    pass


class InputSizeError(ValueError):
    pass


class TapError(ValueError):
    pass


class CompletenessError(ValueError):
    """Weight file does not cover the preset's parameter set exactly."""


@dataclass
class ConvSpec:
    in_channels: int
    out_channels: int
    kernel: tuple
    stride: tuple = (1, 1)
    padding: tuple = (0, 0)
    weights: np.ndarray = None
    bias: np.ndarray = None

    def __post_init__(self):
        if self.weights is None:
            self.weights = np.zeros(
                (self.out_channels, self.in_channels) + tuple(self.kernel),
                dtype=np.float32,
            )
        expected = (self.out_channels, self.in_channels) + tuple(self.kernel)
        if self.weights.shape != expected:
            raise ShapeError(f"conv weights {self.weights.shape} != {expected}")


@dataclass
class BatchNormParams:
    gamma: np.ndarray
    beta: np.ndarray
    mean: np.ndarray
    variance: np.ndarray
    epsilon: float = 1e-5

    @classmethod
    def identity(cls, channels):
        return cls(
            gamma=np.ones(channels, dtype=np.float32),
            beta=np.zeros(channels, dtype=np.float32),
            mean=np.zeros(channels, dtype=np.float32),
            variance=np.ones(channels, dtype=np.float32),
        )


def conv2d(x, spec):
    """Direct 2-D cross-correlation with zero padding."""
    x = np.asarray(x, dtype=np.float32)
    if x.ndim != 3 or x.shape[0] != spec.in_channels:
        raise ShapeError(
            f"input shape {x.shape} incompatible with {spec.in_channels} in-channels"
        )
    c, h, w = x.shape
    kh, kw = spec.kernel
    sh, sw = spec.stride
    ph, pw = spec.padding
    if h + 2 * ph < kh or w + 2 * pw < kw:
        raise ShapeError(f"padded input {h + 2 * ph}x{w + 2 * pw} smaller than kernel {kh}x{kw}")
    oh = (h + 2 * ph - kh) // sh + 1
    ow = (w + 2 * pw - kw) // sw + 1

    if ph or pw:
        padded = np.zeros((c, h + 2 * ph, w + 2 * pw), dtype=np.float32)
        padded[:, ph:ph + h, pw:pw + w] = x
    else:
        padded = x

    out = np.zeros((spec.out_channels, oh, ow), dtype=np.float32)
    for i in range(kh):
        for j in range(kw):
            patch = padded[:, i:i + (oh - 1) * sh + 1:sh, j:j + (ow - 1) * sw + 1:sw]
            out += np.tensordot(spec.weights[:, :, i, j], patch, axes=([1], [0]))
    if spec.bias is not None:
        out += spec.bias[:, None, None]
    return out


def batchnorm(x, p):
    if x.shape[0] != len(p.gamma):
        raise ShapeError(f"batchnorm channels {len(p.gamma)} != input {x.shape[0]}")
    scale = p.gamma / np.sqrt(p.variance + p.epsilon)
    shift = p.beta - p.mean * scale
    return (x * scale[:, None, None] + shift[:, None, None]).astype(np.float32)


def relu(x):
    return np.maximum(x, 0.0)


def maxpool(x, kernel, stride, padding=(0, 0)):
    """Window max with -inf padding semantics."""
    c, h, w = x.shape
    kh, kw = kernel
    sh, sw = stride
    ph, pw = padding
    if h + 2 * ph < kh or w + 2 * pw < kw:
        raise ShapeError("pooling window does not fit padded input")
    oh = (h + 2 * ph - kh) // sh + 1
    ow = (w + 2 * pw - kw) // sw + 1
    padded = np.full((c, h + 2 * ph, w + 2 * pw), -np.inf, dtype=np.float32)
    padded[:, ph:ph + h, pw:pw + w] = x
    out = np.full((c, oh, ow), -np.inf, dtype=np.float32)
    for i in range(kh):
        for j in range(kw):
            patch = padded[:, i:i + (oh - 1) * sh + 1:sh, j:j + (ow - 1) * sw + 1:sw]
            np.maximum(out, patch, out=out)
    return out


def global_avg_pool(x):
    """Per-channel spatial mean; returns a vector of length channels."""
    return x.mean(axis=(1, 2)).astype(np.float32)


@dataclass
class BottleneckBlock:
    conv1: ConvSpec
    bn1: BatchNormParams
    conv2: ConvSpec
    bn2: BatchNormParams
    conv3: ConvSpec
    bn3: BatchNormParams
    proj: ConvSpec = None
    proj_bn: BatchNormParams = None


@dataclass
class ModelSpec:
    preset: str
    stem_conv: ConvSpec
    stem_bn: BatchNormParams
    pool_kernel: tuple
    pool_stride: tuple
    pool_padding: tuple
    stages: list = field(default_factory=list)
    stride_on_3x3: bool = False

    def conv_layers(self):
        """Yield (tap_index, name, ConvSpec) in forward execution order."""
        idx = 1
        yield idx, "stem.conv", self.stem_conv
        for s, blocks in enumerate(self.stages, start=1):
            for b, block in enumerate(blocks):
                prefix = f"stage{s}.block{b}"
                for cname in ("conv1", "conv2", "conv3"):
                    idx += 1
                    yield idx, f"{prefix}.{cname}", getattr(block, cname)
                if block.proj is not None:
                    idx += 1
                    yield idx, f"{prefix}.proj", block.proj

    @property
    def num_taps(self):
        return sum(1 for _ in self.conv_layers())

    def tap_table(self):
        """Machine-readable tap index -> layer name mapping."""
        return [(idx, name) for idx, name, _ in self.conv_layers()]

    def batchnorms(self):
        yield "stem.bn", self.stem_bn
        for s, blocks in enumerate(self.stages, start=1):
            for b, block in enumerate(blocks):
                prefix = f"stage{s}.block{b}"
                for bname in ("bn1", "bn2", "bn3"):
                    yield f"{prefix}.{bname}", getattr(block, bname)
                if block.proj_bn is not None:
                    yield f"{prefix}.projbn", block.proj_bn


def _make_block(in_ch, width, out_ch, stride, with_proj, stride_on_3x3):
    s1 = (1, 1) if stride_on_3x3 else (stride, stride)
    s2 = (stride, stride) if stride_on_3x3 else (1, 1)
    block = BottleneckBlock(
        conv1=ConvSpec(in_ch, width, (1, 1), s1),
        bn1=BatchNormParams.identity(width),
        conv2=ConvSpec(width, width, (3, 3), s2, (1, 1)),
        bn2=BatchNormParams.identity(width),
        conv3=ConvSpec(width, out_ch, (1, 1)),
        bn3=BatchNormParams.identity(out_ch),
    )
    if with_proj:
        block.proj = ConvSpec(in_ch, out_ch, (1, 1), (stride, stride))
        block.proj_bn = BatchNormParams.identity(out_ch)
    return block


_PRESET_PLANS = {
    # (stem_out, stage widths, stage block counts, stage strides)
    "resnet50": (64, (64, 128, 256, 512), (3, 4, 6, 3), (1, 2, 2, 2)),
    "mini": (8, (8,), (2,), (1,)),
}

PRESETS = tuple(_PRESET_PLANS)


def build_spec(preset, stride_on_3x3=False):
    """Zero-weight ModelSpec for a named preset."""
    if preset not in _PRESET_PLANS:
        raise ValueError(f"unknown preset '{preset}' (choose from {PRESETS})")
    stem_out, widths, counts, strides = _PRESET_PLANS[preset]
    spec = ModelSpec(
        preset=preset,
        stem_conv=ConvSpec(3, stem_out, (7, 7), (2, 2), (3, 3)),
        stem_bn=BatchNormParams.identity(stem_out),
        pool_kernel=(3, 3),
        pool_stride=(2, 2),
        pool_padding=(1, 1),
        stride_on_3x3=stride_on_3x3,
    )
    in_ch = stem_out
    for width, count, stride in zip(widths, counts, strides):
        out_ch = 4 * width
        blocks = []
        for b in range(count):
            blocks.append(_make_block(
                in_ch, width, out_ch,
                stride if b == 0 else 1,
                with_proj=(b == 0),
                stride_on_3x3=stride_on_3x3,
            ))
            in_ch = out_ch
        spec.stages.append(blocks)
    return spec


def init_random(spec, seed):
    """He-normal conv weights, identity batchnorms; in place, returns spec."""
    rng = derive_rng(seed, "model-init", spec.preset)
    for _, _, conv in spec.conv_layers():
        fan_in = conv.in_channels * conv.kernel[0] * conv.kernel[1]
        std = math.sqrt(2.0 / fan_in)
        conv.weights = rng.normal(0.0, std, size=conv.weights.shape).astype(np.float32)
    return spec


def _run_block(block, x, taps_out, tap_idx, want, post_activation):
    def record(idx, raw, activated):
        if idx in want:
            taps_out[idx] = activated if post_activation else raw

    c1 = conv2d(x, block.conv1)
    a1 = relu(batchnorm(c1, block.bn1))
    record(tap_idx, c1, a1)
    c2 = conv2d(a1, block.conv2)
    a2 = relu(batchnorm(c2, block.bn2))
    record(tap_idx + 1, c2, a2)
    c3 = conv2d(a2, block.conv3)
    b3 = batchnorm(c3, block.bn3)
    record(tap_idx + 2, c3, b3)
    next_idx = tap_idx + 3
    if block.proj is not None:
        cp = conv2d(x, block.proj)
        identity = batchnorm(cp, block.proj_bn)
        record(next_idx, cp, identity)
        next_idx += 1
    else:
        identity = x
    return relu(b3 + identity), next_idx


def forward_with_taps(model, x, taps=None, post_activation=False, return_gap=False):
    """Run the network, capturing conv-layer activations.

    ``taps=None`` captures every conv layer.  Returns a dict tap index ->
    tensor, or (taps dict, gap vector) when ``return_gap`` is set.
    """
    x = np.asarray(x, dtype=np.float32)
    if x.ndim != 3 or x.shape[0] != model.stem_conv.in_channels:
        raise ShapeError(f"expected ({model.stem_conv.in_channels}, h, w) input, got {x.shape}")
    if x.shape[1] < 32 or x.shape[2] < 32:
        raise InputSizeError(f"input {x.shape[1]}x{x.shape[2]} below the 32x32 minimum")

    n_taps = model.num_taps
    if taps is None:
        want = set(range(1, n_taps + 1))
    else:
        want = {int(t) for t in taps}
        bad = [t for t in want if not 1 <= t <= n_taps]
        if bad:
            raise TapError(f"tap indices {sorted(bad)} outside [1, {n_taps}]")

    out = {}
    c0 = conv2d(x, model.stem_conv)
    a0 = relu(batchnorm(c0, model.stem_bn))
    if 1 in want:
        out[1] = a0 if post_activation else c0
    h = maxpool(a0, model.pool_kernel, model.pool_stride, model.pool_padding)
    tap_idx = 2
    for blocks in model.stages:
        for block in blocks:
            h, tap_idx = _run_block(block, h, out, tap_idx, want, post_activation)
    if return_gap:
        return out, global_avg_pool(h)
    return out


# ---------------------------------------------------------------------------
# weight interchange

def _entry_dict(spec):
    entries = {}
    for _, name, conv in spec.conv_layers():
        entries[f"{name}.weight"] = conv.weights
        if conv.bias is not None:
            entries[f"{name}.bias"] = conv.bias
    for name, bn in spec.batchnorms():
        entries[f"{name}.gamma"] = bn.gamma
        entries[f"{name}.beta"] = bn.beta
        entries[f"{name}.mean"] = bn.mean
        entries[f"{name}.variance"] = bn.variance
        entries[f"{name}.eps"] = np.array([bn.epsilon], dtype=np.float32)
    return entries


def save_weights(spec, path):
    lpio.save_tensors(path, _entry_dict(spec))


def load_weights(path, preset, stride_on_3x3=False):
    """Load an LPWT weight file into a preset spec.

    Conv bias entries are optional; every other preset parameter must be
    present, and no unknown entries are tolerated.
    """
    spec = build_spec(preset, stride_on_3x3=stride_on_3x3)
    entries = lpio.load_tensors(path)
    expected = _entry_dict(spec)
    optional = {f"{name}.bias" for _, name, conv in spec.conv_layers()
                if conv.bias is None}
    missing = [k for k in expected if k not in entries]
    extra = [k for k in entries if k not in expected and k not in optional]
    if missing or extra:
        raise CompletenessError(
            f"{path}: missing entries {sorted(missing)}; unexpected entries {sorted(extra)}"
        )

    convs = {name: conv for _, name, conv in spec.conv_layers()}
    bns = dict(spec.batchnorms())
    for key, arr in entries.items():
        owner, param = key.rsplit(".", 1)
        if param in ("weight", "bias"):
            conv = convs[owner]
            if param == "weight":
                if arr.shape != conv.weights.shape:
                    raise ShapeError(f"{key}: shape {arr.shape} != {conv.weights.shape}")
                conv.weights = arr
            else:
                if arr.shape != (conv.out_channels,):
                    raise ShapeError(f"{key}: shape {arr.shape} != ({conv.out_channels},)")
                conv.bias = arr
        else:
            bn = bns[owner]
            if param == "eps":
                bn.epsilon = float(arr.reshape(-1)[0])
            else:
                if arr.shape != bn.gamma.shape:
                    raise ShapeError(f"{key}: shape {arr.shape} != {bn.gamma.shape}")
                setattr(bn, {"gamma": "gamma", "beta": "beta",
                             "mean": "mean", "variance": "variance"}[param], arr)
    return spec


def save_tap_table(spec, path):
    """Emit the tap index -> layer name mapping as CSV."""
    with open(path, "w", newline="") as f:
        f.write("tap_index,layer_name\n")
        for idx, name in spec.tap_table():
            f.write(f"{idx},{name}\n")
