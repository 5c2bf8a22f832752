"""Enumeration of a torch ResNet-50 in tap order.

Tap numbering is 1-based forward execution order over the conv layers: the
stem conv is tap 1; inside each bottleneck block conv1/conv2/conv3 come
first and the 1x1 downsample (projection) conv, when present, follows
conv3.  ResNet-50 yields exactly 53 taps.
"""

from dataclasses import dataclass

EXPECTED_TAPS = 53


class ArchitectureError(ValueError):
    """Model does not have the expected ResNet-50 layout."""


@dataclass(frozen=True)
class TapEntry:
    tap: int
    framework_name: str   # torch module path, e.g. "layer1.0.conv1"
    canonical_name: str   # engine name, e.g. "stage1.block0.conv1"
    conv: object          # torch.nn.Conv2d
    bn: object            # the BatchNorm2d normalizing this conv's output
    bn_canonical: str


def conv_taps(model):
    """List of TapEntry for a torchvision-style ResNet-50.

    Raises ArchitectureError if the stem/stage layout or the conv count does
    not match ResNet-50.
    """
    import torch.nn as nn

    def expect(mod, cls, what):
        if not isinstance(mod, cls):
            raise ArchitectureError(f"{what}: expected {cls.__name__}, "
                                    f"got {type(mod).__name__}")
        return mod

    entries = [TapEntry(
        tap=1,
        framework_name="conv1",
        canonical_name="stem.conv",
        conv=expect(model.conv1, nn.Conv2d, "conv1"),
        bn=expect(model.bn1, nn.BatchNorm2d, "bn1"),
        bn_canonical="stem.bn",
    )]
    tap = 2
    for s in (1, 2, 3, 4):
        layer = getattr(model, f"layer{s}", None)
        if layer is None:
            raise ArchitectureError(f"model has no layer{s}")
        for b, block in enumerate(layer):
            prefix_fw = f"layer{s}.{b}"
            prefix = f"stage{s}.block{b}"
            for k in (1, 2, 3):
                entries.append(TapEntry(
                    tap=tap,
                    framework_name=f"{prefix_fw}.conv{k}",
                    canonical_name=f"{prefix}.conv{k}",
                    conv=expect(getattr(block, f"conv{k}", None), nn.Conv2d,
                                f"{prefix_fw}.conv{k}"),
                    bn=expect(getattr(block, f"bn{k}", None), nn.BatchNorm2d,
                              f"{prefix_fw}.bn{k}"),
                    bn_canonical=f"{prefix}.bn{k}",
                ))
                tap += 1
            if block.downsample is not None:
                entries.append(TapEntry(
                    tap=tap,
                    framework_name=f"{prefix_fw}.downsample.0",
                    canonical_name=f"{prefix}.proj",
                    conv=expect(block.downsample[0], nn.Conv2d,
                                f"{prefix_fw}.downsample.0"),
                    bn=expect(block.downsample[1], nn.BatchNorm2d,
                              f"{prefix_fw}.downsample.1"),
                    bn_canonical=f"{prefix}.projbn",
                ))
                tap += 1

    if len(entries) != EXPECTED_TAPS:
        raise ArchitectureError(
            f"found {len(entries)} conv layers, expected {EXPECTED_TAPS}")
    for e in entries:
        if e.bn.num_features != e.conv.out_channels:
            raise ArchitectureError(
                f"{e.framework_name}: batchnorm width {e.bn.num_features} "
                f"!= conv out channels {e.conv.out_channels}")
    return entries


def get_model(pretrained=False, state_dict_path=None, seed=0):
    """A torchvision ResNet-50 in eval mode.

    ``pretrained`` fetches the default general-image weights (needs network
    access).  ``state_dict_path`` loads a local checkpoint instead (e.g. a
    face-trained variant); its shapes are validated by conv_taps / the
    state-dict load itself.  Otherwise the model is seeded randomly, which
    is sufficient for format and agreement checks.
    """
    import torch
    from torchvision.models import resnet50

    if pretrained:
        from torchvision.models import ResNet50_Weights
        model = resnet50(weights=ResNet50_Weights.IMAGENET1K_V1)
    else:
        torch.manual_seed(seed)
        model = resnet50(weights=None)
        if state_dict_path is not None:
            state = torch.load(state_dict_path, map_location="cpu",
                               weights_only=True)
            model.load_state_dict(state)
    return model.eval()
