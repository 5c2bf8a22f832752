"""Weight and reference-activation export.

``export_weights`` writes every conv/batchnorm parameter under the engine's
canonical names to an LPWT file plus a tap <-> layer-name mapping CSV.
``export_reference_activations`` runs the torch model on a given input and
dumps the pre-activation conv outputs of selected taps as LPFM files, for
cross-implementation agreement checks.
"""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .formats import write_lpfm, write_lpwt
from .resnet import ArchitectureError, conv_taps

ExportError = ArchitectureError


@dataclass(frozen=True)
class ExportManifest:
    source: str
    entries: tuple           # (name, shape) pairs as written, in order
    mapping: tuple           # (tap, framework_name, canonical_name) rows
    weights_path: Path
    mapping_path: Path


def _entry_dict(taps):
    """Canonical name -> float32 array, conv weights first, then batchnorms."""
    entries = {}
    for e in taps:
        entries[f"{e.canonical_name}.weight"] = e.conv.weight.detach().numpy()
        if e.conv.bias is not None:
            entries[f"{e.canonical_name}.bias"] = e.conv.bias.detach().numpy()
    for e in taps:
        bn = e.bn
        entries[f"{e.bn_canonical}.gamma"] = bn.weight.detach().numpy()
        entries[f"{e.bn_canonical}.beta"] = bn.bias.detach().numpy()
        entries[f"{e.bn_canonical}.mean"] = bn.running_mean.detach().numpy()
        entries[f"{e.bn_canonical}.variance"] = bn.running_var.detach().numpy()
        # epsilon written explicitly: framework defaults differ
        entries[f"{e.bn_canonical}.eps"] = np.array([bn.eps], dtype=np.float32)
    return entries


def write_mapping_csv(taps, path):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["tap_index", "framework_layer", "canonical_name"])
        for e in taps:
            writer.writerow([e.tap, e.framework_name, e.canonical_name])


def export_weights(model, out_dir, source="resnet50"):
    """Write <out_dir>/<source>.lpwt and <out_dir>/<source>_mapping.csv."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    taps = conv_taps(model)
    entries = _entry_dict(taps)
    weights_path = out_dir / f"{source}.lpwt"
    mapping_path = out_dir / f"{source}_mapping.csv"
    write_lpwt(weights_path, entries)
    write_mapping_csv(taps, mapping_path)
    return ExportManifest(
        source=source,
        entries=tuple((name, tuple(np.asarray(a).shape))
                      for name, a in entries.items()),
        mapping=tuple((e.tap, e.framework_name, e.canonical_name) for e in taps),
        weights_path=weights_path,
        mapping_path=mapping_path,
    )


def export_reference_activations(model, x, taps, out_dir, label=0):
    """Dump pre-activation conv outputs for the requested tap indices.

    ``x`` is a (3, h, w) float array; each requested tap becomes
    <out_dir>/ref_tap<NNN>.lpfm holding one row: the flattened conv output.
    Returns {tap: path}.
    """
    import torch

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = {e.tap: e for e in conv_taps(model)}
    bad = [t for t in taps if t not in entries]
    if bad:
        raise ExportError(f"unknown tap indices {sorted(bad)} (valid: 1..{len(entries)})")

    captured = {}
    hooks = []
    for t in taps:
        e = entries[t]
        hooks.append(e.conv.register_forward_hook(
            lambda mod, inp, out, tap=t: captured.__setitem__(tap, out)))
    try:
        with torch.no_grad():
            model(torch.as_tensor(np.asarray(x, dtype=np.float32)).unsqueeze(0))
    finally:
        for h in hooks:
            h.remove()

    paths = {}
    for t in sorted(taps):
        flat = captured[t].squeeze(0).numpy().reshape(1, -1)
        path = out_dir / f"ref_tap{t:03d}.lpfm"
        write_lpfm(path, flat, np.array([label]), t, entries[t].canonical_name)
        paths[t] = path
    return paths
