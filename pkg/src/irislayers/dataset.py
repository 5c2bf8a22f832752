"""Dataset manifest and eye-image file I/O.

The manifest is a CSV with header
``filename,class_id,pupil_cx,pupil_cy,pupil_r,iris_cx,iris_cy,iris_r``;
filenames are relative to the manifest's directory.  Images are 8-bit
grayscale PNG or raw ``.gray`` (width and height as u32 LE, then
width*height intensity bytes).  Pixels map to [0, 1] by division by 255.
"""

import csv
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .normalize import CircleAnnotation

MANIFEST_FIELDS = [
    "filename", "class_id",
    "pupil_cx", "pupil_cy", "pupil_r",
    "iris_cx", "iris_cy", "iris_r",
]


@dataclass(frozen=True)
class ManifestRow:
    filename: str
    class_id: int
    circles: CircleAnnotation


def read_image(path):
    """Load a PNG or .gray image as a float array in [0, 1]."""
    path = Path(path)
    if path.suffix == ".gray":
        blob = path.read_bytes()
        w, h = struct.unpack_from("<II", blob, 0)
        pix = np.frombuffer(blob, dtype=np.uint8, count=w * h, offset=8)
        return pix.reshape(h, w).astype(np.float64) / 255.0
    img = Image.open(path).convert("L")
    return np.asarray(img, dtype=np.float64) / 255.0


def write_image(path, image):
    """Write a [0, 1] float image as 8-bit grayscale PNG or .gray."""
    path = Path(path)
    pix = np.clip(np.round(np.asarray(image) * 255.0), 0, 255).astype(np.uint8)
    if path.suffix == ".gray":
        h, w = pix.shape
        path.write_bytes(struct.pack("<II", w, h) + pix.tobytes())
    else:
        Image.fromarray(pix, mode="L").save(path, format="PNG")


def write_manifest(path, rows):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(MANIFEST_FIELDS)
        for r in rows:
            c = r.circles
            writer.writerow([
                r.filename, r.class_id,
                c.pupil_cx, c.pupil_cy, c.pupil_r,
                c.iris_cx, c.iris_cy, c.iris_r,
            ])


def read_manifest(path):
    rows = []
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        missing = set(MANIFEST_FIELDS) - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"{path}: manifest missing columns {sorted(missing)}")
        for rec in reader:
            circles = CircleAnnotation(
                pupil_cx=float(rec["pupil_cx"]),
                pupil_cy=float(rec["pupil_cy"]),
                pupil_r=float(rec["pupil_r"]),
                iris_cx=float(rec["iris_cx"]),
                iris_cy=float(rec["iris_cy"]),
                iris_r=float(rec["iris_r"]),
            )
            rows.append(ManifestRow(rec["filename"], int(rec["class_id"]), circles))
    return rows


def load_normalized(manifest_path, radial=64, angular=512):
    """Normalize every manifest entry; returns (textures n x radial x angular, labels)."""
    from .normalize import rubber_sheet

    manifest_path = Path(manifest_path)
    rows = read_manifest(manifest_path)
    base = manifest_path.parent
    textures = np.empty((len(rows), radial, angular), dtype=np.float32)
    labels = np.empty(len(rows), dtype=np.int64)
    for i, row in enumerate(rows):
        image = read_image(base / row.filename)
        textures[i] = rubber_sheet(image, row.circles, radial, angular)
        labels[i] = row.class_id
    return textures, labels
