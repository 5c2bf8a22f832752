"""Synthetic iris-like image generator.

Produces desk-scale datasets with known circle annotations and
class-consistent annular texture.  Each class owns a band-limited texture:
a sum of 8-16 sinusoidal components in (radial fraction, angle) coordinates
plus a coarse value-noise grid, all seeded from (seed, class_id).  Samples
within a class differ only by rotation jitter, pupil dilation, and additive
Gaussian noise, each seeded from (seed, class_id, sample_id), so identical
configs produce byte-identical outputs (see seeding module for the
derivation rule).
"""

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import ManifestRow, write_image, write_manifest
from .normalize import CircleAnnotation
from .seeding import derive_rng


class ConfigError(ValueError):
    """Invalid generator configuration."""


@dataclass(frozen=True)
class SynthConfig:
    n_classes: int = 20
    samples_per_class: int = 10
    image_size: int = 256
    seed: int = 0
    rotation_jitter: float = 0.05
    dilation_jitter: float = 0.1
    noise_sigma: float = 0.02

    def validate(self):
        if self.n_classes < 2:
            raise ConfigError("n_classes must be >= 2")
        if self.samples_per_class < 2:
            raise ConfigError("samples_per_class must be >= 2 (stratified split)")
        if self.image_size < 32:
            raise ConfigError("image_size must be >= 32")
        if self.noise_sigma < 0:
            raise ConfigError("noise_sigma must be >= 0")
        if self.rotation_jitter < 0 or self.dilation_jitter < 0:
            raise ConfigError("jitters must be >= 0")
        if self.dilation_jitter >= 0.5:
            raise ConfigError("dilation_jitter must be < 0.5 to keep circles valid")


@dataclass(frozen=True)
class ClassTexture:
    """Band-limited texture parameters for one class."""

    angular_freq: np.ndarray   # integer cycles around the annulus
    radial_freq: np.ndarray
    amplitude: np.ndarray
    phase: np.ndarray
    noise_grid: np.ndarray     # coarse (radial x angular) value noise

    def evaluate(self, u, theta):
        """Texture value at radial fraction u in [0, 1] and angle theta."""
        acc = np.zeros_like(u)
        for k, l, a, p in zip(self.angular_freq, self.radial_freq,
                              self.amplitude, self.phase):
            acc += a * np.cos(k * theta + 2.0 * np.pi * l * u + p)
        acc /= math.sqrt(len(self.amplitude))
        acc += _sample_grid_periodic(self.noise_grid, u, theta)
        return acc


def _sample_grid_periodic(grid, u, theta):
    """Bilinear lookup on a coarse grid, periodic in theta, clamped in u."""
    gu, gt = grid.shape
    fu = np.clip(u, 0.0, 1.0) * (gu - 1)
    ft = (theta % (2.0 * np.pi)) / (2.0 * np.pi) * gt
    u0 = np.floor(fu).astype(np.intp)
    u1 = np.minimum(u0 + 1, gu - 1)
    t0 = np.floor(ft).astype(np.intp) % gt
    t1 = (t0 + 1) % gt
    au = fu - u0
    at = ft - np.floor(ft)
    return ((grid[u0, t0] * (1 - at) + grid[u0, t1] * at) * (1 - au)
            + (grid[u1, t0] * (1 - at) + grid[u1, t1] * at) * au)


def make_class_texture(seed, class_id):
    rng = derive_rng(seed, "synth-class", class_id)
    n_comp = int(rng.integers(8, 17))
    return ClassTexture(
        angular_freq=rng.integers(2, 33, size=n_comp).astype(np.float64),
        radial_freq=rng.integers(1, 7, size=n_comp).astype(np.float64),
        amplitude=rng.uniform(0.5, 1.0, size=n_comp),
        phase=rng.uniform(0.0, 2.0 * np.pi, size=n_comp),
        noise_grid=rng.normal(0.0, 0.15, size=(8, 32)),
    )


def render_sample(cfg, texture, class_id, sample_id):
    """Render one eye image; returns (image in [0, 1], CircleAnnotation)."""
    s = cfg.image_size
    cx = cy = (s - 1) / 2.0
    iris_r = 0.42 * s
    pupil_base = 0.14 * s

    rng = derive_rng(cfg.seed, "synth-sample", class_id, sample_id)
    rotation = rng.uniform(-cfg.rotation_jitter, cfg.rotation_jitter)
    dilation = rng.uniform(-cfg.dilation_jitter, cfg.dilation_jitter)
    pupil_r = pupil_base * (1.0 + dilation)

    ys, xs = np.mgrid[0:s, 0:s].astype(np.float64)
    r = np.hypot(xs - cx, ys - cy)
    theta = np.arctan2(ys - cy, xs - cx)

    image = np.full((s, s), 0.85)
    image[r < pupil_r] = 0.05

    ring = (r >= pupil_r) & (r <= iris_r)
    u = (r[ring] - pupil_r) / (iris_r - pupil_r)
    tex = texture.evaluate(u, theta[ring] - rotation)
    image[ring] = 0.5 + 0.35 * np.tanh(tex)

    if cfg.noise_sigma > 0:
        image += rng.normal(0.0, cfg.noise_sigma, size=image.shape)
    image = np.clip(image, 0.0, 1.0)
    circles = CircleAnnotation(cx, cy, pupil_r, cx, cy, iris_r)
    return image, circles


def generate(cfg, out_dir):
    """Write the full synthetic dataset; returns the manifest path."""
    cfg.validate()
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        probe = out_dir / ".write_probe"
        probe.touch()
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {out_dir} is not writable: {exc}") from exc

    rows = []
    for class_id in range(cfg.n_classes):
        texture = make_class_texture(cfg.seed, class_id)
        for sample_id in range(cfg.samples_per_class):
            image, circles = render_sample(cfg, texture, class_id, sample_id)
            filename = f"c{class_id:04d}_s{sample_id:03d}.png"
            write_image(out_dir / filename, image)
            rows.append(ManifestRow(filename, class_id, circles))
    manifest_path = out_dir / "manifest.csv"
    write_manifest(manifest_path, rows)
    return manifest_path
