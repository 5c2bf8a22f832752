import numpy as np
import pytest

from irislayers.dataset import load_normalized, read_manifest
from irislayers.synthgen import ConfigError, SynthConfig, generate

SMALL = SynthConfig(n_classes=4, samples_per_class=3, image_size=96, seed=13)


def dataset_bytes(root):
    return {p.name: p.read_bytes() for p in sorted(root.iterdir())}


class TestGenerate:
    def test_deterministic_bytes(self, tmp_path):
        generate(SMALL, tmp_path / "a")
        generate(SMALL, tmp_path / "b")
        assert dataset_bytes(tmp_path / "a") == dataset_bytes(tmp_path / "b")

    def test_layout_and_annotations_valid(self, tmp_path):
        manifest = generate(SMALL, tmp_path / "d")
        rows = read_manifest(manifest)
        assert len(rows) == SMALL.n_classes * SMALL.samples_per_class
        # every annotation passes rubber-sheet normalization
        textures, labels = load_normalized(manifest)
        assert textures.shape == (len(rows), 64, 512)
        assert sorted(set(labels)) == list(range(SMALL.n_classes))

    def test_no_jitter_gives_identical_samples(self, tmp_path):
        cfg = SynthConfig(n_classes=2, samples_per_class=3, image_size=96,
                          seed=5, rotation_jitter=0.0, dilation_jitter=0.0,
                          noise_sigma=0.0)
        manifest = generate(cfg, tmp_path / "d")
        blobs = dataset_bytes(tmp_path / "d")
        for c in range(2):
            samples = [blobs[f"c{c:04d}_s{s:03d}.png"] for s in range(3)]
            assert samples[0] == samples[1] == samples[2]

    def test_within_class_correlation_exceeds_between(self, tmp_path):
        cfg = SynthConfig(n_classes=10, samples_per_class=4, image_size=128,
                          seed=21)
        manifest = generate(cfg, tmp_path / "d")
        textures, labels = load_normalized(manifest)
        flat = textures.reshape(len(labels), -1).astype(np.float64)
        flat -= flat.mean(axis=1, keepdims=True)
        norms = np.linalg.norm(flat, axis=1)
        corr = (flat @ flat.T) / np.outer(norms, norms)
        same = np.equal.outer(labels, labels)
        off_diag = ~np.eye(len(labels), dtype=bool)
        within = corr[same & off_diag].mean()
        between = np.abs(corr[~same]).mean()
        assert within > between

    def test_invalid_config_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            generate(SynthConfig(n_classes=1), tmp_path)
        with pytest.raises(ConfigError):
            generate(SynthConfig(samples_per_class=1), tmp_path)
        with pytest.raises(ConfigError):
            generate(SynthConfig(noise_sigma=-0.1), tmp_path)

    def test_unwritable_directory(self, tmp_path):
        import os
        if os.geteuid() == 0:
            pytest.skip("permission bits are ignored when running as root")
        target = tmp_path / "ro"
        target.mkdir()
        target.chmod(0o500)
        try:
            with pytest.raises(OSError):
                generate(SMALL, target)
        finally:
            target.chmod(0o700)
