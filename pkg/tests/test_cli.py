import json

import numpy as np
import pytest

from irislayers.cli import main
from irislayers.features import FeatureMatrix


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("synth")
    rc = main(["synth", "--out", str(root), "--seed", "5",
               "--n-classes", "5", "--samples-per-class", "7",
               "--image-size", "96"])
    assert rc == 0
    return root


def sweep_config(synth_dir, out_dir, **extra):
    cfg = {
        "manifest": str(synth_dir / "manifest.csv"),
        "preset": "mini",
        "seed": 5,
        "threads": 1,
        "out": str(out_dir),
        "svm_max_iter": 100,
        "taps": [1, 2, 4],
    }
    cfg.update(extra)
    return cfg


class TestSynth:
    def test_deterministic_datasets(self, tmp_path):
        for sub in ("a", "b"):
            rc = main(["synth", "--out", str(tmp_path / sub), "--seed", "9",
                       "--n-classes", "3", "--samples-per-class", "2",
                       "--image-size", "64"])
            assert rc == 0
        files_a = sorted((tmp_path / "a").iterdir())
        for fa in files_a:
            assert fa.read_bytes() == (tmp_path / "b" / fa.name).read_bytes()


class TestNormalize:
    def test_writes_texture_files(self, synth_dir, tmp_path):
        rc = main(["normalize", "--manifest", str(synth_dir / "manifest.csv"),
                   "--out", str(tmp_path)])
        assert rc == 0
        npys = sorted(tmp_path.glob("*.npy"))
        assert len(npys) == 35
        tex = np.load(npys[0])
        assert tex.shape == (64, 512)
        assert tex.min() >= 0 and tex.max() <= 1

    def test_missing_manifest_fails(self, tmp_path, capsys):
        rc = main(["normalize", "--manifest", str(tmp_path / "nope.csv"),
                   "--out", str(tmp_path)])
        assert rc == 2
        assert "normalize" in capsys.readouterr().err


class TestExtract:
    def test_feature_files_and_tap_table(self, synth_dir, tmp_path):
        rc = main(["extract", "--manifest", str(synth_dir / "manifest.csv"),
                   "--preset", "mini", "--taps", "1,3", "--seed", "5",
                   "--out", str(tmp_path)])
        assert rc == 0
        fm = FeatureMatrix.load(tmp_path / "features_tap001.lpfm")
        assert fm.n == 35
        assert fm.tap == 1
        assert fm.layer_name == "stem.conv"
        table = (tmp_path / "tap_table.csv").read_text().splitlines()
        assert len(table) == 9

    def test_bad_tap_rejected(self, synth_dir, tmp_path, capsys):
        rc = main(["extract", "--manifest", str(synth_dir / "manifest.csv"),
                   "--preset", "mini", "--taps", "99", "--out", str(tmp_path)])
        assert rc == 2
        assert "99" in capsys.readouterr().err


class TestSweep:
    def test_sweep_outputs(self, synth_dir, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(sweep_config(synth_dir, tmp_path / "out")))
        rc = main(["sweep", "--config", str(cfg_path)])
        assert rc == 0
        layers = (tmp_path / "out" / "layers.csv").read_text().splitlines()
        assert len(layers) == 4  # header + 3 taps
        report = json.loads((tmp_path / "out" / "report.json").read_text())
        assert len(report["per_tap"]) == 3

    def test_reproducible_byte_identical(self, synth_dir, tmp_path):
        for sub in ("r1", "r2"):
            cfg_path = tmp_path / f"{sub}.json"
            cfg_path.write_text(json.dumps(sweep_config(synth_dir, tmp_path / sub)))
            assert main(["sweep", "--config", str(cfg_path)]) == 0
        assert (tmp_path / "r1" / "report.json").read_bytes() == \
            (tmp_path / "r2" / "report.json").read_bytes()

    def test_unknown_config_field_rejected(self, synth_dir, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"bogus_field": 1}))
        rc = main(["sweep", "--config", str(cfg_path)])
        assert rc == 2
        assert "bogus_field" in capsys.readouterr().err


class TestRocAndReport:
    def test_roc_subcommand(self, synth_dir, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(sweep_config(synth_dir, tmp_path / "out",
                                                    taps=[1])))
        rc = main(["roc", "--config", str(cfg_path)])
        assert rc == 0
        out = capsys.readouterr().out
        assert "TPR@FMR" in out
        assert (tmp_path / "out" / "roc_1.csv").exists()

    def test_report_subcommand(self, synth_dir, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(sweep_config(synth_dir, tmp_path / "out",
                                                    taps=[1])))
        assert main(["sweep", "--config", str(cfg_path)]) == 0
        rc = main(["report", "--report", str(tmp_path / "out" / "report.json"),
                   "--out", str(tmp_path / "plot")])
        assert rc == 0
        assert (tmp_path / "plot" / "layers.csv").exists()
        assert (tmp_path / "plot" / "boxplot.csv").exists()
