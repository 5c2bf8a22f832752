import numpy as np

from irislayers.evaluate import (EvalReport, PipelineConfig, layer_sweep,
                                 stratified_split)
from irislayers.model import build_spec, init_random
from irislayers.report import emit, load_report


def make_report(taps=(1, 2)):
    textures = np.random.default_rng(0).random((28, 64, 512)).astype(np.float32)
    labels = np.repeat(np.arange(4), 7)
    spec = init_random(build_spec("mini"), 3)
    plan = stratified_split(labels, seed=3)
    return layer_sweep(spec, textures, labels, plan, taps=list(taps),
                       config=PipelineConfig(seed=3, svm_max_iter=50))


class TestEmit:
    def test_files_written(self, tmp_path):
        report = make_report()
        files = emit(report, tmp_path)
        names = {f.name for f in files}
        assert names == {"layers.csv", f"roc_{report.best_tap}.csv",
                         "boxplot.csv", "report.json"}
        layers = (tmp_path / "layers.csv").read_text().splitlines()
        assert layers[0] == "tap,layer_name,feature_len,pca_dims,accuracy"
        assert len(layers) == 1 + len(report.per_tap)

    def test_empty_tap_set_header_only(self, tmp_path):
        report = EvalReport(per_tap=(), best_tap=None, roc=None,
                            tpr_at_fmr_target=0.0, fmr_target=0.001,
                            subsplit=None, seed=0)
        emit(report, tmp_path)
        assert (tmp_path / "layers.csv").read_text() == \
            "tap,layer_name,feature_len,pca_dims,accuracy\n"

    def test_emit_deterministic(self, tmp_path):
        report = make_report()
        emit(report, tmp_path / "a")
        emit(report, tmp_path / "b")
        for name in ("layers.csv", "boxplot.csv", "report.json"):
            assert (tmp_path / "a" / name).read_bytes() == \
                (tmp_path / "b" / name).read_bytes()

    def test_roc_rows_match_curve_length(self, tmp_path):
        report = make_report()
        emit(report, tmp_path)
        rows = (tmp_path / f"roc_{report.best_tap}.csv").read_text().splitlines()
        assert len(rows) - 1 == len(report.roc.fmr)

    def test_json_round_trip(self, tmp_path):
        report = make_report()
        emit(report, tmp_path)
        back = load_report(tmp_path / "report.json")
        assert back.to_dict() == report.to_dict()
