"""Plot-ready artifacts from an EvalReport.

Writes, into the output directory:

* ``layers.csv``   — ``tap,layer_name,feature_len,pca_dims,accuracy``
* ``roc_<tap>.csv``— ``fmr,tpr`` points of the best tap's curve
* ``boxplot.csv``  — sub-split accuracies plus the five-number summary
* ``report.json``  — the full report; parses back into an equal EvalReport

All files are UTF-8, newline-terminated, and deterministic.
"""

import json
from pathlib import Path

from .evaluate import EvalReport


def emit(report, out_dir):
    """Write all artifacts; returns the list of paths written."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    path = out_dir / "layers.csv"
    with open(path, "w", newline="") as f:
        f.write("tap,layer_name,feature_len,pca_dims,accuracy\n")
        for t in report.per_tap:
            f.write(f"{t.tap},{t.layer_name},{t.feature_len},{t.pca_dims},{t.accuracy:.10g}\n")
    written.append(path)

    if report.roc is not None:
        path = out_dir / f"roc_{report.best_tap}.csv"
        with open(path, "w", newline="") as f:
            f.write("fmr,tpr\n")
            for fmr, tpr in zip(report.roc.fmr, report.roc.tpr):
                f.write(f"{fmr:.10g},{tpr:.10g}\n")
        written.append(path)

    path = out_dir / "boxplot.csv"
    with open(path, "w", newline="") as f:
        f.write("statistic,value\n")
        if report.subsplit is not None:
            for i, acc in enumerate(report.subsplit.accuracies):
                f.write(f"subsplit_{i},{acc:.10g}\n")
            s = report.subsplit
            for name, value in (("min", s.minimum), ("q1", s.q1), ("median", s.median),
                                ("q3", s.q3), ("max", s.maximum)):
                f.write(f"{name},{value:.10g}\n")
    written.append(path)

    path = out_dir / "report.json"
    with open(path, "w") as f:
        json.dump(report.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")
    written.append(path)
    return written


def load_report(path):
    with open(path) as f:
        return EvalReport.from_dict(json.load(f))
