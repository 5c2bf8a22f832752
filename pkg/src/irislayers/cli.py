"""Command-line orchestration of the pipeline.

Subcommands: ``synth``, ``normalize``, ``extract``, ``sweep``, ``roc``,
``report``.  Each accepts ``--config`` (a JSON document, see README) with
individual flags overriding config fields.  ``--seed`` is the single
entropy source; all module seeds derive from it (see the seeding module).
``--threads 1`` guarantees bitwise-deterministic output.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import dataset, report as report_mod, synthgen
from .evaluate import (PipelineConfig, EvalReport, layer_sweep, roc_from_scores,
                       stratified_split, subsplit_stats, tpr_at_fmr, evaluate_tap,
                       extract_tap_features)
from .model import build_spec, init_random, load_weights, save_tap_table

DEFAULT_CONFIG = {
    "manifest": None,
    "weights": None,
    "preset": "resnet50",
    "taps": "all",
    "split_fraction": 0.7,
    "seed": 0,
    "pca_cap": 2000,
    "variance_target": 0.9,
    "oversample": 10,
    "power_iters": 4,
    "pca_denominator": "total",
    "svm_c": 1.0,
    "svm_tol": 1e-4,
    "svm_max_iter": 1000,
    "post_activation": False,
    "n_subsplits": 10,
    "subsplit_keep": 0.8,
    "fmr_target": 0.001,
    "out": "out",
    "threads": 1,
    # synth-only fields
    "n_classes": 20,
    "samples_per_class": 10,
    "image_size": 256,
    "rotation_jitter": 0.05,
    "dilation_jitter": 0.1,
    "noise_sigma": 0.02,
}


class CliError(Exception):
    pass


def load_config(args):
    cfg = dict(DEFAULT_CONFIG)
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            raise CliError(f"config file not found: {path}")
        with open(path) as f:
            overrides = json.load(f)
        unknown = set(overrides) - set(cfg)
        if unknown:
            raise CliError(f"unknown config fields: {sorted(unknown)}")
        cfg.update(overrides)
    for key in cfg:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if not 0 < cfg["split_fraction"] < 1:
        raise CliError(f"split_fraction must be in (0, 1), got {cfg['split_fraction']}")
    return cfg


def pipeline_config(cfg):
    return PipelineConfig(
        pca_cap=cfg["pca_cap"],
        variance_target=cfg["variance_target"],
        oversample=cfg["oversample"],
        power_iters=cfg["power_iters"],
        pca_denominator=cfg["pca_denominator"],
        svm_c=cfg["svm_c"],
        svm_tol=cfg["svm_tol"],
        svm_max_iter=cfg["svm_max_iter"],
        post_activation=bool(cfg["post_activation"]),
        n_subsplits=cfg["n_subsplits"],
        subsplit_keep=cfg["subsplit_keep"],
        fmr_target=cfg["fmr_target"],
        seed=cfg["seed"],
        threads=cfg["threads"],
    )


def parse_taps(spec_taps, model_spec):
    if spec_taps in (None, "all"):
        return None
    if isinstance(spec_taps, str):
        spec_taps = [int(t) for t in spec_taps.split(",") if t.strip()]
    taps = sorted(int(t) for t in spec_taps)
    n = model_spec.num_taps
    bad = [t for t in taps if not 1 <= t <= n]
    if bad:
        raise CliError(f"tap indices {bad} outside [1, {n}] for preset {model_spec.preset}")
    return taps


def load_model(cfg):
    if cfg["weights"]:
        path = Path(cfg["weights"])
        if not path.exists():
            raise CliError(f"weights file not found: {path}")
        return load_weights(path, cfg["preset"])
    # no weights supplied: seeded random initialization
    return init_random(build_spec(cfg["preset"]), cfg["seed"])


def require_manifest(cfg):
    if not cfg["manifest"]:
        raise CliError("a dataset manifest is required (--manifest or config)")
    path = Path(cfg["manifest"])
    if not path.exists():
        raise CliError(f"manifest not found: {path}")
    return path


def cmd_synth(cfg):
    synth_cfg = synthgen.SynthConfig(
        n_classes=cfg["n_classes"],
        samples_per_class=cfg["samples_per_class"],
        image_size=cfg["image_size"],
        seed=cfg["seed"],
        rotation_jitter=cfg["rotation_jitter"],
        dilation_jitter=cfg["dilation_jitter"],
        noise_sigma=cfg["noise_sigma"],
    )
    manifest = synthgen.generate(synth_cfg, cfg["out"])
    print(f"wrote {manifest}")


def cmd_normalize(cfg):
    manifest = require_manifest(cfg)
    out_dir = Path(cfg["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = dataset.read_manifest(manifest)
    textures, _ = dataset.load_normalized(manifest)
    for row, texture in zip(rows, textures):
        np.save(out_dir / (Path(row.filename).stem + ".npy"), texture)
    print(f"wrote {len(rows)} normalized textures to {out_dir}")


def cmd_extract(cfg):
    manifest = require_manifest(cfg)
    model_spec = load_model(cfg)
    taps = parse_taps(cfg["taps"], model_spec)
    out_dir = Path(cfg["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    textures, labels = dataset.load_normalized(manifest)
    matrices = extract_tap_features(model_spec, textures, labels, taps=taps,
                                    post_activation=bool(cfg["post_activation"]),
                                    threads=cfg["threads"])
    for tap, fm in sorted(matrices.items()):
        fm.save(out_dir / f"features_tap{tap:03d}.lpfm")
    save_tap_table(model_spec, out_dir / "tap_table.csv")
    print(f"wrote {len(matrices)} feature matrices to {out_dir}")


def run_sweep(cfg):
    manifest = require_manifest(cfg)
    model_spec = load_model(cfg)
    taps = parse_taps(cfg["taps"], model_spec)
    textures, labels = dataset.load_normalized(manifest)
    plan = stratified_split(labels, fraction=cfg["split_fraction"], seed=cfg["seed"])
    return layer_sweep(model_spec, textures, labels, plan, taps=taps,
                       config=pipeline_config(cfg)), model_spec


def cmd_sweep(cfg):
    report, model_spec = run_sweep(cfg)
    out_dir = Path(cfg["out"])
    files = report_mod.emit(report, out_dir)
    save_tap_table(model_spec, out_dir / "tap_table.csv")
    for f in files:
        print(f"wrote {f}")
    print(f"best tap: {report.best_tap} "
          f"(accuracy {max(t.accuracy for t in report.per_tap):.4f}, "
          f"TPR@FMR {report.fmr_target}: {report.tpr_at_fmr_target:.4f})")


def cmd_roc(cfg):
    report, _ = run_sweep(cfg)
    out_dir = Path(cfg["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"roc_{report.best_tap}.csv"
    with open(path, "w", newline="") as f:
        f.write("fmr,tpr\n")
        for fmr, tpr in zip(report.roc.fmr, report.roc.tpr):
            f.write(f"{fmr:.10g},{tpr:.10g}\n")
    print(f"wrote {path}")
    print(f"best tap {report.best_tap}: TPR@FMR {report.fmr_target} = "
          f"{report.tpr_at_fmr_target:.6f}")


def cmd_report(cfg, report_path):
    if not Path(report_path).exists():
        raise CliError(f"report file not found: {report_path}")
    report = report_mod.load_report(report_path)
    files = report_mod.emit(report, cfg["out"])
    for f in files:
        print(f"wrote {f}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="irislayers",
        description="Layer-wise deep-feature evaluation pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int)
    common.add_argument("--out")

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic dataset")
    p.add_argument("--n-classes", dest="n_classes", type=int)
    p.add_argument("--samples-per-class", dest="samples_per_class", type=int)
    p.add_argument("--image-size", dest="image_size", type=int)
    p.add_argument("--noise-sigma", dest="noise_sigma", type=float)

    for name, desc in (("normalize", "normalize manifest images"),
                       ("extract", "extract per-tap feature matrices"),
                       ("sweep", "run the full per-layer evaluation"),
                       ("roc", "best-tap ROC curve and TPR@FMR")):
        p = sub.add_parser(name, parents=[common], help=desc)
        p.add_argument("--manifest")
        if name != "normalize":
            p.add_argument("--weights")
            p.add_argument("--preset")
            p.add_argument("--taps")

    p = sub.add_parser("report", parents=[common], help="emit plot files from report.json")
    p.add_argument("--report", required=True, dest="report_path")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
        if args.command == "synth":
            cmd_synth(cfg)
        elif args.command == "normalize":
            cmd_normalize(cfg)
        elif args.command == "extract":
            cmd_extract(cfg)
        elif args.command == "sweep":
            cmd_sweep(cfg)
        elif args.command == "roc":
            cmd_roc(cfg)
        elif args.command == "report":
            cmd_report(cfg, args.report_path)
    except CliError as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
