"""Command-line entry point: ``lpexport weights`` / ``lpexport activations``."""

import argparse
import sys

import numpy as np

from .export import ExportError, export_reference_activations, export_weights
from .resnet import get_model


def _model_from_args(args):
    return get_model(pretrained=args.pretrained,
                     state_dict_path=args.state_dict, seed=args.seed)


def main(argv=None):
    parser = argparse.ArgumentParser(prog="lpexport")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_model_args(p):
        p.add_argument("--pretrained", action="store_true",
                       help="fetch the default general-image weights")
        p.add_argument("--state-dict", default=None,
                       help="local checkpoint to load instead")
        p.add_argument("--seed", type=int, default=0,
                       help="init seed when no weights are given")
        p.add_argument("--source", default="resnet50",
                       help="basename for the output files")
        p.add_argument("--out", required=True)

    w = sub.add_parser("weights", help="export weights + mapping CSV")
    add_model_args(w)

    a = sub.add_parser("activations", help="dump per-tap reference activations")
    add_model_args(a)
    a.add_argument("--input", required=True, help=".npy file, shape (3, h, w)")
    a.add_argument("--taps", required=True, help="comma-separated tap indices")

    args = parser.parse_args(argv)
    try:
        model = _model_from_args(args)
        if args.command == "weights":
            manifest = export_weights(model, args.out, source=args.source)
            print(f"wrote {manifest.weights_path} ({len(manifest.entries)} entries)")
            print(f"wrote {manifest.mapping_path} ({len(manifest.mapping)} taps)")
        else:
            x = np.load(args.input)
            taps = [int(t) for t in args.taps.split(",")]
            paths = export_reference_activations(model, x, taps, args.out)
            for t, path in sorted(paths.items()):
                print(f"wrote {path}")
    except (ExportError, OSError, ValueError) as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
