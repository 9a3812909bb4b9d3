"""Single command-line entry point mirroring the training configuration."""

from __future__ import annotations

import argparse
import sys

from .data import DATASETS
from .specio import HarnessError, scale_widths
from .sweep import ALL_TEMPLATES, sweep_templates
from .train import TrainRunConfig, default_schedule


def _parse_templates(value: str) -> list[str]:
    tokens = [t for t in value.split(",") if t]
    out = []
    for token in tokens:
        if token == "all":
            out.extend(t for t in ALL_TEMPLATES if t not in out)
        elif token in ALL_TEMPLATES:
            if token not in out:
                out.append(token)
        else:
            raise HarnessError(f"unknown template {token!r}")
    if not out:
        raise HarnessError("no templates given")
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="spectrain",
        description="Train template variants of an architecture spec at desk scale",
    )
    p.add_argument("--spec", required=True, help="base architecture spec file")
    p.add_argument("--dataset", choices=DATASETS, default="small-images")
    p.add_argument("--data-dir", default=None, help="directory holding CIFAR-10 batches")
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--lr", type=float, default=0.1, help="base learning rate for the schedule")
    p.add_argument("--weight-decay", type=float, default=1e-4)
    p.add_argument("--momentum", type=float, default=0.9)
    p.add_argument("--batch", type=int, default=128)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--train-size", type=int, default=2048)
    p.add_argument("--val-size", type=int, default=512)
    p.add_argument("--templates", default="all",
                   help="comma-separated template tokens or 'all'")
    p.add_argument("--width-divisor", type=int, default=8,
                   help="shrink every redistributable width by this factor first (1 = off)")
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel runs with per-template seeds (default sequential)")
    p.add_argument("--out", required=True, help="results CSV path")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec_path = args.spec
        if args.width_divisor > 1:
            scaled = args.out + ".scaled-spec.json" if not args.out.endswith(".csv") \
                else args.out[:-4] + ".scaled-spec.json"
            scale_widths(args.spec, scaled, args.width_divisor)
            spec_path = scaled
        config = TrainRunConfig(
            spec_path=spec_path,
            dataset=args.dataset,
            epochs=args.epochs,
            lr_schedule=default_schedule(args.epochs, args.lr),
            weight_decay=args.weight_decay,
            momentum=args.momentum,
            batch=args.batch,
            seed=args.seed,
            train_size=args.train_size,
            val_size=args.val_size,
            data_dir=args.data_dir,
        )
        results = sweep_templates(spec_path, _parse_templates(args.templates),
                                  config, out_csv=args.out, jobs=args.jobs)
    except HarnessError as exc:
        print(f"spectrain: error: {exc}", file=sys.stderr)
        return 1
    for r in results:
        status = f"{r.final_accuracy:.2f}%" if r.final_accuracy is not None else f"FAILED ({r.error})"
        print(f"{r.template:<20} params {r.params:>10}  accuracy {status}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
