"""Command line: shapebench-extract --images DIR --out BASE [options]."""

from __future__ import annotations

import argparse
import sys

from .extract import ExtractionConfig, extract
from .naming import BadViewName


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(
        prog="shapebench-extract",
        description=(
            "Run a pretrained CNN over a directory of canonical-named view images "
            "and write shapebench .emb/.names files. Preprocessing: resize short "
            "side to 256/224 of --image-size, center crop, scale to [0,1], "
            "normalize with ImageNet statistics."
        ),
    )
    ap.add_argument("--images", required=True, help="directory of <view-name>.<ext> images")
    ap.add_argument("--out", required=True, help="output prefix; writes <out>.emb and <out>.names")
    ap.add_argument("--model", default="resnet50", choices=["resnet18", "resnet34", "resnet50"],
                    help="backbone; embeddings come from its global average pooling output")
    ap.add_argument("--batch", type=int, default=32, help="inference batch size")
    ap.add_argument("--weights", default="pretrained",
                    help="'pretrained' (default), 'none' (seeded random init), or a state_dict path")
    ap.add_argument("--image-size", type=int, default=224, help="network input size (default 224)")
    ap.add_argument("--seed", type=int, default=0, help="init seed when --weights none")
    args = ap.parse_args(argv)

    config = ExtractionConfig(
        images=args.images,
        out_base=args.out,
        model=args.model,
        weights=args.weights,
        batch_size=args.batch,
        image_size=args.image_size,
        seed=args.seed,
    )
    try:
        emb_path, names_path = extract(config)
    except (BadViewName, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    n = sum(1 for _ in open(names_path, "rb"))
    print(f"wrote {emb_path} and {names_path}: {n} rows from {args.images} "
          f"({args.model}, weights={args.weights}, input {args.image_size})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
