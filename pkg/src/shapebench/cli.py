"""Command-line surface.

Subcommands: validate, run, report, errors, synth. Exit codes are stable:
0 success, 1 validation or benchmark-domain failure, 2 I/O or format
failure.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from ._backend import ENV_BACKEND, ENV_WORKERS, resolve_backend
from .errors import DomainError, FormatError, ShapebenchError
from .exclusion import ContrastMode, ExclusionSpec
from .matcher import match_all
from .report import (
    curves_to_csv,
    emit_report,
    error_curves,
    read_report,
    top_errors,
)
from .store import Metric, preprocess, read_embeddings, read_names, write_embeddings
from .synth import SynthParams, generate
from .views import Cvt, enumerate_cvts

SPEC_GRAMMAR = (
    "exclusion spec grammar: <dims>:<radius|none>:<none|hard|soft>, e.g. pw:2:none; "
    "dims list transformation dimensions in the order x,y,p,r,w"
)


def _parse_dims(text: str) -> list[Cvt]:
    if text == "all31":
        return enumerate_cvts()
    return [Cvt.parse(part) for part in text.split(",") if part != ""]


def _parse_radii(text: str) -> list[int | None]:
    """Accepts `none`, integers, comma lists, and a..b ranges."""
    out: list[int | None] = []
    for part in text.split(","):
        part = part.strip()
        if part == "":
            continue
        if part == "none":
            out.append(None)
        elif ".." in part:
            lo_s, hi_s = part.split("..", 1)
            lo, hi = int(lo_s), int(hi_s)
            if lo > hi:
                raise FormatError(f"empty radius range {part!r}")
            out.extend(range(lo, hi + 1))
        else:
            out.append(int(part))
    if not out:
        raise FormatError(f"no radii in {text!r}")
    for r in out:
        if r is not None and not 0 <= r <= 10:
            raise FormatError(f"radius out of range 0..10: {r}")
    return out


def _parse_modes(text: str) -> list[ContrastMode]:
    try:
        return [ContrastMode(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise FormatError(f"bad contrast mode list {text!r}: expected none,hard,soft") from None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shapebench",
        description="Nearest-neighbor view-matching benchmark over embedding files.",
        epilog=SPEC_GRAMMAR,
    )
    parser.add_argument("--version", action="version", version=f"shapebench {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a .names manifest and print the dataset shape")
    p.add_argument("names", help="path to the .names file")
    p.add_argument("--partial", action="store_true", help="skip grid completeness checks")

    p = sub.add_parser("run", help="run a spec grid and write CSV + JSON reports")
    p.add_argument("--emb", required=True, help="embedding file (.emb)")
    p.add_argument("--names", required=True, help="names sidecar (.names)")
    p.add_argument("--out", required=True, help="output prefix; writes <out>.csv and <out>.json")
    p.add_argument("--dims", default="all31", help="comma list of dim sets, or all31 (default)")
    p.add_argument("--radii", default="none,0..10",
                   help="radii: none, integers, lists, a..b ranges (default none,0..10)")
    p.add_argument("--modes", default="none", help="comma list of none,hard,soft (default none)")
    p.add_argument("--metric", default=Metric.CORRELATION.value,
                   choices=[m.value for m in Metric])
    p.add_argument("--workers", type=int, default=0,
                   help=f"worker threads; 0 = auto (env {ENV_WORKERS})")
    p.add_argument("--tile", type=int, default=0, help="candidate tile size; 0 = auto")
    p.add_argument("--backend", default=None, choices=["numba", "numpy"],
                   help=f"kernel backend (default: env {ENV_BACKEND} or numba when available)")
    p.add_argument("--exemplars", type=int, default=20,
                   help="how many worst failures to embed in the report (default 20)")
    p.add_argument("--partial", action="store_true", help="accept manifests with missing cells")

    p = sub.add_parser("report", help="summarize a structured report; optionally re-emit CSV")
    p.add_argument("report", help="path to a report .json")
    p.add_argument("--csv", default=None, help="write the curves back out as CSV")

    p = sub.add_parser("errors", help="print the worst match failures from a report")
    p.add_argument("report", help="path to a report .json")
    p.add_argument("-n", type=int, default=10, help="how many rows (default 10)")

    p = sub.add_parser("synth", help="generate a synthetic dataset (.emb + .names)")
    p.add_argument("--out", required=True, help="output prefix; writes <out>.emb and <out>.names")
    p.add_argument("--categories", type=int, default=2)
    p.add_argument("--instances", type=int, default=2)
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--contrasts", type=int, default=1, choices=[1, 2])
    p.add_argument("--step-scale", type=float, default=0.05)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--tangle", type=float, default=0.0)
    p.add_argument("--contrast-shift", type=float, default=0.0)
    p.add_argument("--twins", type=int, default=0, help="object pairs sharing anchor/tangents")
    return parser


def _cmd_validate(args) -> int:
    manifest = read_names(args.names, partial=args.partial)
    shape = manifest.describe()
    print(f"{args.names}: OK, {shape['n_rows']} rows")
    print(
        f"  {shape['n_categories']} categories, {shape['n_objects']} objects, "
        f"contrasts {','.join(shape['contrasts'])}"
    )
    print(f"  instances per category: {shape['instances_per_category']}")
    print("  note: origin views are replicated across the 31 series of each object")
    return 0


def _cmd_run(args) -> int:
    metric = Metric(args.metric)
    matrix, manifest = read_embeddings(args.emb, args.names, partial=args.partial)

    specs = [
        ExclusionSpec(dims, radius, mode)
        for dims in _parse_dims(args.dims)
        for radius in _parse_radii(args.radii)
        for mode in _parse_modes(args.modes)
    ]
    normalized = preprocess(matrix, metric)
    records = match_all(
        normalized, manifest, specs, metric,
        tile_size=args.tile, workers=args.workers, backend=args.backend,
    )
    curves = error_curves(records, specs=specs)
    exemplars = top_errors(records, args.exemplars) if args.exemplars > 0 else []

    config = {
        "version": __version__,
        "metric": metric.value,
        "specs": [str(s) for s in specs],
        "dataset": manifest.describe(),
        "backend": resolve_backend(args.backend),
        "embeddings": args.emb,
        "names": args.names,
        "degenerate_rows": normalized.degenerate_rows.tolist(),
    }
    emit_report(curves, exemplars, config,
                csv_path=f"{args.out}.csv", report_path=f"{args.out}.json")

    for curve in curves:
        for point in curve.points:
            oe = "null" if point.object_error is None else f"{point.object_error:.6f}"
            ce = "null" if point.category_error is None else f"{point.category_error:.6f}"
            print(
                f"{curve.dims}:{point.radius_label}:{curve.mode} "
                f"n={point.n_qualified} skipped={point.n_skipped} "
                f"object_error={oe} category_error={ce}"
            )
    print(f"wrote {args.out}.csv and {args.out}.json")
    return 0


def _cmd_report(args) -> int:
    curves, exemplars, config = read_report(args.report)
    print(f"{args.report}: metric={config.get('metric', '?')} "
          f"specs={len(config.get('specs', []))} curves={len(curves)} "
          f"exemplars={len(exemplars)}")
    csv_text = curves_to_csv(curves)
    sys.stdout.write(csv_text)
    if args.csv:
        from pathlib import Path

        Path(args.csv).write_text(csv_text, encoding="utf-8")
        print(f"wrote {args.csv}")
    return 0


def _cmd_errors(args) -> int:
    _, exemplars, _ = read_report(args.report)
    if not exemplars:
        print("no errors")
        return 0
    print(f"{'reference':<28} {'wrong match':<28} {'rejected match':<28} "
          f"{'sim(wrong)':>10} {'sim(rej)':>10} {'margin':>10}  spec")
    for e in exemplars[: args.n]:
        print(
            f"{e.reference:<28} {e.top1:<28} {e.best_pmc:<28} "
            f"{e.top1_similarity:>10.6f} {e.best_pmc_similarity:>10.6f} "
            f"{e.margin:>10.6f}  {e.spec}"
        )
    return 0


def _cmd_synth(args) -> int:
    params = SynthParams(
        n_categories=args.categories,
        instances_per_category=args.instances,
        dim=args.dim,
        seed=args.seed,
        step_scale=args.step_scale,
        noise=args.noise,
        tangle=args.tangle,
        contrasts=args.contrasts,
        contrast_shift=args.contrast_shift,
        twin_pairs=args.twins,
    )
    matrix, manifest = generate(params)
    write_embeddings(matrix, manifest, f"{args.out}.emb", f"{args.out}.names")
    print(f"wrote {args.out}.emb and {args.out}.names: "
          f"{manifest.n_rows} rows x {matrix.dim} dims, seed {args.seed}")
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "run": _cmd_run,
    "report": _cmd_report,
    "errors": _cmd_errors,
    "synth": _cmd_synth,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except FormatError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except DomainError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except ShapebenchError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
