"""Backend benchmark: numba kernels vs the pure-numpy fallback.

Usage: python -m shapebench.bench [--categories 4 --instances 2 --dim 128 ...]

Times the full sweep on a synthetic dataset under both backends and checks
that their outputs are bit-identical.
"""

from __future__ import annotations

import argparse
import time

from ._backend import HAVE_NUMBA
from .exclusion import ContrastMode, ExclusionSpec
from .matcher import match_all
from .store import Metric, preprocess
from .synth import SynthParams, generate
from .views import Cvt


def _run(normalized, manifest, specs, backend, tile, workers):
    t0 = time.perf_counter()
    records = match_all(
        normalized, manifest, specs, tile_size=tile, workers=workers, backend=backend
    )
    return time.perf_counter() - t0, records


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--categories", type=int, default=4)
    ap.add_argument("--instances", type=int, default=2)
    ap.add_argument("--dim", type=int, default=128)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--tile", type=int, default=0)
    ap.add_argument("--workers", type=int, default=0)
    ap.add_argument("--repeat", type=int, default=2)
    args = ap.parse_args(argv)

    params = SynthParams(
        n_categories=args.categories,
        instances_per_category=args.instances,
        dim=args.dim,
        seed=args.seed,
        noise=0.02,
        tangle=0.2,
    )
    matrix, manifest = generate(params)
    normalized = preprocess(matrix, Metric.CORRELATION)
    specs = [ExclusionSpec(Cvt.parse("pw"), r, ContrastMode.NONE) for r in range(11)]
    print(f"dataset: {manifest.n_rows} rows x {args.dim} dims, {len(specs)} specs")

    backends = ["numpy"] + (["numba"] if HAVE_NUMBA else [])
    results = {}
    for backend in backends:
        if backend == "numba":  # warm the JIT outside the timed runs
            _run(normalized, manifest, specs[:1], backend, args.tile, args.workers)
        best, records = None, None
        for _ in range(args.repeat):
            dt, records = _run(normalized, manifest, specs, backend, args.tile, args.workers)
            best = dt if best is None else min(best, dt)
        results[backend] = (best, records)
        print(f"{backend:>6}: {best:8.3f} s  ({len(records)} records)")

    if len(results) == 2:
        a = results["numpy"][1]
        b = results["numba"][1]
        same = len(a) == len(b) and all(
            x.ref_row == y.ref_row
            and x.outcome == y.outcome
            and (x.top1 is None) == (y.top1 is None)
            and (x.top1 is None or (x.top1.row == y.top1.row and x.top1.score == y.top1.score))
            for x, y in zip(a, b)
        )
        print(f"bit-identical outputs: {same}")
        speedup = results["numpy"][0] / results["numba"][0]
        print(f"speedup numba/numpy: {speedup:.1f}x")
        return 0 if same else 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
