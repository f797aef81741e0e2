"""Exact masked nearest-neighbor evaluation.

A single tiled sweep over all pairwise similarities builds, for every
reference row, a table of per-bucket maxima (see _kernels). Every exclusion
spec is then answered from the tables without recomputing similarities: the
best positive match candidate is the max over the buckets the spec admits,
and the best distractors are radius-independent. Results are bit-identical
to a naive per-pair evaluation and independent of tile size and worker
count; parallelism is over disjoint reference ranges only.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels
from ._backend import default_workers, resolve_backend, set_worker_count
from .errors import DomainError
from .exclusion import ContrastMode, ExclusionSpec
from .store import Metric, NormalizedMatrix
from .views import Manifest, ViewId


class Outcome(str, Enum):
    CORRECT = "correct"
    CATEGORY_CORRECT = "category_correct"
    INCORRECT = "incorrect"
    SKIPPED = "skipped"


class Scored(NamedTuple):
    view: ViewId
    row: int
    score: float


@dataclass
class MatchRecord:
    reference: ViewId
    ref_row: int
    spec: ExclusionSpec
    outcome: Outcome
    top1: Scored | None  # None iff outcome is SKIPPED
    best_pmc: Scored | None


@dataclass
class Aggregates:
    """Per-reference bucket maxima for a whole sweep.

    so_scores/so_rows: (n_refs, 682) best same-object candidate per
    (series, frame distance, polarity) bucket. d_scores/d_rows:
    (n_refs, 4) best distractor per (polarity, same-category) group.
    Scores are -inf and rows -1 where a bucket is unpopulated.
    """

    ref_rows: np.ndarray
    pos_of_row: dict[int, int]
    so_scores: np.ndarray
    so_rows: np.ndarray
    d_scores: np.ndarray
    d_rows: np.ndarray
    manifest: Manifest
    metric: Metric

    def reference(self, row: int) -> "ReferenceAggregate":
        return ReferenceAggregate(self, row, self.pos_of_row[row])


@dataclass
class ReferenceAggregate:
    """One reference row's view of the aggregate tables."""

    aggregates: Aggregates
    ref_row: int
    pos: int

    @property
    def so_scores(self) -> np.ndarray:
        return self.aggregates.so_scores[self.pos]

    @property
    def so_rows(self) -> np.ndarray:
        return self.aggregates.so_rows[self.pos]

    def best_same_object(self, cvt_idx: int, distance: int, polarity: int) -> tuple[int, float]:
        b = cvt_idx * 22 + distance * 2 + polarity
        return int(self.so_rows[b]), float(self.so_scores[b])

    def best_distractor(self, polarity: int, same_category: bool) -> tuple[int, float]:
        g = polarity * 2 + int(same_category)
        return (
            int(self.aggregates.d_rows[self.pos, g]),
            float(self.aggregates.d_scores[self.pos, g]),
        )


def new_aggregates(ref_rows: np.ndarray, manifest: Manifest, metric: Metric) -> Aggregates:
    n = ref_rows.shape[0]
    return Aggregates(
        ref_rows=ref_rows,
        pos_of_row={int(r): i for i, r in enumerate(ref_rows)},
        so_scores=np.full((n, _kernels.N_SO_BUCKETS), -np.inf),
        so_rows=np.full((n, _kernels.N_SO_BUCKETS), -1, dtype=np.int64),
        d_scores=np.full((n, _kernels.N_D_BUCKETS), -np.inf),
        d_rows=np.full((n, _kernels.N_D_BUCKETS), -1, dtype=np.int64),
        manifest=manifest,
        metric=metric,
    )


def similarity_row_pass(
    normalized: NormalizedMatrix,
    manifest: Manifest,
    agg: Aggregates,
    cand_start: int,
    cand_stop: int,
    backend: str | None = None,
) -> Aggregates:
    """Fold one contiguous candidate row range into the running maxima.

    Merging is associative: visiting ranges in any order yields the same
    tables, because updates compare (score desc, row asc).
    """
    data = normalized.data
    bt = data[cand_start:cand_stop].T.astype(np.float64, order="C")
    meta = (manifest.obj_idx, manifest.cat_idx, manifest.cvt_idx,
            manifest.frame, manifest.polarity)
    arrays = (agg.so_scores, agg.so_rows, agg.d_scores, agg.d_rows)
    sqdiff = normalized.metric is Metric.NEG_EUCLIDEAN
    impl = resolve_backend(backend)
    if impl == "numba":
        _kernels.tile_pass_numba(data, bt, cand_start, agg.ref_rows, meta, arrays, sqdiff)
    else:
        _kernels.tile_pass_numpy(data, bt, cand_start, agg.ref_rows, meta, arrays, sqdiff)
    return agg


def build_aggregates(
    normalized: NormalizedMatrix,
    manifest: Manifest,
    ref_rows: np.ndarray,
    *,
    tile_size: int = 0,
    workers: int = 0,
    backend: str | None = None,
) -> Aggregates:
    """Run the full sweep for the given reference rows."""
    n = normalized.n_rows
    if len(manifest) != n:
        raise DomainError(f"manifest has {len(manifest)} rows, matrix has {n}")
    if workers == 0:
        workers = default_workers()
    set_worker_count(workers)
    tile = tile_size if tile_size > 0 else _kernels.auto_tile_size(n, normalized.dim)
    agg = new_aggregates(np.asarray(ref_rows, dtype=np.int64), manifest, normalized.metric)
    for start in range(0, n, tile):
        similarity_row_pass(normalized, manifest, agg, start, min(start + tile, n), backend)
    return agg


@lru_cache(maxsize=4096)
def _pmc_columns(dims_mask: int, radius: int | None, polarity: int) -> np.ndarray:
    """Bucket columns a spec admits as positive match candidates."""
    cols = []
    for cvt in range(31):
        if radius is not None and (cvt + 1) & dims_mask != dims_mask:
            continue
        lo = 0 if radius is None else radius + 1
        for dist in range(lo, 11):
            cols.append(cvt * 22 + dist * 2 + polarity)
    return np.asarray(cols, dtype=np.int64)


_ROW_SENTINEL = np.iinfo(np.int64).max


def _winner(top_score, top_row, top_kind, score, row, kind):
    if score > top_score or (score == top_score and row < top_row):
        return score, row, kind
    return top_score, top_row, top_kind


def outcome_of(
    ref_agg: ReferenceAggregate, spec: ExclusionSpec
) -> tuple[Scored | None, Scored | None, Outcome]:
    """Answer one spec for one reference from its aggregate tables.

    Returns (top1, best_pmc, outcome); top1 is None only when the PMC set
    is empty (outcome SKIPPED).
    """
    manifest = ref_agg.aggregates.manifest
    cols = _pmc_columns(spec.dims.mask, spec.radius, spec.mode.pmc_polarity)
    vals = ref_agg.so_scores[cols]
    rows = ref_agg.so_rows[cols]
    if spec.radius is None and spec.mode is ContrastMode.NONE:
        # The self bucket (own series, distance 0, dark) holds exactly the
        # reference row; it never competes.
        vals = np.where(rows == ref_agg.ref_row, -np.inf, vals)
    pmc_score = float(vals.max()) if cols.size else -np.inf
    if pmc_score == -np.inf:
        return None, None, Outcome.SKIPPED
    pmc_row = int(np.where(vals == pmc_score, rows, _ROW_SENTINEL).min())
    best_pmc = Scored(manifest.views[pmc_row], pmc_row, pmc_score)

    dpol = spec.mode.distractor_polarity
    sc_row, sc_score = ref_agg.best_distractor(dpol, same_category=True)
    oc_row, oc_score = ref_agg.best_distractor(dpol, same_category=False)

    score, row, kind = pmc_score, pmc_row, Outcome.CORRECT
    score, row, kind = _winner(score, row, kind, sc_score, sc_row, Outcome.CATEGORY_CORRECT)
    score, row, kind = _winner(score, row, kind, oc_score, oc_row, Outcome.INCORRECT)
    top1 = Scored(manifest.views[row], row, score)
    return top1, best_pmc, kind


def reference_rows_for_spec(manifest: Manifest, spec: ExclusionSpec) -> np.ndarray:
    """Rows qualified as references for a spec, ascending."""
    mask = manifest.polarity == 0
    if spec.radius is not None:
        dims_mask = spec.dims.mask
        mask &= (manifest.cvt_idx + 1) & dims_mask == dims_mask
    return np.nonzero(mask)[0].astype(np.int64)


def reference_union(manifest: Manifest, specs: Sequence[ExclusionSpec]) -> np.ndarray:
    mask = np.zeros(len(manifest), dtype=bool)
    for spec in specs:
        mask[reference_rows_for_spec(manifest, spec)] = True
    return np.nonzero(mask)[0].astype(np.int64)


def match_all(
    normalized: NormalizedMatrix,
    manifest: Manifest,
    specs: Sequence[ExclusionSpec],
    metric: Metric | None = None,
    *,
    tile_size: int = 0,
    workers: int = 0,
    backend: str | None = None,
) -> list[MatchRecord]:
    """One MatchRecord per (spec, qualified reference), in spec order then
    reference row order. Deterministic byte-for-byte across repeated runs,
    worker counts, and tile sizes."""
    specs = list(specs)
    if not specs:
        raise DomainError("no exclusion specs given")
    if metric is None:
        metric = normalized.metric
    if metric is not normalized.metric:
        raise DomainError(
            f"matrix preprocessed for {normalized.metric.value}, requested {metric.value}"
        )
    if any(s.mode is not ContrastMode.NONE for s in specs) and not manifest.has_light:
        raise DomainError("contrast mode hard/soft requires light-polarity views in the manifest")

    union = reference_union(manifest, specs)
    agg = build_aggregates(
        normalized, manifest, union, tile_size=tile_size, workers=workers, backend=backend
    )

    records: list[MatchRecord] = []
    for spec in specs:
        rows = reference_rows_for_spec(manifest, spec)
        records.extend(_apply_spec(agg, spec, rows))
    return records


def _apply_spec(agg: Aggregates, spec: ExclusionSpec, rows: np.ndarray) -> list[MatchRecord]:
    """Vectorized outcome_of over all qualified references of one spec."""
    manifest = agg.manifest
    if rows.size == 0:
        return []
    pos = np.asarray([agg.pos_of_row[int(r)] for r in rows], dtype=np.int64)
    cols = _pmc_columns(spec.dims.mask, spec.radius, spec.mode.pmc_polarity)
    if cols.size == 0:
        return [
            MatchRecord(manifest.views[int(r)], int(r), spec, Outcome.SKIPPED, None, None)
            for r in rows
        ]

    vals = agg.so_scores[pos][:, cols]
    vrows = agg.so_rows[pos][:, cols]
    if spec.radius is None and spec.mode is ContrastMode.NONE:
        vals = np.where(vrows == rows[:, None], -np.inf, vals)
    pmc_score = vals.max(axis=1) if cols.size else np.full(rows.shape, -np.inf)
    has_pmc = pmc_score > -np.inf
    pmc_row = np.where(vals == pmc_score[:, None], vrows, _ROW_SENTINEL).min(axis=1)

    dpol = spec.mode.distractor_polarity
    sc_score = agg.d_scores[pos, dpol * 2 + 1]
    sc_row = agg.d_rows[pos, dpol * 2 + 1]
    oc_score = agg.d_scores[pos, dpol * 2 + 0]
    oc_row = agg.d_rows[pos, dpol * 2 + 0]

    top_score = pmc_score.copy()
    top_row = pmc_row.copy()
    top_kind = np.zeros(rows.shape, dtype=np.int8)  # 0 correct, 1 category, 2 incorrect
    for kind, ds, dr in ((1, sc_score, sc_row), (2, oc_score, oc_row)):
        better = (ds > top_score) | ((ds == top_score) & (dr < top_row))
        top_score = np.where(better, ds, top_score)
        top_row = np.where(better, dr, top_row)
        top_kind = np.where(better, kind, top_kind)

    kind_to_outcome = (Outcome.CORRECT, Outcome.CATEGORY_CORRECT, Outcome.INCORRECT)
    views = manifest.views
    out: list[MatchRecord] = []
    for i in range(rows.shape[0]):
        r = int(rows[i])
        if not has_pmc[i]:
            out.append(MatchRecord(views[r], r, spec, Outcome.SKIPPED, None, None))
            continue
        pr = int(pmc_row[i])
        tr = int(top_row[i])
        out.append(
            MatchRecord(
                reference=views[r],
                ref_row=r,
                spec=spec,
                outcome=kind_to_outcome[top_kind[i]],
                top1=Scored(views[tr], tr, float(top_score[i])),
                best_pmc=Scored(views[pr], pr, float(pmc_score[i])),
            )
        )
    return out
