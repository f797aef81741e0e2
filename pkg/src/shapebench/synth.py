"""Deterministic synthetic embedding grids with known structure, plus the
naive exhaustive matcher used as the correctness oracle.

Each object gets an anchor direction and five tangent directions. A view's
embedding walks the anchor along the tangents of its series proportionally
to its frame offset, optionally mixes in a partner object's anchor
(tangledness), shifts light-polarity copies along a fixed direction, and
adds per-view noise. Smoothly decaying within-object similarity and
controllable cross-object similarity make planted error curves predictable.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import DomainError
from .exclusion import ContrastMode, ExclusionSpec
from .matcher import MatchRecord, Outcome, Scored
from .store import EmbeddingMatrix, Metric, NormalizedMatrix, preprocess
from .views import Contrast, Cvt, Manifest, ObjectId, ViewId, N_FRAMES, ORIGIN_FRAME

# Pinned generator: seeds reproduce byte-identical datasets across releases.
_RNG = np.random.PCG64


@dataclass(frozen=True)
class SynthParams:
    n_categories: int = 2
    instances_per_category: int = 2
    dim: int = 64
    seed: int = 0
    step_scale: float = 0.05  # manifold displacement per frame step
    noise: float = 0.0  # per-view isotropic noise
    tangle: float = 0.0  # fraction of the partner object's anchor mixed in
    contrasts: int = 1
    contrast_shift: float = 0.0  # displacement applied to light copies
    twin_pairs: int = 0  # object pairs (2k, 2k+1) sharing anchor and tangents

    def __post_init__(self) -> None:
        if self.n_categories < 1 or self.instances_per_category < 1:
            raise DomainError("need at least one category and one instance")
        if self.dim < 8:
            raise DomainError(f"dim must be >= 8, got {self.dim}")
        if min(self.step_scale, self.noise, self.contrast_shift) < 0:
            raise DomainError("step_scale, noise and contrast_shift must be >= 0")
        if not 0.0 <= self.tangle <= 1.0:
            raise DomainError(f"tangle must be in [0, 1], got {self.tangle}")
        if self.contrasts not in (1, 2):
            raise DomainError(f"contrasts must be 1 or 2, got {self.contrasts}")
        if self.twin_pairs * 2 > self.n_objects:
            raise DomainError("not enough objects for the requested twin pairs")

    @property
    def n_objects(self) -> int:
        return self.n_categories * self.instances_per_category

    @property
    def n_rows(self) -> int:
        return self.n_objects * 31 * N_FRAMES * self.contrasts


def generate(params: SynthParams) -> tuple[EmbeddingMatrix, Manifest]:
    """Full-grid manifest plus embeddings; byte-identical for a given seed."""
    objects = [
        ObjectId(f"cat{c:02d}", i)
        for c in range(params.n_categories)
        for i in range(params.instances_per_category)
    ]
    contrasts = [Contrast.DARK] if params.contrasts == 1 else [Contrast.DARK, Contrast.LIGHT]
    views = [
        ViewId(obj, Cvt(mask), frame, contrast)
        for obj, mask, frame, contrast in product(
            objects, range(1, 32), range(N_FRAMES), contrasts
        )
    ]
    views.sort(key=lambda v: v.name)
    manifest = Manifest.from_views(views)

    n_obj = len(objects)
    rng = np.random.Generator(_RNG(params.seed))
    raw = rng.standard_normal((params.dim, n_obj))
    if n_obj <= params.dim:
        q, _ = np.linalg.qr(raw)
        anchors = np.ascontiguousarray(q[:, :n_obj].T)
    else:
        anchors = raw.T / np.sqrt((raw.T**2).sum(axis=1, keepdims=True))
    tangents = rng.standard_normal((n_obj, 5, params.dim))
    tangents /= np.sqrt((tangents**2).sum(axis=2, keepdims=True))
    contrast_dir = rng.standard_normal(params.dim)
    contrast_dir /= np.sqrt((contrast_dir**2).sum())

    for k in range(params.twin_pairs):
        anchors[2 * k + 1] = anchors[2 * k]
        tangents[2 * k + 1] = tangents[2 * k]

    # Tangent sums per series, summed in canonical dimension order.
    tsum = np.zeros((n_obj, 31, params.dim))
    for mask in range(1, 32):
        for d in range(5):
            if mask & (1 << d):
                tsum[:, mask - 1] += tangents[:, d]

    obj_pos = {o: i for i, o in enumerate(objects)}
    n = len(views)
    rows = np.empty((n, params.dim))
    for r, v in enumerate(views):
        o = obj_pos[v.object]
        partner = o ^ 1 if (o ^ 1) < n_obj else o
        vec = anchors[o] + (v.frame - ORIGIN_FRAME) * params.step_scale * tsum[o, v.cvt.mask - 1]
        if params.tangle > 0:
            vec = vec + params.tangle * anchors[partner]
        if v.contrast is Contrast.LIGHT and params.contrast_shift > 0:
            vec = vec + params.contrast_shift * contrast_dir
        if params.noise > 0:
            vec = vec + params.noise * rng.standard_normal(params.dim)
        norm = np.sqrt((vec**2).sum())
        if norm > 0:
            vec = vec / norm
        rows[r] = vec

    matrix = EmbeddingMatrix(data=rows.astype(np.float32), manifest=manifest)
    return matrix, manifest


def _score_row(data: np.ndarray, bt: np.ndarray, i: int, sqdiff: bool) -> np.ndarray:
    """Similarities of row i to every row, canonical accumulation order."""
    a = data[i].astype(np.float64)
    s = np.zeros(bt.shape[1])
    if sqdiff:
        for k in range(bt.shape[0]):
            d = a[k] - bt[k]
            s += d * d
        return -np.sqrt(s)
    for k in range(bt.shape[0]):
        s += a[k] * bt[k]
    return s


def _best_of(sims: np.ndarray, idx: np.ndarray) -> tuple[int, float] | None:
    if idx.size == 0:
        return None
    t = int(np.argmax(sims[idx]))  # first maximum: lowest row wins ties
    return int(idx[t]), float(sims[idx[t]])


def oracle_match_grid(
    embeddings: EmbeddingMatrix | NormalizedMatrix,
    manifest: Manifest,
    specs: list[ExclusionSpec],
    metric: Metric = Metric.CORRELATION,
) -> list[MatchRecord]:
    """Naive reference matcher: for every qualified reference, classify every
    candidate by direct rule application and take maxima with the standard
    tie-break. Shares nothing with the aggregate-table engine except the
    canonical score definition. Quadratic; keep datasets modest."""
    if isinstance(embeddings, NormalizedMatrix):
        if embeddings.metric is not metric:
            raise DomainError("normalized matrix metric does not match request")
        normalized = embeddings
    else:
        normalized = preprocess(embeddings, metric)
    data = normalized.data
    bt = data.T.astype(np.float64, order="C")
    sqdiff = metric is Metric.NEG_EUCLIDEAN

    obj = manifest.obj_idx
    cat = manifest.cat_idx
    cvt = manifest.cvt_idx
    frame = manifest.frame
    pol = manifest.polarity
    views = manifest.views

    if any(s.mode is not ContrastMode.NONE for s in specs) and not manifest.has_light:
        raise DomainError("contrast mode hard/soft requires light-polarity views in the manifest")

    superset_masks = {
        spec.dims.mask: (np.arange(1, 32) & spec.dims.mask) == spec.dims.mask for spec in specs
    }
    modes = sorted({s.mode for s in specs}, key=lambda m: m.value)

    per_spec: list[list[MatchRecord]] = [[] for _ in specs]
    dark_rows = np.nonzero(pol == 0)[0]
    for i in dark_rows:
        i = int(i)
        applicable = [
            (si, s)
            for si, s in enumerate(specs)
            if s.radius is None or superset_masks[s.dims.mask][cvt[i]]
        ]
        if not applicable:
            continue
        sims = _score_row(data, bt, i, sqdiff)
        so_idx = np.nonzero(obj == obj[i])[0]

        distractors: dict[ContrastMode, tuple] = {}
        for mode in modes:
            dmask = (obj != obj[i]) & (pol == mode.distractor_polarity)
            same_cat = _best_of(sims, np.nonzero(dmask & (cat == cat[i]))[0])
            other_cat = _best_of(sims, np.nonzero(dmask & (cat != cat[i]))[0])
            distractors[mode] = (same_cat, other_cat)

        for si, spec in applicable:
            want_pol = spec.mode.pmc_polarity
            if spec.radius is None:
                sel = so_idx[pol[so_idx] == want_pol]
                if spec.mode is ContrastMode.NONE:
                    sel = sel[sel != i]
            else:
                keep = (
                    superset_masks[spec.dims.mask][cvt[so_idx]]
                    & (np.abs(frame[so_idx] - frame[i]) > spec.radius)
                    & (pol[so_idx] == want_pol)
                )
                sel = so_idx[keep]
            pmc = _best_of(sims, sel)
            if pmc is None:
                per_spec[si].append(
                    MatchRecord(views[i], i, spec, Outcome.SKIPPED, None, None)
                )
                continue
            same_cat, other_cat = distractors[spec.mode]
            row, score, outcome = pmc[0], pmc[1], Outcome.CORRECT
            for cand, kind in ((same_cat, Outcome.CATEGORY_CORRECT), (other_cat, Outcome.INCORRECT)):
                if cand is None:
                    continue
                if cand[1] > score or (cand[1] == score and cand[0] < row):
                    row, score, outcome = cand[0], cand[1], kind
            per_spec[si].append(
                MatchRecord(
                    reference=views[i],
                    ref_row=i,
                    spec=spec,
                    outcome=outcome,
                    top1=Scored(views[row], row, score),
                    best_pmc=Scored(views[pmc[0]], pmc[0], pmc[1]),
                )
            )

    out: list[MatchRecord] = []
    for recs in per_spec:
        out.extend(recs)
    return out


def oracle_match(
    embeddings: EmbeddingMatrix | NormalizedMatrix,
    manifest: Manifest,
    spec: ExclusionSpec,
    metric: Metric = Metric.CORRELATION,
) -> list[MatchRecord]:
    """Single-spec form of the oracle."""
    return oracle_match_grid(embeddings, manifest, [spec], metric)
