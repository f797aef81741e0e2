"""Shared test utilities: record comparison and a literal per-pair oracle."""

import numpy as np

import shapebench as sb
from shapebench.exclusion import CandidateClass
from shapebench.matcher import MatchRecord, Outcome, Scored


def record_key(r: MatchRecord):
    return (
        r.ref_row,
        str(r.spec),
        r.outcome.value,
        None if r.top1 is None else (r.top1.row, r.top1.score),
        None if r.best_pmc is None else (r.best_pmc.row, r.best_pmc.score),
    )


def assert_records_equal(a, b):
    """Exact equality: same order, outcomes, rows, and score bits."""
    assert len(a) == len(b)
    for x, y in zip(a, b):
        assert record_key(x) == record_key(y)


def scalar_oracle(normalized, manifest, spec):
    """The most literal evaluation possible: classify every candidate with
    the scalar rules and the scalar similarity helper. Only usable on tiny
    manifests."""
    records = []
    for i, ref in enumerate(manifest.views):
        if not sb.is_reference(ref, spec):
            continue
        best_pmc = None
        best_same = None
        best_other = None
        for j, cand in enumerate(manifest.views):
            cls = sb.classify(ref, cand, spec)
            if cls in (
                CandidateClass.SELF_VIEW,
                CandidateClass.EXCLUDED_PMC,
                CandidateClass.CONTRAST_EXCLUDED,
            ):
                continue
            score = sb.similarity(normalized.data[i], normalized.data[j], normalized.metric)
            entry = (j, score)
            if cls is CandidateClass.PMC:
                if best_pmc is None or score > best_pmc[1]:
                    best_pmc = entry
            elif cls is CandidateClass.SAME_CATEGORY_DISTRACTOR:
                if best_same is None or score > best_same[1]:
                    best_same = entry
            else:
                if best_other is None or score > best_other[1]:
                    best_other = entry
        if best_pmc is None:
            records.append(MatchRecord(ref, i, spec, Outcome.SKIPPED, None, None))
            continue
        row, score, outcome = best_pmc[0], best_pmc[1], Outcome.CORRECT
        for cand, kind in ((best_same, Outcome.CATEGORY_CORRECT), (best_other, Outcome.INCORRECT)):
            if cand is not None and (cand[1] > score or (cand[1] == score and cand[0] < row)):
                row, score, outcome = cand[0], cand[1], kind
        records.append(
            MatchRecord(
                ref, i, spec, outcome,
                Scored(manifest.views[row], row, score),
                Scored(manifest.views[best_pmc[0]], best_pmc[0], best_pmc[1]),
            )
        )
    return records


def random_partial_manifest(rng, n_views, categories=("ball", "cube"), instances=2):
    """Random sample of a grid, as a partial manifest."""
    pool = [
        sb.ViewId(sb.ObjectId(c, i), sb.Cvt(m), f, k)
        for c in categories
        for i in range(instances)
        for m in range(1, 32)
        for f in range(11)
        for k in (sb.Contrast.DARK, sb.Contrast.LIGHT)
    ]
    idx = rng.choice(len(pool), size=n_views, replace=False)
    views = [pool[int(t)] for t in sorted(idx)]
    return sb.Manifest.from_views(views, partial=True)
