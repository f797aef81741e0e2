"""Tiled similarity sweep kernels.

One pass over all (reference, candidate) pairs builds per-reference running
maxima bucketed by the candidate's relation to the reference:

  same object:      bucket = series_index * 22 + frame_distance * 2 + polarity
  different object: bucket = polarity * 2 + same_category

Scores use the canonical accumulation: float32 inputs widened to float64,
summed sequentially over the dim axis. Both backends perform the identical
operation sequence per pair, so their outputs are bit-for-bit equal, and a
pair's score does not depend on tile size or worker count. Ties on score
resolve to the lower candidate row everywhere.

The numba kernels are compiled lazily on first use; the numpy path is the
fallback selected via SHAPEBENCH_BACKEND=numpy.
"""

from __future__ import annotations

import numpy as np

from ._backend import HAVE_NUMBA

N_SO_BUCKETS = 31 * 11 * 2  # 682
N_D_BUCKETS = 4

# References are processed in blocks so a candidate tile stays cache-resident
# across the block; has no effect on results.
_REF_BLOCK = 16

_numba_kernel = None


def _build_numba_kernel():
    import numba

    @numba.njit(parallel=True, cache=True)
    def tile_update(data, bt, tile_start, ref_rows, obj, cat, cvt, frame, pol,
                    so_scores, so_rows, d_scores, d_rows, sqdiff):
        n_refs = ref_rows.shape[0]
        dim = data.shape[1]
        tn = bt.shape[1]
        n_blocks = (n_refs + _REF_BLOCK - 1) // _REF_BLOCK
        for b in numba.prange(n_blocks):
            lo = b * _REF_BLOCK
            hi = min(lo + _REF_BLOCK, n_refs)
            s = np.empty(tn, np.float64)
            for ri in range(lo, hi):
                i = ref_rows[ri]
                for j in range(tn):
                    s[j] = 0.0
                if sqdiff:
                    for k in range(dim):
                        aik = np.float64(data[i, k])
                        for j in range(tn):
                            d = aik - bt[k, j]
                            s[j] += d * d
                else:
                    for k in range(dim):
                        aik = np.float64(data[i, k])
                        for j in range(tn):
                            s[j] += aik * bt[k, j]
                oi = obj[i]
                ci = cat[i]
                fi = frame[i]
                for jt in range(tn):
                    j = tile_start + jt
                    if sqdiff:
                        sim = -np.sqrt(s[jt])
                    else:
                        sim = s[jt]
                    if obj[j] == oi:
                        df = frame[j] - fi
                        if df < 0:
                            df = -df
                        bkt = cvt[j] * 22 + df * 2 + pol[j]
                        cur = so_scores[ri, bkt]
                        if sim > cur or (sim == cur and j < so_rows[ri, bkt]):
                            so_scores[ri, bkt] = sim
                            so_rows[ri, bkt] = j
                    else:
                        g = pol[j] * 2 + (1 if cat[j] == ci else 0)
                        cur = d_scores[ri, g]
                        if sim > cur or (sim == cur and j < d_rows[ri, g]):
                            d_scores[ri, g] = sim
                            d_rows[ri, g] = j

    return tile_update


def tile_pass_numba(data, bt, tile_start, ref_rows, meta, agg_arrays, sqdiff):
    global _numba_kernel
    if _numba_kernel is None:
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is unavailable")
        _numba_kernel = _build_numba_kernel()
    obj, cat, cvt, frame, pol = meta
    so_scores, so_rows, d_scores, d_rows = agg_arrays
    _numba_kernel(data, bt, tile_start, ref_rows, obj, cat, cvt, frame, pol,
                  so_scores, so_rows, d_scores, d_rows, sqdiff)


def tile_pass_numpy(data, bt, tile_start, ref_rows, meta, agg_arrays, sqdiff):
    """Pure-numpy mirror of the numba kernel; same per-pair operation order."""
    obj, cat, cvt, frame, pol = meta
    so_scores, so_rows, d_scores, d_rows = agg_arrays
    dim = data.shape[1]
    tn = bt.shape[1]
    t_rows = np.arange(tile_start, tile_start + tn)
    obj_t = obj[t_rows]
    cat_t = cat[t_rows]
    cvt_t = cvt[t_rows]
    frame_t = frame[t_rows]
    pol_t = pol[t_rows]

    for lo in range(0, ref_rows.shape[0], 128):
        hi = min(lo + 128, ref_rows.shape[0])
        block = ref_rows[lo:hi]
        a = data[block].astype(np.float64)
        s = np.zeros((hi - lo, tn), np.float64)
        if sqdiff:
            for k in range(dim):
                d = a[:, k : k + 1] - bt[k]
                s += d * d
            sims_block = -np.sqrt(s)
        else:
            for k in range(dim):
                s += a[:, k : k + 1] * bt[k]
            sims_block = s

        for m in range(hi - lo):
            ri = lo + m
            i = block[m]
            sims = sims_block[m]
            same = obj_t == obj[i]

            # Same-object side: at most 682 rows per object, plain loop.
            for t in np.nonzero(same)[0]:
                j = tile_start + int(t)
                df = abs(int(frame_t[t]) - int(frame[i]))
                bkt = int(cvt_t[t]) * 22 + df * 2 + int(pol_t[t])
                sim = float(sims[t])
                cur = so_scores[ri, bkt]
                if sim > cur or (sim == cur and j < so_rows[ri, bkt]):
                    so_scores[ri, bkt] = sim
                    so_rows[ri, bkt] = j

            diff = ~same
            if not diff.any():
                continue
            grp = pol_t * 2 + (cat_t == cat[i])
            for g in range(N_D_BUCKETS):
                sel = np.nonzero(diff & (grp == g))[0]
                if sel.size == 0:
                    continue
                t = int(np.argmax(sims[sel]))  # first max: lowest row in tile
                sim = float(sims[sel[t]])
                j = tile_start + int(sel[t])
                cur = d_scores[ri, g]
                if sim > cur or (sim == cur and j < d_rows[ri, g]):
                    d_scores[ri, g] = sim
                    d_rows[ri, g] = j


def auto_tile_size(n_rows: int, dim: int, budget_bytes: int = 64 << 20) -> int:
    """Candidate tile width targeting a fixed per-worker working set
    (transposed float64 tile plus score buffers)."""
    tn = budget_bytes // (max(dim, 1) * 8 * 2)
    return int(max(16, min(n_rows, tn)))
