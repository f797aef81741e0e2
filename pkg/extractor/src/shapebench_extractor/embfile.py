"""Writer for the harness's embedding file pair.

`.emb`: magic "SHPYEMB1", u32 version 1, u32 dtype 0 (float32 LE), u64
n_rows, u64 dim, then the row-major float32 payload, all little-endian.
`.names`: one canonical view name per row, newline separated.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"SHPYEMB1"
_HEADER = struct.Struct("<8sIIQQ")


def write_pair(rows: np.ndarray, names: list[str], out_base: str | Path) -> tuple[Path, Path]:
    """Write `<out_base>.emb` and `<out_base>.names`; rejects non-finite rows."""
    data = np.ascontiguousarray(rows, dtype="<f4")
    if data.ndim != 2 or data.shape[0] != len(names):
        raise ValueError(f"need one name per row: {data.shape} vs {len(names)} names")
    bad = np.argwhere(~np.isfinite(data))
    if bad.size:
        r, c = bad[0]
        raise ValueError(f"non-finite activation at row {r}, column {c}")
    base = Path(out_base)
    emb_path = base.with_suffix(".emb")
    names_path = base.with_suffix(".names")
    header = _HEADER.pack(MAGIC, 1, 0, data.shape[0], data.shape[1])
    emb_path.write_bytes(header + data.tobytes())
    names_path.write_bytes("".join(n + "\n" for n in names).encode("utf-8"))
    return emb_path, names_path
