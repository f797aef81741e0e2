"""Binary embedding file format, ingestion, and metric preprocessing.

File layout (little-endian throughout):

    bytes 0..7    magic ASCII "SHPYEMB1"
    bytes 8..11   version, u32 (= 1)
    bytes 12..15  dtype code, u32 (= 0: IEEE-754 float32)
    bytes 16..23  n_rows, u64
    bytes 24..31  dim, u64
    bytes 32..    n_rows * dim float32 values, row-major

The names sidecar (`.names`) is newline-separated canonical view names,
one per row, no header and no blank lines.

Similarity scores are defined with a fixed accumulation order: values are
widened to float64 and summed sequentially over the dim axis. Every scoring
path in the package (kernels, oracle, the scalar helper here) reproduces
this order exactly so results are bit-identical across engines.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import FormatError
from .views import Manifest, validate_manifest

MAGIC = b"SHPYEMB1"
VERSION = 1
DTYPE_F32LE = 0
_HEADER = struct.Struct("<8sIIQQ")
HEADER_SIZE = _HEADER.size  # 32


class Metric(str, Enum):
    """Similarity metric. Correlation is the default: Pearson correlation,
    computed as cosine of mean-centered rows."""

    CORRELATION = "correlation"
    COSINE = "cosine"
    NEG_EUCLIDEAN = "negeuclidean"


DEFAULT_METRIC = Metric.CORRELATION


@dataclass
class EmbeddingMatrix:
    """n_rows x dim float32 matrix, row order bound to a manifest."""

    data: np.ndarray
    manifest: Manifest | None = None

    def __post_init__(self) -> None:
        if self.data.ndim != 2:
            raise FormatError(f"embedding matrix must be 2-D, got shape {self.data.shape}")
        if self.data.shape[1] < 1:
            raise FormatError("embedding dimension must be >= 1")
        if self.data.dtype != np.float32:
            self.data = self.data.astype(np.float32)
        if self.manifest is not None and len(self.manifest) != self.data.shape[0]:
            raise FormatError(
                f"row/name count mismatch: {self.data.shape[0]} rows vs "
                f"{len(self.manifest)} names"
            )

    @property
    def n_rows(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]


@dataclass
class NormalizedMatrix:
    """Metric-preprocessed matrix: for correlation/cosine, similarity of two
    rows reduces to their inner product. Degenerate rows (zero variance or
    zero norm) are mapped to the zero vector and listed in degenerate_rows.
    """

    data: np.ndarray
    metric: Metric
    degenerate_rows: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    manifest: Manifest | None = None

    @property
    def n_rows(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]


def write_embeddings(matrix: EmbeddingMatrix, manifest: Manifest, emb_path, names_path) -> None:
    """Write the binary matrix and its names sidecar.

    Rejects non-finite values before touching the filesystem.
    """
    data = np.ascontiguousarray(matrix.data, dtype="<f4")
    if data.shape[0] != len(manifest):
        raise FormatError(
            f"row/name count mismatch: {data.shape[0]} rows vs {len(manifest)} names"
        )
    bad = np.argwhere(~np.isfinite(data))
    if bad.size:
        r, c = bad[0]
        raise FormatError(f"non-finite value at row {r}, column {c}; nothing written")
    header = _HEADER.pack(MAGIC, VERSION, DTYPE_F32LE, data.shape[0], data.shape[1])
    Path(emb_path).write_bytes(header + data.tobytes())
    text = "".join(v.name + "\n" for v in manifest.views)
    Path(names_path).write_bytes(text.encode("utf-8"))


def _read_name_lines(names_path) -> list[str]:
    raw = Path(names_path).read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise FormatError(f"{names_path}: not valid UTF-8 at byte {e.start}") from None
    if text == "":
        lines: list[str] = []
    else:
        lines = text.split("\n")
        if lines[-1] == "":
            lines.pop()  # single trailing newline is canonical
    for i, line in enumerate(lines):
        if line == "":
            raise FormatError(f"{names_path}: blank line at row {i}")
    return lines


def read_names(names_path, partial: bool = False) -> Manifest:
    """Read and validate a `.names` sidecar into a Manifest."""
    return validate_manifest(_read_name_lines(names_path), partial=partial)


def read_embeddings(
    emb_path, names_path, partial: bool = False
) -> tuple[EmbeddingMatrix, Manifest]:
    """Load and validate an embedding file with its names sidecar."""
    raw = Path(emb_path).read_bytes()
    if len(raw) < HEADER_SIZE:
        raise FormatError(
            f"{emb_path}: truncated header at byte offset {len(raw)}: "
            f"need {HEADER_SIZE} bytes, found {len(raw)}"
        )
    magic, version, dtype_code, n_rows, dim = _HEADER.unpack_from(raw, 0)
    if magic != MAGIC:
        raise FormatError(f"{emb_path}: bad magic at byte offset 0: {magic!r} != {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"{emb_path}: unsupported version {version} at byte offset 8")
    if dtype_code != DTYPE_F32LE:
        raise FormatError(f"{emb_path}: unsupported dtype code {dtype_code} at byte offset 12")
    if dim < 1:
        raise FormatError(f"{emb_path}: dimension must be >= 1, got {dim} at byte offset 24")
    expected = n_rows * dim * 4
    actual = len(raw) - HEADER_SIZE
    if actual != expected:
        raise FormatError(
            f"{emb_path}: payload size mismatch at byte offset {HEADER_SIZE}: "
            f"header implies {expected} bytes, found {actual}"
        )
    data = np.frombuffer(raw, dtype="<f4", offset=HEADER_SIZE).reshape(n_rows, dim).copy()
    bad = np.argwhere(~np.isfinite(data))
    if bad.size:
        r, c = bad[0]
        raise FormatError(f"{emb_path}: non-finite value at row {r}, column {c}")

    lines = _read_name_lines(names_path)
    if len(lines) != n_rows:
        raise FormatError(
            f"row/name count mismatch: {emb_path} has {n_rows} rows, "
            f"{names_path} has {len(lines)} names"
        )
    manifest = validate_manifest(lines, partial=partial)
    return EmbeddingMatrix(data=data, manifest=manifest), manifest


def preprocess(matrix: EmbeddingMatrix, metric: Metric = DEFAULT_METRIC) -> NormalizedMatrix:
    """Transform rows so the configured metric reduces to a simple kernel.

    Correlation: mean-center each row, then L2-normalize. Cosine:
    L2-normalize. NegEuclidean: rows unchanged. Degenerate rows map to the
    zero vector (similarity 0 to everything) rather than propagating NaN.
    """
    x = matrix.data.astype(np.float64)
    if metric is Metric.NEG_EUCLIDEAN:
        return NormalizedMatrix(
            data=matrix.data.copy(), metric=metric, manifest=matrix.manifest
        )
    if metric is Metric.CORRELATION:
        x = x - x.mean(axis=1, keepdims=True)
    norms = np.sqrt((x * x).sum(axis=1))
    degenerate = np.nonzero(norms == 0.0)[0]
    safe = np.where(norms == 0.0, 1.0, norms)
    out = (x / safe[:, None]).astype(np.float32)
    out[degenerate] = 0.0
    return NormalizedMatrix(
        data=out, metric=metric, degenerate_rows=degenerate, manifest=matrix.manifest
    )


def seq_dot(a: np.ndarray, b: np.ndarray) -> float:
    """Inner product with the canonical accumulation order: float64,
    sequential over the dim axis."""
    acc = 0.0
    for x, y in zip(a.astype(np.float64), b.astype(np.float64)):
        acc += x * y
    return acc


def seq_sqdist(a: np.ndarray, b: np.ndarray) -> float:
    acc = 0.0
    for x, y in zip(a.astype(np.float64), b.astype(np.float64)):
        d = x - y
        acc += d * d
    return acc


def similarity(row_a: np.ndarray, row_b: np.ndarray, metric: Metric = DEFAULT_METRIC) -> float:
    """Similarity of two preprocessed rows; higher is more similar.

    Correlation/cosine land in [-1, 1]; negeuclidean in (-inf, 0].
    """
    if metric is Metric.NEG_EUCLIDEAN:
        return -float(np.sqrt(seq_sqdist(row_a, row_b)))
    return seq_dot(row_a, row_b)
