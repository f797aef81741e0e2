"""shapebench: embedding-space shape recognition benchmark.

Exact nearest-neighbor view matching over a grid of rendered 3D views,
with parameterized viewpoint and contrast exclusions controlling task
difficulty. The package evaluates embedding files against a view manifest;
it never touches images.
"""

__version__ = "0.1.0"

from .errors import DomainError, FormatError, ShapebenchError
from .exclusion import CandidateClass, ContrastMode, ExclusionSpec, classify, is_reference, pmc_row_set
from .matcher import (
    Aggregates,
    MatchRecord,
    Outcome,
    ReferenceAggregate,
    Scored,
    build_aggregates,
    match_all,
    outcome_of,
    similarity_row_pass,
)
from .report import ErrorCurve, ErrorExemplar, emit_report, error_curves, read_report, top_errors
from .store import (
    EmbeddingMatrix,
    Metric,
    NormalizedMatrix,
    preprocess,
    read_embeddings,
    similarity,
    write_embeddings,
)
from .synth import SynthParams, generate, oracle_match, oracle_match_grid
from .views import (
    Contrast,
    Cvt,
    Manifest,
    ObjectId,
    StepSizes,
    ViewId,
    displacement,
    enumerate_cvts,
    parse_view_name,
    validate_manifest,
)

__all__ = [
    "__version__",
    "ShapebenchError", "FormatError", "DomainError",
    "Contrast", "Cvt", "ObjectId", "ViewId", "StepSizes", "Manifest",
    "parse_view_name", "enumerate_cvts", "displacement", "validate_manifest",
    "EmbeddingMatrix", "NormalizedMatrix", "Metric",
    "read_embeddings", "write_embeddings", "preprocess", "similarity",
    "ExclusionSpec", "ContrastMode", "CandidateClass",
    "is_reference", "classify", "pmc_row_set",
    "Aggregates", "ReferenceAggregate", "MatchRecord", "Outcome", "Scored",
    "match_all", "outcome_of", "build_aggregates", "similarity_row_pass",
    "ErrorCurve", "ErrorExemplar", "error_curves", "top_errors",
    "emit_report", "read_report",
    "SynthParams", "generate", "oracle_match", "oracle_match_grid",
]
