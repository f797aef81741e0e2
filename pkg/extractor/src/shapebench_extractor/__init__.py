"""Image-to-embedding bridge for the shapebench harness."""

__version__ = "0.1.0"

from .extract import ExtractionConfig, build_model, build_transform, extract, scan_images
from .embfile import write_pair
from .naming import BadViewName, check_view_name

__all__ = [
    "__version__",
    "ExtractionConfig",
    "extract",
    "scan_images",
    "build_model",
    "build_transform",
    "write_pair",
    "BadViewName",
    "check_view_name",
]
