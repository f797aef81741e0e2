"""Batch feature extraction: image directory in, `.emb` + `.names` out.

Images must be named `<canonical view name>.<ext>`. Rows are written in
sorted canonical-name order, one per image, taken from the network's global
average pooling output (the classifier head is removed). Preprocessing is
the pretrained model's standard recipe: resize so the short side is
256/224 of the target size, center-crop, scale to [0,1], normalize with
the ImageNet channel statistics. Inference runs in eval mode under
no_grad, so output is deterministic for a given model and hardware.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from PIL import Image
from torch import nn
from torchvision import models, transforms

from .embfile import write_pair
from .naming import BadViewName, check_view_name

IMAGE_EXTENSIONS = {".png", ".jpg", ".jpeg", ".bmp"}

_MODELS = {
    "resnet18": (models.resnet18, "ResNet18_Weights", 512),
    "resnet34": (models.resnet34, "ResNet34_Weights", 512),
    "resnet50": (models.resnet50, "ResNet50_Weights", 2048),
}

_NORMALIZE = transforms.Normalize(
    mean=[0.485, 0.456, 0.406], std=[0.229, 0.224, 0.225]
)


@dataclass
class ExtractionConfig:
    images: Path
    out_base: Path
    model: str = "resnet50"
    # "pretrained" (torchvision IMAGENET1K_V1), "none" (seeded random init,
    # offline plumbing tests), or a path to a state_dict file
    weights: str = "pretrained"
    batch_size: int = 32
    image_size: int = 224
    seed: int = 0

    def __post_init__(self) -> None:
        self.images = Path(self.images)
        self.out_base = Path(self.out_base)
        if self.model not in _MODELS:
            raise ValueError(f"unknown model {self.model!r}: expected one of {sorted(_MODELS)}")
        if self.batch_size < 1:
            raise ValueError("batch size must be >= 1")
        if self.image_size < 16:
            raise ValueError("image size must be >= 16")


def scan_images(directory: Path) -> list[tuple[str, Path]]:
    """All image files keyed by their canonical view name, sorted by name.

    Fails fast with every offending filename listed.
    """
    entries: list[tuple[str, Path]] = []
    bad: list[str] = []
    for path in sorted(directory.iterdir()):
        if not path.is_file() or path.suffix.lower() not in IMAGE_EXTENSIONS:
            continue
        try:
            entries.append((check_view_name(path.stem), path))
        except BadViewName as e:
            bad.append(str(e))
    if bad:
        listing = "\n  ".join(bad)
        raise BadViewName(f"{len(bad)} unusable image filename(s):\n  {listing}")
    if not entries:
        raise FileNotFoundError(f"no images found under {directory}")
    entries.sort(key=lambda t: t[0])
    return entries


def build_model(config: ExtractionConfig) -> tuple[nn.Module, int]:
    ctor, weights_enum_name, dim = _MODELS[config.model]
    if config.weights == "pretrained":
        weights = getattr(models, weights_enum_name).IMAGENET1K_V1
        model = ctor(weights=weights)
    elif config.weights == "none":
        torch.manual_seed(config.seed)
        model = ctor(weights=None)
    else:
        model = ctor(weights=None)
        state = torch.load(config.weights, map_location="cpu", weights_only=True)
        model.load_state_dict(state)
    model.fc = nn.Identity()  # keep the global average pooling output
    model.eval()
    return model, dim


def build_transform(image_size: int) -> transforms.Compose:
    resize = max(image_size, round(image_size * 256 / 224))
    return transforms.Compose(
        [
            transforms.Resize(resize),
            transforms.CenterCrop(image_size),
            transforms.ToTensor(),
            _NORMALIZE,
        ]
    )


def extract(config: ExtractionConfig) -> tuple[Path, Path]:
    """Run the network over every image and write the embedding file pair."""
    entries = scan_images(config.images)
    model, dim = build_model(config)
    transform = build_transform(config.image_size)

    names = [name for name, _ in entries]
    rows = np.empty((len(entries), dim), dtype=np.float32)
    with torch.no_grad():
        for start in range(0, len(entries), config.batch_size):
            chunk = entries[start : start + config.batch_size]
            batch = torch.stack(
                [transform(Image.open(path).convert("RGB")) for _, path in chunk]
            )
            out = model(batch).cpu().numpy().astype(np.float32)
            rows[start : start + len(chunk)] = out

    bad = np.argwhere(~np.isfinite(rows))
    if bad.size:
        r, c = bad[0]
        raise ValueError(f"non-finite activation for {names[r]} (row {r}, column {c})")
    return write_pair(rows, names, config.out_base)
