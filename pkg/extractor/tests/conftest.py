from pathlib import Path

import numpy as np
import pytest
from PIL import Image

DIMS = "xyprw"


def all_cvts():
    out = []
    for mask in range(1, 32):
        out.append("".join(DIMS[i] for i in range(5) if mask & (1 << i)))
    return out


def view_names(category="obj", instance=0, contrasts=("d",)):
    return [
        f"{category}.{instance:02d}.{cvt}.{frame:02d}.{c}"
        for cvt in all_cvts()
        for frame in range(11)
        for c in contrasts
    ]


def make_image(path: Path, seed: int, size=(48, 48)) -> None:
    rng = np.random.default_rng(seed)
    arr = rng.integers(0, 256, size=(size[1], size[0], 3), dtype=np.uint8)
    Image.fromarray(arr, "RGB").save(path)


@pytest.fixture(scope="session")
def grid_image_dir(tmp_path_factory):
    """Complete single-object grid: 341 small PNG images."""
    root = tmp_path_factory.mktemp("grid_images")
    for i, name in enumerate(view_names()):
        make_image(root / f"{name}.png", seed=i)
    return root


@pytest.fixture()
def few_images(tmp_path):
    names = ["ball.00.p.05.d", "ball.00.p.06.d", "ball.00.pw.00.d", "cube.01.x.10.l"]
    for i, name in enumerate(names):
        make_image(tmp_path / f"{name}.png", seed=100 + i)
    return tmp_path, sorted(names)
