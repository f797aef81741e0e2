import os

# Allow worker-count sweeps (up to 8) on small CI boxes; must be set before
# numba is first imported.
os.environ.setdefault("NUMBA_NUM_THREADS", "16")

import pytest  # noqa: E402

import shapebench as sb  # noqa: E402


@pytest.fixture(scope="session")
def noisy_dataset():
    """Two-category, two-contrast dataset with enough tangledness to produce
    every outcome class."""
    params = sb.SynthParams(
        n_categories=2,
        instances_per_category=2,
        dim=64,
        seed=11,
        noise=0.1,
        tangle=0.4,
        contrasts=2,
        contrast_shift=0.6,
        step_scale=0.2,
    )
    matrix, manifest = sb.generate(params)
    return matrix, manifest


@pytest.fixture(scope="session")
def clean_dataset():
    """Error-free construction: orthogonal anchors, no noise, small steps."""
    params = sb.SynthParams(
        n_categories=2, instances_per_category=2, dim=64, seed=3, step_scale=0.05
    )
    return sb.generate(params)
