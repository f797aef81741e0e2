"""Exclusion semantics: which views qualify as references, positive match
candidates (PMCs), or distractors under an exclusion spec.

An exclusion spec names a set of transformation dimensions E, a radius
(or the no-exclusion sentinel), and a contrast mode. With a numeric radius
r, a same-object candidate survives only if it comes from a series whose
dimension set contains E and sits more than r frame steps from the
reference, so any surviving match bridges at least r+1 steps along every
dimension of E. Views of other objects are never subject to the viewpoint
exclusion. Contrast modes force candidate polarity: hard flips only the
same-object candidates to light, soft flips distractors too.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, FormatError
from .views import Contrast, Cvt, Manifest, ViewId


class ContrastMode(str, Enum):
    NONE = "none"
    HARD = "hard"
    SOFT = "soft"

    @property
    def pmc_polarity(self) -> int:
        """Required polarity of same-object candidates (0 dark, 1 light)."""
        return 0 if self is ContrastMode.NONE else 1

    @property
    def distractor_polarity(self) -> int:
        return 1 if self is ContrastMode.SOFT else 0


class CandidateClass(Enum):
    SELF_VIEW = "self_view"
    EXCLUDED_PMC = "excluded_pmc"
    PMC = "pmc"
    SAME_CATEGORY_DISTRACTOR = "same_category_distractor"
    OTHER_CATEGORY_DISTRACTOR = "other_category_distractor"
    CONTRAST_EXCLUDED = "contrast_excluded"


@dataclass(frozen=True)
class ExclusionSpec:
    """dims: the enforced dimension set E; radius: None means no exclusion
    (the first x-axis point of a contrast sweep), else 0..10."""

    dims: Cvt
    radius: int | None
    mode: ContrastMode = ContrastMode.NONE

    def __post_init__(self) -> None:
        if self.radius is not None and not 0 <= self.radius <= 10:
            raise DomainError(f"exclusion radius out of range 0..10: {self.radius}")

    @property
    def radius_label(self) -> str:
        return "none" if self.radius is None else str(self.radius)

    def __str__(self) -> str:
        return f"{self.dims}:{self.radius_label}:{self.mode.value}"

    @classmethod
    def parse(cls, text: str) -> "ExclusionSpec":
        """Parse the textual form `<dims>:<radius|none>:<none|hard|soft>`."""
        parts = text.split(":")
        if len(parts) != 3:
            raise FormatError(f"expected <dims>:<radius|none>:<mode>, got {text!r}")
        dims_s, radius_s, mode_s = parts
        dims = Cvt.parse(dims_s)
        radius = None if radius_s == "none" else _parse_radius(radius_s, text)
        try:
            mode = ContrastMode(mode_s)
        except ValueError:
            raise FormatError(f"unknown contrast mode {mode_s!r} in {text!r}") from None
        return cls(dims, radius, mode)


def _parse_radius(s: str, context: str) -> int:
    try:
        r = int(s)
    except ValueError:
        raise FormatError(f"bad radius {s!r} in {context!r}") from None
    if not 0 <= r <= 10:
        raise FormatError(f"radius out of range 0..10 in {context!r}")
    return r


def is_reference(view: ViewId, spec: ExclusionSpec) -> bool:
    """References are dark renderings; under a numeric radius they must sit
    in a series containing the exclusion dimensions, otherwise frame
    distance could not bound displacement along them."""
    if view.contrast is not Contrast.DARK:
        return False
    return spec.radius is None or view.cvt.issuperset(spec.dims)


def classify(reference: ViewId, candidate: ViewId, spec: ExclusionSpec) -> CandidateClass:
    """Total classification of a candidate relative to a qualified reference."""
    if not is_reference(reference, spec):
        raise DomainError(f"view {reference.name} is not a qualified reference for {spec}")
    cand_pol = 0 if candidate.contrast is Contrast.DARK else 1

    if candidate.object == reference.object:
        if cand_pol != spec.mode.pmc_polarity:
            return CandidateClass.CONTRAST_EXCLUDED
        if candidate == reference:
            # Only reachable in mode none; the reference view never competes
            # against itself.
            return CandidateClass.SELF_VIEW
        if spec.radius is None:
            return CandidateClass.PMC
        if not candidate.cvt.issuperset(spec.dims):
            return CandidateClass.EXCLUDED_PMC
        if abs(candidate.frame - reference.frame) < spec.radius + 1:
            return CandidateClass.EXCLUDED_PMC
        return CandidateClass.PMC

    if cand_pol != spec.mode.distractor_polarity:
        return CandidateClass.CONTRAST_EXCLUDED
    if candidate.object.category == reference.object.category:
        return CandidateClass.SAME_CATEGORY_DISTRACTOR
    return CandidateClass.OTHER_CATEGORY_DISTRACTOR


def pmc_row_set(reference: ViewId, manifest: Manifest, spec: ExclusionSpec) -> set[int]:
    """Rows classified PMC for this reference; empty is a legal result.

    On a complete single-contrast grid with a numeric radius this has the
    closed-form size 2^(5-|E|) * |{j in 0..10 : |j - f| > r}|.
    """
    if not is_reference(reference, spec):
        raise DomainError(f"view {reference.name} is not a qualified reference for {spec}")
    ref_row = manifest.index.get(reference)
    same_obj = manifest.obj_idx == manifest.obj_idx[ref_row] if ref_row is not None else None
    if same_obj is None:
        # Reference not in the manifest: fall back to field comparison.
        same_obj = np.fromiter(
            (v.object == reference.object for v in manifest.views), bool, len(manifest)
        )
    mask = same_obj & (manifest.polarity == spec.mode.pmc_polarity)
    if spec.radius is None:
        if spec.mode is ContrastMode.NONE and ref_row is not None:
            mask[ref_row] = False
    else:
        dims_mask = spec.dims.mask
        superset = (manifest.cvt_idx + 1) & dims_mask == dims_mask
        dist = np.abs(manifest.frame - reference.frame)
        mask &= superset & (dist > spec.radius)
    return set(np.nonzero(mask)[0].tolist())
