"""View-grid geometry: transformation dimensions, series enumeration, canonical
view naming, physical displacement, and manifest validation.

A dataset is a grid of rendered views. Each object contributes one 11-view
series per nonempty combination of the five rigid transformation dimensions
(x, y, pitch, roll, yaw), stepping away from a shared origin view (frame 5)
in both directions. Contrast-reversed copies double the grid when present.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import ManifestGridError, ManifestParseError, ViewNameError

# Canonical dimension order. x: horizontal shift, y: vertical shift,
# p: pitch, r: roll, w: yaw.
DIMS = "xyprw"
N_FRAMES = 11
ORIGIN_FRAME = 5

_DIM_BIT = {d: 1 << i for i, d in enumerate(DIMS)}
_CATEGORY_RE = re.compile(r"[a-z0-9_]+\Z")


class Contrast(str, Enum):
    DARK = "d"
    LIGHT = "l"


@dataclass(frozen=True, order=True)
class Cvt:
    """A nonempty subset of the five transformation dimensions.

    Stored as a 5-bit mask (1..31). The canonical string lists member
    dimensions in the order x < y < p < r < w, e.g. "xpw".
    """

    mask: int

    def __post_init__(self) -> None:
        if not 1 <= self.mask <= 31:
            raise ValueError(f"CVT mask out of range 1..31: {self.mask}")

    @classmethod
    def parse(cls, text: str) -> "Cvt":
        """Parse a canonical CVT string; rejects empty, unknown, repeated or
        non-canonically-ordered dimension characters."""
        if not text:
            raise ViewNameError("empty CVT string")
        mask = 0
        last = -1
        for ch in text:
            pos = DIMS.find(ch)
            if pos < 0:
                raise ViewNameError(f"unknown transformation dimension {ch!r} in CVT {text!r}")
            if pos <= last:
                raise ViewNameError(f"CVT {text!r} not in canonical dimension order {DIMS!r}")
            last = pos
            mask |= 1 << pos
        return cls(mask)

    @classmethod
    def from_dims(cls, dims: Iterable[str]) -> "Cvt":
        mask = 0
        for d in dims:
            try:
                mask |= _DIM_BIT[d]
            except KeyError:
                raise ViewNameError(f"unknown transformation dimension {d!r}") from None
        if mask == 0:
            raise ViewNameError("CVT must contain at least one dimension")
        return cls(mask)

    @property
    def dims(self) -> tuple[str, ...]:
        return tuple(d for d in DIMS if self.mask & _DIM_BIT[d])

    def __contains__(self, dim: str) -> bool:
        return bool(self.mask & _DIM_BIT.get(dim, 0))

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def issuperset(self, other: "Cvt") -> bool:
        return self.mask & other.mask == other.mask

    def __str__(self) -> str:
        return "".join(self.dims)

    def __repr__(self) -> str:
        return f"Cvt({str(self)!r})"


def enumerate_cvts() -> list[Cvt]:
    """All 31 series types, sorted by (cardinality, canonical string)."""
    cvts = [Cvt(m) for m in range(1, 32)]
    cvts.sort(key=lambda c: (len(c), str(c)))
    return cvts


def superset_cvts(dims: Cvt) -> list[Cvt]:
    """Series types whose dimension set contains `dims`; 2^(5-|dims|) of them."""
    return [c for c in enumerate_cvts() if c.issuperset(dims)]


@dataclass(frozen=True, order=True)
class ObjectId:
    category: str
    instance: int

    def __post_init__(self) -> None:
        if not _CATEGORY_RE.match(self.category):
            raise ViewNameError(f"bad category {self.category!r}: expected [a-z0-9_]+")
        if not 0 <= self.instance <= 99:
            raise ViewNameError(f"instance index out of range 00..99: {self.instance}")

    def __str__(self) -> str:
        return f"{self.category}.{self.instance:02d}"


@dataclass(frozen=True, order=True)
class ViewId:
    """Identity of one rendered view.

    frame is 0-based 0..10; frame 5 is the shared origin view of the object.
    """

    object: ObjectId
    cvt: Cvt
    frame: int
    contrast: Contrast

    def __post_init__(self) -> None:
        if not 0 <= self.frame < N_FRAMES:
            raise ViewNameError(f"frame out of range 00..10: {self.frame}")

    @property
    def name(self) -> str:
        return f"{self.object}.{self.cvt}.{self.frame:02d}.{self.contrast.value}"

    def __str__(self) -> str:
        return self.name


def parse_view_name(name: str) -> ViewId:
    """Parse a canonical view name `<category>.<instance>.<cvt>.<frame>.<d|l>`.

    Formatting the result reproduces `name` byte-for-byte; anything that
    would not round-trip is rejected.
    """
    parts = name.split(".")
    if len(parts) != 5:
        raise ViewNameError(f"expected 5 dot-separated segments, got {len(parts)}: {name!r}")
    cat, inst, cvt_s, frame_s, contrast_s = parts
    if not re.match(r"[0-9]{2}\Z", inst):
        raise ViewNameError(f"instance must be two digits, got {inst!r} in {name!r}")
    if not re.match(r"[0-9]{2}\Z", frame_s):
        raise ViewNameError(f"frame must be two digits, got {frame_s!r} in {name!r}")
    frame = int(frame_s)
    if frame >= N_FRAMES:
        raise ViewNameError(f"frame out of range 00..10: {frame_s!r} in {name!r}")
    try:
        contrast = Contrast(contrast_s)
    except ValueError:
        raise ViewNameError(f"unknown contrast code {contrast_s!r} in {name!r}") from None
    return ViewId(ObjectId(cat, int(inst)), Cvt.parse(cvt_s), frame, contrast)


@dataclass(frozen=True)
class StepSizes:
    """Physical magnitude of one viewpoint step, for reporting only.

    shift_step is a fraction of image width; rotation_step is degrees.
    """

    shift_step: float = 1.0 / 30.0
    rotation_step: float = 9.0

    def __post_init__(self) -> None:
        if self.shift_step <= 0 or self.rotation_step <= 0:
            raise ValueError("step sizes must be strictly positive")


def displacement(view: ViewId, steps: StepSizes = StepSizes()) -> dict[str, float]:
    """Per-dimension displacement of a view from its series origin.

    x/y in image-width fraction, p/r/w in degrees; zero on dimensions the
    view's series does not transform.
    """
    offset = view.frame - ORIGIN_FRAME
    out: dict[str, float] = {}
    for d in DIMS:
        if d in view.cvt:
            step = steps.shift_step if d in ("x", "y") else steps.rotation_step
            out[d] = offset * step
        else:
            out[d] = 0.0
    return out


@dataclass
class Manifest:
    """Ordered bijection between view identities and embedding-matrix rows.

    Also carries per-row integer metadata arrays used by the matching
    kernels: object index, category index, series index (mask-1), frame,
    and polarity (0 dark, 1 light). Immutable after construction.
    """

    views: list[ViewId]
    index: dict[ViewId, int] = field(repr=False)
    partial: bool = False

    obj_idx: np.ndarray = field(init=False, repr=False)
    cat_idx: np.ndarray = field(init=False, repr=False)
    cvt_idx: np.ndarray = field(init=False, repr=False)
    frame: np.ndarray = field(init=False, repr=False)
    polarity: np.ndarray = field(init=False, repr=False)

    categories: list[str] = field(init=False)
    objects: list[ObjectId] = field(init=False)
    contrasts: list[Contrast] = field(init=False)

    def __post_init__(self) -> None:
        objects = sorted({v.object for v in self.views})
        categories = sorted({o.category for o in objects})
        contrasts = sorted({v.contrast for v in self.views}, key=lambda c: c.value)
        obj_pos = {o: i for i, o in enumerate(objects)}
        cat_pos = {c: i for i, c in enumerate(categories)}
        n = len(self.views)
        self.obj_idx = np.empty(n, dtype=np.int32)
        self.cat_idx = np.empty(n, dtype=np.int32)
        self.cvt_idx = np.empty(n, dtype=np.int32)
        self.frame = np.empty(n, dtype=np.int32)
        self.polarity = np.empty(n, dtype=np.int32)
        for i, v in enumerate(self.views):
            self.obj_idx[i] = obj_pos[v.object]
            self.cat_idx[i] = cat_pos[v.object.category]
            self.cvt_idx[i] = v.cvt.mask - 1
            self.frame[i] = v.frame
            self.polarity[i] = 0 if v.contrast is Contrast.DARK else 1
        self.objects = objects
        self.categories = categories
        self.contrasts = contrasts

    def __len__(self) -> int:
        return len(self.views)

    @property
    def n_rows(self) -> int:
        return len(self.views)

    @property
    def has_light(self) -> bool:
        return Contrast.LIGHT in self.contrasts

    def row_of(self, view: ViewId) -> int:
        return self.index[view]

    def names(self) -> list[str]:
        return [v.name for v in self.views]

    def describe(self) -> dict:
        """Dataset shape summary for reports and the validate command."""
        per_cat: dict[str, int] = {}
        for o in self.objects:
            per_cat[o.category] = per_cat.get(o.category, 0) + 1
        return {
            "n_rows": self.n_rows,
            "n_objects": len(self.objects),
            "n_categories": len(self.categories),
            "instances_per_category": per_cat,
            "contrasts": [c.value for c in self.contrasts],
            "partial": self.partial,
            # The untransformed origin rendering is stored once per series:
            # the 31 frame-5 rows of an object are physically the same image.
            "origin_views_replicated_per_series": True,
        }

    @classmethod
    def from_views(cls, views: Sequence[ViewId], partial: bool = False) -> "Manifest":
        return _build_manifest(list(views), partial=partial)


def _build_manifest(views: list[ViewId], partial: bool) -> Manifest:
    index: dict[ViewId, int] = {}
    duplicates: list[tuple[str, int, int]] = []
    for i, v in enumerate(views):
        if v in index:
            duplicates.append((v.name, index[v], i))
        else:
            index[v] = i
    if duplicates:
        listing = "; ".join(f"{n} at rows {a} and {b}" for n, a, b in duplicates[:50])
        more = "" if len(duplicates) <= 50 else f" (+{len(duplicates) - 50} more)"
        raise ManifestGridError(
            f"{len(duplicates)} duplicate view(s): {listing}{more}",
            duplicates=duplicates,
        )

    manifest = Manifest(views=views, index=index, partial=partial)
    if not partial:
        _check_completeness(manifest)
    return manifest


def _check_completeness(manifest: Manifest) -> None:
    """Every (object, cvt, frame) cell must exist for each contrast present."""
    expected_per_object = 31 * N_FRAMES * len(manifest.contrasts)
    missing: list[ViewId] = []
    present = manifest.index
    for obj in manifest.objects:
        for cvt, frame, contrast in product(
            (Cvt(m) for m in range(1, 32)), range(N_FRAMES), manifest.contrasts
        ):
            v = ViewId(obj, cvt, frame, contrast)
            if v not in present:
                missing.append(v)
    if missing:
        listing = ", ".join(v.name for v in missing[:50])
        more = "" if len(missing) <= 50 else f" (+{len(missing) - 50} more)"
        raise ManifestGridError(
            f"incomplete view grid: {len(missing)} missing cell(s) "
            f"(expected {expected_per_object} rows per object): {listing}{more}",
            missing=missing,
        )


def validate_manifest(names: Iterable[str], partial: bool = False) -> Manifest:
    """Parse and validate an ordered list of view names into a Manifest.

    Raises ManifestParseError when any name fails to parse (all failures
    reported), ManifestGridError on duplicates or missing grid cells.
    """
    views: list[ViewId] = []
    failures: list[tuple[int, str, str]] = []
    for i, name in enumerate(names):
        try:
            views.append(parse_view_name(name))
        except ViewNameError as e:
            failures.append((i, name, str(e)))
    if failures:
        listing = "; ".join(f"row {i}: {msg}" for i, _, msg in failures[:50])
        more = "" if len(failures) <= 50 else f" (+{len(failures) - 50} more)"
        raise ManifestParseError(
            f"{len(failures)} unparseable view name(s): {listing}{more}",
            failures=failures,
        )
    return _build_manifest(views, partial=partial)
