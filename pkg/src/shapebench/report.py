"""Aggregation of match records into error curves, failure exemplars, and
serialized reports (CSV + structured JSON)."""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .errors import FormatError
from .exclusion import ContrastMode, ExclusionSpec
from .matcher import MatchRecord, Outcome
from .views import Cvt

CSV_HEADER = "dims,mode,radius,n_qualified,n_skipped,object_error,category_error"

_MODE_ORDER = {ContrastMode.NONE: 0, ContrastMode.HARD: 1, ContrastMode.SOFT: 2}


@dataclass
class CurvePoint:
    radius: int | None
    n_qualified: int
    n_skipped: int
    object_error: float | None
    category_error: float | None

    @property
    def radius_label(self) -> str:
        return "none" if self.radius is None else str(self.radius)


@dataclass
class ErrorCurve:
    dims: str
    mode: str
    points: list[CurvePoint] = field(default_factory=list)


@dataclass
class ErrorExemplar:
    """A reference whose top-1 match was a different object, with the best
    same-object candidate the embedding rejected. Ranked by margin."""

    reference: str
    spec: str
    top1: str
    top1_similarity: float
    best_pmc: str
    best_pmc_similarity: float
    margin: float


def _radius_sort_key(radius: int | None) -> tuple[int, int]:
    return (0, 0) if radius is None else (1, radius)


def error_curves(
    records: Sequence[MatchRecord], specs: Sequence[ExclusionSpec] | None = None
) -> list[ErrorCurve]:
    """Group records into error curves per (dims, mode), points ordered by
    radius with the no-exclusion point first.

    object error counts every reference whose top-1 was not the same object
    (category-correct included); category error counts only cross-category
    failures, so category_error <= object_error pointwise. Skipped
    references are excluded from denominators. When `specs` is given, grid
    cells with no records still emit a point with n=0 and null rates.
    """
    cells: dict[tuple[str, str, int | None], list[MatchRecord]] = {}
    if specs is not None:
        for spec in specs:
            cells.setdefault((str(spec.dims), spec.mode.value, spec.radius), [])
    for rec in records:
        key = (str(rec.spec.dims), rec.spec.mode.value, rec.spec.radius)
        cells.setdefault(key, []).append(rec)

    curves: dict[tuple[str, str], ErrorCurve] = {}
    for (dims, mode, radius), recs in cells.items():
        n_qualified = len(recs)
        n_skipped = sum(1 for r in recs if r.outcome is Outcome.SKIPPED)
        scored = n_qualified - n_skipped
        if scored == 0:
            obj_err: float | None = None
            cat_err: float | None = None
        else:
            n_cat = sum(1 for r in recs if r.outcome is Outcome.CATEGORY_CORRECT)
            n_inc = sum(1 for r in recs if r.outcome is Outcome.INCORRECT)
            obj_err = (n_cat + n_inc) / scored
            cat_err = n_inc / scored
        curve = curves.setdefault((dims, mode), ErrorCurve(dims=dims, mode=mode))
        curve.points.append(CurvePoint(radius, n_qualified, n_skipped, obj_err, cat_err))

    for curve in curves.values():
        curve.points.sort(key=lambda p: _radius_sort_key(p.radius))
    ordered = sorted(
        curves.values(),
        key=lambda c: (len(c.dims), c.dims, _MODE_ORDER[ContrastMode(c.mode)]),
    )
    return ordered


def top_errors(records: Sequence[MatchRecord], n: int) -> list[ErrorExemplar]:
    """The n failures with the largest margin between the winning wrong match
    and the best rejected same-object candidate; ties ordered by reference
    row."""
    if n < 1:
        raise ValueError("n must be >= 1")
    failures = [
        r
        for r in records
        if r.outcome in (Outcome.CATEGORY_CORRECT, Outcome.INCORRECT)
    ]
    failures.sort(key=lambda r: (-(r.top1.score - r.best_pmc.score), r.ref_row))
    out = []
    for r in failures[:n]:
        out.append(
            ErrorExemplar(
                reference=r.reference.name,
                spec=str(r.spec),
                top1=r.top1.view.name,
                top1_similarity=r.top1.score,
                best_pmc=r.best_pmc.view.name,
                best_pmc_similarity=r.best_pmc.score,
                margin=r.top1.score - r.best_pmc.score,
            )
        )
    return out


def _fmt_rate(rate: float | None) -> str:
    return "null" if rate is None else f"{rate:.6f}"


def curves_to_csv(curves: Sequence[ErrorCurve]) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for curve in curves:
        for p in curve.points:
            buf.write(
                f"{curve.dims},{curve.mode},{p.radius_label},{p.n_qualified},"
                f"{p.n_skipped},{_fmt_rate(p.object_error)},{_fmt_rate(p.category_error)}\n"
            )
    return buf.getvalue()


def parse_csv(text: str) -> list[ErrorCurve]:
    lines = [ln for ln in text.split("\n") if ln]
    if not lines or lines[0] != CSV_HEADER:
        raise FormatError(f"bad CSV header: expected {CSV_HEADER!r}")
    curves: dict[tuple[str, str], ErrorCurve] = {}
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 7:
            raise FormatError(f"bad CSV row (expected 7 columns): {ln!r}")
        dims, mode, radius_s, nq, ns, oe, ce = parts
        Cvt.parse(dims)
        radius = None if radius_s == "none" else int(radius_s)
        point = CurvePoint(
            radius=radius,
            n_qualified=int(nq),
            n_skipped=int(ns),
            object_error=None if oe == "null" else float(oe),
            category_error=None if ce == "null" else float(ce),
        )
        curves.setdefault((dims, mode), ErrorCurve(dims=dims, mode=mode)).points.append(point)
    return list(curves.values())


def _curve_payload(curve: ErrorCurve) -> dict:
    return {
        "dims": curve.dims,
        "mode": curve.mode,
        "points": [
            {
                "radius": p.radius_label,
                "n_qualified": p.n_qualified,
                "n_skipped": p.n_skipped,
                "object_error": p.object_error,
                "category_error": p.category_error,
            }
            for p in curve.points
        ],
    }


def report_json(
    curves: Sequence[ErrorCurve],
    exemplars: Sequence[ErrorExemplar],
    run_config: dict,
) -> str:
    doc = {
        "tool": "shapebench",
        "config": run_config,
        "curves": [_curve_payload(c) for c in curves],
        "exemplars": [vars(e) for e in exemplars],
    }
    return json.dumps(doc, indent=2) + "\n"


def emit_report(
    curves: Sequence[ErrorCurve],
    exemplars: Sequence[ErrorExemplar],
    run_config: dict,
    csv_path=None,
    report_path=None,
) -> None:
    if csv_path is not None:
        Path(csv_path).write_text(curves_to_csv(curves), encoding="utf-8")
    if report_path is not None:
        Path(report_path).write_text(report_json(curves, exemplars, run_config), encoding="utf-8")


def read_report(path) -> tuple[list[ErrorCurve], list[ErrorExemplar], dict]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: not valid JSON: {e}") from None
    if not isinstance(doc, dict) or "curves" not in doc:
        raise FormatError(f"{path}: missing curves section")
    curves = []
    for c in doc["curves"]:
        points = [
            CurvePoint(
                radius=None if p["radius"] == "none" else int(p["radius"]),
                n_qualified=p["n_qualified"],
                n_skipped=p["n_skipped"],
                object_error=p["object_error"],
                category_error=p["category_error"],
            )
            for p in c["points"]
        ]
        curves.append(ErrorCurve(dims=c["dims"], mode=c["mode"], points=points))
    if "exemplars" not in doc:
        raise FormatError(f"{path}: missing exemplars section")
    exemplars = [ErrorExemplar(**e) for e in doc["exemplars"]]
    return curves, exemplars, doc.get("config", {})
