"""Canonical view-name grammar shared with the benchmark harness.

`<category>.<instance>.<cvt>.<frame>.<d|l>` where category is [a-z0-9_]+,
instance and frame are two digits (frame 00..10), and the cvt segment lists
dimensions in the fixed order x < y < p < r < w.
"""

from __future__ import annotations

import re

DIMS = "xyprw"

_NAME_RE = re.compile(
    r"(?P<category>[a-z0-9_]+)\.(?P<instance>[0-9]{2})\.(?P<cvt>[xyprw]{1,5})\."
    r"(?P<frame>[0-9]{2})\.(?P<contrast>[dl])\Z"
)


class BadViewName(ValueError):
    pass


def check_view_name(name: str) -> str:
    """Validate a canonical view name and return it unchanged."""
    m = _NAME_RE.match(name)
    if m is None:
        raise BadViewName(f"{name!r} does not match <category>.<ii>.<cvt>.<ff>.<d|l>")
    cvt = m.group("cvt")
    positions = [DIMS.index(c) for c in cvt]
    if positions != sorted(set(positions)):
        raise BadViewName(f"{name!r}: cvt {cvt!r} not in canonical dimension order {DIMS!r}")
    if int(m.group("frame")) > 10:
        raise BadViewName(f"{name!r}: frame out of range 00..10")
    return name
