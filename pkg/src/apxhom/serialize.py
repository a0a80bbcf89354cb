"""Text and JSON formats for specs, elements, sets, maps, and CSV tables.

Spec strings look like ``[2^4]`` or ``[4,0]``: comma-separated moduli in
brackets, ``m^k`` repeating a modulus k times, ``0`` meaning Z.
"""

from __future__ import annotations

import csv
import io
import json
import re
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .group_core import GroupError, GroupSpec


class SpecParseError(GroupError):
    pass


def parse_spec(text: str) -> GroupSpec:
    """Parse ``[2^3,5]`` into GroupSpec((2, 2, 2, 5)).

    >>> parse_spec("[4,0]").moduli
    (4, 0)
    """
    s = text.strip()
    if not s.startswith("[") or not s.endswith("]"):
        raise SpecParseError(f"spec {text!r}: expected '[...]' at position 0")
    body = s[1:-1]
    offset = text.index("[") + 1
    moduli: list[int] = []
    if not body.strip():
        return GroupSpec(())
    for pos, piece in _split_commas(body):
        m = re.fullmatch(r"\s*(\d+)\s*(?:\^\s*(\d+)\s*)?", piece)
        if not m:
            bad = piece.strip() or "<empty>"
            raise SpecParseError(f"spec {text!r}: bad token {bad!r} at position {offset + pos}")
        mod, rep = int(m.group(1)), int(m.group(2) or 1)
        if mod == 1:
            raise SpecParseError(f"spec {text!r}: modulus 1 at position {offset + pos} is not allowed")
        moduli.extend([mod] * rep)
    return GroupSpec(moduli)


def _split_commas(body: str):
    pos = 0
    for piece in body.split(","):
        yield pos, piece
        pos += len(piece) + 1


def render_spec(spec: GroupSpec) -> str:
    """Inverse of ``parse_spec``; runs of equal moduli use ``^``."""
    parts: list[str] = []
    mods = spec.moduli
    i = 0
    while i < len(mods):
        j = i
        while j < len(mods) and mods[j] == mods[i]:
            j += 1
        parts.append(str(mods[i]) if j - i == 1 else f"{mods[i]}^{j - i}")
        i = j
    return "[" + ",".join(parts) + "]"


def render_element(x: Sequence[int]) -> str:
    return "[" + ",".join(str(int(c)) for c in x) + "]"


def parse_element(spec: GroupSpec, text: str) -> tuple[int, ...]:
    from .group_core import reduce

    try:
        coords = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GroupError(f"element {text!r}: {exc.msg} at position {exc.pos}") from None
    if not isinstance(coords, list) or not all(isinstance(c, int) for c in coords):
        raise GroupError(f"element {text!r}: expected a list of integers")
    return reduce(spec, coords)


def fraction_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def parse_fraction(text: str) -> Fraction:
    return Fraction(text)


def set_to_json(A) -> dict[str, Any]:
    return {"spec": render_spec(A.spec), "elements": [list(x) for x in A.elements()]}


def set_from_json(obj: dict[str, Any]):
    from .setops import ElementSet

    return ElementSet.from_elements(parse_spec(obj["spec"]), obj["elements"])


def map_to_json(f) -> dict[str, Any]:
    out = {
        "domain": render_spec(f.domain),
        "codomain": render_spec(f.codomain),
        "table": [list(v) for v in f.table],
    }
    if f.provenance is not None:
        out["construction"] = {"name": f.provenance[0], **dict(f.provenance[1])}
    return out


def map_from_json(obj: dict[str, Any]):
    from .maps import PointMap

    return PointMap(parse_spec(obj["domain"]), parse_spec(obj["codomain"]), obj["table"])


def emit_csv(rows: Iterable[dict[str, Any]], header: Sequence[str] | None = None) -> str:
    """Render dict rows as CSV with a header row (RFC 4180 quoting, CRLF)."""
    rows = list(rows)
    if header is None:
        header = list(rows[0]) if rows else []
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(header), lineterminator="\r\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: _csv_cell(row.get(k)) for k in header})
    return buf.getvalue()


def _csv_cell(v: Any) -> Any:
    if isinstance(v, Fraction):
        return fraction_str(v)
    return "" if v is None else v
