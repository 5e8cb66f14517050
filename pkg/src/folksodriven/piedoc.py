"""XML pie-chart documents: the save/load exchange format.

Schema: a `<piechart>` root holding `<slice>` elements, each with exactly one
`<name>` and one `<percent>` child (two fraction digits, in (0, 100]) and an
optional `iri` attribute. Export is byte-stable: UTF-8, LF endings, two-space
indentation, percents always printed with two decimals.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from xml.sax.saxutils import escape, quoteattr

from .errors import BadPercent, MalformedDocument

TWO_PLACES = Decimal("0.01")


@dataclass(frozen=True)
class PieSlice:
    name: str
    percent: Decimal
    source_iri: str | None = None


@dataclass(frozen=True)
class PieDocument:
    slices: tuple[PieSlice, ...] = ()


def _parse_percent(text: str | None) -> Decimal:
    raw = (text or "").strip()
    try:
        value = Decimal(raw)
    except InvalidOperation:
        raise BadPercent(f"percent {raw!r} is not a number") from None
    if not value.is_finite():
        raise BadPercent(f"percent {raw!r} is not a number")
    if not Decimal(0) < value <= Decimal(100):
        raise BadPercent(f"percent {raw} outside (0, 100]")
    if value != value.quantize(TWO_PLACES):
        raise BadPercent(f"percent {raw} has more than 2 fraction digits")
    return value.quantize(TWO_PLACES)


def import_pie_document(data: bytes) -> PieDocument:
    """Parse document bytes, validating the slice schema strictly."""
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        line, _col = exc.position
        raise MalformedDocument(f"not well-formed XML: {exc.msg}",
                                line=line) from None
    if root.tag != "piechart":
        raise MalformedDocument(f"root element is <{root.tag}>, "
                                "expected <piechart>")
    slices = []
    for child in root:
        if child.tag != "slice":
            raise MalformedDocument(
                f"unexpected <{child.tag}> under <piechart>")
        names = child.findall("name")
        percents = child.findall("percent")
        extras = [e.tag for e in child if e.tag not in ("name", "percent")]
        if len(names) != 1 or len(percents) != 1 or extras:
            raise MalformedDocument(
                "each <slice> needs exactly one <name> and one <percent>")
        slices.append(PieSlice(name=names[0].text or "",
                               percent=_parse_percent(percents[0].text),
                               source_iri=child.get("iri")))
    return PieDocument(slices=tuple(slices))


def export_pie_document(doc: PieDocument) -> bytes:
    """Serialize to canonical bytes; import(export(d)) == d."""
    head = '<?xml version="1.0" encoding="UTF-8"?>\n'
    if not doc.slices:
        return (head + "<piechart/>\n").encode("utf-8")
    lines = ["<piechart>"]
    for s in doc.slices:
        attr = f" iri={quoteattr(s.source_iri)}" if s.source_iri else ""
        lines.append(f"  <slice{attr}>")
        lines.append(f"    <name>{escape(s.name)}</name>")
        lines.append(f"    <percent>{s.percent.quantize(TWO_PLACES)}</percent>")
        lines.append("  </slice>")
    lines.append("</piechart>")
    return (head + "\n".join(lines) + "\n").encode("utf-8")


def model_to_document(model) -> PieDocument:
    """Top ring of a pie model as a document."""
    slices = tuple(
        PieSlice(name=c.label,
                 percent=Decimal(str(c.percent)).quantize(TWO_PLACES),
                 source_iri=c.source_iri or None)
        for c in model.root.children)
    return PieDocument(slices=slices)
