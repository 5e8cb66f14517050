"""Hierarchical pie-chart models over a KB snapshot.

A model is a tree of sectors rooted at Thing. Class sectors expand to their
subclasses followed by their direct members; individual sectors expand to the
individuals whose hierarchical father they are. Sector weights default to
1 + the transitive instance count (so every slice stays visible) and can be
overridden per label by an imported pie document. Percents are rounded with
the largest-remainder method to two decimals so each ring sums to 100.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from decimal import Decimal

from .core import COLOR_NEUTRAL, ElasticityParams, RGB, region_color
from .errors import NotExpandable, UnknownClass, UnknownIndividual, UnknownTag
from .fsn import FsnGraph
from .ontology import (
    KnowledgeBase,
    THING,
    chain_extension,
    children_of,
    direct_instances,
    direct_subclasses,
    instances_of,
    level_order,
)

CLASS = "Class"
INDIVIDUAL = "Individual"


@dataclass(frozen=True)
class PieSector:
    id: str
    label: str
    kind: str
    percent: float
    color: RGB = COLOR_NEUTRAL
    expandable: bool = False
    children: tuple["PieSector", ...] = ()
    source_iri: str = ""

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "label": self.label,
            "kind": self.kind,
            "percent": self.percent,
            "color": list(self.color),
            "expandable": self.expandable,
            "children": [c.to_json() for c in self.children],
            "source_iri": self.source_iri,
        }


@dataclass(frozen=True)
class PieModel:
    root: PieSector
    focus_tags: tuple[str, ...] = ()
    revision: int = 0
    empty: bool = False

    def to_json(self) -> dict:
        return {"root": self.root.to_json(),
                "focus_tags": list(self.focus_tags),
                "revision": self.revision,
                "empty": self.empty}


def sector_id(kind: str, iri: str) -> str:
    return f"{'cls' if kind == CLASS else 'ind'}:{iri}"


def parse_sector_id(sid: str) -> tuple[str, str]:
    head, _, iri = sid.partition(":")
    if head not in ("cls", "ind") or not iri:
        raise ValueError(f"not a sector id: {sid!r}")
    return (CLASS if head == "cls" else INDIVIDUAL, iri)


def sector_for(kb: KnowledgeBase, sid: str) -> PieSector:
    """Fresh unexpanded sector for a sector id, looked up in the snapshot."""
    kind, iri = parse_sector_id(sid)
    if kind == CLASS:
        if iri not in kb.classes:
            raise UnknownClass(f"unknown class {iri!r}")
        return _class_sector(kb, iri, 100.0)
    if iri not in kb.individuals:
        raise UnknownIndividual(f"unknown individual {iri!r}")
    return _individual_sector(kb, iri, 100.0)


def split_percents(weights: list[float]) -> list[float]:
    """Largest-remainder split of 100.00 into two-decimal percents."""
    if not weights:
        return []
    total = math.fsum(weights)
    if total <= 0:
        weights = [1.0] * len(weights)
        total = float(len(weights))
    raw = [w / total * 10000 for w in weights]
    cents = [int(math.floor(r)) for r in raw]
    order = sorted(range(len(raw)),
                   key=lambda i: (cents[i] - raw[i], i))
    for i in order[:10000 - sum(cents)]:
        cents[i] += 1
    return [c / 100 for c in cents]


Overrides = dict[str, Decimal]


def _weigh(kb: KnowledgeBase, labels: list[str], base: list[float],
           overrides: Overrides | None) -> list[float]:
    if not overrides:
        return base
    return [float(overrides.get(label, Decimal(0))) or weight
            for label, weight in zip(labels, base)]


def _class_weight(kb: KnowledgeBase, iri: str) -> float:
    # at least 1 so empty classes keep a visible slice
    return float(max(1, len(instances_of(kb, iri))))


def _class_sector(kb: KnowledgeBase, iri: str, percent: float) -> PieSector:
    has_children = bool(direct_subclasses(kb, iri) or direct_instances(kb, iri))
    return PieSector(id=sector_id(CLASS, iri), label=kb.classes[iri].label,
                     kind=CLASS, percent=percent, expandable=has_children,
                     source_iri=iri)


def _individual_sector(kb: KnowledgeBase, iri: str, percent: float) -> PieSector:
    # optimistic: corrected to False once an expansion comes back empty
    return PieSector(id=sector_id(INDIVIDUAL, iri),
                     label=kb.individuals[iri].label, kind=INDIVIDUAL,
                     percent=percent, expandable=True, source_iri=iri)


def order_children(kb: KnowledgeBase, children: list[PieSector],
                   total_order_property: str | None = None) -> list[PieSector]:
    """Classes first by label; individuals chain-ordered or by label."""
    classes = sorted((c for c in children if c.kind == CLASS),
                     key=lambda c: (c.label, c.source_iri))
    individuals = [c for c in children if c.kind == INDIVIDUAL]
    if total_order_property and individuals:
        ranked = level_order(kb, [c.source_iri for c in individuals],
                             total_order_property)
        by_iri = {c.source_iri: c for c in individuals}
        individuals = [by_iri[i] for i in ranked]
    else:
        individuals = sorted(individuals,
                             key=lambda c: (c.label, c.source_iri))
    return classes + individuals


def _ring(kb: KnowledgeBase, sectors: list[PieSector], weights: list[float],
          overrides: Overrides | None,
          order_property: str | None) -> tuple[PieSector, ...]:
    ordered = order_children(kb, sectors, order_property)
    index = {s.id: w for s, w in zip(sectors, weights)}
    labels = [s.label for s in ordered]
    final = _weigh(kb, labels, [index[s.id] for s in ordered], overrides)
    percents = split_percents(final)
    return tuple(replace(s, percent=p) for s, p in zip(ordered, percents))


def build_root(kb: KnowledgeBase, overrides: Overrides | None = None) -> PieModel:
    """Model rooted at Thing; children are the top-level classes."""
    top = direct_subclasses(kb, THING)
    sectors = [_class_sector(kb, iri, 0.0) for iri in top]
    weights = [_class_weight(kb, iri) for iri in top]
    children = _ring(kb, sectors, weights, overrides, None)
    root = PieSector(id=sector_id(CLASS, THING), label="Thing", kind=CLASS,
                     percent=100.0, expandable=bool(children),
                     children=children, source_iri=THING)
    return PieModel(root=root, revision=kb.revision)


def expand(kb: KnowledgeBase, sector: PieSector,
           order_property: str | None = None,
           hierarchical_properties: list[str] | None = None,
           overrides: Overrides | None = None) -> PieSector:
    """Fill in a sector's children ring.

    Class sectors expand to subclasses then direct members; individual
    sectors expand to their hierarchical children.
    """
    if not sector.expandable:
        raise NotExpandable(f"sector {sector.id!r} has nothing to expand")
    if sector.kind == CLASS:
        if sector.source_iri not in kb.classes:
            raise NotExpandable(f"sector {sector.id!r} references no class")
        subs = direct_subclasses(kb, sector.source_iri)
        members = direct_instances(kb, sector.source_iri)
        sectors = [_class_sector(kb, iri, 0.0) for iri in subs] + \
                  [_individual_sector(kb, iri, 0.0) for iri in members]
        weights = [_class_weight(kb, iri) for iri in subs] + \
                  [1.0] * len(members)
    else:
        if sector.source_iri not in kb.individuals:
            raise NotExpandable(f"sector {sector.id!r} references no individual")
        kids = children_of(kb, sector.source_iri, hierarchical_properties)
        sectors = [_individual_sector(kb, iri, 0.0) for iri in kids]
        weights = [1.0] * len(kids)
    children = _ring(kb, sectors, weights, overrides, order_property)
    return replace(sector, children=children, expandable=bool(children))


def combine_focus(kb: KnowledgeBase, fd_tags: list[str],
                  order_property: str | None = None) -> PieModel:
    """Model scoped to the individuals shared by every focused tag's class.

    With a total-order property the shared level is closed over whole
    chains, then chain-ordered.
    """
    if not fd_tags:
        raise ValueError("focus needs at least one tag")
    tags = list(dict.fromkeys(fd_tags))
    by_label = {}
    for cls in kb.classes.values():
        by_label.setdefault(cls.label, cls.iri)
    common: set[str] | None = None
    for tag in tags:
        iri = tag if tag in kb.classes else by_label.get(tag)
        if iri is None:
            raise UnknownTag(f"no class backs FD tag {tag!r}")
        members = set(instances_of(kb, iri))
        common = members if common is None else common & members
    level = common or set()
    if order_property and level:
        level = chain_extension(kb, level, order_property)
    sectors = [_individual_sector(kb, iri, 0.0) for iri in sorted(level)]
    children = _ring(kb, sectors, [1.0] * len(sectors), None, order_property)
    root = PieSector(id=sector_id(CLASS, THING), label="Thing", kind=CLASS,
                     percent=100.0, expandable=bool(children),
                     children=children, source_iri=THING)
    return PieModel(root=root, focus_tags=tuple(tags),
                    revision=kb.revision, empty=not children)


def colorize(model: PieModel, fsn: FsnGraph,
             params: ElasticityParams | None = None) -> PieModel:
    """Colour FD-tag sectors by the mean strain of their incident links."""
    params = params or fsn.elasticity
    strains: dict[str, list[float]] = {}
    for link in fsn.links:
        strains.setdefault(link.a, []).append(link.strain)
        strains.setdefault(link.b, []).append(link.strain)

    def paint(sector: PieSector) -> PieSector:
        children = tuple(paint(c) for c in sector.children)
        if sector.source_iri in fsn.tags and strains.get(sector.source_iri):
            values = strains[sector.source_iri]
            color = region_color(math.fsum(values) / len(values), params)
        else:
            color = COLOR_NEUTRAL
        return replace(sector, color=color, children=children)

    return replace(model, root=paint(model.root))


def table_to_pie(result, revision: int = 0) -> PieModel:
    """Pie over a result table: first column groups, row multiplicity weighs."""
    groups: dict[str, int] = {}
    for row in result.rows:
        groups[row[0]] = groups.get(row[0], 0) + 1
    keys = sorted(groups)
    percents = split_percents([float(groups[k]) for k in keys])
    children = tuple(
        PieSector(id=sector_id(INDIVIDUAL, key), label=key, kind=INDIVIDUAL,
                  percent=p, expandable=True, source_iri=key)
        for key, p in zip(keys, percents))
    root = PieSector(id=sector_id(CLASS, THING), label="Thing", kind=CLASS,
                     percent=100.0, expandable=bool(children),
                     children=children, source_iri=THING)
    return PieModel(root=root, revision=revision, empty=not children)
