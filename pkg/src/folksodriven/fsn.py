"""Structure network over Folksodriven tags.

Tags become nodes; a link joins two tags whenever the Jaccard overlap of
their attribute sets reaches the formation threshold theta. Each link
remembers the Minkowski interval distance between its endpoints at creation
time (its rest length); later edits that move the endpoints strain the link,
and the strain is classified into stress-strain regions.

Morphological changes (tag add/remove/relabel/context edits) are applied
incrementally: only pairs involving the touched tag are recomputed. The test
suite holds this equal to a from-scratch rebuild after every event.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .core import (
    ElasticityParams,
    FolksodrivenTag,
    FormalContext,
    MinkowskiPoint,
    Region,
    classify_region,
    stress_at,
)
from .errors import DuplicateOrdinal, DuplicateTag, UnknownTag

STRAIN_FLOOR = 1e-6


def overlap(a: FormalContext, b: FormalContext) -> float:
    """Jaccard similarity of the two attribute sets; 0 when both are empty."""
    union = a.attributes | b.attributes
    if not union:
        return 0.0
    return len(a.attributes & b.attributes) / len(union)


def interval_distance(p: MinkowskiPoint, q: MinkowskiPoint) -> float:
    """Magnitude of the squared-interval between two points.

    The (+, +, -) interval of the difference vector can be negative, so the
    distance is the square root of its absolute value.
    """
    dc, dr, de = p.c - q.c, p.r - q.r, p.e - q.e
    return math.sqrt(abs(dc * dc + dr * dr - de * de))


@dataclass(frozen=True)
class FsnLink:
    a: str  # canonical order: a < b
    b: str
    weight: float
    rest_interval: float
    strain: float
    region: Region

    @property
    def key(self) -> tuple[str, str]:
        return (self.a, self.b)


@dataclass(frozen=True)
class UnitCell:
    member_tags: frozenset[str]
    subject_key: frozenset[str]


@dataclass(frozen=True)
class FsnGraph:
    tags: dict[str, FolksodrivenTag] = field(default_factory=dict)
    links: tuple[FsnLink, ...] = ()
    theta: float = 0.3
    elasticity: ElasticityParams = field(default_factory=ElasticityParams)

    def __post_init__(self):
        if not 0 < self.theta <= 1:
            raise ValueError("theta must be in (0, 1]")

    def link_map(self) -> dict[tuple[str, str], FsnLink]:
        return {l.key: l for l in self.links}


def _make_link(a: FolksodrivenTag, b: FolksodrivenTag, weight: float,
               rest: float, params: ElasticityParams) -> FsnLink:
    if b.id < a.id:
        a, b = b, a
    current = interval_distance(a.point, b.point)
    strain = abs(current - rest) / max(rest, STRAIN_FLOOR)
    region = classify_region(stress_at(strain, params), strain, params)
    return FsnLink(a=a.id, b=b.id, weight=weight,
                   rest_interval=rest, strain=strain, region=region)


def _sorted_links(links: dict[tuple[str, str], FsnLink]) -> tuple[FsnLink, ...]:
    return tuple(links[k] for k in sorted(links))


def graph_from_tags(tags: list[FolksodrivenTag], theta: float = 0.3,
                    elasticity: ElasticityParams | None = None) -> FsnGraph:
    g = FsnGraph(tags={}, links=(), theta=theta,
                 elasticity=elasticity or ElasticityParams())
    for tag in tags:
        g = _add_tag(g, tag)
    return g


def rebuild_links(g: FsnGraph) -> FsnGraph:
    """Recompute the full link set from pairwise overlaps.

    Links that survive keep their rest length; new links are born at rest.
    """
    old = g.link_map()
    fresh: dict[tuple[str, str], FsnLink] = {}
    ids = sorted(g.tags)
    for i, aid in enumerate(ids):
        for bid in ids[i + 1:]:
            ta, tb = g.tags[aid], g.tags[bid]
            w = overlap(ta.context, tb.context)
            if w < g.theta:
                continue
            prev = old.get((aid, bid))
            rest = prev.rest_interval if prev else \
                interval_distance(ta.point, tb.point)
            fresh[(aid, bid)] = _make_link(ta, tb, w, rest, g.elasticity)
    return replace(g, links=_sorted_links(fresh))


def _add_tag(g: FsnGraph, tag: FolksodrivenTag) -> FsnGraph:
    if tag.id in g.tags:
        raise DuplicateTag(f"tag {tag.id!r} already present")
    if any(t.resource.ordinal == tag.resource.ordinal for t in g.tags.values()):
        raise DuplicateOrdinal(
            f"resource ordinal {tag.resource.ordinal} already taken")
    tags = dict(g.tags)
    tags[tag.id] = tag
    links = g.link_map()
    for other in g.tags.values():
        w = overlap(tag.context, other.context)
        if w >= g.theta:
            link = _make_link(tag, other, w,
                              interval_distance(tag.point, other.point),
                              g.elasticity)
            links[link.key] = link
    return replace(g, tags=tags, links=_sorted_links(links))


# --- morphological changes -------------------------------------------------

@dataclass(frozen=True)
class AddTag:
    tag: FolksodrivenTag


@dataclass(frozen=True)
class RemoveTag:
    tag_id: str


@dataclass(frozen=True)
class RelabelTag:
    tag_id: str
    label: str


@dataclass(frozen=True)
class EditContext:
    tag_id: str
    context: FormalContext


MorphologicalChange = AddTag | RemoveTag | RelabelTag | EditContext


@dataclass(frozen=True)
class PlasticityReport:
    created: tuple[tuple[str, str], ...]
    broken: tuple[tuple[str, str], ...]
    region_changed: tuple[tuple[str, str, Region, Region], ...]

    @property
    def is_empty(self) -> bool:
        return not (self.created or self.broken or self.region_changed)


def _diff_report(before: dict, after: dict) -> PlasticityReport:
    created = tuple(sorted(k for k in after if k not in before))
    broken = tuple(sorted(k for k in before if k not in after))
    changed = tuple((a, b, before[(a, b)].region, after[(a, b)].region)
                    for a, b in sorted(set(before) & set(after))
                    if before[(a, b)].region != after[(a, b)].region)
    return PlasticityReport(created=created, broken=broken,
                            region_changed=changed)


def apply_morphological_change(
        g: FsnGraph, change: MorphologicalChange) -> tuple[FsnGraph, PlasticityReport]:
    """Apply one change, touching only the links of the affected tag."""
    before = g.link_map()

    if isinstance(change, AddTag):
        out = _add_tag(g, change.tag)

    elif isinstance(change, RemoveTag):
        if change.tag_id not in g.tags:
            raise UnknownTag(f"unknown tag {change.tag_id!r}")
        tags = {k: v for k, v in g.tags.items() if k != change.tag_id}
        links = {k: v for k, v in before.items() if change.tag_id not in k}
        out = replace(g, tags=tags, links=_sorted_links(links))

    elif isinstance(change, RelabelTag):
        if change.tag_id not in g.tags:
            raise UnknownTag(f"unknown tag {change.tag_id!r}")
        tags = dict(g.tags)
        tags[change.tag_id] = tags[change.tag_id].with_label(change.label)
        out = replace(g, tags=tags)

    elif isinstance(change, EditContext):
        if change.tag_id not in g.tags:
            raise UnknownTag(f"unknown tag {change.tag_id!r}")
        tags = dict(g.tags)
        edited = tags[change.tag_id].with_context(change.context)
        tags[change.tag_id] = edited
        links = dict(before)
        for other in tags.values():
            if other.id == edited.id:
                continue
            key = tuple(sorted((edited.id, other.id)))
            w = overlap(edited.context, other.context)
            if w < g.theta:
                links.pop(key, None)
                continue
            prev = before.get(key)
            rest = prev.rest_interval if prev else \
                interval_distance(edited.point, other.point)
            links[key] = _make_link(edited, other, w, rest, g.elasticity)
        out = replace(g, tags=tags, links=_sorted_links(links))

    else:
        raise TypeError(f"unknown change {change!r}")

    return out, _diff_report(before, out.link_map())


# --- network readouts ------------------------------------------------------

def unit_cells(g: FsnGraph) -> frozenset[UnitCell]:
    """Connected components of the link graph, keyed by shared attributes."""
    adjacency: dict[str, set[str]] = {}
    for link in g.links:
        adjacency.setdefault(link.a, set()).add(link.b)
        adjacency.setdefault(link.b, set()).add(link.a)
    cells = []
    seen: set[str] = set()
    for start in sorted(adjacency):
        if start in seen:
            continue
        component = set()
        frontier = [start]
        while frontier:
            cur = frontier.pop()
            if cur in component:
                continue
            component.add(cur)
            frontier.extend(adjacency[cur] - component)
        seen |= component
        key: frozenset[str] | None = None
        for tid in component:
            attrs = g.tags[tid].context.attributes
            key = attrs if key is None else key & attrs
        cells.append(UnitCell(member_tags=frozenset(component),
                              subject_key=key or frozenset()))
    return frozenset(cells)


def network_strain_summary(g: FsnGraph) -> dict:
    counts = {str(r): 0 for r in Region}
    total = 0.0
    for link in g.links:
        counts[str(link.region)] += 1
        total += link.strain
    mean = total / len(g.links) if g.links else 0.0
    return {"regions": counts, "mean_strain": mean,
            "links": len(g.links), "tags": len(g.tags)}


def to_edge_list(g: FsnGraph) -> str:
    """Tab-separated edge list: tag_a, tag_b, weight, strain, region."""
    lines = [f"{l.a}\t{l.b}\t{l.weight!r}\t{l.strain!r}\t{l.region}"
             for l in g.links]
    return "".join(line + "\n" for line in lines)
