"""The news-domain seed: classes, individuals, relations, tags, templates.

Gives the workbench something to navigate out of the box: two FD-tag classes
(sinking, passenger) with their members, a partOf hierarchy between the
individuals, an isFollowedBy chain ship -> ferry -> titanic, and the
TypologyOfNewsObject/builtOf/Ship editing example.
"""

from __future__ import annotations

from .core import FolksodrivenTag, FormalContext, Resource, TimeExposition
from .ontology import Family, PropertyKind
from .query import (
    Hole,
    Iri,
    QueryAst,
    QueryTemplate,
    TemplateParam,
    TemplateRegistry,
    Var,
    register_template,
)


def seed_edit_script() -> list[tuple[str, dict]]:
    """Journal-ready (op, args) pairs building the news KB."""
    ops: list[tuple[str, dict]] = []

    def cls(iri, label):
        ops.append(("define_class",
                    {"iri": iri, "label": label, "parents": ["Thing"]}))

    def prop(iri, kind, range_, family="Plain", max_card=None):
        ops.append(("define_property",
                    {"iri": iri, "kind": kind, "range": range_,
                     "domain": None, "min_card": 0, "max_card": max_card,
                     "family": family}))

    def ind(iri, label, classes):
        ops.append(("assert_individual",
                    {"iri": iri, "labels": [label], "classes": classes}))

    def link(subject, property_, obj):
        ops.append(("set_property_value",
                    {"subject": subject, "property": property_,
                     "object": {"iri": obj}}))

    cls("sinking", "sinking")
    cls("passenger", "passenger")
    cls("TypologyOfNewsObject", "TypologyOfNewsObject")
    cls("Ship", "Ship")

    prop("partOf", PropertyKind.OBJECT.value, "Thing",
         family=Family.HIERARCHICAL.value)
    prop("isFollowedBy", PropertyKind.OBJECT.value, "Thing",
         family=Family.TOTAL_ORDER.value)
    prop("builtOf", PropertyKind.OBJECT.value, "Ship")
    prop("instanceOf", PropertyKind.DATATYPE.value, "string")

    ind("ship", "ship", ["sinking", "passenger"])
    ind("captain", "captain", ["sinking"])
    ind("rescue", "rescue", ["sinking"])
    ind("plane", "plane", ["passenger"])
    ind("train", "train", ["passenger"])
    ind("ferry", "ferry", ["Ship"])
    ind("titanic", "titanic", ["Ship"])
    ind("Sinking", "Sinking", ["TypologyOfNewsObject"])
    ind("Passenger", "Passenger", ["Ship"])

    link("captain", "partOf", "ship")
    link("rescue", "partOf", "ship")
    link("ship", "isFollowedBy", "ferry")
    link("ferry", "isFollowedBy", "titanic")
    link("Sinking", "builtOf", "Passenger")
    return ops


def seed_tags() -> list[FolksodrivenTag]:
    """FD tags backing the sinking/passenger classes, contexts overlapping."""
    sinking_ctx = FormalContext(
        objects=frozenset({"https://news.example/titanic-sinks",
                           "https://news.example/rescue-effort"}),
        attributes=frozenset({"news", "disaster", "sea"}),
        incidence=frozenset({
            ("https://news.example/titanic-sinks", "news"),
            ("https://news.example/titanic-sinks", "disaster"),
            ("https://news.example/titanic-sinks", "sea"),
            ("https://news.example/rescue-effort", "news"),
            ("https://news.example/rescue-effort", "sea"),
        }))
    passenger_ctx = FormalContext(
        objects=frozenset({"https://news.example/ferry-lines",
                           "https://news.example/rail-strike"}),
        attributes=frozenset({"news", "travel", "sea"}),
        incidence=frozenset({
            ("https://news.example/ferry-lines", "news"),
            ("https://news.example/ferry-lines", "travel"),
            ("https://news.example/ferry-lines", "sea"),
            ("https://news.example/rail-strike", "news"),
            ("https://news.example/rail-strike", "travel"),
        }))
    return [
        FolksodrivenTag(
            id="sinking", label="sinking", context=sinking_ctx,
            exposition=TimeExposition(clicks=35, impressions=200),
            resource=Resource("https://news.example/titanic-sinks", 0)),
        FolksodrivenTag(
            id="passenger", label="passenger", context=passenger_ctx,
            exposition=TimeExposition(clicks=12, impressions=150),
            resource=Resource("https://news.example/ferry-lines", 1)),
    ]


def seed_templates() -> TemplateRegistry:
    registry = TemplateRegistry()
    registry = register_template(registry, QueryTemplate(
        id="built-of",
        description="what is {News} built of",
        skeleton=QueryAst(select_vars=("part",),
                          patterns=((Hole("News"), Iri("builtOf"),
                                     Var("part")),)),
        params=(TemplateParam("News", "class-instance",
                              "TypologyOfNewsObject"),)))
    registry = register_template(registry, QueryTemplate(
        id="parts-of",
        description="list the parts of {Carrier}",
        skeleton=QueryAst(select_vars=("part",),
                          patterns=((Var("part"), Iri("partOf"),
                                     Hole("Carrier")),)),
        params=(TemplateParam("Carrier", "class-instance", "passenger"),)))
    registry = register_template(registry, QueryTemplate(
        id="noted-as",
        description="things noted as {Note}",
        skeleton=QueryAst(select_vars=("thing",),
                          patterns=((Var("thing"), Iri("instanceOf"),
                                     Hole("Note")),)),
        params=(TemplateParam("Note", "literal-of-type", "string"),)))
    return registry
