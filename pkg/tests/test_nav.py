import math
import random
from decimal import Decimal

import pytest

from folksodriven.core import COLOR_NEUTRAL, ElasticityParams, region_color
from folksodriven.errors import NotExpandable, UnknownTag
from folksodriven.fsn import EditContext, FsnGraph, apply_morphological_change, graph_from_tags
from folksodriven.fixtures import seed_tags
from folksodriven.nav import (
    CLASS,
    INDIVIDUAL,
    PieModel,
    build_root,
    colorize,
    combine_focus,
    expand,
    order_children,
    parse_sector_id,
    sector_for,
    split_percents,
    table_to_pie,
)
from folksodriven.ontology import (
    ClassDef,
    Individual,
    assert_individual,
    define_class,
    empty_kb,
)
from folksodriven.query import ResultTable


def kb_with_counts():
    """Two top classes holding 3 and 1 individuals."""
    kb = empty_kb()
    kb = define_class(kb, ClassDef("big", "big"))
    kb = define_class(kb, ClassDef("small", "small"))
    for i in range(3):
        kb = assert_individual(kb, Individual(f"b{i}", (f"b{i}",),
                                              frozenset({"big"})))
    kb = assert_individual(kb, Individual("s0", ("s0",),
                                          frozenset({"small"})))
    return kb


# --- percent arithmetic --------------------------------------------------------

def test_split_percents_exact():
    assert split_percents([3.0, 1.0]) == [75.0, 25.0]


def test_split_percents_largest_remainder_sums_to_100():
    for weights in ([1, 1, 1], [1, 1, 1, 1, 1, 1, 1], [2, 1, 1], [5, 2, 3]):
        parts = split_percents([float(w) for w in weights])
        assert round(sum(parts), 2) == 100.0


def test_split_percents_uniform_thirds():
    parts = split_percents([1.0, 1.0, 1.0])
    assert all(abs(p - 33.33) <= 0.0101 for p in parts)
    assert abs(sum(parts) - 100.0) <= 0.5


def test_split_percents_random_closure():
    rng = random.Random(12)
    for _ in range(200):
        weights = [rng.uniform(0.1, 9) for _ in range(rng.randrange(1, 9))]
        parts = split_percents(weights)
        assert round(sum(parts), 2) == 100.0
        assert all(p >= 0 for p in parts)


# --- build_root -----------------------------------------------------------------

def test_build_root_empty_kb():
    model = build_root(empty_kb())
    assert model.root.label == "Thing"
    assert model.root.kind == CLASS
    assert model.root.children == ()


def test_build_root_percents_from_counts():
    model = build_root(kb_with_counts())
    by_label = {c.label: c.percent for c in model.root.children}
    assert by_label == {"big": 75.0, "small": 25.0}


def test_build_root_uniform_fallback():
    kb = empty_kb()
    for name in ("x", "y", "z"):
        kb = define_class(kb, ClassDef(name, name))
    model = build_root(kb)
    for child in model.root.children:
        assert abs(child.percent - 33.33) <= 0.0101
    assert abs(sum(c.percent for c in model.root.children) - 100) <= 0.5


def test_root_reflects_revision():
    kb = kb_with_counts()
    assert build_root(kb).revision == kb.revision


# --- expand ----------------------------------------------------------------------

def test_expand_class_lists_members(news_kb):
    sector = sector_for(news_kb, "cls:sinking")
    expanded = expand(news_kb, sector)
    assert [c.label for c in expanded.children] == ["captain", "rescue", "ship"]
    assert all(c.kind == INDIVIDUAL for c in expanded.children)


def test_expand_passenger(news_kb):
    expanded = expand(news_kb, sector_for(news_kb, "cls:passenger"))
    assert [c.label for c in expanded.children] == ["plane", "ship", "train"]


def test_expand_classes_before_individuals(news_kb):
    kb = define_class(news_kb, ClassDef("zship", "zship",
                                        frozenset({"sinking"})))
    expanded = expand(kb, sector_for(kb, "cls:sinking"))
    kinds = [c.kind for c in expanded.children]
    assert kinds == [CLASS, INDIVIDUAL, INDIVIDUAL, INDIVIDUAL]
    assert expanded.children[0].label == "zship"


def test_expand_individual_hierarchical_children(news_kb):
    expanded = expand(news_kb, sector_for(news_kb, "ind:ship"))
    assert [c.label for c in expanded.children] == ["captain", "rescue"]


def test_expand_individual_without_children_flips_expandable(news_kb):
    sector = sector_for(news_kb, "ind:plane")
    assert sector.expandable  # optimistic before the first expansion
    expanded = expand(news_kb, sector)
    assert expanded.children == ()
    assert not expanded.expandable
    with pytest.raises(NotExpandable):
        expand(news_kb, expanded)


def test_expand_percent_closure(news_kb):
    expanded = expand(news_kb, sector_for(news_kb, "cls:sinking"))
    assert round(sum(c.percent for c in expanded.children), 2) == 100.0


def test_expand_pure_on_snapshot(news_kb):
    a = expand(news_kb, sector_for(news_kb, "cls:passenger"))
    b = expand(news_kb, sector_for(news_kb, "cls:passenger"))
    assert a == b


def test_sector_ids_stable(news_kb):
    a = expand(news_kb, sector_for(news_kb, "cls:sinking"))
    b = expand(news_kb, expand(news_kb, sector_for(news_kb, "cls:sinking")).children and
               sector_for(news_kb, "cls:sinking"))
    assert [c.id for c in a.children] == [c.id for c in b.children]
    assert parse_sector_id(a.children[0].id) == (INDIVIDUAL, "captain")


def test_expansion_depth_bounded(news_kb):
    # the partOf DAG is acyclic, so walking children terminates
    def depth(sector, seen=0):
        expanded = expand(news_kb, sector) if sector.expandable else sector
        if not expanded.children:
            return seen
        return max(depth(c, seen + 1) for c in expanded.children)

    assert depth(sector_for(news_kb, "cls:sinking")) <= 4


# --- order_children ---------------------------------------------------------------

def test_order_children_chain(news_kb):
    sectors = [sector_for(news_kb, f"ind:{i}")
               for i in ("titanic", "ship", "ferry")]
    ordered = order_children(news_kb, sectors, "isFollowedBy")
    assert [s.label for s in ordered] == ["ship", "ferry", "titanic"]


def test_order_children_lexicographic_default(news_kb):
    sectors = [sector_for(news_kb, f"ind:{i}")
               for i in ("train", "plane", "captain")]
    ordered = order_children(news_kb, sectors, None)
    assert [s.label for s in ordered] == ["captain", "plane", "train"]


# --- combine_focus -----------------------------------------------------------------

def test_focus_single_tag_memberships(news_kb):
    model = combine_focus(news_kb, ["sinking"])
    assert [c.label for c in model.root.children] \
        == ["captain", "rescue", "ship"]
    assert not model.empty
    assert model.focus_tags == ("sinking",)


def test_focus_combined_chain(news_kb):
    model = combine_focus(news_kb, ["sinking", "passenger"],
                          order_property="isFollowedBy")
    assert [c.label for c in model.root.children] \
        == ["ship", "ferry", "titanic"]


def test_focus_combined_without_order(news_kb):
    model = combine_focus(news_kb, ["sinking", "passenger"])
    assert [c.label for c in model.root.children] == ["ship"]


def test_focus_duplicate_tags_idempotent(news_kb):
    a = combine_focus(news_kb, ["sinking", "sinking"])
    b = combine_focus(news_kb, ["sinking"])
    assert a.root == b.root


def test_focus_unknown_tag(news_kb):
    with pytest.raises(UnknownTag):
        combine_focus(news_kb, ["galaxy"])


def test_focus_empty_intersection_flagged(news_kb):
    kb = define_class(news_kb, ClassDef("lonely", "lonely"))
    model = combine_focus(kb, ["sinking", "lonely"])
    assert model.empty
    assert model.root.children == ()


# --- colorize ----------------------------------------------------------------------

def test_colorize_fresh_network_red(news_kb, news_tags):
    fsn = graph_from_tags(news_tags)
    model = colorize(build_root(news_kb), fsn)
    by_label = {c.label: c.color for c in model.root.children}
    assert by_label["sinking"] == (255, 0, 0)
    assert by_label["passenger"] == (255, 0, 0)


def test_colorize_tag_without_links_neutral(news_kb, news_tags):
    fsn = graph_from_tags(news_tags, theta=1.0)  # no links form
    model = colorize(build_root(news_kb), fsn)
    by_label = {c.label: c.color for c in model.root.children}
    assert by_label["sinking"] == COLOR_NEUTRAL


def test_colorize_non_tag_sectors_neutral(news_kb, news_tags):
    fsn = graph_from_tags(news_tags)
    model = colorize(build_root(news_kb), fsn)
    by_label = {c.label: c.color for c in model.root.children}
    assert by_label["Ship"] == COLOR_NEUTRAL
    assert model.root.color == COLOR_NEUTRAL


def test_colorize_matches_mean_strain_recomputation(news_kb, news_tags):
    fsn = graph_from_tags(news_tags)
    fsn, _ = apply_morphological_change(
        fsn, EditContext("sinking", news_tags[1].context))
    model = colorize(build_root(news_kb), fsn)
    # oracle: recompute mean strain per tag directly from the link list
    params = fsn.elasticity
    for child in model.root.children:
        if child.source_iri in fsn.tags:
            incident = [l.strain for l in fsn.links
                        if child.source_iri in (l.a, l.b)]
            if incident:
                want = region_color(sum(incident) / len(incident), params)
                assert child.color == want


# --- table_to_pie --------------------------------------------------------------------

def test_table_single_row():
    table = ResultTable(columns=("x",), rows=(("ship",),))
    model = table_to_pie(table)
    assert len(model.root.children) == 1
    assert model.root.children[0].percent == 100.0


def test_table_multiplicity_weights():
    # oracle: tally 2/1/1 over four rows -> 50/25/25
    table = ResultTable(columns=("x", "y"), rows=(
        ("a", "1"), ("a", "2"), ("b", "1"), ("c", "9")))
    model = table_to_pie(table)
    percents = {c.label: c.percent for c in model.root.children}
    assert percents == {"a": 50.0, "b": 25.0, "c": 25.0}


def test_table_empty_is_flagged():
    model = table_to_pie(ResultTable(columns=("x",), rows=()))
    assert model.empty
    assert model.root.children == ()


# --- overrides ------------------------------------------------------------------------

def test_percent_overrides_replace_weights():
    kb = kb_with_counts()
    overrides = {"big": Decimal("40.00"), "small": Decimal("60.00")}
    model = build_root(kb, overrides=overrides)
    by_label = {c.label: c.percent for c in model.root.children}
    assert by_label == {"big": 40.0, "small": 60.0}


def test_partial_overrides_renormalize():
    kb = kb_with_counts()
    model = build_root(kb, overrides={"small": Decimal("3.00")})
    by_label = {c.label: c.percent for c in model.root.children}
    assert by_label == {"big": 50.0, "small": 50.0}
