"""Folksodriven tag knowledge-base engine and workbench service."""

from .core import (
    ElasticityParams,
    FolksodrivenTag,
    FormalContext,
    MinkowskiPoint,
    Region,
    Resource,
    StressStrainSample,
    TimeExposition,
    classify_region,
    compute_ctr,
    context_density,
    embed,
    region_color,
    stress_at,
)
from .fsn import (
    FsnGraph,
    FsnLink,
    UnitCell,
    apply_morphological_change,
    graph_from_tags,
    network_strain_summary,
    overlap,
    rebuild_links,
    to_edge_list,
    unit_cells,
)
from .nav import PieModel, PieSector, build_root, colorize, combine_focus, expand, table_to_pie
from .ontology import (
    Assertion,
    ClassDef,
    Family,
    Individual,
    KnowledgeBase,
    Literal,
    PropertyDef,
    PropertyKind,
    assert_individual,
    define_class,
    define_property,
    empty_kb,
    father_of,
    level_order,
    remove_individual,
    set_property_value,
)
from .query import (
    QueryAst,
    QueryTemplate,
    ResultTable,
    TemplateParam,
    TemplateRegistry,
    evaluate,
    format_query,
    instantiate_template,
    parse_query,
    register_template,
)

__version__ = "0.1.0"
