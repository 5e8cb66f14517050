"""Description-logic style knowledge base: T-Box, A-Box and constrained edits.

The T-Box holds class definitions (an isA DAG rooted at Thing) and property
definitions with kind, range, cardinality bounds and an optional structural
family. The A-Box holds individuals (multi-label, multi-class) and property
assertions. Every edit operation validates its constraints and returns a new
KnowledgeBase value; rejected edits raise and leave the input untouched.

Structural families:
  Hierarchical  non-symmetric object property with a functional inverse:
                each individual has at most one father and the induced
                graph is acyclic (e.g. partOf).
  TotalOrder    object property chaining individuals into sequences: at most
                one successor and one predecessor each, no cycles
                (e.g. isFollowedBy).
  Plain         no structural constraint beyond range and cardinality.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

from .errors import (
    BadCardinality,
    ChainFork,
    ChainInconsistent,
    DuplicateAssertion,
    DuplicateIri,
    EmptyLabels,
    IsACycle,
    KindMismatch,
    NotHierarchical,
    NotTotalOrder,
    RangeViolation,
    CardinalityExceeded,
    SecondFather,
    UnknownClass,
    UnknownIndividual,
    UnknownParent,
    UnknownProperty,
    WouldCreateCycle,
)

THING = "Thing"

LITERAL_TYPES = ("string", "integer", "decimal", "boolean", "uri")

_PYTHON_TYPES = {
    "string": str,
    "integer": int,
    "decimal": (int, float),
    "boolean": bool,
    "uri": str,
}


class PropertyKind(str, enum.Enum):
    OBJECT = "ObjectProperty"
    DATATYPE = "DatatypeProperty"


class Family(str, enum.Enum):
    HIERARCHICAL = "Hierarchical"
    TOTAL_ORDER = "TotalOrder"
    PLAIN = "Plain"


@dataclass(frozen=True)
class Literal:
    """A typed literal value for datatype assertions."""

    value: object
    dtype: str = "string"

    def __post_init__(self):
        if self.dtype not in LITERAL_TYPES:
            raise ValueError(f"unknown literal type {self.dtype!r}")
        want = _PYTHON_TYPES[self.dtype]
        if self.dtype != "boolean" and isinstance(self.value, bool):
            raise ValueError("boolean value needs dtype 'boolean'")
        if not isinstance(self.value, want):
            raise ValueError(f"{self.dtype} literal cannot hold {self.value!r}")

    def lexical(self) -> str:
        if self.dtype == "boolean":
            return "true" if self.value else "false"
        return str(self.value)


@dataclass(frozen=True)
class ClassDef:
    iri: str
    label: str
    parents: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "parents", frozenset(self.parents))


@dataclass(frozen=True)
class PropertyDef:
    iri: str
    kind: PropertyKind
    range: str
    domain: str | None = None
    min_card: int = 0
    max_card: int | None = None
    family: Family = Family.PLAIN


@dataclass(frozen=True)
class Individual:
    iri: str
    labels: tuple[str, ...]
    classes: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "classes", frozenset(self.classes))

    @property
    def label(self) -> str:
        return self.labels[0]


@dataclass(frozen=True)
class Assertion:
    subject: str
    property: str
    object: str | Literal  # individual iri for object properties


@dataclass(frozen=True)
class KnowledgeBase:
    """Immutable snapshot; edits produce the next revision."""

    classes: dict[str, ClassDef] = field(default_factory=dict)
    properties: dict[str, PropertyDef] = field(default_factory=dict)
    individuals: dict[str, Individual] = field(default_factory=dict)
    assertions: frozenset[Assertion] = frozenset()
    revision: int = 0

    def __eq__(self, other):
        if not isinstance(other, KnowledgeBase):
            return NotImplemented
        return (self.classes == other.classes
                and self.properties == other.properties
                and self.individuals == other.individuals
                and self.assertions == other.assertions
                and self.revision == other.revision)


def empty_kb() -> KnowledgeBase:
    return KnowledgeBase(classes={THING: ClassDef(THING, "Thing", frozenset())})


# --- isA hierarchy ---------------------------------------------------------

def class_closure(kb: KnowledgeBase, iri: str) -> set[str]:
    """The class plus every ancestor up to Thing."""
    if iri not in kb.classes:
        raise UnknownClass(f"unknown class {iri!r}")
    seen: set[str] = set()
    stack = [iri]
    while stack:
        cur = stack.pop()
        if cur in seen:
            continue
        seen.add(cur)
        stack.extend(kb.classes[cur].parents)
    return seen


def memberships(kb: KnowledgeBase, ind_iri: str) -> set[str]:
    """Every class the individual belongs to, declared or inherited."""
    ind = kb.individuals.get(ind_iri)
    if ind is None:
        raise UnknownIndividual(f"unknown individual {ind_iri!r}")
    out: set[str] = set()
    for cls in ind.classes:
        out |= class_closure(kb, cls)
    return out


def instances_of(kb: KnowledgeBase, class_iri: str) -> list[str]:
    """Individuals of the class or any subclass, sorted by iri."""
    if class_iri not in kb.classes:
        raise UnknownClass(f"unknown class {class_iri!r}")
    return sorted(i for i in kb.individuals
                  if class_iri in memberships(kb, i))


def direct_subclasses(kb: KnowledgeBase, class_iri: str) -> list[str]:
    return sorted(c.iri for c in kb.classes.values()
                  if class_iri in c.parents)


def direct_instances(kb: KnowledgeBase, class_iri: str) -> list[str]:
    return sorted(i.iri for i in kb.individuals.values()
                  if class_iri in i.classes)


def _find_isa_cycle(classes: dict[str, ClassDef], start: str) -> list[str] | None:
    """Path start -> ... -> start along parent links, if one exists."""
    path = [start]

    def walk(cur: str) -> list[str] | None:
        for parent in sorted(classes[cur].parents):
            if parent == start:
                return path + [start]
            if parent in path:
                continue
            path.append(parent)
            hit = walk(parent)
            if hit:
                return hit
            path.pop()
        return None

    return walk(start)


# --- T-Box edits -----------------------------------------------------------

def define_class(kb: KnowledgeBase, cls: ClassDef) -> KnowledgeBase:
    if cls.iri in kb.classes:
        raise DuplicateIri(f"class {cls.iri!r} already defined")
    parents = cls.parents or frozenset({THING})
    for parent in parents:
        if parent == cls.iri:
            raise IsACycle(f"class {cls.iri!r} cannot be its own ancestor",
                           path=[cls.iri, cls.iri])
        if parent not in kb.classes:
            raise UnknownParent(f"unknown parent class {parent!r}")
    candidate = dict(kb.classes)
    candidate[cls.iri] = replace(cls, parents=parents)
    cycle = _find_isa_cycle(candidate, cls.iri)
    if cycle:
        raise IsACycle(f"defining {cls.iri!r} would close an isA cycle", path=cycle)
    return replace(kb, classes=candidate, revision=kb.revision + 1)


def redefine_class_parents(kb: KnowledgeBase, iri: str,
                           parents: frozenset[str]) -> KnowledgeBase:
    """Re-parent an existing class, keeping the isA graph acyclic."""
    if iri == THING:
        raise UnknownParent("the root class cannot be re-parented")
    if iri not in kb.classes:
        raise UnknownClass(f"unknown class {iri!r}")
    parents = frozenset(parents) or frozenset({THING})
    for parent in parents:
        if parent not in kb.classes:
            raise UnknownParent(f"unknown parent class {parent!r}")
    candidate = dict(kb.classes)
    candidate[iri] = replace(kb.classes[iri], parents=parents)
    cycle = _find_isa_cycle(candidate, iri)
    if cycle:
        raise IsACycle(f"re-parenting {iri!r} would close an isA cycle", path=cycle)
    return replace(kb, classes=candidate, revision=kb.revision + 1)


def define_property(kb: KnowledgeBase, prop: PropertyDef) -> KnowledgeBase:
    if prop.iri in kb.properties:
        raise DuplicateIri(f"property {prop.iri!r} already defined")
    if prop.min_card < 0:
        raise BadCardinality("min_card must be non-negative")
    if prop.max_card is not None and prop.max_card < prop.min_card:
        raise BadCardinality(
            f"max_card {prop.max_card} below min_card {prop.min_card}")
    if prop.family != Family.PLAIN and prop.kind != PropertyKind.OBJECT:
        raise KindMismatch(
            f"{prop.family.value} family requires an object property")
    if prop.domain is not None and prop.domain not in kb.classes:
        raise UnknownClass(f"unknown domain class {prop.domain!r}")
    if prop.kind == PropertyKind.OBJECT:
        if prop.range not in kb.classes:
            raise UnknownClass(f"unknown range class {prop.range!r}")
    elif prop.range not in LITERAL_TYPES:
        raise RangeViolation(f"unknown literal type {prop.range!r}")
    candidate = dict(kb.properties)
    candidate[prop.iri] = prop
    return replace(kb, properties=candidate, revision=kb.revision + 1)


# --- A-Box edits -----------------------------------------------------------

def assert_individual(kb: KnowledgeBase, ind: Individual) -> KnowledgeBase:
    if ind.iri in kb.individuals:
        raise DuplicateIri(f"individual {ind.iri!r} already asserted")
    if not ind.labels:
        raise EmptyLabels(f"individual {ind.iri!r} needs at least one label")
    if not ind.classes:
        raise UnknownClass(f"individual {ind.iri!r} needs at least one class")
    for cls in ind.classes:
        if cls not in kb.classes:
            raise UnknownClass(f"unknown class {cls!r}")
    candidate = dict(kb.individuals)
    candidate[ind.iri] = ind
    return replace(kb, individuals=candidate, revision=kb.revision + 1)


def relabel_individual(kb: KnowledgeBase, iri: str,
                       labels: tuple[str, ...]) -> KnowledgeBase:
    if iri not in kb.individuals:
        raise UnknownIndividual(f"unknown individual {iri!r}")
    if not labels:
        raise EmptyLabels(f"individual {iri!r} needs at least one label")
    candidate = dict(kb.individuals)
    candidate[iri] = replace(kb.individuals[iri], labels=tuple(labels))
    return replace(kb, individuals=candidate, revision=kb.revision + 1)


def _father_map(kb: KnowledgeBase, prop_iri: str) -> dict[str, str]:
    """child -> father for one hierarchical property."""
    return {a.subject: a.object for a in kb.assertions
            if a.property == prop_iri}


def _successor_map(kb: KnowledgeBase, prop_iri: str) -> dict[str, str]:
    return {a.subject: a.object for a in kb.assertions
            if a.property == prop_iri}


def set_property_value(kb: KnowledgeBase, subject: str, prop_iri: str,
                       obj: str | Literal) -> KnowledgeBase:
    """Add one assertion, enforcing range, cardinality and family rules."""
    if subject not in kb.individuals:
        raise UnknownIndividual(f"unknown subject {subject!r}")
    prop = kb.properties.get(prop_iri)
    if prop is None:
        raise UnknownProperty(f"unknown property {prop_iri!r}")

    if prop.kind == PropertyKind.OBJECT:
        if isinstance(obj, Literal):
            raise KindMismatch(
                f"object property {prop_iri!r} cannot take a literal")
        if obj not in kb.individuals:
            raise UnknownIndividual(f"unknown object individual {obj!r}")
        if prop.range not in memberships(kb, obj):
            raise RangeViolation(
                f"{obj!r} is not an instance of range class {prop.range!r}",
                property=prop_iri, range=prop.range, object=obj)
    else:
        if not isinstance(obj, Literal):
            raise KindMismatch(
                f"datatype property {prop_iri!r} needs a literal value")
        if obj.dtype != prop.range:
            raise RangeViolation(
                f"literal type {obj.dtype!r} does not satisfy range {prop.range!r}",
                property=prop_iri, range=prop.range)

    assertion = Assertion(subject, prop_iri, obj)
    if assertion in kb.assertions:
        raise DuplicateAssertion(
            f"{subject!r} already has this {prop_iri!r} value")

    have = sum(1 for a in kb.assertions
               if a.subject == subject and a.property == prop_iri)
    if prop.max_card is not None and have + 1 > prop.max_card:
        raise CardinalityExceeded(
            f"{subject!r} already carries {have} {prop_iri!r} value(s), "
            f"max is {prop.max_card}", property=prop_iri, max=prop.max_card)

    if prop.family == Family.HIERARCHICAL:
        fathers = _father_map(kb, prop_iri)
        if subject in fathers:
            raise SecondFather(
                f"{subject!r} already has father {fathers[subject]!r} "
                f"via {prop_iri!r}", property=prop_iri)
        if obj == subject:
            raise WouldCreateCycle(f"{subject!r} cannot be its own part",
                                   path=[subject, subject])
        path = [subject, obj]
        cur = obj
        while cur in fathers:
            cur = fathers[cur]
            path.append(cur)
            if cur == subject:
                raise WouldCreateCycle(
                    f"linking {subject!r} under {obj!r} closes a cycle",
                    path=path)
    elif prop.family == Family.TOTAL_ORDER:
        succ = _successor_map(kb, prop_iri)
        if subject in succ:
            raise ChainFork(
                f"{subject!r} already has successor {succ[subject]!r}",
                property=prop_iri)
        preds = {a.object for a in kb.assertions if a.property == prop_iri}
        if obj in preds:
            raise ChainFork(f"{obj!r} already has a predecessor",
                            property=prop_iri)
        if obj == subject:
            raise WouldCreateCycle(f"{subject!r} cannot follow itself",
                                   path=[subject, subject])
        cur = obj
        path = [subject, obj]
        while cur in succ:
            cur = succ[cur]
            path.append(cur)
            if cur == subject:
                raise WouldCreateCycle(
                    f"chaining {subject!r} before {obj!r} closes a cycle",
                    path=path)

    return replace(kb, assertions=kb.assertions | {assertion},
                   revision=kb.revision + 1)


def remove_individual(kb: KnowledgeBase, iri: str,
                      cascade: bool = False) -> KnowledgeBase:
    """Drop an individual and every assertion mentioning it.

    Hierarchical children are re-attached to the removed node's father (or
    become roots); total-order chains are spliced around the gap. With
    cascade=True hierarchical descendants are removed as well.
    """
    if iri not in kb.individuals:
        raise UnknownIndividual(f"unknown individual {iri!r}")

    doomed = {iri}
    if cascade:
        hier_props = [p.iri for p in kb.properties.values()
                      if p.family == Family.HIERARCHICAL]
        frontier = [iri]
        while frontier:
            cur = frontier.pop()
            for a in kb.assertions:
                if a.property in hier_props and a.object == cur \
                        and a.subject not in doomed:
                    doomed.add(a.subject)
                    frontier.append(a.subject)

    spliced: set[Assertion] = set()
    for prop in kb.properties.values():
        if prop.family == Family.HIERARCHICAL:
            fathers = _father_map(kb, prop.iri)
            for gone in doomed:
                father = fathers.get(gone)
                if father is None or father in doomed:
                    continue
                for child, f in fathers.items():
                    if f == gone and child not in doomed:
                        spliced.add(Assertion(child, prop.iri, father))
        elif prop.family == Family.TOTAL_ORDER:
            succ = _successor_map(kb, prop.iri)
            for gone in doomed:
                after = succ.get(gone)
                before = next((s for s, o in succ.items() if o == gone), None)
                if (after and after not in doomed
                        and before and before not in doomed):
                    spliced.add(Assertion(before, prop.iri, after))

    def mentions_doomed(a: Assertion) -> bool:
        return (a.subject in doomed
                or (not isinstance(a.object, Literal) and a.object in doomed))

    kept = {a for a in kb.assertions if not mentions_doomed(a)}
    individuals = {k: v for k, v in kb.individuals.items() if k not in doomed}
    return replace(kb, individuals=individuals,
                   assertions=frozenset(kept | spliced),
                   revision=kb.revision + 1)


# --- structured reads ------------------------------------------------------

def father_of(kb: KnowledgeBase, ind_iri: str, prop_iri: str) -> str | None:
    prop = kb.properties.get(prop_iri)
    if prop is None:
        raise UnknownProperty(f"unknown property {prop_iri!r}")
    if prop.family != Family.HIERARCHICAL:
        raise NotHierarchical(f"{prop_iri!r} is not a hierarchical property")
    if ind_iri not in kb.individuals:
        raise UnknownIndividual(f"unknown individual {ind_iri!r}")
    return _father_map(kb, prop_iri).get(ind_iri)


def children_of(kb: KnowledgeBase, ind_iri: str,
                prop_iris: list[str] | None = None) -> list[str]:
    """Individuals whose father is ind_iri via any given hierarchical property."""
    if ind_iri not in kb.individuals:
        raise UnknownIndividual(f"unknown individual {ind_iri!r}")
    if prop_iris is None:
        prop_iris = [p.iri for p in kb.properties.values()
                     if p.family == Family.HIERARCHICAL]
    out = {a.subject for a in kb.assertions
           if a.property in prop_iris and a.object == ind_iri}
    return sorted(out)


def level_order(kb: KnowledgeBase, individuals: list[str],
                prop_iri: str) -> list[str]:
    """Sort individuals along the successor chains of a total-order property.

    Chains (restricted to the given individuals) come first, ordered by the
    label of their head; individuals on no chain follow in label order.
    """
    prop = kb.properties.get(prop_iri)
    if prop is None:
        raise UnknownProperty(f"unknown property {prop_iri!r}")
    if prop.family != Family.TOTAL_ORDER:
        raise NotTotalOrder(f"{prop_iri!r} is not a total-order property")
    pool = list(dict.fromkeys(individuals))
    for i in pool:
        if i not in kb.individuals:
            raise UnknownIndividual(f"unknown individual {i!r}")

    members = set(pool)
    succ: dict[str, str] = {}
    has_pred: set[str] = set()
    for a in kb.assertions:
        if a.property == prop_iri and a.subject in members \
                and a.object in members:
            if a.subject in succ:
                raise ChainInconsistent(
                    f"{a.subject!r} has two successors", property=prop_iri)
            if a.object in has_pred:
                raise ChainInconsistent(
                    f"{a.object!r} has two predecessors", property=prop_iri)
            succ[a.subject] = a.object
            has_pred.add(a.object)

    def label_key(iri: str) -> tuple[str, str]:
        return (kb.individuals[iri].label, iri)

    on_chain = set(succ) | has_pred
    heads = sorted((i for i in on_chain if i not in has_pred), key=label_key)
    ordered: list[str] = []
    seen: set[str] = set()
    for head in heads:
        cur: str | None = head
        while cur is not None and cur not in seen:
            ordered.append(cur)
            seen.add(cur)
            cur = succ.get(cur)
    loose = sorted((i for i in pool if i not in on_chain), key=label_key)
    return ordered + loose


def chain_extension(kb: KnowledgeBase, individuals: set[str],
                    prop_iri: str) -> set[str]:
    """Close a set of individuals over whole successor chains.

    Any member sitting on a chain pulls in the full chain, walking both
    directions through individuals outside the set.
    """
    prop = kb.properties.get(prop_iri)
    if prop is None:
        raise UnknownProperty(f"unknown property {prop_iri!r}")
    if prop.family != Family.TOTAL_ORDER:
        raise NotTotalOrder(f"{prop_iri!r} is not a total-order property")
    succ = _successor_map(kb, prop_iri)
    pred = {o: s for s, o in succ.items()}
    out = set(individuals)
    for start in individuals:
        cur = start
        while cur in pred and pred[cur] not in out:
            cur = pred[cur]
            out.add(cur)
        cur = start
        while cur in succ and succ[cur] not in out:
            cur = succ[cur]
            out.add(cur)
    return out
