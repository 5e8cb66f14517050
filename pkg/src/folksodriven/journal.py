"""Append-only edit journal: one JSON record per line.

Replaying a journal from the empty KB reproduces the exact snapshot at every
prefix, which is the whole persistence story: the server appends a record
inside the commit point before publishing the new revision, and recovery is
a replay. A torn final line (crash mid-append) is ignored.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

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
    redefine_class_parents,
    relabel_individual,
    remove_individual,
    set_property_value,
)


@dataclass(frozen=True)
class JournalRecord:
    revision: int
    timestamp: str
    op: str
    args: dict
    actor: str

    def to_line(self) -> str:
        return json.dumps(asdict(self), sort_keys=True,
                          separators=(",", ":")) + "\n"


def now_utc() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


# --- argument (de)serialization ---------------------------------------------

def object_to_args(obj: str | Literal) -> dict:
    if isinstance(obj, Literal):
        return {"value": obj.value, "dtype": obj.dtype}
    return {"iri": obj}


def object_from_args(args: dict) -> str | Literal:
    if "iri" in args:
        return args["iri"]
    return Literal(args["value"], args["dtype"])


def class_args(cls: ClassDef) -> dict:
    return {"iri": cls.iri, "label": cls.label,
            "parents": sorted(cls.parents)}


def property_args(prop: PropertyDef) -> dict:
    return {"iri": prop.iri, "kind": prop.kind.value, "range": prop.range,
            "domain": prop.domain, "min_card": prop.min_card,
            "max_card": prop.max_card, "family": prop.family.value}


def individual_args(ind: Individual) -> dict:
    return {"iri": ind.iri, "labels": list(ind.labels),
            "classes": sorted(ind.classes)}


def apply_op(kb: KnowledgeBase, op: str, args: dict) -> KnowledgeBase:
    """Apply one journaled operation to a snapshot."""
    if op == "define_class":
        return define_class(kb, ClassDef(args["iri"], args["label"],
                                         frozenset(args["parents"])))
    if op == "redefine_class_parents":
        return redefine_class_parents(kb, args["iri"],
                                      frozenset(args["parents"]))
    if op == "define_property":
        return define_property(kb, PropertyDef(
            iri=args["iri"], kind=PropertyKind(args["kind"]),
            range=args["range"], domain=args.get("domain"),
            min_card=args.get("min_card", 0), max_card=args.get("max_card"),
            family=Family(args.get("family", "Plain"))))
    if op == "assert_individual":
        return assert_individual(kb, Individual(
            args["iri"], tuple(args["labels"]), frozenset(args["classes"])))
    if op == "relabel_individual":
        return relabel_individual(kb, args["iri"], tuple(args["labels"]))
    if op == "set_property_value":
        return set_property_value(kb, args["subject"], args["property"],
                                  object_from_args(args["object"]))
    if op == "remove_individual":
        return remove_individual(kb, args["iri"],
                                 cascade=args.get("cascade", False))
    raise ValueError(f"unknown journal op {op!r}")


# --- file handling -----------------------------------------------------------

def append_record(path: Path, record: JournalRecord) -> None:
    with open(path, "a", encoding="utf-8", newline="\n") as fh:
        fh.write(record.to_line())
        fh.flush()


def read_journal(path: Path) -> list[JournalRecord]:
    """Read all complete records; a torn trailing line is dropped."""
    if not path.exists():
        return []
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    for i, line in enumerate(lines):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError:
            if i >= len(lines) - 2:
                break  # interrupted final write
            raise
        records.append(JournalRecord(**raw))
    return records


def replay(records: list[JournalRecord]) -> KnowledgeBase:
    """Rebuild the KB from scratch; revisions must rise by exactly one."""
    kb = empty_kb()
    for record in records:
        kb = apply_op(kb, record.op, record.args)
        if kb.revision != record.revision:
            raise ValueError(
                f"journal revision {record.revision} does not match "
                f"replayed revision {kb.revision}")
    return kb


def kb_canonical(kb: KnowledgeBase) -> dict:
    """Order-independent snapshot structure for byte comparisons."""
    def assertion_key(a: Assertion) -> tuple:
        obj = a.object if isinstance(a.object, str) \
            else f"{a.object.dtype}:{a.object.lexical()}"
        return (a.subject, a.property, obj)

    return {
        "revision": kb.revision,
        "classes": {c.iri: {"label": c.label, "parents": sorted(c.parents)}
                    for c in kb.classes.values()},
        "properties": {p.iri: property_args(p)
                       for p in kb.properties.values()},
        "individuals": {i.iri: individual_args(i)
                        for i in kb.individuals.values()},
        "assertions": sorted(
            ({"subject": a.subject, "property": a.property,
              "object": object_to_args(a.object)}
             for a in kb.assertions),
            key=lambda d: json.dumps(d, sort_keys=True)),
    }


def kb_canonical_bytes(kb: KnowledgeBase) -> bytes:
    return json.dumps(kb_canonical(kb), sort_keys=True,
                      separators=(",", ":")).encode("utf-8")
