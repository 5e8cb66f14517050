"""HTTP facade and persistence: the knowledge-base service.

Reads run against whatever immutable snapshot is current; every mutation is
serialized through one commit point that validates the edit, appends it to
the journal and only then publishes the new revision. Recovery is a journal
replay from the empty KB.

Engine errors map to HTTP statuses by their code: malformed payloads are
400, unknown resources 404, constraint violations 422.
"""

from __future__ import annotations

import os
import socket
import threading
from dataclasses import dataclass, field, replace
from decimal import Decimal
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse, Response
from pydantic import BaseModel, Field

from . import fixtures, nav
from .core import ElasticityParams
from .errors import DataDirUnwritable, EngineError, PortInUse, all_error_classes
from .fsn import FsnGraph, graph_from_tags, network_strain_summary, to_edge_list
from .journal import (
    JournalRecord,
    append_record,
    apply_op,
    now_utc,
    read_journal,
    replay,
)
from .ontology import KnowledgeBase, empty_kb
from .piedoc import export_pie_document, import_pie_document, model_to_document
from .query import TemplateRegistry, evaluate, instantiate_template, parse_query

DEFAULT_PORT = 8420

# one status per error code; a test enumerates every error class against this
ERROR_STATUS = {
    # malformed input
    "SyntaxError": 400,
    "MalformedDocument": 400,
    "BadPercent": 400,
    # unknown resources
    "UnknownClass": 404,
    "UnknownParent": 404,
    "UnknownIndividual": 404,
    "UnknownProperty": 404,
    "UnknownTemplate": 404,
    "UnknownTag": 404,
    # constraint violations
    "DuplicateIri": 422,
    "DuplicateAssertion": 422,
    "DuplicateId": 422,
    "DuplicateTag": 422,
    "DuplicateOrdinal": 422,
    "IsACycle": 422,
    "BadCardinality": 422,
    "KindMismatch": 422,
    "EmptyLabels": 422,
    "RangeViolation": 422,
    "CardinalityExceeded": 422,
    "WouldCreateCycle": 422,
    "SecondFather": 422,
    "ChainFork": 422,
    "ChainInconsistent": 422,
    "NotHierarchical": 422,
    "NotTotalOrder": 422,
    "UnboundSelectVar": 422,
    "UnsupportedFeature": 422,
    "RowLimitExceeded": 422,
    "MissingParam": 422,
    "RestrictionViolation": 422,
    "SlotMismatch": 422,
    "NotExpandable": 422,
    "ZeroImpressions": 422,
    "NegativeStrain": 422,
    # service lifecycle
    "PortInUse": 503,
    "DataDirUnwritable": 503,
    "EngineError": 500,
}


@dataclass(frozen=True)
class ServiceConfig:
    port: int = DEFAULT_PORT
    data_dir: Path = Path("data")
    theta: float = 0.3
    row_limit: int = 10000
    elasticity: ElasticityParams = field(default_factory=ElasticityParams)
    seed_fixture: bool = False
    host: str = "127.0.0.1"


_CONFIG_KEYS = {
    "port": int,
    "data_dir": Path,
    "theta": float,
    "row_limit": int,
    "modulus": float,
    "yield_strain": float,
    "necking_strain": float,
    "post_yield_slope": float,
    "seed_fixture": lambda v: v.lower() in ("1", "true", "yes"),
    "host": str,
}

ENV_PREFIX = "FOLKSODRIVEN_"


def load_config(config_file: Path | None = None,
                env: dict | None = None,
                cli: dict | None = None) -> ServiceConfig:
    """Merge settings: defaults, then file, then env, then CLI flags."""
    values: dict = {}
    if config_file is not None:
        for lineno, line in enumerate(
                Path(config_file).read_text().splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, raw = line.partition("=")
            key = key.strip()
            if not sep or key not in _CONFIG_KEYS:
                raise ValueError(f"bad config line {lineno}: {line!r}")
            values[key] = _CONFIG_KEYS[key](raw.strip())
    env = os.environ if env is None else env
    for key, cast in _CONFIG_KEYS.items():
        raw = env.get(ENV_PREFIX + key.upper())
        if raw is not None:
            values[key] = cast(raw)
    for key, val in (cli or {}).items():
        if val is not None:
            values[key] = val
    elasticity = ElasticityParams(
        modulus=values.pop("modulus", 1.0),
        yield_strain=values.pop("yield_strain", 0.2),
        necking_strain=values.pop("necking_strain", 0.6),
        post_yield_slope=values.pop("post_yield_slope", 0.25))
    return ServiceConfig(elasticity=elasticity, **values)


class ServiceState:
    """Shared engine state behind the app: snapshot plus single writer."""

    def __init__(self, config: ServiceConfig, kb: KnowledgeBase,
                 journal_path: Path):
        self.config = config
        self.kb = kb
        self.journal_path = journal_path
        self.fsn = FsnGraph(theta=config.theta, elasticity=config.elasticity)
        self.templates = TemplateRegistry()
        self.overrides: dict[str, Decimal] = {}
        self.prefixes = {"": ""}
        self._write_lock = threading.Lock()

    def snapshot(self) -> KnowledgeBase:
        return self.kb

    def commit(self, op: str, args: dict, actor: str) -> KnowledgeBase:
        with self._write_lock:
            new_kb = apply_op(self.kb, op, args)
            append_record(self.journal_path, JournalRecord(
                revision=new_kb.revision, timestamp=now_utc(),
                op=op, args=args, actor=actor))
            self.kb = new_kb
            return new_kb


def ensure_data_dir(data_dir: Path) -> None:
    try:
        data_dir.mkdir(parents=True, exist_ok=True)
        probe = data_dir / ".write-probe"
        probe.write_text("ok")
        probe.unlink()
    except OSError as exc:
        raise DataDirUnwritable(f"cannot write to {data_dir}: {exc}") from exc


def build_state(config: ServiceConfig) -> ServiceState:
    ensure_data_dir(config.data_dir)
    journal_path = config.data_dir / "journal.ndjson"
    records = read_journal(journal_path)
    kb = replay(records) if records else empty_kb()
    state = ServiceState(config, kb, journal_path)
    if config.seed_fixture:
        if not records:
            for op, args in fixtures.seed_edit_script():
                state.commit(op, args, actor="seed")
        state.fsn = graph_from_tags(fixtures.seed_tags(), theta=config.theta,
                                    elasticity=config.elasticity)
        state.templates = fixtures.seed_templates()
    return state


# --- request bodies -----------------------------------------------------------

class ClassBody(BaseModel):
    iri: str
    label: str
    parents: list[str] = []


class PropertyBody(BaseModel):
    iri: str
    kind: str
    range: str
    domain: str | None = None
    min_card: int = 0
    max_card: int | None = None
    family: str = "Plain"


class IndividualBody(BaseModel):
    iri: str
    labels: list[str]
    classes: list[str]


class LabelsBody(BaseModel):
    labels: list[str]


class AssertionBody(BaseModel):
    subject: str
    property: str
    object: dict


class ExpandBody(BaseModel):
    sector_id: str
    order_property: str | None = None


class FocusBody(BaseModel):
    tags: list[str] = Field(min_length=1)
    order_property: str | None = None


class QueryBody(BaseModel):
    sparql: str


class RunBody(BaseModel):
    bindings: dict = {}


def _actor(request: Request) -> str:
    return request.headers.get("x-actor", "anonymous")


def build_app(config: ServiceConfig,
              state: ServiceState | None = None) -> FastAPI:
    state = state if state is not None else build_state(config)
    app = FastAPI(title="folksodriven", docs_url=None, redoc_url=None)
    app.state.engine = state

    @app.exception_handler(EngineError)
    def engine_error(request: Request, exc: EngineError):
        status = ERROR_STATUS[exc.code]
        return JSONResponse(status_code=status, content={
            "error_code": exc.code,
            "message": exc.message,
            "details": jsonable_encoder(exc.details)})

    @app.exception_handler(RequestValidationError)
    def invalid_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={
            "error_code": "MalformedBody",
            "message": "request body failed validation",
            "details": jsonable_encoder(exc.errors())})

    @app.exception_handler(ValueError)
    def bad_value(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={
            "error_code": "MalformedBody", "message": str(exc),
            "details": {}})

    def current_model(kb) -> nav.PieModel:
        model = nav.build_root(kb, overrides=state.overrides)
        return nav.colorize(model, state.fsn, config.elasticity)

    @app.get("/api/revision")
    def revision():
        return {"revision": state.snapshot().revision}

    @app.get("/api/model/root")
    def model_root():
        return current_model(state.snapshot()).to_json()

    @app.post("/api/model/expand")
    def model_expand(body: ExpandBody):
        kb = state.snapshot()
        sector = nav.sector_for(kb, body.sector_id)
        expanded = nav.expand(kb, sector, order_property=body.order_property,
                              overrides=state.overrides)
        colored = nav.colorize(
            nav.PieModel(root=expanded, revision=kb.revision),
            state.fsn, config.elasticity)
        return {"sector": colored.root.to_json(), "revision": kb.revision}

    @app.post("/api/model/focus")
    def model_focus(body: FocusBody):
        kb = state.snapshot()
        model = nav.combine_focus(kb, body.tags,
                                  order_property=body.order_property)
        return nav.colorize(model, state.fsn, config.elasticity).to_json()

    @app.post("/api/kb/class")
    def kb_class(body: ClassBody, request: Request):
        kb = state.commit("define_class", body.model_dump(), _actor(request))
        return {"revision": kb.revision}

    @app.post("/api/kb/property")
    def kb_property(body: PropertyBody, request: Request):
        kb = state.commit("define_property", body.model_dump(),
                          _actor(request))
        return {"revision": kb.revision}

    @app.post("/api/kb/individual")
    def kb_individual(body: IndividualBody, request: Request):
        kb = state.commit("assert_individual", body.model_dump(),
                          _actor(request))
        return {"revision": kb.revision}

    @app.patch("/api/kb/individual/{iri}")
    def kb_relabel(iri: str, body: LabelsBody, request: Request):
        kb = state.commit("relabel_individual",
                          {"iri": iri, "labels": body.labels},
                          _actor(request))
        return {"revision": kb.revision}

    @app.put("/api/kb/assertion")
    def kb_assertion(body: AssertionBody, request: Request):
        obj = body.object
        if not ({"iri"} == set(obj) or {"value", "dtype"} == set(obj)):
            raise ValueError(
                "assertion object needs 'iri' or 'value'+'dtype'")
        kb = state.commit("set_property_value", body.model_dump(),
                          _actor(request))
        return {"revision": kb.revision}

    @app.delete("/api/kb/individual/{iri}")
    def kb_remove(iri: str, request: Request, cascade: bool = False):
        kb = state.commit("remove_individual",
                          {"iri": iri, "cascade": cascade}, _actor(request))
        return {"revision": kb.revision}

    @app.post("/api/query")
    def run_query(body: QueryBody):
        kb = state.snapshot()
        ast = parse_query(body.sparql, prefixes=state.prefixes)
        table = evaluate(ast, kb, row_limit=config.row_limit)
        out = table.to_json()
        out["revision"] = kb.revision
        return out

    @app.get("/api/kb/properties")
    def list_properties():
        kb = state.snapshot()
        return {"properties": [
            {"iri": p.iri, "kind": p.kind.value, "range": p.range,
             "domain": p.domain, "min_card": p.min_card,
             "max_card": p.max_card, "family": p.family.value}
            for _, p in sorted(kb.properties.items())]}

    @app.get("/api/templates")
    def list_templates():
        return {"templates": [
            {"id": t.id, "description": t.description,
             "params": [{"label": p.label, "type": p.type,
                         "restriction": p.restriction} for p in t.params]}
            for t in state.templates.list()]}

    @app.post("/api/templates/{template_id}/run")
    def run_template(template_id: str, body: RunBody):
        kb = state.snapshot()
        ast = instantiate_template(state.templates, template_id,
                                   body.bindings, kb)
        table = evaluate(ast, kb, row_limit=config.row_limit)
        out = table.to_json()
        out["revision"] = kb.revision
        return out

    @app.get("/api/export/piechart")
    def export_chart():
        kb = state.snapshot()
        doc = model_to_document(current_model(kb))
        return Response(content=export_pie_document(doc),
                        media_type="application/xml")

    @app.post("/api/import/piechart")
    async def import_chart(request: Request):
        doc = import_pie_document(await request.body())
        state.overrides = {s.name: s.percent for s in doc.slices}
        return {"slices": len(doc.slices)}

    @app.get("/api/fsn/summary")
    def fsn_summary():
        return network_strain_summary(state.fsn)

    @app.get("/api/fsn/edgelist")
    def fsn_edgelist():
        return PlainTextResponse(to_edge_list(state.fsn))

    return app


def check_port_free(host: str, port: int) -> None:
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((host, port))
    except OSError as exc:
        raise PortInUse(f"port {port} is already bound: {exc}") from exc
    finally:
        probe.close()


def serve(config: ServiceConfig) -> None:
    """Preflight the environment, then run the service until interrupted."""
    import uvicorn

    ensure_data_dir(config.data_dir)
    check_port_free(config.host, config.port)
    app = build_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")


def _missing_mappings() -> list[str]:
    return [cls.code for cls in all_error_classes()
            if cls.code not in ERROR_STATUS]
