import json
import socket
import threading
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from folksodriven.errors import DataDirUnwritable, PortInUse, all_error_classes
from folksodriven.journal import (
    JournalRecord,
    kb_canonical_bytes,
    read_journal,
    replay,
)
from folksodriven.service import (
    ERROR_STATUS,
    ServiceConfig,
    build_app,
    build_state,
    check_port_free,
    load_config,
)


def make_state(tmp_path, seed=True, **kw):
    config = ServiceConfig(data_dir=tmp_path / "data", seed_fixture=seed, **kw)
    return config, build_state(config)


def client_for(tmp_path, seed=True, **kw):
    config, state = make_state(tmp_path, seed=seed, **kw)
    app = build_app(config, state)
    return TestClient(app, raise_server_exceptions=False), state


# --- config --------------------------------------------------------------------

def test_config_defaults():
    config = load_config(env={})
    assert config.port == 8420
    assert config.theta == 0.3
    assert config.row_limit == 10000


def test_config_file_env_cli_precedence(tmp_path):
    cfg = tmp_path / "svc.conf"
    cfg.write_text("port=9000\ntheta=0.5\n# comment\nyield_strain=0.1\n")
    config = load_config(config_file=cfg,
                         env={"FOLKSODRIVEN_PORT": "9100"},
                         cli={"theta": 0.7})
    assert config.port == 9100      # env beats file
    assert config.theta == 0.7      # cli beats env and file
    assert config.elasticity.yield_strain == 0.1


def test_config_rejects_unknown_keys(tmp_path):
    cfg = tmp_path / "svc.conf"
    cfg.write_text("bogus=1\n")
    with pytest.raises(ValueError):
        load_config(config_file=cfg, env={})


# --- lifecycle ------------------------------------------------------------------

def test_cold_start_has_only_thing(tmp_path):
    _config, state = make_state(tmp_path, seed=False)
    assert state.kb.revision == 0
    assert list(state.kb.classes) == ["Thing"]


def test_port_in_use_detected():
    blocker = socket.socket()
    blocker.bind(("127.0.0.1", 0))
    port = blocker.getsockname()[1]
    try:
        with pytest.raises(PortInUse):
            check_port_free("127.0.0.1", port)
    finally:
        blocker.close()


def test_unwritable_data_dir(tmp_path):
    blocker = tmp_path / "afile"
    blocker.write_text("not a directory")
    with pytest.raises(DataDirUnwritable):
        build_state(ServiceConfig(data_dir=blocker / "sub"))


# --- persistence -----------------------------------------------------------------

def edit_script():
    """25 valid edits exercising every journaled op."""
    ops = [
        ("define_class", {"iri": "story", "label": "story",
                          "parents": ["Thing"]}),
        ("define_class", {"iri": "vessel", "label": "vessel",
                          "parents": ["Thing"]}),
        ("define_class", {"iri": "liner", "label": "liner",
                          "parents": ["vessel"]}),
        ("define_property", {"iri": "partOf", "kind": "ObjectProperty",
                             "range": "Thing", "domain": None,
                             "min_card": 0, "max_card": None,
                             "family": "Hierarchical"}),
        ("define_property", {"iri": "then", "kind": "ObjectProperty",
                             "range": "Thing", "domain": None,
                             "min_card": 0, "max_card": None,
                             "family": "TotalOrder"}),
        ("define_property", {"iri": "note", "kind": "DatatypeProperty",
                             "range": "string", "domain": None,
                             "min_card": 0, "max_card": 2,
                             "family": "Plain"}),
    ]
    for i in range(8):
        ops.append(("assert_individual",
                    {"iri": f"n{i}", "labels": [f"node {i}"],
                     "classes": ["story" if i % 2 else "vessel"]}))
    ops += [
        ("set_property_value", {"subject": "n1", "property": "partOf",
                                "object": {"iri": "n0"}}),
        ("set_property_value", {"subject": "n2", "property": "partOf",
                                "object": {"iri": "n0"}}),
        ("set_property_value", {"subject": "n3", "property": "partOf",
                                "object": {"iri": "n1"}}),
        ("set_property_value", {"subject": "n4", "property": "then",
                                "object": {"iri": "n5"}}),
        ("set_property_value", {"subject": "n5", "property": "then",
                                "object": {"iri": "n6"}}),
        ("set_property_value", {"subject": "n0", "property": "note",
                                "object": {"value": "hello", "dtype": "string"}}),
        ("relabel_individual", {"iri": "n7", "labels": ["renamed", "alt"]}),
        ("set_property_value", {"subject": "n7", "property": "partOf",
                                "object": {"iri": "n3"}}),
        ("remove_individual", {"iri": "n5", "cascade": False}),
        ("set_property_value", {"subject": "n6", "property": "note",
                                "object": {"value": "tail", "dtype": "string"}}),
        ("remove_individual", {"iri": "n1", "cascade": False}),
    ]
    assert len(ops) == 25
    return ops


def test_journal_replay_after_crash_at_every_prefix(tmp_path):
    config, state = make_state(tmp_path, seed=False)
    snapshots = [kb_canonical_bytes(state.kb)]
    for op, args in edit_script():
        state.commit(op, args, actor="script")
        snapshots.append(kb_canonical_bytes(state.kb))
    journal_path = state.journal_path
    lines = journal_path.read_bytes().splitlines(keepends=True)
    assert len(lines) == 25
    for k in range(26):
        crash = tmp_path / f"crash{k}.ndjson"
        crash.write_bytes(b"".join(lines[:k]))
        rebuilt = replay(read_journal(crash))
        assert kb_canonical_bytes(rebuilt) == snapshots[k], f"prefix {k}"


def test_torn_final_line_is_ignored(tmp_path):
    config, state = make_state(tmp_path, seed=False)
    for op, args in edit_script()[:3]:
        state.commit(op, args, actor="script")
    data = state.journal_path.read_bytes()
    state.journal_path.write_bytes(data + b'{"revision": 4, "truncat')
    records = read_journal(state.journal_path)
    assert len(records) == 3
    assert replay(records).revision == 3


def test_restart_reproduces_snapshot(tmp_path):
    config, state = make_state(tmp_path, seed=False)
    for op, args in edit_script()[:10]:
        state.commit(op, args, actor="script")
    live = kb_canonical_bytes(state.kb)
    _config2, state2 = make_state(tmp_path, seed=False)
    assert state2.kb.revision == 10
    assert kb_canonical_bytes(state2.kb) == live


def test_seed_applied_once(tmp_path):
    config, state = make_state(tmp_path, seed=True)
    first = state.kb.revision
    assert first > 0
    _config2, state2 = make_state(tmp_path, seed=True)
    assert state2.kb.revision == first


# --- HTTP endpoints -----------------------------------------------------------------

def test_root_model_cold_kb(tmp_path):
    client, _ = client_for(tmp_path, seed=False)
    body = client.get("/api/model/root").json()
    assert body["root"]["label"] == "Thing"
    assert body["root"]["children"] == []


def test_root_model_seeded(tmp_path):
    client, _ = client_for(tmp_path)
    body = client.get("/api/model/root").json()
    labels = [c["label"] for c in body["root"]["children"]]
    assert labels == ["Ship", "TypologyOfNewsObject", "passenger", "sinking"]


def test_expand_endpoint(tmp_path):
    client, _ = client_for(tmp_path)
    body = client.post("/api/model/expand",
                       json={"sector_id": "cls:passenger"}).json()
    assert [c["label"] for c in body["sector"]["children"]] \
        == ["plane", "ship", "train"]


def test_focus_endpoint_orders_chain(tmp_path):
    client, _ = client_for(tmp_path)
    body = client.post("/api/model/focus",
                       json={"tags": ["sinking", "passenger"],
                             "order_property": "isFollowedBy"}).json()
    assert [c["label"] for c in body["root"]["children"]] \
        == ["ship", "ferry", "titanic"]


def test_edit_endpoints_roundtrip(tmp_path):
    client, state = client_for(tmp_path, seed=False)
    r = client.post("/api/kb/class",
                    json={"iri": "K", "label": "K", "parents": []})
    assert r.status_code == 200 and r.json()["revision"] == 1
    r = client.post("/api/kb/property",
                    json={"iri": "p", "kind": "ObjectProperty", "range": "K"})
    assert r.status_code == 200
    r = client.post("/api/kb/individual",
                    json={"iri": "i", "labels": ["i"], "classes": ["K"]})
    assert r.status_code == 200
    r = client.post("/api/kb/individual",
                    json={"iri": "j", "labels": ["j"], "classes": ["K"]})
    assert r.status_code == 200
    r = client.put("/api/kb/assertion",
                   json={"subject": "i", "property": "p",
                         "object": {"iri": "j"}})
    assert r.status_code == 200
    r = client.patch("/api/kb/individual/i", json={"labels": ["I prime"]})
    assert r.status_code == 200
    r = client.delete("/api/kb/individual/j")
    assert r.status_code == 200
    assert client.get("/api/revision").json()["revision"] == 7
    assert state.kb.individuals["i"].label == "I prime"


def test_assertion_range_violation_maps_to_422(tmp_path):
    client, _ = client_for(tmp_path)
    r = client.put("/api/kb/assertion",
                   json={"subject": "Sinking", "property": "builtOf",
                         "object": {"iri": "plane"}})
    assert r.status_code == 422
    body = r.json()
    assert body["error_code"] == "RangeViolation"
    assert "message" in body and "details" in body


def test_unknown_resource_maps_to_404(tmp_path):
    client, _ = client_for(tmp_path)
    r = client.delete("/api/kb/individual/ghost")
    assert r.status_code == 404
    assert r.json()["error_code"] == "UnknownIndividual"
    r = client.post("/api/templates/ghost/run", json={"bindings": {}})
    assert r.status_code == 404
    assert r.json()["error_code"] == "UnknownTemplate"


def test_malformed_body_maps_to_400(tmp_path):
    client, _ = client_for(tmp_path)
    r = client.post("/api/kb/class", json={"iri": "x"})
    assert r.status_code == 400
    assert r.json()["error_code"] == "MalformedBody"
    r = client.put("/api/kb/assertion",
                   json={"subject": "s", "property": "p",
                         "object": {"wrong": 1}})
    assert r.status_code == 400


def test_query_endpoint_matches_engine(tmp_path):
    client, state = client_for(tmp_path)
    r = client.post("/api/query",
                    json={"sparql": "SELECT ?x WHERE { ?x a :Ship }"})
    assert r.status_code == 200
    body = r.json()
    from folksodriven.query import evaluate, parse_query
    table = evaluate(parse_query("SELECT ?x WHERE { ?x a :Ship }"), state.kb)
    assert body["columns"] == list(table.columns)
    assert [tuple(row) for row in body["rows"]] == list(table.rows)
    assert body["revision"] == state.kb.revision


def test_query_syntax_error_maps_to_400(tmp_path):
    client, _ = client_for(tmp_path)
    r = client.post("/api/query", json={"sparql": "SELECT WHERE"})
    assert r.status_code == 400
    assert r.json()["error_code"] == "SyntaxError"
    assert r.json()["details"]["line"] == 1


def test_unsupported_feature_maps_to_422(tmp_path):
    client, _ = client_for(tmp_path)
    r = client.post("/api/query", json={
        "sparql": "SELECT ?x WHERE { OPTIONAL { ?x a :Ship } }"})
    assert r.status_code == 422
    assert r.json()["error_code"] == "UnsupportedFeature"


def test_property_listing(tmp_path):
    client, _ = client_for(tmp_path)
    props = {p["iri"]: p
             for p in client.get("/api/kb/properties").json()["properties"]}
    assert props["builtOf"]["range"] == "Ship"
    assert props["builtOf"]["kind"] == "ObjectProperty"
    assert props["partOf"]["family"] == "Hierarchical"
    assert props["instanceOf"]["kind"] == "DatatypeProperty"


def test_templates_listing_and_run(tmp_path):
    client, _ = client_for(tmp_path)
    listing = client.get("/api/templates").json()["templates"]
    ids = [t["id"] for t in listing]
    assert "built-of" in ids and "parts-of" in ids
    assert any("{News}" in t["description"] for t in listing)
    r = client.post("/api/templates/built-of/run",
                    json={"bindings": {"News": "Sinking"}})
    assert r.status_code == 200
    assert r.json()["rows"] == [["Passenger"]]
    r = client.post("/api/templates/built-of/run",
                    json={"bindings": {"News": "titanic"}})
    assert r.status_code == 422
    assert r.json()["error_code"] == "RestrictionViolation"


def test_export_import_piechart_cycle(tmp_path):
    client, _ = client_for(tmp_path)
    exported = client.get("/api/export/piechart")
    assert exported.status_code == 200
    assert exported.headers["content-type"].startswith("application/xml")
    from folksodriven.piedoc import import_pie_document
    doc = import_pie_document(exported.content)
    assert [s.name for s in doc.slices] \
        == ["Ship", "TypologyOfNewsObject", "passenger", "sinking"]
    r = client.post("/api/import/piechart", content=exported.content)
    assert r.status_code == 200
    assert r.json()["slices"] == 4


def test_import_overrides_weights(tmp_path):
    client, _ = client_for(tmp_path)
    doc = (b"<piechart>"
           b"<slice><name>sinking</name><percent>70.00</percent></slice>"
           b"<slice><name>passenger</name><percent>10.00</percent></slice>"
           b"<slice><name>Ship</name><percent>10.00</percent></slice>"
           b"<slice><name>TypologyOfNewsObject</name><percent>10.00</percent>"
           b"</slice></piechart>")
    assert client.post("/api/import/piechart", content=doc).status_code == 200
    body = client.get("/api/model/root").json()
    percents = {c["label"]: c["percent"] for c in body["root"]["children"]}
    assert percents["sinking"] == 70.0
    assert percents["passenger"] == 10.0


def test_import_bad_percent_maps_to_400(tmp_path):
    client, _ = client_for(tmp_path)
    doc = (b"<piechart><slice><name>x</name><percent>120</percent>"
           b"</slice></piechart>")
    r = client.post("/api/import/piechart", content=doc)
    assert r.status_code == 400
    assert r.json()["error_code"] == "BadPercent"


def test_fsn_endpoints(tmp_path):
    client, _ = client_for(tmp_path)
    summary = client.get("/api/fsn/summary").json()
    assert summary["tags"] == 2
    assert summary["links"] == 1
    assert summary["regions"]["Elastic"] == 1
    edges = client.get("/api/fsn/edgelist")
    assert edges.headers["content-type"].startswith("text/plain")
    fields = edges.text.strip().split("\t")
    assert fields[0] == "passenger" and fields[1] == "sinking"


def test_idempotent_gets(tmp_path):
    client, _ = client_for(tmp_path)
    a = client.get("/api/model/root")
    b = client.get("/api/model/root")
    assert a.content == b.content
    assert client.get("/api/fsn/summary").content \
        == client.get("/api/fsn/summary").content


def test_unknown_route_is_404(tmp_path):
    client, _ = client_for(tmp_path)
    assert client.get("/api/nothing").status_code == 404


# --- error mapping totality ------------------------------------------------------

def test_every_error_code_has_exactly_one_mapping():
    codes = [cls.code for cls in all_error_classes()]
    for code in codes:
        assert code in ERROR_STATUS, f"unmapped error code {code}"
    statuses = set(ERROR_STATUS.values())
    assert statuses <= {400, 404, 422, 500, 503}
    # codes sharing a class name never map to two statuses: dict keys are
    # unique by construction, so totality plus coverage is the whole check
    assert len(set(codes)) == len(codes)


# --- concurrency ------------------------------------------------------------------

def test_concurrent_conflicting_edits_one_winner(tmp_path):
    client, state = client_for(tmp_path, seed=False)
    client.post("/api/kb/class", json={"iri": "K", "label": "K",
                                       "parents": []})
    results = []

    def racer(n):
        local = TestClient(build_app(state.config, state),
                           raise_server_exceptions=False)
        r = local.post("/api/kb/individual",
                       json={"iri": "contested", "labels": [f"from {n}"],
                             "classes": ["K"]})
        results.append(r.status_code)

    threads = [threading.Thread(target=racer, args=(i,)) for i in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert sorted(results) == [200, 422, 422, 422]
    assert state.kb.revision == 2


def test_concurrent_writer_harness(tmp_path):
    config, state = make_state(tmp_path, seed=False)
    state.commit("define_class", {"iri": "K", "label": "K",
                                  "parents": ["Thing"]}, "setup")
    app = build_app(config, state)
    accepted = []
    lock = threading.Lock()

    def worker(wid):
        client = TestClient(app, raise_server_exceptions=False)
        ok = 0
        for i in range(25):
            if i % 5 == 4:  # deliberate duplicate -> constraint error
                payload = {"iri": f"w{(wid + 1) % 4}-{i - 1}",
                           "labels": ["dup"], "classes": ["K"]}
            else:
                payload = {"iri": f"w{wid}-{i}", "labels": ["ok"],
                           "classes": ["K"]}
            r = client.post("/api/kb/individual", json=payload)
            assert r.status_code in (200, 422)
            if r.status_code == 200:
                ok += 1
        with lock:
            accepted.append(ok)

    threads = [threading.Thread(target=worker, args=(i,)) for i in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    total_accepted = sum(accepted) + 1  # plus the setup class
    assert state.kb.revision == total_accepted
    records = read_journal(state.journal_path)
    assert len(records) == total_accepted
    rebuilt = replay(records)
    assert kb_canonical_bytes(rebuilt) == kb_canonical_bytes(state.kb)
