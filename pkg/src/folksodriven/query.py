"""SPARQL-subset parser/evaluator and the template-query registry.

Supported grammar (prefixes are pre-declared by the host, not in the query):

    query    := SELECT var+ WHERE { element* }
    element  := pattern '.'? | filter '.'?
    pattern  := subject predicate object
    subject  := var | pname
    predicate:= var | pname | 'a'
    object   := var | pname | literal
    filter   := FILTER '(' var ('='|'!=') (pname | literal) ')'
    literal  := "string" | integer | decimal | true | false

Everything else SPARQL defines (OPTIONAL, UNION, PREFIX, DISTINCT, ORDER,
aggregates, property paths, updates) is rejected by name. Evaluation is
set-semantic: results are deduplicated and sorted, and `a` patterns see the
full isA closure, so instances of a subclass match a superclass pattern.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .errors import (
    DuplicateId,
    MissingParam,
    QuerySyntaxError,
    RestrictionViolation,
    RowLimitExceeded,
    SlotMismatch,
    UnboundSelectVar,
    UnknownTemplate,
    UnsupportedFeature,
)
from .ontology import (
    _PYTHON_TYPES,
    KnowledgeBase,
    Literal,
    memberships,
)

TYPE_PREDICATE = "a"  # reserved predicate for class membership

DEFAULT_ROW_LIMIT = 10000

UNSUPPORTED_KEYWORDS = {
    "OPTIONAL", "UNION", "PREFIX", "BASE", "ORDER", "LIMIT", "OFFSET",
    "GROUP", "HAVING", "ASK", "CONSTRUCT", "DESCRIBE", "DISTINCT", "BIND",
    "MINUS", "GRAPH", "SERVICE", "EXISTS", "REGEX", "VALUES", "INSERT",
    "DELETE", "NOT",
}


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Iri:
    value: str


@dataclass(frozen=True)
class Hole:
    label: str


Term = Var | Iri | Literal | Hole
TriplePattern = tuple  # (Term, Term, Term)


@dataclass(frozen=True)
class Filter:
    var: str
    op: str  # "=" or "!="
    value: Iri | Literal


@dataclass(frozen=True)
class QueryAst:
    select_vars: tuple[str, ...]
    patterns: tuple[TriplePattern, ...]
    filters: tuple[Filter, ...] = ()

    def pattern_vars(self) -> set[str]:
        return {t.name for p in self.patterns for t in p if isinstance(t, Var)}

    def holes(self) -> set[str]:
        found = {t.label for p in self.patterns for t in p
                 if isinstance(t, Hole)}
        found |= {f.value.label for f in self.filters
                  if isinstance(f.value, Hole)}
        return found


@dataclass(frozen=True)
class ResultTable:
    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def to_json(self) -> dict:
        return {"columns": list(self.columns),
                "rows": [list(r) for r in self.rows]}


# --- tokenizer --------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<var>\?[A-Za-z_][A-Za-z0-9_]*)
  | (?P<pname>[A-Za-z_][A-Za-z0-9_-]*)?:(?P<local>[A-Za-z0-9_][A-Za-z0-9_.-]*)
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<number>\d+(?:\.\d+)?)
  | (?P<neq>!=)
  | (?P<punct>[{}().=])
""", re.VERBOSE)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise QuerySyntaxError(f"unexpected character {text[pos]!r}",
                                   line=line, col=col, expected="token")
        raw = m.group(0)
        if m.group("local") is not None:
            kind = "pname"
        else:
            kind = next(name for name in ("ws", "var", "word", "string",
                                          "number", "neq", "punct")
                        if m.group(name) is not None)
        if kind != "ws":
            tokens.append(_Token(kind, raw, line, col))
        newlines = raw.count("\n")
        if newlines:
            line += newlines
            col = len(raw) - raw.rfind("\n")
        else:
            col += len(raw)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


# --- parser -----------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: list[_Token], prefixes: dict[str, str]):
        self.tokens = tokens
        self.pos = 0
        self.prefixes = prefixes

    @property
    def cur(self) -> _Token:
        return self.tokens[self.pos]

    def error(self, expected: str):
        tok = self.cur
        shown = tok.text or "end of input"
        raise QuerySyntaxError(f"expected {expected}, found {shown!r}",
                               line=tok.line, col=tok.col, expected=expected)

    def check_unsupported(self):
        tok = self.cur
        if tok.kind == "word" and tok.text.upper() in UNSUPPORTED_KEYWORDS:
            raise UnsupportedFeature(tok.text.upper(),
                                     line=tok.line, col=tok.col)

    def take_word(self, word: str):
        if self.cur.kind == "word" and self.cur.text.upper() == word:
            self.pos += 1
            return
        self.check_unsupported()
        self.error(word)

    def take_punct(self, text: str):
        if self.cur.kind in ("punct", "neq") and self.cur.text == text:
            self.pos += 1
            return
        self.check_unsupported()
        self.error(f"'{text}'")

    def expand_pname(self, tok: _Token) -> str:
        prefix, _, local = tok.text.partition(":")
        if prefix not in self.prefixes:
            raise QuerySyntaxError(f"undeclared prefix {prefix!r}",
                                   line=tok.line, col=tok.col,
                                   expected="declared prefix")
        return self.prefixes[prefix] + local

    def term(self, position: str) -> Term:
        tok = self.cur
        if tok.kind == "var":
            self.pos += 1
            return Var(tok.text[1:])
        if tok.kind == "pname":
            self.pos += 1
            return Iri(self.expand_pname(tok))
        if position == "predicate" and tok.kind == "word" and tok.text == "a":
            self.pos += 1
            return Iri(TYPE_PREDICATE)
        if position == "object":
            if tok.kind == "string":
                self.pos += 1
                body = tok.text[1:-1]
                return Literal(body.replace('\\"', '"').replace("\\\\", "\\"),
                               "string")
            if tok.kind == "number":
                self.pos += 1
                if "." in tok.text:
                    return Literal(float(tok.text), "decimal")
                return Literal(int(tok.text), "integer")
            if tok.kind == "word" and tok.text in ("true", "false"):
                self.pos += 1
                return Literal(tok.text == "true", "boolean")
        self.check_unsupported()
        self.error(f"{position} term")

    def filter_value(self) -> Iri | Literal:
        tok = self.cur
        if tok.kind == "pname" or tok.kind in ("string", "number") \
                or (tok.kind == "word" and tok.text in ("true", "false")):
            value = self.term("object")
            assert isinstance(value, (Iri, Literal))
            return value
        self.error("constant")

    def parse(self) -> QueryAst:
        self.take_word("SELECT")
        select_vars = []
        while self.cur.kind == "var":
            select_vars.append(self.cur.text[1:])
            self.pos += 1
        if not select_vars:
            self.check_unsupported()
            self.error("at least one ?variable")
        self.take_word("WHERE")
        self.take_punct("{")
        patterns: list[TriplePattern] = []
        filters: list[Filter] = []
        while True:
            if self.cur.kind == "punct" and self.cur.text == "}":
                self.pos += 1
                break
            if self.cur.kind == "eof":
                self.error("'}'")
            if self.cur.kind == "word" and self.cur.text.upper() == "FILTER":
                self.pos += 1
                self.take_punct("(")
                if self.cur.kind != "var":
                    self.error("?variable")
                var = self.cur.text[1:]
                self.pos += 1
                if self.cur.kind == "neq":
                    op = "!="
                elif self.cur.kind == "punct" and self.cur.text == "=":
                    op = "="
                else:
                    self.error("'=' or '!='")
                self.pos += 1
                value = self.filter_value()
                self.take_punct(")")
                filters.append(Filter(var=var, op=op, value=value))
            else:
                self.check_unsupported()
                s = self.term("subject")
                if isinstance(s, Literal):
                    self.error("subject term")
                p = self.term("predicate")
                if isinstance(p, Literal):
                    self.error("predicate term")
                o = self.term("object")
                patterns.append((s, p, o))
            if self.cur.kind == "punct" and self.cur.text == ".":
                self.pos += 1
        if self.cur.kind != "eof":
            self.check_unsupported()
            self.error("end of query")
        ast = QueryAst(select_vars=tuple(select_vars),
                       patterns=tuple(patterns), filters=tuple(filters))
        bound = ast.pattern_vars()
        for v in ast.select_vars:
            if v not in bound:
                raise UnboundSelectVar(
                    f"?{v} is selected but appears in no pattern")
        for f in ast.filters:
            if f.var not in bound:
                raise UnboundSelectVar(
                    f"?{f.var} is filtered but appears in no pattern")
        return ast


_WORD_SCAN_RE = re.compile(r'"(?:[^"\\]|\\.)*"|\?[A-Za-z_][A-Za-z0-9_]*'
                           r'|(?P<word>[A-Za-z_][A-Za-z0-9_]*)')


def _first_unsupported(text: str) -> str | None:
    for m in _WORD_SCAN_RE.finditer(text):
        word = m.group("word")
        if word and word.upper() in UNSUPPORTED_KEYWORDS:
            return word.upper()
    return None


def parse_query(text: str, prefixes: dict[str, str] | None = None) -> QueryAst:
    """Parse query text; raises position-tagged errors on anything else."""
    try:
        tokens = _tokenize(text)
        return _Parser(tokens,
                       prefixes if prefixes is not None else {"": ""}).parse()
    except QuerySyntaxError:
        # a malformed query that names a known SPARQL construct outside the
        # subset gets the clearer rejection
        construct = _first_unsupported(text)
        if construct is not None:
            raise UnsupportedFeature(construct) from None
        raise


def _contract(iri: str, prefixes: dict[str, str]) -> str:
    best = None
    for prefix, expansion in prefixes.items():
        if iri.startswith(expansion):
            if best is None or len(expansion) > len(prefixes[best]):
                best = prefix
    if best is None:
        return f":{iri}"
    return f"{best}:{iri[len(prefixes[best]):]}"


def format_term(term: Term, prefixes: dict[str, str] | None = None) -> str:
    prefixes = prefixes if prefixes is not None else {"": ""}
    if isinstance(term, Var):
        return f"?{term.name}"
    if isinstance(term, Hole):
        return f"{{{term.label}}}"
    if isinstance(term, Iri):
        if term.value == TYPE_PREDICATE:
            return "a"
        return _contract(term.value, prefixes)
    if term.dtype == "string":
        escaped = str(term.value).replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    return term.lexical()


def format_query(ast: QueryAst, prefixes: dict[str, str] | None = None) -> str:
    """Print an AST back to query text; parse(format(ast)) == ast."""
    sel = " ".join(f"?{v}" for v in ast.select_vars)
    parts = [" ".join(format_term(t, prefixes) for t in p)
             for p in ast.patterns]
    body = " . ".join(parts)
    for f in ast.filters:
        clause = f"FILTER(?{f.var} {f.op} {format_term(f.value, prefixes)})"
        body = f"{body} {clause}" if body else clause
    return f"SELECT {sel} WHERE {{ {body} }}"


# --- evaluation -------------------------------------------------------------

def _stringify(term) -> str:
    if isinstance(term, Iri):
        return term.value
    return term.lexical()


def kb_triples(kb: KnowledgeBase) -> list[tuple]:
    """The queryable universe: closure-expanded type triples plus assertions."""
    triples = []
    for ind_iri in kb.individuals:
        for cls in sorted(memberships(kb, ind_iri)):
            triples.append((Iri(ind_iri), Iri(TYPE_PREDICATE), Iri(cls)))
    for a in kb.assertions:
        obj = Iri(a.object) if isinstance(a.object, str) else a.object
        triples.append((Iri(a.subject), Iri(a.property), obj))
    return triples


def _match(pattern: TriplePattern, triple: tuple,
           binding: dict) -> dict | None:
    out = binding
    for pat, got in zip(pattern, triple):
        if isinstance(pat, Var):
            bound = out.get(pat.name)
            if bound is None:
                if out is binding:
                    out = dict(binding)
                out[pat.name] = got
            elif bound != got:
                return None
        elif pat != got:
            return None
    return out


def evaluate(ast: QueryAst, kb: KnowledgeBase,
             row_limit: int = DEFAULT_ROW_LIMIT) -> ResultTable:
    """Join the patterns over the KB snapshot; distinct, sorted rows."""
    if ast.holes():
        raise MissingParam(f"query still has unbound slots: {sorted(ast.holes())}")
    triples = kb_triples(kb)
    solutions: list[dict] = [{}]
    for pattern in ast.patterns:
        extended = []
        for sol in solutions:
            for triple in triples:
                got = _match(pattern, triple, sol)
                if got is not None:
                    extended.append(got if got is not sol else dict(sol))
        solutions = extended
        if not solutions:
            break

    def keep(sol: dict) -> bool:
        for f in ast.filters:
            hit = sol[f.var] == f.value
            if f.op == "=" and not hit:
                return False
            if f.op == "!=" and hit:
                return False
        return True

    rows = {tuple(_stringify(sol[v]) for v in ast.select_vars)
            for sol in solutions if keep(sol)}
    if len(rows) > row_limit:
        raise RowLimitExceeded(
            f"query produced {len(rows)} rows, cap is {row_limit}")
    return ResultTable(columns=ast.select_vars, rows=tuple(sorted(rows)))


# --- template queries -------------------------------------------------------

_SLOT_RE = re.compile(r"\{([^{}]+)\}")


@dataclass(frozen=True)
class TemplateParam:
    label: str
    type: str  # "class-instance" | "literal-of-type"
    restriction: str  # class iri, or a literal type name

    def __post_init__(self):
        if self.type not in ("class-instance", "literal-of-type"):
            raise ValueError(f"unknown param type {self.type!r}")


@dataclass(frozen=True)
class QueryTemplate:
    id: str
    description: str
    skeleton: QueryAst
    params: tuple[TemplateParam, ...]


@dataclass(frozen=True)
class TemplateRegistry:
    templates: dict[str, QueryTemplate] = field(default_factory=dict)

    def list(self) -> list[QueryTemplate]:
        return [self.templates[k] for k in sorted(self.templates)]


def register_template(registry: TemplateRegistry,
                      template: QueryTemplate) -> TemplateRegistry:
    if template.id in registry.templates:
        raise DuplicateId(f"template {template.id!r} already registered")
    markers = _SLOT_RE.findall(template.description)
    labels = [p.label for p in template.params]
    if len(set(labels)) != len(labels):
        raise SlotMismatch("duplicate parameter labels")
    if sorted(markers) != sorted(labels):
        raise SlotMismatch(
            f"description slots {sorted(markers)} do not match "
            f"params {sorted(labels)}")
    if template.skeleton.holes() != set(labels):
        raise SlotMismatch(
            f"skeleton holes {sorted(template.skeleton.holes())} do not "
            f"match params {sorted(labels)}")
    out = dict(registry.templates)
    out[template.id] = template
    return TemplateRegistry(templates=out)


def _fill(term: Term, values: dict[str, Iri | Literal]) -> Term:
    if isinstance(term, Hole):
        return values[term.label]
    return term


def instantiate_template(registry: TemplateRegistry, template_id: str,
                         bindings: dict, kb: KnowledgeBase) -> QueryAst:
    """Substitute validated bindings into the template skeleton."""
    template = registry.templates.get(template_id)
    if template is None:
        raise UnknownTemplate(f"unknown template {template_id!r}")
    values: dict[str, Iri | Literal] = {}
    for param in template.params:
        if param.label not in bindings:
            raise MissingParam(f"parameter {param.label!r} is not bound")
        raw = bindings[param.label]
        if param.type == "class-instance":
            if not isinstance(raw, str) or raw not in kb.individuals \
                    or param.restriction not in memberships(kb, raw):
                raise RestrictionViolation(
                    f"parameter {param.label!r} requires an instance of "
                    f"{param.restriction!r}", param=param.label,
                    required_class=param.restriction)
            values[param.label] = Iri(raw)
        else:
            want = _PYTHON_TYPES.get(param.restriction)
            bad = (want is None or not isinstance(raw, want)
                   or (param.restriction != "boolean" and isinstance(raw, bool)))
            if bad:
                raise RestrictionViolation(
                    f"parameter {param.label!r} requires a "
                    f"{param.restriction} literal", param=param.label,
                    required_type=param.restriction)
            values[param.label] = Literal(raw, param.restriction)
    patterns = tuple(tuple(_fill(t, values) for t in p)
                     for p in template.skeleton.patterns)
    filters = tuple(replace(f, value=_fill(f.value, values))
                    if isinstance(f.value, Hole) else f
                    for f in template.skeleton.filters)
    return replace(template.skeleton, patterns=patterns, filters=filters)
