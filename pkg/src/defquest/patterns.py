"""Graph-query DSL over dependency graphs.

A pattern is a chain of node specs joined by edge operators; juxtaposition
nests, i.e. every edge attaches to the node written immediately before it:

    {} >acl:relcl {}=ans            any node with an acl:relcl dependent
    {} >~acl {}=ans >conj {}        ...whose dependent itself has a conj child

Grammar:

    pattern     = node (edge node)*
    node        = "{" [constraint (";" constraint)*] "}" ["=" name]
    constraint  = attr ":" "/" regex "/"
    attr        = "form" | "lemma" | "upos" | "xpos" | "deprel"
    edge        = (">>" | ">~" | ">") rel

Semantics:

    >rel    direct dependent whose deprel fully matches the anchored regex rel
    >>rel   transitive dependent (any depth) whose deprel fully matches rel
    >~rel   direct dependent whose deprel equals rel or starts with "rel:"
            (prefix match on the subtype separator; rel is literal here)

Node attribute regexes are anchored (full match). Every pattern must
capture exactly one node as ``=ans``, the extraction capture; additional
captures are allowed with unique names. Matches are de-duplicated on their
capture bindings and ordered by (ans token id, then the other captures'
token ids in capture-name order).
"""

import re
from dataclasses import dataclass

from .depgraph import DependencyGraph
from .errors import DataError, PatternSyntaxError

EXTRACTION_CAPTURE = "ans"
_ATTRS = ("form", "lemma", "upos", "xpos", "deprel")
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class NodeSpec:
    constraints: tuple[tuple[str, str], ...]  # (attr, regex source), empty = any node
    capture: str | None = None

    def matches(self, token) -> bool:
        for attr, regex in self.constraints:
            if not re.fullmatch(regex, getattr(token, attr)):
                return False
        return True


@dataclass(frozen=True)
class Edge:
    op: str  # ">", ">>" or ">~"
    rel: str


@dataclass(frozen=True)
class Pattern:
    pattern_id: str
    source_text: str
    nodes: tuple[NodeSpec, ...]
    edges: tuple[Edge, ...]  # edges[i] joins nodes[i] to nodes[i + 1]

    @property
    def captures(self) -> tuple[str, ...]:
        return tuple(n.capture for n in self.nodes if n.capture is not None)


@dataclass(frozen=True)
class Match:
    bindings: dict
    pattern_id: str


class _Cursor:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def error(self, message):
        raise PatternSyntaxError(message, self.pos)

    def expect(self, ch):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.pos += 1

    def take_while(self, pred):
        start = self.pos
        while self.pos < len(self.text) and pred(self.text[self.pos]):
            self.pos += 1
        return self.text[start:self.pos]


def _parse_node(cur: _Cursor) -> NodeSpec:
    cur.expect("{")
    constraints = []
    cur.skip_ws()
    while cur.peek() != "}":
        if not cur.peek():
            cur.error("unterminated node spec")
        attr = cur.take_while(lambda c: c.isalpha())
        if attr not in _ATTRS:
            cur.error(f"unknown attribute {attr!r}")
        cur.skip_ws()
        cur.expect(":")
        cur.skip_ws()
        cur.expect("/")
        regex = cur.take_while(lambda c: c != "/")
        if not cur.peek():
            cur.error("unterminated regex")
        cur.expect("/")
        try:
            re.compile(regex)
        except re.error as exc:
            cur.error(f"bad regex: {exc}")
        constraints.append((attr, regex))
        cur.skip_ws()
        if cur.peek() == ";":
            cur.pos += 1
            cur.skip_ws()
    cur.expect("}")
    capture = None
    if cur.peek() == "=":
        cur.pos += 1
        m = _NAME_RE.match(cur.text, cur.pos)
        if not m:
            cur.error("expected capture name after '='")
        capture = m.group(0)
        cur.pos = m.end()
    return NodeSpec(constraints=tuple(constraints), capture=capture)


def compile_pattern(text: str, pattern_id: str = "") -> Pattern:
    cur = _Cursor(text)
    cur.skip_ws()
    nodes = [_parse_node(cur)]
    edges = []
    cur.skip_ws()
    while cur.pos < len(cur.text):
        if cur.peek() != ">":
            cur.error("expected edge operator")
        if cur.text.startswith(">>", cur.pos):
            op = ">>"
        elif cur.text.startswith(">~", cur.pos):
            op = ">~"
        else:
            op = ">"
        cur.pos += len(op)
        rel = cur.take_while(lambda c: not c.isspace() and c != "{")
        if not rel:
            cur.error("expected relation after edge operator")
        if op != ">~":
            try:
                re.compile(rel)
            except re.error as exc:
                cur.error(f"bad relation regex: {exc}")
        cur.skip_ws()
        nodes.append(_parse_node(cur))
        edges.append(Edge(op=op, rel=rel))
        cur.skip_ws()

    names = [n.capture for n in nodes if n.capture is not None]
    dupes = {n for n in names if names.count(n) > 1}
    if dupes:
        raise DataError(f"duplicate capture name: {sorted(dupes)[0]}")
    if EXTRACTION_CAPTURE not in names:
        raise DataError(f"no extraction capture: pattern must capture a node as ={EXTRACTION_CAPTURE}")
    return Pattern(pattern_id=pattern_id, source_text=text, nodes=tuple(nodes), edges=tuple(edges))


def _edge_ok(graph: DependencyGraph, edge: Edge, parent_id: int, child) -> bool:
    if edge.op == ">":
        return child.head == parent_id and re.fullmatch(edge.rel, child.deprel) is not None
    if edge.op == ">~":
        if child.head != parent_id:
            return False
        return child.deprel == edge.rel or child.deprel.startswith(edge.rel + ":")
    # ">>": transitive dependent, deprel of the child's own incoming edge
    if re.fullmatch(edge.rel, child.deprel) is None:
        return False
    cur = child.head
    while cur != 0:
        if cur == parent_id:
            return True
        cur = graph.token(cur).head
    return False


def sort_key(match: Match):
    others = tuple(
        match.bindings[name] for name in sorted(match.bindings) if name != EXTRACTION_CAPTURE
    )
    return (match.bindings[EXTRACTION_CAPTURE], others)


def find_matches(graph: DependencyGraph, pattern: Pattern) -> list[Match]:
    """All distinct capture bindings of the pattern in the graph."""
    results = []

    def extend(node_idx: int, assignment: list):
        if node_idx == len(pattern.nodes):
            bindings = {
                spec.capture: tok.id
                for spec, tok in zip(pattern.nodes, assignment)
                if spec.capture is not None
            }
            results.append(bindings)
            return
        spec = pattern.nodes[node_idx]
        if node_idx == 0:
            candidates = graph.tokens
        else:
            edge = pattern.edges[node_idx - 1]
            parent_id = assignment[-1].id
            candidates = [t for t in graph.tokens if _edge_ok(graph, edge, parent_id, t)]
        for tok in candidates:
            if spec.matches(tok):
                assignment.append(tok)
                extend(node_idx + 1, assignment)
                assignment.pop()

    extend(0, [])
    unique = {tuple(sorted(b.items())): b for b in results}
    matches = [Match(bindings=b, pattern_id=pattern.pattern_id) for b in unique.values()]
    matches.sort(key=sort_key)
    return matches


def load_pattern_file(source) -> list[Pattern]:
    """Pattern-set file: one ``id<TAB>pattern-text`` per line, ``#`` comments."""
    text = source if isinstance(source, str) else source.read()
    patterns = []
    seen_ids = set()
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        pattern_id, sep, body = line.partition("\t")
        if not sep or not body.strip():
            raise DataError(f"pattern file line {line_no}: expected 'id<TAB>pattern'")
        pattern_id = pattern_id.strip()
        if pattern_id in seen_ids:
            raise DataError(f"pattern file line {line_no}: duplicate id {pattern_id!r}")
        seen_ids.add(pattern_id)
        patterns.append(compile_pattern(body.strip(), pattern_id=pattern_id))
    if not patterns:
        raise DataError("pattern file contains no patterns")
    return patterns
