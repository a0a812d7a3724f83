"""Word-level dependency graphs and the CoNLL-U reader/writer.

Only basic UD trees are modelled: every sentence is a single-rooted,
acyclic tree over its tokens. Multiword-token ranges (``1-2``) and empty
nodes (``1.1``) are skipped on read. Columns beyond the ones the package
uses (FEATS, DEPS, MISC) are carried along opaquely so a parsed file can
be written back out.
"""

from dataclasses import dataclass, field

from .errors import DataError, ParseError

_COLUMNS = 10


@dataclass(frozen=True)
class Token:
    id: int
    form: str
    lemma: str
    upos: str
    xpos: str
    head: int
    deprel: str
    extra: tuple[str, str, str] = ("_", "_", "_")  # feats, deps, misc


@dataclass(frozen=True)
class DependencyGraph:
    sentence_id: str
    tokens: tuple[Token, ...]
    comments: tuple[str, ...] = field(default=())

    def __post_init__(self):
        _validate_tree(self)

    def token(self, node_id: int) -> Token:
        if not 1 <= node_id <= len(self.tokens):
            raise DataError(f"unknown node id {node_id} in {self.sentence_id}")
        return self.tokens[node_id - 1]

    @property
    def root(self) -> Token:
        for tok in self.tokens:
            if tok.head == 0:
                return tok
        raise DataError(f"{self.sentence_id}: no root")  # unreachable after validation

    def children(self, node_id: int) -> list[Token]:
        return [t for t in self.tokens if t.head == node_id]

    def text(self) -> str:
        return " ".join(t.form for t in self.tokens)


def _validate_tree(graph: DependencyGraph):
    n = len(graph.tokens)
    if n == 0:
        raise DataError(f"{graph.sentence_id}: empty sentence")
    roots = 0
    for expected, tok in enumerate(graph.tokens, start=1):
        if tok.id != expected:
            raise DataError(f"{graph.sentence_id}: token ids not consecutive at {tok.id}")
        if tok.head == 0:
            roots += 1
        elif not 1 <= tok.head <= n:
            raise DataError(f"{graph.sentence_id}: head {tok.head} out of range")
        if tok.head == tok.id:
            raise DataError(f"{graph.sentence_id}: token {tok.id} heads itself")
    if roots != 1:
        raise DataError(f"{graph.sentence_id}: expected one root, found {roots}")
    # Walk each token to the root; revisiting a node on the way means a cycle.
    for tok in graph.tokens:
        seen = set()
        cur = tok.id
        while cur != 0:
            if cur in seen:
                raise DataError(f"{graph.sentence_id}: cycle through token {cur}")
            seen.add(cur)
            cur = graph.tokens[cur - 1].head


def subtree_yield(graph: DependencyGraph, node_id: int) -> list[Token]:
    """The node plus all transitive dependents, in surface (id) order."""
    graph.token(node_id)  # raises on unknown id
    keep = {node_id}
    changed = True
    while changed:
        changed = False
        for tok in graph.tokens:
            if tok.head in keep and tok.id not in keep:
                keep.add(tok.id)
                changed = True
    return [t for t in graph.tokens if t.id in keep]


def parse_conllu(source) -> list[DependencyGraph]:
    """Read CoNLL-U text (string or stream) into dependency graphs.

    ``sent_id`` comments become graph ids; blocks without one get a
    positional fallback (``s<index>``).
    """
    text = source if isinstance(source, str) else source.read()
    graphs = []
    tokens: list[Token] = []
    comments: list[str] = []
    sent_id = None

    def flush(line_no):
        nonlocal tokens, comments, sent_id
        if not tokens:
            # Comment-only blocks (file headers) carry no sentence.
            comments, sent_id = [], None
            return
        sid = sent_id if sent_id is not None else f"s{len(graphs)}"
        try:
            graphs.append(
                DependencyGraph(sentence_id=sid, tokens=tuple(tokens), comments=tuple(comments))
            )
        except DataError as exc:
            raise ParseError(str(exc), line=line_no) from exc
        tokens, comments, sent_id = [], [], None

    line_no = 0
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            flush(line_no)
            continue
        if line.startswith("#"):
            comments.append(line)
            body = line[1:].strip()
            if body.startswith("sent_id"):
                _, _, value = body.partition("=")
                sent_id = value.strip()
            continue
        cols = line.split("\t")
        if len(cols) != _COLUMNS:
            raise ParseError(f"expected {_COLUMNS} tab-separated columns, got {len(cols)}", line=line_no)
        if "-" in cols[0] or "." in cols[0]:
            continue  # multiword token range / empty node
        try:
            tok_id = int(cols[0])
        except ValueError:
            raise ParseError(f"non-integer token id {cols[0]!r}", line=line_no) from None
        try:
            head = int(cols[6])
        except ValueError:
            raise ParseError(f"non-integer head {cols[6]!r}", line=line_no) from None
        tokens.append(
            Token(
                id=tok_id,
                form=cols[1],
                lemma=cols[2],
                upos=cols[3],
                xpos=cols[4],
                head=head,
                deprel=cols[7],
                extra=(cols[5], cols[8], cols[9]),
            )
        )
    flush(line_no + 1)
    return graphs


def to_conllu(graph: DependencyGraph) -> str:
    """Debug writer; inverse of parse_conllu on the fields modelled here."""
    lines = list(graph.comments)
    if not any(c.lstrip("#").strip().startswith("sent_id") for c in graph.comments):
        lines.insert(0, f"# sent_id = {graph.sentence_id}")
    for t in graph.tokens:
        feats, deps, misc = t.extra
        lines.append(
            "\t".join(
                [str(t.id), t.form, t.lemma, t.upos, t.xpos, feats, str(t.head), t.deprel, deps, misc]
            )
        )
    return "\n".join(lines) + "\n"
