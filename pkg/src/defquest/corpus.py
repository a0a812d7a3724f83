"""Textbook and index ingestion.

Book file format (UTF-8):

    # Chapter title          -- exactly one, first non-blank line
    ## Section heading       -- at least one
    paragraph text ...       -- blocks separated by one or more blank lines;
                                hard-wrapped lines join with single spaces

Index file format: one concept phrase per line, ``#`` comment lines ignored.

Identifiers are deterministic: ``<book>/<section-idx>/<paragraph-idx>`` with
0-based indices, sentences appending ``/<sentence-idx>``. The book id is a
slug of the chapter title unless overridden.
"""

import re
import statistics
from dataclasses import dataclass, field
from importlib import resources

from .errors import DataError, ParseError

_HEADING_RE = re.compile(r"^(#+)\s*(.*)$")


@dataclass(frozen=True)
class Sentence:
    id: str
    text: str
    char_span: tuple[int, int]
    paragraph_id: str


@dataclass(frozen=True)
class Paragraph:
    id: str
    text: str
    sentences: tuple[Sentence, ...]


@dataclass(frozen=True)
class Section:
    id: str
    heading: str
    paragraphs: tuple[Paragraph, ...]


@dataclass(frozen=True)
class Textbook:
    id: str
    title: str
    domain_label: str
    sections: tuple[Section, ...]

    def sentences(self):
        """All sentences in document order."""
        for section in self.sections:
            for paragraph in section.paragraphs:
                yield from paragraph.sentences

    def paragraph_by_id(self, paragraph_id: str) -> Paragraph:
        for section in self.sections:
            for paragraph in section.paragraphs:
                if paragraph.id == paragraph_id:
                    return paragraph
        raise DataError(f"unknown paragraph id: {paragraph_id}")


@dataclass(frozen=True)
class ConceptIndex:
    concepts: frozenset[str] = field(default_factory=frozenset)

    def __len__(self):
        return len(self.concepts)

    def sorted(self) -> list[str]:
        return sorted(self.concepts)


def slugify(text: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", text.lower()).strip("-")
    if not slug:
        raise DataError(f"cannot derive an id from title {text!r}")
    return slug


def _load_abbreviations() -> frozenset[str]:
    data = resources.files("defquest.data").joinpath("abbreviations.txt").read_text("utf-8")
    return frozenset(
        line.strip().lower() for line in data.splitlines() if line.strip() and not line.startswith("#")
    )


_ABBREVIATIONS = _load_abbreviations()
_TERMINATORS = frozenset(".?!")


def segment_sentences(paragraph_text: str) -> list[tuple[str, tuple[int, int]]]:
    """Split a paragraph into (text, char_span) sentence pieces.

    Boundary rule: a run of ``.?!`` followed by whitespace or end of text
    ends a sentence, unless the word containing the terminator is on the
    abbreviation guard list (e.g. "Dr.", "e.g."). Spans are tight (first to
    last non-whitespace character); the gaps between consecutive spans are
    whitespace only, so the original text is recoverable. If no terminator
    is found the whole text is one sentence.
    """
    if not paragraph_text.strip():
        raise DataError("cannot segment empty text")
    text = paragraph_text
    boundaries = []  # index one past each sentence-final terminator run
    i = 0
    while i < len(text):
        ch = text[i]
        if ch in _TERMINATORS:
            end = i + 1
            while end < len(text) and text[end] in _TERMINATORS:
                end += 1
            if end >= len(text) or text[end].isspace():
                # Word containing this terminator, for the guard check.
                start = i
                while start > 0 and not text[start - 1].isspace():
                    start -= 1
                word = text[start:end].lstrip("([\"'")
                if word.lower() not in _ABBREVIATIONS:
                    boundaries.append(end)
            i = end
        else:
            i += 1

    pieces = []
    prev = 0
    for cut in boundaries + [len(text)]:
        chunk = text[prev:cut]
        if chunk.strip():
            lead = len(chunk) - len(chunk.lstrip())
            trail = len(chunk) - len(chunk.rstrip())
            span = (prev + lead, cut - trail)
            pieces.append((text[span[0]:span[1]], span))
        prev = cut
    return pieces


def load_textbook(source, book_id: str | None = None, domain_label: str = "") -> Textbook:
    """Parse the book file format into the full hierarchy.

    ``source`` is a text string or an open text stream.
    """
    text = source if isinstance(source, str) else source.read()
    lines = text.splitlines()

    title = None
    title_line = None
    sections: list[tuple[str, list[str], int]] = []  # heading, paragraph blocks, line no
    block: list[str] = []

    def flush_block(line_no):
        nonlocal block
        if not block:
            return
        if title is None:
            raise ParseError("paragraph before chapter heading", line=line_no)
        if not sections:
            raise ParseError("paragraph before any section heading", line=line_no)
        sections[-1][1].append(" ".join(block))
        block = []

    for line_no, raw in enumerate(lines, start=1):
        m = _HEADING_RE.match(raw)
        if m and m.group(1) == "#":
            flush_block(line_no)
            if title is not None:
                raise ParseError("multiple chapter headings", line=line_no)
            if not m.group(2).strip():
                raise ParseError("empty chapter heading", line=line_no)
            title = m.group(2).strip()
            title_line = line_no
        elif m and m.group(1) == "##":
            flush_block(line_no)
            if title is None:
                raise ParseError("section heading before chapter heading", line=line_no)
            if not m.group(2).strip():
                raise ParseError("empty section heading", line=line_no)
            sections.append((m.group(2).strip(), [], line_no))
        elif m and len(m.group(1)) > 2:
            raise ParseError(f"unsupported heading marker {m.group(1)!r}", line=line_no)
        elif not raw.strip():
            flush_block(line_no)
        else:
            if title is None:
                raise ParseError("text before chapter heading", line=line_no)
            block.append(raw.strip())
    flush_block(len(lines))

    if title is None:
        raise ParseError("empty book: no chapter heading", line=title_line or 1)
    if not sections:
        raise ParseError("no sections", line=title_line)

    bid = book_id or slugify(title)
    built_sections = []
    for s_idx, (heading, paragraphs, line_no) in enumerate(sections):
        if not paragraphs:
            raise ParseError(f"section {heading!r} has no paragraphs", line=line_no)
        built_paragraphs = []
        for p_idx, para_text in enumerate(paragraphs):
            pid = f"{bid}/{s_idx}/{p_idx}"
            sentences = tuple(
                Sentence(id=f"{pid}/{k}", text=t, char_span=span, paragraph_id=pid)
                for k, (t, span) in enumerate(segment_sentences(para_text))
            )
            built_paragraphs.append(Paragraph(id=pid, text=para_text, sentences=sentences))
        built_sections.append(
            Section(id=f"{bid}/{s_idx}", heading=heading, paragraphs=tuple(built_paragraphs))
        )
    return Textbook(id=bid, title=title, domain_label=domain_label, sections=tuple(built_sections))


def load_index(source) -> ConceptIndex:
    """Read the one-phrase-per-line index; case-insensitive de-duplication."""
    text = source if isinstance(source, str) else source.read()
    seen = {}
    for line in text.splitlines():
        entry = line.strip()
        if not entry or entry.startswith("#"):
            continue
        seen.setdefault(entry.lower(), entry)
    if not seen:
        raise DataError("empty index")
    return ConceptIndex(concepts=frozenset(seen.values()))


@dataclass(frozen=True)
class SectionStats:
    word_counts: dict[str, int]
    mean: float
    sd: float
    median: float


def _word_count(section: Section) -> int:
    return sum(len(p.text.split()) for p in section.paragraphs)


def section_statistics(book: Textbook) -> SectionStats:
    """Per-section whitespace word counts with mean, sample SD and median.

    Sample SD uses the n-1 denominator (0.0 for a single section by
    convention); the median of an even-length list is the lower middle.
    """
    if not book.sections:
        raise DataError("empty book")
    counts = {s.id: _word_count(s) for s in book.sections}
    values = sorted(counts.values())
    mean = sum(values) / len(values)
    sd = statistics.stdev(values) if len(values) > 1 else 0.0
    median = float(values[(len(values) - 1) // 2])
    return SectionStats(word_counts=counts, mean=mean, sd=sd, median=median)
