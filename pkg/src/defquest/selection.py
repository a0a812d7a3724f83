"""Content selection: keyword filtering, definition scoring, answer extraction.

Context selection keeps sentences that contain at least one index concept
and score at or above the configured definition threshold. Answer
selection runs the clause patterns over a sentence's dependency graph,
keeps the candidate with the most tokens, and falls back to the root
predicate's direct object.
"""

import json
import re
from dataclasses import dataclass
from importlib import resources

from .corpus import ConceptIndex, Sentence
from .depgraph import DependencyGraph, subtree_yield
from .errors import DataError
from .patterns import EXTRACTION_CAPTURE, Pattern, find_matches, load_pattern_file

DIRECT_OBJECT_ID = "OBJ"

# Category grouping of the bundled pattern set for coverage reporting.
DEFAULT_PATTERN_CATEGORIES = {
    "A1": "adjectival",
    "A2": "adjectival",
    "A3": "adverbial",
    "A4": "adjectival",
}


@dataclass(frozen=True)
class ScoredSentence:
    sentence_id: str
    score: float
    scorer_id: str

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise DataError(f"score out of range for {self.sentence_id}: {self.score}")


@dataclass(frozen=True)
class SelectionConfig:
    threshold: float = 0.7
    scorer: str = "rule"
    pattern_set_id: str = "default"

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise DataError(f"threshold out of range: {self.threshold}")


@dataclass(frozen=True)
class AnswerCandidate:
    sentence_id: str
    token_ids: tuple[int, ...]
    text: str
    pattern_id: str


def concept_regex(concept: str) -> re.Pattern:
    """Word-boundary, case-insensitive matcher for one concept phrase.

    Regex metacharacters in the concept are literal; words of a multiword
    phrase are joined across exactly one whitespace character.
    """
    words = concept.split()
    body = r"\s".join(re.escape(w) for w in words)
    return re.compile(r"(?<!\w)" + body + r"(?!\w)", re.IGNORECASE)


def keyword_filter(sentences: list[Sentence], index: ConceptIndex) -> list[Sentence]:
    """Sentences containing at least one index concept as an exact phrase."""
    if not len(index):
        raise DataError("empty concept index")
    regexes = [concept_regex(c) for c in index.sorted()]
    return [s for s in sentences if any(r.search(s.text) for r in regexes)]


def _load_cues():
    raw = json.loads(resources.files("defquest.data").joinpath("cues.json").read_text("utf-8"))
    return (
        [c.lower() for c in raw["strong_cues"]],
        float(raw["strong_score"]),
        float(raw["copula_indefinite_score"]),
        float(raw["default_score"]),
    )


_STRONG_CUES, _STRONG_SCORE, _COPULA_SCORE, _DEFAULT_SCORE = _load_cues()
# "any" is included so quantified copular definitions ("is any part ...")
# land in the copula bucket rather than the default one.
_COPULA_RE = re.compile(r"\bis\s+(a|an|any)\b", re.IGNORECASE)


def rule_score(sentence: Sentence) -> ScoredSentence:
    """Cue-phrase baseline scorer; see data/cues.json for the table."""
    text = " ".join(sentence.text.lower().split())
    if any(cue in text for cue in _STRONG_CUES):
        score = _STRONG_SCORE
    elif _COPULA_RE.search(text):
        score = _COPULA_SCORE
    else:
        score = _DEFAULT_SCORE
    return ScoredSentence(sentence_id=sentence.id, score=score, scorer_id="rule")


class RuleScorer:
    scorer_id = "rule"

    def score_batch(self, sentences: list[Sentence]) -> list[ScoredSentence]:
        return [rule_score(s) for s in sentences]


def score_sentences(sentences: list[Sentence], scorer) -> list[ScoredSentence]:
    """Score a batch, enforcing alignment and score range per sentence."""
    scored = scorer.score_batch(sentences)
    if len(scored) != len(sentences):
        raise DataError(
            f"scorer returned {len(scored)} scores for {len(sentences)} sentences"
        )
    for sentence, s in zip(sentences, scored):
        if s.sentence_id != sentence.id:
            raise DataError(f"scorer result misaligned at {sentence.id}")
    return scored


def context_select_scored(
    sentences: list[Sentence], index: ConceptIndex, scorer, config: SelectionConfig
) -> list[tuple[Sentence, ScoredSentence]]:
    filtered = keyword_filter(sentences, index)
    scored = score_sentences(filtered, scorer)
    return [(s, sc) for s, sc in zip(filtered, scored) if sc.score >= config.threshold]


def context_select(
    sentences: list[Sentence], index: ConceptIndex, scorer, config: SelectionConfig
) -> list[Sentence]:
    """The question-worthy subset: keyword filter + definition threshold."""
    return [s for s, _ in context_select_scored(sentences, index, scorer, config)]


def _candidate_from_node(graph: DependencyGraph, node_id: int, pattern_id: str) -> AnswerCandidate:
    tokens = subtree_yield(graph, node_id)
    return AnswerCandidate(
        sentence_id=graph.sentence_id,
        token_ids=tuple(t.id for t in tokens),
        text=" ".join(t.form for t in tokens),
        pattern_id=pattern_id,
    )


def _direct_object_fallback(graph: DependencyGraph) -> AnswerCandidate | None:
    # The root predicate's first obj dependent; if the root has none, walk
    # its conj chain in surface order.
    queue = [graph.root]
    seen = set()
    while queue:
        head = queue.pop(0)
        if head.id in seen:
            continue
        seen.add(head.id)
        for child in graph.children(head.id):
            if child.deprel == "obj":
                return _candidate_from_node(graph, child.id, DIRECT_OBJECT_ID)
        queue.extend(c for c in graph.children(head.id) if c.deprel == "conj")
    return None


def answer_select(graph: DependencyGraph, patterns: list[Pattern]) -> AnswerCandidate | None:
    """One answer phrase per sentence, or None to drop the sentence.

    Clause-pattern candidates are the subtree yields of each match's
    extraction capture; the one with the most tokens wins, ties broken by
    leftmost start token (then lexicographically on token ids). Identical
    candidates from several patterns count once, attributed to the first
    pattern in set order.
    """
    candidates: dict[tuple[int, ...], AnswerCandidate] = {}
    for pattern in patterns:
        for match in find_matches(graph, pattern):
            cand = _candidate_from_node(
                graph, match.bindings[EXTRACTION_CAPTURE], pattern.pattern_id
            )
            candidates.setdefault(cand.token_ids, cand)
    if candidates:
        best = sorted(candidates, key=lambda ids: (-len(ids), ids))[0]
        return candidates[best]
    return _direct_object_fallback(graph)


def coverage_report(
    graphs: list[DependencyGraph],
    patterns: list[Pattern],
    categories: dict[str, str] | None = None,
) -> dict[str, int]:
    """Per-category counts; the first matching pattern decides the category."""
    cats = DEFAULT_PATTERN_CATEGORIES if categories is None else categories
    counts = {"no_match": 0, "adjectival": 0, "adverbial": 0, "direct_object": 0}
    for graph in graphs:
        category = None
        for pattern in patterns:
            if find_matches(graph, pattern):
                category = cats.get(pattern.pattern_id, "clause")
                break
        if category is None:
            category = "direct_object" if _direct_object_fallback(graph) else "no_match"
        counts[category] = counts.get(category, 0) + 1
    return counts


def load_default_patterns() -> list[Pattern]:
    text = resources.files("defquest.data").joinpath("patterns_default.tsv").read_text("utf-8")
    return load_pattern_file(text)


def write_score_cache(stream, scored: list[ScoredSentence]):
    for s in scored:
        stream.write(
            json.dumps(
                {"sentence_id": s.sentence_id, "score": s.score, "scorer_id": s.scorer_id},
                ensure_ascii=False,
                sort_keys=True,
            )
            + "\n"
        )


def load_score_cache(source) -> dict[str, ScoredSentence]:
    text = source if isinstance(source, str) else source.read()
    cache = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        raw = json.loads(line)
        cache[raw["sentence_id"]] = ScoredSentence(
            sentence_id=raw["sentence_id"], score=raw["score"], scorer_id=raw["scorer_id"]
        )
    return cache
