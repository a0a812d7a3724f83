"""End-to-end question generation plus corpus-level statistics and sampling.

``ask`` composes context selection, answer selection and generation over a
textbook; every run emits a manifest (config hash, stage counts,
timestamps) next to its question records. Re-running with the same config
and offline backends produces byte-identical question JSONL.
"""

import hashlib
import json
import statistics
from dataclasses import asdict, dataclass, field

from . import clients
from .corpus import ConceptIndex, Sentence, Textbook
from .depgraph import DependencyGraph, parse_conllu
from .errors import DataError, StageError
from .generation import (
    GenerationResult,
    QuestionTriplet,
    TemplateBackend,
    dump_record,
    generate_all,
    question_record,
)
from .rng import SplitMix64
from .selection import (
    SelectionConfig,
    answer_select,
    keyword_filter,
    load_default_patterns,
    score_sentences,
)

PREFIX_BUCKETS = ("What is", "What are", "What does")


@dataclass(frozen=True)
class PipelineConfig:
    selection: SelectionConfig = field(default_factory=SelectionConfig)
    generator: str = "template"  # "template" or a generator service URL
    parser: str = "conllu"  # "conllu" (pre-parsed file) or a parser service URL
    seed: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    def config_hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


class FileGraphProvider:
    """Graphs preloaded from a CoNLL-U file keyed by ``sent_id``."""

    def __init__(self, source):
        self.graphs = {g.sentence_id: g for g in parse_conllu(source)}

    def graphs_for(self, sentences: list[Sentence]) -> dict[str, DependencyGraph]:
        missing = [s.id for s in sentences if s.id not in self.graphs]
        if missing:
            raise DataError(f"no parse for sentences: {', '.join(missing[:5])}")
        return {s.id: self.graphs[s.id] for s in sentences}


class RemoteGraphProvider:
    def __init__(self, endpoint: clients.ServiceEndpoint, label_map=None, transport=None):
        self.endpoint = endpoint
        self.label_map = label_map
        self.transport = transport

    def graphs_for(self, sentences: list[Sentence]) -> dict[str, DependencyGraph]:
        if not sentences:
            return {}
        graphs = clients.remote_parse(
            self.endpoint,
            [s.text for s in sentences],
            label_map=self.label_map,
            transport=self.transport,
        )
        return {
            s.id: DependencyGraph(sentence_id=s.id, tokens=g.tokens, comments=g.comments)
            for s, g in zip(sentences, graphs)
        }


@dataclass
class PipelineResult:
    triplets: list[QuestionTriplet]
    records: list[dict]
    stage_ids: dict[str, list[str]]
    manifest: dict

    def jsonl(self) -> str:
        return "".join(dump_record(r) + "\n" for r in self.records)


def _utcnow():
    import datetime

    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def ask(
    book: Textbook,
    index: ConceptIndex,
    config: PipelineConfig,
    scorer=None,
    graph_provider=None,
    backend=None,
    patterns=None,
    skip_failed: bool = False,
) -> PipelineResult:
    """Run context selection -> answer selection -> generation over a book.

    Collaborators default to the offline backends (rule scorer, template
    generator); pass explicit ones for remote services. ``graph_provider``
    is required since parses always come from somewhere external.
    """
    from .selection import RuleScorer

    started = _utcnow()
    scorer = scorer or RuleScorer()
    patterns = patterns or load_default_patterns()
    sentences = list(book.sentences())

    try:
        filtered = keyword_filter(sentences, index)
        scored = score_sentences(filtered, scorer)
    except Exception as exc:
        raise StageError("context-select", exc) from exc
    selected = [
        (s, sc) for s, sc in zip(filtered, scored) if sc.score >= config.selection.threshold
    ]

    if graph_provider is None:
        raise DataError("a graph provider is required (pre-parsed file or parser service)")
    try:
        graphs = graph_provider.graphs_for([s for s, _ in selected])
    except StageError:
        raise
    except Exception as exc:
        raise StageError("parse", exc) from exc

    answered = []
    try:
        for sentence, sc in selected:
            candidate = answer_select(graphs[sentence.id], patterns)
            if candidate is not None:
                answered.append((sentence, candidate, sc))
    except Exception as exc:
        raise StageError("answer-select", exc) from exc

    if backend is None:
        backend = TemplateBackend(index, graphs)
    result: GenerationResult = generate_all(
        [(s, a) for s, a, _ in answered], backend, skip_failed=skip_failed
    )

    scores_by_id = {s.id: sc.score for s, _, sc in answered}
    records = [
        question_record(t, book.id, scores_by_id[t.sentence.id]) for t in result.triplets
    ]
    stage_ids = {
        "sentences": [s.id for s in sentences],
        "keyword_filtered": [s.id for s in filtered],
        "context_selected": [s.id for s, _ in selected],
        "answer_selected": [s.id for s, _, _ in answered],
        "questions": [t.sentence.id for t in result.triplets],
    }
    manifest = {
        "config": config.to_dict(),
        "config_hash": config.config_hash(),
        "seed": config.seed,
        "book_id": book.id,
        "scorer_id": getattr(scorer, "scorer_id", "?"),
        "generator_id": backend.generator_id,
        "counts": {stage: len(ids) for stage, ids in stage_ids.items()},
        "generation_failures": len(result.failures),
        "started_at": started,
        "finished_at": _utcnow(),
    }
    return PipelineResult(
        triplets=result.triplets, records=records, stage_ids=stage_ids, manifest=manifest
    )


@dataclass(frozen=True)
class GenerationStats:
    section_counts: dict[str, int]
    mean: float
    sd: float
    median: float
    prefix_shares: dict[str, float]


def _prefix_bucket(question_text: str) -> str:
    tokens = [t.strip("?!.,;:") for t in question_text.split()]
    tokens = [t for t in tokens if t]
    if not tokens:
        return "other"
    if len(tokens) >= 2 and f"{tokens[0]} {tokens[1]}" in PREFIX_BUCKETS:
        return f"{tokens[0]} {tokens[1]}"
    return tokens[0]


def generation_stats(questions, book: Textbook) -> GenerationStats:
    """Per-section question counts and the question-prefix distribution.

    ``questions`` may be QuestionTriplet objects or question JSONL records;
    sections without questions count as zero.
    """
    para_to_section = {
        p.id: s.id for s in book.sections for p in s.paragraphs
    }
    section_counts = {s.id: 0 for s in book.sections}
    prefix_counts: dict[str, int] = {}
    total = 0
    for q in questions:
        if isinstance(q, QuestionTriplet):
            paragraph_id, text = q.paragraph_id, q.question.text
        else:
            paragraph_id, text = q["paragraph_id"], q["question_text"]
        if paragraph_id not in para_to_section:
            raise DataError(f"question paragraph {paragraph_id} is not in book {book.id}")
        section_counts[para_to_section[paragraph_id]] += 1
        bucket = _prefix_bucket(text)
        prefix_counts[bucket] = prefix_counts.get(bucket, 0) + 1
        total += 1

    values = sorted(section_counts.values())
    mean = sum(values) / len(values)
    sd = statistics.stdev(values) if len(values) > 1 else 0.0
    median = float(values[(len(values) - 1) // 2])
    shares = {k: v / total for k, v in sorted(prefix_counts.items())} if total else {}
    return GenerationStats(
        section_counts=section_counts, mean=mean, sd=sd, median=median, prefix_shares=shares
    )


def stratified_sample(groups: dict[str, list], k: int, seed: int) -> list:
    """Exactly k uniform draws without replacement per group.

    Groups are visited in sorted key order over a single SplitMix64 stream,
    so a (groups, k, seed) triple always yields the same sample.
    """
    if k < 0:
        raise DataError("sample size must be non-negative")
    rng = SplitMix64(seed)
    sampled = []
    for key in sorted(groups):
        items = groups[key]
        if len(items) < k:
            raise DataError(f"group {key!r} has {len(items)} items, fewer than k={k}")
        for idx in rng.sample_without_replacement(len(items), k):
            sampled.append(items[idx])
    return sampled


def threshold_sweep(
    sentences: list[Sentence],
    index: ConceptIndex,
    scorer,
    graph_provider,
    patterns,
    thresholds: list[float],
) -> list[tuple[float, int]]:
    """Question counts at each threshold, from a single scoring/parsing pass."""
    if list(thresholds) != sorted(thresholds):
        raise DataError("thresholds must be sorted ascending")
    filtered = keyword_filter(sentences, index)
    scored = score_sentences(filtered, scorer)
    graphs = graph_provider.graphs_for(filtered)
    answerable = {
        s.id: answer_select(graphs[s.id], patterns) is not None for s in filtered
    }
    pairs = []
    for t in thresholds:
        count = sum(
            1 for s, sc in zip(filtered, scored) if sc.score >= t and answerable[s.id]
        )
        pairs.append((t, count))
    return pairs
