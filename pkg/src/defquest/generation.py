"""Question generation from (sentence, answer) pairs.

The template backend is a deterministic offline fallback; richer phrasing
is delegated to an external generator service reached through
``clients.remote_generate``. Both consume the same ``<sentence> [SEP]
<answer>`` input convention.
"""

import json
from dataclasses import dataclass

from .corpus import ConceptIndex, Sentence
from .depgraph import DependencyGraph, subtree_yield
from .errors import DataError, StageError
from .selection import DIRECT_OBJECT_ID, AnswerCandidate, concept_regex

SEPARATOR = "[SEP]"
GENERIC_QUESTION = "Which characteristic is described for the concept in this sentence?"


@dataclass(frozen=True)
class GeneratedQuestion:
    text: str
    generator_id: str
    sentence_id: str
    answer_ref: tuple[int, ...]

    def __post_init__(self):
        if not self.text.strip():
            raise DataError(f"empty question for {self.sentence_id}")
        if not self.text.endswith("?"):
            raise DataError(f"question does not end with '?': {self.text!r}")


@dataclass(frozen=True)
class QuestionTriplet:
    sentence: Sentence
    answer: AnswerCandidate
    question: GeneratedQuestion
    paragraph_id: str

    def __post_init__(self):
        if self.paragraph_id != self.sentence.paragraph_id:
            raise DataError(
                f"triplet paragraph {self.paragraph_id} is not the sentence's paragraph"
            )


def build_generation_input(sentence: Sentence, answer: AnswerCandidate) -> str:
    if answer.sentence_id != sentence.id:
        raise DataError(
            f"answer belongs to {answer.sentence_id}, not {sentence.id}"
        )
    if SEPARATOR in answer.text:
        raise DataError("reserved token in answer")
    return f"{sentence.text} {SEPARATOR} {answer.text}"


def find_definiendum(sentence: Sentence, answer: AnswerCandidate, index: ConceptIndex):
    """Leftmost index-concept occurrence outside the answer, longest on ties.

    Returns (surface form, start offset) or None. A concept whose phrase
    also occurs inside the answer text is treated as part of the answer and
    skipped.
    """
    best = None
    for concept in index.sorted():
        regex = concept_regex(concept)
        if regex.search(answer.text):
            continue
        m = regex.search(sentence.text)
        if m is None:
            continue
        key = (m.start(), -len(m.group(0)))
        if best is None or key < best[0]:
            best = (key, (m.group(0), m.start()))
    return best[1] if best else None


def _cased_definiendum(surface: str, start: int) -> str:
    # Keep capitalization only when it appears mid-sentence (proper names,
    # acronyms); sentence-initial capitals are an artifact of position.
    if start > 0 and any(c.isupper() for c in surface):
        return surface
    return surface.lower()


def _subject_phrase(graph: DependencyGraph):
    root = graph.root
    for child in graph.children(root.id):
        if child.deprel == "nsubj" or child.deprel.startswith("nsubj:"):
            tokens = subtree_yield(graph, child.id)
            text = " ".join(t.form for t in tokens)
            if tokens[0].xpos not in ("NNP", "NNPS") and text:
                text = text[0].lower() + text[1:]
            return text
    return None


def template_generate(
    sentence: Sentence,
    answer: AnswerCandidate,
    definiendum: tuple[str, int] | None = None,
    graph: DependencyGraph | None = None,
) -> GeneratedQuestion:
    """Deterministic pattern-keyed question templates.

    Clause answers ask for the definiendum ("What is D?"); direct-object
    answers ask what the subject does ("What does S V?", V the root lemma);
    without a known definiendum a generic characteristic question is used.
    """
    text = None
    if answer.pattern_id == DIRECT_OBJECT_ID and graph is not None:
        subject = _subject_phrase(graph)
        if subject:
            text = f"What does {subject} {graph.root.lemma}?"
    if text is None and definiendum is not None:
        surface, start = definiendum
        text = f"What is {_cased_definiendum(surface, start)}?"
    if text is None:
        text = GENERIC_QUESTION
    return GeneratedQuestion(
        text=text,
        generator_id="template",
        sentence_id=sentence.id,
        answer_ref=answer.token_ids,
    )


class TemplateBackend:
    generator_id = "template"

    def __init__(self, index: ConceptIndex, graphs: dict[str, DependencyGraph] | None = None):
        self.index = index
        self.graphs = graphs or {}

    def generate_batch(self, pairs) -> list[GeneratedQuestion]:
        out = []
        for sentence, answer in pairs:
            build_generation_input(sentence, answer)  # validates the pair
            definiendum = find_definiendum(sentence, answer, self.index)
            out.append(
                template_generate(
                    sentence, answer, definiendum, self.graphs.get(sentence.id)
                )
            )
        return out


class ExternalBackend:
    """Adapter from the remote-generator client to the backend protocol."""

    def __init__(self, generate_fn, name: str):
        self._generate = generate_fn
        self.generator_id = f"external:{name}"

    def generate_batch(self, pairs) -> list[GeneratedQuestion]:
        inputs = [build_generation_input(s, a) for s, a in pairs]
        texts = self._generate(inputs)
        out = []
        for (sentence, answer), text in zip(pairs, texts):
            text = text.strip()
            if not text.endswith("?"):
                text += "?"
            out.append(
                GeneratedQuestion(
                    text=text,
                    generator_id=self.generator_id,
                    sentence_id=sentence.id,
                    answer_ref=answer.token_ids,
                )
            )
        return out


@dataclass
class GenerationResult:
    triplets: list[QuestionTriplet]
    failures: list[tuple[str, str]]  # (sentence_id, error)


def generate_all(pairs, backend, skip_failed: bool = False) -> GenerationResult:
    """One question per pair, in input order.

    A backend failure aborts the run unless ``skip_failed`` is set, in
    which case pairs are retried one at a time and the failing ones are
    dropped and recorded.
    """
    if not pairs:
        return GenerationResult(triplets=[], failures=[])
    failures: list[tuple[str, str]] = []
    try:
        questions = backend.generate_batch(pairs)
        batch = list(zip(pairs, questions))
    except Exception as exc:
        if not skip_failed:
            raise StageError("generation", exc) from exc
        batch = []
        for pair in pairs:
            try:
                batch.append((pair, backend.generate_batch([pair])[0]))
            except Exception as pair_exc:  # noqa: BLE001 - recorded per pair
                failures.append((pair[0].id, str(pair_exc)))
    triplets = [
        QuestionTriplet(
            sentence=sentence,
            answer=answer,
            question=question,
            paragraph_id=sentence.paragraph_id,
        )
        for (sentence, answer), question in batch
    ]
    return GenerationResult(triplets=triplets, failures=failures)


def question_record(triplet: QuestionTriplet, book_id: str, score: float) -> dict:
    """The question JSONL record for one triplet."""
    return {
        "question_id": f"{triplet.sentence.id}/q0",
        "book_id": book_id,
        "paragraph_id": triplet.paragraph_id,
        "sentence_id": triplet.sentence.id,
        "sentence_text": triplet.sentence.text,
        "answer_text": triplet.answer.text,
        "answer_token_ids": list(triplet.answer.token_ids),
        "pattern_id": triplet.answer.pattern_id,
        "question_text": triplet.question.text,
        "generator_id": triplet.question.generator_id,
        "score": score,
    }


def dump_record(record: dict) -> str:
    return json.dumps(record, ensure_ascii=False, sort_keys=True)
