"""Hierarchical annotation scheme with gating.

The scheme is a data file (JSON) listing items in presentation order. Each
of the four groups has exactly one gate item: answering a gate "no" marks
every later item in scheme order as not applicable, which keeps rating
distributions free of judgements on questions that were already rejected
at an earlier level.
"""

import json
from dataclasses import dataclass, field
from importlib import resources

from ..errors import DataError

NOT_APPLICABLE = "NA"
GATE_TRIGGER = "no"


@dataclass(frozen=True)
class SchemeItem:
    id: str
    group: int
    choices: tuple[str, ...]
    is_gate: bool = False


@dataclass(frozen=True)
class AnnotationScheme:
    items: tuple[SchemeItem, ...]

    def __post_init__(self):
        ids = [i.id for i in self.items]
        if len(set(ids)) != len(ids):
            raise DataError("duplicate item ids in scheme")
        gates_per_group: dict[int, int] = {}
        for item in self.items:
            if NOT_APPLICABLE in item.choices:
                raise DataError(f"item {item.id}: {NOT_APPLICABLE!r} is reserved")
            if item.is_gate:
                gates_per_group[item.group] = gates_per_group.get(item.group, 0) + 1
                if GATE_TRIGGER not in item.choices:
                    raise DataError(f"gate {item.id} has no {GATE_TRIGGER!r} choice")
        for group in sorted({i.group for i in self.items}):
            if gates_per_group.get(group, 0) != 1:
                raise DataError(f"group {group} must have exactly one gate")

    def item(self, item_id: str) -> SchemeItem:
        for item in self.items:
            if item.id == item_id:
                return item
        raise DataError(f"unknown item: {item_id}")

    @property
    def item_ids(self) -> list[str]:
        return [i.id for i in self.items]

    def to_dict(self) -> dict:
        return {
            "items": [
                {
                    "id": i.id,
                    "group": i.group,
                    "choices": list(i.choices),
                    "is_gate": i.is_gate,
                }
                for i in self.items
            ]
        }


def load_scheme(source=None) -> AnnotationScheme:
    """Scheme from a JSON file/string; the bundled default when omitted."""
    if source is None:
        text = resources.files("defquest.data").joinpath("scheme_default.json").read_text("utf-8")
    else:
        text = source if isinstance(source, str) else source.read()
    raw = json.loads(text)
    return AnnotationScheme(
        items=tuple(
            SchemeItem(
                id=i["id"],
                group=int(i["group"]),
                choices=tuple(i["choices"]),
                is_gate=bool(i.get("is_gate", False)),
            )
            for i in raw["items"]
        )
    )


@dataclass(frozen=True)
class AnnotationRecord:
    question_id: str
    rater_id: str
    responses: dict = field(default_factory=dict)
    ts: float = 0.0


def apply_gating(
    scheme: AnnotationScheme,
    responses: dict,
    question_id: str = "",
    rater_id: str = "",
    ts: float = 0.0,
    strict: bool = True,
) -> AnnotationRecord:
    """Validate raw responses and normalize them under the gating rules.

    Once a gate in scheme order carries "no", every later item is forced to
    NA regardless of what was supplied. With ``strict`` every non-gated
    item must be answered; without it missing answers become NA (useful for
    importing external data). The normalization is idempotent.
    """
    known = set(scheme.item_ids)
    for item_id in responses:
        if item_id not in known:
            raise DataError(f"unknown item: {item_id}")
    normalized = {}
    blanked = False
    for item in scheme.items:
        label = responses.get(item.id)
        if blanked:
            normalized[item.id] = NOT_APPLICABLE
        else:
            if label is None or label == NOT_APPLICABLE:
                if strict and label is None:
                    raise DataError(f"missing response for item {item.id}")
                normalized[item.id] = NOT_APPLICABLE
            elif label not in item.choices:
                raise DataError(f"invalid label {label!r} for item {item.id}")
            else:
                normalized[item.id] = label
            if item.is_gate and normalized[item.id] == GATE_TRIGGER:
                blanked = True
    return AnnotationRecord(
        question_id=question_id, rater_id=rater_id, responses=normalized, ts=ts
    )


def load_annotations(source) -> list[AnnotationRecord]:
    """Annotation JSONL: {question_id, rater_id, responses, ts} per line."""
    text = source if isinstance(source, str) else source.read()
    records = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            records.append(
                AnnotationRecord(
                    question_id=raw["question_id"],
                    rater_id=raw["rater_id"],
                    responses=dict(raw["responses"]),
                    ts=float(raw.get("ts", 0.0)),
                )
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise DataError(f"annotations line {line_no}: {exc}") from exc
    return records


def write_annotations(stream, records: list[AnnotationRecord]):
    for r in records:
        stream.write(
            json.dumps(
                {
                    "question_id": r.question_id,
                    "rater_id": r.rater_id,
                    "responses": r.responses,
                    "ts": r.ts,
                },
                ensure_ascii=False,
                sort_keys=True,
            )
            + "\n"
        )
