"""Inter-annotator agreement: percent agreement, Krippendorff's alpha,
bootstrap confidence intervals, and answer distributions.

"Not applicable" counts as a regular answer category throughout. Alpha is
the nominal-metric coincidence-matrix formulation over pairable values
(units rated once contribute nothing); the bootstrap resamples whole
question-units, every resampled observation carrying all raters at once.
All statistics are invariant under record, question and rater reordering
because units and raters are processed in sorted order.
"""

import math
from dataclasses import dataclass

from ..errors import DataError
from ..rng import SplitMix64, derive_seed
from ._backend import kernel
from .scheme import NOT_APPLICABLE, AnnotationRecord, AnnotationScheme

REDRAW_CAP_FACTOR = 10


def _unit_labels(records: list[AnnotationRecord], item: str) -> dict[str, dict[str, str]]:
    """question_id -> {rater_id: label}; the latest record per rater wins."""
    latest: dict[tuple[str, str], tuple[float, int, str]] = {}
    for order, record in enumerate(records):
        if item not in record.responses:
            continue
        key = (record.question_id, record.rater_id)
        stamp = (record.ts, order)
        if key not in latest or stamp >= latest[key][:2]:
            latest[key] = (record.ts, order, record.responses[item])
    units: dict[str, dict[str, str]] = {}
    for (question_id, rater_id), (_, _, label) in latest.items():
        units.setdefault(question_id, {})[rater_id] = label
    return units


def _validate_item(item: str, scheme: AnnotationScheme | None, records):
    if scheme is not None:
        scheme.item(item)  # raises on unknown
    elif not any(item in r.responses for r in records):
        raise DataError(f"unknown item: {item}")


def percent_agreement(
    records: list[AnnotationRecord], item: str, scheme: AnnotationScheme | None = None
) -> float:
    """Mean over questions of (agreeing rater pairs / total rater pairs)."""
    _validate_item(item, scheme, records)
    units = _unit_labels(records, item)
    per_question = []
    for question_id in sorted(units):
        labels = [units[question_id][r] for r in sorted(units[question_id])]
        m = len(labels)
        if m < 2:
            continue
        agreeing = sum(
            1
            for i in range(m)
            for j in range(i + 1, m)
            if labels[i] == labels[j]
        )
        per_question.append(agreeing / (m * (m - 1) / 2))
    if not per_question:
        raise DataError("no questions with at least two raters")
    return sum(per_question) / len(per_question)


def _coded_units(records: list[AnnotationRecord], item: str):
    """Flattened per-unit category codes in canonical (sorted) order."""
    units = _unit_labels(records, item)
    categories = sorted({label for ratings in units.values() for label in ratings.values()})
    code = {c: i for i, c in enumerate(categories)}
    values: list[int] = []
    starts: list[int] = []
    lengths: list[int] = []
    for question_id in sorted(units):
        ratings = units[question_id]
        starts.append(len(values))
        lengths.append(len(ratings))
        for rater in sorted(ratings):
            values.append(code[ratings[rater]])
    return values, starts, lengths, categories


def krippendorff_alpha(
    records: list[AnnotationRecord], item: str, scheme: AnnotationScheme | None = None
) -> float:
    _validate_item(item, scheme, records)
    values, starts, lengths, categories = _coded_units(records, item)
    if not values:
        raise DataError(f"no ratings for item {item}")
    alpha = kernel.alpha_one(
        values, starts, lengths, len(categories), list(range(len(starts)))
    )
    if math.isnan(alpha):
        raise DataError("nothing pairable: every question has a single rating")
    return alpha


def _nearest_rank(sorted_values: list[float], p: float) -> float:
    rank = max(1, math.ceil(p * len(sorted_values)))
    return sorted_values[rank - 1]


def bootstrap_ci(
    records: list[AnnotationRecord],
    item: str,
    B: int = 1000,
    N: int = 1000,
    alpha_level: float = 0.05,
    seed: int = 0,
    scheme: AnnotationScheme | None = None,
) -> tuple[float, float]:
    """Percentile bootstrap CI for alpha over question-unit resamples.

    Resample b draws N units with replacement from its own derived stream
    (seed, b), so resamples are order-independent and parallelizable. A
    degenerate resample (nothing pairable) is redrawn from the same stream,
    with a global cap of 10*B redraws.
    """
    _validate_item(item, scheme, records)
    values, starts, lengths, categories = _coded_units(records, item)
    if not values:
        raise DataError(f"no ratings for item {item}")
    n_units = len(starts)
    n_cat = len(categories)

    rows = []
    rngs = []
    for b in range(B):
        rng = SplitMix64(derive_seed(seed, b))
        rows.append(rng.sample_with_replacement(n_units, N))
        rngs.append(rng)
    alphas = kernel.alpha_batch(values, starts, lengths, n_cat, rows)

    redraws = 0
    for b in range(B):
        while math.isnan(alphas[b]):
            redraws += 1
            if redraws > REDRAW_CAP_FACTOR * B:
                raise DataError("bootstrap: too many degenerate resamples")
            row = rngs[b].sample_with_replacement(n_units, N)
            alphas[b] = kernel.alpha_one(values, starts, lengths, n_cat, row)

    alphas = sorted(alphas)
    lower = _nearest_rank(alphas, alpha_level / 2)
    upper = _nearest_rank(alphas, 1 - alpha_level / 2)
    return (lower, upper)


@dataclass(frozen=True)
class AgreementReport:
    item: str
    percent_agreement: float
    alpha: float
    ci: tuple[float, float] | None
    most_frequent_share: float
    n_applicable: int
    n_total: int

    def to_dict(self) -> dict:
        return {
            "item": self.item,
            "percent_agreement": self.percent_agreement,
            "alpha": self.alpha,
            "ci_lower": self.ci[0] if self.ci else None,
            "ci_upper": self.ci[1] if self.ci else None,
            "most_frequent_share": self.most_frequent_share,
            "n_applicable": self.n_applicable,
            "n_total": self.n_total,
        }


def agreement_report(
    records: list[AnnotationRecord],
    item: str,
    scheme: AnnotationScheme | None = None,
    bootstrap: tuple[int, int, int] | None = None,  # (B, N, seed)
) -> AgreementReport:
    _validate_item(item, scheme, records)
    labels = [r.responses[item] for r in records if item in r.responses]
    counts: dict[str, int] = {}
    for label in labels:
        counts[label] = counts.get(label, 0) + 1
    ci = None
    if bootstrap is not None:
        B, N, seed = bootstrap
        ci = bootstrap_ci(records, item, B=B, N=N, seed=seed, scheme=scheme)
    return AgreementReport(
        item=item,
        percent_agreement=percent_agreement(records, item, scheme),
        alpha=krippendorff_alpha(records, item, scheme),
        ci=ci,
        most_frequent_share=max(counts.values()) / len(labels) if labels else 0.0,
        n_applicable=sum(1 for label in labels if label != NOT_APPLICABLE),
        n_total=len(labels),
    )


def distribution_report(records: list[AnnotationRecord], scheme: AnnotationScheme) -> dict:
    """Per item: each label's share of applicable answers and of all answers."""
    report = {}
    for item in scheme.items:
        labels = [r.responses[item.id] for r in records if item.id in r.responses]
        n_total = len(labels)
        n_applicable = sum(1 for label in labels if label != NOT_APPLICABLE)
        shares = {}
        for choice in item.choices:
            count = sum(1 for label in labels if label == choice)
            shares[choice] = {
                "relative": count / n_applicable if n_applicable else 0.0,
                "absolute": count / n_total if n_total else 0.0,
            }
        report[item.id] = {
            "labels": shares,
            "n_applicable": n_applicable,
            "n_total": n_total,
        }
    return report
