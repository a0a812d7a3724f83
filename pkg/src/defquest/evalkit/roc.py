"""ROC analysis for threshold selection on binary scores."""

from ..errors import DataError

_EPSILON = 1e-9


def rates_at_threshold(pairs: list[tuple[float, bool]], threshold: float) -> tuple[float, float]:
    """(TPR, FPR) when predicting positive iff score >= threshold."""
    positives = sum(1 for _, label in pairs if label)
    negatives = len(pairs) - positives
    if positives == 0 or negatives == 0:
        raise DataError("both classes must be present")
    tp = sum(1 for score, label in pairs if label and score >= threshold)
    fp = sum(1 for score, label in pairs if not label and score >= threshold)
    return (tp / positives, fp / negatives)


def roc_points(pairs: list[tuple[float, bool]]) -> list[tuple[float, float, float]]:
    """(threshold, TPR, FPR) at every distinct score plus the sentinels.

    Thresholds are the distinct score values together with 0 and a value
    just above the score range (1 + eps, or max + eps for scores beyond 1),
    ordered descending: the first point is (0, 0), the last (1, 1).
    """
    if not pairs:
        raise DataError("no scores")
    scores = sorted({score for score, _ in pairs}, reverse=True)
    high = max(1.0, scores[0]) + _EPSILON
    thresholds = [high] + scores
    if 0.0 not in scores:
        thresholds.append(0.0)
    return [(t, *rates_at_threshold(pairs, t)) for t in thresholds]
