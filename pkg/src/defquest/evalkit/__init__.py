"""Evaluation apparatus: annotation scheme, agreement statistics, ROC."""

from .agreement import (  # noqa: F401
    AgreementReport,
    agreement_report,
    bootstrap_ci,
    distribution_report,
    krippendorff_alpha,
    percent_agreement,
)
from .roc import rates_at_threshold, roc_points  # noqa: F401
from .scheme import (  # noqa: F401
    NOT_APPLICABLE,
    AnnotationRecord,
    AnnotationScheme,
    SchemeItem,
    apply_gating,
    load_annotations,
    load_scheme,
    write_annotations,
)
