"""Evaluation harness: batch hint generation over step sequences, prompt
ranking aggregation, expert rubric annotation, inter-rater agreement, and
student-rating reports."""

from .agreement import KappaReport, cohens_kappa
from .experiment import ExperimentManifest, ExperimentSummary, run_experiment
from .ranking import RankEntry, RankingSheet, aggregate_ranking
from .reports import count_sentences, rating_report, write_rating_report
from .rubric import (
    ANNOTATION_CRITERIA,
    AnnotationError,
    AnnotationStore,
    RubricAnnotation,
    annotate,
    parse_annotation,
    rubric_report,
)

__all__ = [
    "KappaReport",
    "cohens_kappa",
    "ExperimentManifest",
    "ExperimentSummary",
    "run_experiment",
    "RankEntry",
    "RankingSheet",
    "aggregate_ranking",
    "count_sentences",
    "rating_report",
    "write_rating_report",
    "ANNOTATION_CRITERIA",
    "AnnotationError",
    "AnnotationStore",
    "RubricAnnotation",
    "annotate",
    "parse_annotation",
    "rubric_report",
]
