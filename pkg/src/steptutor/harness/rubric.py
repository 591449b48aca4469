"""Expert rubric annotation of generated hints.

Each annotation classifies one hint on nine criteria: the feedback type,
what additional information it carries, its level of detail, four binary
judgements (personalised, appropriate, specific, misleading), its tone,
and its length in sentences. Annotation is file-driven: experts edit a
JSONL sheet offline, then validate it against the hints file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

__all__ = [
    "FEEDBACK_TYPES",
    "INFORMATION_KINDS",
    "DETAIL_LEVELS",
    "TONES",
    "ANNOTATION_CRITERIA",
    "AnnotationError",
    "RubricAnnotation",
    "AnnotationStore",
    "parse_annotation",
    "annotate",
    "information_label",
    "rubric_report",
]

FEEDBACK_TYPES = (
    "task_constraints",
    "concepts",
    "mistakes",
    "how_to_proceed",
    "meta_cognition",
)
INFORMATION_KINDS = ("compliment", "tip", "explanation")
DETAIL_LEVELS = ("bottom_out", "high_level")
TONES = ("direct", "neutral", "friendly")

ANNOTATION_CRITERIA = (
    "feedback_type",
    "information",
    "level_of_detail",
    "personalised",
    "appropriate",
    "specific",
    "misleading",
    "tone",
    "length_sentences",
)

_BINARY_CRITERIA = ("personalised", "appropriate", "specific", "misleading")

# Letters used in combination labels, in canonical order.
_INFO_LETTERS = {"compliment": "C", "tip": "T", "explanation": "E"}


class AnnotationError(Exception):
    pass


@dataclass(frozen=True)
class RubricAnnotation:
    hint_id: str
    annotator_id: str
    feedback_type: str
    information: frozenset[str]
    level_of_detail: str
    personalised: bool
    appropriate: bool
    specific: bool
    misleading: bool
    tone: str
    length_sentences: int

    def to_json(self) -> dict:
        return {
            "hint_id": self.hint_id,
            "annotator_id": self.annotator_id,
            "feedback_type": self.feedback_type,
            "information": sorted(self.information),
            "level_of_detail": self.level_of_detail,
            "personalised": self.personalised,
            "appropriate": self.appropriate,
            "specific": self.specific,
            "misleading": self.misleading,
            "tone": self.tone,
            "length_sentences": self.length_sentences,
        }

    def criterion_label(self, criterion: str) -> str:
        """Flat category label for agreement comparisons; the information
        set is canonicalized by sorting."""
        if criterion not in ANNOTATION_CRITERIA:
            raise AnnotationError(f"unknown criterion {criterion!r}")
        value = getattr(self, criterion)
        if criterion == "information":
            return "+".join(sorted(value)) or "none"
        return str(value)


def _enum_check(origin: str, criterion: str, value, allowed: tuple[str, ...]) -> str:
    if value not in allowed:
        raise AnnotationError(
            f"{origin}: criterion {criterion!r} has illegal value {value!r} "
            f"(allowed: {list(allowed)})"
        )
    return value


def parse_annotation(data: dict, annotator_id: str | None = None, origin: str = "entry") -> RubricAnnotation:
    """Validate one annotation entry; errors name the offending criterion."""
    if "hint_id" not in data or not data["hint_id"]:
        raise AnnotationError(f"{origin}: missing hint_id")
    missing = [c for c in ANNOTATION_CRITERIA if c not in data]
    if missing:
        raise AnnotationError(f"{origin}: missing criterion {missing[0]!r}")

    info_raw = data["information"]
    if not isinstance(info_raw, (list, set, tuple)):
        raise AnnotationError(
            f"{origin}: criterion 'information' must be a list of categories"
        )
    information = set()
    for item in info_raw:
        _enum_check(origin, "information", item, INFORMATION_KINDS)
        information.add(item)

    for criterion in _BINARY_CRITERIA:
        if not isinstance(data[criterion], bool):
            raise AnnotationError(
                f"{origin}: criterion {criterion!r} must be true or false, "
                f"got {data[criterion]!r}"
            )

    length = data["length_sentences"]
    if isinstance(length, bool) or not isinstance(length, int) or length < 1:
        raise AnnotationError(
            f"{origin}: criterion 'length_sentences' must be a positive integer, "
            f"got {length!r}"
        )

    return RubricAnnotation(
        hint_id=str(data["hint_id"]),
        annotator_id=str(annotator_id or data.get("annotator_id", "")),
        feedback_type=_enum_check(origin, "feedback_type", data["feedback_type"], FEEDBACK_TYPES),
        information=frozenset(information),
        level_of_detail=_enum_check(
            origin, "level_of_detail", data["level_of_detail"], DETAIL_LEVELS
        ),
        personalised=data["personalised"],
        appropriate=data["appropriate"],
        specific=data["specific"],
        misleading=data["misleading"],
        tone=_enum_check(origin, "tone", data["tone"], TONES),
        length_sentences=length,
    )


class AnnotationStore:
    """Annotations keyed by (hint_id, annotator_id); duplicates conflict."""

    def __init__(self) -> None:
        self._entries: dict[tuple[str, str], RubricAnnotation] = {}

    def add(self, annotation: RubricAnnotation) -> None:
        key = (annotation.hint_id, annotation.annotator_id)
        if key in self._entries:
            raise AnnotationError(
                f"duplicate annotation for hint {annotation.hint_id!r} "
                f"by annotator {annotation.annotator_id!r}"
            )
        self._entries[key] = annotation

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries.values())

    def by_annotator(self, annotator_id: str) -> list[RubricAnnotation]:
        return [a for a in self._entries.values() if a.annotator_id == annotator_id]

    def save(self, path: str | Path) -> None:
        with Path(path).open("w", encoding="utf-8") as fh:
            for annotation in self._entries.values():
                fh.write(json.dumps(annotation.to_json(), sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "AnnotationStore":
        store = cls()
        with Path(path).open(encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                store.add(parse_annotation(json.loads(line), origin=f"{path}:{line_no}"))
        return store


def read_hint_ids(hints_path: str | Path) -> set[str]:
    """Hint ids from a generated-hints JSONL file or a service event export."""
    ids: set[str] = set()
    with Path(hints_path).open(encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            record = json.loads(line)
            if record.get("kind") == "hint_issued":
                ids.add(record["payload"]["hint_id"])
            elif "hint_id" in record:
                ids.add(record["hint_id"])
    return ids


def annotate(
    hints_path: str | Path,
    annotator_id: str,
    entries_path: str | Path,
    store: AnnotationStore | None = None,
) -> AnnotationStore:
    """Validate an annotator's entry sheet against the hints file.

    Every entry must reference an existing hint, carry all nine criteria
    within their domains, and not duplicate an existing (hint, annotator)
    pair in the store.
    """
    store = store or AnnotationStore()
    known_hints = read_hint_ids(hints_path)
    with Path(entries_path).open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            origin = f"{entries_path}:{line_no}"
            annotation = parse_annotation(json.loads(line), annotator_id, origin)
            if annotation.hint_id not in known_hints:
                raise AnnotationError(f"{origin}: unknown hint_id {annotation.hint_id!r}")
            store.add(annotation)
    return store


def information_label(information: Iterable[str]) -> str:
    """Combination label for an information set, e.g. C&T for compliment+tip."""
    letters = [_INFO_LETTERS[kind] for kind in _INFO_LETTERS if kind in set(information)]
    return "&".join(letters) if letters else "none"


def rubric_report(annotations: Iterable[RubricAnnotation]) -> dict:
    """Frequency tables per criterion plus information-combination counts."""
    annotations = list(annotations)
    report: dict = {
        "n": len(annotations),
        "feedback_type": {},
        "level_of_detail": {},
        "tone": {},
        "information": {},
        "length_sentences": {},
        "binary": {c: {"true": 0, "false": 0} for c in _BINARY_CRITERIA},
    }
    for annotation in annotations:
        for criterion in ("feedback_type", "level_of_detail", "tone"):
            value = getattr(annotation, criterion)
            report[criterion][value] = report[criterion].get(value, 0) + 1
        label = information_label(annotation.information)
        report["information"][label] = report["information"].get(label, 0) + 1
        length = annotation.length_sentences
        report["length_sentences"][length] = report["length_sentences"].get(length, 0) + 1
        for criterion in _BINARY_CRITERIA:
            key = "true" if getattr(annotation, criterion) else "false"
            report["binary"][criterion][key] += 1
    return report
