"""Turn raw per-keystroke snapshot logs into clean step sequences.

A raw log is every saved program state of one student on one exercise,
ordered by capture index. The cleaning stages remove cosmetic churn
(duplicates, mid-edit keystroke states, throwaway trace prints) and states
that do not parse, leaving the meaningful steps the student moved through.
"""

from __future__ import annotations

import csv
import json
import shlex
import subprocess
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

__all__ = [
    "Snapshot",
    "FilterTag",
    "StepSequence",
    "PipelineError",
    "IngestError",
    "CheckerUnavailableError",
    "ingest_raw_log",
    "normalize_source",
    "dedup",
    "is_syntactically_valid",
    "make_command_checker",
    "filter_syntax_errors",
    "collapse_line_edits",
    "remove_transient_prints",
    "build_step_sequence",
    "write_step_sequence",
    "read_step_sequence",
]


class PipelineError(Exception):
    """Base error for the snapshot pipeline."""


class IngestError(PipelineError):
    """Raw log file could not be parsed under the declared format."""


class CheckerUnavailableError(PipelineError):
    """The configured syntax checker cannot run (distinct from invalid source)."""


@dataclass(frozen=True)
class Snapshot:
    """One full saved program state from the keystroke log."""

    seq_index: int
    timestamp: int
    source: str


@dataclass(frozen=True)
class FilterTag:
    """Records that `rule` removed the raw snapshot at `seq_index`."""

    rule: str
    seq_index: int


@dataclass
class StepSequence:
    student_id: str
    exercise_id: str
    steps: list[Snapshot]
    provenance: list[FilterTag] = field(default_factory=list)


# --------------------------------------------------------------------------
# Ingestion
# --------------------------------------------------------------------------

_REQUIRED_FIELDS = ("index", "timestamp", "source")


def _normalize_newlines(text: str) -> str:
    return text.replace("\r\n", "\n").replace("\r", "\n")


def _parse_row(row: dict, row_no: int) -> Snapshot:
    for key in _REQUIRED_FIELDS:
        if key not in row or row[key] is None:
            raise IngestError(f"row {row_no}: missing field {key!r}")
    try:
        seq_index = int(row["index"])
        timestamp = int(row["timestamp"])
    except (TypeError, ValueError) as exc:
        raise IngestError(f"row {row_no}: {exc}") from exc
    if seq_index < 0:
        raise IngestError(f"row {row_no}: index must be non-negative")
    return Snapshot(
        seq_index=seq_index,
        timestamp=timestamp,
        source=_normalize_newlines(str(row["source"])),
    )


def ingest_raw_log(path: str | Path, format: str) -> list[Snapshot]:
    """Load a raw snapshot log (CSV or JSONL) and return snapshots by index.

    Columns/keys: index, timestamp, source. Source text is kept byte-exact
    apart from newline normalization to LF.
    """
    path = Path(path)
    if not path.exists():
        raise IngestError(f"no such file: {path}")
    if format not in ("csv", "jsonl"):
        raise IngestError(f"unknown format {format!r} (expected csv or jsonl)")

    snapshots: list[Snapshot] = []
    if format == "csv":
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise IngestError(f"{path}: empty file, no header row")
            missing = [c for c in _REQUIRED_FIELDS if c not in reader.fieldnames]
            if missing:
                raise IngestError(f"{path}: missing columns {missing}")
            for row_no, row in enumerate(reader, start=2):
                snapshots.append(_parse_row(row, row_no))
    else:
        with path.open(encoding="utf-8") as fh:
            for row_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise IngestError(f"row {row_no}: invalid JSON: {exc}") from exc
                if not isinstance(obj, dict):
                    raise IngestError(f"row {row_no}: expected an object")
                snapshots.append(_parse_row(obj, row_no))

    snapshots.sort(key=lambda s: s.seq_index)
    for prev, cur in zip(snapshots, snapshots[1:]):
        if cur.seq_index == prev.seq_index:
            raise IngestError(f"duplicate index {cur.seq_index}")
        if cur.timestamp < prev.timestamp:
            raise IngestError(
                f"index {cur.seq_index}: timestamp decreases ({cur.timestamp} < {prev.timestamp})"
            )
    return snapshots


# --------------------------------------------------------------------------
# Normalization and dedup
# --------------------------------------------------------------------------

def normalize_source(source: str) -> str:
    """Strip trailing whitespace per line and drop trailing blank lines."""
    lines = [line.rstrip() for line in _normalize_newlines(source).split("\n")]
    while lines and lines[-1] == "":
        lines.pop()
    return "\n".join(lines)


def dedup(snapshots: Sequence[Snapshot], scope: str = "consecutive") -> list[Snapshot]:
    """Drop snapshots equal (after normalization) to an already-retained one.

    scope="consecutive" compares against the previous retained snapshot only,
    so genuine reverts to an earlier state survive. scope="global" drops any
    state seen before in the sequence.
    """
    if scope not in ("consecutive", "global"):
        raise ValueError(f"unknown dedup scope {scope!r}")
    kept: list[Snapshot] = []
    seen: set[str] = set()
    prev_norm: str | None = None
    for snap in snapshots:
        norm = normalize_source(snap.source)
        if scope == "consecutive":
            duplicate = norm == prev_norm
        else:
            duplicate = norm in seen
        if not duplicate:
            kept.append(snap)
            prev_norm = norm
            seen.add(norm)
    return kept


# --------------------------------------------------------------------------
# Syntax filtering
# --------------------------------------------------------------------------

def is_syntactically_valid(source: str) -> bool:
    """True iff the source compiles as a Python 3 module.

    compile() rather than ast.parse() so that late syntax errors such as a
    top-level `return` are rejected too.
    """
    try:
        compile(source, "<candidate>", "exec")
    except (SyntaxError, ValueError):
        return False
    return True


def make_command_checker(command_template: str) -> Callable[[str], bool]:
    """Build a checker that runs an external validator as a subprocess.

    The template gets the candidate file path substituted for `{file}`;
    exit status 0 means valid. A missing executable raises
    CheckerUnavailableError rather than reporting the source as invalid.
    """
    import tempfile

    def check(source: str) -> bool:
        with tempfile.TemporaryDirectory(prefix="steptutor-check-") as tmp:
            target = Path(tmp) / "candidate.py"
            target.write_text(source, encoding="utf-8")
            argv = [part.format(file=str(target)) for part in shlex.split(command_template)]
            try:
                proc = subprocess.run(argv, capture_output=True, timeout=30)
            except FileNotFoundError as exc:
                raise CheckerUnavailableError(
                    f"syntax checker executable not found: {argv[0]}"
                ) from exc
            except subprocess.TimeoutExpired as exc:
                raise CheckerUnavailableError("syntax checker timed out") from exc
            return proc.returncode == 0

    return check


def filter_syntax_errors(
    snapshots: Sequence[Snapshot],
    checker: Callable[[str], bool] | None = None,
) -> tuple[list[Snapshot], list[FilterTag]]:
    """Keep only snapshots the checker accepts; report the removed indices."""
    checker = checker or is_syntactically_valid
    kept: list[Snapshot] = []
    removed: list[FilterTag] = []
    for snap in snapshots:
        if checker(snap.source):
            kept.append(snap)
        else:
            removed.append(FilterTag("syntax_error", snap.seq_index))
    return kept, removed


# --------------------------------------------------------------------------
# Line-edit collapsing
# --------------------------------------------------------------------------

def _changed_line_index(a: str, b: str) -> int | None:
    """Index of the single differing line between a and b, else None.

    None when line counts differ or when zero / more than one line differs.
    """
    lines_a = a.split("\n")
    lines_b = b.split("\n")
    if len(lines_a) != len(lines_b):
        return None
    diff = [i for i, (la, lb) in enumerate(zip(lines_a, lines_b)) if la != lb]
    if len(diff) == 1:
        return diff[0]
    return None


def collapse_line_edits(
    snapshots: Sequence[Snapshot],
) -> tuple[list[Snapshot], list[FilterTag]]:
    """Keep only the last snapshot of each same-line editing run.

    A run is a maximal stretch in which every consecutive pair differs on
    exactly one line, the same line index throughout, with no change in
    line count.
    """
    if len(snapshots) <= 1:
        return list(snapshots), []

    kept: list[Snapshot] = []
    removed: list[FilterTag] = []
    run_start = 0
    run_line: int | None = None
    for i in range(1, len(snapshots) + 1):
        if i < len(snapshots):
            idx = _changed_line_index(snapshots[i - 1].source, snapshots[i].source)
            extends = idx is not None and (run_line is None or idx == run_line)
        else:
            idx = None
            extends = False
        if extends:
            run_line = idx
            continue
        # Run [run_start, i-1] ends here; keep its last snapshot.
        kept.append(snapshots[i - 1])
        removed.extend(
            FilterTag("line_edit", s.seq_index) for s in snapshots[run_start : i - 1]
        )
        run_start = i
        run_line = None
    return kept, removed


# --------------------------------------------------------------------------
# Transient trace prints
# --------------------------------------------------------------------------

def _is_trace_line(line: str) -> bool:
    return line.strip().startswith("print(")


def remove_transient_prints(
    snapshots: Sequence[Snapshot],
    window: int = 5,
) -> tuple[list[Snapshot], list[FilterTag]]:
    """Drop snapshots that differ from the previous kept one only by
    short-lived trace prints.

    A trace line counts as transient when it is absent from the final
    snapshot and disappears again within `window` subsequent snapshots.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    if len(snapshots) <= 1:
        return list(snapshots), []

    norm_lines = [set(normalize_source(s.source).split("\n")) for s in snapshots]
    final_lines = norm_lines[-1]

    def transient_at(i: int, line: str) -> bool:
        if not _is_trace_line(line) or line in final_lines:
            return False
        upper = min(len(snapshots), i + 1 + window)
        return any(line not in norm_lines[j] for j in range(i + 1, upper))

    kept = [snapshots[0]]
    kept_lines = norm_lines[0]
    removed: list[FilterTag] = []
    for i in range(1, len(snapshots)):
        diff = norm_lines[i] ^ kept_lines
        if diff and all(transient_at(i, line) for line in diff):
            removed.append(FilterTag("transient_print", snapshots[i].seq_index))
        else:
            kept.append(snapshots[i])
            kept_lines = norm_lines[i]
    return kept, removed


# --------------------------------------------------------------------------
# Full pipeline
# --------------------------------------------------------------------------

def build_step_sequence(
    raw: Sequence[Snapshot],
    student_id: str,
    exercise_id: str,
    window: int = 5,
    checker: Callable[[str], bool] | None = None,
    dedup_scope: str = "consecutive",
) -> StepSequence:
    """Run the cleaning stages and return the step sequence with provenance.

    Stage order: dedup, syntax filter, line-edit collapse, transient-print
    removal, final dedup. Removing a snapshot makes new neighbours adjacent,
    which can expose further duplicates or line-edit runs, so the stage
    composition is repeated until a pass removes nothing; that makes the
    whole build idempotent.
    """
    if len({s.seq_index for s in raw}) != len(raw):
        raise PipelineError("raw snapshots must have unique seq_index values")
    provenance: list[FilterTag] = []
    steps = list(raw)
    while True:
        before = len(steps)

        deduped = dedup(steps, scope=dedup_scope)
        kept_idx = {s.seq_index for s in deduped}
        provenance.extend(
            FilterTag("duplicate", s.seq_index) for s in steps if s.seq_index not in kept_idx
        )
        steps = deduped

        steps, removed = filter_syntax_errors(steps, checker)
        provenance.extend(removed)

        steps, removed = collapse_line_edits(steps)
        provenance.extend(removed)

        steps, removed = remove_transient_prints(steps, window=window)
        provenance.extend(removed)

        if len(steps) == before:
            break

    provenance.sort(key=lambda tag: tag.seq_index)
    return StepSequence(
        student_id=student_id,
        exercise_id=exercise_id,
        steps=steps,
        provenance=provenance,
    )


# --------------------------------------------------------------------------
# Step sequence files
# --------------------------------------------------------------------------

def write_step_sequence(sequence: StepSequence, path: str | Path) -> None:
    """Write a step sequence as JSONL: one header object, then one step per line."""
    path = Path(path)
    header = {
        "student_id": sequence.student_id,
        "exercise_id": sequence.exercise_id,
        "provenance": [
            {"rule": tag.rule, "seq_index": tag.seq_index} for tag in sequence.provenance
        ],
    }
    with path.open("w", encoding="utf-8") as fh:
        fh.write(json.dumps(header) + "\n")
        for step in sequence.steps:
            fh.write(
                json.dumps(
                    {
                        "index": step.seq_index,
                        "timestamp": step.timestamp,
                        "source": step.source,
                    }
                )
                + "\n"
            )


def read_step_sequence(path: str | Path) -> StepSequence:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        lines = [line for line in fh if line.strip()]
    if not lines:
        raise IngestError(f"{path}: empty step sequence file")
    header = json.loads(lines[0])
    for key in ("student_id", "exercise_id"):
        if key not in header:
            raise IngestError(f"{path}: header missing {key!r}")
    steps = [_parse_row(json.loads(line), i + 2) for i, line in enumerate(lines[1:])]
    provenance = [
        FilterTag(entry["rule"], int(entry["seq_index"]))
        for entry in header.get("provenance", [])
    ]
    return StepSequence(
        student_id=str(header["student_id"]),
        exercise_id=str(header["exercise_id"]),
        steps=steps,
        provenance=provenance,
    )
