"""Batch hint generation: (step sequence x prompt spec x sample) runs."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..exercises import Exercise
from ..llm import CompletionRequest, LlmError
from ..prompts import PromptSpec, render_prompt
from ..snapshots import StepSequence, read_step_sequence

__all__ = ["ExperimentManifest", "ExperimentSummary", "HarnessError", "run_experiment"]


class HarnessError(Exception):
    pass


@dataclass
class ExperimentManifest:
    step_sequence_paths: list[str]
    prompt_specs: list[PromptSpec]
    exercise_ids: list[str] = field(default_factory=list)
    samples_per_state: int = 1
    output_path: str = "hints.jsonl"

    def __post_init__(self) -> None:
        if not self.prompt_specs:
            raise HarnessError("manifest needs at least one prompt spec")
        if self.samples_per_state < 1:
            raise HarnessError("samples_per_state must be >= 1")

    @classmethod
    def from_json_file(cls, path: str | Path) -> "ExperimentManifest":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        try:
            return cls(
                step_sequence_paths=[str(p) for p in data["step_sequence_paths"]],
                prompt_specs=[PromptSpec.from_json(s) for s in data["prompt_specs"]],
                exercise_ids=[str(e) for e in data.get("exercise_ids", [])],
                samples_per_state=int(data.get("samples_per_state", 1)),
                output_path=str(data.get("output_path", "hints.jsonl")),
            )
        except KeyError as exc:
            raise HarnessError(f"{path}: manifest missing field {exc}") from exc


@dataclass
class ExperimentSummary:
    records: int = 0
    failures: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    output_path: str = ""


def run_experiment(
    manifest: ExperimentManifest,
    client,
    catalog: list[Exercise],
    model_id: str = "gpt-3.5-turbo",
) -> ExperimentSummary:
    """Generate one hint record per (step, prompt spec, sample).

    A backend failure marks that record as failed and the run continues;
    the summary lists every failure. Records are written as JSONL in a
    deterministic order and serialization, so identical inputs against a
    deterministic backend reproduce the output file byte for byte.
    """
    exercises = {e.id: e for e in catalog}
    summary = ExperimentSummary(output_path=manifest.output_path)
    sequences: list[tuple[str, StepSequence]] = []
    for path in manifest.step_sequence_paths:
        sequence = read_step_sequence(path)
        if manifest.exercise_ids and sequence.exercise_id not in manifest.exercise_ids:
            summary.warnings.append(
                f"{path}: exercise {sequence.exercise_id!r} not in manifest, skipped"
            )
            continue
        if sequence.exercise_id not in exercises:
            raise HarnessError(
                f"{path}: exercise {sequence.exercise_id!r} not found in catalog"
            )
        if not sequence.steps:
            summary.warnings.append(f"{path}: empty step sequence, no records")
        sequences.append((path, sequence))

    counter = 0
    with Path(manifest.output_path).open("w", encoding="utf-8") as out:
        for path, sequence in sequences:
            exercise = exercises[sequence.exercise_id]
            for step in sequence.steps:
                for spec in manifest.prompt_specs:
                    prompt = render_prompt(spec, exercise, step.source)
                    for sample in range(manifest.samples_per_state):
                        counter += 1
                        record = {
                            "hint_id": f"h{counter:05d}",
                            "step_ref": {
                                "path": path,
                                "student_id": sequence.student_id,
                                "exercise_id": sequence.exercise_id,
                                "seq_index": step.seq_index,
                            },
                            "sample": sample,
                            "spec": spec.to_json(),
                            "prompt_text": prompt.text,
                        }
                        try:
                            response = client.complete(
                                CompletionRequest(
                                    prompt_text=prompt.text,
                                    temperature=spec.temperature,
                                    model_id=model_id,
                                )
                            )
                        except LlmError as exc:
                            record.update(
                                {"failed": True, "error": str(exc), "hint_text": None,
                                 "latency_ms": None}
                            )
                            summary.failures.append(f"{record['hint_id']}: {exc}")
                        else:
                            record.update(
                                {
                                    "failed": False,
                                    "hint_text": response.text,
                                    "latency_ms": response.latency_ms,
                                }
                            )
                        out.write(json.dumps(record, sort_keys=True) + "\n")
                        summary.records += 1
    return summary
