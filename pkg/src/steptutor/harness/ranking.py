"""Aggregate rank sheets from prompt comparisons.

Two raters rank the hints each prompt produced for the same set of student
programs from 1 (best) to 3 (worst); a prompt's score is the sum of all its
ranks, lower is better. Tied ranks within an entry are allowed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["RankEntry", "RankingSheet", "RankingError", "aggregate_ranking", "load_sheets"]

ALLOWED_RANKS = (1, 2, 3)


class RankingError(Exception):
    pass


@dataclass(frozen=True)
class RankEntry:
    program_id: str
    ranks: dict[str, int]


@dataclass
class RankingSheet:
    exercise_id: str
    entries: list[RankEntry] = field(default_factory=list)

    def validate(self) -> None:
        if not self.entries:
            raise RankingError(f"sheet {self.exercise_id!r} has no entries")
        prompt_ids = set(self.entries[0].ranks)
        for entry in self.entries:
            if set(entry.ranks) != prompt_ids:
                raise RankingError(
                    f"sheet {self.exercise_id!r}, program {entry.program_id!r}: "
                    f"ranks {sorted(entry.ranks)} do not cover the prompt set "
                    f"{sorted(prompt_ids)}"
                )
            for prompt_id, rank in entry.ranks.items():
                if rank not in ALLOWED_RANKS:
                    raise RankingError(
                        f"sheet {self.exercise_id!r}, program {entry.program_id!r}: "
                        f"rank {rank} for {prompt_id!r} not in {ALLOWED_RANKS}"
                    )

    def prompt_ids(self) -> set[str]:
        return set(self.entries[0].ranks) if self.entries else set()

    @classmethod
    def from_json(cls, data: dict) -> "RankingSheet":
        sheet = cls(
            exercise_id=str(data["exercise_id"]),
            entries=[
                RankEntry(
                    program_id=str(entry["program_id"]),
                    ranks={str(k): int(v) for k, v in entry["ranks"].items()},
                )
                for entry in data["entries"]
            ],
        )
        sheet.validate()
        return sheet


def load_sheets(directory: str | Path) -> list[RankingSheet]:
    sheets = []
    for path in sorted(Path(directory).glob("*.json")):
        try:
            sheets.append(RankingSheet.from_json(json.loads(path.read_text(encoding="utf-8"))))
        except (KeyError, ValueError, RankingError) as exc:
            raise RankingError(f"{path}: {exc}") from exc
    if not sheets:
        raise RankingError(f"no sheet files (*.json) found in {directory}")
    return sheets


def aggregate_ranking(sheets: list[RankingSheet]) -> dict[str, dict]:
    """Sum ranks per prompt across sheets; the unique minimum total wins.

    Returns prompt_id -> {per_exercise, total, winner}. On a tie for the
    minimum no prompt is marked winner; callers surface the tie as such.
    """
    if not sheets:
        raise RankingError("no sheets to aggregate")
    for sheet in sheets:
        sheet.validate()
    prompt_ids = sheets[0].prompt_ids()
    for sheet in sheets[1:]:
        if sheet.prompt_ids() != prompt_ids:
            raise RankingError(
                f"sheet {sheet.exercise_id!r} ranks prompts {sorted(sheet.prompt_ids())}, "
                f"expected {sorted(prompt_ids)}"
            )

    result: dict[str, dict] = {
        prompt_id: {"per_exercise": {}, "total": 0, "winner": False}
        for prompt_id in sorted(prompt_ids)
    }
    for sheet in sheets:
        for prompt_id in prompt_ids:
            subtotal = sum(entry.ranks[prompt_id] for entry in sheet.entries)
            per_exercise = result[prompt_id]["per_exercise"]
            per_exercise[sheet.exercise_id] = per_exercise.get(sheet.exercise_id, 0) + subtotal
            result[prompt_id]["total"] += subtotal

    best = min(entry["total"] for entry in result.values())
    leaders = [pid for pid, entry in result.items() if entry["total"] == best]
    if len(leaders) == 1:
        result[leaders[0]]["winner"] = True
    return result
