"""Prompt rendering for hint generation.

A prompt is assembled from labeled sections in fixed order: the problem
description (optional), the model solution (optional), the student's code,
and a closing instruction line. Which sections appear, which instruction
phrasing is used, and the sampling temperature together span the design
space the evaluation harness sweeps; the shipped default is the
configuration that won the prompt-ranking comparison.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .exercises import Exercise

__all__ = [
    "INSTRUCTIONS",
    "MATRIX_INSTRUCTIONS",
    "RANKED_INSTRUCTIONS",
    "ATTRIBUTE_COMBOS",
    "PromptSpec",
    "Prompt",
    "PromptError",
    "render_prompt",
    "enumerate_matrix",
    "temperature_grid",
    "default_spec",
]


class PromptError(Exception):
    pass


# Instruction phrasings, keyed by their variant id.
INSTRUCTIONS: dict[str, str] = {
    "i": "What is the next step?",
    "ii": "Give a hint for the next step.",
    "iii": "Explain the next step for a student",
    "iv": "Give this student a short hint for the next step.",
    "v": (
        "Give this student a hint for the next step. "
        "The hint should be one or two sentences."
    ),
}

# The three variants swept against all attribute combinations, and the three
# that went through the final ranking comparison.
MATRIX_INSTRUCTIONS = ("i", "ii", "iii")
RANKED_INSTRUCTIONS = ("ii", "iv", "v")

# (include_description, include_model_solution): none, one of each, both.
ATTRIBUTE_COMBOS: tuple[tuple[bool, bool], ...] = (
    (False, False),
    (True, False),
    (False, True),
    (True, True),
)


@dataclass(frozen=True)
class PromptSpec:
    instruction: str
    include_description: bool = True
    include_model_solution: bool = False
    temperature: float = 0.5

    def __post_init__(self) -> None:
        if self.instruction not in INSTRUCTIONS:
            raise PromptError(f"unknown instruction variant {self.instruction!r}")
        if not 0.0 <= self.temperature <= 1.0:
            raise PromptError(f"temperature {self.temperature} outside [0, 1]")

    def to_json(self) -> dict:
        return {
            "instruction": self.instruction,
            "include_description": self.include_description,
            "include_model_solution": self.include_model_solution,
            "temperature": self.temperature,
        }

    @classmethod
    def from_json(cls, data: dict) -> "PromptSpec":
        return cls(
            instruction=data["instruction"],
            include_description=bool(data["include_description"]),
            include_model_solution=bool(data["include_model_solution"]),
            temperature=float(data["temperature"]),
        )

    def label(self) -> str:
        """Compact identifier, e.g. "v/desc/t0.5", for report tables."""
        attrs = []
        if self.include_description:
            attrs.append("desc")
        if self.include_model_solution:
            attrs.append("sol")
        return "/".join([self.instruction, "+".join(attrs) or "bare", f"t{self.temperature}"])


@dataclass(frozen=True)
class Prompt:
    text: str
    spec: PromptSpec
    exercise_id: str
    code_hash: str


def _fence(code: str) -> str:
    if not code:
        return "```\n```"
    if not code.endswith("\n"):
        code += "\n"
    return "```\n" + code + "```"


def render_prompt(spec: PromptSpec, exercise: Exercise, student_code: str) -> Prompt:
    """Render the prompt text for one student program.

    Sections appear in fixed order, separated by blank lines, with code in
    triple-backtick fences and the instruction as the final line. Rendering
    is deterministic; downstream caching keys on the text.
    """
    if spec.include_model_solution and not exercise.model_solution:
        raise PromptError(
            f"exercise {exercise.id!r} has no model solution but the spec requires one"
        )
    sections: list[str] = []
    if spec.include_description:
        sections.append("Problem description:\n" + exercise.description.strip())
    if spec.include_model_solution:
        assert exercise.model_solution is not None
        sections.append("Model solution:\n" + _fence(exercise.model_solution))
    sections.append("Student code:\n" + _fence(student_code))
    sections.append(INSTRUCTIONS[spec.instruction])
    return Prompt(
        text="\n\n".join(sections),
        spec=spec,
        exercise_id=exercise.id,
        code_hash=hashlib.sha256(
            student_code.encode("utf-8", errors="surrogatepass")
        ).hexdigest(),
    )


def enumerate_matrix(
    instructions: Sequence[str],
    attribute_combos: Iterable[tuple[bool, bool]] = ATTRIBUTE_COMBOS,
    temperatures: Sequence[float] = (0.1,),
) -> list[PromptSpec]:
    """Cartesian product of the design-space axes, instruction-major order."""
    combos = list(attribute_combos)
    if not instructions or not combos or not temperatures:
        raise PromptError("enumerate_matrix requires non-empty axes")
    return [
        PromptSpec(
            instruction=instruction,
            include_description=desc,
            include_model_solution=sol,
            temperature=temp,
        )
        for instruction, (desc, sol), temp in itertools.product(
            instructions, combos, temperatures
        )
    ]


def temperature_grid() -> tuple[float, ...]:
    """Sampling temperatures swept when tuning: 0.1 through 0.9 in 0.2 steps."""
    return tuple(round(0.1 + 0.2 * k, 1) for k in range(5))


def default_spec() -> PromptSpec:
    """The winning configuration: instruction v, description only, temperature 0.5."""
    return PromptSpec(
        instruction="v",
        include_description=True,
        include_model_solution=False,
        temperature=0.5,
    )
