"""Exercise catalog and stdin/stdout solution checking.

Exercises carry a problem description with explicit Input and Output
paragraphs, optional starter code, and a set of stdin -> stdout test
cases. Candidate solutions run in a subprocess per test; outputs compare
as whitespace-separated token sequences, so "7 0" and "7\\n0" both pass.
"""

from __future__ import annotations

import json
import os
import shlex
import subprocess
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

__all__ = [
    "IoTest",
    "Exercise",
    "TestOutcome",
    "CheckResult",
    "RunnerConfig",
    "CatalogError",
    "RunnerConfigError",
    "clump_oracle",
    "bracketize",
    "pie_cost",
    "builtin_exercises",
    "load_catalog",
    "check_solution",
]


class CatalogError(Exception):
    """An exercise definition is malformed."""


class RunnerConfigError(Exception):
    """The solution runner is misconfigured (e.g. missing executable)."""


@dataclass(frozen=True)
class IoTest:
    name: str
    stdin: str
    expected_stdout: str


@dataclass
class Exercise:
    id: str
    title: str
    description: str
    starter_code: str = ""
    tests: list[IoTest] = field(default_factory=list)
    model_solution: str | None = None

    def validate(self) -> None:
        if not self.id:
            raise CatalogError("exercise id must be non-empty")
        if not self.description.strip():
            raise CatalogError(f"{self.id}: description must be non-empty")
        for paragraph in ("Input:", "Output:"):
            if paragraph not in self.description:
                raise CatalogError(
                    f"{self.id}: description missing {paragraph[:-1]} paragraph"
                )
        if not self.tests:
            raise CatalogError(f"{self.id}: tests must be non-empty")


@dataclass
class TestOutcome:
    name: str
    passed: bool
    actual_stdout: str
    stderr: str
    timed_out: bool = False


@dataclass
class CheckResult:
    passed: bool
    per_test: list[TestOutcome]


@dataclass(frozen=True)
class RunnerConfig:
    """How candidate programs are executed.

    command_template contains a `{file}` placeholder for the program path.
    Values load from an optional JSON config file and can be overridden via
    STAP_RUNNER_CMD, STAP_RUNNER_TIMEOUT and STAP_RUNNER_MAX_OUTPUT.
    """

    command_template: str = f"{sys.executable} {{file}}"
    timeout_seconds: float = 5.0
    max_output_bytes: int = 65536

    @classmethod
    def load(cls, config_file: str | Path | None = None, env: dict | None = None) -> "RunnerConfig":
        env = os.environ if env is None else env
        values: dict = {}
        if config_file is not None:
            data = json.loads(Path(config_file).read_text(encoding="utf-8"))
            if not isinstance(data, dict):
                raise RunnerConfigError(f"{config_file}: expected a JSON object")
            values.update(data)
        if "STAP_RUNNER_CMD" in env:
            values["command_template"] = env["STAP_RUNNER_CMD"]
        if "STAP_RUNNER_TIMEOUT" in env:
            values["timeout_seconds"] = float(env["STAP_RUNNER_TIMEOUT"])
        if "STAP_RUNNER_MAX_OUTPUT" in env:
            values["max_output_bytes"] = int(env["STAP_RUNNER_MAX_OUTPUT"])
        known = {"command_template", "timeout_seconds", "max_output_bytes"}
        unknown = set(values) - known
        if unknown:
            raise RunnerConfigError(f"unknown runner config keys: {sorted(unknown)}")
        return cls(**values)


# --------------------------------------------------------------------------
# Reference computations used to generate built-in test cases
# --------------------------------------------------------------------------

def clump_oracle(values: Sequence[int]) -> int:
    """Count maximal runs of two or more equal adjacent values."""
    count = 0
    i = 0
    n = len(values)
    while i < n - 1:
        if values[i] == values[i + 1]:
            count += 1
            while i < n - 1 and values[i] == values[i + 1]:
                i += 1
        else:
            i += 1
    return count


def bracketize(text: str) -> str:
    """Reference transform for the brackets exercise.

    Odd-length strings nest bracket pairs from the outside in; even-length
    strings get a single pair around the middle two characters.
    """
    n = len(text)
    if n <= 1:
        return text
    if n % 2 == 0:
        mid = n // 2
        return text[: mid - 1] + "(" + text[mid - 1 : mid + 1] + ")" + text[mid + 1 :]
    return text[0] + "(" + bracketize(text[1:-1]) + ")" + text[-1]


def pie_cost(dollars: int, cents: int, count: int) -> tuple[int, int]:
    """Total price of `count` pies at (dollars, cents) each, as (dollars, cents)."""
    total_cents = (dollars * 100 + cents) * count
    return divmod(total_cents, 100)


# --------------------------------------------------------------------------
# Built-in exercises
# --------------------------------------------------------------------------

_PIES_DESCRIPTION = """\
A single pie costs A dollars and B cents in the cafe. Calculate how many \
dollars and cents one needs to pay for N pies.

Input: The program receives three numbers:
A - how many dollars a pie costs;
B - how many cents a pie costs;
N - how many pies do you need to buy

Output: Print out two numbers: the cost of N pies in dollars and cents.
"""

_BRACKETS_DESCRIPTION = """\
Place opening and closing brackets into the input string like this: for odd \
length: example → e(x(a(m)p)l)e; for even length: card → c(ar)d, but not \
c(a()r)d.

Input: The program receives a string of English letters (lowercase and \
uppercase).

Output: Print out the string with the brackets added.
"""

_CLUMPS_DESCRIPTION = """\
Say that a "clump" in an array is a series of 2 or more adjacent elements of \
the same value. Return the number of clumps in the given array. For example, \
an array with the numbers [2,2,3,5,6,6,2] has 2 clumps.

Input: The program receives a number n, followed by n lines with one integer \
per line.

Output: Print out the number of clumps
"""

_PIES_SOLUTION = """\
a = int(input())
b = int(input())
n = int(input())
total = (a * 100 + b) * n
print(total // 100, total % 100)
"""

_BRACKETS_SOLUTION = """\
s = input()
n = len(s)
if n <= 1:
    print(s)
elif n % 2 == 0:
    mid = n // 2
    print(s[:mid - 1] + "(" + s[mid - 1:mid + 1] + ")" + s[mid + 1:])
else:
    parts = []
    for i in range(n // 2):
        parts.append(s[i] + "(")
    parts.append(s[n // 2])
    for i in range(n // 2 + 1, n):
        parts.append(")" + s[i])
    print("".join(parts))
"""

_CLUMPS_SOLUTION = """\
n = int(input())
values = [int(input()) for _ in range(n)]
count = 0
i = 0
while i < len(values) - 1:
    if values[i] == values[i + 1]:
        count += 1
        while i < len(values) - 1 and values[i] == values[i + 1]:
            i += 1
    else:
        i += 1
print(count)
"""

_STARTER = "# Write your solution here\n"


def _pies_test(name: str, dollars: int, cents: int, count: int) -> IoTest:
    total_dollars, total_cents = pie_cost(dollars, cents, count)
    return IoTest(
        name=name,
        stdin=f"{dollars}\n{cents}\n{count}\n",
        expected_stdout=f"{total_dollars} {total_cents}",
    )


def _brackets_test(name: str, text: str) -> IoTest:
    return IoTest(name=name, stdin=text + "\n", expected_stdout=bracketize(text))


def _clumps_test(name: str, values: list[int]) -> IoTest:
    stdin = "\n".join([str(len(values))] + [str(v) for v in values]) + "\n"
    return IoTest(name=name, stdin=stdin, expected_stdout=str(clump_oracle(values)))


def builtin_exercises() -> list[Exercise]:
    pies = Exercise(
        id="pies",
        title="Pies",
        description=_PIES_DESCRIPTION,
        starter_code=_STARTER,
        model_solution=_PIES_SOLUTION,
        tests=[
            _pies_test("three_pies_at_3_50", 3, 50, 2),
            _pies_test("single_pie", 1, 0, 1),
            _pies_test("cents_carry_over", 0, 99, 3),
            _pies_test("round_total", 2, 75, 4),
            _pies_test("zero_pies", 5, 99, 0),
        ],
    )
    brackets = Exercise(
        id="brackets",
        title="Brackets",
        description=_BRACKETS_DESCRIPTION,
        starter_code=_STARTER,
        model_solution=_BRACKETS_SOLUTION,
        tests=[
            _brackets_test("odd_example", "example"),
            _brackets_test("even_card", "card"),
            _brackets_test("single_letter", "a"),
            _brackets_test("two_letters", "ab"),
            _brackets_test("three_letters", "abc"),
            _brackets_test("mixed_case_even", "PyThOn"),
            _brackets_test("longer_odd", "abcdefghi"),
        ],
    )
    clumps = Exercise(
        id="clumps",
        title="Clumps",
        description=_CLUMPS_DESCRIPTION,
        starter_code=_STARTER,
        model_solution=_CLUMPS_SOLUTION,
        tests=[
            _clumps_test("two_clumps", [2, 2, 3, 5, 6, 6, 2]),
            _clumps_test("empty_array", []),
            _clumps_test("no_clumps", [1, 2, 3]),
            _clumps_test("one_long_clump", [4, 4, 4, 4]),
            _clumps_test("triple_run", [1, 1, 1]),
            _clumps_test("three_pairs", [1, 1, 2, 2, 3, 3]),
        ],
    )
    exercises = [pies, brackets, clumps]
    for exercise in exercises:
        exercise.validate()
    return exercises


# --------------------------------------------------------------------------
# Catalog loading
# --------------------------------------------------------------------------

def _exercise_from_dict(data: dict, origin: str) -> Exercise:
    for key in ("id", "title", "description", "tests"):
        if key not in data:
            raise CatalogError(f"{origin}: missing field {key!r}")
    tests = []
    for i, entry in enumerate(data["tests"]):
        for key in ("name", "stdin", "expected_stdout"):
            if key not in entry:
                raise CatalogError(f"{origin}: tests[{i}] missing field {key!r}")
        tests.append(
            IoTest(
                name=str(entry["name"]),
                stdin=str(entry["stdin"]),
                expected_stdout=str(entry["expected_stdout"]),
            )
        )
    exercise = Exercise(
        id=str(data["id"]),
        title=str(data["title"]),
        description=str(data["description"]),
        starter_code=str(data.get("starter_code", "")),
        tests=tests,
        model_solution=data.get("model_solution"),
    )
    try:
        exercise.validate()
    except CatalogError as exc:
        raise CatalogError(f"{origin}: {exc}") from exc
    return exercise


def load_catalog(
    directory: str | Path | None = None,
    include_builtins: bool = True,
) -> list[Exercise]:
    """Load exercises: the built-ins first, then one JSON file per exercise."""
    exercises = builtin_exercises() if include_builtins else []
    known = {e.id for e in exercises}
    if directory is not None:
        directory = Path(directory)
        for path in sorted(directory.glob("*.json")):
            try:
                data = json.loads(path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise CatalogError(f"{path}: invalid JSON: {exc}") from exc
            exercise = _exercise_from_dict(data, str(path))
            if exercise.id in known:
                raise CatalogError(f"{path}: duplicate exercise id {exercise.id!r}")
            known.add(exercise.id)
            exercises.append(exercise)
    return exercises


# --------------------------------------------------------------------------
# Solution checking
# --------------------------------------------------------------------------

def _run_one(
    argv: list[str],
    test: IoTest,
    runner: RunnerConfig,
) -> TestOutcome:
    try:
        proc = subprocess.Popen(
            argv,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            text=True,
        )
    except FileNotFoundError as exc:
        raise RunnerConfigError(f"runner executable not found: {argv[0]}") from exc

    try:
        stdout, stderr = proc.communicate(input=test.stdin, timeout=runner.timeout_seconds)
    except subprocess.TimeoutExpired:
        proc.kill()
        stdout, stderr = proc.communicate()
        return TestOutcome(
            name=test.name,
            passed=False,
            actual_stdout=(stdout or "")[: runner.max_output_bytes],
            stderr=(stderr or "")[: runner.max_output_bytes],
            timed_out=True,
        )

    stdout = (stdout or "")[: runner.max_output_bytes]
    stderr = (stderr or "")[: runner.max_output_bytes]
    passed = stdout.split() == test.expected_stdout.split()
    return TestOutcome(
        name=test.name,
        passed=passed,
        actual_stdout=stdout,
        stderr=stderr,
    )


def check_solution(
    exercise: Exercise,
    source: str,
    runner: RunnerConfig | None = None,
) -> CheckResult:
    """Run the candidate program once per test and compare token sequences."""
    runner = runner or RunnerConfig()
    outcomes: list[TestOutcome] = []
    with tempfile.TemporaryDirectory(prefix="steptutor-run-") as tmp:
        program = Path(tmp) / "main.py"
        program.write_text(source, encoding="utf-8")
        argv_template = shlex.split(runner.command_template)
        argv = [part.format(file=str(program)) for part in argv_template]
        for test in exercise.tests:
            outcomes.append(_run_one(argv, test, runner))
    return CheckResult(passed=all(o.passed for o in outcomes), per_test=outcomes)
