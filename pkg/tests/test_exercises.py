"""Tests for the exercise catalog and the solution checker."""

from __future__ import annotations

import json
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steptutor.exercises import (
    CatalogError,
    Exercise,
    IoTest,
    RunnerConfig,
    RunnerConfigError,
    bracketize,
    builtin_exercises,
    check_solution,
    clump_oracle,
    load_catalog,
    pie_cost,
)

FAST_RUNNER = RunnerConfig(timeout_seconds=10.0)


@pytest.fixture(scope="module")
def catalog():
    return {e.id: e for e in builtin_exercises()}


# ---------------------------------------------------------------------------
# Reference computations
# ---------------------------------------------------------------------------

class TestClumpOracle:
    def test_worked_example(self):
        assert clump_oracle([2, 2, 3, 5, 6, 6, 2]) == 2

    def test_empty(self):
        assert clump_oracle([]) == 0

    def test_triple_is_one_clump(self):
        # Oracle: scan for maximal equal runs; one run of length 3.
        assert clump_oracle([1, 1, 1]) == 1

    @given(st.lists(st.integers(min_value=0, max_value=3), max_size=30))
    @settings(max_examples=200)
    def test_bounded_by_half_length(self, values):
        assert clump_oracle(values) <= len(values) // 2


class TestBracketize:
    def test_odd_example(self):
        assert bracketize("example") == "e(x(a(m)p)l)e"

    def test_even_card(self):
        assert bracketize("card") == "c(ar)d"

    def test_tiny_strings(self):
        assert bracketize("") == ""
        assert bracketize("a") == "a"
        assert bracketize("ab") == "(ab)"
        assert bracketize("abc") == "a(b)c"


class TestPieCost:
    def test_divmod_oracle(self):
        # (100*3 + 50) * 2 = 700 cents -> 7 dollars, 0 cents.
        assert pie_cost(3, 50, 2) == (7, 0)

    def test_carry(self):
        assert pie_cost(0, 99, 3) == (2, 97)


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

class TestCatalog:
    def test_builtins_present(self):
        exercises = load_catalog()
        assert [e.id for e in exercises] == ["pies", "brackets", "clumps"]

    def test_builtins_have_input_output_paragraphs(self):
        for exercise in builtin_exercises():
            assert "Input:" in exercise.description
            assert "Output:" in exercise.description
            assert exercise.tests

    def test_empty_directory_without_builtins(self, tmp_path):
        assert load_catalog(tmp_path, include_builtins=False) == []

    def test_file_missing_output_paragraph_rejected(self, tmp_path):
        bad = {
            "id": "bad",
            "title": "Bad",
            "description": "Do the thing.\n\nInput: a number.",
            "tests": [{"name": "t", "stdin": "1\n", "expected_stdout": "1"}],
        }
        (tmp_path / "bad.json").write_text(json.dumps(bad))
        with pytest.raises(CatalogError, match="Output"):
            load_catalog(tmp_path, include_builtins=False)

    def test_file_missing_field_names_file_and_field(self, tmp_path):
        (tmp_path / "broken.json").write_text(json.dumps({"id": "broken"}))
        with pytest.raises(CatalogError, match="broken.json.*'title'"):
            load_catalog(tmp_path, include_builtins=False)

    def test_custom_exercise_loads(self, tmp_path):
        good = {
            "id": "echo",
            "title": "Echo",
            "description": "Echo the line.\n\nInput: one line.\n\nOutput: the same line.",
            "starter_code": "",
            "tests": [{"name": "t", "stdin": "hi\n", "expected_stdout": "hi"}],
        }
        (tmp_path / "echo.json").write_text(json.dumps(good))
        exercises = load_catalog(tmp_path, include_builtins=False)
        assert [e.id for e in exercises] == ["echo"]

    def test_empty_tests_rejected(self):
        exercise = Exercise(
            id="x",
            title="X",
            description="Input: a.\n\nOutput: b.",
            tests=[],
        )
        with pytest.raises(CatalogError, match="tests"):
            exercise.validate()


# ---------------------------------------------------------------------------
# Solution checking
# ---------------------------------------------------------------------------

class TestCheckSolution:
    def test_clumps_model_solution_passes(self, catalog):
        clumps = catalog["clumps"]
        result = check_solution(clumps, clumps.model_solution, FAST_RUNNER)
        assert result.passed, [t.__dict__ for t in result.per_test if not t.passed]

    def test_clumps_worked_example_test(self, catalog):
        clumps = catalog["clumps"]
        test = next(t for t in clumps.tests if t.name == "two_clumps")
        assert test.stdin == "7\n2\n2\n3\n5\n6\n6\n2\n"
        assert test.expected_stdout == "2"

    def test_brackets_model_solution_passes(self, catalog):
        brackets = catalog["brackets"]
        result = check_solution(brackets, brackets.model_solution, FAST_RUNNER)
        assert result.passed, [t.__dict__ for t in result.per_test if not t.passed]

    def test_pies_model_solution_passes(self, catalog):
        pies = catalog["pies"]
        result = check_solution(pies, pies.model_solution, FAST_RUNNER)
        assert result.passed

    def test_separator_insensitive_comparison(self, catalog):
        pies = catalog["pies"]
        newline_version = (
            "a = int(input())\nb = int(input())\nn = int(input())\n"
            "total = (a * 100 + b) * n\nprint(total // 100)\nprint(total % 100)\n"
        )
        result = check_solution(pies, newline_version, FAST_RUNNER)
        assert result.passed

    def test_wrong_output_fails(self, catalog):
        result = check_solution(catalog["clumps"], "print(99)\n", FAST_RUNNER)
        assert not result.passed
        assert all(not t.passed for t in result.per_test)

    def test_crash_reports_stderr(self, catalog):
        result = check_solution(catalog["clumps"], "raise ValueError('boom')\n", FAST_RUNNER)
        assert not result.passed
        assert "boom" in result.per_test[0].stderr

    def test_infinite_loop_times_out_within_double_limit(self, catalog):
        runner = RunnerConfig(timeout_seconds=1.0)
        started = time.monotonic()
        result = check_solution(
            catalog["pies"], "while True:\n    pass\n", runner
        )
        elapsed = time.monotonic() - started
        assert not result.passed
        assert all(t.timed_out for t in result.per_test)
        assert elapsed < 2.0 * runner.timeout_seconds * len(result.per_test)

    def test_missing_runner_executable_is_config_error(self, catalog):
        runner = RunnerConfig(command_template="/no/such/python {file}")
        with pytest.raises(RunnerConfigError):
            check_solution(catalog["pies"], "print(1)\n", runner)

    def test_output_cap_truncates(self, catalog):
        runner = RunnerConfig(max_output_bytes=10, timeout_seconds=10.0)
        result = check_solution(catalog["pies"], "print('z' * 1000)\n", runner)
        assert len(result.per_test[0].actual_stdout) <= 10
        assert not result.passed

    def test_empty_output_never_passes_nonempty_expectation(self, catalog):
        result = check_solution(catalog["clumps"], "pass\n", FAST_RUNNER)
        assert all(not t.passed for t in result.per_test)

    def test_deterministic_for_deterministic_programs(self, catalog):
        pies = catalog["pies"]
        first = check_solution(pies, pies.model_solution, FAST_RUNNER)
        second = check_solution(pies, pies.model_solution, FAST_RUNNER)
        assert [(t.name, t.passed, t.actual_stdout) for t in first.per_test] == [
            (t.name, t.passed, t.actual_stdout) for t in second.per_test
        ]


class TestRunnerConfig:
    def test_env_overrides(self):
        config = RunnerConfig.load(
            env={"STAP_RUNNER_TIMEOUT": "2.5", "STAP_RUNNER_MAX_OUTPUT": "123"}
        )
        assert config.timeout_seconds == 2.5
        assert config.max_output_bytes == 123

    def test_config_file_then_env(self, tmp_path):
        path = tmp_path / "runner.json"
        path.write_text(json.dumps({"timeout_seconds": 9}))
        config = RunnerConfig.load(path, env={"STAP_RUNNER_TIMEOUT": "4"})
        assert config.timeout_seconds == 4.0

    def test_unknown_keys_rejected(self, tmp_path):
        path = tmp_path / "runner.json"
        path.write_text(json.dumps({"bogus": 1}))
        with pytest.raises(RunnerConfigError, match="bogus"):
            RunnerConfig.load(path, env={})
