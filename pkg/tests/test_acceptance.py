"""Acceptance suite.

One test per acceptance criterion, each printing a [PASS]/[FAIL] line.
Everything runs offline: the mock hint backend, in-process HTTP client,
no browser. Tolerances are pinned in the assertions.
"""

from __future__ import annotations

import json
import random
import time
from contextlib import contextmanager

import pytest
from fastapi.testclient import TestClient

from editsim import simulate_log
from steptutor.events import EventStore
from steptutor.exercises import (
    Exercise,
    IoTest,
    RunnerConfig,
    builtin_exercises,
    check_solution,
)
from steptutor.harness import (
    AnnotationError,
    AnnotationStore,
    ExperimentManifest,
    RankEntry,
    RankingSheet,
    aggregate_ranking,
    cohens_kappa,
    parse_annotation,
    rating_report,
    run_experiment,
)
from steptutor.harness.rubric import ANNOTATION_CRITERIA
from steptutor.llm import LlmClient, make_mock
from steptutor.prompts import (
    ATTRIBUTE_COMBOS,
    MATRIX_INSTRUCTIONS,
    default_spec,
    enumerate_matrix,
    temperature_grid,
)
from steptutor.service import ServiceState, create_app
from steptutor.snapshots import (
    Snapshot,
    StepSequence,
    build_step_sequence,
    is_syntactically_valid,
    normalize_source,
    write_step_sequence,
)


@contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}")
        raise
    print(f"[PASS] {name}")


# ---------------------------------------------------------------------------
# 1. Pipeline invariants on 50 randomized synthetic logs, under 10 s
# ---------------------------------------------------------------------------

def test_pipeline_invariants_on_synthetic_logs():
    with criterion("pipeline invariants over 50 synthetic keystroke logs (< 10 s)"):
        logs = [simulate_log(seed) for seed in range(50)]
        started = time.monotonic()
        for seed, raw in enumerate(logs):
            sequence = build_step_sequence(raw, f"student-{seed}", "clumps")

            # Validity: every retained step parses.
            assert all(is_syntactically_valid(s.source) for s in sequence.steps)

            # Subsequence: retained indices appear in the raw log, in order.
            raw_iter = iter(s.seq_index for s in raw)
            assert all(idx in raw_iter for idx in (s.seq_index for s in sequence.steps))

            # Provenance completeness: removed + retained = raw.
            assert len(sequence.steps) + len(sequence.provenance) == len(raw)
            removed = {t.seq_index for t in sequence.provenance}
            assert removed.isdisjoint({s.seq_index for s in sequence.steps})

            # Idempotence: rebuilding from the output changes nothing.
            again = build_step_sequence(sequence.steps, f"student-{seed}", "clumps")
            assert [s.source for s in again.steps] == [s.source for s in sequence.steps]
            assert again.provenance == []
        elapsed = time.monotonic() - started
        assert elapsed < 10.0, f"pipeline took {elapsed:.2f}s for 50 logs"


# ---------------------------------------------------------------------------
# 2. Syntax filter corpus: 20 valid + 20 invalid, zero misclassifications
# ---------------------------------------------------------------------------

VALID_FRAGMENTS = [
    "x = 1",
    "x = 1\ny = 2",
    "print('hello')",
    "for i in range(3):\n    print(i)",
    "while True:\n    break",
    "def f(a, b):\n    return a + b",
    "if x:\n    pass\nelse:\n    pass",
    "values = [int(input()) for _ in range(5)]",
    "s = 'it''s'",
    "total = (1 + 2) * 3",
    "a, b = 1, 2",
    "try:\n    pass\nexcept ValueError:\n    pass",
    "import math\nprint(math.pi)",
    "d = {'k': 1}",
    "x = [1, 2, 3][0]",
    "class C:\n    pass",
    "lambda x: x + 1",
    "# just a comment",
    "",
    "x: int = 4",
]

INVALID_FRAGMENTS = [
    "x = (",
    "x = )",
    "def f(:",
    "for i in range(3)\n    print(i)",
    "while True\n    break",
    "if x:\npass",
    "print('unterminated)",
    'print("unterminated)',
    "x == = 3",
    "1 = x",
    "def = 4",
    "return 1",
    "x = [1, 2",
    "d = {'k': }",
    "class :",
    "x = 1 +",
    "lambda : :",
    "import",
    "x = 'a' 'b' c'",
    "f(] = 2",
]


def test_syntax_filter_corpus():
    with criterion("syntax filter classifies 20 valid + 20 invalid fragments with 0 errors"):
        assert len(VALID_FRAGMENTS) == 20 and len(INVALID_FRAGMENTS) == 20
        errors = []
        for fragment in VALID_FRAGMENTS:
            if not is_syntactically_valid(fragment):
                errors.append(("expected valid", fragment))
        for fragment in INVALID_FRAGMENTS:
            if is_syntactically_valid(fragment):
                errors.append(("expected invalid", fragment))
        assert errors == []


# ---------------------------------------------------------------------------
# 3. Prompt matrix, temperature grid, default configuration
# ---------------------------------------------------------------------------

def test_prompt_matrix_and_defaults():
    with criterion("prompt matrix 3x4 = 12, temperature grid, default spec"):
        specs = enumerate_matrix(MATRIX_INSTRUCTIONS, ATTRIBUTE_COMBOS)
        assert len(specs) == 12
        assert len(set(specs)) == 12

        assert temperature_grid() == (0.1, 0.3, 0.5, 0.7, 0.9)

        spec = default_spec()
        assert spec.instruction == "v"
        assert spec.include_description is True
        assert spec.include_model_solution is False
        assert spec.temperature == 0.5


# ---------------------------------------------------------------------------
# 4. Ranking aggregation reproduces the published totals exactly
# ---------------------------------------------------------------------------

def _sheet(exercise_id: str, totals: dict[str, int], entries: int = 10) -> RankingSheet:
    per_prompt = {}
    for prompt_id, total in totals.items():
        ranks = [2] * entries
        delta = total - 2 * entries
        i = 0
        while delta != 0:
            step = 1 if delta > 0 else -1
            ranks[i] += step
            delta -= step
            i += 1
        assert sum(ranks) == total and all(r in (1, 2, 3) for r in ranks)
        per_prompt[prompt_id] = ranks
    return RankingSheet(
        exercise_id=exercise_id,
        entries=[
            RankEntry(f"{exercise_id}-{i}", {p: per_prompt[p][i] for p in totals})
            for i in range(entries)
        ],
    )


def test_ranking_aggregation_reproduces_totals():
    with criterion("ranking totals {ii:45, iv:46, v:33}, winner v, tolerance 0"):
        sheets = [
            _sheet("brackets", {"ii": 20, "iv": 27, "v": 16}),
            _sheet("pies", {"ii": 25, "iv": 19, "v": 17}),
        ]
        result = aggregate_ranking(sheets)
        assert result["ii"]["per_exercise"] == {"brackets": 20, "pies": 25}
        assert result["iv"]["per_exercise"] == {"brackets": 27, "pies": 19}
        assert result["v"]["per_exercise"] == {"brackets": 16, "pies": 17}
        assert result["ii"]["total"] == 45
        assert result["iv"]["total"] == 46
        assert result["v"]["total"] == 33
        assert result["v"]["winner"] is True
        assert sum(1 for entry in result.values() if entry["winner"]) == 1


# ---------------------------------------------------------------------------
# 5. Cohen's kappa: exact values, symmetry, permutation invariance, flags
# ---------------------------------------------------------------------------

def test_cohens_kappa_properties():
    with criterion("kappa exact values, 1000 random symmetry/permutation checks, flags"):
        assert cohens_kappa(["x", "y", "z", "x"], ["x", "y", "z", "x"]).kappa == 1.0

        zero_case = cohens_kappa(["x", "x", "y", "y"], ["x", "y", "x", "y"])
        assert abs(zero_case.kappa - 0.0) <= 1e-12

        rng = random.Random(20240101)
        for _ in range(1000):
            n = rng.randint(1, 30)
            categories = ["a", "b", "c", "d"][: rng.randint(1, 4)]
            a = [rng.choice(categories) for _ in range(n)]
            b = [rng.choice(categories) for _ in range(n)]
            forward = cohens_kappa(a, b)
            backward = cohens_kappa(b, a)
            assert forward.kappa == backward.kappa
            assert forward.undefined == backward.undefined
            order = list(range(n))
            rng.shuffle(order)
            shuffled = cohens_kappa([a[i] for i in order], [b[i] for i in order])
            if forward.kappa is None:
                assert shuffled.kappa is None
            else:
                assert abs(shuffled.kappa - forward.kappa) <= 1e-12

        degenerate = cohens_kappa(["x", "x", "x"], ["x", "x", "x"])
        assert degenerate.kappa == 1.0 and degenerate.degenerate


# ---------------------------------------------------------------------------
# 6. Solution checker on the three exercises plus timeout behaviour
# ---------------------------------------------------------------------------

def test_solution_checker_acceptance():
    with criterion("solution checker: clumps/brackets/pies pass, timeout within 2x limit"):
        runner = RunnerConfig(timeout_seconds=10.0)
        catalog = {e.id: e for e in builtin_exercises()}

        clumps_case = Exercise(
            id="clumps_case",
            title="Clumps worked example",
            description=catalog["clumps"].description,
            tests=[IoTest("worked", "7\n2\n2\n3\n5\n6\n6\n2\n", "2")],
        )
        assert check_solution(clumps_case, catalog["clumps"].model_solution, runner).passed

        brackets_case = Exercise(
            id="brackets_case",
            title="Brackets worked examples",
            description=catalog["brackets"].description,
            tests=[
                IoTest("odd", "example\n", "e(x(a(m)p)l)e"),
                IoTest("even", "card\n", "c(ar)d"),
            ],
        )
        assert check_solution(brackets_case, catalog["brackets"].model_solution, runner).passed

        pies_case = Exercise(
            id="pies_case",
            title="Pies derived example",
            description=catalog["pies"].description,
            tests=[IoTest("derived", "3\n50\n2\n", "7 0")],
        )
        assert check_solution(pies_case, catalog["pies"].model_solution, runner).passed

        timeout_runner = RunnerConfig(timeout_seconds=1.0)
        started = time.monotonic()
        result = check_solution(pies_case, "while True:\n    pass\n", timeout_runner)
        elapsed = time.monotonic() - started
        assert not result.passed
        assert result.per_test[0].timed_out
        assert elapsed < 2.0 * timeout_runner.timeout_seconds


# ---------------------------------------------------------------------------
# 7. Service round trip: 11 + 20 + 17 rated hints, replayable export
# ---------------------------------------------------------------------------

def test_service_round_trip(tmp_path):
    with criterion("service round trip: 48 rated hints, byte-identical replayed export"):
        data_dir = tmp_path / "data"
        store = EventStore(data_dir)
        app = create_app(
            builtin_exercises(),
            store,
            LlmClient(make_mock(seed=0)),
            model_id="mock-0",
            runner=RunnerConfig(timeout_seconds=10.0),
        )
        hint_counts = (11, 20, 17)
        with TestClient(app) as http:
            for student, hints in enumerate(hint_counts):
                session = http.post(
                    "/api/sessions",
                    json={"exercise_id": "clumps", "participant_alias": str(100 + student)},
                ).json()
                for k in range(hints):
                    hint = http.post(
                        f"/api/sessions/{session['session_id']}/hints",
                        json={"source": f"count = {k}\n"},
                    ).json()
                    response = http.post(
                        f"/api/hints/{hint['hint_id']}/rating",
                        json={
                            "clear": 1 + (k % 5),
                            "fits": 1 + ((k + 1) % 5),
                            "helpful": 1 + ((k + 2) % 5),
                        },
                    )
                    assert response.status_code == 200
            export = http.get("/api/export?session=all").text

        report = rating_report(export.splitlines())
        assert report["n"] == sum(hint_counts) == 48
        for statement in ("clear", "fits", "helpful"):
            assert sum(report["histograms"][statement].values()) == 48

        # Replay from disk: identical state, byte-identical re-export.
        replayed = EventStore(data_dir)
        replay_export = "\n".join(replayed.export_lines()) + "\n"
        assert replay_export == export

        state = ServiceState.from_store(replayed)
        assert len(state.sessions) == 3
        assert len(state.hints) == 48
        assert len(state.ratings) == 48


# ---------------------------------------------------------------------------
# 8. Experiment generation: 10 x 12 x 1 = 120 deterministic records
# ---------------------------------------------------------------------------

def _ten_step_sequence(tmp_path) -> str:
    steps = []
    lines: list[str] = []
    for i in range(10):
        lines.append(f"x{i} = {i}")
        steps.append(Snapshot(seq_index=i, timestamp=1000 + i, source="\n".join(lines) + "\n"))
    sequence = StepSequence(student_id="s1", exercise_id="clumps", steps=steps)
    path = tmp_path / "ten_steps.jsonl"
    write_step_sequence(sequence, path)
    return str(path)


def test_experiment_generation_is_deterministic(tmp_path):
    with criterion("experiment run: 10 steps x 12 specs x 1 sample = 120 identical records"):
        path = _ten_step_sequence(tmp_path)
        specs = enumerate_matrix(MATRIX_INSTRUCTIONS, ATTRIBUTE_COMBOS)
        assert len(specs) == 12

        outputs = []
        for run in range(2):
            out_path = tmp_path / f"hints_run{run}.jsonl"
            manifest = ExperimentManifest(
                step_sequence_paths=[path],
                prompt_specs=specs,
                samples_per_state=1,
                output_path=str(out_path),
            )
            summary = run_experiment(
                manifest, LlmClient(make_mock(seed=0)), builtin_exercises()
            )
            assert summary.records == 120
            assert summary.failures == []
            content = out_path.read_bytes()
            assert len(content.splitlines()) == 120
            outputs.append(content)
        assert outputs[0] == outputs[1]


# ---------------------------------------------------------------------------
# 9. Rubric validation: acceptance and per-criterion rejection
# ---------------------------------------------------------------------------

def _well_formed(hint_id: str) -> dict:
    return {
        "hint_id": hint_id,
        "feedback_type": "how_to_proceed",
        "information": ["compliment", "tip"],
        "level_of_detail": "high_level",
        "personalised": True,
        "appropriate": True,
        "specific": True,
        "misleading": False,
        "tone": "friendly",
        "length_sentences": 2,
    }


def test_rubric_validation_acceptance():
    with criterion("rubric: 5 valid annotations accepted; all 9 criteria enforced by name"):
        store = AnnotationStore()
        for i in range(5):
            store.add(parse_annotation(_well_formed(f"h{i:05d}"), annotator_id="e1"))
        assert len(store) == 5

        out_of_domain = {
            "feedback_type": "encouragement",
            "information": ["sarcasm"],
            "level_of_detail": "medium",
            "personalised": "yes",
            "appropriate": 2,
            "specific": "true",
            "misleading": None,
            "tone": "angry",
            "length_sentences": 0,
        }
        assert set(out_of_domain) == set(ANNOTATION_CRITERIA)
        for criterion_name in ANNOTATION_CRITERIA:
            missing = _well_formed("h99999")
            del missing[criterion_name]
            with pytest.raises(AnnotationError) as excinfo:
                parse_annotation(missing, annotator_id="e1")
            assert criterion_name in str(excinfo.value)

            bad = _well_formed("h99999")
            bad[criterion_name] = out_of_domain[criterion_name]
            with pytest.raises(AnnotationError) as excinfo:
                parse_annotation(bad, annotator_id="e1")
            assert criterion_name in str(excinfo.value)
