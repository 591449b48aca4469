"""End-to-end CLI smoke tests (everything offline, mock backend)."""

from __future__ import annotations

import json

import pytest

from editsim import simulate_log
from steptutor.cli import main
from steptutor.prompts import PromptSpec
from steptutor.snapshots import build_step_sequence, write_step_sequence


@pytest.fixture()
def raw_csv(tmp_path):
    path = tmp_path / "raw.csv"
    lines = ["index,timestamp,source"]
    for snap in simulate_log(seed=2):
        escaped = snap.source.replace('"', '""')
        lines.append(f'{snap.seq_index},{snap.timestamp},"{escaped}"')
    path.write_text("\n".join(lines) + "\n")
    return path


def test_preprocess_writes_step_sequence(raw_csv, tmp_path, capsys):
    out = tmp_path / "steps.jsonl"
    code = main(
        [
            "preprocess",
            "--input", str(raw_csv),
            "--format", "csv",
            "--student", "s2",
            "--exercise", "clumps",
            "--out", str(out),
        ]
    )
    assert code == 0
    assert out.exists()
    header = json.loads(out.read_text().splitlines()[0])
    assert header["student_id"] == "s2"
    assert "steps" in capsys.readouterr().out


def test_generate_rank_report_flow(tmp_path, capsys):
    steps_path = tmp_path / "steps.jsonl"
    sequence = build_step_sequence(simulate_log(seed=4), "s4", "pies")
    write_step_sequence(sequence, steps_path)

    manifest_path = tmp_path / "manifest.json"
    manifest_path.write_text(
        json.dumps(
            {
                "step_sequence_paths": [str(steps_path)],
                "prompt_specs": [PromptSpec(i).to_json() for i in ("ii", "iv", "v")],
                "output_path": str(tmp_path / "hints.jsonl"),
            }
        )
    )
    assert main(["generate", "--manifest", str(manifest_path), "--mock"]) == 0
    assert (tmp_path / "hints.jsonl").exists()
    assert "records" in capsys.readouterr().out

    sheets_dir = tmp_path / "sheets"
    sheets_dir.mkdir()
    (sheets_dir / "pies.json").write_text(
        json.dumps(
            {
                "exercise_id": "pies",
                "entries": [
                    {"program_id": "p1", "ranks": {"ii": 2, "iv": 3, "v": 1}},
                    {"program_id": "p2", "ranks": {"ii": 2, "iv": 3, "v": 1}},
                ],
            }
        )
    )
    assert main(["rank", "--sheets", str(sheets_dir)]) == 0
    out = capsys.readouterr().out
    assert "winner: v" in out


def test_annotate_and_kappa_flow(tmp_path, capsys):
    hints = tmp_path / "hints.jsonl"
    hints.write_text(
        "\n".join(
            json.dumps({"hint_id": f"h{i:05d}", "hint_text": "t"}) for i in range(1, 4)
        )
        + "\n"
    )

    def entry(hint_id, tone):
        return {
            "hint_id": hint_id,
            "feedback_type": "how_to_proceed",
            "information": ["tip"],
            "level_of_detail": "high_level",
            "personalised": True,
            "appropriate": True,
            "specific": True,
            "misleading": False,
            "tone": tone,
            "length_sentences": 1,
        }

    entries_a = tmp_path / "a_entries.jsonl"
    entries_a.write_text(
        "\n".join(json.dumps(entry(f"h{i:05d}", "friendly")) for i in range(1, 4)) + "\n"
    )
    entries_b = tmp_path / "b_entries.jsonl"
    entries_b.write_text(
        "\n".join(
            json.dumps(entry(f"h{i:05d}", tone))
            for i, tone in zip(range(1, 4), ("friendly", "direct", "friendly"))
        )
        + "\n"
    )

    store_a = tmp_path / "store_a.jsonl"
    store_b = tmp_path / "store_b.jsonl"
    assert main(["annotate", "--hints", str(hints), "--entries", str(entries_a),
                 "--annotator", "e1", "--out", str(store_a)]) == 0
    assert main(["annotate", "--hints", str(hints), "--entries", str(entries_b),
                 "--annotator", "e2", "--out", str(store_b)]) == 0
    capsys.readouterr()

    assert main(["kappa", "--a", str(store_a), "--b", str(store_b),
                 "--criterion", "tone"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["criterion"] == "tone"
    assert report["n"] == 3
    assert report["agreements"] == 2


def test_report_command(tmp_path, capsys):
    events = tmp_path / "events.jsonl"
    events.write_text(
        json.dumps(
            {
                "kind": "hint_rated",
                "session_id": "s",
                "at": 1,
                "payload": {"hint_id": "h", "clear": 5, "fits": 4, "helpful": 3},
            }
        )
        + "\n"
    )
    out_dir = tmp_path / "report"
    assert main(["report", "--events", str(events), "--out", str(out_dir)]) == 0
    assert (out_dir / "ratings.csv").exists()
    assert (out_dir / "ratings_plot.json").exists()
    assert "n = 1" in capsys.readouterr().out


def test_error_paths_return_nonzero(tmp_path, capsys):
    assert main(["preprocess", "--input", str(tmp_path / "missing.csv"),
                 "--format", "csv", "--student", "s", "--exercise", "e",
                 "--out", str(tmp_path / "o.jsonl")]) == 1
    assert "error:" in capsys.readouterr().err
