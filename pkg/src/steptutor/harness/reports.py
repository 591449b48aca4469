"""Student-rating reports and sentence counting."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable

__all__ = ["RATING_STATEMENTS", "rating_report", "write_rating_report", "count_sentences"]

# The three statements students score on a 1-5 Likert scale.
RATING_STATEMENTS = ("clear", "fits", "helpful")

_TERMINALS = ".!?"


def rating_report(event_lines: Iterable[str]) -> dict:
    """Histogram the 1-5 scores of every hint_rated event in an export."""
    histograms = {s: {score: 0 for score in range(1, 6)} for s in RATING_STATEMENTS}
    n = 0
    for line in event_lines:
        if not line.strip():
            continue
        event = json.loads(line)
        if event.get("kind") != "hint_rated":
            continue
        payload = event["payload"]
        n += 1
        for statement in RATING_STATEMENTS:
            histograms[statement][int(payload[statement])] += 1
    return {"n": n, "histograms": histograms}


def write_rating_report(report: dict, out_dir: str | Path) -> dict[str, Path]:
    """Emit ratings.csv plus a plot-data JSON file; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    csv_path = out_dir / "ratings.csv"
    with csv_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["statement", "score", "count"])
        for statement in RATING_STATEMENTS:
            for score in range(1, 6):
                writer.writerow([statement, score, report["histograms"][statement][score]])

    plot_path = out_dir / "ratings_plot.json"
    plot_data = {
        "n": report["n"],
        "scores": list(range(1, 6)),
        "series": {
            statement: [report["histograms"][statement][score] for score in range(1, 6)]
            for statement in RATING_STATEMENTS
        },
    }
    plot_path.write_text(json.dumps(plot_data, indent=2) + "\n", encoding="utf-8")
    return {"csv": csv_path, "plot": plot_path}


def count_sentences(text: str) -> int:
    """Number of sentences, splitting on . ! ? followed by whitespace or the
    end of the text. Punctuation inside backticks (code spans) and decimal
    points never end a sentence."""
    if not text.strip():
        raise ValueError("cannot count sentences of empty text")
    boundaries = 0
    in_backticks = False
    last_boundary = -1
    for i, ch in enumerate(text):
        if ch == "`":
            in_backticks = not in_backticks
            continue
        if in_backticks or ch not in _TERMINALS:
            continue
        at_end = i + 1 == len(text)
        if at_end or text[i + 1].isspace():
            boundaries += 1
            last_boundary = i
    trailing = text[last_boundary + 1 :].strip()
    count = boundaries + (1 if trailing else 0)
    return max(count, 1)
