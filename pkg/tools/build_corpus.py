#!/usr/bin/env python3
"""Regenerate the bundled labeled response corpus and session transcripts.

The corpus is constructed, not captured: commands and replies are authored
so the census is exact by design - 202 rows total, 134 action rows of which
exactly 18 are incongruent (a pure question answered with a script change),
and 68 visual-question rows of which exactly 4 carry a factual-error label.
The script asserts those numbers by replaying the rows through the real
classifier before anything is written.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from adkit import data
from adkit.agent import make_raw_reply, parse_response, score_corpus
from adkit.script import ADScript, Cue, serialize_script

ROOT = Path(__file__).resolve().parents[1] / "src" / "adkit" / "data"


def mini_script(start_s: int, first: str, second: str) -> str:
    cues = (
        Cue(start_s * 1000, (start_s + 4) * 1000, first),
        Cue((start_s + 6) * 1000, (start_s + 10) * 1000, second),
    )
    return serialize_script(ADScript(cues=cues))


def applied_events(raw: str) -> list[str]:
    resp = parse_response(raw)
    events = ["TextSpoken"]
    if resp.did_change_timestamp:
        events.append("TimestampJumped")
    if resp.did_change_script:
        events.append("ScriptReplaced")
    if resp.did_change_line:
        events.append("LineMoved")
    return events


def row(kind: str, command: str, raw: str, vqa_error: bool = False) -> dict:
    return {
        "kind": kind,
        "command": command,
        "rawResponse": raw,
        "appliedEvents": applied_events(raw),
        "vqaError": vqa_error,
    }


OBJECTS = [
    "watch", "jacket", "mug", "door", "bicycle", "umbrella", "lamp", "poster",
    "backpack", "guitar", "kettle", "scarf", "ladder", "mirror", "clock", "radio",
]
COLORS = ["red", "blue", "green", "silver", "black", "yellow", "white", "copper"]
SCENES = [
    "kitchen", "hallway", "garden", "garage", "rooftop", "stairwell", "workshop",
    "balcony", "courtyard", "basement",
]
FIRST_LINES = [
    "A {color} {obj} rests on the table.",
    "Someone lifts the {color} {obj} carefully.",
    "The {obj} tips over and rolls away.",
    "Morning light catches the {color} {obj}.",
    "A hand reaches for the {obj}.",
]
SECOND_LINES = [
    "The {scene} falls quiet again.",
    "Footsteps fade from the {scene}.",
    "Across the {scene}, a door swings shut.",
    "Dust drifts through the {scene}.",
]


def scripted_text(i: int) -> tuple[str, str]:
    first = FIRST_LINES[i % len(FIRST_LINES)].format(
        color=COLORS[i % len(COLORS)], obj=OBJECTS[i % len(OBJECTS)]
    )
    second = SECOND_LINES[i % len(SECOND_LINES)].format(scene=SCENES[i % len(SCENES)])
    return first, second


def build_vqa_rows() -> list[dict]:
    questions = []
    for i in range(17):
        questions.append(f"What color is the {OBJECTS[i % len(OBJECTS)]}?")
    for i in range(17):
        questions.append(f"Is there a {OBJECTS[(i + 5) % len(OBJECTS)]} in this scene?")
    for i in range(17):
        questions.append(f"How many people are in the {SCENES[i % len(SCENES)]} right now?")
    for i in range(17):
        questions.append(f"Where is the {OBJECTS[(i + 9) % len(OBJECTS)]} in the frame?")
    assert len(questions) == 68

    rows = []
    for i, question in enumerate(questions):
        answer = f"It looks {COLORS[(i + 3) % len(COLORS)]} from this frame." if "color" in question else (
            f"Yes, near the center of the {SCENES[i % len(SCENES)]}."
        )
        raw = make_raw_reply(question, answer, fenced=(i % 4 == 0))
        # Four answers are deliberately wrong; the label is the ground truth.
        rows.append(row("vqa", question, raw, vqa_error=(i % 17 == 8)))
    return rows


def build_incongruent_rows() -> list[dict]:
    questions = [
        "What color is the watch?",
        "Is the narrator visible in this shot?",
        "Was that a photograph on the wall?",
        "Does the video open on the rooftop?",
        "How long does the opening shot last?",
        "Is there smoke in the background here?",
        "What is the weather like in this scene?",
        "Are the curtains drawn in this frame?",
        "Who enters the room at this point?",
        "Is the radio playing in this scene?",
        "Which door does she walk through?",
        "Is anyone holding the umbrella right now?",
        "Does the camera linger on the mirror?",
        "What does the chalkboard show here?",
        "Is the kettle boiling at this timestamp?",
        "Are there two people at the table?",
        "When does the dog first appear?",
        "Is this the same hallway as before?",
    ]
    assert len(questions) == 18
    rows = []
    for i, question in enumerate(questions):
        first, second = scripted_text(i + 3)
        raw = make_raw_reply(
            question,
            "Answered the question and tightened the nearby description as well.",
            new_script_text=mini_script(5 + (i % 6) * 12, first, second),
        )
        entry = row("action", question, raw)
        assert parse_response(raw).did_change_script
        rows.append(entry)
    return rows


def build_congruent_action_rows() -> list[dict]:
    rows: list[dict] = []

    for i in range(30):  # generation requests
        command = [
            "Generate descriptions for this video with time stamps.",
            f"Generate AD for the first {10 + i} seconds.",
            f"Write a description for the {SCENES[i % len(SCENES)]} scene.",
        ][i % 3]
        first, second = scripted_text(i)
        raw = make_raw_reply(command, "Drafted descriptions for the quiet stretches.",
                             new_script_text=mini_script(4 + (i % 5) * 11, first, second))
        rows.append(row("action", command, raw))

    for i in range(30):  # edits
        first, second = scripted_text(i + 7)
        command = [
            f"Update the line at {8 + i} seconds to: {first}",
            f"Shorten the description on line {1 + (i % 9)}.",
            f"Rename the courier to Ana everywhere.",
        ][i % 3]
        raw = make_raw_reply(command, "Applied the edit you asked for.",
                             new_script_text=mini_script(6 + (i % 7) * 9, first, second))
        rows.append(row("action", command, raw))

    for i in range(20):  # navigation
        command = [
            f"Go to {i % 3} minute {10 + i} seconds.",
            "Jump forward ten seconds.",
            f"Go to the scene in the {SCENES[i % len(SCENES)]}.",
            "Jump to the next scene.",
        ][i % 4]
        raw = make_raw_reply(command, "Moving the playhead there now.", new_timestamp_s=12 + i * 3)
        rows.append(row("action", command, raw))

    for i in range(16):  # chat without side effects
        command = [
            "Summarize this video.",
            "Give me an overview of the pacing.",
            "Tell me when the chorus starts.",
            "Summarize the last three descriptions.",
        ][i % 4]
        raw = make_raw_reply(command, "Here is a short rundown of the video's flow.")
        rows.append(row("action", command, raw))

    for i in range(10):  # cursor moves
        command = f"Move my cursor to line {2 + i}."
        raw = make_raw_reply(command, f"Cursor moved to line {2 + i}.", line_number=2 + i)
        rows.append(row("action", command, raw))

    for i in range(10):  # removals
        first, second = scripted_text(i + 11)
        command = f"Remove the description at {20 + i * 4} seconds."
        raw = make_raw_reply(command, "Removed that description.",
                             new_script_text=mini_script(7 + (i % 4) * 13, first, second))
        rows.append(row("action", command, raw))

    assert len(rows) == 116
    return rows


CLARA_SUMMARY = (
    "The film follows a man's morning; smiling faces appear in everyday "
    "objects around his home until the final photo reveal."
)
CLARA_GEN_SCRIPT = (
    "0 min 2 sec to 0 min 7 sec\n"
    "The alarm clock rings loudly. A man wakes up in bed, looking distressed.\n"
    "\n"
    "0 min 8 sec to 0 min 12 sec\n"
    "The man sits on the edge of the bed, rubbing his face. Two white slippers sit on the floor.\n"
    "\n"
    "0 min 16 sec to 0 min 24 sec\n"
    "Faces follow him. In the bathroom sink, his own trousers, his morning coffee, and even his fried eggs.\n"
    "\n"
    "0 min 33 sec to 0 min 38 sec\n"
    "Two fried eggs in a pan form a smiling face. The man smiles."
)
CLARA_EDITED_SCRIPT = CLARA_GEN_SCRIPT.replace(
    "The man sits on the edge of the bed, rubbing his face. Two white slippers sit on the floor.",
    "The man sits on the bed, rubbing his face. Two white slippers, resembling faces, sit on the floor.",
)
CLARA_EDIT_COMMAND = (
    "Update the line at 8 seconds to: The man sits on the bed, rubbing his "
    "face. Two white slippers, resembling faces, sit on the floor."
)


def build_clara_transcript() -> list[dict]:
    turns = [
        ("Give me a quick summary of this video.",
         make_raw_reply("Give me a quick summary of this video.", CLARA_SUMMARY)),
        ("Find all the silent gaps and generate descriptions with timestamps.",
         make_raw_reply("Find all the silent gaps and generate descriptions with timestamps.",
                        "I drafted descriptions for the four quiet stretches I found.",
                        new_script_text=CLARA_GEN_SCRIPT, fenced=True)),
        ("Is there anything notable about the slippers?",
         make_raw_reply("Is there anything notable about the slippers?",
                        "Yes: seen together, the two white slippers resemble a pair of smiling faces.")),
        (CLARA_EDIT_COMMAND,
         make_raw_reply(CLARA_EDIT_COMMAND, "Updated that line.",
                        new_script_text=CLARA_EDITED_SCRIPT, line_number=5)),
    ]
    return [
        {"command": command, "rawResponse": raw, "appliedEvents": applied_events(raw)}
        for command, raw in turns
    ]


def build_rename_transcript() -> list[dict]:
    before = data.load_corpus_document("07_rename_before")
    after = data.load_corpus_document("08_rename_after")
    turns = [
        ("Generate descriptions for this video with time stamps.",
         make_raw_reply("Generate descriptions for this video with time stamps.",
                        "Drafted a first pass of descriptions.", new_script_text=before)),
        ("Rename the man to Tom across the whole script.",
         make_raw_reply("Rename the man to Tom across the whole script.",
                        "Updated all 6 occurrences to 'Tom'.", new_script_text=after)),
    ]
    return [
        {"command": command, "rawResponse": raw, "appliedEvents": applied_events(raw)}
        for command, raw in turns
    ]


def main() -> int:
    rows = build_incongruent_rows() + build_congruent_action_rows() + build_vqa_rows()
    assert len(rows) == 202, len(rows)

    metrics = score_corpus(rows)
    assert metrics.total == 202, metrics
    assert metrics.action_responses == 134, metrics
    assert metrics.vqa_responses == 68, metrics
    assert metrics.incongruent == 18, metrics
    assert metrics.vqa_errors == 4, metrics
    assert round(metrics.flagged_rate, 3) == 0.109, metrics

    out = ROOT / "responses.jsonl"
    out.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")

    transcripts = ROOT / "transcripts"
    transcripts.mkdir(exist_ok=True)
    for name, turns in (("clara", build_clara_transcript()), ("rename", build_rename_transcript())):
        path = transcripts / f"{name}.jsonl"
        path.write_text("".join(json.dumps(t) + "\n" for t in turns), encoding="utf-8")

    print(f"wrote {out.name} ({len(rows)} rows) and 2 transcripts; census {metrics.to_json_obj()}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
