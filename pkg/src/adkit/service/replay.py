"""Rebuild session state from an interaction log.

The log is the source of truth: every mutation the service performs is
appended as one row, so replaying the rows through the same apply logic
must land on the same final script, byte for byte.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Iterable, Optional

from ..agent import SessionState, apply_response, parse_response
from ..script import ADScript, parse_script


def _counting_clock():
    tick = 0.0

    def clock() -> float:
        nonlocal tick
        tick += 1.0
        return tick

    return clock


def _set_script(state: SessionState, text: str) -> SessionState:
    script = parse_script(text, state.video_duration_ms) if text.strip() else ADScript()
    line = min(state.current_line, max(script.line_count(), 1))
    return replace(state, script=script, current_line=line)


def replay_log(rows: Iterable[dict], state: Optional[SessionState] = None) -> SessionState:
    """Apply logged mutations in order; rows that were rejected are skipped.

    A leading "created" row configures the session when no starting state
    is given.
    """
    clock = _counting_clock()
    rows = list(rows)
    if state is None:
        config = next((r for r in rows if r.get("kind") == "created"), {})
        state = SessionState(
            video_url=config.get("videoUrl", ""),
            video_duration_ms=config.get("videoDurationMs"),
            ask_only=config.get("askOnly", False),
        )
    for row in rows:
        kind = row.get("kind")
        if kind == "settings":
            state = replace(state, ask_only=row["askOnly"])
        elif kind in ("scriptPut", "suggestionAccepted"):
            state = _set_script(state, row["text"])
        elif kind == "playback":
            state = replace(state, playhead_ms=row["positionMs"])
        elif kind == "command" and row.get("ok"):
            response = parse_response(row["attempts"][-1])
            state, _ = apply_response(state, response, clock)
    return state
