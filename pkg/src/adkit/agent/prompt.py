"""Prompt assembly from the versioned template asset.

The template carries six placeholders: {{command}}, {{conversationHistory}},
{{videoURL}}, {{timestamp}}, {{adScriptLine}}, {{adScriptText}}. The
timestamp is rendered in whole seconds (a bare number such as 94).
"""

from __future__ import annotations

from importlib import resources
from typing import Sequence

from ..script import serialize_script

TEMPLATE_VERSION = "v1"
PLACEHOLDERS = ("command", "conversationHistory", "videoURL", "timestamp", "adScriptLine", "adScriptText")


def load_template(version: str = TEMPLATE_VERSION) -> str:
    return (resources.files("adkit.agent") / f"prompt_{version}.txt").read_text(encoding="utf-8")


def render_history(turns: Sequence, char_budget: int = 6000) -> str:
    """Turns as "role: text" lines, oldest first, truncated from the front.

    Whole oldest turns are dropped until the rendering fits the budget.
    """
    lines = [f"{turn.role}: {turn.text}" for turn in turns]
    while len(lines) > 1 and sum(len(line) + 1 for line in lines) > char_budget:
        lines.pop(0)
    return "\n".join(lines) if lines else "(empty)"


def assemble_prompt(command: str, state, history_char_budget: int = 6000, version: str = TEMPLATE_VERSION) -> str:
    """Fill the template from a session state (duck-typed: script, playhead_ms,
    current_line, history, video_url)."""
    values = {
        "command": command,
        "conversationHistory": render_history(state.history, history_char_budget),
        "videoURL": state.video_url,
        "timestamp": str(state.playhead_ms // 1000),
        "adScriptLine": str(state.current_line),
        "adScriptText": serialize_script(state.script),
    }
    prompt = load_template(version)
    for name, value in values.items():
        prompt = prompt.replace("{{" + name + "}}", value)
    return prompt
