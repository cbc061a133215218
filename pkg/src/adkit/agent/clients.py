"""Model client interface plus the deterministic mock used everywhere offline.

There are two capability tiers behind the one interface: "generation"
(multimodal description drafting) and "conversation" (fast chat replies).
Which tier a deployment binds to which real model is configuration; the
engine only ever talks to this interface.
"""

from __future__ import annotations

import abc
import json
from typing import Optional, Sequence

DEFAULT_TEMPERATURE = 0.3
TIERS = ("generation", "conversation")


class ModelClient(abc.ABC):
    tier: str = "generation"

    @abc.abstractmethod
    def send(self, prompt: str, temperature: float = DEFAULT_TEMPERATURE) -> str:
        """Send one prompt, return the raw reply text."""
        raise NotImplementedError


class MockModelClient(ModelClient):
    """Replays a fixed list of raw replies in order; records every prompt."""

    def __init__(self, replies: Sequence[str], tier: str = "generation"):
        if tier not in TIERS:
            raise ValueError(f"unknown tier: {tier}")
        self.tier = tier
        self._replies = list(replies)
        self._cursor = 0
        self.prompts: list[str] = []
        self.temperatures: list[float] = []

    @property
    def exhausted(self) -> bool:
        return self._cursor >= len(self._replies)

    def send(self, prompt: str, temperature: float = DEFAULT_TEMPERATURE) -> str:
        self.prompts.append(prompt)
        self.temperatures.append(temperature)
        if self.exhausted:
            raise RuntimeError("mock transcript exhausted")
        reply = self._replies[self._cursor]
        self._cursor += 1
        return reply


def make_raw_reply(
    command: str,
    text_response: str,
    new_timestamp_s: Optional[int] = None,
    new_script_text: Optional[str] = None,
    line_number: Optional[int] = None,
    fenced: bool = False,
) -> str:
    """Serialize a well-formed wire reply; handy for transcripts and tests."""
    obj = {
        "Command": command,
        "TextResponse": text_response,
        "DidChangeTimestamp": new_timestamp_s is not None,
        "NewTimeStamp": new_timestamp_s if new_timestamp_s is not None else 0,
        "DidChangeScript": new_script_text is not None,
        "NewScript": new_script_text if new_script_text is not None else "",
        "DidChangeADLineNumber": line_number is not None,
        "ADLineNumber": line_number if line_number is not None else 0,
    }
    raw = json.dumps(obj, indent=2)
    return f"```json\n{raw}\n```" if fenced else raw
