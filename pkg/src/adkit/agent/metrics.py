"""Response-quality accounting: congruence of action vs. intent.

A reply is incongruent when a command that merely asks (no imperative edit
verb, no generation request) comes back with a script change. Factual
errors on visual questions cannot be detected mechanically, so those carry
human labels in the bundled corpus.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .protocol import AgentResponse, parse_response

# Verbs that make a command an action request rather than a question.
EDIT_VERBS = frozenset({
    "add", "adjust", "append", "capitalize", "change", "condense", "correct",
    "create", "delete", "describe", "edit", "expand", "fill", "fix",
    "generate", "identify", "incorporate", "insert", "lengthen", "make",
    "merge", "minimize", "move", "populate", "redo", "remove", "rename",
    "rephrase", "replace", "retime", "revise", "reword", "rewrite", "set",
    "shift", "shorten", "split", "substitute", "translate", "trim", "undo",
    "update", "write",
})

_QUESTION_OPENERS = frozenset({
    "what", "who", "whose", "where", "when", "why", "how", "which",
    "is", "are", "was", "were", "am", "do", "does", "did", "can", "could",
    "would", "should", "will", "shall", "have", "has", "anything", "any",
})

_WORD_RE = re.compile(r"[a-z']+")


def _words(command: str) -> list[str]:
    return _WORD_RE.findall(command.lower())


def is_pure_question(command: str) -> bool:
    """No edit verb anywhere, and it reads as asking rather than telling."""
    words = _words(command)
    if not words or any(w in EDIT_VERBS for w in words):
        return False
    return command.rstrip().endswith("?") or words[0] in _QUESTION_OPENERS


def classify_incongruence(command: str, response: AgentResponse) -> bool:
    """True when a pure question produced a script change."""
    return is_pure_question(command) and response.did_change_script


@dataclass(frozen=True)
class CorpusMetrics:
    total: int
    action_responses: int
    vqa_responses: int
    incongruent: int
    vqa_errors: int

    @property
    def flagged(self) -> int:
        return self.incongruent + self.vqa_errors

    @property
    def flagged_rate(self) -> float:
        return self.flagged / self.total if self.total else 0.0

    def to_json_obj(self) -> dict:
        return {
            "total": self.total,
            "actionResponses": self.action_responses,
            "vqaResponses": self.vqa_responses,
            "incongruent": self.incongruent,
            "vqaErrors": self.vqa_errors,
            "flagged": self.flagged,
            "flaggedRate": round(self.flagged_rate, 4),
        }


def score_corpus(entries: Iterable[dict]) -> CorpusMetrics:
    """Replay a labeled corpus of {command, rawResponse, kind, vqaError} rows.

    Incongruence is recomputed from the classifier; visual-answer errors
    come from the rows' labels.
    """
    total = actions = vqa = incongruent = vqa_errors = 0
    for entry in entries:
        total += 1
        response = parse_response(entry["rawResponse"])
        if entry.get("kind") == "vqa":
            vqa += 1
            if entry.get("vqaError"):
                vqa_errors += 1
        else:
            actions += 1
        if classify_incongruence(entry["command"], response):
            incongruent += 1
    return CorpusMetrics(total, actions, vqa, incongruent, vqa_errors)
