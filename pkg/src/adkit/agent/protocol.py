"""Wire protocol for model replies: a strict eight-field JSON object.

Replies arrive as free text that should contain one JSON object; fences
and conversational padding are tolerated, field names and types are not.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Any, Optional

from ..script import ADScript, ScriptParseError, parse_script

_FENCE_RE = re.compile(r"```(?:[a-zA-Z0-9_-]+)?\s*\n(.*?)```", re.DOTALL)

REQUIRED_FIELDS = (
    "Command",
    "TextResponse",
    "DidChangeTimestamp",
    "NewTimeStamp",
    "DidChangeScript",
    "NewScript",
    "DidChangeADLineNumber",
    "ADLineNumber",
)
_CONDITIONAL = {"NewTimeStamp": "DidChangeTimestamp", "NewScript": "DidChangeScript", "ADLineNumber": "DidChangeADLineNumber"}


class SchemaError(ValueError):
    """A reply that violates the response contract; code is machine-stable."""

    def __init__(self, code: str, detail: str):
        self.code = code
        self.detail = detail
        super().__init__(f"{code}: {detail}")


@dataclass(frozen=True)
class AgentResponse:
    command: str
    text_response: str
    did_change_timestamp: bool
    new_timestamp_s: Optional[int]
    did_change_script: bool
    new_script_text: str
    did_change_line: bool
    line_number: Optional[int]
    raw: str = ""
    parsed_script: Optional[ADScript] = None

    def to_wire(self) -> dict:
        return {
            "Command": self.command,
            "TextResponse": self.text_response,
            "DidChangeTimestamp": self.did_change_timestamp,
            "NewTimeStamp": self.new_timestamp_s if self.new_timestamp_s is not None else 0,
            "DidChangeScript": self.did_change_script,
            "NewScript": self.new_script_text,
            "DidChangeADLineNumber": self.did_change_line,
            "ADLineNumber": self.line_number if self.line_number is not None else 0,
        }


def _candidate_objects(raw: str):
    stripped = raw.strip()
    if stripped:
        yield stripped
    for fenced in _FENCE_RE.findall(raw):
        yield fenced.strip()
    # Balanced-brace scan over the whole reply, string-aware.
    start = raw.find("{")
    while start != -1:
        depth = 0
        in_string = False
        escaped = False
        for i in range(start, len(raw)):
            ch = raw[i]
            if in_string:
                if escaped:
                    escaped = False
                elif ch == "\\":
                    escaped = True
                elif ch == '"':
                    in_string = False
            elif ch == '"':
                in_string = True
            elif ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
                if depth == 0:
                    yield raw[start : i + 1]
                    break
        start = raw.find("{", start + 1)


def _extract_object(raw: str) -> dict:
    for candidate in _candidate_objects(raw):
        try:
            value = json.loads(candidate)
        except (json.JSONDecodeError, ValueError):
            continue
        if isinstance(value, dict):
            return value
    raise SchemaError("NOT_JSON", "no JSON object found in the reply")


def _require_bool(obj: dict, name: str) -> bool:
    value = obj[name]
    if not isinstance(value, bool):
        raise SchemaError("TYPE_MISMATCH", f"{name} must be a boolean, got {type(value).__name__}")
    return value


def _require_str(obj: dict, name: str) -> str:
    value = obj[name]
    if not isinstance(value, str):
        raise SchemaError("TYPE_MISMATCH", f"{name} must be a string, got {type(value).__name__}")
    return value


def _require_int(obj: dict, name: str) -> int:
    value = obj[name]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError("TYPE_MISMATCH", f"{name} must be an integer, got {type(value).__name__}")
    if isinstance(value, float) and not value.is_integer():
        raise SchemaError("TYPE_MISMATCH", f"{name} must be a whole number of seconds")
    return int(value)


def parse_response(raw: str) -> AgentResponse:
    """Parse and structurally check one model reply.

    Conditional value fields are required only when their boolean is true;
    a NewScript sent alongside DidChangeScript=true must parse as a script
    document (semantic rule checking happens at apply time, where minimum
    gap problems can still be repaired).
    """
    obj = _extract_object(raw)
    for name in REQUIRED_FIELDS:
        present = name in obj and obj[name] is not None
        if not present:
            gate = _CONDITIONAL.get(name)
            if gate is None or (gate in obj and obj[gate] is True):
                raise SchemaError("MISSING_FIELD", name)

    command = _require_str(obj, "Command")
    text_response = _require_str(obj, "TextResponse")
    did_change_timestamp = _require_bool(obj, "DidChangeTimestamp")
    did_change_script = _require_bool(obj, "DidChangeScript")
    did_change_line = _require_bool(obj, "DidChangeADLineNumber")

    new_timestamp_s: Optional[int] = None
    if did_change_timestamp:
        new_timestamp_s = _require_int(obj, "NewTimeStamp")
        if new_timestamp_s < 0:
            raise SchemaError("CONDITIONAL_FIELD_VIOLATION", "NewTimeStamp cannot be negative")
    elif obj.get("NewTimeStamp") is not None and not isinstance(obj.get("NewTimeStamp"), bool) and isinstance(obj.get("NewTimeStamp"), (int, float)):
        new_timestamp_s = int(obj["NewTimeStamp"])

    new_script_text = ""
    parsed_script: Optional[ADScript] = None
    if did_change_script:
        new_script_text = _require_str(obj, "NewScript")
        if new_script_text.strip() == "":
            raise SchemaError("CONDITIONAL_FIELD_VIOLATION", "DidChangeScript is true but NewScript is empty")
        try:
            parsed_script = parse_script(new_script_text)
        except ScriptParseError as exc:
            raise SchemaError(
                "CONDITIONAL_FIELD_VIOLATION",
                f"NewScript does not parse as an AD script: {exc.violations[0].message}",
            ) from exc
    elif isinstance(obj.get("NewScript"), str):
        new_script_text = obj["NewScript"]

    line_number: Optional[int] = None
    if did_change_line:
        line_number = _require_int(obj, "ADLineNumber")
        if line_number < 1:
            raise SchemaError("CONDITIONAL_FIELD_VIOLATION", "ADLineNumber is 1-based")

    return AgentResponse(
        command=command,
        text_response=text_response,
        did_change_timestamp=did_change_timestamp,
        new_timestamp_s=new_timestamp_s,
        did_change_script=did_change_script,
        new_script_text=new_script_text,
        did_change_line=did_change_line,
        line_number=line_number,
        raw=raw,
        parsed_script=parsed_script,
    )
