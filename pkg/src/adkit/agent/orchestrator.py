"""Session state and the command loop: prompt out, JSON back, atomic apply.

A reply either applies in full (script, playhead, cursor, history) or not
at all; failures still append to history so the conversation shows what
happened. Gap-rule breaches in an incoming script are repaired by pulling
the earlier cue's end back to one second before its neighbor; anything
else invalid rejects the reply.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Union

from ..script import (
    ADScript,
    ChangeRecord,
    MIN_GAP_MS,
    blocking,
    diff,
    parse_script,
    validate,
)
from .clients import MockModelClient, ModelClient
from .prompt import assemble_prompt
from .protocol import AgentResponse, SchemaError, parse_response

Clock = Callable[[], float]


@dataclass(frozen=True)
class ConversationTurn:
    role: str  # "user" | "agent"
    text: str
    wall_clock: float

    def __post_init__(self) -> None:
        if self.role not in ("user", "agent"):
            raise ValueError("turn role must be user or agent")

    def to_json_obj(self) -> dict:
        return {"role": self.role, "text": self.text, "wallClock": self.wall_clock}


@dataclass(frozen=True)
class SessionState:
    script: ADScript = ADScript()
    playhead_ms: int = 0
    current_line: int = 1
    history: tuple[ConversationTurn, ...] = ()
    video_url: str = ""
    video_duration_ms: Optional[int] = None
    ask_only: bool = False

    def __post_init__(self) -> None:
        if self.playhead_ms < 0:
            raise ValueError("playhead cannot be negative")
        if self.video_duration_ms is not None and self.playhead_ms > self.video_duration_ms:
            raise ValueError("playhead cannot pass the end of the video")
        if not 1 <= self.current_line <= max(self.script.line_count(), 1):
            raise ValueError("current line outside the serialized document")

    def with_turn(self, role: str, text: str, clock: Clock = time.time) -> "SessionState":
        return replace(self, history=self.history + (ConversationTurn(role, text, clock()),))


# --- events ----------------------------------------------------------------


@dataclass(frozen=True)
class TextSpoken:
    text: str
    kind: str = field(default="TextSpoken", init=False)


@dataclass(frozen=True)
class TimestampJumped:
    to_ms: int
    kind: str = field(default="TimestampJumped", init=False)


@dataclass(frozen=True)
class ScriptReplaced:
    script: ADScript
    changes: tuple[ChangeRecord, ...]
    repaired: bool
    kind: str = field(default="ScriptReplaced", init=False)


@dataclass(frozen=True)
class SuggestionPending:
    script: ADScript
    changes: tuple[ChangeRecord, ...]
    repaired: bool
    kind: str = field(default="SuggestionPending", init=False)


@dataclass(frozen=True)
class LineMoved:
    line: int
    kind: str = field(default="LineMoved", init=False)


Event = Union[TextSpoken, TimestampJumped, ScriptReplaced, SuggestionPending, LineMoved]


def event_to_json_obj(event: Event) -> dict:
    obj: dict = {"kind": event.kind}
    if isinstance(event, TextSpoken):
        obj["text"] = event.text
    elif isinstance(event, TimestampJumped):
        obj["toMs"] = event.to_ms
    elif isinstance(event, (ScriptReplaced, SuggestionPending)):
        obj["script"] = event.script.to_json_obj()
        obj["changes"] = [c.to_json_obj() for c in event.changes]
        obj["repaired"] = event.repaired
    elif isinstance(event, LineMoved):
        obj["line"] = event.line
    return obj


class ResponseRejectedError(ValueError):
    """The reply parsed but cannot be applied; session state is unchanged."""

    def __init__(self, message: str, violations=()):
        self.violations = list(violations)
        super().__init__(message)


def repair_min_gaps(script: ADScript) -> tuple[ADScript, bool]:
    """Shrink earlier cues so consecutive cues sit at least one second apart.

    Returns the (possibly) repaired script and whether anything changed.
    Raises ResponseRejectedError when a cue cannot shrink far enough.
    """
    cues = list(script.cues)
    repaired = False
    for i in range(1, len(cues)):
        gap = cues[i].start_ms - cues[i - 1].end_ms
        if 0 <= gap < MIN_GAP_MS:
            new_end = cues[i].start_ms - MIN_GAP_MS
            if new_end <= cues[i - 1].start_ms:
                raise ResponseRejectedError(
                    f"cue {i - 1} cannot shrink enough to restore the one-second gap before cue {i}"
                )
            cues[i - 1] = cues[i - 1].with_times(cues[i - 1].start_ms, new_end)
            repaired = True
    return replace(script, cues=tuple(cues)), repaired


def apply_response(state: SessionState, resp: AgentResponse, clock: Clock = time.time) -> tuple[SessionState, tuple[Event, ...]]:
    """Apply one parsed reply atomically.

    Everything is computed first and committed in a single state swap, so a
    raise leaves the caller's state untouched. In ask-only sessions a script
    change becomes a pending suggestion instead of a write.
    """
    events: list[Event] = [TextSpoken(resp.text_response)]
    new_playhead = state.playhead_ms
    new_script = state.script
    new_line = state.current_line

    if resp.did_change_timestamp:
        assert resp.new_timestamp_s is not None
        jumped_ms = resp.new_timestamp_s * 1000
        if state.video_duration_ms is not None and jumped_ms > state.video_duration_ms:
            raise ResponseRejectedError("NewTimeStamp is past the end of the video")
        new_playhead = jumped_ms
        events.append(TimestampJumped(jumped_ms))

    suggested: Optional[SuggestionPending] = None
    if resp.did_change_script:
        incoming = resp.parsed_script if resp.parsed_script is not None else parse_script(resp.new_script_text)
        incoming = replace(incoming, video_duration_ms=state.video_duration_ms)
        incoming, repaired = repair_min_gaps(incoming)
        remaining = blocking(validate(incoming))
        if remaining:
            raise ResponseRejectedError(
                "NewScript is invalid after repair: " + "; ".join(v.message for v in remaining),
                violations=remaining,
            )
        changes = tuple(diff(state.script, incoming))
        if state.ask_only:
            suggested = SuggestionPending(incoming, changes, repaired)
            events.append(suggested)
        else:
            new_script = incoming
            events.append(ScriptReplaced(incoming, changes, repaired))

    if resp.did_change_line:
        assert resp.line_number is not None
        line_script = new_script
        new_line = min(max(1, resp.line_number), max(line_script.line_count(), 1))
        events.append(LineMoved(new_line))
    else:
        new_line = min(new_line, max(new_script.line_count(), 1))

    new_state = replace(
        state,
        script=new_script,
        playhead_ms=new_playhead,
        current_line=new_line,
        history=state.history + (ConversationTurn("agent", resp.text_response, clock()),),
    )
    return new_state, tuple(events)


@dataclass(frozen=True)
class CommandResult:
    state: SessionState
    events: tuple[Event, ...]
    response: Optional[AgentResponse]
    raw_attempts: tuple[str, ...]
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _repair_prompt(prompt: str, error: SchemaError) -> str:
    return (
        prompt
        + "\n\n# Correction\nYour previous reply could not be used: "
        + f"{error.code}: {error.detail}. "
        + "Reply again with only the JSON object described under Output format, all eight fields present."
    )


def run_command(
    state: SessionState,
    command: str,
    client: ModelClient,
    clock: Clock = time.time,
    temperature: float = 0.3,
) -> CommandResult:
    """One full round trip: prompt, reply, (single) schema retry, apply.

    The user turn is always recorded; on any failure the returned state is
    the pre-state plus history (the failure is surfaced as an agent turn).
    """
    prompt = assemble_prompt(command, state)
    with_user = state.with_turn("user", command, clock)
    attempts: list[str] = []

    try:
        raw = client.send(prompt, temperature=temperature)
    except Exception as exc:  # client transport failure
        failed = with_user.with_turn("agent", f"The model request failed: {exc}", clock)
        return CommandResult(failed, (), None, (), error=f"CLIENT_ERROR: {exc}")
    attempts.append(raw)

    response: Optional[AgentResponse] = None
    try:
        response = parse_response(raw)
    except SchemaError as first_error:
        try:
            raw2 = client.send(_repair_prompt(prompt, first_error), temperature=temperature)
        except Exception as exc:
            failed = with_user.with_turn("agent", f"The model request failed: {exc}", clock)
            return CommandResult(failed, (), None, tuple(attempts), error=f"CLIENT_ERROR: {exc}")
        attempts.append(raw2)
        try:
            response = parse_response(raw2)
        except SchemaError as second_error:
            failed = with_user.with_turn(
                "agent",
                f"The reply did not follow the response format even after a retry ({second_error.code}).",
                clock,
            )
            return CommandResult(failed, (), None, tuple(attempts), error="SCHEMA_FAILURE_AFTER_RETRY")

    try:
        new_state, events = apply_response(with_user, response, clock)
    except ResponseRejectedError as exc:
        failed = with_user.with_turn("agent", f"The reply could not be applied: {exc}", clock)
        return CommandResult(failed, (), response, tuple(attempts), error=f"RESPONSE_REJECTED: {exc}")

    return CommandResult(new_state, events, response, tuple(attempts))


def _counting_clock() -> Clock:
    tick = 0.0

    def clock() -> float:
        nonlocal tick
        tick += 1.0
        return tick

    return clock


def replay_transcript(
    turns: list[dict],
    state: Optional[SessionState] = None,
    clock: Optional[Clock] = None,
) -> tuple[SessionState, list[CommandResult]]:
    """Re-run a recorded session against its canned replies, in order.

    Uses a counting clock by default so repeat runs are byte-identical
    once serialized.
    """
    clock = clock or _counting_clock()
    if state is None:
        state = SessionState(video_url="bundled://video", video_duration_ms=60_000)
    client = MockModelClient([t["rawResponse"] for t in turns])
    results: list[CommandResult] = []
    for turn in turns:
        result = run_command(state, turn["command"], client, clock=clock)
        results.append(result)
        state = result.state
    return state, results
