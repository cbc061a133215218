"""HTTP facade over the session engine.

One FastAPI app per store; handlers are synchronous and take the project
lock for the whole request, so each project has a single writer. Every
mutation appends one row to the project's interaction log, which is enough
to rebuild the final script byte for byte (see replay.replay_log).
"""

from __future__ import annotations

import json
import time
from dataclasses import replace
from pathlib import Path
from typing import Callable, Iterator, Literal, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse, Response, StreamingResponse
from pydantic import BaseModel, Field

from .. import __version__
from ..agent import (
    DEFAULT_TEMPERATURE,
    ModelClient,
    ScriptReplaced,
    SessionState,
    SuggestionPending,
    TEMPLATE_VERSION,
    event_to_json_obj,
    run_command,
)
from ..agent.orchestrator import ConversationTurn
from ..mixdown import (
    ToolUnavailableError,
    clip_to_wav_bytes,
    default_tool_for,
    export_video,
    timeline_to_samples,
)
from ..narration import NarrationError, SilenceBackend, render_track
from ..script import ADScript, ScriptParseError, blocking, parse_script, serialize_script, validate, violations_to_json_obj
from .announce import announce_playback
from .store import FileProjectStore, ProjectRecord, UnknownProjectError

ClientFactory = Callable[[str], ModelClient]


class CreateProjectBody(BaseModel):
    videoUrl: str = Field(min_length=1)
    videoDurationMs: Optional[int] = Field(default=None, gt=0)
    askOnly: bool = False


class PutScriptBody(BaseModel):
    text: str


class CommandBody(BaseModel):
    command: str = Field(min_length=1)
    tier: Literal["conversation", "generation"] = "conversation"
    temperature: Optional[float] = Field(default=None, ge=0.0, le=2.0)


class PlaybackBody(BaseModel):
    kind: Literal["paused", "resumed", "jumpedForward", "jumpedBack"]
    positionMs: int = Field(ge=0)


class SettingsBody(BaseModel):
    askOnly: bool


class SuggestionBody(BaseModel):
    accept: bool


class AdTrackBody(BaseModel):
    sampleRate: int = Field(default=24_000, ge=8_000, le=48_000)
    format: Literal["wav", "json"] = "wav"


class ExportBody(BaseModel):
    sourcePath: str = Field(min_length=1)
    outPath: str = Field(min_length=1)


def _to_state(rec: ProjectRecord) -> SessionState:
    script = (
        parse_script(rec.script_text, rec.video_duration_ms)
        if rec.script_text.strip()
        else ADScript(video_duration_ms=rec.video_duration_ms)
    )
    history = tuple(
        ConversationTurn(t["role"], t["text"], t["wallClock"]) for t in rec.history
    )
    return SessionState(
        script=script,
        playhead_ms=rec.playhead_ms,
        current_line=rec.current_line,
        history=history,
        video_url=rec.video_url,
        video_duration_ms=rec.video_duration_ms,
        ask_only=rec.ask_only,
    )


def _merge_state(rec: ProjectRecord, state: SessionState) -> ProjectRecord:
    return replace(
        rec,
        script_text=serialize_script(state.script),
        playhead_ms=state.playhead_ms,
        current_line=state.current_line,
        history=tuple(t.to_json_obj() for t in state.history),
    )


def _summary(rec: ProjectRecord) -> dict:
    obj = rec.to_json_obj()
    obj["historyLength"] = len(obj.pop("history"))
    return obj


def create_app(
    store: FileProjectStore,
    client_factory: Optional[ClientFactory] = None,
    clock: Callable[[], float] = time.time,
) -> FastAPI:
    app = FastAPI(title="adkit", version=__version__)

    @app.exception_handler(UnknownProjectError)
    def _unknown_project(request: Request, exc: UnknownProjectError):
        return JSONResponse(status_code=404, content={"error": "UNKNOWN_PROJECT", "id": str(exc.args[0])})

    def _next_seq(pid: str) -> int:
        return len(store.read_log(pid)) + 1

    # -- projects ---------------------------------------------------------

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__, "templateVersion": TEMPLATE_VERSION}

    @app.post("/projects", status_code=201)
    def create_project(body: CreateProjectBody) -> dict:
        rec = store.create(body.videoUrl, body.videoDurationMs, body.askOnly)
        store.append_log(rec.id, {
            "seq": 1, "kind": "created", "videoUrl": rec.video_url,
            "videoDurationMs": rec.video_duration_ms, "askOnly": rec.ask_only,
        })
        return _summary(rec)

    @app.get("/projects")
    def list_projects() -> dict:
        return {"projects": [_summary(store.load(pid)) for pid in store.list_ids()]}

    @app.get("/projects/{pid}")
    def get_project(pid: str) -> dict:
        return store.load(pid).to_json_obj()

    @app.put("/projects/{pid}/settings")
    def put_settings(pid: str, body: SettingsBody) -> dict:
        with store.lock(pid):
            rec = store.load(pid)
            if rec.ask_only != body.askOnly:
                rec = replace(rec, ask_only=body.askOnly)
                store.save(rec)
                store.append_log(pid, {"seq": _next_seq(pid), "kind": "settings", "askOnly": body.askOnly})
            return _summary(rec)

    # -- script -----------------------------------------------------------

    def _script_payload(rec: ProjectRecord) -> dict:
        script = parse_script(rec.script_text, rec.video_duration_ms) if rec.script_text.strip() else ADScript()
        return {
            "text": rec.script_text,
            "revision": rec.revision,
            "violations": violations_to_json_obj(validate(script, rec.video_duration_ms)),
        }

    @app.get("/projects/{pid}/script")
    def get_script(pid: str) -> dict:
        return _script_payload(store.load(pid))

    @app.put("/projects/{pid}/script")
    def put_script(pid: str, body: PutScriptBody):
        with store.lock(pid):
            rec = store.load(pid)
            try:
                script = parse_script(body.text, rec.video_duration_ms) if body.text.strip() else ADScript()
            except ScriptParseError as exc:
                return JSONResponse(status_code=422, content={"violations": violations_to_json_obj(exc.violations)})
            problems = blocking(validate(script, rec.video_duration_ms))
            if problems:
                return JSONResponse(status_code=422, content={"violations": violations_to_json_obj(problems)})
            canonical = serialize_script(script)
            if canonical == rec.script_text:
                payload = _script_payload(rec)
                payload["changed"] = False
                return payload
            rec = replace(rec, script_text=canonical, revision=rec.revision + 1,
                          current_line=min(rec.current_line, max(script.line_count(), 1)))
            store.save(rec)
            store.snapshot_revision(rec)
            store.append_log(pid, {"seq": _next_seq(pid), "kind": "scriptPut", "text": canonical})
            payload = _script_payload(rec)
            payload["changed"] = True
            return payload

    @app.get("/projects/{pid}/revisions")
    def get_revisions(pid: str) -> dict:
        return {"revisions": [{"revision": n, "text": text} for n, text in store.revisions(pid)]}

    # -- agent commands ----------------------------------------------------

    def _execute_command(pid: str, body: CommandBody):
        if client_factory is None:
            return {"error": "MODEL_UNAVAILABLE",
                    "message": "no model backend is configured on this server"}, None
        with store.lock(pid):
            rec = store.load(pid)
            state = _to_state(rec)
            client = client_factory(body.tier)
            temperature = body.temperature if body.temperature is not None else DEFAULT_TEMPERATURE
            result = run_command(state, body.command, client, clock=clock, temperature=temperature)

            rec = _merge_state(rec, result.state)
            script_changed = any(isinstance(e, ScriptReplaced) for e in result.events)
            if script_changed:
                rec = replace(rec, revision=rec.revision + 1)
            suggestion = next((e for e in result.events if isinstance(e, SuggestionPending)), None)
            if suggestion is not None:
                rec = replace(rec, pending_suggestion=serialize_script(suggestion.script))
            store.save(rec)
            if script_changed:
                store.snapshot_revision(rec)
            store.append_log(pid, {
                "seq": _next_seq(pid),
                "kind": "command",
                "command": body.command,
                "tier": body.tier,
                "attempts": list(result.raw_attempts),
                "ok": result.ok,
                "error": result.error,
                "appliedEvents": [e.kind for e in result.events],
            })
            payload = {
                "ok": result.ok,
                "error": result.error,
                "events": [event_to_json_obj(e) for e in result.events],
                "response": result.response.to_wire() if result.response else None,
                "attempts": len(result.raw_attempts),
                "project": _summary(rec),
            }
            return payload, result

    @app.post("/projects/{pid}/commands")
    def post_command(pid: str, body: CommandBody):
        payload, result = _execute_command(pid, body)
        if result is None:
            return JSONResponse(status_code=503, content=payload)
        return payload

    @app.post("/projects/{pid}/commands/stream")
    def post_command_stream(pid: str, body: CommandBody):
        def generate() -> Iterator[str]:
            payload, result = _execute_command(pid, body)
            if result is not None:
                for event in payload["events"]:
                    yield f"event: {event['kind']}\ndata: {json.dumps(event)}\n\n"
            yield f"event: result\ndata: {json.dumps(payload)}\n\n"

        return StreamingResponse(generate(), media_type="text/event-stream")

    @app.post("/projects/{pid}/suggestion")
    def review_suggestion(pid: str, body: SuggestionBody):
        with store.lock(pid):
            rec = store.load(pid)
            if rec.pending_suggestion is None:
                return JSONResponse(status_code=409, content={"error": "NO_PENDING_SUGGESTION"})
            if body.accept:
                text = rec.pending_suggestion
                script = parse_script(text, rec.video_duration_ms)
                rec = replace(rec, script_text=text, pending_suggestion=None,
                              revision=rec.revision + 1,
                              current_line=min(rec.current_line, max(script.line_count(), 1)))
                store.save(rec)
                store.snapshot_revision(rec)
                store.append_log(pid, {"seq": _next_seq(pid), "kind": "suggestionAccepted", "text": text})
            else:
                rec = replace(rec, pending_suggestion=None)
                store.save(rec)
                store.append_log(pid, {"seq": _next_seq(pid), "kind": "suggestionRejected"})
            return _summary(rec)

    # -- playback ----------------------------------------------------------

    @app.post("/projects/{pid}/playback")
    def playback(pid: str, body: PlaybackBody) -> dict:
        with store.lock(pid):
            rec = store.load(pid)
            position = body.positionMs
            if rec.video_duration_ms is not None:
                position = min(position, rec.video_duration_ms)
            announcement = announce_playback(body.kind, position)
            rec = replace(rec, playhead_ms=position)
            store.save(rec)
            store.append_log(pid, {
                "seq": _next_seq(pid), "kind": "playback",
                "playbackKind": body.kind, "positionMs": position,
                "announcement": announcement,
            })
            return {"announcement": announcement, "playheadMs": position}

    # -- narration and export ------------------------------------------------

    @app.post("/projects/{pid}/ad-track")
    def ad_track(pid: str, body: AdTrackBody):
        rec = store.load(pid)
        script = parse_script(rec.script_text, rec.video_duration_ms) if rec.script_text.strip() else ADScript()
        try:
            timeline = render_track(script, SilenceBackend(body.sampleRate))
        except NarrationError as exc:
            return JSONResponse(status_code=422, content={"error": exc.code, "message": str(exc)})
        if body.format == "json":
            return {
                "clips": [
                    {
                        "cueIndex": p.cue_index,
                        "offsetMs": p.offset_ms,
                        "endMs": p.end_ms,
                        "rateFactor": p.plan.rate_factor,
                        "requiredMs": p.plan.required_ms,
                        "slotMs": p.plan.slot_ms,
                        "fits": p.plan.fits,
                    }
                    for p in timeline.clips
                ],
                "unfittable": list(timeline.unfittable),
                "endMs": timeline.end_ms,
                "duckingLevel": timeline.mix.ducking_level,
                "sampleRate": body.sampleRate,
            }
        samples = timeline_to_samples(timeline, body.sampleRate, rec.video_duration_ms or 0)
        return Response(content=clip_to_wav_bytes(samples, body.sampleRate), media_type="audio/wav")

    @app.post("/projects/{pid}/export")
    def export(pid: str, body: ExportBody):
        rec = store.load(pid)
        source = Path(body.sourcePath)
        if not source.exists():
            return JSONResponse(status_code=422, content={"error": "SOURCE_NOT_FOUND", "path": str(source)})
        script = parse_script(rec.script_text, rec.video_duration_ms) if rec.script_text.strip() else ADScript()
        try:
            timeline = render_track(script, SilenceBackend())
        except NarrationError as exc:
            return JSONResponse(status_code=422, content={"error": exc.code, "message": str(exc)})
        tool = default_tool_for(source)
        try:
            out = export_video(source, timeline, body.outPath, tool)
        except ToolUnavailableError as exc:
            return JSONResponse(status_code=503, content={"error": "TOOL_UNAVAILABLE", "message": str(exc)})
        return {"outPath": str(out), "bytes": Path(out).stat().st_size, "tool": type(tool).__name__}

    # -- logs ---------------------------------------------------------------

    @app.get("/projects/{pid}/logs")
    def get_logs(pid: str) -> PlainTextResponse:
        store.load(pid)  # 404 for unknown ids
        return PlainTextResponse(store.read_log_text(pid), media_type="application/x-ndjson")

    return app
