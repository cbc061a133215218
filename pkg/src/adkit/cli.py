"""Command-line front end.

Exit codes: 0 success, 1 domain failure (invalid script, rejected reply,
missing tool), 2 usage error. With --json the machine payload goes to
stdout even when the command fails, so scripts can branch on both.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import __version__, data
from .agent import replay_transcript, ScriptReplaced, SuggestionPending, event_to_json_obj
from .gaps import AudioTrack, SilenceConfig, detect_silence, eligible_gaps, scaffold
from .mixdown import ToolUnavailableError, default_tool_for, export_video, timeline_to_samples, write_wav_int16
from .narration import NarrationError, SilenceBackend, render_track
from .script import (
    ADScript,
    ScriptParseError,
    blocking,
    parse_script,
    serialize_script,
    validate,
    violations_to_json,
)


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _echo_violations(violations, as_json: bool) -> None:
    if as_json:
        click.echo(violations_to_json(violations), nl=False)
        return
    for v in violations:
        where = f" cue {v.cue_index}" if v.cue_index is not None else ""
        click.echo(f"{v.severity.upper()} {v.rule.value}{where}: {v.message}")


def _load_script_arg(path: str, duration_ms=None) -> ADScript:
    try:
        return parse_script(_read_text(path), duration_ms)
    except ScriptParseError as exc:
        _echo_violations(exc.violations, as_json=False)
        raise SystemExit(1)


def _transcript_turns(source: str) -> list[dict]:
    """A bundled transcript name, or a path to a JSONL file of turns."""
    if source in data.transcript_names():
        return data.load_transcript(source)
    path = Path(source)
    if not path.exists():
        raise click.UsageError(f"no bundled transcript or file named {source!r}")
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]


@click.group()
@click.version_option(version=__version__, prog_name="adkit")
def main() -> None:
    """Author, check, and render timed audio-description scripts."""


# -- validate ----------------------------------------------------------------


@main.command("validate")
@click.argument("script_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--duration", type=float, default=None, help="Video duration in seconds.")
@click.option("--json", "as_json", is_flag=True, help="Emit violations as JSON.")
def validate_cmd(script_path: str, duration: float, as_json: bool) -> None:
    """Check a script document against the authoring rules."""
    duration_ms = round(duration * 1000) if duration is not None else None
    try:
        script = parse_script(_read_text(script_path), duration_ms)
    except ScriptParseError as exc:
        _echo_violations(exc.violations, as_json)
        raise SystemExit(1)
    found = validate(script, duration_ms)
    _echo_violations(found, as_json)
    if blocking(found):
        raise SystemExit(1)
    if not found and not as_json:
        click.echo("ok")


# -- gaps --------------------------------------------------------------------


@main.command()
@click.argument("audio_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--script", "script_path", type=click.Path(exists=True, dir_okay=False),
              help="Existing script whose cues block out occupied time.")
@click.option("--window-ms", type=int, default=50, show_default=True)
@click.option("--threshold-db", type=float, default=-40.0, show_default=True)
@click.option("--merge-ms", type=int, default=200, show_default=True)
@click.option("--min-gap-ms", type=int, default=3000, show_default=True)
@click.option("--scaffold", "emit_scaffold", is_flag=True,
              help="Print a placeholder script instead of the gap list.")
@click.option("--json", "as_json", is_flag=True)
def gaps(audio_path: str, script_path: str, window_ms: int, threshold_db: float,
         merge_ms: int, min_gap_ms: int, emit_scaffold: bool, as_json: bool) -> None:
    """Find silent stretches of a WAV that can hold description."""
    track = AudioTrack.from_wav(audio_path)
    config = SilenceConfig(window_ms=window_ms, threshold_db=threshold_db,
                           merge_tolerance_ms=merge_ms, min_gap_ms=min_gap_ms)
    script = _load_script_arg(script_path) if script_path else ADScript()
    silences = detect_silence(track, config)
    slots = eligible_gaps(silences, script, config)
    if emit_scaffold:
        doc = scaffold(slots)
        click.echo(serialize_script(doc))
        return
    if as_json:
        click.echo(json.dumps([g.to_json_obj() for g in slots], indent=2))
        return
    for g in slots:
        click.echo(f"{g.start_ms} {g.end_ms} ({g.duration_ms} ms)")
    if not slots:
        click.echo("no eligible gaps")


# -- generate ----------------------------------------------------------------


@main.command()
@click.option("--mode", type=click.Choice(["full", "gaps", "none"]), default="full", show_default=True)
@click.option("--mock", "mock_transcript", help="Bundled transcript name or JSONL path (full mode).")
@click.option("--audio", "audio_path", type=click.Path(exists=True, dir_okay=False),
              help="WAV to scan for silence (gaps mode).")
@click.option("--duration", type=float, default=None, help="Video duration in seconds.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="Write the script here instead of stdout.")
def generate(mode: str, mock_transcript: str, audio_path: str, duration: float, out_path: str) -> None:
    """Produce a starting script: agent-driven, gap placeholders, or empty."""
    duration_ms = round(duration * 1000) if duration is not None else None
    if mode == "none":
        text = ""
    elif mode == "gaps":
        if not audio_path:
            raise click.UsageError("--audio is required with --mode gaps")
        track = AudioTrack.from_wav(audio_path)
        slots = eligible_gaps(detect_silence(track))
        text = serialize_script(scaffold(slots, duration_ms))
    else:
        if not mock_transcript:
            raise click.UsageError("--mock is required with --mode full (no live model backend)")
        turns = _transcript_turns(mock_transcript)
        state, results = replay_transcript(turns)
        failed = [r for r in results if not r.ok]
        if failed:
            click.echo(f"replay failed: {failed[0].error}", err=True)
            raise SystemExit(1)
        text = serialize_script(state.script)
    if out_path:
        Path(out_path).write_text(text + ("\n" if text else ""), encoding="utf-8")
        click.echo(f"wrote {out_path}")
    else:
        click.echo(text)


# -- narrate -------------------------------------------------------------------


@main.command()
@click.argument("script_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--backend", type=click.Choice(["test"]), default="test", show_default=True,
              help="Speech backend; 'test' emits correctly-timed silence.")
@click.option("--sample-rate", type=int, default=24_000, show_default=True)
@click.option("--duration", type=float, default=None, help="Video duration in seconds.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), help="Write the AD track WAV here.")
@click.option("--json", "as_json", is_flag=True, help="Emit the timeline as JSON.")
def narrate(script_path: str, backend: str, sample_rate: int, duration: float,
            out_path: str, as_json: bool) -> None:
    """Plan (and optionally render) the narration track for a script."""
    duration_ms = round(duration * 1000) if duration is not None else None
    script = _load_script_arg(script_path, duration_ms)
    try:
        timeline = render_track(script, SilenceBackend(sample_rate))
    except NarrationError as exc:
        click.echo(f"{exc.code}: {exc}", err=True)
        raise SystemExit(1)
    if out_path:
        samples = timeline_to_samples(timeline, sample_rate, duration_ms or 0)
        write_wav_int16(out_path, samples, sample_rate)
    if as_json:
        payload = {
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
            "sampleRate": sample_rate,
        }
        click.echo(json.dumps(payload, indent=2))
    else:
        for p in timeline.clips:
            flag = "" if p.plan.fits else "  DOES_NOT_FIT"
            click.echo(f"cue {p.cue_index}: {p.offset_ms}..{p.end_ms} rate {p.plan.rate_factor:.2f}{flag}")
        if out_path:
            click.echo(f"wrote {out_path}")


# -- replay --------------------------------------------------------------------


@main.command()
@click.argument("transcript")
@click.option("--duration", type=float, default=60.0, show_default=True, help="Video duration in seconds.")
@click.option("--json", "as_json", is_flag=True)
def replay(transcript: str, duration: float, as_json: bool) -> None:
    """Re-run a recorded session and print the outcome of each turn."""
    from .agent import SessionState

    turns = _transcript_turns(transcript)
    state = SessionState(video_url="bundled://video", video_duration_ms=round(duration * 1000))
    final, results = replay_transcript(turns, state=state)
    if as_json:
        payload = {
            "turns": [
                {
                    "command": turn["command"],
                    "ok": result.ok,
                    "error": result.error,
                    "events": [event_to_json_obj(e) for e in result.events],
                }
                for turn, result in zip(turns, results)
            ],
            "finalScript": serialize_script(final.script),
        }
        click.echo(json.dumps(payload, indent=2))
    else:
        for turn, result in zip(turns, results):
            status = "ok" if result.ok else f"FAILED ({result.error})"
            click.echo(f"> {turn['command']}")
            click.echo(f"  {status}: " + ", ".join(e.kind for e in result.events))
        click.echo("")
        click.echo(serialize_script(final.script))
    if any(not r.ok for r in results):
        raise SystemExit(1)


# -- serve ---------------------------------------------------------------------


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8321, show_default=True)
@click.option("--store", "store_dir", type=click.Path(file_okay=False), default="./adkit-projects",
              show_default=True)
def serve(host: str, port: int, store_dir: str) -> None:
    """Run the HTTP service over a directory-backed project store."""
    import uvicorn

    from .service import FileProjectStore, create_app

    app = create_app(FileProjectStore(store_dir))
    uvicorn.run(app, host=host, port=port)


# -- export --------------------------------------------------------------------


@main.command()
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@click.argument("out", type=click.Path(dir_okay=False))
@click.option("--script", "script_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--duration", type=float, default=None, help="Video duration in seconds.")
def export(source: str, out: str, script_path: str, duration: float) -> None:
    """Mix the narration track into a program file."""
    duration_ms = round(duration * 1000) if duration is not None else None
    script = _load_script_arg(script_path, duration_ms)
    try:
        timeline = render_track(script, SilenceBackend())
    except NarrationError as exc:
        click.echo(f"{exc.code}: {exc}", err=True)
        raise SystemExit(1)
    tool = default_tool_for(source)
    try:
        result = export_video(source, timeline, out, tool)
    except ToolUnavailableError as exc:
        click.echo(f"TOOL_UNAVAILABLE: {exc}", err=True)
        raise SystemExit(1)
    click.echo(f"wrote {result} via {type(tool).__name__}")


if __name__ == "__main__":
    main()
