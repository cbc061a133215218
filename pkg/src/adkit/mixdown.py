"""Mixing narration over program audio and exporting the result.

Export goes through a small tool contract so the heavy lifting is
substitutable: the bundled tool mixes WAV audio in-process with numpy; an
ffmpeg-backed tool implements the same contract for real video containers.

Tool contract
-------------
A media tool receives:
  * the source media file (the program audio/video),
  * the narration timeline (clips with ms offsets, a piecewise-linear gain
    envelope for the program audio, and the narration gain),
  * the output path,
and must produce a single output file whose duration matches the source
and in which program audio follows the envelope while clips play at their
offsets scaled by the narration gain. A timeline with no clips must leave
the audio untouched (the bundled tool copies the source byte for byte).
"""

from __future__ import annotations

import abc
import shutil
import subprocess
import tempfile
from pathlib import Path
from typing import Optional, Union

import numpy as np
from scipy.io import wavfile

from .gaps import AudioTrack
from .narration import NarrationTimeline

PathLike = Union[str, Path]


def write_wav_int16(path: PathLike, samples: np.ndarray, sample_rate: int) -> None:
    """Write float samples in [-1, 1] as 16-bit PCM WAV, hard-clipped."""
    clipped = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 1.0)
    wavfile.write(str(path), sample_rate, (clipped * 32767.0).astype(np.int16))


def clip_to_wav_bytes(samples: np.ndarray, sample_rate: int) -> bytes:
    import io

    buf = io.BytesIO()
    clipped = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 1.0)
    wavfile.write(buf, sample_rate, (clipped * 32767.0).astype(np.int16))
    return buf.getvalue()


def _resample_linear(samples: np.ndarray, from_rate: int, to_rate: int) -> np.ndarray:
    if from_rate == to_rate or samples.size == 0:
        return samples
    duration = samples.size / from_rate
    out_count = max(1, round(duration * to_rate))
    positions = np.arange(out_count) * (from_rate / to_rate)
    return np.interp(positions, np.arange(samples.size), samples)


def timeline_to_samples(timeline: NarrationTimeline, sample_rate: int, total_ms: int = 0) -> np.ndarray:
    """Render the narration clips alone onto a silent canvas.

    The canvas covers at least total_ms so a track can match its video even
    when the last cue ends early.
    """
    end_ms = max(timeline.end_ms, total_ms)
    out = np.zeros(round(end_ms * sample_rate / 1000))
    for placement in timeline.clips:
        clip = _resample_linear(placement.clip.samples, placement.clip.sample_rate, sample_rate)
        at = round(placement.offset_ms * sample_rate / 1000)
        if at >= out.size:
            continue
        clip = clip[: out.size - at]
        out[at : at + clip.size] += clip
    return np.clip(out, -1.0, 1.0)


def mix_timeline_over(track: AudioTrack, timeline: NarrationTimeline) -> np.ndarray:
    """Apply the ducking envelope to the track and add narration clips.

    Output is mono, the track's length and rate; clips running past the end
    are trimmed so the export duration always equals the source duration.
    """
    base = track.mono()
    rate = track.sample_rate
    out = base * timeline.envelope.sample_gains(base.size, rate)
    for placement in timeline.clips:
        clip = _resample_linear(placement.clip.samples, placement.clip.sample_rate, rate)
        at = round(placement.offset_ms * rate / 1000)
        if at >= out.size:
            continue
        clip = clip[: out.size - at]
        out[at : at + clip.size] += timeline.mix.narration_gain * clip
    return out


class MediaTool(abc.ABC):
    """See the module docstring for the contract."""

    @abc.abstractmethod
    def mix(self, source: PathLike, timeline: NarrationTimeline, out: PathLike) -> Path:
        raise NotImplementedError


class WavMixTool(MediaTool):
    """In-process mixer for WAV sources; the default export tool."""

    def mix(self, source: PathLike, timeline: NarrationTimeline, out: PathLike) -> Path:
        source, out = Path(source), Path(out)
        if not timeline.clips:
            shutil.copyfile(source, out)
            return out
        track = AudioTrack.from_wav(source)
        write_wav_int16(out, mix_timeline_over(track, timeline), track.sample_rate)
        return out


class ToolUnavailableError(RuntimeError):
    pass


class FfmpegTool(MediaTool):
    """Drives ffmpeg with the same contract, for real video containers."""

    def __init__(self, binary: str = "ffmpeg"):
        self.binary = binary

    @staticmethod
    def _envelope_expression(timeline: NarrationTimeline) -> str:
        """The envelope as an ffmpeg volume expression over t (seconds)."""
        envelope = timeline.envelope
        expr = "1"
        for start_ms, end_ms in envelope.spans:
            s, e = start_ms / 1000.0, end_ms / 1000.0
            r = envelope.ramp_ms / 1000.0
            duck = envelope.ducking_level
            if r > 0:
                down = f"(1-(1-{duck})*(t-{s - r:.3f})/{r:.3f})"
                up = f"({duck}+(1-{duck})*(t-{e:.3f})/{r:.3f})"
                span = (
                    f"if(between(t,{s - r:.3f},{s:.3f}),{down},"
                    f"if(between(t,{s:.3f},{e:.3f}),{duck},"
                    f"if(between(t,{e:.3f},{e + r:.3f}),{up},1)))"
                )
            else:
                span = f"if(between(t,{s:.3f},{e:.3f}),{duck},1)"
            expr = f"min({expr},{span})"
        return expr

    def build_command(self, source: PathLike, timeline: NarrationTimeline,
                      out: PathLike, clip_paths: list[Path]) -> list[str]:
        cmd = [self.binary, "-y", "-i", str(source)]
        for path in clip_paths:
            cmd += ["-i", str(path)]
        filters = [f"[0:a]volume='{self._envelope_expression(timeline)}':eval=frame[duck]"]
        labels = ["[duck]"]
        for n, placement in enumerate(timeline.clips, start=1):
            gain = timeline.mix.narration_gain
            filters.append(
                f"[{n}:a]volume={gain},adelay={placement.offset_ms}|{placement.offset_ms}[n{n}]"
            )
            labels.append(f"[n{n}]")
        filters.append(f"{''.join(labels)}amix=inputs={len(labels)}:normalize=0:duration=first[mixed]")
        cmd += [
            "-filter_complex", ";".join(filters),
            "-map", "0:v?", "-map", "[mixed]",
            "-c:v", "copy",
            str(out),
        ]
        return cmd

    def mix(self, source: PathLike, timeline: NarrationTimeline, out: PathLike) -> Path:
        if shutil.which(self.binary) is None:
            raise ToolUnavailableError(f"{self.binary} is not installed")
        source, out = Path(source), Path(out)
        if not timeline.clips:
            shutil.copyfile(source, out)
            return out
        with tempfile.TemporaryDirectory(prefix="narration_clips_") as tmp:
            clip_paths = []
            for placement in timeline.clips:
                path = Path(tmp) / f"clip_{placement.cue_index:04d}.wav"
                write_wav_int16(path, placement.clip.samples, placement.clip.sample_rate)
                clip_paths.append(path)
            cmd = self.build_command(source, timeline, out, clip_paths)
            result = subprocess.run(cmd, capture_output=True, text=True)
            if result.returncode != 0:
                raise RuntimeError(f"media tool failed ({result.returncode}): {result.stderr[-500:]}")
        return out


def default_tool_for(source: PathLike) -> MediaTool:
    return WavMixTool() if Path(source).suffix.lower() == ".wav" else FfmpegTool()


def export_video(
    source: PathLike,
    timeline: NarrationTimeline,
    out: PathLike,
    tool: Optional[MediaTool] = None,
) -> Path:
    """Produce the narrated program file via the media-tool contract."""
    tool = tool if tool is not None else default_tool_for(source)
    return tool.mix(source, timeline, out)
