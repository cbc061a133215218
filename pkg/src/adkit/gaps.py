"""Finding silent stretches in program audio and turning them into cue slots."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
from scipy.io import wavfile

from .script import ADScript, Cue, MIN_GAP_MS, PLACEHOLDER_TEXT

_INT_SCALE = {np.dtype(np.int16): 32768.0, np.dtype(np.int32): 2147483648.0}


@dataclass(frozen=True)
class SilenceConfig:
    """Tunables for the silence scan; defaults match the authoring rules."""

    window_ms: int = 50
    threshold_db: float = -40.0
    merge_tolerance_ms: int = 200
    min_gap_ms: int = 3000

    def __post_init__(self) -> None:
        if self.window_ms <= 0 or self.min_gap_ms <= 0 or self.merge_tolerance_ms < 0:
            raise ValueError("window, tolerance, and minimum gap must be sensible durations")


@dataclass(frozen=True)
class Gap:
    start_ms: int
    end_ms: int

    def __post_init__(self) -> None:
        if self.start_ms < 0 or self.end_ms <= self.start_ms:
            raise ValueError("gap must have positive duration")

    @property
    def duration_ms(self) -> int:
        return self.end_ms - self.start_ms

    def to_json_obj(self) -> dict:
        return {"startMs": self.start_ms, "endMs": self.end_ms}


@dataclass(frozen=True)
class AudioTrack:
    """PCM audio held as float samples in [-1, 1]; shape (n,) or (n, channels)."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        if self.sample_rate <= 0:
            raise ValueError("sample rate must be positive")
        if self.samples.ndim not in (1, 2):
            raise ValueError("samples must be 1-D (mono) or 2-D (frames x channels)")

    @property
    def channels(self) -> int:
        return 1 if self.samples.ndim == 1 else self.samples.shape[1]

    @property
    def frame_count(self) -> int:
        return self.samples.shape[0]

    @property
    def duration_ms(self) -> int:
        return round(self.frame_count * 1000 / self.sample_rate)

    def mono(self) -> np.ndarray:
        """Mean downmix across channels, as float64."""
        data = np.asarray(self.samples, dtype=np.float64)
        return data if data.ndim == 1 else data.mean(axis=1)

    @classmethod
    def from_array(cls, samples: np.ndarray, sample_rate: int) -> "AudioTrack":
        arr = np.asarray(samples)
        if arr.dtype in _INT_SCALE:
            arr = arr.astype(np.float64) / _INT_SCALE[arr.dtype]
        elif arr.dtype == np.uint8:
            arr = (arr.astype(np.float64) - 128.0) / 128.0
        else:
            arr = arr.astype(np.float64)
        return cls(samples=arr, sample_rate=sample_rate)

    @classmethod
    def from_wav(cls, path: Union[str, Path]) -> "AudioTrack":
        rate, raw = wavfile.read(str(path))
        return cls.from_array(raw, rate)

    @classmethod
    def from_pcm(cls, data: bytes, sample_rate: int, channels: int = 1, sample_format: str = "int16") -> "AudioTrack":
        """Interpret interleaved raw PCM bytes. Formats: int16, int32, float32."""
        dtype = {"int16": np.int16, "int32": np.int32, "float32": np.float32}.get(sample_format)
        if dtype is None:
            raise ValueError(f"unsupported sample format: {sample_format}")
        if channels <= 0:
            raise ValueError("channel count must be positive")
        arr = np.frombuffer(data, dtype=dtype)
        if channels > 1:
            if arr.size % channels:
                raise ValueError("PCM byte count is not a whole number of frames")
            arr = arr.reshape(-1, channels)
        return cls.from_array(arr, sample_rate)


def _window_rms_db(track: AudioTrack, window_ms: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-window RMS in dBFS plus each window's start/end times in ms.

    The trailing partial window is measured over the samples it actually has.
    """
    mono = track.mono()
    window = max(1, round(track.sample_rate * window_ms / 1000))
    edges = np.arange(0, mono.size, window)
    sums = np.add.reduceat(np.square(mono), edges) if mono.size else np.array([])
    counts = np.minimum(edges + window, mono.size) - edges if mono.size else np.array([])
    with np.errstate(divide="ignore"):
        db = 10.0 * np.log10(np.where(counts > 0, sums / np.maximum(counts, 1), 0.0))
    starts_ms = np.round(edges * 1000 / track.sample_rate).astype(int)
    ends_ms = np.round(np.minimum(edges + window, mono.size) * 1000 / track.sample_rate).astype(int)
    return db, starts_ms, ends_ms


def detect_silence(track: AudioTrack, config: SilenceConfig = SilenceConfig()) -> list[Gap]:
    """Silent intervals of the track, in ms.

    A window is silent when its RMS is at or below the threshold; runs of
    silent windows become intervals, and interruptions no longer than the
    merge tolerance are absorbed into the surrounding run.
    """
    db, starts_ms, ends_ms = _window_rms_db(track, config.window_ms)
    if db.size == 0:
        return []
    silent = db <= config.threshold_db
    raw: list[tuple[int, int]] = []
    run_start: Optional[int] = None
    for i, is_silent in enumerate(silent):
        if is_silent and run_start is None:
            run_start = i
        elif not is_silent and run_start is not None:
            raw.append((int(starts_ms[run_start]), int(ends_ms[i - 1])))
            run_start = None
    if run_start is not None:
        raw.append((int(starts_ms[run_start]), int(ends_ms[-1])))

    merged: list[list[int]] = []
    for start, end in raw:
        if merged and start - merged[-1][1] <= config.merge_tolerance_ms:
            merged[-1][1] = end
        else:
            merged.append([start, end])
    return [Gap(s, e) for s, e in merged]


def _subtract_spans(interval: tuple[int, int], blocked: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    pieces = [interval]
    for b_start, b_end in blocked:
        next_pieces: list[tuple[int, int]] = []
        for start, end in pieces:
            if b_end <= start or b_start >= end:
                next_pieces.append((start, end))
                continue
            if b_start > start:
                next_pieces.append((start, b_start))
            if b_end < end:
                next_pieces.append((b_end, end))
        pieces = next_pieces
    return pieces


def eligible_gaps(
    silences: Sequence[Gap],
    script: ADScript = ADScript(),
    config: SilenceConfig = SilenceConfig(),
) -> list[Gap]:
    """Silence intervals trimmed to usable description slots.

    Every existing cue blocks its own span plus a one-second buffer on each
    side; whatever silence remains must be at least the minimum gap long.
    """
    blocked = [(max(0, c.start_ms - MIN_GAP_MS), c.end_ms + MIN_GAP_MS) for c in script.cues]
    out: list[Gap] = []
    for silence in silences:
        for start, end in _subtract_spans((silence.start_ms, silence.end_ms), blocked):
            if end - start >= config.min_gap_ms:
                out.append(Gap(start, end))
    return out


def scaffold(gaps: Sequence[Gap], video_duration_ms: Optional[int] = None) -> ADScript:
    """Placeholder cues for the given slots, spaced to keep the one-second rule.

    When consecutive slots sit closer than one second, the later cue's start
    is pushed out; slots the push squeezes shut are dropped. The result
    validates with no error-class findings.
    """
    cues: list[Cue] = []
    for gap in sorted(gaps, key=lambda g: g.start_ms):
        start = gap.start_ms
        if cues:
            start = max(start, cues[-1].end_ms + MIN_GAP_MS)
        if start >= gap.end_ms:
            continue
        cues.append(Cue(start, gap.end_ms, PLACEHOLDER_TEXT))
    return ADScript(cues=tuple(cues), video_duration_ms=video_duration_ms)
