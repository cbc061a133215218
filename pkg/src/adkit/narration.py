"""Narration planning: speech-rate fitting, preview synthesis, track assembly.

Durations are estimated from word counts at a configurable speaking rate,
then narration is sped up by a bounded rate factor when a cue's slot is too
small. Synthesized clips are mono PCM; the bundled test backend emits
silence of exactly the predicted length so every downstream stage is
deterministic.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .script import ADScript, Cue, PLACEHOLDER_TEXT, blocking, count_words, validate

INTERCHANGE_SAMPLE_RATE = 24_000


class NarrationError(ValueError):
    """Planning or synthesis failure with a stable error code."""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


@dataclass(frozen=True)
class SpeechRateModel:
    words_per_minute: float = 100.0
    max_rate_factor: float = 2.0

    def __post_init__(self) -> None:
        if self.words_per_minute <= 0:
            raise ValueError("speaking rate must be positive")
        if self.max_rate_factor < 1.0:
            raise ValueError("maximum rate factor cannot be below 1.0")


@dataclass(frozen=True)
class MixPlan:
    """How narration sits over program audio while it plays."""

    ducking_level: float = 0.2
    narration_gain: float = 0.8
    ramp_ms: int = 100

    def __post_init__(self) -> None:
        if not 0.0 <= self.ducking_level <= 1.0:
            raise ValueError("ducking level is a gain in [0, 1]")
        if self.narration_gain < 0.0:
            raise ValueError("narration gain cannot be negative")
        if self.ramp_ms < 0:
            raise ValueError("ramp must be non-negative")


def required_duration(text: str, model: SpeechRateModel = SpeechRateModel()) -> int:
    """Estimated narration length in ms at the model's base speaking rate."""
    return round(count_words(text) * 60_000 / model.words_per_minute)


@dataclass(frozen=True)
class CuePlan:
    required_ms: int
    slot_ms: int
    rate_factor: float
    fits: bool


def plan_cue(cue: Cue, model: SpeechRateModel = SpeechRateModel()) -> CuePlan:
    """Fit a cue's narration into its slot.

    The rate factor is exactly 1.0 whenever the estimate already fits;
    otherwise it grows just enough, clamped to the model maximum. fits
    reports whether even the clamped rate is enough.
    """
    slot = cue.duration_ms
    required = required_duration(cue.text, model)
    if required <= slot:
        rate = 1.0
    else:
        rate = min(required / slot, model.max_rate_factor)
    fits = required <= slot * model.max_rate_factor
    return CuePlan(required_ms=required, slot_ms=slot, rate_factor=rate, fits=fits)


@dataclass(frozen=True)
class AudioClip:
    """Mono float PCM in [-1, 1]."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        if self.samples.ndim != 1:
            raise ValueError("clips are mono")
        if self.sample_rate <= 0:
            raise ValueError("sample rate must be positive")

    @property
    def duration_ms(self) -> int:
        return round(self.samples.size * 1000 / self.sample_rate)


class SpeechBackend(abc.ABC):
    """Text-to-speech provider; rate_factor > 1 means proportionally faster."""

    @abc.abstractmethod
    def synthesize(self, text: str, rate_factor: float = 1.0, voice: Optional[str] = None) -> AudioClip:
        raise NotImplementedError


class SilenceBackend(SpeechBackend):
    """Deterministic stand-in: silence lasting exactly the estimate over the rate."""

    def __init__(self, sample_rate: int = INTERCHANGE_SAMPLE_RATE, model: SpeechRateModel = SpeechRateModel()):
        self.sample_rate = sample_rate
        self.model = model

    def synthesize(self, text: str, rate_factor: float = 1.0, voice: Optional[str] = None) -> AudioClip:
        if rate_factor <= 0:
            raise ValueError("rate factor must be positive")
        duration_ms = required_duration(text, self.model) / rate_factor
        frames = round(duration_ms * self.sample_rate / 1000)
        return AudioClip(samples=np.zeros(frames), sample_rate=self.sample_rate)


@dataclass(frozen=True)
class ClipPlacement:
    cue_index: int
    offset_ms: int
    clip: AudioClip
    plan: CuePlan

    @property
    def end_ms(self) -> int:
        return self.offset_ms + self.clip.duration_ms


@dataclass(frozen=True)
class DuckingEnvelope:
    """Piecewise-linear program-audio gain: unity outside narration spans,
    the ducking level inside, with linear ramps on each edge."""

    spans: tuple[tuple[int, int], ...]
    ducking_level: float
    ramp_ms: int

    def _span_points(self, start: int, end: int) -> tuple[list[float], list[float]]:
        return (
            [start - self.ramp_ms, start, end, end + self.ramp_ms],
            [1.0, self.ducking_level, self.ducking_level, 1.0],
        )

    def gain_at(self, ms: float) -> float:
        gain = 1.0
        for start, end in self.spans:
            xp, fp = self._span_points(start, end)
            gain = min(gain, float(np.interp(ms, xp, fp)))
        return gain

    def sample_gains(self, frame_count: int, sample_rate: int) -> np.ndarray:
        """Per-sample gain curve for a buffer of the given length."""
        t = np.arange(frame_count) * (1000.0 / sample_rate)
        gains = np.ones(frame_count)
        for start, end in self.spans:
            xp, fp = self._span_points(start, end)
            gains = np.minimum(gains, np.interp(t, xp, fp))
        return gains


@dataclass(frozen=True)
class PreviewDirective:
    """Everything a player needs to audition one line in place."""

    cue: Cue
    clip: AudioClip
    plan: CuePlan
    actual_ms: int
    envelope: DuckingEnvelope
    mix: MixPlan
    annotations: tuple[str, ...] = ()


def _synthesize_fitting(cue: Cue, backend: SpeechBackend, model: SpeechRateModel,
                        voice: Optional[str] = None) -> tuple[AudioClip, CuePlan]:
    """Synthesize at the planned rate; re-rate and retry once if the clip runs long."""
    plan = plan_cue(cue, model)
    clip = backend.synthesize(cue.text, plan.rate_factor, voice)
    if clip.duration_ms > plan.slot_ms and plan.rate_factor < model.max_rate_factor:
        base_ms = clip.duration_ms * plan.rate_factor
        new_rate = min(base_ms / plan.slot_ms, model.max_rate_factor)
        if new_rate > plan.rate_factor:
            plan = CuePlan(plan.required_ms, plan.slot_ms, new_rate, plan.fits)
            clip = backend.synthesize(cue.text, new_rate, voice)
    return clip, plan


def preview_line(
    cue: Cue,
    backend: SpeechBackend,
    model: SpeechRateModel = SpeechRateModel(),
    mix: MixPlan = MixPlan(),
    voice: Optional[str] = None,
) -> PreviewDirective:
    """Synthesize one cue and describe how to play it over the video segment."""
    if cue.text.strip() == "" or cue.text.strip() == PLACEHOLDER_TEXT:
        raise NarrationError("EMPTY_NARRATION", "cue has no narratable text yet")
    clip, plan = _synthesize_fitting(cue, backend, model, voice)
    envelope = DuckingEnvelope(
        spans=((cue.start_ms, cue.start_ms + max(clip.duration_ms, 1)),),
        ducking_level=mix.ducking_level,
        ramp_ms=mix.ramp_ms,
    )
    annotations = () if plan.fits else ("DOES_NOT_FIT",)
    return PreviewDirective(
        cue=cue,
        clip=clip,
        plan=plan,
        actual_ms=clip.duration_ms,
        envelope=envelope,
        mix=mix,
        annotations=annotations,
    )


@dataclass(frozen=True)
class NarrationTimeline:
    clips: tuple[ClipPlacement, ...]
    envelope: DuckingEnvelope
    mix: MixPlan

    @property
    def unfittable(self) -> tuple[int, ...]:
        return tuple(p.cue_index for p in self.clips if not p.plan.fits)

    @property
    def end_ms(self) -> int:
        return max((p.end_ms for p in self.clips), default=0)


def render_track(
    script: ADScript,
    backend: SpeechBackend,
    model: SpeechRateModel = SpeechRateModel(),
    mix: MixPlan = MixPlan(),
    voice: Optional[str] = None,
) -> NarrationTimeline:
    """Synthesize every cue and assemble clips plus the ducking envelope.

    The script must be free of error-class violations (placeholder or empty
    cues are rejected the same way single-line preview rejects them). Cues
    whose narration cannot fit even at the maximum rate are still rendered,
    just flagged via the timeline's unfittable list.
    """
    problems = blocking(validate(script))
    if problems:
        raise NarrationError("INVALID_SCRIPT", "; ".join(v.message for v in problems))
    placements: list[ClipPlacement] = []
    for index, cue in enumerate(script.cues):
        if cue.text.strip() == "" or cue.text.strip() == PLACEHOLDER_TEXT:
            raise NarrationError("EMPTY_NARRATION", f"cue {index} has no narratable text yet")
        clip, plan = _synthesize_fitting(cue, backend, model, voice)
        placements.append(ClipPlacement(cue_index=index, offset_ms=cue.start_ms, clip=clip, plan=plan))
    envelope = DuckingEnvelope(
        spans=tuple((p.offset_ms, p.offset_ms + max(p.clip.duration_ms, 1)) for p in placements),
        ducking_level=mix.ducking_level,
        ramp_ms=mix.ramp_ms,
    )
    return NarrationTimeline(clips=tuple(placements), envelope=envelope, mix=mix)
