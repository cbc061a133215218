"""Screen-reader playback announcements with stable wording."""

from __future__ import annotations

_TEMPLATES = {
    "paused": "Paused at {}",
    "resumed": "Playing at {}",
    "jumpedForward": "Forward to {}",
    "jumpedBack": "Back to {}",
}

PLAYBACK_KINDS = tuple(_TEMPLATES)


def format_position(ms: int) -> str:
    """Spoken form of a position: seconds alone under a minute ("45 seconds"),
    minute-and-second above ("1 min 34 sec"). Rounds to the nearest second."""
    if ms < 0:
        raise ValueError("position cannot be negative")
    total = (ms + 500) // 1000
    if total < 60:
        return f"{total} second" if total == 1 else f"{total} seconds"
    return f"{total // 60} min {total % 60} sec"


def announce_playback(kind: str, position_ms: int) -> str:
    if kind not in _TEMPLATES:
        raise ValueError(f"unknown playback kind: {kind}")
    return _TEMPLATES[kind].format(format_position(position_ms))
