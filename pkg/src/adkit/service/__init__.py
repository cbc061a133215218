"""Project service: durable store, HTTP app, playback announcements."""

from .announce import PLAYBACK_KINDS, announce_playback, format_position
from .app import create_app
from .replay import replay_log
from .store import FileProjectStore, ProjectRecord, UnknownProjectError

__all__ = [
    "FileProjectStore",
    "PLAYBACK_KINDS",
    "ProjectRecord",
    "UnknownProjectError",
    "announce_playback",
    "create_app",
    "format_position",
    "replay_log",
]
