"""Durable project storage: one directory per project, JSON state, JSONL log.

Layout under the store root:

    {pid}/project.json            current state snapshot
    {pid}/revisions/{n:06}.adscript  full script text per revision
    {pid}/log.jsonl               append-only interaction log

Writers must hold the per-project lock; project.json is replaced atomically
so a crash never leaves a half-written record behind.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterator, Optional


@dataclass(frozen=True)
class ProjectRecord:
    id: str
    video_url: str
    video_duration_ms: Optional[int] = None
    ask_only: bool = False
    script_text: str = ""
    playhead_ms: int = 0
    current_line: int = 1
    revision: int = 0
    history: tuple = ()
    pending_suggestion: Optional[str] = None

    def to_json_obj(self) -> dict:
        return {
            "id": self.id,
            "videoUrl": self.video_url,
            "videoDurationMs": self.video_duration_ms,
            "askOnly": self.ask_only,
            "scriptText": self.script_text,
            "playheadMs": self.playhead_ms,
            "currentLine": self.current_line,
            "revision": self.revision,
            "history": list(self.history),
            "pendingSuggestion": self.pending_suggestion,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "ProjectRecord":
        return cls(
            id=obj["id"],
            video_url=obj["videoUrl"],
            video_duration_ms=obj.get("videoDurationMs"),
            ask_only=obj.get("askOnly", False),
            script_text=obj.get("scriptText", ""),
            playhead_ms=obj.get("playheadMs", 0),
            current_line=obj.get("currentLine", 1),
            revision=obj.get("revision", 0),
            history=tuple(obj.get("history", ())),
            pending_suggestion=obj.get("pendingSuggestion"),
        )


class UnknownProjectError(KeyError):
    pass


class FileProjectStore:
    """Single-process store; per-project locks serialize writers."""

    def __init__(self, root: os.PathLike):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._registry_lock = threading.Lock()
        self._locks: dict[str, threading.RLock] = {}

    # -- locking --------------------------------------------------------

    def lock(self, pid: str) -> threading.RLock:
        with self._registry_lock:
            if pid not in self._locks:
                self._locks[pid] = threading.RLock()
            return self._locks[pid]

    # -- paths ----------------------------------------------------------

    def _dir(self, pid: str) -> Path:
        return self.root / pid

    def _record_path(self, pid: str) -> Path:
        return self._dir(pid) / "project.json"

    def _log_path(self, pid: str) -> Path:
        return self._dir(pid) / "log.jsonl"

    def _revision_path(self, pid: str, revision: int) -> Path:
        return self._dir(pid) / "revisions" / f"{revision:06d}.adscript"

    # -- lifecycle ------------------------------------------------------

    def create(self, video_url: str, video_duration_ms: Optional[int] = None,
               ask_only: bool = False) -> ProjectRecord:
        with self._registry_lock:
            taken = {p.name for p in self.root.iterdir() if p.is_dir()}
            n = 1
            while f"p{n:04d}" in taken:
                n += 1
            pid = f"p{n:04d}"
            (self._dir(pid) / "revisions").mkdir(parents=True)
        record = ProjectRecord(id=pid, video_url=video_url,
                               video_duration_ms=video_duration_ms, ask_only=ask_only)
        self.save(record)
        self._revision_path(pid, 0).write_text("", encoding="utf-8")
        return record

    def list_ids(self) -> list[str]:
        return sorted(p.name for p in self.root.iterdir()
                      if p.is_dir() and (p / "project.json").exists())

    def load(self, pid: str) -> ProjectRecord:
        path = self._record_path(pid)
        if not path.exists():
            raise UnknownProjectError(pid)
        return ProjectRecord.from_json_obj(json.loads(path.read_text(encoding="utf-8")))

    def save(self, record: ProjectRecord) -> None:
        path = self._record_path(record.id)
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(record.to_json_obj(), indent=2), encoding="utf-8")
        os.replace(tmp, path)

    # -- revisions ------------------------------------------------------

    def snapshot_revision(self, record: ProjectRecord) -> None:
        """Write the record's script text as its revision snapshot."""
        path = self._revision_path(record.id, record.revision)
        path.parent.mkdir(exist_ok=True)
        path.write_text(record.script_text, encoding="utf-8")

    def revisions(self, pid: str) -> list[tuple[int, str]]:
        if not self._record_path(pid).exists():
            raise UnknownProjectError(pid)
        rev_dir = self._dir(pid) / "revisions"
        out = []
        for path in sorted(rev_dir.glob("*.adscript")):
            out.append((int(path.stem), path.read_text(encoding="utf-8")))
        return out

    # -- interaction log --------------------------------------------------

    def append_log(self, pid: str, obj: dict) -> None:
        with self._log_path(pid).open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(obj) + "\n")

    def read_log(self, pid: str) -> list[dict]:
        path = self._log_path(pid)
        if not path.exists():
            return []
        return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]

    def read_log_text(self, pid: str) -> str:
        path = self._log_path(pid)
        return path.read_text(encoding="utf-8") if path.exists() else ""
