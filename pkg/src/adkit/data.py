"""Access to the bundled fixture corpus, transcripts, and response corpus."""

from __future__ import annotations

import json
from importlib import resources
from typing import Iterator


def _data_root():
    return resources.files("adkit") / "data"


def corpus_names() -> list[str]:
    """Sorted stem names of the bundled script documents."""
    corpus = _data_root() / "corpus"
    return sorted(p.name.removesuffix(".adscript") for p in corpus.iterdir() if p.name.endswith(".adscript"))


def load_corpus_document(name: str) -> str:
    """Raw bytes of one bundled document, decoded as UTF-8 (endings intact)."""
    path = _data_root() / "corpus" / f"{name}.adscript"
    return path.read_bytes().decode("utf-8")


def iter_corpus() -> Iterator[tuple[str, str]]:
    for name in corpus_names():
        yield name, load_corpus_document(name)


def transcript_names() -> list[str]:
    trans = _data_root() / "transcripts"
    return sorted(p.name.removesuffix(".jsonl") for p in trans.iterdir() if p.name.endswith(".jsonl"))


def load_transcript(name: str) -> list[dict]:
    """A recorded session: ordered turns of {command, rawResponse, appliedEvents}."""
    path = _data_root() / "transcripts" / f"{name}.jsonl"
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]


def load_response_corpus() -> list[dict]:
    """The labeled replay corpus of command/response pairs."""
    path = _data_root() / "responses.jsonl"
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]
