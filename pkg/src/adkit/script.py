"""Timed description scripts: the two-line cue format and everything that edits it.

A script document is a sequence of segments separated by exactly one blank
line.  Each segment is two physical lines: a timestamp range such as
``0 min 8 sec to 0 min 12 sec`` followed by one line of description text.
Times are kept internally as integer milliseconds; the textual form is
whole-second.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Literal, Optional, Sequence, Union

MIN_GAP_MS = 1000
WORDS_PER_SECOND = 3
PLACEHOLDER_TEXT = "[describe]"

# Lenient: "min"/"mins", "sec"/"secs"/"s", arbitrary spacing. Canonical
# output is always "X min Y sec".
_TIMECODE_RE = re.compile(r"^\s*(\d+)\s*min(?:ute)?s?\s+(\d+)\s*s(?:ec(?:ond)?s?)?\s*$", re.IGNORECASE)
_RANGE_SPLIT_RE = re.compile(r"\s+to\s+", re.IGNORECASE)


def parse_timecode(token: str) -> int:
    """Parse a single "X min Y sec" token into milliseconds.

    Raises ValueError if the token does not look like a timecode.
    """
    m = _TIMECODE_RE.match(token)
    if not m:
        raise ValueError(f"not a timecode: {token!r}")
    minutes, seconds = int(m.group(1)), int(m.group(2))
    return (minutes * 60 + seconds) * 1000


def format_timecode(ms: int) -> str:
    """Canonical textual form, rounded to the nearest whole second (ties up)."""
    if ms < 0:
        raise ValueError("timecode must be non-negative")
    total_seconds = (ms + 500) // 1000
    return f"{total_seconds // 60} min {total_seconds % 60} sec"


def _parse_range_line(line: str) -> Optional[tuple[int, int]]:
    parts = _RANGE_SPLIT_RE.split(line.strip())
    if len(parts) != 2:
        return None
    try:
        return parse_timecode(parts[0]), parse_timecode(parts[1])
    except ValueError:
        return None


def _looks_like_range_line(line: str) -> bool:
    """Heuristic for error wording: was this an attempted timestamp line?"""
    lowered = line.lower()
    return bool(re.search(r"\d", line)) and " to " in f" {lowered} " and ("min" in lowered or "sec" in lowered)


class Rule(str, Enum):
    MIN_GAP = "MIN_GAP"
    OVERLAP = "OVERLAP"
    DURATION_EXCEEDED = "DURATION_EXCEEDED"
    EMPTY_TEXT = "EMPTY_TEXT"
    WORD_BUDGET = "WORD_BUDGET"
    UNSORTED = "UNSORTED"
    MALFORMED_TIMESTAMP = "MALFORMED_TIMESTAMP"


# WORD_BUDGET annotates; everything else blocks.
_WARNING_RULES = frozenset({Rule.WORD_BUDGET})


@dataclass(frozen=True)
class Violation:
    rule: Rule
    message: str
    cue_index: Optional[int] = None
    line: Optional[int] = None

    @property
    def severity(self) -> str:
        return "warning" if self.rule in _WARNING_RULES else "error"

    def to_json_obj(self) -> dict:
        return {
            "rule": self.rule.value,
            "message": self.message,
            "cueIndex": self.cue_index,
            "line": self.line,
            "severity": self.severity,
        }


def blocking(violations: Iterable[Violation]) -> list[Violation]:
    """Just the error-class violations (warnings never block a write)."""
    return [v for v in violations if v.severity == "error"]


class ScriptParseError(ValueError):
    """Raised when a document cannot be parsed; carries per-line violations."""

    def __init__(self, violations: Sequence[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(v.message for v in violations))


@dataclass(frozen=True)
class Cue:
    """One description segment. Text is a single physical line."""

    start_ms: int
    end_ms: int
    text: str

    def __post_init__(self) -> None:
        if self.start_ms < 0:
            raise ValueError("cue start must be non-negative")
        if self.end_ms <= self.start_ms:
            raise ValueError("cue start must be before its end")
        if "\n" in self.text or "\r" in self.text:
            raise ValueError("cue text must be a single line")
        object.__setattr__(self, "text", self.text.rstrip())

    @property
    def duration_ms(self) -> int:
        return self.end_ms - self.start_ms

    def with_text(self, text: str) -> "Cue":
        return replace(self, text=text)

    def with_times(self, start_ms: int, end_ms: int) -> "Cue":
        return replace(self, start_ms=start_ms, end_ms=end_ms)

    def range_line(self) -> str:
        return f"{format_timecode(self.start_ms)} to {format_timecode(self.end_ms)}"


@dataclass(frozen=True)
class ADScript:
    """An ordered collection of cues plus the video bound they describe.

    Construction is permissive (the validator must be able to see broken
    scripts); parse_script and apply_edit only ever return scripts whose
    cues are strictly ascending by start.
    """

    cues: tuple[Cue, ...] = ()
    video_duration_ms: Optional[int] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "cues", tuple(self.cues))

    def __len__(self) -> int:
        return len(self.cues)

    def line_count(self) -> int:
        """Physical line count of the serialized document."""
        return 3 * len(self.cues) - 1 if self.cues else 0

    def to_json_obj(self) -> list[dict]:
        return [{"startMs": c.start_ms, "endMs": c.end_ms, "text": c.text} for c in self.cues]

    @classmethod
    def from_json_obj(cls, obj: Sequence[dict], video_duration_ms: Optional[int] = None) -> "ADScript":
        cues = tuple(Cue(int(o["startMs"]), int(o["endMs"]), str(o["text"])) for o in obj)
        return cls(cues=cues, video_duration_ms=video_duration_ms)


def parse_script(text: str, video_duration_ms: Optional[int] = None) -> ADScript:
    """Parse a document into an ADScript, or raise ScriptParseError.

    Lenient about timecode spelling and extra blank lines; strict about
    structure. All structural problems are collected before raising so a
    caller sees every bad line at once.
    """
    lines = text.replace("\r\n", "\n").replace("\r", "\n").split("\n")
    violations: list[Violation] = []
    cues: list[tuple[int, Cue]] = []  # (source line number, cue)

    block: list[tuple[int, str]] = []  # (1-based line number, content)

    def flush() -> None:
        if not block:
            return
        first_no, first_line = block[0]
        rng = _parse_range_line(first_line)
        if rng is None:
            if _looks_like_range_line(first_line):
                violations.append(Violation(Rule.MALFORMED_TIMESTAMP, f"line {first_no}: malformed timestamp line", line=first_no))
            else:
                violations.append(Violation(Rule.MALFORMED_TIMESTAMP, f"line {first_no}: text line with no timestamp line", line=first_no))
            return
        start_ms, end_ms = rng
        if len(block) == 1:
            violations.append(Violation(Rule.MALFORMED_TIMESTAMP, f"line {first_no}: dangling timestamp line with no text", line=first_no))
            return
        for extra_no, _ in block[2:]:
            violations.append(Violation(Rule.MALFORMED_TIMESTAMP, f"line {extra_no}: text line with no timestamp line", line=extra_no))
        if end_ms <= start_ms:
            violations.append(Violation(Rule.MALFORMED_TIMESTAMP, f"line {first_no}: start must be before end", line=first_no))
            return
        cues.append((first_no, Cue(start_ms, end_ms, block[1][1].rstrip())))

    for number, raw in enumerate(lines, start=1):
        if raw.strip() == "":
            flush()
            block = []
        else:
            block.append((number, raw))
    flush()

    cues.sort(key=lambda item: (item[1].start_ms, item[0]))
    for (line_a, a), (line_b, b) in zip(cues, cues[1:]):
        if a.start_ms == b.start_ms:
            violations.append(Violation(
                Rule.UNSORTED,
                f"line {line_b}: cue shares its start time with the cue at line {line_a}",
                line=line_b,
            ))

    if violations:
        raise ScriptParseError(violations)
    return ADScript(cues=tuple(c for _, c in cues), video_duration_ms=video_duration_ms)


def serialize_script(script: ADScript) -> str:
    """Canonical document form: two-line segments, one blank line between."""
    return "\n\n".join(f"{cue.range_line()}\n{cue.text}" for cue in script.cues)


def normalize_script_text(text: str) -> str:
    """Whitespace- and spelling-normalize a document without parsing it.

    Line endings become "\\n", trailing whitespace is dropped, blank-line
    runs collapse to single separators, and any line that reads as a
    timestamp range is re-emitted in canonical form. For a valid document
    this equals serialize_script(parse_script(text)).
    """
    lines = [ln.rstrip() for ln in text.replace("\r\n", "\n").replace("\r", "\n").split("\n")]
    out: list[str] = []
    for ln in lines:
        if ln == "":
            if out and out[-1] != "":
                out.append("")
            continue
        rng = _parse_range_line(ln)
        if rng is not None:
            ln = f"{format_timecode(rng[0])} to {format_timecode(rng[1])}"
        out.append(ln)
    while out and out[-1] == "":
        out.pop()
    return "\n".join(out)


def word_budget(gap_ms: int) -> int:
    """How many words fit in a slot: floor(seconds * 3)."""
    if gap_ms <= 0:
        raise ValueError("slot duration must be positive")
    return gap_ms * WORDS_PER_SECOND // 1000


def count_words(text: str) -> int:
    """Whitespace tokens that contain at least one alphanumeric character."""
    return sum(1 for token in text.split() if any(ch.isalnum() for ch in token))


def validate(script: ADScript, video_duration_ms: Optional[int] = None) -> list[Violation]:
    """Check the closed rule set; returns violations ordered by cue index.

    Adjacent-pair problems report at most one violation per pair (UNSORTED
    beats OVERLAP beats MIN_GAP) and are attributed to the later cue.
    """
    duration = video_duration_ms if video_duration_ms is not None else script.video_duration_ms
    found: list[Violation] = []
    for i, cue in enumerate(script.cues):
        if i > 0:
            prev = script.cues[i - 1]
            if cue.start_ms <= prev.start_ms:
                found.append(Violation(Rule.UNSORTED, f"cue {i} starts at or before cue {i - 1}", cue_index=i))
            elif cue.start_ms < prev.end_ms:
                found.append(Violation(Rule.OVERLAP, f"cue {i} overlaps cue {i - 1}", cue_index=i))
            elif cue.start_ms - prev.end_ms < MIN_GAP_MS:
                found.append(Violation(
                    Rule.MIN_GAP,
                    f"cue {i} starts {cue.start_ms - prev.end_ms} ms after cue {i - 1} ends; at least {MIN_GAP_MS} ms required",
                    cue_index=i,
                ))
        if cue.text.strip() == "":
            found.append(Violation(Rule.EMPTY_TEXT, f"cue {i} has no text", cue_index=i))
        else:
            budget = word_budget(cue.duration_ms)
            words = count_words(cue.text)
            if words > budget:
                found.append(Violation(
                    Rule.WORD_BUDGET,
                    f"cue {i} has {words} words; its {cue.duration_ms} ms slot allows about {budget}",
                    cue_index=i,
                ))
        if duration is not None and cue.end_ms > duration:
            found.append(Violation(Rule.DURATION_EXCEEDED, f"cue {i} ends after the video ends", cue_index=i))
    found.sort(key=lambda v: (v.cue_index if v.cue_index is not None else -1))
    return found


# ---------------------------------------------------------------------------
# Edits


@dataclass(frozen=True)
class InsertCue:
    cue: Cue


@dataclass(frozen=True)
class UpdateText:
    cue_index: int
    text: str


@dataclass(frozen=True)
class Retime:
    cue_index: int
    start_ms: int
    end_ms: int


@dataclass(frozen=True)
class DeleteCue:
    cue_index: int


@dataclass(frozen=True)
class GlobalSubstitute:
    """Replace whole-word occurrences of any source phrase, case-insensitively.

    The replacement keeps its first letter capitalized when the matched
    phrase opened a sentence; elsewhere it is used verbatim.
    """

    sources: tuple[str, ...]
    replacement: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "sources", tuple(self.sources))
        if not self.sources or any(not s.strip() for s in self.sources):
            raise ValueError("substitution sources must be non-empty phrases")


ScriptEdit = Union[InsertCue, UpdateText, Retime, DeleteCue, GlobalSubstitute]

_SENTENCE_END = ".!?"


def _begins_sentence(text: str, at: int) -> bool:
    i = at - 1
    while i >= 0 and (text[i].isspace() or text[i] in "\"'()[]"):
        i -= 1
    return i < 0 or text[i] in _SENTENCE_END


def substitute_text(text: str, sources: Sequence[str], replacement: str) -> tuple[str, int]:
    """Apply a whole-word, case-insensitive phrase substitution to one line.

    Returns the new text and the number of replacements made.
    """
    alternatives = sorted((s.strip() for s in sources), key=len, reverse=True)
    pattern = re.compile(
        r"(?<![0-9A-Za-z])(?:" + "|".join(re.escape(s) for s in alternatives) + r")(?![0-9A-Za-z])",
        re.IGNORECASE,
    )
    count = 0

    def repl(m: re.Match) -> str:
        nonlocal count
        count += 1
        if _begins_sentence(text, m.start()) and replacement:
            return replacement[0].upper() + replacement[1:]
        return replacement

    return pattern.sub(repl, text), count


def _checked_ordering(cues: Sequence[Cue]) -> tuple[Cue, ...]:
    ordered = tuple(sorted(cues, key=lambda c: c.start_ms))
    for a, b in zip(ordered, ordered[1:]):
        if a.start_ms == b.start_ms:
            raise ValueError(f"two cues would share start time {a.start_ms} ms")
    return ordered


def apply_edit(script: ADScript, edit: ScriptEdit) -> tuple[ADScript, list[Violation]]:
    """Pure edit application; returns the new script plus its validation.

    Raises ValueError for out-of-range indexes, Retime with start >= end,
    and edits that would give two cues the same start time.
    """
    cues = list(script.cues)

    def check_index(i: int) -> None:
        if not 0 <= i < len(cues):
            raise ValueError(f"cue index {i} out of range (script has {len(cues)} cues)")

    if isinstance(edit, InsertCue):
        out = _checked_ordering(cues + [edit.cue])
    elif isinstance(edit, UpdateText):
        check_index(edit.cue_index)
        cues[edit.cue_index] = cues[edit.cue_index].with_text(edit.text)
        out = tuple(cues)
    elif isinstance(edit, Retime):
        check_index(edit.cue_index)
        cues[edit.cue_index] = cues[edit.cue_index].with_times(edit.start_ms, edit.end_ms)
        out = _checked_ordering(cues)
    elif isinstance(edit, DeleteCue):
        check_index(edit.cue_index)
        del cues[edit.cue_index]
        out = tuple(cues)
    elif isinstance(edit, GlobalSubstitute):
        out = tuple(
            cue.with_text(substitute_text(cue.text, edit.sources, edit.replacement)[0])
            for cue in cues
        )
    else:
        raise TypeError(f"unknown edit type: {type(edit).__name__}")

    new_script = replace(script, cues=out)
    return new_script, validate(new_script)


# ---------------------------------------------------------------------------
# Diff


ChangeKind = Literal["added", "removed", "text-changed", "retimed"]


@dataclass(frozen=True)
class ChangeRecord:
    kind: ChangeKind
    old_index: Optional[int]
    new_index: Optional[int]
    old_cue: Optional[Cue]
    new_cue: Optional[Cue]

    def to_json_obj(self) -> dict:
        def cue_obj(c: Optional[Cue]) -> Optional[dict]:
            return None if c is None else {"startMs": c.start_ms, "endMs": c.end_ms, "text": c.text}

        return {
            "kind": self.kind,
            "oldIndex": self.old_index,
            "newIndex": self.new_index,
            "oldCue": cue_obj(self.old_cue),
            "newCue": cue_obj(self.new_cue),
        }


def diff(old: ADScript, new: ADScript) -> list[ChangeRecord]:
    """Per-cue change records between two scripts.

    Matching is three-pass: identical cues, then same-times (text-changed),
    then same-text (retimed); the rest are removals and additions. A cue
    whose text and times both changed shows up as a removal plus an
    addition. diff(s, s) is empty.
    """
    old_free = set(range(len(old.cues)))
    new_free = set(range(len(new.cues)))
    pairs: list[tuple[int, int, ChangeKind]] = []

    def match(key, kind: Optional[ChangeKind]) -> None:
        buckets: dict = {}
        for j in sorted(new_free):
            buckets.setdefault(key(new.cues[j]), []).append(j)
        for i in sorted(old_free):
            slot = buckets.get(key(old.cues[i]))
            if slot:
                j = slot.pop(0)
                old_free.discard(i)
                new_free.discard(j)
                if kind is not None:
                    pairs.append((i, j, kind))

    match(lambda c: (c.start_ms, c.end_ms, c.text), None)
    match(lambda c: (c.start_ms, c.end_ms), "text-changed")
    match(lambda c: c.text, "retimed")

    records = [
        ChangeRecord(kind, i, j, old.cues[i], new.cues[j]) for i, j, kind in pairs
    ]
    records.extend(ChangeRecord("removed", i, None, old.cues[i], None) for i in sorted(old_free))
    records.extend(ChangeRecord("added", None, j, None, new.cues[j]) for j in sorted(new_free))

    def position(r: ChangeRecord) -> tuple[int, int]:
        cue = r.new_cue if r.new_cue is not None else r.old_cue
        assert cue is not None
        return (cue.start_ms, 0 if r.kind == "removed" else 1)

    records.sort(key=position)
    return records


def apply_diff(old: ADScript, records: Sequence[ChangeRecord]) -> ADScript:
    """Reconstruct the new script from a diff; inverse check for diff()."""
    keep = [c for i, c in enumerate(old.cues) if i not in {r.old_index for r in records if r.old_index is not None}]
    keep.extend(r.new_cue for r in records if r.new_cue is not None)
    keep.sort(key=lambda c: c.start_ms)
    return replace(old, cues=tuple(keep))


# ---------------------------------------------------------------------------
# Line geometry

LineField = Literal["timestamp", "text", "blank"]


def line_locate(script: ADScript, line_number: int) -> tuple[Optional[int], LineField]:
    """Map a 1-based serialized line number to (cue index, field).

    Blank separator lines belong to no cue and return (None, "blank").
    """
    total = script.line_count()
    if not 1 <= line_number <= total:
        raise ValueError(f"line {line_number} out of range (document has {total} lines)")
    index, offset = divmod(line_number - 1, 3)
    if offset == 0:
        return index, "timestamp"
    if offset == 1:
        return index, "text"
    return None, "blank"


def script_to_json(script: ADScript) -> str:
    return json.dumps(script.to_json_obj(), indent=2) + "\n"


def violations_to_json_obj(violations: Sequence[Violation]) -> list[dict]:
    return [v.to_json_obj() for v in violations]


def violations_to_json(violations: Sequence[Violation]) -> str:
    return json.dumps(violations_to_json_obj(violations), indent=2) + "\n"
