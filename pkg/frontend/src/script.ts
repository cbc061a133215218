// Just enough understanding of the script dialect to navigate a draft:
// blank-line-separated blocks whose first line is a timestamp range.
// Validation stays on the server; this never rejects anything.

export interface CueSpan {
  index: number;
  startMs: number;
  endMs: number;
  text: string;
  firstLine: number;
  lastLine: number;
}

const PART = /(?:(\d+)\s*min(?:s)?\s+)?(\d+)\s*s(?:ec(?:s)?)?\b/i;
const RANGE = new RegExp(`^\\s*${PART.source}\\s+to\\s+${PART.source}\\s*$`, "i");

export function parseTimestampLine(line: string): { startMs: number; endMs: number } | null {
  const m = RANGE.exec(line);
  if (!m) return null;
  const startMs = (Number(m[1] ?? 0) * 60 + Number(m[2])) * 1000;
  const endMs = (Number(m[3] ?? 0) * 60 + Number(m[4])) * 1000;
  return { startMs, endMs };
}

/** All recognizable cues in a draft, with their 1-based line spans. */
export function cuesInDraft(text: string): CueSpan[] {
  const lines = text.split("\n");
  const cues: CueSpan[] = [];
  let i = 0;
  while (i < lines.length) {
    if ((lines[i] ?? "").trim() === "") {
      i += 1;
      continue;
    }
    const first = i;
    while (i < lines.length && (lines[i] ?? "").trim() !== "") i += 1;
    const stamp = parseTimestampLine(lines[first] ?? "");
    if (stamp) {
      cues.push({
        index: cues.length,
        startMs: stamp.startMs,
        endMs: stamp.endMs,
        text: lines.slice(first + 1, i).join("\n"),
        firstLine: first + 1,
        lastLine: i,
      });
    }
  }
  return cues;
}

/** The cue whose block contains the given 1-based line, if any. */
export function cueAtLine(text: string, line: number): CueSpan | null {
  return cuesInDraft(text).find((c) => c.firstLine <= line && line <= c.lastLine) ?? null;
}
