// Wire shapes of the adkit session service. Field names match the JSON
// the server emits; nothing here is validated beyond what the UI touches.

export interface ProjectSummary {
  id: string;
  videoUrl: string;
  videoDurationMs: number | null;
  askOnly: boolean;
  scriptText: string;
  playheadMs: number;
  currentLine: number;
  revision: number;
  historyLength: number;
  pendingSuggestion: string | null;
}

export interface Violation {
  rule: string;
  message: string;
  cueIndex: number | null;
  line: number | null;
  severity: "error" | "warning";
}

export interface ScriptPayload {
  text: string;
  revision: number;
  violations: Violation[];
  changed?: boolean;
}

export type PutScriptResult =
  | { ok: true; payload: ScriptPayload }
  | { ok: false; violations: Violation[] };

export type SuggestionResult =
  | { ok: true; project: ProjectSummary }
  | { ok: false; status: number; violations: Violation[]; error?: string };

export interface CueJson {
  startMs: number;
  endMs: number;
  text: string;
}

export interface AgentEvent {
  kind: "TextSpoken" | "TimestampJumped" | "ScriptReplaced" | "SuggestionPending" | "LineMoved";
  text?: string;
  toMs?: number;
  script?: CueJson[];
  changes?: unknown[];
  repaired?: boolean;
  line?: number;
}

export interface WireResponse {
  Command: string;
  TextResponse: string;
  DidChangeTimestamp: boolean;
  NewTimeStamp: number;
  DidChangeScript: boolean;
  NewScript: string;
  DidChangeADLineNumber: boolean;
  ADLineNumber: number;
}

export interface CommandResultPayload {
  ok: boolean;
  error: string | null;
  events: AgentEvent[];
  response: WireResponse | null;
  attempts: number;
  project: ProjectSummary;
}

export type PlaybackKind = "paused" | "resumed" | "jumpedForward" | "jumpedBack";

export interface PlaybackResult {
  announcement: string;
  playheadMs: number;
}

export interface ExportResult {
  outPath: string;
  bytes: number;
  tool: string;
}

export type CommandTier = "conversation" | "generation";
