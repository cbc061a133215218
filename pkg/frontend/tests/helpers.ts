import type { ServiceApi } from "../src/api.js";
import { App, type AppOptions } from "../src/app.js";
import type { StorageLike } from "../src/draft.js";
import type { MediaLike } from "../src/player.js";
import type {
  CommandResultPayload,
  ExportResult,
  PlaybackKind,
  PlaybackResult,
  ProjectSummary,
  PutScriptResult,
  ScriptPayload,
  SuggestionResult,
} from "../src/types.js";

export class FakeMedia implements MediaLike {
  currentTime = 0;
  duration = 60;
  paused = true;
  playCalls = 0;
  pauseCalls = 0;

  play(): void {
    this.paused = false;
    this.playCalls += 1;
  }

  pause(): void {
    this.paused = true;
    this.pauseCalls += 1;
  }
}

export class MemoryStorage implements StorageLike {
  private readonly map = new Map<string, string>();

  getItem(key: string): string | null {
    return this.map.has(key) ? this.map.get(key)! : null;
  }

  setItem(key: string, value: string): void {
    this.map.set(key, value);
  }

  removeItem(key: string): void {
    this.map.delete(key);
  }
}

export function projectSummary(overrides: Partial<ProjectSummary> = {}): ProjectSummary {
  return {
    id: "p0001",
    videoUrl: "local://video",
    videoDurationMs: 60000,
    askOnly: false,
    scriptText: "",
    playheadMs: 0,
    currentLine: 1,
    revision: 0,
    historyLength: 0,
    pendingSuggestion: null,
    ...overrides,
  };
}

export function commandResult(overrides: Partial<CommandResultPayload> = {}): CommandResultPayload {
  return {
    ok: true,
    error: null,
    events: [{ kind: "TextSpoken", text: "Two slippers sit by the bed." }],
    response: {
      Command: "What is on the floor?",
      TextResponse: "Two slippers sit by the bed.",
      DidChangeTimestamp: false,
      NewTimeStamp: 0,
      DidChangeScript: false,
      NewScript: "",
      DidChangeADLineNumber: false,
      ADLineNumber: 0,
    },
    attempts: 1,
    project: projectSummary(),
    ...overrides,
  };
}

interface Call {
  method: string;
  args: unknown[];
}

/** Programmable in-memory stand-in for the service; records every call. */
export class StubApi implements ServiceApi {
  calls: Call[] = [];
  project = projectSummary();
  nextCommandResult: CommandResultPayload | Promise<CommandResultPayload> = commandResult();
  nextPutScript: PutScriptResult = { ok: true, payload: { text: "", revision: 1, violations: [], changed: true } };
  nextSuggestion: SuggestionResult = { ok: true, project: projectSummary({ revision: 1 }) };
  logs = '{"seq": 1, "kind": "created"}\n';
  exportResult: ExportResult = { outPath: "/tmp/mixed.wav", bytes: 42, tool: "WavMixTool" };

  private record(method: string, ...args: unknown[]): void {
    this.calls.push({ method, args });
  }

  callsTo(method: string): Call[] {
    return this.calls.filter((c) => c.method === method);
  }

  async createProject(videoUrl: string): Promise<ProjectSummary> {
    this.record("createProject", videoUrl);
    return this.project;
  }

  async getProject(id: string): Promise<ProjectSummary> {
    this.record("getProject", id);
    return this.project;
  }

  async getScript(id: string): Promise<ScriptPayload> {
    this.record("getScript", id);
    return { text: this.project.scriptText, revision: this.project.revision, violations: [] };
  }

  async putScript(id: string, text: string): Promise<PutScriptResult> {
    this.record("putScript", id, text);
    return this.nextPutScript;
  }

  async sendCommand(id: string, command: string, tier?: string): Promise<CommandResultPayload> {
    this.record("sendCommand", id, command, tier);
    return this.nextCommandResult;
  }

  async reviewSuggestion(id: string, accept: boolean): Promise<SuggestionResult> {
    this.record("reviewSuggestion", id, accept);
    return this.nextSuggestion;
  }

  async playback(id: string, kind: PlaybackKind, positionMs: number): Promise<PlaybackResult> {
    this.record("playback", id, kind, positionMs);
    return { announcement: `${kind} at ${positionMs}`, playheadMs: positionMs };
  }

  async putSettings(id: string, askOnly: boolean): Promise<ProjectSummary> {
    this.record("putSettings", id, askOnly);
    return this.project;
  }

  async exportMix(id: string, sourcePath: string, outPath: string): Promise<ExportResult> {
    this.record("exportMix", id, sourcePath, outPath);
    return this.exportResult;
  }

  async logsText(id: string): Promise<string> {
    this.record("logsText", id);
    return this.logs;
  }
}

export interface Harness {
  app: App;
  api: StubApi;
  media: FakeMedia;
  storage: MemoryStorage;
  savedFiles: Array<{ name: string; text: string }>;
}

/** Fresh app over a clean body. Pass the same storage twice to simulate a reload. */
export function makeApp(overrides: Partial<AppOptions> = {}): Harness {
  document.body.innerHTML = "";
  const api = (overrides.api as StubApi | undefined) ?? new StubApi();
  const media = (overrides.media as FakeMedia | undefined) ?? new FakeMedia();
  const storage = (overrides.storage as MemoryStorage | undefined) ?? new MemoryStorage();
  const savedFiles: Array<{ name: string; text: string }> = [];
  const app = new App({
    doc: document,
    api,
    media,
    projectId: "p0001",
    storage,
    saveFile: (name, text) => savedFiles.push({ name, text }),
    exportSource: "/media/source.wav",
    exportOut: "/media/mixed.wav",
    ...overrides,
  });
  return { app, api, media, storage, savedFiles };
}

export function press(key: string, init: Partial<KeyboardEventInit> = {}): KeyboardEvent {
  const event = new KeyboardEvent("keydown", {
    key,
    ctrlKey: true,
    bubbles: true,
    cancelable: true,
    ...init,
  });
  document.dispatchEvent(event);
  return event;
}

export const SAMPLE_SCRIPT = [
  "0 min 2 sec to 0 min 6 sec",
  "A door opens slowly.",
  "",
  "0 min 9 sec to 0 min 14 sec",
  "She steps into the hallway.",
].join("\n");
