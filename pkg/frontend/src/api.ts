import type {
  CommandResultPayload,
  CommandTier,
  ExportResult,
  PlaybackKind,
  PlaybackResult,
  ProjectSummary,
  PutScriptResult,
  ScriptPayload,
  SuggestionResult,
  Violation,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: unknown,
    message?: string,
  ) {
    super(message ?? `request failed with status ${status}`);
    this.name = "ApiError";
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/**
 * The service surface the UI consumes. Everything the front end knows about
 * a project comes through these calls; there is no other channel.
 */
export interface ServiceApi {
  createProject(videoUrl: string, videoDurationMs?: number, askOnly?: boolean): Promise<ProjectSummary>;
  getProject(id: string): Promise<ProjectSummary>;
  getScript(id: string): Promise<ScriptPayload>;
  putScript(id: string, text: string): Promise<PutScriptResult>;
  sendCommand(id: string, command: string, tier?: CommandTier, temperature?: number): Promise<CommandResultPayload>;
  reviewSuggestion(id: string, accept: boolean): Promise<SuggestionResult>;
  playback(id: string, kind: PlaybackKind, positionMs: number): Promise<PlaybackResult>;
  putSettings(id: string, askOnly: boolean): Promise<ProjectSummary>;
  exportMix(id: string, sourcePath: string, outPath: string): Promise<ExportResult>;
  logsText(id: string): Promise<string>;
}

export class ApiClient implements ServiceApi {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request(method: string, path: string, body?: unknown): Promise<Response> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    return this.fetchFn(this.baseUrl + path, init);
  }

  private async json<T>(method: string, path: string, body?: unknown): Promise<T> {
    const res = await this.request(method, path, body);
    const data = await res.json().catch(() => null);
    if (!res.ok) throw new ApiError(res.status, data, errorMessage(data, res.status));
    return data as T;
  }

  createProject(videoUrl: string, videoDurationMs?: number, askOnly = false): Promise<ProjectSummary> {
    return this.json("POST", "/projects", { videoUrl, videoDurationMs, askOnly });
  }

  getProject(id: string): Promise<ProjectSummary> {
    return this.json("GET", `/projects/${id}`).then((record) => {
      // The detail endpoint returns the full history; the UI only needs its length.
      const obj = record as ProjectSummary & { history?: unknown[] };
      if (obj.historyLength === undefined) obj.historyLength = obj.history?.length ?? 0;
      delete obj.history;
      return obj;
    });
  }

  getScript(id: string): Promise<ScriptPayload> {
    return this.json("GET", `/projects/${id}/script`);
  }

  /** Blocking violations come back as data, not as a thrown error: the editor renders them. */
  async putScript(id: string, text: string): Promise<PutScriptResult> {
    const res = await this.request("PUT", `/projects/${id}/script`, { text });
    const data = await res.json().catch(() => null);
    if (res.status === 422) return { ok: false, violations: violationsOf(data) };
    if (!res.ok) throw new ApiError(res.status, data, errorMessage(data, res.status));
    return { ok: true, payload: data as ScriptPayload };
  }

  sendCommand(id: string, command: string, tier: CommandTier = "conversation", temperature?: number): Promise<CommandResultPayload> {
    return this.json("POST", `/projects/${id}/commands`, { command, tier, temperature });
  }

  async reviewSuggestion(id: string, accept: boolean): Promise<SuggestionResult> {
    const res = await this.request("POST", `/projects/${id}/suggestion`, { accept });
    const data = await res.json().catch(() => null);
    if (res.ok) return { ok: true, project: data as ProjectSummary };
    if (res.status === 409 || res.status === 422) {
      const err = (data as { error?: string } | null)?.error;
      return { ok: false, status: res.status, violations: violationsOf(data), error: err };
    }
    throw new ApiError(res.status, data, errorMessage(data, res.status));
  }

  playback(id: string, kind: PlaybackKind, positionMs: number): Promise<PlaybackResult> {
    return this.json("POST", `/projects/${id}/playback`, { kind, positionMs: Math.max(0, Math.round(positionMs)) });
  }

  putSettings(id: string, askOnly: boolean): Promise<ProjectSummary> {
    return this.json("PUT", `/projects/${id}/settings`, { askOnly });
  }

  exportMix(id: string, sourcePath: string, outPath: string): Promise<ExportResult> {
    return this.json("POST", `/projects/${id}/export`, { sourcePath, outPath });
  }

  async logsText(id: string): Promise<string> {
    const res = await this.request("GET", `/projects/${id}/logs`);
    if (!res.ok) throw new ApiError(res.status, null);
    return res.text();
  }

  /**
   * Streaming variant of sendCommand: one server-sent frame per applied
   * event, then a final "result" frame carrying the whole payload.
   */
  async streamCommand(
    id: string,
    command: string,
    tier: CommandTier = "conversation",
    onFrame: (frame: StreamFrame) => void = () => {},
  ): Promise<CommandResultPayload | null> {
    const res = await this.request("POST", `/projects/${id}/commands/stream`, { command, tier });
    if (!res.ok || res.body === null) throw new ApiError(res.status, null);
    const reader = res.body.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    let result: CommandResultPayload | null = null;
    for (;;) {
      const { done, value } = await reader.read();
      if (done) break;
      buffer += decoder.decode(value, { stream: true });
      let cut: number;
      while ((cut = buffer.indexOf("\n\n")) !== -1) {
        const frame = parseSseFrame(buffer.slice(0, cut));
        buffer = buffer.slice(cut + 2);
        if (frame === null) continue;
        onFrame(frame);
        if (frame.event === "result") result = frame.data as CommandResultPayload;
      }
    }
    return result;
  }
}

export interface StreamFrame {
  event: string;
  data: unknown;
}

function parseSseFrame(block: string): StreamFrame | null {
  let event = "message";
  const dataLines: string[] = [];
  for (const line of block.split("\n")) {
    if (line.startsWith("event:")) event = line.slice("event:".length).trim();
    else if (line.startsWith("data:")) dataLines.push(line.slice("data:".length).trim());
  }
  if (dataLines.length === 0) return null;
  try {
    return { event, data: JSON.parse(dataLines.join("\n")) };
  } catch {
    return null;
  }
}

function violationsOf(data: unknown): Violation[] {
  if (data && typeof data === "object" && Array.isArray((data as { violations?: unknown }).violations)) {
    return (data as { violations: Violation[] }).violations;
  }
  return [];
}

function errorMessage(data: unknown, status: number): string {
  if (data && typeof data === "object") {
    const obj = data as { error?: unknown; message?: unknown };
    if (typeof obj.message === "string") return obj.message;
    if (typeof obj.error === "string") return obj.error;
  }
  return `request failed with status ${status}`;
}
