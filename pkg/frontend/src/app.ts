import { ApiError, type ServiceApi } from "./api.js";
import { Announcer } from "./announce.js";
import { DraftStore, type ConversationEntry, type StorageLike } from "./draft.js";
import { ScriptEditor } from "./editor.js";
import { FocusMemory } from "./focus.js";
import { BINDINGS, resolveHotkey, type HotkeyAction } from "./hotkeys.js";
import { VideoPanel, type MediaLike } from "./player.js";
import { cueAtLine, cuesInDraft } from "./script.js";
import type { CommandResultPayload, CommandTier, Violation } from "./types.js";

export interface AppOptions {
  doc: Document;
  api: ServiceApi;
  media: MediaLike;
  projectId: string;
  storage: StorageLike;
  /** Receives downloadable text; the browser default creates an anchor click. */
  saveFile?: (name: string, text: string) => void;
  /** Server-side paths for the export half of Ctrl+9. */
  exportSource?: string;
  exportOut?: string;
  root?: HTMLElement;
}

const SEEK_STEP_SECONDS = 5;
const REGENERATE_COMMAND = "Regenerate the audio descriptions for this video";

/**
 * The authoring workbench: builds its panels into the document, owns the
 * hotkey layer, and talks to the project service. One instance per page.
 */
export class App {
  readonly editor: ScriptEditor;
  readonly announcer: Announcer;
  readonly focusMemory = new FocusMemory();
  readonly drafts: DraftStore;
  readonly player: VideoPanel;

  readonly editorArea: HTMLTextAreaElement;
  readonly agentInput: HTMLInputElement;
  readonly conversationList: HTMLElement;
  readonly violationList: HTMLElement;
  readonly suggestionBox: HTMLElement;
  readonly suggestionText: HTMLElement;
  readonly suggestionProblems: HTMLElement;

  adTrackOn = false;
  revision = 0;

  private readonly doc: Document;
  private readonly api: ServiceApi;
  private conversation: ConversationEntry[] = [];
  private readonly inflight = new Map<string, Promise<void>>();
  private readonly saveFile: (name: string, text: string) => void;

  constructor(private readonly opts: AppOptions) {
    this.doc = opts.doc;
    this.api = opts.api;
    this.player = new VideoPanel(opts.media);
    this.drafts = new DraftStore(opts.storage);
    this.announcer = new Announcer(opts.doc);
    this.saveFile = opts.saveFile ?? anchorSaveFile(opts.doc);

    const root = opts.root ?? this.doc.body;
    const d = this.doc;

    const editorSection = section(d, "Script editor");
    const editorLabel = d.createElement("label");
    editorLabel.htmlFor = "adkit-editor";
    editorLabel.textContent = "Script";
    this.editorArea = d.createElement("textarea");
    this.editorArea.id = "adkit-editor";
    this.editorArea.rows = 18;
    const saveButton = button(d, "Save script", () => void this.saveScript());
    this.violationList = d.createElement("ul");
    this.violationList.setAttribute("aria-label", "Script problems");
    editorSection.append(editorLabel, this.editorArea, saveButton, this.violationList);

    const agentSection = section(d, "Agent");
    const agentLabel = d.createElement("label");
    agentLabel.htmlFor = "adkit-agent-input";
    agentLabel.textContent = "Ask or instruct the agent";
    this.agentInput = d.createElement("input");
    this.agentInput.id = "adkit-agent-input";
    this.agentInput.type = "text";
    const sendButton = button(d, "Send", () => void this.submitFromInput());
    this.conversationList = d.createElement("ul");
    this.conversationList.setAttribute("role", "log");
    this.conversationList.setAttribute("aria-label", "Conversation");
    agentSection.append(agentLabel, this.agentInput, sendButton, this.conversationList);

    this.suggestionBox = section(d, "Pending suggestion");
    this.suggestionBox.hidden = true;
    this.suggestionText = d.createElement("pre");
    this.suggestionProblems = d.createElement("ul");
    this.suggestionProblems.setAttribute("aria-label", "Suggestion problems");
    this.suggestionBox.append(
      this.suggestionText,
      button(d, "Accept suggestion", () => void this.acceptSuggestion()),
      button(d, "Reject suggestion", () => void this.rejectSuggestion()),
      this.suggestionProblems,
    );

    const help = section(d, "Keyboard shortcuts");
    const dl = d.createElement("dl");
    for (const binding of BINDINGS) {
      const dt = d.createElement("dt");
      dt.textContent = binding.chord;
      const dd = d.createElement("dd");
      dd.textContent = binding.description;
      dl.append(dt, dd);
    }
    help.appendChild(dl);

    root.append(editorSection, agentSection, this.suggestionBox, help);

    this.editor = new ScriptEditor(this.editorArea);
    this.editorArea.addEventListener("input", () => this.persistDraft());
    this.agentInput.addEventListener("keydown", (e) => {
      if (e.key === "Enter") {
        e.preventDefault();
        void this.submitFromInput();
      }
    });
    this.doc.addEventListener("keydown", (e) => this.handleKeydown(e));
  }

  /** Unbound chords fall through untouched: no preventDefault, no focus steal. */
  handleKeydown(event: KeyboardEvent): void {
    const binding = resolveHotkey(event);
    if (binding === null) return;
    event.preventDefault();
    void this.runAction(binding.action);
  }

  async runAction(action: HotkeyAction): Promise<void> {
    switch (action) {
      case "togglePlayback": {
        const kind = this.player.toggle();
        return this.guard("playback", async () => {
          const res = await this.api.playback(this.opts.projectId, kind, this.player.positionMs());
          this.announcer.announce(res.announcement);
        });
      }
      case "seekBack":
      case "seekForward": {
        const delta = action === "seekBack" ? -SEEK_STEP_SECONDS : SEEK_STEP_SECONDS;
        this.player.seekBy(delta);
        const kind = action === "seekBack" ? "jumpedBack" : "jumpedForward";
        return this.guard("playback", async () => {
          const res = await this.api.playback(this.opts.projectId, kind, this.player.positionMs());
          this.announcer.announce(res.announcement);
        });
      }
      case "focusAgent":
        this.focusMemory.capture(this.editor);
        this.agentInput.focus();
        return;
      case "focusEditor":
        if (!this.focusMemory.restore(this.editor)) this.editorArea.focus();
        return;
      case "playSegment": {
        const cue = cueAtLine(this.editor.text, this.editor.currentLine());
        if (cue === null) {
          this.announcer.announce("No segment at the cursor");
          return;
        }
        this.player.seekTo(cue.startMs / 1000);
        void this.player.media.play();
        this.announcer.announce(`Playing segment ${cue.index + 1}`);
        return;
      }
      case "toggleAdTrack":
        this.adTrackOn = !this.adTrackOn;
        this.announcer.announce(this.adTrackOn ? "AD track on" : "AD track off");
        return;
      case "regenerate":
        return this.submitCommand(REGENERATE_COMMAND, "generation");
      case "downloadAndExport":
        return this.guard("export", async () => {
          const logs = await this.api.logsText(this.opts.projectId);
          this.saveFile(`${this.opts.projectId}-log.jsonl`, logs);
          this.announcer.announce("Log downloaded");
          if (this.opts.exportSource && this.opts.exportOut) {
            const res = await this.api.exportMix(this.opts.projectId, this.opts.exportSource, this.opts.exportOut);
            this.announcer.announce(`Exported to ${res.outPath}`);
          }
        });
      case "readLineNumber":
        this.announcer.announce(`Line ${this.editor.currentLine()} of ${this.editor.lineCount()}`);
        return;
    }
  }

  async boot(): Promise<void> {
    const project = await this.api.getProject(this.opts.projectId);
    this.revision = project.revision;
    this.editor.text = project.scriptText;
    this.player.seekTo(project.playheadMs / 1000);
    if (project.pendingSuggestion !== null) this.showSuggestion(project.pendingSuggestion);

    const draft = this.drafts.load(this.opts.projectId);
    if (draft !== null) {
      this.conversation = draft.conversation;
      for (const entry of draft.conversation) this.renderEntry(entry);
      if (draft.baseRevision === this.revision) {
        if (draft.script !== project.scriptText) {
          this.editor.text = draft.script;
          this.announcer.announce("Draft restored");
        }
      } else {
        // The project moved on while we were away; committed text wins.
        this.drafts.clear(this.opts.projectId);
        this.announcer.announce("Draft discarded: project changed elsewhere");
      }
    }
  }

  async submitFromInput(): Promise<void> {
    const command = this.agentInput.value.trim();
    if (command === "") return;
    this.agentInput.value = "";
    return this.submitCommand(command);
  }

  async submitCommand(command: string, tier: CommandTier = "conversation"): Promise<void> {
    return this.guard("command", async () => {
      this.appendEntry({ role: "user", text: command });
      try {
        const result = await this.api.sendCommand(this.opts.projectId, command, tier);
        this.applyCommandResult(result);
      } catch (err) {
        const message = err instanceof ApiError ? err.message : String(err);
        this.appendEntry({ role: "error", text: message });
        this.announcer.announce(`Command failed: ${message}`, "assertive");
      }
      this.focusMemory.restore(this.editor);
      this.persistDraft();
    });
  }

  private applyCommandResult(result: CommandResultPayload): void {
    if (result.response !== null && result.response.TextResponse !== "") {
      this.appendEntry({ role: "agent", text: result.response.TextResponse });
    } else if (result.error !== null) {
      this.appendEntry({ role: "error", text: result.error });
    }

    for (const event of result.events) {
      if (event.kind === "ScriptReplaced") {
        this.editor.text = result.project.scriptText;
        this.revision = result.project.revision;
        const n = event.changes?.length ?? 0;
        const note = event.repaired ? ", timing adjusted" : "";
        this.announcer.announce(`Script updated: ${n} change${n === 1 ? "" : "s"}${note}`);
      } else if (event.kind === "SuggestionPending") {
        this.showSuggestion(result.project.pendingSuggestion ?? "");
      } else if (event.kind === "LineMoved" && typeof event.line === "number") {
        // The agent moved the working line; land focus memory on that cue.
        const cue = cuesInDraft(this.editor.text)[event.line - 1];
        if (cue !== undefined) {
          this.editor.focusLine(cue.firstLine);
          this.focusMemory.capture(this.editor);
        }
      }
    }
    if (!result.ok && result.error !== null && result.response !== null) {
      this.appendEntry({ role: "error", text: result.error });
    }
  }

  async saveScript(): Promise<void> {
    return this.guard("script", async () => {
      const res = await this.api.putScript(this.opts.projectId, this.editor.text);
      if (res.ok) {
        this.revision = res.payload.revision;
        this.editor.text = res.payload.text;
        this.renderViolations(this.violationList, res.payload.violations);
        this.announcer.announce(res.payload.changed ? "Script saved" : "No changes to save");
        this.persistDraft();
      } else {
        this.renderViolations(this.violationList, res.violations);
        this.announcer.announce(`Not saved: ${res.violations.length} problem${res.violations.length === 1 ? "" : "s"}`, "assertive");
      }
    });
  }

  async acceptSuggestion(): Promise<void> {
    return this.guard("suggestion", async () => {
      const res = await this.api.reviewSuggestion(this.opts.projectId, true);
      if (res.ok) {
        this.editor.text = res.project.scriptText;
        this.revision = res.project.revision;
        this.hideSuggestion();
        this.announcer.announce("Suggestion applied");
        this.persistDraft();
      } else if (res.status === 422) {
        // Invalid diff: show what is wrong, leave the script alone.
        this.renderViolations(this.suggestionProblems, res.violations);
        this.announcer.announce(`Suggestion not applied: ${res.violations.length} problem${res.violations.length === 1 ? "" : "s"}`, "assertive");
      } else {
        this.hideSuggestion();
        this.announcer.announce("No suggestion is pending");
      }
    });
  }

  async rejectSuggestion(): Promise<void> {
    return this.guard("suggestion", async () => {
      await this.api.reviewSuggestion(this.opts.projectId, false);
      this.hideSuggestion();
      this.announcer.announce("Suggestion dismissed");
    });
  }

  /** Resolves once every in-flight request has settled. Test hook. */
  async idle(): Promise<void> {
    while (this.inflight.size > 0) {
      await Promise.all([...this.inflight.values()]);
    }
  }

  private showSuggestion(text: string): void {
    this.suggestionText.textContent = text;
    this.suggestionProblems.textContent = "";
    this.suggestionBox.hidden = false;
    this.announcer.announce("Suggestion pending review");
  }

  private hideSuggestion(): void {
    this.suggestionBox.hidden = true;
    this.suggestionText.textContent = "";
    this.suggestionProblems.textContent = "";
  }

  private renderViolations(list: HTMLElement, violations: Violation[]): void {
    list.textContent = "";
    for (const v of violations) {
      const li = this.doc.createElement("li");
      const where = v.cueIndex !== null ? ` cue ${v.cueIndex}` : "";
      li.textContent = `${v.severity.toUpperCase()} ${v.rule}${where}: ${v.message}`;
      list.appendChild(li);
    }
  }

  private appendEntry(entry: ConversationEntry): void {
    this.conversation.push(entry);
    this.renderEntry(entry);
  }

  private renderEntry(entry: ConversationEntry): void {
    const li = this.doc.createElement("li");
    const label = entry.role === "user" ? "You" : entry.role === "agent" ? "Agent" : "Error";
    li.textContent = `${label}: ${entry.text}`;
    this.conversationList.appendChild(li);
  }

  private persistDraft(): void {
    this.drafts.save(this.opts.projectId, {
      script: this.editor.text,
      conversation: this.conversation,
      baseRevision: this.revision,
      savedAt: Date.now(),
    });
  }

  // One request per kind at a time; the UI thread never queues blindly.
  private guard(kind: string, fn: () => Promise<void>): Promise<void> {
    if (this.inflight.has(kind)) {
      this.announcer.announce("Still working, try again in a moment");
      return Promise.resolve();
    }
    const op = fn().finally(() => this.inflight.delete(kind));
    this.inflight.set(kind, op);
    return op;
  }
}

function section(doc: Document, label: string): HTMLElement {
  const el = doc.createElement("section");
  el.setAttribute("aria-label", label);
  const heading = doc.createElement("h2");
  heading.textContent = label;
  el.appendChild(heading);
  return el;
}

function button(doc: Document, label: string, onClick: () => void): HTMLButtonElement {
  const el = doc.createElement("button");
  el.type = "button";
  el.textContent = label;
  el.addEventListener("click", onClick);
  return el;
}

function anchorSaveFile(doc: Document): (name: string, text: string) => void {
  return (name, text) => {
    const a = doc.createElement("a");
    a.href = "data:application/x-ndjson;charset=utf-8," + encodeURIComponent(text);
    a.download = name;
    doc.body.appendChild(a);
    a.click();
    a.remove();
  };
}
