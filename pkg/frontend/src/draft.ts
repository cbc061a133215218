export interface StorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export interface ConversationEntry {
  role: "user" | "agent" | "error";
  text: string;
}

export interface Draft {
  script: string;
  conversation: ConversationEntry[];
  baseRevision: number;
  savedAt: number;
}

/**
 * Client-side persistence of unsaved work, one slot per project. Backed by
 * localStorage in the browser; anything with the same three methods works,
 * which is what the reload tests swap in.
 */
export class DraftStore {
  constructor(
    private readonly storage: StorageLike,
    private readonly prefix = "adkit.draft.",
  ) {}

  save(projectId: string, draft: Draft): void {
    this.storage.setItem(this.prefix + projectId, JSON.stringify(draft));
  }

  load(projectId: string): Draft | null {
    const raw = this.storage.getItem(this.prefix + projectId);
    if (raw === null) return null;
    try {
      const obj = JSON.parse(raw) as Draft;
      if (typeof obj.script !== "string" || typeof obj.baseRevision !== "number") return null;
      if (!Array.isArray(obj.conversation)) return null;
      return obj;
    } catch {
      return null;
    }
  }

  clear(projectId: string): void {
    this.storage.removeItem(this.prefix + projectId);
  }
}
