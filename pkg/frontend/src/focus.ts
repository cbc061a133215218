import type { CaretPosition, ScriptEditor } from "./editor.js";

/**
 * Remembers where the author was in the editor before focus left for the
 * agent panel, so a round trip lands back on the exact line and caret
 * offset. One slot is enough: capture overwrites, restore keeps the slot
 * so repeated "back to editor" presses return to the same place.
 */
export class FocusMemory {
  private saved: CaretPosition | null = null;

  capture(editor: ScriptEditor): void {
    this.saved = editor.caret();
  }

  restore(editor: ScriptEditor): boolean {
    if (this.saved === null) return false;
    editor.moveTo(this.saved);
    return true;
  }

  get position(): CaretPosition | null {
    return this.saved;
  }
}
