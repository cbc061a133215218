import { beforeEach, describe, expect, it } from "vitest";
import { ScriptEditor } from "../src/editor.js";
import { FocusMemory } from "../src/focus.js";

let area: HTMLTextAreaElement;
let editor: ScriptEditor;

beforeEach(() => {
  document.body.innerHTML = "";
  area = document.createElement("textarea");
  document.body.appendChild(area);
  editor = new ScriptEditor(area);
  editor.text = "one\ntwo two\nthree";
});

describe("FocusMemory", () => {
  it("restores the exact captured position", () => {
    area.selectionStart = 8;
    const memory = new FocusMemory();
    memory.capture(editor);
    expect(memory.position).toEqual({ line: 2, offset: 4 });

    area.selectionStart = 0;
    area.blur();
    expect(memory.restore(editor)).toBe(true);
    expect(document.activeElement).toBe(area);
    expect(editor.caret()).toEqual({ line: 2, offset: 4 });
  });

  it("does nothing before the first capture", () => {
    const memory = new FocusMemory();
    expect(memory.restore(editor)).toBe(false);
    expect(document.activeElement).not.toBe(area);
  });

  it("keeps the slot across repeated restores", () => {
    area.selectionStart = 5;
    const memory = new FocusMemory();
    memory.capture(editor);
    memory.restore(editor);
    area.selectionStart = 0;
    memory.restore(editor);
    expect(editor.caret()).toEqual({ line: 2, offset: 1 });
  });

  it("clamps when the text shrank in the meantime", () => {
    area.selectionStart = 16;
    const memory = new FocusMemory();
    memory.capture(editor);
    expect(memory.position).toEqual({ line: 3, offset: 4 });
    editor.text = "one";
    memory.restore(editor);
    expect(editor.caret()).toEqual({ line: 1, offset: 3 });
  });
});
