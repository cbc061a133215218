import { describe, expect, it } from "vitest";
import { BINDINGS, chordOf, resolveHotkey } from "../src/hotkeys.js";

function key(k: string, mods: Partial<{ ctrl: boolean; alt: boolean; meta: boolean; shift: boolean }> = {}) {
  return {
    key: k,
    ctrlKey: mods.ctrl ?? true,
    altKey: mods.alt ?? false,
    metaKey: mods.meta ?? false,
    shiftKey: mods.shift ?? false,
  };
}

describe("binding table", () => {
  it("has exactly ten bindings", () => {
    expect(BINDINGS).toHaveLength(10);
  });

  it("chords and actions are unique", () => {
    expect(new Set(BINDINGS.map((b) => b.chord)).size).toBe(10);
    expect(new Set(BINDINGS.map((b) => b.action)).size).toBe(10);
  });

  it("every binding has a description", () => {
    for (const b of BINDINGS) expect(b.description.length).toBeGreaterThan(0);
  });

  it("covers the documented chord set", () => {
    const chords = BINDINGS.map((b) => b.chord);
    expect(chords).toEqual([
      "Ctrl+1", "Ctrl+2", "Ctrl+3", "Ctrl+4", "Ctrl+5",
      "Ctrl+O", "Ctrl+I", "Ctrl+M", "Ctrl+9", "Ctrl+L",
    ]);
  });
});

describe("chordOf", () => {
  it("normalizes letters to upper case", () => {
    expect(chordOf(key("o"))).toBe("Ctrl+O");
    expect(chordOf(key("O"))).toBe("Ctrl+O");
  });

  it("requires ctrl", () => {
    expect(chordOf(key("1", { ctrl: false }))).toBeNull();
  });

  it("rejects extra modifiers", () => {
    expect(chordOf(key("1", { alt: true }))).toBeNull();
    expect(chordOf(key("1", { meta: true }))).toBeNull();
    expect(chordOf(key("1", { shift: true }))).toBeNull();
  });

  it("ignores bare modifier keydowns", () => {
    expect(chordOf(key("Control"))).toBeNull();
  });
});

describe("resolveHotkey", () => {
  it.each([
    ["1", "togglePlayback"],
    ["2", "seekBack"],
    ["3", "seekForward"],
    ["4", "focusAgent"],
    ["5", "focusEditor"],
    ["o", "playSegment"],
    ["i", "toggleAdTrack"],
    ["m", "regenerate"],
    ["9", "downloadAndExport"],
    ["l", "readLineNumber"],
  ])("Ctrl+%s resolves to %s", (k, action) => {
    expect(resolveHotkey(key(k))?.action).toBe(action);
  });

  it("returns null for unbound chords", () => {
    expect(resolveHotkey(key("7"))).toBeNull();
    expect(resolveHotkey(key("z"))).toBeNull();
  });
});
