export type HotkeyAction =
  | "togglePlayback"
  | "seekBack"
  | "seekForward"
  | "focusAgent"
  | "focusEditor"
  | "playSegment"
  | "toggleAdTrack"
  | "regenerate"
  | "downloadAndExport"
  | "readLineNumber";

export interface HotkeyBinding {
  chord: string;
  action: HotkeyAction;
  description: string;
}

// The full chord set. Every binding uses Ctrl so the keys keep working
// while focus sits inside the editor or the agent input.
export const BINDINGS: readonly HotkeyBinding[] = [
  { chord: "Ctrl+1", action: "togglePlayback", description: "Play or pause the video" },
  { chord: "Ctrl+2", action: "seekBack", description: "Jump back 5 seconds" },
  { chord: "Ctrl+3", action: "seekForward", description: "Jump forward 5 seconds" },
  { chord: "Ctrl+4", action: "focusAgent", description: "Move focus to the agent panel" },
  { chord: "Ctrl+5", action: "focusEditor", description: "Move focus to the script editor" },
  { chord: "Ctrl+O", action: "playSegment", description: "Play the current segment's audio" },
  { chord: "Ctrl+I", action: "toggleAdTrack", description: "Toggle the description track" },
  { chord: "Ctrl+M", action: "regenerate", description: "Regenerate the descriptions" },
  { chord: "Ctrl+9", action: "downloadAndExport", description: "Download the session log and export the mix" },
  { chord: "Ctrl+L", action: "readLineNumber", description: "Read out the current line number" },
];

export interface KeyEventLike {
  key: string;
  ctrlKey: boolean;
  altKey: boolean;
  metaKey: boolean;
  shiftKey: boolean;
}

/**
 * Normalize a keydown into a chord string, or null when the event cannot
 * be one of ours (no Ctrl, extra modifiers, or a bare modifier key).
 */
export function chordOf(event: KeyEventLike): string | null {
  if (!event.ctrlKey || event.altKey || event.metaKey || event.shiftKey) return null;
  if (event.key.length !== 1) return null;
  return "Ctrl+" + event.key.toUpperCase();
}

export function resolveHotkey(event: KeyEventLike): HotkeyBinding | null {
  const chord = chordOf(event);
  if (chord === null) return null;
  return BINDINGS.find((b) => b.chord === chord) ?? null;
}
