export interface TextAreaLike {
  value: string;
  selectionStart: number;
  selectionEnd: number;
  focus(): void;
}

/** 1-based line, 0-based character offset within that line. */
export interface CaretPosition {
  line: number;
  offset: number;
}

/**
 * Line-and-caret arithmetic over a plain multiline text surface. The editor
 * itself is just a textarea; everything interesting lives in how positions
 * map between flat selection indices and line coordinates.
 */
export class ScriptEditor {
  constructor(readonly area: TextAreaLike) {}

  get text(): string {
    return this.area.value;
  }

  set text(value: string) {
    this.area.value = value;
  }

  lineCount(): number {
    return this.area.value.split("\n").length;
  }

  caret(): CaretPosition {
    const upTo = this.area.value.slice(0, this.area.selectionStart);
    const lines = upTo.split("\n");
    return { line: lines.length, offset: lines[lines.length - 1]!.length };
  }

  currentLine(): number {
    return this.caret().line;
  }

  /** Clamps out-of-range positions instead of failing: the text may have shrunk. */
  moveTo(pos: CaretPosition): void {
    const lines = this.area.value.split("\n");
    const line = Math.min(Math.max(pos.line, 1), lines.length);
    const offset = Math.min(Math.max(pos.offset, 0), lines[line - 1]!.length);
    let index = offset;
    for (let i = 0; i < line - 1; i += 1) index += lines[i]!.length + 1;
    this.area.focus();
    this.area.selectionStart = index;
    this.area.selectionEnd = index;
  }

  focusLine(line: number): void {
    this.moveTo({ line, offset: 0 });
  }
}
