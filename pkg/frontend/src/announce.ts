/**
 * A single shared live region. Screen readers speak whatever lands in it,
 * so every status change in the app funnels through announce().
 */
export class Announcer {
  readonly region: HTMLElement;
  readonly log: string[] = [];

  constructor(doc: Document) {
    this.region = doc.createElement("div");
    this.region.setAttribute("role", "status");
    this.region.setAttribute("aria-live", "polite");
    this.region.setAttribute("aria-atomic", "true");
    this.region.className = "sr-only";
    doc.body.appendChild(this.region);
  }

  announce(message: string, priority: "polite" | "assertive" = "polite"): void {
    this.region.setAttribute("aria-live", priority);
    // Identical text twice in a row is silently swallowed by most screen
    // readers; a trailing no-break space forces the second one through.
    let text = message;
    if (this.region.textContent === message) text = message + " ";
    this.region.textContent = text;
    this.log.push(message);
  }

  get last(): string | null {
    return this.log.length > 0 ? this.log[this.log.length - 1]! : null;
  }
}
