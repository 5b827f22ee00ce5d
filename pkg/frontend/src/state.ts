/** Client session state: inputs, the last response, and frame overrides. */

import type { VisualizeResponse } from "./api.js";
import { extractDialogueTexts } from "./scriptText.js";

export class SessionState {
  scriptText = "";
  queryText = "";
  lastResponse: VisualizeResponse | null = null;
  /** dialogue snippets of the last submitted script, by line index */
  lineTexts: string[] = [];
  /** per-cell frame swaps, keyed "row:line"; reset on every new response */
  overrides = new Map<string, string>();

  setResponse(response: VisualizeResponse): void {
    this.lastResponse = response;
    this.lineTexts = extractDialogueTexts(this.scriptText);
    this.overrides.clear();
  }

  overrideKey(row: number, line: number): string {
    return `${row}:${line}`;
  }

  setOverride(row: number, line: number, frameId: string): void {
    this.overrides.set(this.overrideKey(row, line), frameId);
  }

  overrideFor(row: number, line: number): string | undefined {
    return this.overrides.get(this.overrideKey(row, line));
  }
}
