import { RpcClient } from "./client.js";
import { renderGoalState } from "./render.js";
import type {
  Diagnostic,
  GoalStateResult,
  OpenResult,
  SuggestResult,
} from "./protocol.js";

/** Client-side state of one open document plus the operations the info
 * pane needs: goal-state queries, suggestion lookup, and splicing an
 * accepted suggestion back into the text. */
export class InfoView {
  text = "";
  revision = 0;
  diagnostics: Diagnostic[] = [];
  lastGoalState: GoalStateResult | null = null;

  constructor(
    private client: RpcClient,
    readonly path: string,
  ) {}

  async open(text: string): Promise<OpenResult> {
    this.text = text;
    this.revision = 1;
    const r = await this.client.request<OpenResult>("open", {
      path: this.path,
      text,
      revision: this.revision,
    });
    this.diagnostics = r.diagnostics;
    return r;
  }

  async change(text: string): Promise<OpenResult> {
    this.text = text;
    this.revision += 1;
    const r = await this.client.request<OpenResult>("change", {
      path: this.path,
      text,
      revision: this.revision,
    });
    this.diagnostics = r.diagnostics;
    return r;
  }

  async goalState(line: number, col: number): Promise<GoalStateResult> {
    const r = await this.client.request<GoalStateResult>("goalState", {
      path: this.path,
      line,
      col,
      revision: this.revision,
    });
    this.lastGoalState = r;
    return r;
  }

  async suggest(line: number, col: number): Promise<string[]> {
    const r = await this.client.request<SuggestResult>("suggest", {
      path: this.path,
      line,
      col,
      revision: this.revision,
    });
    return r.suggestions;
  }

  /** Replaces the `exact?` hole on the given line with the server's top
   * suggestion and re-checks the document.  Returns the suggestion text,
   * or null when the server has none to offer. */
  async applySuggestion(line: number, col: number): Promise<string | null> {
    const suggestions = await this.suggest(line, col);
    const top = suggestions[0];
    if (top === undefined) return null;
    const lines = this.text.split("\n");
    const target = lines[line - 1];
    if (target === undefined || !target.includes("exact?")) return null;
    lines[line - 1] = target.replace("exact?", top);
    await this.change(lines.join("\n"));
    return top;
  }

  /** HTML for the goal pane at the last queried position. */
  renderPane(): string {
    if (this.lastGoalState === null) {
      return `<div class="goal-pane"></div>`;
    }
    return renderGoalState(this.lastGoalState);
  }
}
