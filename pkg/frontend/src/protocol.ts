/** Wire types for the MicroProof session server.
 *
 * The server speaks newline-delimited JSON: requests are
 * `{id, method, params}` and responses `{id, result}` or `{id, error}`.
 * Lines and columns are 1-based.  Responses about a document carry the
 * `revision` they were computed against, plus `stale: true` when the
 * request named a different revision.
 */

export interface SpanJson {
  start: number;
  end: number;
  line: number;
  col: number;
  endLine: number;
  endCol: number;
}

export interface Diagnostic {
  severity: "error" | "warning" | "info";
  span: SpanJson;
  message: string;
  kind: string;
  goalRender: string | null;
  file: string | null;
}

export interface Request {
  id: number;
  method: string;
  params: Record<string, unknown>;
}

export interface ErrorBody {
  message: string;
}

export interface Response {
  id: number | null;
  result?: Record<string, unknown>;
  error?: ErrorBody;
}

export interface DocumentResult {
  revision: number;
  stale?: boolean;
}

export interface OpenResult extends DocumentResult {
  diagnostics: Diagnostic[];
}

export interface GoalStateResult extends DocumentResult {
  render: string | null;
  goals: string[];
}

export interface DiagnosticsResult extends DocumentResult {
  diagnostics: Diagnostic[];
}

export interface SearchResult {
  results: { name: string; signature: string }[];
}

export interface SuggestResult extends DocumentResult {
  suggestions: string[];
}
