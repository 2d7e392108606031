import type { GoalStateResult } from "./protocol.js";

/** One parsed goal: hypothesis lines in declaration order, then the target
 * (the `⊢` line, always rendered last). */
export interface ParsedGoal {
  hypotheses: string[];
  target: string;
}

export function parseGoalRender(render: string): ParsedGoal {
  const lines = render.split("\n");
  const hypotheses: string[] = [];
  let target = "";
  for (const line of lines) {
    if (line.startsWith("⊢")) {
      target = line;
    } else if (line.trim() !== "") {
      hypotheses.push(line);
    }
  }
  return { hypotheses, target };
}

export function escapeHtml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function goalHtml(goalRender: string): string {
  const { hypotheses, target } = parseGoalRender(goalRender);
  const hyps = hypotheses
    .map((h) => `<div class="hypothesis">${escapeHtml(h)}</div>`)
    .join("");
  return (
    `<div class="goal">${hyps}` +
    `<div class="goal-target">${escapeHtml(target)}</div></div>`
  );
}

/** Renders a goalState response as the info pane's HTML.  Hypotheses keep
 * their order; the `⊢` line comes last in every goal block.  A response
 * computed against a different document revision gets a staleness badge. */
export function renderGoalState(state: GoalStateResult): string {
  const parts: string[] = [];
  if (state.stale) {
    parts.push(
      `<span class="badge stale" title="computed against revision ` +
        `${state.revision}">stale</span>`,
    );
  }
  if (state.goals.length === 0) {
    parts.push(`<div class="no-goals">No goals</div>`);
  } else {
    parts.push(...state.goals.map(goalHtml));
  }
  return `<div class="goal-pane">${parts.join("")}</div>`;
}
