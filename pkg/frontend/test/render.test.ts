// Renders recorded protocol responses: hypothesis order, target placement,
// and the staleness badge.

import { readFileSync } from "node:fs";
import { join, dirname } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import { parseGoalRender, renderGoalState } from "../src/render.js";
import type { GoalStateResult, Response } from "../src/protocol.js";

const here = dirname(fileURLToPath(import.meta.url));

function fixture(name: string): GoalStateResult {
  const raw = readFileSync(join(here, "fixtures", name), "utf-8");
  const response = JSON.parse(raw) as Response;
  return response.result as unknown as GoalStateResult;
}

const EXPECTED_HYPOTHESES = [
  "K : Type",
  "V : Type",
  "f : V →ₗ[K] V",
  "μ ν : K",
  "hμν : μ ≠ ν",
  "x y : V",
  "hx₀ : x ≠ 0",
  "hy₀ : y ≠ 0",
  "hx : f x = μ • x",
  "hy : f y = ν • y",
  "a b : K",
  "hab : a • x + b • y = 0",
];

describe("goal pane rendering from recorded responses", () => {
  it("shows every hypothesis line, in order, with the target last", () => {
    const state = fixture("goal_after_intro.json");
    expect(state.render).not.toBeNull();
    const parsed = parseGoalRender(state.render!);
    expect(parsed.hypotheses).toEqual(EXPECTED_HYPOTHESES);
    expect(parsed.target).toBe("⊢ a = 0 ∧ b = 0");

    const html = renderGoalState(state);
    const hypMatches = [...html.matchAll(/<div class="hypothesis">(.*?)<\/div>/g)]
      .map((m) => m[1]);
    expect(hypMatches).toEqual(EXPECTED_HYPOTHESES);
    // the ⊢ line is rendered after every hypothesis
    const targetAt = html.indexOf('<div class="goal-target">');
    for (const m of [...html.matchAll(/<div class="hypothesis">/g)]) {
      expect(m.index!).toBeLessThan(targetAt);
    }
    expect(html).toContain("⊢ a = 0 ∧ b = 0</div>");
  });

  it("renders no staleness badge for an up-to-date response", () => {
    const html = renderGoalState(fixture("goal_after_intro.json"));
    expect(html).not.toContain("stale");
  });

  it("renders the staleness badge on a revision mismatch", () => {
    const state = fixture("goal_after_intro_stale.json");
    expect(state.stale).toBe(true);
    const html = renderGoalState(state);
    expect(html).toContain('<span class="badge stale"');
    // the state itself is still shown, just marked stale
    expect(html).toContain("⊢ a = 0 ∧ b = 0");
  });

  it("renders an explicit empty state when there are no goals", () => {
    const html = renderGoalState({ revision: 1, render: null, goals: [] });
    expect(html).toContain('class="no-goals"');
  });

  it("escapes markup in goal text", () => {
    const html = renderGoalState({
      revision: 1,
      render: "h : a <b>\n⊢ x & y",
      goals: ["h : a <b>\n⊢ x & y"],
    });
    expect(html).toContain("a &lt;b&gt;");
    expect(html).toContain("x &amp; y");
  });
});
