// Round trip against a live `microproof serve --port 0` process: request a
// suggestion at a proof hole, splice it in, and confirm the server reports
// no remaining goals at that position.

import { spawn, type ChildProcess } from "node:child_process";
import { readFileSync } from "node:fs";
import { join, dirname } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { RpcClient } from "../src/client.js";
import { TcpTransport } from "../src/tcp.js";
import { InfoView } from "../src/viewmodel.js";

const here = dirname(fileURLToPath(import.meta.url));
const corpus = join(here, "..", "..", "tests", "corpus");

const SUGGESTION = "exact Module.End.mem_eigenspace_iff.mpr (h i)";

let proc: ChildProcess;
let client: RpcClient;

beforeAll(async () => {
  proc = spawn("microproof", ["serve", "--port", "0"], {
    stdio: ["ignore", "pipe", "inherit"],
  });
  const port = await new Promise<number>((resolve, reject) => {
    let banner = "";
    proc.stdout!.setEncoding("utf-8");
    proc.stdout!.on("data", (chunk: string) => {
      banner += chunk;
      const m = banner.match(/listening on 127\.0\.0\.1:(\d+)/);
      if (m) resolve(Number(m[1]));
    });
    proc.on("error", reject);
    proc.on("exit", (code) =>
      reject(new Error(`server exited early (${code})`)),
    );
  });
  client = new RpcClient(await TcpTransport.connect("127.0.0.1", port));
}, 120_000);

afterAll(async () => {
  try {
    await client.shutdown();
  } finally {
    proc.kill();
  }
});

describe("suggestion round trip over a live server", () => {
  it("splices the top suggestion and reaches a goal-free state", async () => {
    const complete = readFileSync(join(corpus, "strengthened_clean.mpl"),
                                  "utf-8");
    const withHole = complete.replace(`· ${SUGGESTION}`, "· exact?");
    expect(withHole).not.toBe(complete);

    const view = new InfoView(client, "clean.mpl");
    const opened = await view.open(withHole);
    expect(opened.diagnostics).toEqual([]);

    // the hole: the bullet on this line reads `· exact?`
    const lines = withHole.split("\n");
    const holeLine = lines.findIndex((l) => l.includes("exact?")) + 1;
    const bulletCol = lines[holeLine - 1]!.indexOf("·") + 1;

    const applied = await view.applySuggestion(holeLine, bulletCol);
    expect(applied).toBe(SUGGESTION);
    expect(view.text).toBe(complete);
    expect(view.diagnostics).toEqual([]);

    // at the end of the spliced line the bullet's goal is closed
    const endCol = view.text.split("\n")[holeLine - 1]!.length + 1;
    const state = await view.goalState(holeLine, endCol);
    expect(state.stale).toBeUndefined();
    expect(state.goals).toEqual([]);
    expect(view.renderPane()).toContain('class="no-goals"');
  }, 120_000);
});
