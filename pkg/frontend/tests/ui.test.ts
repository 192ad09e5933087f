// Scripted end-to-end test: the app drives the real guidance service
// (spawned as a child process) and replays one enumerated complete sequence
// through the session screen. At every step the rendered buttons must equal
// the server's enabled sets; a disallowed attempt must show the 409 toast
// without changing state; the completed banner must appear at the end.

import { execFileSync, spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { GuidanceClient } from "../src/api.js";
import { mountApp, App } from "../src/app.js";

const PYTHON = process.env.PYTHON ?? "python3";
const PORT = 8741 + (process.pid % 200);
const BASE = `http://127.0.0.1:${PORT}`;

let serverProcess: ChildProcess;
let workDir: string;
let sequence: string[];

function cli(...args: string[]): string {
  return execFileSync(PYTHON, ["-m", "supseq.cli", ...args], { encoding: "utf-8" });
}

async function waitForServer(): Promise<void> {
  const deadline = Date.now() + 60_000;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/model`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error("guidance service did not come up");
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "supseq-ui-"));
  const modelPath = join(workDir, "case.json");
  const supPath = join(workDir, "sup.json");
  cli("case-study", modelPath);
  cli("synthesize", modelPath, "--minimize", "-o", supPath);
  const listing = JSON.parse(cli("enumerate", supPath, "--max-len", "16", "--json"));
  sequence = listing.sequences[0];
  expect(sequence.length).toBeGreaterThan(0);

  serverProcess = spawn(PYTHON, ["-m", "supseq.cli", "serve", supPath, "--port", String(PORT)], {
    stdio: "ignore",
  });
  await waitForServer();
});

afterAll(() => {
  serverProcess?.kill();
  rmSync(workDir, { recursive: true, force: true });
});

function renderedEvents(root: HTMLElement, region: string): string[] {
  return Array.from(root.querySelectorAll(`#${region} [data-event]`))
    .map((node) => node.getAttribute("data-event") ?? "")
    .sort();
}

describe("session screen", () => {
  it("replays an enumerated sequence with server-mirrored actions", async () => {
    const client = new GuidanceClient(BASE);
    const root = document.createElement("div");
    document.body.appendChild(root);
    const app: App = mountApp(root, client, { whatIfBound: 10 });
    await app.ready;

    const view = app.currentView();
    expect(view).not.toBeNull();
    const sessionId = view!.id;

    for (const [position, event] of sequence.entries()) {
      // rendered buttons are exactly the server's enabled sets
      const serverView = await client.getSession(sessionId);
      expect(renderedEvents(root, "starts")).toEqual(
        [...serverView.enabled.controllable].sort(),
      );
      expect(renderedEvents(root, "confirms")).toEqual(
        [...serverView.enabled.uncontrollable].sort(),
      );

      if (position === 2) {
        // pick an event the supervisor does not enable here
        const enabled = new Set([
          ...serverView.enabled.controllable,
          ...serverView.enabled.uncontrollable,
        ]);
        const all = (await client.model()).events.map((e) => e.name);
        const disabled = all.find((name) => !enabled.has(name));
        expect(disabled).toBeDefined();
        await app.attempt(disabled!);
        const toast = root.querySelector("#toast")!;
        expect(toast.classList.contains("hidden")).toBe(false);
        expect(toast.textContent).toContain("Not allowed");
        const unchanged = await client.getSession(sessionId);
        expect(unchanged.history).toEqual(serverView.history);
        expect(app.currentView()!.history).toEqual(serverView.history);
      }

      await app.attempt(event);
      expect(app.currentView()!.history.at(-1)).toBe(event);
    }

    const banner = root.querySelector("#banner")!;
    expect(banner.classList.contains("hidden")).toBe(false);
    expect(banner.textContent).toContain("complete");
    expect(app.currentView()!.completed).toBe(true);

    // the what-if panel mirrors the (now empty) choice set
    expect(renderedEvents(root, "whatif")).toEqual(
      [...app.currentView()!.enabled.controllable].sort(),
    );
  });

  it("undo restores the previous view", async () => {
    const client = new GuidanceClient(BASE);
    const root = document.createElement("div");
    document.body.appendChild(root);
    const app = mountApp(root, client, { whatIfBound: 10 });
    await app.ready;

    const before = structuredClone(app.currentView()!);
    const first = before.enabled.controllable[0]!;
    await app.attempt(first);
    expect(app.currentView()!.history).toEqual([first]);
    await app.undo();
    const after = app.currentView()!;
    expect(after.history).toEqual(before.history);
    expect(after.state).toBe(before.state);
    expect(after.enabled).toEqual(before.enabled);
  });

  it("what-if counts come from the server outlook", async () => {
    const client = new GuidanceClient(BASE);
    const root = document.createElement("div");
    document.body.appendChild(root);
    const app = mountApp(root, client, { whatIfBound: 10 });
    await app.ready;

    const view = app.currentView()!;
    for (const event of view.enabled.controllable) {
      const entry = root.querySelector(`#whatif [data-event="${event}"] .count`)!;
      const outlook = await client.outlook(view.id, 10, event);
      const expected =
        outlook.remaining_sequence_count !== null
          ? `${outlook.remaining_sequence_count} ways to finish`
          : `${outlook.bounded_sequence_count} ways within ${outlook.bound_used} steps`;
      expect(entry.textContent).toBe(expected);
    }
  });

  it("graph screen shows the served DOT with a download link", async () => {
    const client = new GuidanceClient(BASE);
    const root = document.createElement("div");
    document.body.appendChild(root);
    const app = mountApp(root, client, { whatIfBound: 10 });
    await app.ready;
    await app.showGraph();

    const dot = root.querySelector("#dot-source")!.textContent!;
    expect(dot.startsWith("digraph")).toBe(true);
    const link = root.querySelector("#dot-download") as HTMLAnchorElement;
    expect(link.href.startsWith("data:text/vnd.graphviz")).toBe(true);
    app.showSession();
    expect(root.querySelector("#graph-screen")!.classList.contains("hidden")).toBe(true);
  });
});
