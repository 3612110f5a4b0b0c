/** End to end: a scripted human plays a full game against two virtual seats
 * through a real server over a real websocket, exercising the actual client.
 */

import { type ChildProcess, spawn } from "node:child_process";
import { createServer } from "node:net";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { GameClient, type SocketLike } from "../src/client.js";
import { validateOutbound } from "../src/protocol.js";

const REPO_ROOT = join(__dirname, "..", "..");

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.on("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const port = (probe.address() as { port: number }).port;
      probe.close(() => resolve(port));
    });
  });
}

async function waitForServer(url: string, timeoutMs = 20_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    const ok = await new Promise<boolean>((resolve) => {
      const ws = new WebSocket(url);
      ws.once("open", () => {
        ws.close();
        resolve(true);
      });
      ws.once("error", () => resolve(false));
    });
    if (ok) return;
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error("server did not come up");
}

let server: ChildProcess;
let url: string;

beforeAll(async () => {
  const port = await freePort();
  url = `ws://127.0.0.1:${port}/`;
  server = spawn("python3", ["-m", "cardsim.cli", "serve", "--port", String(port)], {
    cwd: REPO_ROOT,
    stdio: "ignore",
  });
  await waitForServer(url);
}, 30_000);

afterAll(() => {
  server?.kill();
});

describe("full game over the wire", () => {
  it("a scripted human finishes a game against two virtual seats", async () => {
    let sentMoves = 0;
    let verdicts = 0;
    let rejected = 0;
    const sockets: WebSocket[] = [];

    const factory = (target: string): SocketLike => {
      const ws = new WebSocket(target);
      sockets.push(ws);
      const original = ws.send.bind(ws);
      (ws as unknown as { send: (data: string) => void }).send = (data: string) => {
        const msg = JSON.parse(data);
        expect(validateOutbound(msg), data).toBeNull();
        if (msg.kind === "move") sentMoves += 1;
        original(data);
      };
      return ws as unknown as SocketLike;
    };

    const finished = new Promise<void>((resolve, reject) => {
      const guard = setTimeout(() => reject(new Error("game did not finish")), 90_000);
      let created = false;
      let joined = false;
      let acting = false;

      const client: GameClient = new GameClient((state) => {
        if (state.status === "connected" && !state.session && !created) {
          created = true;
          client.createSession(["human", "virtual", "virtual"], 1905);
          return;
        }
        if (state.session && !state.credential && !joined) {
          joined = true;
          client.join(state.session, 0);
          return;
        }
        if (state.rejection) {
          rejected += 1;
          reject(new Error(`move rejected: ${state.rejection}`));
          return;
        }
        if (state.winner !== null) {
          clearTimeout(guard);
          resolve();
          return;
        }
        if (!state.view || state.awaitingVerdict || acting) return;
        if (state.awaitingVerdict === null && state.view.pending) {
          acting = true;
          queueMicrotask(() => {
            acting = false;
            const view = client.state.view;
            if (!view || client.state.awaitingVerdict || client.state.winner !== null) return;
            verdicts += 1;
            if (view.pending === "play") {
              if (view.legal.length > 0) {
                const face = view.legal[0]!;
                client.clickCard(face);
                if (face === "W" || face === "D") client.pickColor("R");
              } else {
                client.draw();
              }
            } else if (view.pending === "playdrawn") {
              const face = view.legal[0]!;
              client.clickCard(face);
              if (face === "W" || face === "D") client.pickColor("B");
            } else if (view.pending === "color") {
              client.pickColor("G");
            } else {
              verdicts -= 1;
            }
          });
        }
      }, factory);
      client.connect(url);
    });

    await finished;
    expect(sentMoves).toBeGreaterThan(5);
    expect(rejected).toBe(0);
    for (const ws of sockets) ws.close();
  }, 120_000);
});
