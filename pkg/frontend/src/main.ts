/** Browser bootstrap: wires the DOM to the client and re-renders on change. */

import { GameClient } from "./client.js";
import { render } from "./render.js";

const app = document.getElementById("app")!;
const lobby = document.getElementById("lobby")!;

const client = new GameClient(
  (state) => {
    app.innerHTML = render(state);
    lobby.style.display = state.view ? "none" : "block";
  },
  (url) => new WebSocket(url) as unknown as import("./client.js").SocketLike,
);

function wsUrl(): string {
  const scheme = location.protocol === "https:" ? "wss" : "ws";
  return `${scheme}://${location.host}/`;
}

document.getElementById("create-form")!.addEventListener("submit", (ev) => {
  ev.preventDefault();
  const opponents = Number(
    (document.getElementById("opponents") as HTMLInputElement).value,
  );
  const seats = ["human" as const, ...Array(opponents).fill("virtual" as const)];
  client.connect(wsUrl());
  const tryCreate = setInterval(() => {
    if (client.state.status === "connected" && !client.state.session) {
      client.createSession(seats);
    } else if (client.state.session && client.state.credential === null) {
      client.join(client.state.session, 0);
      clearInterval(tryCreate);
    }
  }, 50);
});

document.getElementById("join-form")!.addEventListener("submit", (ev) => {
  ev.preventDefault();
  const session = (document.getElementById("session-id") as HTMLInputElement).value.trim();
  const seat = Number((document.getElementById("seat-no") as HTMLInputElement).value);
  client.connect(wsUrl());
  const tryJoin = setInterval(() => {
    if (client.state.status === "connected") {
      client.join(session, seat);
      clearInterval(tryJoin);
    }
  }, 50);
});

app.addEventListener("click", (ev) => {
  const target = (ev.target as HTMLElement).closest("[data-card],[data-action],[data-color]");
  if (!target) return;
  const card = target.getAttribute("data-card");
  const action = target.getAttribute("data-action");
  const color = target.getAttribute("data-color");
  if (card && !target.hasAttribute("disabled")) client.clickCard(card);
  else if (action === "draw") client.draw();
  else if (action === "keep") client.keepDrawn();
  else if (color) client.pickColor(color);
});

window.addEventListener("online", () => client.reconnect());
