/** Pure state -> markup rendering, string in string out, so snapshot tests can
 * run without a browser. main.ts injects the result into the page and wires
 * clicks by data attributes.
 */

import type { GameEvent } from "./protocol.js";
import type { ClientState } from "./state.js";

const COLOR_NAMES: Record<string, string> = {
  R: "red",
  Y: "yellow",
  G: "green",
  B: "blue",
};

function esc(text: string): string {
  return text.replace(/[&<>"]/g, (c) =>
    c === "&" ? "&amp;" : c === "<" ? "&lt;" : c === ">" ? "&gt;" : "&quot;",
  );
}

function cardClass(token: string): string {
  const color = token.length === 2 ? token[1]! : token;
  return COLOR_NAMES[color] ?? "black";
}

function describe(ev: GameEvent): string {
  switch (ev.type) {
    case "flip":
      return `opening card ${ev.face}`;
    case "play":
      return `seat ${ev.seat! + 1} played ${ev.face}` + (ev.color ? ` (${COLOR_NAMES[ev.color]})` : "");
    case "draw":
      return `seat ${ev.seat! + 1} drew ${ev.count} card${ev.count === 1 ? "" : "s"}`;
    case "skip":
      return `seat ${ev.seat! + 1} misses a turn`;
    case "reverse":
      return `play direction is now ${ev.direction}`;
    case "color":
      return `seat ${ev.seat! + 1} chose ${COLOR_NAMES[ev.color!]}`;
    case "reshuffle":
      return `discard pile reshuffled (${ev.count} cards)`;
    case "win":
      return `seat ${ev.seat! + 1} wins!`;
    default:
      return ev.type;
  }
}

export function render(state: ClientState): string {
  const parts: string[] = [];
  if (state.status !== "connected") {
    parts.push(`<div class="banner disconnect">connection: ${esc(state.status)}</div>`);
  }
  if (state.error) {
    parts.push(`<div class="banner error">${esc(state.error)}</div>`);
  }
  const view = state.view;
  if (!view) {
    parts.push('<div class="lobby">not in a game yet</div>');
    return parts.join("\n");
  }

  if (state.winner !== null) {
    const mine = state.winner === state.seat;
    parts.push(
      `<div class="banner finish">${mine ? "you win!" : `seat ${state.winner + 1} wins`}</div>`,
    );
  } else if (view.phase === "waiting") {
    parts.push('<div class="banner">waiting for players...</div>');
  }

  // opponents: face-down counts only
  const seats = view.counts
    .map((count, seat) => {
      if (seat === view.seat) return "";
      const active = view.turn === seat ? " active" : "";
      return (
        `<div class="opponent${active}" data-seat="${seat}">` +
        `seat ${seat + 1}<span class="count-badge">${count}</span></div>`
      );
    })
    .join("");
  parts.push(`<div class="opponents">${seats}</div>`);

  const color = view.effective_color;
  const colorName = color ? COLOR_NAMES[color] : "none";
  parts.push(
    `<div class="table-center">` +
      `<span class="discard card ${view.discard_top ? cardClass(view.discard_top) : ""}">` +
      `${esc(view.discard_top ?? "--")}</span>` +
      `<span class="effective color-${colorName}">${colorName}</span>` +
      `<span class="direction">${view.direction === "cw" ? "&#8635;" : "&#8634;"}</span>` +
      `<span class="deck-count">deck: ${view.deck_count}</span>` +
      `</div>`,
  );

  const myTurn = view.pending !== null;
  parts.push(
    `<div class="turn-line">${
      state.winner !== null
        ? "game over"
        : myTurn
          ? "your turn"
          : view.turn !== null
            ? `seat ${view.turn + 1} to act`
            : ""
    }</div>`,
  );

  // own hand: enabled exactly per the server's legal list
  const legal = new Set(view.legal);
  const busy = state.awaitingVerdict !== null;
  const hand = view.hand
    .map((token, i) => {
      const enabled = !busy && view.pending !== null && view.pending !== "color" && legal.has(token);
      return (
        `<button class="card ${cardClass(token)}" data-card="${esc(token)}" data-index="${i}"` +
        `${enabled ? "" : " disabled"}>${esc(token)}</button>`
      );
    })
    .join("");
  parts.push(`<div class="hand">${hand}</div>`);

  const drawEnabled = !busy && view.pending === "play";
  const keepEnabled = !busy && view.pending === "playdrawn";
  parts.push(
    `<div class="controls">` +
      `<button data-action="draw"${drawEnabled ? "" : " disabled"}>draw</button>` +
      `<button data-action="keep"${keepEnabled ? "" : " disabled"}>keep drawn card</button>` +
      `</div>`,
  );

  if (state.colorPick || view.pending === "color") {
    const buttons = Object.entries(COLOR_NAMES)
      .map(
        ([code, name]) =>
          `<button class="color-choice color-${name}" data-color="${code}">${name}</button>`,
      )
      .join("");
    parts.push(`<div class="modal color-picker">pick a color ${buttons}</div>`);
  }

  if (state.rejection) {
    parts.push(`<div class="banner reject">move rejected: ${esc(state.rejection)}</div>`);
  }

  const log = state.events
    .slice(-30)
    .map((ev) => `<li>${esc(describe(ev))}</li>`)
    .join("");
  parts.push(`<ul class="event-log">${log}</ul>`);
  return parts.join("\n");
}
