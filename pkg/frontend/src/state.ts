/** Client state: a pure mirror of what the server has told us, nothing more.
 *
 * apply() folds one server message into the state and returns a fresh object,
 * so replaying a recorded stream always reproduces the same states.
 */

import type { GameEvent, SeatView, ServerMessage } from "./protocol.js";

export interface ClientState {
  status: "idle" | "connecting" | "connected" | "closed";
  session: string | null;
  seat: number | null;
  credential: string | null;
  view: SeatView | null;
  events: GameEvent[];
  cursor: number; // next event seq we expect
  awaitingVerdict: string | null; // move id in flight
  rejection: string | null;
  colorPick: { face: string; drawn: boolean } | null;
  winner: number | null;
  error: string | null;
}

export function initialState(): ClientState {
  return {
    status: "idle",
    session: null,
    seat: null,
    credential: null,
    view: null,
    events: [],
    cursor: 0,
    awaitingVerdict: null,
    rejection: null,
    colorPick: null,
    winner: null,
    error: null,
  };
}

export function apply(state: ClientState, msg: ServerMessage): ClientState {
  switch (msg.kind) {
    case "created":
      return { ...state, session: msg.session, error: null };
    case "joined":
      return {
        ...state,
        session: msg.session,
        seat: msg.seat,
        credential: msg.credential,
        error: null,
      };
    case "view":
      return { ...state, view: msg, winner: msg.winner ?? state.winner };
    case "event": {
      if (msg.seq < state.cursor) return state; // already seen
      const events = state.events.slice();
      events.push(msg.event);
      return { ...state, events, cursor: msg.seq + 1 };
    }
    case "verdict": {
      if (msg.id !== state.awaitingVerdict) return { ...state };
      // An accepted move consumes the prompt we acted on; the authoritative
      // follow-up view is already on its way, so blank the stale one.
      const view =
        msg.accepted && state.view
          ? { ...state.view, pending: null, legal: [] }
          : state.view;
      return {
        ...state,
        view,
        awaitingVerdict: null,
        rejection: msg.accepted ? null : (msg.reason ?? "rejected"),
      };
    }
    case "prompt":
      return state; // prompts mirror view.pending; the view is authoritative
    case "finish":
      return { ...state, winner: msg.winner };
    case "error":
      return { ...state, error: msg.reason };
    default:
      return state;
  }
}

export function connectionChanged(
  state: ClientState,
  status: ClientState["status"],
): ClientState {
  return { ...state, status };
}

export function moveSent(state: ClientState, id: string): ClientState {
  return { ...state, awaitingVerdict: id, rejection: null, colorPick: null };
}

export function colorPickStarted(
  state: ClientState,
  face: string,
  drawn: boolean,
): ClientState {
  return { ...state, colorPick: { face, drawn } };
}

export function colorPickCancelled(state: ClientState): ClientState {
  return { ...state, colorPick: null };
}
