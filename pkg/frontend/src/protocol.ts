/** Wire protocol types and outbound validation.
 *
 * The client never invents message kinds: everything sent must pass
 * validateOutbound, which mirrors the server's schema exactly.
 */

export const WIRE_VERSION = 1;

export type SeatKind = "human" | "virtual";

export type Action =
  | { type: "play"; face: string; color?: string }
  | { type: "draw" }
  | { type: "playdrawn"; color?: string }
  | { type: "keep" }
  | { type: "color"; color: string };

export type ClientMessage =
  | { v: 1; kind: "create"; game: "uno"; seats: SeatKind[]; seed?: number }
  | { v: 1; kind: "join"; session: string; seat: number }
  | { v: 1; kind: "hello"; session: string; credential: string; since?: number }
  | { v: 1; kind: "view"; session: string; credential: string }
  | { v: 1; kind: "move"; session: string; credential: string; id: string; action: Action };

export interface SeatView {
  v: 1;
  kind: "view";
  session: string;
  seat: number;
  phase: "waiting" | "active" | "finished";
  hand: string[];
  counts: number[];
  deck_count: number;
  discard_top: string | null;
  effective_color: string | null;
  direction: "cw" | "ccw";
  turn: number | null;
  pending: "play" | "playdrawn" | "color" | null;
  legal: string[];
  events_total: number;
  winner: number | null;
}

export interface GameEvent {
  type: string;
  seat?: number;
  face?: string;
  color?: string;
  count?: number;
  direction?: string;
  winner?: number;
}

export type ServerMessage =
  | { v: 1; kind: "created"; session: string; seats: SeatKind[] }
  | { v: 1; kind: "joined"; session: string; seat: number; credential: string }
  | SeatView
  | { v: 1; kind: "prompt"; prompt: "play" | "playdrawn" | "color"; legal: string[]; can_draw: boolean }
  | { v: 1; kind: "verdict"; id: string; accepted: boolean; reason?: string }
  | { v: 1; kind: "event"; seq: number; event: GameEvent }
  | { v: 1; kind: "finish"; winner: number }
  | { v: 1; kind: "error"; reason: string };

const ACTION_TYPES = new Set(["play", "draw", "playdrawn", "keep", "color"]);
const COLORS = new Set(["R", "Y", "G", "B"]);

/** Returns null when the message is schema-clean, else a reason string. */
export function validateOutbound(msg: unknown): string | null {
  if (typeof msg !== "object" || msg === null) return "not-an-object";
  const m = msg as Record<string, unknown>;
  if (m.v !== WIRE_VERSION) return "bad-version";
  switch (m.kind) {
    case "create":
      if (m.game !== "uno") return "bad-game";
      if (!Array.isArray(m.seats) || m.seats.some((s) => s !== "human" && s !== "virtual"))
        return "bad-seats";
      if (m.seed !== undefined && typeof m.seed !== "number") return "bad-seed";
      return null;
    case "join":
      if (typeof m.session !== "string") return "missing-session";
      if (typeof m.seat !== "number") return "missing-seat";
      return null;
    case "hello":
      if (typeof m.session !== "string") return "missing-session";
      if (typeof m.credential !== "string") return "missing-credential";
      if (m.since !== undefined && typeof m.since !== "number") return "bad-since";
      return null;
    case "view":
      if (typeof m.session !== "string") return "missing-session";
      if (typeof m.credential !== "string") return "missing-credential";
      return null;
    case "move": {
      if (typeof m.session !== "string") return "missing-session";
      if (typeof m.credential !== "string") return "missing-credential";
      if (typeof m.id !== "string" || m.id.length === 0) return "missing-id";
      const action = m.action as Record<string, unknown> | undefined;
      if (typeof action !== "object" || action === null) return "missing-action";
      if (!ACTION_TYPES.has(action.type as string)) return "unknown-action";
      if (action.type === "play" && typeof action.face !== "string") return "missing-face";
      if (action.type === "color" && !COLORS.has(action.color as string)) return "missing-color";
      if (
        (action.type === "play" || action.type === "playdrawn") &&
        action.color !== undefined &&
        !COLORS.has(action.color as string)
      )
        return "bad-color";
      return null;
    }
    default:
      return "unknown-kind";
  }
}

export function parseServerMessage(raw: string): ServerMessage | null {
  let parsed: unknown;
  try {
    parsed = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof parsed !== "object" || parsed === null) return null;
  const m = parsed as Record<string, unknown>;
  if (m.v !== WIRE_VERSION || typeof m.kind !== "string") return null;
  return parsed as ServerMessage;
}
