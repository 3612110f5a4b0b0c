/** Connection and action plumbing around the state mirror.
 *
 * Every outbound message is validated against the wire schema before send;
 * moves carry fresh ids and are retried with the same id after a reconnect,
 * which the server treats idempotently.
 */

import type { Action, ClientMessage, SeatKind } from "./protocol.js";
import { parseServerMessage, validateOutbound } from "./protocol.js";
import type { ClientState } from "./state.js";
import {
  apply,
  colorPickCancelled,
  colorPickStarted,
  connectionChanged,
  initialState,
  moveSent,
} from "./state.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export class GameClient {
  state: ClientState = initialState();
  private socket: SocketLike | null = null;
  private moveSeq = 0;
  private lastMove: { id: string; action: Action } | null = null;
  private url = "";

  constructor(
    private onChange: (state: ClientState) => void,
    private socketFactory: SocketFactory,
  ) {}

  private emit(next: ClientState): void {
    this.state = next;
    this.onChange(next);
  }

  connect(url: string): void {
    this.url = url;
    this.emit(connectionChanged(this.state, "connecting"));
    const socket = this.socketFactory(url);
    this.socket = socket;
    socket.onopen = () => {
      this.emit(connectionChanged(this.state, "connected"));
      const { session, credential } = this.state;
      if (session && credential) {
        // resume: replay events we have not seen, then retry any move in flight
        this.sendRaw({
          v: 1,
          kind: "hello",
          session,
          credential,
          since: this.state.cursor,
        });
        if (this.lastMove && this.state.awaitingVerdict) {
          this.sendMoveRecord(this.lastMove);
        }
      }
    };
    socket.onmessage = (ev) => {
      const msg = parseServerMessage(String(ev.data));
      if (msg) this.emit(apply(this.state, msg));
    };
    socket.onclose = () => this.emit(connectionChanged(this.state, "closed"));
    socket.onerror = () => this.emit(connectionChanged(this.state, "closed"));
  }

  reconnect(): void {
    if (this.url) this.connect(this.url);
  }

  close(): void {
    this.socket?.close();
  }

  private sendRaw(msg: ClientMessage): void {
    const problem = validateOutbound(msg);
    if (problem) throw new Error(`refusing to send invalid message: ${problem}`);
    if (!this.socket) throw new Error("not connected");
    this.socket.send(JSON.stringify(msg));
  }

  createSession(seats: SeatKind[], seed?: number): void {
    const msg: ClientMessage = { v: 1, kind: "create", game: "uno", seats };
    if (seed !== undefined) msg.seed = seed;
    this.sendRaw(msg);
  }

  join(session: string, seat: number): void {
    this.sendRaw({ v: 1, kind: "join", session, seat });
  }

  private sendMoveRecord(record: { id: string; action: Action }): void {
    const { session, credential } = this.state;
    if (!session || !credential) throw new Error("no seat");
    this.sendRaw({
      v: 1,
      kind: "move",
      session,
      credential,
      id: record.id,
      action: record.action,
    });
  }

  private submit(action: Action): void {
    if (this.state.awaitingVerdict) return; // input disabled until the verdict
    const record = { id: `m${++this.moveSeq}`, action };
    this.lastMove = record;
    this.emit(moveSent(this.state, record.id));
    this.sendMoveRecord(record);
  }

  /** Click on a hand card: black cards detour through the color picker. */
  clickCard(token: string): void {
    const view = this.state.view;
    if (!view || !view.legal.includes(token)) return;
    const drawn = view.pending === "playdrawn";
    if (token === "W" || token === "D") {
      this.emit(colorPickStarted(this.state, token, drawn));
      return;
    }
    this.submit(drawn ? { type: "playdrawn" } : { type: "play", face: token });
  }

  pickColor(color: string): void {
    const pick = this.state.colorPick;
    if (pick) {
      this.emit(colorPickCancelled(this.state));
      this.submit(
        pick.drawn
          ? { type: "playdrawn", color }
          : { type: "play", face: pick.face, color },
      );
      return;
    }
    if (this.state.view?.pending === "color") {
      this.submit({ type: "color", color });
    }
  }

  draw(): void {
    if (this.state.view?.pending === "play") this.submit({ type: "draw" });
  }

  keepDrawn(): void {
    if (this.state.view?.pending === "playdrawn") this.submit({ type: "keep" });
  }
}
