"""Session service: game creation, per-seat views, move submission, event streams.

The hub is transport-free and speaks the wire schema directly (dict in, dict out),
so tests and the websocket layer drive the exact same code. One lock serializes all
commands; sessions are independent. Views are the privacy boundary: a seat sees its
own hand, everyone's counts, and the public match state, nothing else.
"""

from __future__ import annotations

import json
import secrets
import threading
from dataclasses import dataclass, field

from .deck import Color, UnoFace, face_token, parse_face
from .replay import ReplayFile, write_replay
from .table import SeededTape
from .uno import HUMAN, VIRTUAL, IllegalMove, UnoGame, setup_game, uno_valid

WIRE_VERSION = 1

INBOUND_KINDS = ("hello", "create", "join", "view", "move")
ACTION_TYPES = ("play", "draw", "playdrawn", "keep", "color")


def validate_message(msg) -> str | None:
    """Schema check for one inbound message; returns a reason string on failure."""
    if not isinstance(msg, dict):
        return "not-an-object"
    if msg.get("v") != WIRE_VERSION:
        return "bad-version"
    kind = msg.get("kind")
    if kind not in INBOUND_KINDS:
        return "unknown-kind"
    required: dict[str, type] = {
        "hello": {"session": str, "credential": str},
        "create": {"game": str, "seats": list},
        "join": {"session": str, "seat": int},
        "view": {"session": str, "credential": str},
        "move": {"session": str, "credential": str, "id": str, "action": dict},
    }[kind]
    for name, typ in required.items():
        if not isinstance(msg.get(name), typ):
            return f"missing-{name}"
    if kind == "move":
        action = msg["action"]
        if action.get("type") not in ACTION_TYPES:
            return "unknown-action"
        if action["type"] == "color" and not isinstance(action.get("color"), str):
            return "missing-color"
        if action["type"] == "play" and not isinstance(action.get("face"), str):
            return "missing-face"
    return None


def _error(reason: str) -> dict:
    return {"v": WIRE_VERSION, "kind": "error", "reason": reason}


@dataclass
class SessionSeat:
    kind: str
    credential: str | None = None


@dataclass
class Session:
    id: str
    seed: int
    game: UnoGame
    seats: list[SessionSeat]
    phase: str = "waiting"
    verdicts: dict[str, dict] = field(default_factory=dict)
    moves: list[tuple] = field(default_factory=list)
    pending_drawn: tuple[int, UnoFace] | None = None

    def seat_of(self, credential: str) -> int | None:
        for i, seat in enumerate(self.seats):
            if seat.credential == credential:
                return i
        return None


class SessionHub:
    """All live sessions; every public method takes and returns wire dicts."""

    def __init__(self, default_seed: int | None = None) -> None:
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self._default_seed = default_seed

    # ------------------------------------------------------------- commands

    def handle(self, msg) -> dict:
        """Dispatch one inbound message to its handler."""
        reason = validate_message(msg)
        if reason:
            return _error(reason)
        with self._lock:
            if msg["kind"] == "create":
                return self._create(msg)
            if msg["kind"] == "join":
                return self._join(msg)
            if msg["kind"] in ("view", "hello"):
                return self._view_msg(msg)
            return self._move(msg)

    def _create(self, msg) -> dict:
        if msg["game"] != "uno":
            return _error("unsupported-game")
        kinds = list(msg["seats"])
        if not kinds or any(k not in (HUMAN, VIRTUAL) for k in kinds):
            return _error("bad-seat-plan")
        if all(k == VIRTUAL for k in kinds):
            return _error("need-a-human")
        if not 2 <= len(kinds) <= 10:
            return _error("bad-seat-count")
        seed = msg.get("seed")
        if seed is None:
            seed = self._default_seed if self._default_seed is not None else secrets.randbits(48)
        session_id = secrets.token_urlsafe(8)
        game = setup_game(kinds, SeededTape(seed))
        session = Session(session_id, seed, game, [SessionSeat(k) for k in kinds])
        self._sessions[session_id] = session
        return {
            "v": WIRE_VERSION,
            "kind": "created",
            "session": session_id,
            "seats": kinds,
        }

    def _join(self, msg) -> dict:
        session = self._sessions.get(msg["session"])
        if session is None:
            return _error("unknown-session")
        seat_idx = msg["seat"]
        if not 0 <= seat_idx < len(session.seats):
            return _error("no-such-seat")
        seat = session.seats[seat_idx]
        if seat.kind != HUMAN:
            return _error("seat-not-human")
        if seat.credential is not None:
            return _error("seat-taken")
        seat.credential = secrets.token_urlsafe(12)
        if session.phase == "waiting" and all(
            s.credential for s in session.seats if s.kind == HUMAN
        ):
            session.phase = "active"
            session.game.advance_virtuals()
            self._settle(session)
        return {
            "v": WIRE_VERSION,
            "kind": "joined",
            "session": session.id,
            "seat": seat_idx,
            "credential": seat.credential,
        }

    def _resolve(self, msg) -> tuple[Session, int] | dict:
        session = self._sessions.get(msg["session"])
        if session is None:
            return _error("unknown-session")
        seat_idx = session.seat_of(msg["credential"])
        if seat_idx is None:
            return _error("unknown-credential")
        return session, seat_idx

    def _view_msg(self, msg) -> dict:
        got = self._resolve(msg)
        if isinstance(got, dict):
            return got
        session, seat_idx = got
        return self.view(session, seat_idx)

    def _move(self, msg) -> dict:
        got = self._resolve(msg)
        if isinstance(got, dict):
            return got
        session, seat_idx = got
        move_id = msg["id"]
        if move_id in session.verdicts:
            return session.verdicts[move_id]
        verdict = self._apply_action(session, seat_idx, msg["action"])
        verdict["id"] = move_id
        session.verdicts[move_id] = verdict
        return verdict

    def _apply_action(self, session: Session, seat_idx: int, action: dict) -> dict:
        game = session.game

        def rejected(reason: str) -> dict:
            return {"v": WIRE_VERSION, "kind": "verdict", "accepted": False, "reason": reason}

        def accepted() -> dict:
            return {"v": WIRE_VERSION, "kind": "verdict", "accepted": True}

        if session.phase != "active":
            return rejected("not-active")
        kind = action["type"]
        try:
            if kind == "color":
                if game.pending_color != seat_idx:
                    return rejected("no-pending-color")
                game.resolve_pending_color(Color(action["color"]))
                session.moves.append((seat_idx, ("color", action["color"])))
            elif kind == "play":
                if session.pending_drawn is not None:
                    return rejected("answer-drawn-card-first")
                if game.pending_color is not None:
                    return rejected("color-decision-pending")
                if game.match.turn != seat_idx:
                    return rejected("out-of-turn")
                face = parse_face(action["face"])
                if not isinstance(face, UnoFace):
                    return rejected("illegal-face")
                color = Color(action["color"]) if action.get("color") else None
                game.apply_play(seat_idx, face, color)
                record = ("play", action["face"]) + ((color.value,) if color else ())
                session.moves.append((seat_idx, record))
            elif kind == "draw":
                if session.pending_drawn is not None:
                    return rejected("answer-drawn-card-first")
                if game.pending_color is not None:
                    return rejected("color-decision-pending")
                if game.match.turn != seat_idx:
                    return rejected("out-of-turn")
                session.moves.append((seat_idx, ("draw",)))
                if game._draw_into_hand(seat_idx, 1) == 0:
                    game.pass_turn(seat_idx)
                else:
                    drawn = game.seats[seat_idx].hand[-1].face
                    if uno_valid(drawn, game.match):
                        session.pending_drawn = (seat_idx, drawn)
                    else:
                        game.pass_turn(seat_idx)
            elif kind == "playdrawn":
                if session.pending_drawn is None or session.pending_drawn[0] != seat_idx:
                    return rejected("no-pending-drawn")
                drawn = session.pending_drawn[1]
                color = Color(action["color"]) if action.get("color") else None
                game.apply_play(seat_idx, drawn, color)
                session.pending_drawn = None
                record = ("playdrawn",) + ((color.value,) if color else ())
                session.moves.append((seat_idx, record))
            else:  # keep
                if session.pending_drawn is None or session.pending_drawn[0] != seat_idx:
                    return rejected("no-pending-drawn")
                session.pending_drawn = None
                game.pass_turn(seat_idx)
                session.moves.append((seat_idx, ("keep",)))
        except IllegalMove as exc:
            return rejected(exc.reason)
        except (ValueError, KeyError):
            return rejected("illegal-face")
        game.advance_virtuals()
        self._settle(session)
        return accepted()

    def _settle(self, session: Session) -> None:
        if session.game.finished:
            session.phase = "finished"

    # ---------------------------------------------------------------- views

    def view(self, session: Session, seat_idx: int) -> dict:
        game = session.game
        pending = None
        legal: list[str] = []
        if session.phase == "active":
            if game.pending_color == seat_idx:
                pending = "color"
            elif session.pending_drawn and session.pending_drawn[0] == seat_idx:
                pending = "playdrawn"
                drawn = session.pending_drawn[1]
                legal = [face_token(drawn)]
            elif game.match.turn == seat_idx and game.pending_color is None:
                pending = "play"
                legal = sorted(face_token(f) for f in game.legal_plays(seat_idx))
        effective = game.match.effective_color() if game.match else None
        return {
            "v": WIRE_VERSION,
            "kind": "view",
            "session": session.id,
            "seat": seat_idx,
            "phase": session.phase,
            "hand": sorted(game.hand_tokens(seat_idx)),
            "counts": [len(s.hand) for s in game.seats],
            "deck_count": len(game.unplayed),
            "discard_top": face_token(game.match.top) if game.match else None,
            "effective_color": effective.value if effective else None,
            "direction": "cw" if game.match and game.match.direction > 0 else "ccw",
            "turn": game.match.turn if game.match else None,
            "pending": pending,
            "legal": legal,
            "events_total": len(game.events),
            "winner": game.winner,
        }

    def events_since(self, session_id: str, credential: str, since: int) -> list[dict] | dict:
        with self._lock:
            session = self._sessions.get(session_id)
            if session is None:
                return _error("unknown-session")
            if session.seat_of(credential) is None:
                return _error("unknown-credential")
            out = [
                {"v": WIRE_VERSION, "kind": "event", "seq": i, "event": ev}
                for i, ev in enumerate(session.game.events[since:], start=since)
            ]
            if session.phase == "finished":
                out.append(
                    {"v": WIRE_VERSION, "kind": "finish", "winner": session.game.winner}
                )
            return out

    def prompt_for(self, session_id: str, credential: str) -> dict | None:
        """Prompt message for a seat when the game is waiting on it, else None."""
        with self._lock:
            session = self._sessions.get(session_id)
            if session is None:
                return None
            seat_idx = session.seat_of(credential)
            if seat_idx is None:
                return None
            view = self.view(session, seat_idx)
        if view["pending"] is None:
            return None
        return {
            "v": WIRE_VERSION,
            "kind": "prompt",
            "prompt": view["pending"],
            "legal": view["legal"],
            "can_draw": view["pending"] == "play",
        }

    def session_for_export(self, session_id: str) -> Session | None:
        return self._sessions.get(session_id)

    def export_replay(self, session_id: str) -> str:
        session = self._sessions[session_id]
        kinds = [s.kind for s in session.seats]
        replay = ReplayFile(
            "uno", kinds, session.seed, list(session.moves),
            session.game.transcript.lines(),
        )
        return write_replay(replay)


# ------------------------------------------------------------------ websocket


def serve(host: str = "127.0.0.1", port: int = 8750, ui_dir: str | None = None,
          seed: int | None = None, delay: float = 0.0) -> None:
    """Run the websocket server (blocking)."""
    import asyncio

    asyncio.run(serve_async(host, port, ui_dir, seed, delay=delay))


async def serve_async(host: str, port: int, ui_dir: str | None = None,
                      seed: int | None = None, ready=None,
                      delay: float = 0.0) -> None:
    import asyncio
    import http
    from pathlib import Path

    from websockets.asyncio.server import serve as ws_serve

    hub = SessionHub(default_seed=seed)
    watchers: dict[str, set] = {}  # session id -> set of (websocket, credential)

    def static_response(connection, request):
        from websockets.datastructures import Headers
        from websockets.http11 import Response

        if "Upgrade" in request.headers:
            return None
        if ui_dir is None:
            return connection.respond(http.HTTPStatus.NOT_FOUND, "no UI bundled\n")
        root = Path(ui_dir).resolve()
        raw = request.path.split("?", 1)[0]
        target = root / "index.html" if raw == "/" else (root / raw.lstrip("/")).resolve()
        if not str(target).startswith(str(root)) or not target.is_file():
            return connection.respond(http.HTTPStatus.NOT_FOUND, "not found\n")
        types = {".html": "text/html", ".js": "text/javascript",
                 ".css": "text/css", ".map": "application/json",
                 ".json": "application/json"}
        body = target.read_bytes()
        headers = Headers({
            "Content-Type": types.get(target.suffix, "application/octet-stream"),
            "Content-Length": str(len(body)),
        })
        return Response(http.HTTPStatus.OK, "OK", headers, body)

    async def push_session(session_id: str) -> None:
        for ws, credential in list(watchers.get(session_id, ())):
            try:
                await push_client(ws, session_id, credential)
            except Exception:
                watchers[session_id].discard((ws, credential))

    async def push_client(ws, session_id: str, credential: str) -> None:
        state = ws.client_state
        events = hub.events_since(session_id, credential, state.get("cursor", 0))
        if isinstance(events, dict):
            return
        for msg in events:
            if msg["kind"] == "event":
                state["cursor"] = msg["seq"] + 1
            if msg["kind"] == "finish" and state.get("finished_sent"):
                continue
            if msg["kind"] == "finish":
                state["finished_sent"] = True
            await ws.send(json.dumps(msg))
            if delay and msg["kind"] == "event":
                import asyncio

                await asyncio.sleep(delay)
        view = hub.handle({"v": 1, "kind": "view", "session": session_id,
                           "credential": credential})
        await ws.send(json.dumps(view))
        prompt = hub.prompt_for(session_id, credential)
        if prompt:
            await ws.send(json.dumps(prompt))

    async def handler(ws) -> None:
        ws.client_state = {"cursor": 0}
        session_id = credential = None
        async for raw in ws:
            try:
                msg = json.loads(raw)
            except ValueError:
                await ws.send(json.dumps(_error("bad-json")))
                continue
            reply = hub.handle(msg)
            await ws.send(json.dumps(reply))
            if reply.get("kind") == "joined":
                session_id = reply["session"]
                credential = reply["credential"]
                watchers.setdefault(session_id, set()).add((ws, credential))
            if msg.get("kind") == "hello" and reply.get("kind") == "view":
                session_id = msg["session"]
                credential = msg["credential"]
                ws.client_state["cursor"] = int(msg.get("since", 0))
                watchers.setdefault(session_id, set()).add((ws, credential))
            if session_id:
                await push_session(session_id)
        if session_id:
            watchers.get(session_id, set()).discard((ws, credential))

    async with ws_serve(handler, host, port, process_request=static_response) as server:
        if ready is not None:
            ready.set_result(server.sockets[0].getsockname()[1])
        await asyncio.get_running_loop().create_future()  # run forever
