"""Regenerate test/fixtures/session-stream.json: a full scripted session as the
seat-0 client sees it (delivery-ordered server messages), the client's outbound
messages, and the ground-truth hidden tokens for the privacy snapshot test.

Run from the frontend directory: python3 scripts/record_fixture.py
"""

import json
import pathlib
import sys

from cardsim.service import SessionHub

OUT = pathlib.Path(__file__).parent.parent / "test" / "fixtures" / "session-stream.json"
SEED = 29


def main() -> None:
    hub = SessionHub()
    stream: list[dict] = []
    outbound: list[dict] = []
    cursor = 0
    finish_sent = False

    def send(msg: dict) -> dict:
        outbound.append(msg)
        reply = hub.handle(msg)
        stream.append(reply)
        return reply

    created = send({"v": 1, "kind": "create", "game": "uno",
                    "seats": ["human", "virtual", "virtual"], "seed": SEED})
    session = created["session"]
    joined = send({"v": 1, "kind": "join", "session": session, "seat": 0})
    credential = joined["credential"]

    def push() -> dict:
        # mirror the websocket layer: pending events, then a view, then a prompt
        nonlocal cursor, finish_sent
        for msg in hub.events_since(session, credential, cursor):
            if msg["kind"] == "event":
                cursor = msg["seq"] + 1
                stream.append(msg)
            elif msg["kind"] == "finish" and not finish_sent:
                finish_sent = True
                stream.append(msg)
        view = hub.handle({"v": 1, "kind": "view", "session": session,
                           "credential": credential})
        stream.append(view)
        prompt = hub.prompt_for(session, credential)
        if prompt:
            stream.append(prompt)
        return view

    view = push()
    moves = 0
    while view["phase"] == "active" and view["pending"] and moves < 600:
        moves += 1
        if view["pending"] == "play":
            if view["legal"]:
                face = view["legal"][0]
                action = {"type": "play", "face": face}
                if face in ("W", "D"):
                    action["color"] = "R"
            else:
                action = {"type": "draw"}
        elif view["pending"] == "playdrawn":
            action = {"type": "playdrawn"}
            if view["legal"][0] in ("W", "D"):
                action["color"] = "B"
        else:
            action = {"type": "color", "color": "G"}
        send({"v": 1, "kind": "move", "session": session, "credential": credential,
              "id": f"m{moves}", "action": action})
        view = push()

    game = hub.session_for_export(session).game
    public = {ev.get("face") for ev in game.events if "face" in ev}
    for msg in stream:  # anything the seat could legitimately render
        if msg["kind"] == "view":
            public.update(msg["hand"])
            public.add(msg["discard_top"])
    hidden = set()
    for i, seat in enumerate(game.seats):
        if i != 0:
            hidden.update(game.hand_tokens(i))
    from cardsim.deck import face_token

    hidden.update(face_token(c.face) for c in game.unplayed)
    hidden -= public

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps({
        "seat": 0,
        "seed": SEED,
        "winner": game.winner,
        "stream": stream,
        "outbound": outbound,
        "hidden": sorted(hidden),
    }, indent=1) + "\n")
    print(f"wrote {OUT} ({len(stream)} messages, {len(hidden)} hidden tokens, "
          f"winner seat {game.winner})")


if __name__ == "__main__":
    sys.exit(main())
