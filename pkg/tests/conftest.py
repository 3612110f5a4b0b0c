from __future__ import annotations

from cardsim.deck import CardFace, parse_face
from cardsim.table import TableCard


def uf(token: str) -> CardFace:
    return parse_face(token)


def cards(*tokens: str) -> tuple[TableCard, ...]:
    return tuple(TableCard(parse_face(t)) for t in tokens)


def tokens_of(hand) -> list[str]:
    from cardsim.deck import face_token

    return sorted(face_token(c.face) for c in hand)
