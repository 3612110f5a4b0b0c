"""Card faces for all supported games, deck builders, and auxiliary-card provisioning."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Union


class Color(Enum):
    RED = "R"
    YELLOW = "Y"
    GREEN = "G"
    BLUE = "B"


COLORS: tuple[Color, ...] = tuple(Color)

# Printed characters on colored UNO cards: digits, skip, reverse, draw-two.
UNO_COLOR_SYMBOLS = tuple("0123456789") + ("S", "R", "+")
UNO_BLACK_SYMBOLS = ("W", "D")  # wild, wild-draw-four


@dataclass(frozen=True, slots=True)
class UnoFace:
    """One of the 54 UNO face types: a symbol plus a color (black faces carry none)."""

    symbol: str
    color: Color | None = None

    def __post_init__(self) -> None:
        if self.symbol in UNO_BLACK_SYMBOLS:
            if self.color is not None:
                raise ValueError(f"black face {self.symbol} carries no color")
        elif self.symbol in UNO_COLOR_SYMBOLS:
            if self.color is None:
                raise ValueError(f"colored face {self.symbol} needs a color")
        else:
            raise ValueError(f"unknown UNO symbol {self.symbol!r}")

    @property
    def is_black(self) -> bool:
        return self.color is None

    @property
    def number(self) -> int | None:
        return int(self.symbol) if self.symbol.isdigit() else None


SUITS = ("c", "d", "h", "s")  # clubs, diamonds, hearts, spades
RANKS = tuple(range(2, 15))  # 11=J, 12=Q, 13=K, 14=A
_RANK_CHARS = {11: "J", 12: "Q", 13: "K", 14: "A"}
_CHAR_RANKS = {v: k for k, v in _RANK_CHARS.items()}


@dataclass(frozen=True, slots=True)
class StandardFace:
    suit: str
    rank: int

    def __post_init__(self) -> None:
        if self.suit not in SUITS:
            raise ValueError(f"unknown suit {self.suit!r}")
        if self.rank not in RANKS:
            raise ValueError(f"rank out of range: {self.rank}")


@dataclass(frozen=True, slots=True)
class DominoFace:
    """An unordered pip pair, stored with lo <= hi."""

    lo: int
    hi: int

    def __post_init__(self) -> None:
        if not (0 <= self.lo <= self.hi <= 6):
            raise ValueError(f"bad domino pips ({self.lo},{self.hi})")

    @property
    def is_doublet(self) -> bool:
        return self.lo == self.hi


@dataclass(frozen=True, slots=True)
class AuxFace:
    """Auxiliary card role: the two bit-encoding types or an indexed owner marker."""

    role: str
    index: int | None = None

    def __post_init__(self) -> None:
        if self.role in ("ALPHA", "BETA"):
            if self.index is not None:
                raise ValueError(f"{self.role} takes no index")
        elif self.role == "THETA":
            if self.index is None or self.index < 1:
                raise ValueError("THETA needs an index >= 1")
        else:
            raise ValueError(f"unknown aux role {self.role!r}")


ALPHA = AuxFace("ALPHA")
BETA = AuxFace("BETA")


def theta(index: int) -> AuxFace:
    return AuxFace("THETA", index)


CardFace = Union[UnoFace, StandardFace, DominoFace, AuxFace]


def face_token(face: CardFace) -> str:
    """Compact text token for a face, stable across the transcript and wire formats."""
    if isinstance(face, UnoFace):
        return face.symbol if face.color is None else face.symbol + face.color.value
    if isinstance(face, StandardFace):
        return _RANK_CHARS.get(face.rank, str(face.rank)) + face.suit
    if isinstance(face, DominoFace):
        return f"{face.lo}-{face.hi}"
    if isinstance(face, AuxFace):
        return face.role if face.index is None else f"{face.role}{face.index}"
    raise TypeError(f"not a card face: {face!r}")


def parse_face(token: str) -> CardFace:
    """Inverse of face_token."""
    if token in ("ALPHA", "BETA"):
        return AuxFace(token)
    if token.startswith("THETA"):
        return theta(int(token[5:]))
    if "-" in token:
        lo, hi = token.split("-")
        return DominoFace(int(lo), int(hi))
    if token in UNO_BLACK_SYMBOLS:
        return UnoFace(token)
    if len(token) == 2 and token[0] in UNO_COLOR_SYMBOLS and token[1] in "RYGB":
        return UnoFace(token[0], Color(token[1]))
    if token[-1] in SUITS:
        rank_char = token[:-1]
        rank = _CHAR_RANKS.get(rank_char) or int(rank_char)
        return StandardFace(token[-1], rank)
    raise ValueError(f"unparseable face token {token!r}")


def all_uno_faces() -> list[UnoFace]:
    faces = [UnoFace(s, c) for s in UNO_COLOR_SYMBOLS for c in COLORS]
    faces += [UnoFace(s) for s in UNO_BLACK_SYMBOLS]
    return faces


def uno_copies(face: UnoFace) -> int:
    """Copies of a face in one physical deck: 0s are singletons, black cards come in fours."""
    if face.is_black:
        return 4
    return 1 if face.symbol == "0" else 2


def build_uno_deck() -> list[CardFace]:
    """The 108-card deck: per color one 0, two of each other colored face, four of each black face."""
    return [face for face in all_uno_faces() for _ in range(uno_copies(face))]


def build_standard_deck() -> list[CardFace]:
    """The 52-card deck, one face each."""
    return [StandardFace(s, r) for s in SUITS for r in RANKS]


def build_domino_deck() -> list[CardFace]:
    """All 28 pip pairs (lo, hi) with 0 <= lo <= hi <= 6."""
    return [DominoFace(lo, hi) for lo in range(7) for hi in range(lo, 7)]


@dataclass(frozen=True)
class AuxProvision:
    """Auxiliary cards needed for one selection run over k hidden cards and n piles."""

    theta_markers: int  # k, partitioned over piles at run time
    alpha_cards: int  # k + 2
    beta_cards: int  # k + 2
    extra_decks: int
    designation: dict[AuxFace, UnoFace]

    @property
    def total(self) -> int:
        return self.theta_markers + self.alpha_cards + self.beta_cards


def _deck_capacities(decks: int) -> list[int]:
    # Copies available per face type across `decks` physical decks, descending.
    return [4 * decks] * 2 + [2 * decks] * 48 + [decks] * 4


def _assignable(requirements: list[int], decks: int) -> bool:
    """Greedy matching: sorted requirements against sorted per-face capacities."""
    caps = _deck_capacities(decks)
    reqs = sorted(requirements, reverse=True)
    return len(reqs) <= len(caps) and all(r <= c for r, c in zip(reqs, caps))


def provision_aux(n_players: int, k: int) -> AuxProvision:
    """Auxiliary roles (3k+4 cards total) plus the minimum extra decks that can realize them.

    The deck bound assumes the worst split of the k markers: one pile may hold up to
    k-(n-1) cards while every other pile holds at least one.
    """
    if n_players < 2:
        raise ValueError("need at least 2 piles (one player plus the unplayed deck)")
    if k < 1:
        raise ValueError("need at least one hidden card")
    requirements = [k + 2, k + 2, max(1, k - (n_players - 1))] + [1] * (n_players - 1)
    decks = 1
    while not _assignable(requirements, decks):
        decks += 1
    designation: dict[AuxFace, UnoFace] = {ALPHA: UnoFace("W"), BETA: UnoFace("D")}
    numbered = [UnoFace(str(d), c) for d in range(1, 10) for c in COLORS]
    for i in range(1, n_players + 1):
        designation[theta(i)] = numbered[i - 1]
    return AuxProvision(
        theta_markers=k,
        alpha_cards=k + 2,
        beta_cards=k + 2,
        extra_decks=decks,
        designation=designation,
    )
