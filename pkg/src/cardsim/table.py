"""The abstract table: oriented cards, piles, bit commitments, shuffles, and the public transcript.

Everything a bystander can observe goes through a Transcript. Faces enter events only
when the card is face-up at event time, which makes transcript comparison the security
boundary for the whole package: verification never looks at hidden state, only at
transcripts plus declared public inputs.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .deck import ALPHA, BETA, AuxFace, CardFace, face_token


@dataclass(frozen=True, slots=True)
class TableCard:
    face: CardFace
    face_up: bool = False

    def up(self) -> "TableCard":
        return self if self.face_up else TableCard(self.face, True)

    def down(self) -> "TableCard":
        return TableCard(self.face, False) if self.face_up else self


Pile = list  # ordered stack of TableCard; columns of a layout are piles


class Transcript:
    """Append-only record of observation events.

    Event tuples:
      ("PLACE", row, col, token | None)   token present only for face-up placements
      ("REVEAL", row, col, token)
      ("SHUFFLE", piles, cards_per_pile)
      ("REARRANGE", order)                1-based source indices, publicly announced
      ("REMOVE", row, col)
    """

    __slots__ = ("events", "n_shuffles")

    def __init__(self) -> None:
        self.events: list[tuple] = []
        self.n_shuffles = 0

    def place(self, row: int, col: int, card: TableCard) -> None:
        token = face_token(card.face) if card.face_up else None
        self.events.append(("PLACE", row, col, token))

    def reveal(self, row: int, col: int, card: TableCard) -> None:
        if not card.face_up:
            raise ValueError("cannot log a reveal for a face-down card")
        self.events.append(("REVEAL", row, col, face_token(card.face)))

    def shuffle(self, piles: int, cards_per_pile: int) -> None:
        self.events.append(("SHUFFLE", piles, cards_per_pile))
        self.n_shuffles += 1

    def rearrange(self, order: Sequence[int]) -> None:
        self.events.append(("REARRANGE", tuple(order)))

    def remove(self, row: int, col: int) -> None:
        self.events.append(("REMOVE", row, col))

    def lines(self) -> list[str]:
        out = []
        for ev in self.events:
            kind = ev[0]
            if kind == "PLACE":
                _, r, c, token = ev
                out.append(
                    f"PLACE r{r}c{c} UP {token}" if token else f"PLACE r{r}c{c} DOWN"
                )
            elif kind == "REVEAL":
                _, r, c, token = ev
                out.append(f"REVEAL r{r}c{c} {token}")
            elif kind == "SHUFFLE":
                out.append(f"SHUFFLE m={ev[1]} k={ev[2]}")
            elif kind == "REARRANGE":
                out.append("REARRANGE " + " ".join(str(i) for i in ev[1]))
            else:
                out.append(f"REMOVE r{ev[1]}c{ev[2]}")
        return out

    def serialize(self) -> str:
        return "\n".join(self.lines()) + "\n"

    def tokens(self, kinds: Iterable[str] = ("PLACE", "REVEAL")) -> list[str]:
        """All face tokens appearing in events of the given kinds."""
        wanted = set(kinds)
        return [ev[3] for ev in self.events if ev[0] in wanted and ev[3] is not None]


class TallyTranscript(Transcript):
    """Count-only transcript for bulk simulation: same API, no stored events."""

    __slots__ = ("n_events",)

    def __init__(self) -> None:
        super().__init__()
        self.n_events = 0

    def place(self, row: int, col: int, card: TableCard) -> None:
        self.n_events += 1

    def reveal(self, row: int, col: int, card: TableCard) -> None:
        self.n_events += 1

    def shuffle(self, piles: int, cards_per_pile: int) -> None:
        self.n_events += 1
        self.n_shuffles += 1

    def rearrange(self, order: Sequence[int]) -> None:
        self.n_events += 1

    def remove(self, row: int, col: int) -> None:
        self.n_events += 1

    def lines(self) -> list[str]:
        raise TypeError("tally transcript keeps no events")


class SeededTape:
    """Uniform permutations from a 64-bit seeded deterministic generator."""

    def __init__(self, seed: int) -> None:
        self.seed = seed
        self._rng = random.Random(seed)

    def _below(self, n: int) -> int:
        # Unbiased rejection sampling over getrandbits.
        bits = n.bit_length()
        r = self._rng.getrandbits(bits)
        while r >= n:
            r = self._rng.getrandbits(bits)
        return r

    def permutation(self, n: int) -> tuple[int, ...]:
        if n < 1:
            raise ValueError("permutation size must be >= 1")
        out = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self._below(i + 1)
            out[i], out[j] = out[j], out[i]
        return tuple(out)


class ExplicitTape:
    """Replays a fixed sequence of permutations; the oracle's stand-in for randomness."""

    def __init__(self, perms: Sequence[Sequence[int]]) -> None:
        self._perms = [tuple(p) for p in perms]
        self._next = 0

    def permutation(self, n: int) -> tuple[int, ...]:
        if self._next >= len(self._perms):
            raise ValueError("explicit tape exhausted")
        perm = self._perms[self._next]
        self._next += 1
        if len(perm) != n or sorted(perm) != list(range(n)):
            raise ValueError(f"tape entry {perm} is not a permutation of size {n}")
        return perm

    @property
    def exhausted(self) -> bool:
        return self._next == len(self._perms)


class RecordingTape:
    """Wraps another tape and records the sizes requested, for tape enumeration."""

    def __init__(self, inner) -> None:
        self.inner = inner
        self.sizes: list[int] = []

    def permutation(self, n: int) -> tuple[int, ...]:
        self.sizes.append(n)
        return self.inner.permutation(n)


RandomTape = SeededTape  # canonical source; ExplicitTape/RecordingTape satisfy the same shape


def pile_scramble(piles: Sequence[Pile], tape, transcript: Transcript) -> list[Pile]:
    """Rearrange equal-sized piles by one permutation drawn from the tape.

    The transcript shows only that a scramble of m piles of k cards happened.
    """
    m = len(piles)
    if m < 1:
        raise ValueError("need at least one pile")
    depth = len(piles[0])
    if depth < 1 or any(len(p) != depth for p in piles):
        raise ValueError("pile-scramble requires equal, nonempty piles")
    perm = tape.permutation(m)
    transcript.shuffle(m, depth)
    return [piles[i] for i in perm]


@dataclass(frozen=True, slots=True)
class Commitment:
    """An ordered face-down pair of the two bit-encoding aux faces; (ALPHA, BETA) is 0."""

    first: TableCard
    second: TableCard

    def __post_init__(self) -> None:
        faces = {self.first.face, self.second.face}
        if faces != {ALPHA, BETA}:
            raise ValueError("commitment must hold one ALPHA and one BETA")
        if self.first.face_up or self.second.face_up:
            raise ValueError("commitment cards must be face-down")

    def decode(self) -> int:
        return 0 if self.first.face == ALPHA else 1

    def cards(self) -> tuple[TableCard, TableCard]:
        return (self.first, self.second)


def decode_pair(first: TableCard, second: TableCard) -> int:
    """Bit encoded by two revealed encoding cards, in order."""
    if {first.face, second.face} != {ALPHA, BETA}:
        raise ValueError("not an encoding pair")
    return 0 if first.face == ALPHA else 1


def encode_bit(bit: int) -> Commitment:
    """Fresh face-down commitment encoding the given bit."""
    a, b = TableCard(ALPHA), TableCard(BETA)
    return Commitment(a, b) if bit == 0 else Commitment(b, a)


def commit_from(cards: Sequence[TableCard]) -> Commitment:
    first, second = cards
    return Commitment(first.down(), second.down())


def reveal_at(columns: list[Pile], row: int, col: int, transcript: Transcript) -> CardFace:
    """Turn the card at (row, col) face-up and log it; idempotent for face-up cards."""
    column = columns[col]
    card = column[row]
    if card.face_up:
        return card.face
    card = card.up()
    column[row] = card
    transcript.reveal(row + 1, col + 1, card)
    return card.face


def turn_down_all(columns: list[Pile], transcript: Transcript) -> None:
    """Flip every face-up card in the layout; only flips are logged, without faces."""
    for c, column in enumerate(columns):
        for r, card in enumerate(column):
            if card.face_up:
                down = card.down()
                column[r] = down
                transcript.place(r + 1, c + 1, down)


def place_card(columns: list[Pile], col: int, card: TableCard, transcript: Transcript) -> None:
    """Append a card to a column and log the placement."""
    column = columns[col]
    column.append(card)
    transcript.place(len(column), col + 1, card)


def is_marker(face: CardFace, index: int | None = None) -> bool:
    return isinstance(face, AuxFace) and face.role == "THETA" and (
        index is None or face.index == index
    )
