"""Table programs: secure AND on commitments, the covert lottery, and card selection.

Every protocol here is a deterministic function of its inputs and a random tape, and
emits all publicly observable actions to a transcript. Mutation flags deliberately
break individual steps so the verification suites can prove they notice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

from .deck import ALPHA, BETA, CardFace, Color, COLORS, UnoFace, face_token, theta
from .table import (
    Commitment,
    Pile,
    TableCard,
    Transcript,
    decode_pair,
    encode_bit,
    pile_scramble,
    reveal_at,
    turn_down_all,
)


class ProtocolError(ValueError):
    pass


class AuxPool:
    """Counts auxiliary cards taken from and returned to the shared box."""

    __slots__ = ("drawn", "returned")

    def __init__(self) -> None:
        self.drawn = 0
        self.returned = 0

    def draw(self, n: int) -> None:
        self.drawn += n

    def give_back(self, n: int) -> None:
        self.returned += n

    @property
    def outstanding(self) -> int:
        return self.drawn - self.returned


@dataclass(frozen=True, slots=True)
class AndOutput:
    and_pair: Commitment  # encodes x AND y
    nand_pair: Commitment  # encodes (NOT x) AND y
    spares: tuple[TableCard, TableCard]  # the two revealed cards, reusable


# Fixed public rearrangements for the AND protocol (1-based source indices).
_AND_SHUFFLE_PREP = (0, 2, 3, 1, 4, 5)
_AND_SHUFFLE_UNDO = (0, 3, 1, 2, 4, 5)


def six_card_and(x: Commitment, y: Commitment, spares: tuple[TableCard, TableCard],
                 tape, transcript: Transcript) -> AndOutput:
    """Compute commitments to x AND y and (NOT x) AND y with one two-pile scramble.

    The spare pair supplies a fresh zero encoding; the two cards revealed at the end
    are handed back so a caller can recycle them into the next invocation.
    """
    spare_a, spare_b = sorted(spares, key=lambda c: c.face != ALPHA)
    if (spare_a.face, spare_b.face) != (ALPHA, BETA):
        raise ProtocolError("spares must be one ALPHA and one BETA")
    row: list[TableCard] = [
        x.first, x.second,
        spare_a.up(), spare_b.up(),  # publicly a zero encoding
        y.first, y.second,
    ]
    for i, card in enumerate(row):
        transcript.place(1, i + 1, card)
    for i in (2, 3):
        row[i] = row[i].down()
        transcript.place(1, i + 1, row[i])

    row = _rearrange(row, _AND_SHUFFLE_PREP, transcript)
    halves = pile_scramble([row[:3], row[3:]], tape, transcript)
    row = halves[0] + halves[1]
    row = _rearrange(row, _AND_SHUFFLE_UNDO, transcript)

    row[0] = row[0].up()
    transcript.reveal(1, 1, row[0])
    row[1] = row[1].up()
    transcript.reveal(1, 2, row[1])
    middle = Commitment(row[2], row[3])
    right = Commitment(row[4], row[5])
    if row[0].face == ALPHA:
        and_pair, nand_pair = middle, right
    else:
        and_pair, nand_pair = right, middle
    return AndOutput(and_pair, nand_pair, (row[0], row[1]))


def _rearrange(row: list[TableCard], order: tuple[int, ...], transcript: Transcript) -> list[TableCard]:
    transcript.rearrange(tuple(i + 1 for i in order))
    return [row[i] for i in order]


@dataclass(frozen=True, slots=True)
class Selected:
    card: TableCard
    leftover: tuple[TableCard, ...]


@dataclass(frozen=True, slots=True)
class NoneValid:
    leftover: tuple[TableCard, ...]


LotteryOutcome = Union[Selected, NoneValid]

MODIFIED = "modified"
ORIGINAL = "original"


@dataclass(frozen=True)
class LotteryInput:
    cards: tuple[TableCard, ...]
    validity: tuple[Commitment, ...]
    mode: str = MODIFIED

    def __post_init__(self) -> None:
        if len(self.cards) != len(self.validity) or not self.cards:
            raise ProtocolError("need one validity commitment per card, at least one card")
        if self.mode not in (MODIFIED, ORIGINAL):
            raise ProtocolError(f"unknown lottery mode {self.mode!r}")


def covert_lottery(inp: LotteryInput, tape, transcript: Transcript,
                   pool: AuxPool | None = None,
                   mutations: frozenset[str] = frozenset()) -> LotteryOutcome:
    """Select one card uniformly among those whose commitment encodes 1.

    Modified mode may report that no card is valid; original mode always selects,
    falling back to a uniform choice over all cards when none is valid.
    """
    pool = pool or AuxPool()
    m = len(inp.cards)
    columns: list[Pile] = []
    for i in range(m):
        com = inp.validity[i]
        col = [inp.cards[i].down(), com.first, com.second]
        for r, card in enumerate(col):
            transcript.place(r + 1, i + 1, card)
        columns.append(col)

    if "skip-lottery-scramble-1" not in mutations:
        columns = pile_scramble(columns, tape, transcript)

    pool.draw(4)  # token pair plus one spare pair
    token = _place_token(encode_bit(1), m, transcript, announce=True)
    spares: tuple[TableCard, TableCard] = (TableCard(ALPHA), TableCard(BETA))

    rounds = m if inp.mode == MODIFIED else m - 1
    for i in range(rounds):
        committed = Commitment(columns[i][1], columns[i][2])
        transcript.remove(2, i + 1)
        transcript.remove(3, i + 1)
        transcript.remove(1, m + 1)
        transcript.remove(2, m + 1)
        out = six_card_and(committed, token, spares, tape, transcript)
        columns[i][1] = out.and_pair.first
        columns[i][2] = out.and_pair.second
        transcript.place(2, i + 1, columns[i][1])
        transcript.place(3, i + 1, columns[i][2])
        token = _place_token(out.nand_pair, m, transcript)
        spares = out.spares

    if inp.mode == ORIGINAL:
        # The last pile's own commitment is retired unseen; the token stands in for it.
        transcript.remove(2, m)
        transcript.remove(3, m)
        transcript.remove(1, m + 1)
        transcript.remove(2, m + 1)
        columns[m - 1][1] = token.first
        columns[m - 1][2] = token.second
        transcript.place(2, m, token.first)
        transcript.place(3, m, token.second)

    if "skip-lottery-scramble-2" not in mutations:
        columns = pile_scramble(columns, tape, transcript)

    hit = -1
    for i in range(m):
        reveal_at(columns, 1, i, transcript)
        reveal_at(columns, 2, i, transcript)
        if decode_pair(columns[i][1], columns[i][2]) == 1:
            if hit >= 0:
                raise ProtocolError("more than one lottery column decoded to 1")
            hit = i
    pool.give_back(4)

    if hit < 0:
        if inp.mode == ORIGINAL:
            raise ProtocolError("original mode must always select a card")
        return NoneValid(tuple(col[0] for col in columns))
    reveal_at(columns, 0, hit, transcript)
    leftover = tuple(col[0] for i, col in enumerate(columns) if i != hit)
    return Selected(columns[hit][0], leftover)


def _place_token(pair: Commitment, m: int, transcript: Transcript,
                 announce: bool = False) -> Commitment:
    # The opening token is laid out face-up so everyone can check it encodes 1;
    # later tokens are secret intermediate values and stay hidden.
    first, second = pair.cards()
    if announce:
        transcript.place(1, m + 1, first.up())
        transcript.place(2, m + 1, second.up())
    transcript.place(1, m + 1, first)
    transcript.place(2, m + 1, second)
    return pair


@dataclass(frozen=True)
class SelectionContext:
    """Hands laid out for one selection run: the acting pile first, the face-down
    draw deck last (possibly empty), and a public validity predicate over faces."""

    hands: tuple[tuple[TableCard, ...], ...]
    validity: Callable[[CardFace], bool]
    mode: str = MODIFIED


@dataclass(frozen=True)
class SelectionResult:
    outcome: LotteryOutcome
    hands: tuple[tuple[TableCard, ...], ...]
    aux_used: int
    shuffles: int
    total_cards: int
    acting_count: int


def card_selection(ctx: SelectionContext, tape, transcript: Transcript,
                   mutations: frozenset[str] = frozenset()) -> SelectionResult:
    """Play one uniformly random valid card from the acting pile, or report none.

    All piles, including the deck, are rebuilt with their original multisets; the
    acting pile additionally loses the selected card. The run consumes 3k+4 auxiliary
    cards and logs exactly (acting pile size)+5 scrambles when other piles exist.
    """
    n = len(ctx.hands)
    if n < 2:
        raise ProtocolError("need the acting pile plus at least the deck pile")
    acting_count = len(ctx.hands[0])
    total = sum(len(h) for h in ctx.hands)
    if acting_count == 0:
        return SelectionResult(NoneValid(()), ctx.hands, 0, 0, total, 0)

    pool = AuxPool()
    shuffles_before = transcript.n_shuffles

    # Phase 1-2: one column per hidden card, its owner marker beneath.
    columns: list[Pile] = []
    for owner, hand in enumerate(ctx.hands):
        for card in hand:
            col = [card.down()]
            transcript.place(1, len(columns) + 1, col[0])
            columns.append(col)
    pool.draw(total)
    col_index = 0
    for owner, hand in enumerate(ctx.hands):
        for _ in hand:
            index = owner + 1
            if "swap-theta" in mutations and owner == 1 and col_index == acting_count:
                index = 1
            marker = TableCard(theta(index), face_up=True)
            columns[col_index].append(marker)
            transcript.place(2, col_index + 1, marker)
            col_index += 1

    if "leak-card" in mutations:
        columns.pop()

    # Phase 3-5: hide, scramble, show the card row.
    turn_down_all(columns, transcript)
    if "skip-scramble-1" not in mutations:
        columns = pile_scramble(columns, tape, transcript)
    k = len(columns)
    for i in range(k):
        reveal_at(columns, 0, i, transcript)

    # Phase 6: public validity marking, value 1 beneath valid cards.
    pool.draw(2 * k)
    for i, col in enumerate(columns):
        face = col[0].face
        try:
            valid = bool(ctx.validity(face))
        except Exception as exc:
            raise ProtocolError(f"validity predicate failed on {face_token(face)}") from exc
        pair = encode_bit(1 if valid else 0)
        first, second = pair.cards()
        col.append(first.up())
        transcript.place(3, i + 1, col[2])
        col.append(second.up())
        transcript.place(4, i + 1, col[3])

    # Phase 7-9: hide, scramble, show the marker row.
    turn_down_all(columns, transcript)
    if "skip-scramble-2" not in mutations:
        columns = pile_scramble(columns, tape, transcript)
    if "extra-shuffle" in mutations:
        columns = pile_scramble(columns, tape, transcript)
    for i in range(k):
        reveal_at(columns, 1, i, transcript)

    # Phase 10: pull the acting player's columns, in current order, into the lottery.
    mine: list[Pile] = []
    rest: list[Pile] = []
    for i, col in enumerate(columns):
        if col[1].face == theta(1):
            for r in range(4):
                transcript.remove(r + 1, i + 1)
            mine.append(col)
        else:
            rest.append(col)
    pool.give_back(len(mine))  # their face-up markers go straight back to the box

    lottery_input = LotteryInput(
        cards=tuple(col[0] for col in mine),
        validity=tuple(Commitment(col[2], col[3]) for col in mine),
        mode=ctx.mode,
    )
    outcome = covert_lottery(lottery_input, tape, transcript, pool, mutations)
    pool.give_back(2 * len(mine))  # the revealed lottery commitments
    if "extra-aux" in mutations:
        pool.draw(2)

    # Phase 11: unselected cards return to the acting hand, face-down.
    new_hands: list[tuple[TableCard, ...]] = [tuple(c.down() for c in outcome.leftover)]

    # Phase 12-14: strip the validity row from the rest, hide, scramble, show markers.
    if rest:
        for i, col in enumerate(rest):
            transcript.remove(4, i + 1)
            transcript.remove(3, i + 1)
            del col[2:]
        pool.give_back(2 * len(rest))
        turn_down_all(rest, transcript)
        if "skip-scramble-3" not in mutations:
            rest = pile_scramble(rest, tape, transcript)
        for i in range(len(rest)):
            reveal_at(rest, 1, i, transcript)

        # Phase 15: sort by marker and hand every card back to its owner.
        order = sorted(range(len(rest)), key=lambda i: (rest[i][1].face.index, i))
        transcript.rearrange(tuple(i + 1 for i in order))
        rest = [rest[i] for i in order]
        returned: list[list[TableCard]] = [[] for _ in range(n)]
        for col in rest:
            returned[col[1].face.index - 1].append(col[0].down())
        pool.give_back(len(rest))
        new_hands.extend(tuple(returned[i]) for i in range(1, n))
    else:
        new_hands.extend(() for _ in range(1, n))

    aux_used = pool.drawn
    if pool.outstanding != 0 and not mutations:
        raise ProtocolError(f"{pool.outstanding} auxiliary cards not recovered")
    return SelectionResult(
        outcome=outcome,
        hands=tuple(new_hands),
        aux_used=aux_used,
        shuffles=transcript.n_shuffles - shuffles_before,
        total_cards=total,
        acting_count=acting_count,
    )


_COLOR_MARKERS = tuple(UnoFace("1", c) for c in COLORS)


def designate_color(tape, transcript: Transcript) -> Color:
    """Pick one of the four colors uniformly by scrambling four marker cards."""
    columns: list[Pile] = []
    for i, face in enumerate(_COLOR_MARKERS):
        card = TableCard(face, face_up=True)
        transcript.place(1, i + 1, card)
        columns.append([card])
    turn_down_all(columns, transcript)
    columns = pile_scramble(columns, tape, transcript)
    face = reveal_at(columns, 0, 0, transcript)
    return face.color
