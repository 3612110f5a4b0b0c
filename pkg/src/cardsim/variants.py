"""Sevens, Hearts, and Muggins dominoes on top of the card-selection protocol.

Each adapter supplies its own validity rule and pile layout; Hearts swaps the
lottery into original mode so a seat with no matching suit still discards a
uniformly random card.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .deck import (
    CardFace,
    DominoFace,
    StandardFace,
    SUITS,
    build_domino_deck,
    build_standard_deck,
    face_token,
)
from .protocols import (
    MODIFIED,
    ORIGINAL,
    NoneValid,
    Selected,
    SelectionContext,
    SelectionResult,
    card_selection,
)
from .table import TableCard, Transcript, pile_scramble

HUMAN = "human"
VIRTUAL = "virtual"


def _scramble_deal(faces: list[CardFace], tape, transcript: Transcript) -> list[TableCard]:
    piles = pile_scramble([[TableCard(f)] for f in faces], tape, transcript)
    return [pile[0] for pile in piles]


def _select(hands: list[list[TableCard]], acting: int, deck: list[TableCard],
            predicate, tape, transcript: Transcript, mode: str = MODIFIED,
            game=None) -> SelectionResult:
    """Run the selection protocol for one seat; hands and deck are rebuilt in place."""
    if game is not None:
        game.selections += 1
    owners = [acting] + [i for i in range(len(hands)) if i != acting]
    ctx = SelectionContext(
        hands=tuple(tuple(hands[i]) for i in owners) + (tuple(deck),),
        validity=predicate,
        mode=mode,
    )
    result = card_selection(ctx, tape, transcript)
    for owner, hand in zip(owners, result.hands):
        hands[owner][:] = hand
    deck[:] = result.hands[-1]
    return result


# --------------------------------------------------------------------- Sevens


def sevens_order(face: StandardFace) -> int:
    """Sequence position for Sevens: ace plays low, so A,2..10,J,Q,K is 1..13."""
    return 1 if face.rank == 14 else face.rank


class SevensBoard:
    def __init__(self) -> None:
        self.intervals: dict[str, tuple[int, int] | None] = {s: None for s in SUITS}

    def valid(self, face: StandardFace) -> bool:
        span = self.intervals[face.suit]
        order = sevens_order(face)
        if span is None:
            return order == 7
        lo, hi = span
        return order == lo - 1 or order == hi + 1

    def play(self, face: StandardFace) -> None:
        if not self.valid(face):
            raise ValueError(f"{face_token(face)} does not extend the layout")
        span = self.intervals[face.suit]
        order = sevens_order(face)
        if span is None:
            self.intervals[face.suit] = (7, 7)
        else:
            lo, hi = span
            self.intervals[face.suit] = (min(lo, order), max(hi, order))


def sevens_valid(face: CardFace, board: SevensBoard) -> bool:
    return isinstance(face, StandardFace) and board.valid(face)


class SevensGame:
    """Whole-deck Sevens: forced sevens-of-diamonds open, pass when stuck."""

    def __init__(self, kinds: list[str], tape, transcript: Transcript | None = None) -> None:
        if not 2 <= len(kinds) <= 10:
            raise ValueError("sevens needs 2 to 10 players")
        self.kinds = kinds
        self.tape = tape
        self.transcript = transcript if transcript is not None else Transcript()
        self.board = SevensBoard()
        self.hands: list[list[TableCard]] = [[] for _ in kinds]
        self.plays: list[tuple[int, StandardFace]] = []
        self.winner: int | None = None
        self.turns = 0
        self.selections = 0
        self.empty_deck: list[TableCard] = []

    def deal(self) -> None:
        deck = _scramble_deal(build_standard_deck(), self.tape, self.transcript)
        for i, card in enumerate(deck):
            self.hands[i % len(self.kinds)].append(card)

    def _is_seven_of_diamonds(self, face: CardFace) -> bool:
        return isinstance(face, StandardFace) and face.suit == "d" and face.rank == 7

    def _open(self) -> int:
        """Locate and play the seven of diamonds; returns the opener's seat."""
        for seat, kind in enumerate(self.kinds):
            if kind != VIRTUAL:
                if any(self._is_seven_of_diamonds(c.face) for c in self.hands[seat]):
                    self._play(seat, StandardFace("d", 7))
                    return seat
        for seat, kind in enumerate(self.kinds):
            if kind == VIRTUAL:
                result = _select(self.hands, seat, self.empty_deck,
                                 self._is_seven_of_diamonds, self.tape, self.transcript,
                                 game=self)
                if isinstance(result.outcome, Selected):
                    self._record(seat, result.outcome.card.face)
                    return seat
        raise AssertionError("someone must hold the seven of diamonds")

    def _record(self, seat: int, face: StandardFace) -> None:
        self.board.play(face)
        self.plays.append((seat, face))
        if not self.hands[seat]:
            self.winner = seat

    def _play(self, seat: int, face: StandardFace) -> None:
        hand = self.hands[seat]
        for i, card in enumerate(hand):
            if card.face == face:
                del hand[i]
                break
        else:
            raise ValueError(f"{face_token(face)} not in hand")
        self._record(seat, face)

    def turn(self, seat: int) -> StandardFace | None:
        if self.kinds[seat] == VIRTUAL:
            result = _select(self.hands, seat, self.empty_deck,
                             lambda f: sevens_valid(f, self.board),
                             self.tape, self.transcript, game=self)
            if isinstance(result.outcome, NoneValid):
                return None
            face = result.outcome.card.face
            self._record(seat, face)
            return face
        legal = [c.face for c in self.hands[seat] if sevens_valid(c.face, self.board)]
        if not legal:
            return None
        face = legal[self.tape.permutation(len(legal))[0]] if len(legal) > 1 else legal[0]
        self._play(seat, face)
        return face

    def run(self, max_turns: int = 500) -> int:
        self.deal()
        seat = self._open()
        while self.winner is None:
            self.turns += 1
            if self.turns > max_turns:
                raise RuntimeError("sevens game did not finish")
            seat = (seat + 1) % len(self.kinds)
            self.turn(seat)
        return self.winner


# --------------------------------------------------------------------- Hearts

QUEEN_OF_SPADES = StandardFace("s", 12)


def trick_points(faces: list[StandardFace]) -> int:
    points = sum(1 for f in faces if f.suit == "h")
    return points + (13 if QUEEN_OF_SPADES in faces else 0)


def hearts_score_trick(plays: list[tuple[int, StandardFace]]) -> tuple[int, int]:
    """Winner and point value of a completed trick: highest rank in the led suit."""
    if len(plays) != 4:
        raise ValueError("a trick has exactly four plays")
    led = plays[0][1].suit
    winner, _ = max(
        (p for p in plays if p[1].suit == led), key=lambda p: p[1].rank
    )
    return winner, trick_points([f for _, f in plays])


class HeartsGame:
    """Rounds of 13 tricks; the first player to reach 100 points loses."""

    def __init__(self, kinds: list[str], tape, transcript: Transcript | None = None) -> None:
        if len(kinds) != 4:
            raise ValueError("hearts is a four-player game")
        self.kinds = kinds
        self.tape = tape
        self.transcript = transcript if transcript is not None else Transcript()
        self.scores = [0, 0, 0, 0]
        self.empty_deck: list[TableCard] = []
        self.turns = 0
        self.selections = 0
        self.winner: int | None = None

    def _deal(self) -> list[list[TableCard]]:
        deck = _scramble_deal(build_standard_deck(), self.tape, self.transcript)
        return [deck[i * 13:(i + 1) * 13] for i in range(4)]

    def _turn(self, hands: list[list[TableCard]], seat: int,
              led: str | None) -> StandardFace:
        def follows(face: CardFace) -> bool:
            return led is None or (isinstance(face, StandardFace) and face.suit == led)

        if self.kinds[seat] == VIRTUAL:
            result = _select(hands, seat, self.empty_deck, follows,
                             self.tape, self.transcript, mode=ORIGINAL, game=self)
            return result.outcome.card.face
        hand = hands[seat]
        legal = [c.face for c in hand if follows(c.face)] or [c.face for c in hand]
        face = legal[self.tape.permutation(len(legal))[0]] if len(legal) > 1 else legal[0]
        for i, card in enumerate(hand):
            if card.face == face:
                del hand[i]
                break
        return face

    def play_round(self) -> list[int]:
        """One full round; returns the 4 per-seat point totals (summing to 26)."""
        hands = self._deal()
        leader = self.tape.permutation(4)[0]
        self.transcript.shuffle(4, 1)
        round_points = [0, 0, 0, 0]
        for _ in range(13):
            plays: list[tuple[int, StandardFace]] = []
            led: str | None = None
            for offset in range(4):
                seat = (leader + offset) % 4
                self.turns += 1
                face = self._turn(hands, seat, led)
                if led is None:
                    led = face.suit
                plays.append((seat, face))
            winner, points = hearts_score_trick(plays)
            round_points[winner] += points
            leader = winner
        for seat in range(4):
            self.scores[seat] += round_points[seat]
        return round_points

    def run(self, max_rounds: int = 40) -> list[int]:
        """Play rounds until someone reaches 100; returns seats ranked best-first."""
        for _ in range(max_rounds):
            self.play_round()
            if max(self.scores) >= 100:
                break
        ranking = sorted(range(4), key=lambda s: self.scores[s])
        self.winner = ranking[0]
        return ranking


# ------------------------------------------------------------------- Dominoes


class MugginsLayout:
    """A two-ended chain of dominoes; junctions must match pip for pip."""

    def __init__(self) -> None:
        self.chain: list[tuple[int, int]] = []

    @property
    def open_ends(self) -> tuple[int, int] | None:
        if not self.chain:
            return None
        return (self.chain[0][0], self.chain[-1][1])

    def valid(self, tile: DominoFace) -> bool:
        ends = self.open_ends
        if ends is None:
            return True
        return tile.lo in ends or tile.hi in ends

    def play(self, tile: DominoFace) -> int:
        """Attach a tile (right end preferred) and return the score it earns."""
        ends = self.open_ends
        if ends is None:
            self.chain.append((tile.lo, tile.hi))
        elif tile.lo == ends[1]:
            self.chain.append((tile.lo, tile.hi))
        elif tile.hi == ends[1]:
            self.chain.append((tile.hi, tile.lo))
        elif tile.lo == ends[0]:
            self.chain.insert(0, (tile.hi, tile.lo))
        elif tile.hi == ends[0]:
            self.chain.insert(0, (tile.lo, tile.hi))
        else:
            raise ValueError(f"{face_token(tile)} matches no open end")
        return self.score()

    def score(self) -> int:
        ends = self.open_ends
        total = ends[0] + ends[1]
        return total if total > 0 and total % 5 == 0 else 0


def muggins_valid(tile: CardFace, layout: MugginsLayout) -> bool:
    return isinstance(tile, DominoFace) and layout.valid(tile)


def muggins_score(layout: MugginsLayout) -> int:
    return layout.score()


def highest_doublet(hand: list[TableCard]) -> int | None:
    pips = [c.face.lo for c in hand if isinstance(c.face, DominoFace) and c.face.is_doublet]
    return max(pips) if pips else None


def muggins_first_player(kinds: list[str], hands: list[list[TableCard]],
                         boneyard: list[TableCard], tape,
                         transcript: Transcript) -> int | None:
    """Seat holding the highest doublet: announced by real seats, proven by the
    selection protocol for virtual seats. The winning virtual doublet is revealed
    and returned to its hand. Returns None when no one holds a doublet."""
    best: int | None = None
    holder: int | None = None
    for seat, kind in enumerate(kinds):
        if kind != VIRTUAL:
            pip = highest_doublet(hands[seat])
            if pip is not None and (best is None or pip > best):
                best, holder = pip, seat
    for seat, kind in enumerate(kinds):
        if kind != VIRTUAL:
            continue

        def beats_current(face: CardFace, floor=best) -> bool:
            return (isinstance(face, DominoFace) and face.is_doublet
                    and (floor is None or face.lo > floor))

        result = _select(hands, seat, boneyard, beats_current, tape, transcript)
        if isinstance(result.outcome, Selected):
            card = result.outcome.card
            best, holder = card.face.lo, seat
            hands[seat].append(card.down())  # shown, then returned to the hand
    return holder


class MugginsGame:
    """Muggins (all fives): score when the open ends sum to a multiple of five."""

    def __init__(self, kinds: list[str], tape, transcript: Transcript | None = None) -> None:
        if not 2 <= len(kinds) <= 4:
            raise ValueError("muggins supports 2 to 4 players")
        self.kinds = kinds
        self.tape = tape
        self.transcript = transcript if transcript is not None else Transcript()
        self.layout = MugginsLayout()
        self.hands: list[list[TableCard]] = [[] for _ in kinds]
        self.boneyard: list[TableCard] = []
        self.scores = [0] * len(kinds)
        self.winner: int | None = None
        self.turns = 0
        self.selections = 0

    def deal(self) -> int:
        """Shuffle, deal five tiles each, and settle who opens; redeals if no one
        holds a doublet."""
        while True:
            deck = _scramble_deal(build_domino_deck(), self.tape, self.transcript)
            self.hands = [deck[i * 5:(i + 1) * 5] for i in range(len(self.kinds))]
            self.boneyard = deck[5 * len(self.kinds):]
            starter = muggins_first_player(
                self.kinds, self.hands, self.boneyard, self.tape, self.transcript
            )
            if starter is not None:
                return starter

    def _draw(self, seat: int) -> bool:
        if not self.boneyard:
            return False
        self.hands[seat].append(self.boneyard.pop().down())
        return True

    def _play_tile(self, seat: int, tile: DominoFace) -> None:
        self.scores[seat] += self.layout.play(tile)
        if not self.hands[seat]:
            self.winner = seat

    def turn(self, seat: int) -> DominoFace | None:
        """Play a valid tile, drawing from the boneyard until one turns up or it
        runs dry; returns the tile played, or None for a pass."""
        while True:
            if self.kinds[seat] == VIRTUAL:
                result = _select(self.hands, seat, self.boneyard,
                                 lambda f: muggins_valid(f, self.layout),
                                 self.tape, self.transcript, game=self)
                if isinstance(result.outcome, Selected):
                    tile = result.outcome.card.face
                    self._play_tile(seat, tile)
                    return tile
            else:
                legal = [c.face for c in self.hands[seat]
                         if muggins_valid(c.face, self.layout)]
                if legal:
                    tile = legal[self.tape.permutation(len(legal))[0]] if len(legal) > 1 else legal[0]
                    hand = self.hands[seat]
                    for i, card in enumerate(hand):
                        if card.face == tile:
                            del hand[i]
                            break
                    self._play_tile(seat, tile)
                    return tile
            if not self._draw(seat):
                return None

    def run(self, max_turns: int = 400) -> int:
        seat = self.deal()
        passes = 0
        while self.winner is None:
            self.turns += 1
            if self.turns > max_turns:
                raise RuntimeError("muggins game did not finish")
            played = self.turn(seat)
            passes = 0 if played is not None else passes + 1
            if passes >= len(self.kinds):
                break
            seat = (seat + 1) % len(self.kinds)
        if self.winner is None:
            self.winner = max(range(len(self.kinds)), key=lambda s: self.scores[s])
        return self.winner
