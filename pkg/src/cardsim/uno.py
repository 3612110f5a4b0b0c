"""UNO rules engine with protocol-driven virtual seats.

The engine owns a physical table: face-down hands, the unplayed deck, the face-up
discard pile, and one transcript per game. Virtual seats never look at their cards;
their turns run the card-selection protocol against the public validity rule.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .deck import CardFace, Color, UnoFace, build_uno_deck, face_token
from .protocols import (
    MODIFIED,
    NoneValid,
    Selected,
    SelectionContext,
    SelectionResult,
    card_selection,
    designate_color,
)
from .table import TableCard, TallyTranscript, Transcript, pile_scramble

HUMAN = "human"
VIRTUAL = "virtual"


class IllegalMove(Exception):
    def __init__(self, reason: str, message: str = "") -> None:
        super().__init__(message or reason)
        self.reason = reason


@dataclass
class MatchState:
    top: UnoFace
    designated: Color | None
    direction: int  # +1 clockwise, -1 counterclockwise
    turn: int

    def effective_color(self) -> Color | None:
        return self.designated if self.top.is_black else self.top.color


def uno_valid(candidate: UnoFace, match: MatchState) -> bool:
    """A card may be played iff it is black, matches the effective color, or
    carries the same printed character as the top card."""
    if candidate.is_black:
        return True
    color = match.effective_color()
    if color is None:
        raise ValueError("no effective color: designation still pending")
    return candidate.color == color or candidate.symbol == match.top.symbol


@dataclass
class Seat:
    id: str
    kind: str
    hand: list[TableCard] = field(default_factory=list)


@dataclass
class TurnOutcome:
    seat: int
    played: UnoFace | None = None
    color: Color | None = None
    drew: int = 0
    selections: int = 0


class UnoGame:
    def __init__(self, kinds: list[str], tape, transcript: Transcript | None = None,
                 collect_events: bool = True) -> None:
        if not 2 <= len(kinds) <= 10:
            raise ValueError("a single deck supports 2 to 10 players")
        self.seats = [Seat(f"seat{i + 1}", kind) for i, kind in enumerate(kinds)]
        self.tape = tape
        self.transcript = transcript if transcript is not None else Transcript()
        self.collect_events = collect_events
        self.events: list[dict] = []
        self.unplayed: list[TableCard] = []
        self.discard: list[UnoFace] = []
        self.match: MatchState | None = None
        self.pending_color: int | None = None
        self.finished = False
        self.winner: int | None = None
        self.turns = 0
        self.selections = 0

    # ---------------------------------------------------------------- setup

    def setup(self) -> None:
        deck = [TableCard(face) for face in build_uno_deck()]
        piles = pile_scramble([[c] for c in deck], self.tape, self.transcript)
        self.unplayed = [pile[0] for pile in piles]
        for _ in range(7):
            for seat in self.seats:
                card = self.unplayed.pop()
                seat.hand.append(card)
                self.transcript.place(1, 1, card)

        top = self._flip_first_card()
        starter = self.tape.permutation(len(self.seats))[0]
        self.transcript.shuffle(len(self.seats), 1)
        self.match = MatchState(top=top, designated=None, direction=1, turn=starter)
        self.emit({"type": "flip", "face": face_token(top)})
        self._apply_initial_effects(top, starter)

    def _flip_first_card(self) -> UnoFace:
        # A flipped wild-draw-four goes back under the deck and a new card is shown.
        while True:
            card = self.unplayed.pop().up()
            self.transcript.reveal(1, 1, card)
            if card.face.symbol != "D":
                self.discard.append(card.face)
                return card.face
            self.unplayed.insert(0, card.down())
            self.transcript.place(1, 1, card.down())

    def _apply_initial_effects(self, top: UnoFace, starter: int) -> None:
        match = self.match
        if top.symbol == "W":
            if self.seats[starter].kind == VIRTUAL:
                match.designated = designate_color(self.tape, self.transcript)
                self.emit({"type": "color", "seat": starter, "color": match.designated.value})
            else:
                self.pending_color = starter
        elif top.symbol == "S":
            self.emit({"type": "skip", "seat": starter})
            match.turn = self._seat_after(starter)
        elif top.symbol == "R":
            match.direction = -1
            self.emit({"type": "reverse", "direction": "ccw"})
            if len(self.seats) == 2:
                match.turn = self._seat_after(starter)
        elif top.symbol == "+":
            self._draw_into_hand(starter, 2)
            self.emit({"type": "skip", "seat": starter})
            match.turn = self._seat_after(starter)

    # ---------------------------------------------------------------- helpers

    def emit(self, event: dict) -> None:
        if self.collect_events:
            self.events.append(event)

    def _seat_after(self, seat: int, steps: int = 1) -> int:
        return (seat + self.match.direction * steps) % len(self.seats)

    def legal_plays(self, seat_idx: int) -> list[UnoFace]:
        hand = self.seats[seat_idx].hand
        return [c.face for c in hand if uno_valid(c.face, self.match)]

    def hand_tokens(self, seat_idx: int) -> list[str]:
        return [face_token(c.face) for c in self.seats[seat_idx].hand]

    def face_counter(self) -> Counter:
        counts: Counter = Counter()
        for seat in self.seats:
            counts.update(c.face for c in seat.hand)
        counts.update(c.face for c in self.unplayed)
        counts.update(self.discard)
        return counts

    def check_conservation(self) -> None:
        if self.face_counter() != Counter(build_uno_deck()):
            raise AssertionError("card conservation violated")

    def debug_snapshot(self) -> dict:
        """Privileged full-state dump (every hidden face); never sent to players."""
        return {
            "privileged": True,
            "hands": {seat.id: sorted(face_token(c.face) for c in seat.hand)
                      for seat in self.seats},
            "unplayed": [face_token(c.face) for c in self.unplayed],
            "discard": [face_token(f) for f in self.discard],
            "top": face_token(self.match.top) if self.match else None,
            "designated": self.match.designated.value
            if self.match and self.match.designated else None,
            "direction": self.match.direction if self.match else None,
            "turn": self.match.turn if self.match else None,
            "finished": self.finished,
            "winner": self.winner,
        }

    def resolve_pending_color(self, color: Color) -> None:
        if self.pending_color is None:
            raise IllegalMove("no-pending-color")
        seat = self.pending_color
        self.match.designated = color
        self.pending_color = None
        self.emit({"type": "color", "seat": seat, "color": color.value})

    # ---------------------------------------------------------------- drawing

    def _draw_into_hand(self, seat_idx: int, count: int) -> int:
        drawn = 0
        for _ in range(count):
            if not self.unplayed:
                self._recycle_discard()
            if not self.unplayed:
                break
            card = self.unplayed.pop().down()
            self.seats[seat_idx].hand.append(card)
            self.transcript.place(1, 1, card)
            drawn += 1
        if drawn:
            self.emit({"type": "draw", "seat": seat_idx, "count": drawn})
        return drawn

    def _recycle_discard(self) -> None:
        # Everything but the top of the discard pile becomes the new deck.
        if len(self.discard) <= 1:
            return
        recycled = [TableCard(face) for face in self.discard[:-1]]
        self.discard = self.discard[-1:]
        for card in recycled:
            self.transcript.place(1, 1, card)
        piles = pile_scramble([[c] for c in recycled], self.tape, self.transcript)
        self.unplayed = [pile[0] for pile in piles]
        self.emit({"type": "reshuffle", "count": len(recycled)})

    # ---------------------------------------------------------------- playing

    def apply_play(self, seat_idx: int, face: UnoFace, color: Color | None = None,
                   already_removed: bool = False) -> None:
        """Discard a card from a seat's hand and apply its effect.

        Black plays must carry a color choice. Raises IllegalMove on rule
        violations; protocol-selected cards pass already_removed=True.
        """
        if self.finished:
            raise IllegalMove("finished")
        if seat_idx != self.match.turn:
            raise IllegalMove("out-of-turn")
        if not uno_valid(face, self.match):
            raise IllegalMove("illegal-face", f"{face_token(face)} does not match")
        if face.is_black and color is None:
            raise IllegalMove("color-required")
        if not face.is_black and color is not None:
            raise IllegalMove("color-on-colored")
        seat = self.seats[seat_idx]
        if not already_removed:
            for i, card in enumerate(seat.hand):
                if card.face == face:
                    del seat.hand[i]
                    break
            else:
                raise IllegalMove("not-in-hand", face_token(face))

        shown = TableCard(face, face_up=True)
        self.discard.append(face)
        self.transcript.place(1, 1, shown)
        self.match.top = face
        self.match.designated = color
        event = {"type": "play", "seat": seat_idx, "face": face_token(face)}
        if color is not None:
            event["color"] = color.value
        self.emit(event)

        if not seat.hand:
            self.finished = True
            self.winner = seat_idx
            self.emit({"type": "win", "seat": seat_idx})
            return
        self._apply_effect(seat_idx, face)

    def _apply_effect(self, seat_idx: int, face: UnoFace) -> None:
        match = self.match
        symbol = face.symbol
        if symbol == "S":
            victim = self._seat_after(seat_idx)
            self.emit({"type": "skip", "seat": victim})
            match.turn = self._seat_after(seat_idx, 2)
        elif symbol == "R":
            match.direction = -match.direction
            self.emit({"type": "reverse", "direction": "cw" if match.direction > 0 else "ccw"})
            if len(self.seats) == 2:
                match.turn = seat_idx  # two-player reverse acts as a skip
            else:
                match.turn = self._seat_after(seat_idx)
        elif symbol in ("+", "D"):
            victim = self._seat_after(seat_idx)
            self._draw_into_hand(victim, 2 if symbol == "+" else 4)
            self.emit({"type": "skip", "seat": victim})
            match.turn = self._seat_after(seat_idx, 2)
        else:
            match.turn = self._seat_after(seat_idx)

    def pass_turn(self, seat_idx: int) -> None:
        self.match.turn = self._seat_after(seat_idx)

    # ---------------------------------------------------------------- virtual turns

    def selection_context(self, seat_idx: int) -> tuple[SelectionContext, list[int]]:
        owners = [seat_idx] + [i for i in range(len(self.seats)) if i != seat_idx]
        hands = tuple(tuple(self.seats[i].hand) for i in owners) + (tuple(self.unplayed),)
        match = self.match
        return SelectionContext(hands=hands, validity=lambda f: uno_valid(f, match)), owners

    def _run_selection(self, seat_idx: int) -> SelectionResult:
        ctx, owners = self.selection_context(seat_idx)
        result = card_selection(ctx, self.tape, self.transcript)
        self.selections += 1
        for owner, hand in zip(owners, result.hands):
            self.seats[owner].hand = list(hand)
        self.unplayed = list(result.hands[-1])
        return result

    def virtual_turn(self, seat_idx: int) -> TurnOutcome:
        """One protocol-driven turn: select-and-play, or draw unseen and retry."""
        if self.seats[seat_idx].kind != VIRTUAL:
            raise IllegalMove("not-virtual")
        outcome = TurnOutcome(seat=seat_idx)
        result = self._run_selection(seat_idx)
        outcome.selections += 1
        if isinstance(result.outcome, NoneValid):
            if self._draw_into_hand(seat_idx, 1) == 0:
                self.pass_turn(seat_idx)
                return outcome
            outcome.drew = 1
            result = self._run_selection(seat_idx)
            outcome.selections += 1
            if isinstance(result.outcome, NoneValid):
                self.pass_turn(seat_idx)
                return outcome
        face = result.outcome.card.face
        color = None
        if face.is_black:
            color = designate_color(self.tape, self.transcript)
        self.apply_play(seat_idx, face, color, already_removed=True)
        outcome.played = face
        outcome.color = color
        return outcome

    # ---------------------------------------------------------------- game loop

    def advance_virtuals(self, max_turns: int = 20_000) -> None:
        """Run protocol turns until a human must act or the game ends."""
        while not self.finished:
            if self.pending_color is not None:
                if self.seats[self.pending_color].kind != VIRTUAL:
                    return
                self.resolve_pending_color(designate_color(self.tape, self.transcript))
                continue
            seat_idx = self.match.turn
            if self.seats[seat_idx].kind != VIRTUAL:
                return
            if self.turns >= max_turns:
                raise RuntimeError(f"game exceeded {max_turns} turns")
            self.turns += 1
            self.virtual_turn(seat_idx)

    def run(self, move_source=None, max_turns: int = 20_000) -> int:
        """Loop turns until someone empties their hand; returns the winner index."""
        while not self.finished:
            self.advance_virtuals(max_turns)
            if self.finished:
                break
            if self.turns >= max_turns:
                raise RuntimeError(f"game exceeded {max_turns} turns")
            if self.pending_color is not None:
                self.resolve_pending_color(
                    move_source.choose_color(self, self.pending_color)
                )
                continue
            self.turns += 1
            self._human_turn(self.match.turn, move_source)
        return self.winner

    def _human_turn(self, seat_idx: int, source) -> None:
        action = source.choose_action(self, seat_idx)
        if action[0] == "play":
            _, face, color = action
            self.apply_play(seat_idx, face, color)
            return
        if action[0] != "draw":
            raise IllegalMove("unknown-action", str(action))
        if self._draw_into_hand(seat_idx, 1) == 0:
            self.pass_turn(seat_idx)
            return
        drawn = self.seats[seat_idx].hand[-1].face
        if uno_valid(drawn, self.match):
            decision = source.play_drawn(self, seat_idx, drawn)
            if decision is not None:
                self.apply_play(seat_idx, drawn, decision if drawn.is_black else None)
                return
        self.pass_turn(seat_idx)


def setup_game(kinds: list[str], tape, transcript: Transcript | None = None,
               collect_events: bool = True) -> UnoGame:
    game = UnoGame(kinds, tape, transcript, collect_events)
    game.setup()
    return game


class ScriptedPlayer:
    """Move source for simulations: plays a uniformly random legal card, otherwise
    draws, and always plays a playable drawn card. Colors are chosen uniformly."""

    def __init__(self, tape) -> None:
        self.tape = tape

    def _pick(self, options: list):
        if len(options) == 1:
            return options[0]
        return options[self.tape.permutation(len(options))[0]]

    def choose_action(self, game: UnoGame, seat_idx: int):
        legal = game.legal_plays(seat_idx)
        if not legal:
            return ("draw",)
        face = self._pick(legal)
        color = self._pick(list(Color)) if face.is_black else None
        return ("play", face, color)

    def play_drawn(self, game: UnoGame, seat_idx: int, drawn: UnoFace):
        return self._pick(list(Color)) if drawn.is_black else True

    def choose_color(self, game: UnoGame, seat_idx: int) -> Color:
        return self._pick(list(Color))


def simulate_game(kinds: list[str], seed: int, full_transcript: bool = False,
                  max_turns: int = 20_000) -> UnoGame:
    """Play one all-seeded game to completion; scripted players cover human seats."""
    from .table import SeededTape

    tape = SeededTape(seed)
    transcript = Transcript() if full_transcript else TallyTranscript()
    game = setup_game(kinds, tape, transcript, collect_events=full_transcript)
    game.run(move_source=ScriptedPlayer(tape), max_turns=max_turns)
    return game
