"""Replay files: a game's public inputs plus its transcript, re-executable bit for bit.

Format (line oriented):

    REPLAY v=1
    GAME uno
    SEATS human virtual virtual
    SEED 7
    MOVE s1 play 7R
    MOVE s1 draw
    MOVE s1 keep
    TRANSCRIPT
    SHUFFLE m=108 k=1
    ...

Seats marked human are replayed from the MOVE lines; every other choice comes off
the seeded tape, so re-running reproduces the transcript byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .deck import Color, UnoFace, parse_face
from .table import SeededTape, Transcript
from .uno import HUMAN, ScriptedPlayer, UnoGame, setup_game

GAMES = ("uno", "sevens", "hearts", "dominoes", "selection")


class ReplayError(ValueError):
    def __init__(self, message: str, line: int | None = None) -> None:
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


@dataclass
class ReplayFile:
    game: str
    kinds: list[str]
    seed: int
    moves: list[tuple]
    transcript_lines: list[str] = field(default_factory=list)
    # protocol-run replays only: the laid-out piles and the public valid set
    piles: list[list[str]] | None = None
    valid: list[str] | None = None


def format_move(seat: int, record: tuple) -> str:
    return f"MOVE s{seat + 1} " + " ".join(str(part) for part in record)


def write_replay(replay: ReplayFile) -> str:
    lines = [
        "REPLAY v=1",
        f"GAME {replay.game}",
    ]
    if replay.kinds:
        lines.append("SEATS " + " ".join(replay.kinds))
    lines.append(f"SEED {replay.seed}")
    if replay.piles is not None:
        lines += ["PILE " + " ".join(pile) for pile in replay.piles]
    if replay.valid is not None:
        lines.append("VALID " + " ".join(replay.valid))
    lines += [format_move(seat, record) for seat, record in replay.moves]
    lines.append("TRANSCRIPT")
    lines += replay.transcript_lines
    return "\n".join(lines) + "\n"


def parse_replay(text: str) -> ReplayFile:
    lines = text.splitlines()
    if not lines or lines[0] != "REPLAY v=1":
        raise ReplayError("missing REPLAY v=1 header", 1)
    game = kinds = seed = None
    moves: list[tuple] = []
    piles: list[list[str]] | None = None
    valid: list[str] | None = None
    body_start = None
    for i, line in enumerate(lines[1:], start=2):
        if line == "TRANSCRIPT":
            body_start = i
            break
        key, _, rest = line.partition(" ")
        if key == "GAME":
            if rest not in GAMES:
                raise ReplayError(f"unknown game {rest!r}", i)
            game = rest
        elif key == "SEATS":
            kinds = rest.split()
        elif key == "SEED":
            try:
                seed = int(rest)
            except ValueError:
                raise ReplayError(f"bad seed {rest!r}", i) from None
        elif key == "PILE":
            piles = (piles or []) + [rest.split()]
        elif key == "VALID":
            valid = rest.split()
        elif key == "MOVE":
            parts = rest.split()
            if len(parts) < 2 or not parts[0].startswith("s"):
                raise ReplayError(f"malformed move {rest!r}", i)
            moves.append((int(parts[0][1:]) - 1, tuple(parts[1:])))
        else:
            raise ReplayError(f"unknown header line {line!r}", i)
    if body_start is None:
        raise ReplayError("missing TRANSCRIPT section")
    if game is None or seed is None:
        raise ReplayError("header must declare GAME and SEED")
    if game == "selection":
        if not piles:
            raise ReplayError("selection replay needs PILE lines")
        return ReplayFile(game, [], seed, moves, lines[body_start:], piles, valid or [])
    if kinds is None:
        raise ReplayError("header must declare SEATS")
    return ReplayFile(game, kinds, seed, moves, lines[body_start:])


class ReplaySource:
    """Feeds recorded human decisions back into the engine loop, in order."""

    def __init__(self, moves: list[tuple]) -> None:
        self._moves = list(moves)
        self._at = 0

    def _next(self, seat: int, expect: tuple[str, ...]) -> tuple:
        if self._at >= len(self._moves):
            raise ReplayError("move record exhausted before the game finished")
        rec_seat, record = self._moves[self._at]
        self._at += 1
        if rec_seat != seat or record[0] not in expect:
            raise ReplayError(
                f"move {self._at}: expected one of {expect} for seat {seat + 1}, "
                f"got {record} for seat {rec_seat + 1}"
            )
        return record

    def choose_action(self, game: UnoGame, seat: int):
        record = self._next(seat, ("play", "draw"))
        if record[0] == "draw":
            return ("draw",)
        face = parse_face(record[1])
        color = Color(record[2]) if len(record) > 2 else None
        return ("play", face, color)

    def play_drawn(self, game: UnoGame, seat: int, drawn: UnoFace):
        record = self._next(seat, ("playdrawn", "keep"))
        if record[0] == "keep":
            return None
        return Color(record[1]) if len(record) > 1 else True

    def choose_color(self, game: UnoGame, seat: int) -> Color:
        record = self._next(seat, ("color",))
        return Color(record[1])


class RecordingSource:
    """Wraps a move source, remembering every decision in replay-file form."""

    def __init__(self, inner) -> None:
        self.inner = inner
        self.moves: list[tuple] = []

    def choose_action(self, game, seat):
        action = self.inner.choose_action(game, seat)
        if action[0] == "draw":
            self.moves.append((seat, ("draw",)))
        else:
            _, face, color = action
            from .deck import face_token

            record = ("play", face_token(face)) + ((color.value,) if color else ())
            self.moves.append((seat, record))
        return action

    def play_drawn(self, game, seat, drawn):
        decision = self.inner.play_drawn(game, seat, drawn)
        if decision is None:
            self.moves.append((seat, ("keep",)))
        elif isinstance(decision, Color):
            self.moves.append((seat, ("playdrawn", decision.value)))
        else:
            self.moves.append((seat, ("playdrawn",)))
        return decision

    def choose_color(self, game, seat):
        color = self.inner.choose_color(game, seat)
        self.moves.append((seat, ("color", color.value)))
        return color


def execute(game: str, kinds: list[str], seed: int, moves: list[tuple] | None = None,
            piles: list[list[str]] | None = None, valid: list[str] | None = None):
    """Re-run a game from its public inputs; returns the finished game object."""
    tape = SeededTape(seed)
    if game == "selection":
        return run_selection_replay(piles or [], valid or [], tape)
    if game == "uno":
        uno = setup_game(kinds, tape)
        if moves:
            source = ReplaySource(moves)
        else:
            source = ScriptedPlayer(tape)
        uno.run(move_source=source)
        return uno
    from .variants import HeartsGame, MugginsGame, SevensGame

    if game == "sevens":
        g = SevensGame(kinds, tape)
        g.run()
        return g
    if game == "hearts":
        g = HeartsGame(kinds, tape)
        g.run()
        return g
    g = MugginsGame(kinds, tape)
    g.run()
    return g


class _SelectionRun:
    def __init__(self, transcript: Transcript) -> None:
        self.transcript = transcript
        self.winner = None


def run_selection_replay(piles: list[list[str]], valid: list[str], tape) -> _SelectionRun:
    from .protocols import SelectionContext, card_selection
    from .table import TableCard

    allowed = {parse_face(tok) for tok in valid}
    ctx = SelectionContext(
        hands=tuple(tuple(TableCard(parse_face(tok)) for tok in pile) for pile in piles),
        validity=lambda face: face in allowed,
    )
    run = _SelectionRun(Transcript())
    card_selection(ctx, tape, run.transcript)
    return run


def record_game(game: str, kinds: list[str], seed: int) -> ReplayFile:
    finished = execute(game, kinds, seed)
    return ReplayFile(game, kinds, seed, [], finished.transcript.lines())


def record_selection(piles: list[list[str]], valid: list[str], seed: int) -> ReplayFile:
    """Export one selection-protocol run as a replay file (debug format: the
    face-down piles appear in the header)."""
    run = run_selection_replay(piles, valid, SeededTape(seed))
    return ReplayFile("selection", [], seed, [], run.transcript.lines(), piles, valid)


@dataclass
class ReplayVerdict:
    identical: bool
    divergence: int | None = None  # 1-based transcript line number
    expected: str = ""
    actual: str = ""

    def describe(self) -> str:
        if self.identical:
            return "IDENTICAL"
        if self.expected and not self.actual:
            return f"DIVERGED at transcript line {self.divergence}: recorded {self.expected!r}, replay ended"
        if self.actual and not self.expected:
            return f"DIVERGED at transcript line {self.divergence}: replay produced extra {self.actual!r}"
        return (
            f"DIVERGED at transcript line {self.divergence}: "
            f"recorded {self.expected!r}, replay produced {self.actual!r}"
        )


def verify_replay(replay: ReplayFile) -> ReplayVerdict:
    """Re-execute and compare transcripts line by line."""
    finished = execute(replay.game, replay.kinds, replay.seed, replay.moves,
                       replay.piles, replay.valid)
    fresh = finished.transcript.lines()
    recorded = replay.transcript_lines
    for i, (want, got) in enumerate(zip(recorded, fresh), start=1):
        if want != got:
            return ReplayVerdict(False, i, want, got)
    if len(recorded) != len(fresh):
        i = min(len(recorded), len(fresh)) + 1
        want = recorded[i - 1] if i <= len(recorded) else ""
        got = fresh[i - 1] if i <= len(fresh) else ""
        return ReplayVerdict(False, i, want, got)
    return ReplayVerdict(True)


_EVENT_GLOSS = {
    "SHUFFLE": "scramble",
    "REVEAL": "turn face-up",
    "PLACE": "set down",
    "REARRANGE": "public reorder",
    "REMOVE": "pick up",
}


def annotate(replay: ReplayFile) -> list[str]:
    """Numbered transcript walkthrough with a terse gloss per event."""
    out = []
    for i, line in enumerate(replay.transcript_lines, start=1):
        kind = line.split(" ", 1)[0]
        gloss = _EVENT_GLOSS.get(kind, "")
        out.append(f"[{i:>6}] {line:<28} {gloss}")
    return out
