from pathlib import Path

from cardsim.deck import Color
from cardsim.protocols import SelectionContext, card_selection
from cardsim.table import SeededTape, Transcript
from conftest import cards

GOLDEN = Path(__file__).parent / "golden"


def red_or_two(face):
    return face.color is None or face.color == Color.RED or face.symbol == "2"


def test_selection_transcript_matches_golden_file():
    # Pins the line format and the protocol's event layout; regenerate only for a
    # deliberate, versioned format change.
    ctx = SelectionContext(
        hands=(cards("7R", "4G"), cards("SY", "2Y")), validity=red_or_two
    )
    transcript = Transcript()
    card_selection(ctx, SeededTape(2024), transcript)
    assert transcript.serialize() == (GOLDEN / "selection_k4_seed2024.txt").read_text()
