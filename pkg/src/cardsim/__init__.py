"""Card-table protocol simulator: virtual players for turn-based card games."""

from .deck import (
    ALPHA,
    BETA,
    AuxFace,
    CardFace,
    Color,
    DominoFace,
    StandardFace,
    UnoFace,
    build_domino_deck,
    build_standard_deck,
    build_uno_deck,
    face_token,
    parse_face,
    provision_aux,
    theta,
)
from .protocols import (
    LotteryInput,
    NoneValid,
    Selected,
    SelectionContext,
    SelectionResult,
    card_selection,
    covert_lottery,
    designate_color,
    six_card_and,
)
from .table import (
    Commitment,
    ExplicitTape,
    SeededTape,
    TableCard,
    TallyTranscript,
    Transcript,
    encode_bit,
    pile_scramble,
)

__all__ = [name for name in dir() if not name.startswith("_")]
