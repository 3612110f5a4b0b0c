import pytest

from cardsim.replay import (
    ReplayError,
    ReplayFile,
    annotate,
    parse_replay,
    record_game,
    verify_replay,
    write_replay,
)

KINDS = ["virtual", "virtual", "virtual"]


@pytest.mark.parametrize("game", ["uno", "sevens", "hearts", "dominoes"])
def test_recorded_games_replay_identically(game):
    kinds = KINDS if game != "hearts" else KINDS + ["virtual"]
    replay = record_game(game, kinds, seed=13)
    assert verify_replay(replay).identical
    # and the text form round-trips
    parsed = parse_replay(write_replay(replay))
    assert parsed == replay


def test_tampered_shuffle_line_is_pinpointed():
    replay = record_game("uno", KINDS, seed=3)
    target = next(i for i, l in enumerate(replay.transcript_lines) if l.startswith("SHUFFLE"))
    replay.transcript_lines[target] = "SHUFFLE m=9 k=9"
    verdict = verify_replay(replay)
    assert not verdict.identical
    assert verdict.divergence == target + 1
    assert "DIVERGED" in verdict.describe()
    assert verdict.expected == "SHUFFLE m=9 k=9"


def test_truncated_transcript_diverges_at_the_end():
    replay = record_game("uno", KINDS, seed=3)
    replay.transcript_lines = replay.transcript_lines[:-2]
    verdict = verify_replay(replay)
    assert not verdict.identical
    assert verdict.divergence == len(replay.transcript_lines) + 1


def test_parse_rejects_missing_header():
    with pytest.raises(ReplayError, match="line 1"):
        parse_replay("GAME uno\n")


def test_parse_rejects_unknown_game():
    with pytest.raises(ReplayError, match="unknown game"):
        parse_replay("REPLAY v=1\nGAME chess\nTRANSCRIPT\n")


def test_parse_rejects_bad_seed_and_reports_line():
    with pytest.raises(ReplayError, match="line 3"):
        parse_replay("REPLAY v=1\nGAME uno\nSEED banana\nTRANSCRIPT\n")


def test_parse_requires_transcript_section():
    with pytest.raises(ReplayError, match="TRANSCRIPT"):
        parse_replay("REPLAY v=1\nGAME uno\nSEATS virtual virtual\nSEED 1\n")


def test_parse_moves():
    text = (
        "REPLAY v=1\nGAME uno\nSEATS human virtual\nSEED 5\n"
        "MOVE s1 play 7R\nMOVE s1 draw\nMOVE s1 keep\nTRANSCRIPT\n"
    )
    replay = parse_replay(text)
    assert replay.moves == [(0, ("play", "7R")), (0, ("draw",)), (0, ("keep",))]


def test_move_record_exhaustion_is_an_error():
    replay = ReplayFile("uno", ["human", "virtual"], 5, [(0, ("draw",))], [])
    with pytest.raises(ReplayError, match="exhausted"):
        verify_replay(replay)


def test_annotate_produces_numbered_walkthrough():
    replay = record_game("uno", KINDS, seed=3)
    lines = annotate(replay)
    assert len(lines) == len(replay.transcript_lines)
    assert lines[0].startswith("[     1]")
    assert "scramble" in lines[0]


def test_selection_protocol_replay_round_trip():
    from cardsim.replay import record_selection

    replay = record_selection(
        piles=[["7R", "4G"], ["SY"], ["2Y", "1B"]],
        valid=["7R", "2Y"],
        seed=77,
    )
    text = write_replay(replay)
    assert "PILE 7R 4G" in text and "VALID 7R 2Y" in text
    parsed = parse_replay(text)
    assert parsed.piles == [["7R", "4G"], ["SY"], ["2Y", "1B"]]
    assert verify_replay(parsed).identical


def test_selection_replay_requires_piles():
    with pytest.raises(ReplayError, match="PILE"):
        parse_replay("REPLAY v=1\nGAME selection\nSEED 3\nTRANSCRIPT\n")
