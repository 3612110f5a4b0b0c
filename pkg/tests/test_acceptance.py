"""Acceptance suite: one test per shipping criterion, each printing a verdict line.

Statistical criteria run at their stated sample sizes and significance levels with
fixed seeds; exact criteria enumerate every shuffle tape.
"""

from collections import Counter
from fractions import Fraction
from itertools import product

import pytest

from cardsim.deck import (
    COLORS,
    UnoFace,
    build_uno_deck,
    face_token,
    parse_face,
)
from cardsim.protocols import (
    MODIFIED,
    ORIGINAL,
    LotteryInput,
    NoneValid,
    Selected,
    SelectionContext,
    card_selection,
    covert_lottery,
    six_card_and,
)
from cardsim.replay import parse_replay, record_game, verify_replay, write_replay
from cardsim.service import SessionHub
from cardsim.table import (
    ExplicitTape,
    SeededTape,
    TableCard,
    TallyTranscript,
    Transcript,
    encode_bit,
)
from cardsim.uno import VIRTUAL, setup_game, simulate_game
from cardsim.variants import HeartsGame, MugginsGame, SevensGame
from cardsim.verify import (
    World,
    WorldPair,
    exact_distribution,
    leakage_audit,
    public_view,
    selection_program,
    structural_checks,
    uniformity_test,
)
from conftest import cards, tokens_of


def announce(name: str, passed: bool, detail: str = "") -> None:
    tail = f"  {detail}" if detail else ""
    print(f"[ACCEPTANCE] {name}: {'PASS' if passed else 'FAIL'}{tail}")
    assert passed, f"{name} failed {detail}"


def red_or_two(face) -> bool:
    return getattr(face, "color", None) in (None,) or face.color.value == "R" or face.symbol == "2"


def test_deck_composition():
    deck = build_uno_deck()
    counts = Counter(deck)
    ok = len(deck) == 108
    for color in COLORS:
        ok = ok and counts[UnoFace("0", color)] == 1
        ok = ok and all(counts[UnoFace(s, color)] == 2 for s in "123456789SR+")
    ok = ok and counts[UnoFace("W")] == 4 and counts[UnoFace("D")] == 4
    announce("deck-composition", ok, f"{len(deck)} cards")


def test_six_card_and_exhaustive():
    ok = True
    for x, y in product((0, 1), repeat=2):
        for branch in ((0, 1), (1, 0)):
            tr = Transcript()
            out = six_card_and(
                encode_bit(x), encode_bit(y),
                (TableCard(parse_face("ALPHA")), TableCard(parse_face("BETA"))),
                ExplicitTape([branch]), tr,
            )
            ok = ok and out.and_pair.decode() == (x & y)
            ok = ok and out.nand_pair.decode() == ((1 - x) & y)
            ok = ok and tr.n_shuffles == 1
    announce("six-card-and", ok, "4 inputs x 2 branches")


def _lottery_dist(validity, mode):
    held = cards(*[f"{i + 1}R" for i in range(len(validity))])

    def run(tape):
        inp = LotteryInput(held, tuple(encode_bit(b) for b in validity), mode)
        out = covert_lottery(inp, tape, Transcript())
        return face_token(out.card.face) if isinstance(out, Selected) else "NONE"

    return exact_distribution(run)


def test_modified_lottery_exact_uniformity():
    checked = 0
    ok = True
    for m in (1, 2, 3):
        for validity in product((0, 1), repeat=m):
            dist = _lottery_dist(validity, MODIFIED)
            valid = [f"{i + 1}R" for i, b in enumerate(validity) if b]
            if valid:
                want = {tok: Fraction(1, len(valid)) for tok in valid}
            else:
                want = {"NONE": Fraction(1)}
            ok = ok and dist == want
            checked += 1
    announce("modified-lottery-uniformity", ok, f"{checked} validity vectors, exact")


def test_original_lottery_all_invalid_uniform():
    ok = True
    for m in (1, 2, 3):
        dist = _lottery_dist((0,) * m, ORIGINAL)
        want = {f"{i + 1}R": Fraction(1, m) for i in range(m)}
        ok = ok and dist == want
    announce("original-lottery", ok, "m=1..3 all-invalid, exact")


def test_shuffle_and_aux_counts_over_seeded_runs():
    ok = True
    for i in range(1000):
        m = 1 + i % 5
        validity = tuple((i >> b) & 1 for b in range(m))
        tr = Transcript()
        inp = LotteryInput(
            cards(*[f"{j + 1}R" for j in range(m)]),
            tuple(encode_bit(b) for b in validity),
        )
        covert_lottery(inp, SeededTape(i), tr)
        ok = ok and tr.n_shuffles == m + 2

    hand_pool = ["7R", "4G", "W", "SY", "9B", "2G"]
    for i in range(1000):
        k1 = 1 + i % 4
        ctx = SelectionContext(
            hands=(cards(*hand_pool[:k1]), cards("1B", "6Y"), cards("3G",)),
            validity=red_or_two,
        )
        tr = Transcript()
        res = card_selection(ctx, SeededTape(i), tr)
        k = k1 + 3
        ok = ok and tr.n_shuffles == k1 + 5
        ok = ok and res.aux_used == 3 * k + 4
    announce("shuffle-counts", ok, "1000 lottery + 1000 selection runs")


def test_selection_correctness_exhaustive_tiny():
    instances = [
        (("7R", "4G"), ("SY", "2Y")),   # one valid card
        (("7R", "2G"), ("SY", "4B")),   # two valid cards
        (("4G", "SY"), ("7R", "2Y")),   # none valid
    ]
    ok = True
    runs = 0
    for hand, deck in instances:
        ctx = SelectionContext(hands=(cards(*hand), cards(*deck)), validity=red_or_two)
        valid = sorted(t for t in hand if red_or_two(parse_face(t)))

        def run(tape, ctx=ctx, hand=hand, deck=deck, valid=valid):
            res = card_selection(ctx, tape, Transcript())
            if isinstance(res.outcome, Selected):
                token = face_token(res.outcome.card.face)
                restored = sorted(tokens_of(res.hands[0]) + [token])
            else:
                token = "NONE"
                restored = tokens_of(res.hands[0])
            return (
                token,
                token == "NONE" or token in valid,        # (a) selected card valid
                (token == "NONE") == (not valid),          # (b) none iff no valid card
                restored == sorted(hand)                   # (c) acting hand restored
                and tokens_of(res.hands[1]) == sorted(deck),
            )

        dist = exact_distribution(run)
        runs += sum(1 for _ in dist)
        ok = ok and all(key[1] and key[2] and key[3] for key in dist)
        selected = {key[0] for key in dist if key[0] != "NONE"}
        ok = ok and selected == set(valid)
        if valid:
            by_card = Counter()
            for key, p in dist.items():
                by_card[key[0]] += p
            ok = ok and all(by_card[tok] == Fraction(1, len(valid)) for tok in valid)
    announce("card-selection-correctness", ok, "k=4 n=2, all tapes, 3 instances")


def test_selection_uniformity_at_game_scale():
    ok = True
    details = []
    hands = {
        2: ("7R", "W", "4G", "SY", "9B"),
        3: ("7R", "W", "2G", "SY", "9B"),
        4: ("7R", "W", "2G", "+R", "9B"),
    }
    others = (
        ("1B", "6Y", "3G", "5B", "8Y"),
        ("4Y", "9G", "SB", "6G", "1Y"),
        ("2B", "7G", "5Y", "8B"),
    )
    for v, hand in hands.items():
        ctx = SelectionContext(
            hands=(cards(*hand),) + tuple(cards(*o) for o in others),
            validity=red_or_two,
        )
        support = sorted(t for t in hand if red_or_two(parse_face(t)))
        assert len(support) == v
        outcomes = []
        for i in range(10_000):
            res = card_selection(ctx, SeededTape(900_000 + v * 100_000 + i), TallyTranscript())
            outcomes.append(face_token(res.outcome.card.face))
        report = uniformity_test(outcomes, support, significance=0.01, seed=v)
        ok = ok and report.passed
        details.append(f"v={v} p={report.p_value:.3f}")
    announce("selection-uniformity", ok, "N=10000 each; " + "; ".join(details))


def faces(*tokens):
    return tuple(parse_face(t) for t in tokens)


def test_leakage_audit_both_families():
    tiny_pairs = {
        "hand-deck-swap": WorldPair(
            World((faces("7R", "4G"), faces("SY",), faces("2Y",))),
            World((faces("7R", "4G"), faces("2Y",), faces("SY",))),
            red_or_two,
        ),
        "acting-invalid-swap": WorldPair(
            World((faces("7R", "4G"), faces("SY", "2Y"))),
            World((faces("7R", "SY"), faces("4G", "2Y"))),
            red_or_two,
        ),
    }
    large_pairs = {
        "hand-deck-swap": WorldPair(
            World((faces("7R", "4G", "W"), faces("SY", "1B", "9G"), faces("2Y", "6B"))),
            World((faces("7R", "4G", "W"), faces("2Y", "1B", "9G"), faces("SY", "6B"))),
            red_or_two,
        ),
        "acting-invalid-swap": WorldPair(
            World((faces("7R", "4G", "W"), faces("SY", "1B", "9G"), faces("2Y", "6B"))),
            World((faces("7R", "6B", "W"), faces("SY", "1B", "9G"), faces("2Y", "4G"))),
            red_or_two,
        ),
    }
    ok = True
    details = []
    for name, pair in tiny_pairs.items():
        report = leakage_audit(pair)
        ok = ok and report.passed and report.detail == "exact"
        details.append(f"{name} exact")
    for name, pair in large_pairs.items():
        report = leakage_audit(pair, runs=50_000, seed=77, ceiling=10)
        ok = ok and report.passed
        details.append(f"{name} p={report.p_value:.3f}")
    announce("leakage-audit", ok, "; ".join(details))


def test_mutation_sensitivity():
    pair = WorldPair(
        World((faces("7R",), faces("SY",), faces("2Y",))),
        World((faces("7R",), faces("2Y",), faces("SY",))),
        red_or_two,
    )
    world = World((faces("7R", "4G"), faces("SY",), faces("2Y", "1B")))
    mutations = (
        "skip-scramble-1", "skip-scramble-2", "skip-scramble-3",
        "leak-card", "swap-theta", "extra-shuffle", "extra-aux",
    )
    ok = True
    caught = []
    for mutation in mutations:
        muts = frozenset({mutation})
        failed = []
        if not leakage_audit(pair, mutations=muts).passed:
            failed.append("leakage")
        ctx = SelectionContext(
            hands=tuple(tuple(TableCard(f) for f in hand) for hand in world.hands),
            validity=red_or_two,
        )
        transcript = Transcript()
        result = card_selection(ctx, SeededTape(5), transcript, muts)
        if not structural_checks(transcript, public_view(world, result.aux_used)).passed:
            failed.append("structure")
        ok = ok and bool(failed)
        caught.append(f"{mutation}->{'+'.join(failed) or 'MISSED'}")
    announce("mutation-sensitivity", ok, "; ".join(caught))


def test_game_termination_and_conservation():
    deck = Counter(build_uno_deck())
    max_turns_seen = 0
    ok = True
    for seed in range(1000):
        game = setup_game([VIRTUAL] * 3, SeededTape(seed), TallyTranscript(),
                          collect_events=False)
        while not game.finished:
            game.turns += 1
            ok = ok and game.pending_color is None  # virtual starters designate inline
            game.virtual_turn(game.match.turn)
            total = sum(len(s.hand) for s in game.seats) + len(game.unplayed) + len(game.discard)
            ok = ok and total == 108
            if game.turns % 25 == 0:
                ok = ok and game.face_counter() == deck
            if game.turns > 1000:  # empirical ceiling: observed max is ~190
                ok = False
                break
        ok = ok and game.face_counter() == deck and game.winner is not None
        max_turns_seen = max(max_turns_seen, game.turns)
        if not ok:
            break

    for seed in range(5):
        sevens = SevensGame([VIRTUAL, "human", VIRTUAL], SeededTape(seed))
        sevens.run()
        for span in sevens.board.intervals.values():
            ok = ok and (span is None or span[0] <= 7 <= span[1])
    for seed in range(3):
        hearts = HeartsGame([VIRTUAL, "human", VIRTUAL, "human"], SeededTape(seed))
        ok = ok and sum(hearts.play_round()) == 26
    for seed in range(5):
        muggins = MugginsGame([VIRTUAL, "human", VIRTUAL], SeededTape(seed))
        muggins.run()
        ok = ok and all(score % 5 == 0 for score in muggins.scores)
        ok = ok and all(b == c for (_, b), (c, _) in
                        zip(muggins.layout.chain, muggins.layout.chain[1:]))
    announce("game-termination-conservation", ok,
             f"1000 games, max {max_turns_seen} turns; variant smoke suites")


def test_replay_determinism():
    ok = True
    for game, kinds in (
        ("uno", [VIRTUAL] * 3),
        ("sevens", [VIRTUAL, "human", VIRTUAL]),
        ("hearts", [VIRTUAL, "human", VIRTUAL, "human"]),
        ("dominoes", [VIRTUAL, "human", VIRTUAL]),
    ):
        replay = record_game(game, kinds, seed=31)
        round_tripped = parse_replay(write_replay(replay))
        ok = ok and verify_replay(round_tripped).identical

    # an interactive session with recorded human moves
    hub = SessionHub()
    created = hub.handle({"v": 1, "kind": "create", "game": "uno",
                          "seats": ["human", "virtual", "virtual"], "seed": 19})
    session = created["session"]
    credential = hub.handle({"v": 1, "kind": "join", "session": session, "seat": 0})["credential"]
    moves = 0
    while moves < 600:
        view = hub.handle({"v": 1, "kind": "view", "session": session,
                           "credential": credential})
        if view["phase"] != "active" or view["pending"] is None:
            break
        moves += 1
        if view["pending"] == "play":
            action = ({"type": "play", "face": view["legal"][0]}
                      if view["legal"] else {"type": "draw"})
            if action.get("face") in ("W", "D"):
                action["color"] = "R"
        elif view["pending"] == "playdrawn":
            action = {"type": "playdrawn"}
            if view["legal"][0] in ("W", "D"):
                action["color"] = "B"
        else:
            action = {"type": "color", "color": "G"}
        verdict = hub.handle({"v": 1, "kind": "move", "session": session,
                              "credential": credential, "id": f"m{moves}",
                              "action": action})
        ok = ok and verdict["accepted"]
    session_replay = parse_replay(hub.export_replay(session))
    ok = ok and bool(session_replay.moves)
    ok = ok and verify_replay(session_replay).identical
    announce("replay-determinism", ok, "4 seeded games + 1 recorded session")
