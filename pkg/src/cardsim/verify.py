"""Verification harness: exact tape-enumeration oracles, chi-squared uniformity and
two-world leakage suites, and structural transcript checks.

The oracle side never samples: it either enumerates every shuffle tape and returns
exact rational probabilities, or it refuses. Statistical suites are seeded and report
(statistic, p-value, N, seed) so runs are reproducible.
"""

from __future__ import annotations

import hashlib
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Any, Callable, Hashable, Iterable, Iterator

from scipy.stats import chi2 as _chi2

from .deck import CardFace, face_token
from .protocols import (
    MODIFIED,
    NoneValid,
    Selected,
    SelectionContext,
    SelectionResult,
    card_selection,
)
from .table import ExplicitTape, RecordingTape, SeededTape, TableCard, Transcript


class TapeCountError(RuntimeError):
    """Raised when an instance has too many tapes to enumerate exactly."""


@dataclass
class Report:
    name: str
    passed: bool
    statistic: float | None = None
    p_value: float | None = None
    n: int | None = None
    seed: int | None = None
    detail: str = ""

    def line(self) -> str:
        parts = [f"{self.name}: {'PASS' if self.passed else 'FAIL'}"]
        if self.statistic is not None:
            parts.append(f"stat={self.statistic:.4f}")
        if self.p_value is not None:
            parts.append(f"p={self.p_value:.6g}")
        if self.n is not None:
            parts.append(f"n={self.n}")
        if self.seed is not None:
            parts.append(f"seed={self.seed}")
        if self.detail:
            parts.append(self.detail)
        return "  ".join(parts)

    def summary(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "n": self.n,
            "seed": self.seed,
            "detail": self.detail,
        }


Program = Callable[[Any], Hashable]  # draws from a tape, returns a hashable outcome


def shuffle_sizes(program: Program, probe_seed: int = 0) -> list[int]:
    """Sizes of the permutations a program draws, discovered by one probe run."""
    tape = RecordingTape(SeededTape(probe_seed))
    program(tape)
    return tape.sizes


def tape_count(sizes: Iterable[int]) -> int:
    return math.prod(math.factorial(n) for n in sizes)


class TapeEnumeration:
    """Iterator over every explicit tape for a fixed sequence of shuffle sizes."""

    def __init__(self, sizes: list[int], ceiling: int = 10**6) -> None:
        self.sizes = list(sizes)
        self.count = tape_count(self.sizes)
        if self.count > ceiling:
            raise TapeCountError(
                f"{self.count} tapes exceed the enumeration ceiling of {ceiling}"
            )

    def __iter__(self) -> Iterator[ExplicitTape]:
        groups = [list(permutations(range(n))) for n in self.sizes]

        def rec(prefix: list, depth: int) -> Iterator[ExplicitTape]:
            if depth == len(groups):
                yield ExplicitTape(prefix)
                return
            for perm in groups[depth]:
                yield from rec(prefix + [perm], depth + 1)

        return rec([], 0)


def exact_distribution(program: Program, ceiling: int = 10**6) -> dict[Hashable, Fraction]:
    """Exact outcome distribution of a program by running it under every tape."""
    sizes = shuffle_sizes(program)
    enum = TapeEnumeration(sizes, ceiling)
    dist: dict[Hashable, Fraction] = {}
    weight = Fraction(1, enum.count)
    for tape in enum:
        outcome = program(tape)
        if not tape.exhausted:
            raise TapeCountError("program drew fewer shuffles than its probe run")
        dist[outcome] = dist.get(outcome, Fraction(0)) + weight
    assert sum(dist.values()) == 1
    return dist


def chi_squared_uniform(counts: dict[Hashable, int], support: list[Hashable]) -> tuple[float, float]:
    """Goodness-of-fit statistic and p-value against the uniform law on `support`."""
    n = sum(counts.values())
    expected = n / len(support)
    stat = sum((counts.get(s, 0) - expected) ** 2 / expected for s in support)
    stray = set(counts) - set(support)
    if stray:
        raise ValueError(f"outcomes outside the expected support: {sorted(map(str, stray))}")
    df = len(support) - 1
    if df == 0:
        return 0.0, 1.0
    return stat, float(_chi2.sf(stat, df))


def uniformity_test(outcomes: Iterable[Hashable], support: list[Hashable],
                    significance: float = 0.01, name: str = "uniformity",
                    seed: int | None = None) -> Report:
    counts = Counter(outcomes)
    n = sum(counts.values())
    if n < 1000:
        raise ValueError("uniformity_test needs at least 1000 samples")
    try:
        stat, p = chi_squared_uniform(counts, support)
    except ValueError as exc:
        return Report(name, False, n=n, seed=seed, detail=str(exc))
    return Report(name, p > significance, statistic=stat, p_value=p, n=n, seed=seed)


@dataclass(frozen=True)
class World:
    """One hidden-state assignment: face multisets per pile, acting pile first,
    the draw deck last."""

    hands: tuple[tuple[CardFace, ...], ...]

    def all_faces(self) -> tuple[str, ...]:
        return tuple(sorted(face_token(f) for h in self.hands for f in h))

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(h) for h in self.hands)


@dataclass(frozen=True)
class WorldPair:
    """Two hidden worlds a bystander should not be able to tell apart: identical
    public view (hand sizes, undiscarded multiset, acting pile's valid multiset)."""

    a: World
    b: World
    validity: Callable[[CardFace], bool]

    def __post_init__(self) -> None:
        if self.a.sizes() != self.b.sizes():
            raise ValueError("worlds must agree on every pile size")
        if self.a.all_faces() != self.b.all_faces():
            raise ValueError("worlds must hold the same card multiset overall")
        va = sorted(face_token(f) for f in self.a.hands[0] if self.validity(f))
        vb = sorted(face_token(f) for f in self.b.hands[0] if self.validity(f))
        if va != vb:
            raise ValueError("worlds must give the acting pile the same valid multiset")


def selection_program(world: World, validity: Callable[[CardFace], bool],
                      mode: str = MODIFIED,
                      mutations: frozenset[str] = frozenset(),
                      outcome: str = "transcript") -> Program:
    """Wrap a selection run as a tape -> outcome program.

    outcome: "transcript" hashes the serialized transcript; "card" returns the
    selected face token or "NONE"; "result" returns (token, restored-hand tuples).
    """
    ctx = SelectionContext(
        hands=tuple(tuple(TableCard(f) for f in hand) for hand in world.hands),
        validity=validity,
        mode=mode,
    )

    def run(tape):
        transcript = Transcript()
        result = card_selection(ctx, tape, transcript, mutations)
        if outcome == "transcript":
            return hashlib.sha256(transcript.serialize().encode()).hexdigest()
        token = outcome_token(result)
        if outcome == "card":
            return token
        hands = tuple(
            tuple(sorted(face_token(c.face) for c in hand)) for hand in result.hands
        )
        return (token, hands)

    return run


def outcome_token(result: SelectionResult) -> str:
    if isinstance(result.outcome, Selected):
        return face_token(result.outcome.card.face)
    return "NONE"


def leakage_audit(pair: WorldPair, runs: int = 50_000, seed: int = 0,
                  significance: float = 0.001, buckets: int = 64,
                  ceiling: int = 10**6,
                  mutations: frozenset[str] = frozenset(),
                  name: str = "leakage") -> Report:
    """Compare the transcript distributions the two worlds induce.

    Small instances are settled exactly by tape enumeration; larger ones fall back to
    a seeded two-sample chi-squared test over hashed transcript buckets.
    """
    prog_a = selection_program(pair.a, pair.validity, mutations=mutations)
    prog_b = selection_program(pair.b, pair.validity, mutations=mutations)
    sizes = shuffle_sizes(prog_a)
    if tape_count(sizes) <= ceiling:
        dist_a = exact_distribution(prog_a, ceiling)
        dist_b = exact_distribution(prog_b, ceiling)
        return Report(name, dist_a == dist_b, n=tape_count(sizes), detail="exact")

    counts_a: Counter = Counter()
    counts_b: Counter = Counter()
    for i in range(runs):
        bucket_a = int(prog_a(SeededTape(seed * 2_000_003 + 2 * i)), 16) % buckets
        bucket_b = int(prog_b(SeededTape(seed * 2_000_003 + 2 * i + 1)), 16) % buckets
        counts_a[bucket_a] += 1
        counts_b[bucket_b] += 1
    stat, p, df = chi_squared_two_sample(counts_a, counts_b)
    return Report(name, p > significance, statistic=stat, p_value=p,
                  n=runs, seed=seed, detail=f"df={df}")


def chi_squared_two_sample(counts_a: Counter, counts_b: Counter) -> tuple[float, float, int]:
    total_a = sum(counts_a.values())
    total_b = sum(counts_b.values())
    grand = total_a + total_b
    stat = 0.0
    df = -1
    for bucket in set(counts_a) | set(counts_b):
        col = counts_a[bucket] + counts_b[bucket]
        for observed, rowtot in ((counts_a[bucket], total_a), (counts_b[bucket], total_b)):
            expected = rowtot * col / grand
            stat += (observed - expected) ** 2 / expected
        df += 1
    if df <= 0:
        return 0.0, 1.0, 0
    return stat, float(_chi2.sf(stat, df)), df


@dataclass(frozen=True)
class PublicView:
    """Everything a bystander knows before a selection run starts."""

    hand_sizes: tuple[int, ...]  # acting pile first, deck last
    undiscarded: tuple[str, ...]  # sorted face tokens of every hidden card
    aux_brought: int

    @property
    def piles(self) -> int:
        return len(self.hand_sizes)

    @property
    def total_cards(self) -> int:
        return sum(self.hand_sizes)

    @property
    def acting_count(self) -> int:
        return self.hand_sizes[0]


def public_view(world: World, aux_brought: int) -> PublicView:
    return PublicView(world.sizes(), world.all_faces(), aux_brought)


def structural_checks(transcript: Transcript, view: PublicView,
                      name: str = "structure") -> Report:
    """Assert the transcript's publicly checkable shape against the public view.

    Checks: (card-row-reveal) the first revealed row is the full hidden multiset;
    (marker-counts) owner-marker counts equal pile sizes; (return-marker-counts)
    the final marker row covers every non-acting pile; (shuffle-count) exactly
    acting+5 scrambles; (aux-count) exactly 3k+4 auxiliary cards.
    """
    k = view.total_cards
    k1 = view.acting_count
    failures: list[str] = []

    events = transcript.events
    shuffle_idx = [i for i, ev in enumerate(events) if ev[0] == "SHUFFLE"]
    expected_shuffles = k1 + 5 if k > k1 else k1 + 4
    if len(shuffle_idx) != expected_shuffles:
        failures.append(
            f"shuffle-count: saw {len(shuffle_idx)}, expected {expected_shuffles}"
        )

    def reveals_between(a: int, b: int, row: int) -> list[str]:
        return [ev[3] for ev in events[a:b] if ev[0] == "REVEAL" and ev[1] == row]

    if len(shuffle_idx) >= 2:
        revealed = sorted(reveals_between(shuffle_idx[0], shuffle_idx[1], 1))
        if tuple(revealed) != view.undiscarded:
            failures.append(
                f"card-row-reveal: {len(revealed)} faces revealed, "
                f"expected the {k} undiscarded cards"
            )
    else:
        failures.append("card-row-reveal: transcript too short to locate the card row")

    if len(shuffle_idx) >= 3:
        markers = Counter(reveals_between(shuffle_idx[1], shuffle_idx[2], 2))
        expected = {f"THETA{i + 1}": size for i, size in enumerate(view.hand_sizes) if size}
        if markers != expected:
            failures.append(f"marker-counts: {dict(markers)} != {expected}")
    else:
        failures.append("marker-counts: transcript too short to locate the marker row")

    if k > k1:
        tail = Counter(reveals_between(shuffle_idx[-1], len(events), 2)) if shuffle_idx else Counter()
        expected_tail = {
            f"THETA{i + 1}": size
            for i, size in enumerate(view.hand_sizes)
            if size and i > 0
        }
        if tail != expected_tail:
            failures.append(f"return-marker-counts: {dict(tail)} != {expected_tail}")

    if view.aux_brought != 3 * k + 4:
        failures.append(f"aux-count: {view.aux_brought} != {3 * k + 4}")

    return Report(name, not failures, n=len(events), detail="; ".join(failures))


def total_variation(dist: dict[Hashable, Fraction], counts: Counter, n: int) -> float:
    keys = set(dist) | set(counts)
    return 0.5 * sum(abs(float(dist.get(key, 0)) - counts.get(key, 0) / n) for key in keys)


class BiasedTape:
    """Adversarial tape: returns the identity permutation half the time.

    Only the harness self-tests use it, to prove the uniformity suite rejects a
    rigged shuffle source.
    """

    def __init__(self, seed: int) -> None:
        self._rng = random.Random(seed)
        self._fair = SeededTape(seed + 1)

    def permutation(self, n: int) -> tuple[int, ...]:
        if self._rng.random() < 0.5:
            return tuple(range(n))
        return self._fair.permutation(n)


# ----------------------------------------------------------------- suite

MUTATIONS = (
    "skip-scramble-1",
    "skip-scramble-2",
    "skip-scramble-3",
    "skip-lottery-scramble-1",
    "skip-lottery-scramble-2",
    "leak-card",
    "swap-theta",
    "extra-shuffle",
    "extra-aux",
)

MUTATION_ALIASES = {"drop-shuffle": "skip-scramble-2"}


def _faces(*tokens: str):
    from .deck import parse_face

    return tuple(parse_face(t) for t in tokens)


def _red_or_two(face: CardFace) -> bool:
    from .deck import Color

    return getattr(face, "color", None) in (None, Color.RED) or face.symbol == "2"


def _lottery_program(validity: tuple[int, ...], mode: str,
                     mutations: frozenset[str]) -> Program:
    from .protocols import LotteryInput, covert_lottery
    from .table import encode_bit

    held = tuple(TableCard(f) for f in _faces(*[f"{i + 1}R" for i in range(len(validity))]))

    def run(tape):
        inp = LotteryInput(held, tuple(encode_bit(b) for b in validity), mode)
        out = covert_lottery(inp, tape, Transcript(), mutations=mutations)
        return face_token(out.card.face) if isinstance(out, Selected) else "NONE"

    return run


def standard_suite(seed: int = 0, runs: int = 2000,
                   mutations: frozenset[str] = frozenset(),
                   suites: tuple[str, ...] = ("oracle", "uniformity", "leakage", "structure"),
                   ) -> list[Report]:
    """The house verification battery at CLI scale; heavier versions live in the
    acceptance tests. Mutations are threaded into every protocol run so a broken
    step shows up as at least one failing report."""
    from fractions import Fraction

    from .protocols import ORIGINAL, designate_color

    reports: list[Report] = []

    if "oracle" in suites:
        dist = exact_distribution(_lottery_program((1, 1), MODIFIED, mutations))
        want = {"1R": Fraction(1, 2), "2R": Fraction(1, 2)}
        reports.append(Report("oracle-lottery-uniform", dist == want, detail=f"{dict(dist)}"))

        dist = exact_distribution(_lottery_program((0, 0, 0), MODIFIED, mutations))
        reports.append(Report("oracle-lottery-none", dist == {"NONE": Fraction(1)}))

        dist = exact_distribution(_lottery_program((0, 0), ORIGINAL, mutations))
        reports.append(Report("oracle-lottery-original", dist == want, detail=f"{dict(dist)}"))

        world = World((_faces("7R", "4G"), _faces("SY", "2Y")))
        program = selection_program(world, _red_or_two, mutations=mutations, outcome="result")
        dist = exact_distribution(program)
        want_sel = {("7R", (("4G",), ("2Y", "SY"))): Fraction(1)}
        reports.append(Report("oracle-selection-tiny", dist == want_sel))

    if "uniformity" in suites:
        tape = SeededTape(seed)
        outcomes = [designate_color(tape, Transcript()).value for _ in range(max(runs, 1000))]
        reports.append(
            uniformity_test(outcomes, list("RYGB"), name="uniformity-color", seed=seed)
        )

        for label, hand in (("v2", ("7R", "W", "4G")), ("v3", ("7R", "W", "2G", "SB"))):
            world = World((_faces(*hand), _faces("SY", "1B")))
            program = selection_program(world, _red_or_two, mutations=mutations, outcome="card")
            support = [t for t in hand if _red_or_two(_faces(t)[0])]
            outcomes = [
                program(SeededTape(seed * 7_919 + i)) for i in range(max(runs, 1000))
            ]
            reports.append(
                uniformity_test(outcomes, support, name=f"uniformity-selection-{label}", seed=seed)
            )

    if "leakage" in suites:
        pair = WorldPair(
            World((_faces("7R", "4G"), _faces("SY",), _faces("2Y",))),
            World((_faces("7R", "4G"), _faces("2Y",), _faces("SY",))),
            _red_or_two,
        )
        reports.append(
            leakage_audit(pair, mutations=mutations, name="leakage-hand-deck-swap")
        )
        pair = WorldPair(
            World((_faces("7R", "4G"), _faces("SY", "2Y"))),
            World((_faces("7R", "SY"), _faces("4G", "2Y"))),
            _red_or_two,
        )
        reports.append(
            leakage_audit(pair, mutations=mutations, name="leakage-acting-invalid-swap")
        )

    if "structure" in suites:
        from .protocols import SelectionContext, card_selection

        world = World((_faces("7R", "4G"), _faces("SY",), _faces("2Y", "1B")))
        ctx = SelectionContext(
            hands=tuple(tuple(TableCard(f) for f in hand) for hand in world.hands),
            validity=_red_or_two,
        )
        transcript = Transcript()
        result = card_selection(ctx, SeededTape(seed), transcript, mutations)
        view = public_view(world, result.aux_used)
        reports.append(structural_checks(transcript, view, name="structure-selection"))

    return reports
