"""Command-line front end: simulate games, run the verification battery, check
replays, and serve live sessions."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from .replay import ReplayError, annotate, parse_replay, record_game, verify_replay, write_replay
from .verify import MUTATION_ALIASES, MUTATIONS, standard_suite

GAMES = ("uno", "sevens", "hearts", "dominoes")
EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


@dataclass
class SimStats:
    winner: int
    turns: int
    shuffles: int
    selections: int


def _simulate_one(game: str, kinds: list[str], seed: int) -> SimStats:
    from .replay import execute

    finished = execute(game, kinds, seed)
    return SimStats(
        winner=finished.winner if finished.winner is not None else -1,
        turns=getattr(finished, "turns", 0),
        shuffles=finished.transcript.n_shuffles,
        selections=getattr(finished, "selections", 0),
    )


def cmd_simulate(args) -> int:
    if args.runs < 1:
        print("simulate: --runs must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    virtual = args.players if args.virtual is None else args.virtual
    if virtual > args.players:
        print("simulate: --virtual cannot exceed --players", file=sys.stderr)
        return EXIT_USAGE
    if args.game == "hearts" and args.players != 4:
        print("simulate: hearts needs exactly 4 players", file=sys.stderr)
        return EXIT_USAGE
    kinds = ["virtual"] * virtual + ["human"] * (args.players - virtual)

    seeds = [args.seed * 1_000_003 + i for i in range(args.runs)]
    if args.jobs > 1:
        from multiprocessing import Pool

        with Pool(args.jobs) as pool:
            stats = pool.starmap(_simulate_one, [(args.game, kinds, s) for s in seeds])
    else:
        stats = [_simulate_one(args.game, kinds, s) for s in seeds]

    if args.record:
        replay = record_game(args.game, kinds, seeds[0])
        with open(args.record, "w") as fh:
            fh.write(write_replay(replay))

    wins: dict[int, int] = {}
    for s in stats:
        wins[s.winner] = wins.get(s.winner, 0) + 1
    turns = [s.turns for s in stats]
    shuffles = [s.shuffles for s in stats]
    summary = {
        "game": args.game,
        "players": args.players,
        "virtual": virtual,
        "runs": args.runs,
        "seed": args.seed,
        "wins": {f"seat{k + 1}": v for k, v in sorted(wins.items())},
        "turns": {"min": min(turns), "max": max(turns),
                  "mean": round(sum(turns) / len(turns), 2)},
        "shuffles": {"total": sum(shuffles),
                     "mean_per_game": round(sum(shuffles) / len(shuffles), 2)},
    }
    selections = sum(s.selections for s in stats)
    if selections:
        summary["selections"] = {
            "total": selections,
            "shuffles_per_selection": round(sum(shuffles) / selections, 2),
        }

    if args.format == "structured":
        text = json.dumps(summary, indent=2, sort_keys=True)
    else:
        lines = [f"{args.game}: {args.runs} runs, {args.players} players "
                 f"({virtual} virtual), seed {args.seed}"]
        for seat, count in sorted(wins.items()):
            lines.append(f"  seat{seat + 1} wins: {count}")
        lines.append(f"  turns: min {min(turns)}  mean {summary['turns']['mean']}  max {max(turns)}")
        lines.append(f"  shuffles: {sum(shuffles)} total, {summary['shuffles']['mean_per_game']} per game")
        if selections:
            lines.append(
                f"  selections: {selections} total, "
                f"{summary['selections']['shuffles_per_selection']} shuffles each"
            )
        text = "\n".join(lines)
    print(text)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    mutations = frozenset()
    if args.mutate:
        name = MUTATION_ALIASES.get(args.mutate, args.mutate)
        if name not in MUTATIONS:
            print(f"verify: unknown mutation {args.mutate!r}; "
                  f"choose from {', '.join(MUTATIONS)}", file=sys.stderr)
            return EXIT_USAGE
        mutations = frozenset({name})
    suites = ("oracle",) if args.oracle_only else ("oracle", "uniformity", "leakage", "structure")
    reports = standard_suite(seed=args.seed, runs=args.runs, mutations=mutations, suites=suites)
    for report in reports:
        print(report.line())
    if args.output:
        with open(args.output, "w") as fh:
            json.dump([r.summary() for r in reports], fh, indent=2)
            fh.write("\n")
    failed = [r for r in reports if not r.passed]
    print(f"{len(reports) - len(failed)}/{len(reports)} checks passed")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_replay(args) -> int:
    try:
        with open(args.path) as fh:
            replay = parse_replay(fh.read())
    except OSError as exc:
        print(f"replay: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ReplayError as exc:
        print(f"replay: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.verbose:
        for line in annotate(replay):
            print(line)
    try:
        verdict = verify_replay(replay)
    except ReplayError as exc:
        print(f"replay: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(verdict.describe())
    return EXIT_OK if verdict.identical else EXIT_FAIL


def cmd_serve(args) -> int:
    from .service import serve

    serve(host=args.host, port=args.port, ui_dir=args.ui, seed=args.seed,
          delay=args.delay)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cardsim",
        description="Simulate and verify card-table protocols for virtual players.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    default_seed = int(os.environ.get("CARDSIM_SEED", "0"))

    sim = sub.add_parser("simulate", help="run seeded games and print statistics")
    sim.add_argument("--game", choices=GAMES, default="uno")
    sim.add_argument("--players", type=int, default=3)
    sim.add_argument("--virtual", type=int, default=None,
                     help="virtual seats (default: all)")
    sim.add_argument("--runs", type=int, default=10)
    sim.add_argument("--seed", type=int, default=default_seed,
                     help="base seed (env CARDSIM_SEED overrides the default)")
    sim.add_argument("--jobs", type=int, default=1)
    sim.add_argument("--record", metavar="PATH", help="write a replay of the first run")
    sim.add_argument("--format", choices=("text", "structured"), default="text")
    sim.add_argument("--output", metavar="PATH")
    sim.set_defaults(func=cmd_simulate)

    ver = sub.add_parser("verify", help="run the verification battery")
    ver.add_argument("--seed", type=int, default=default_seed)
    ver.add_argument("--runs", type=int, default=2000,
                     help="samples per statistical check")
    ver.add_argument("--mutate", metavar="NAME",
                     help="deliberately break one protocol step")
    ver.add_argument("--oracle-only", action="store_true")
    ver.add_argument("--output", metavar="PATH", help="write machine-readable summary")
    ver.set_defaults(func=cmd_verify)

    rep = sub.add_parser("replay", help="re-execute a replay file and compare")
    rep.add_argument("path")
    rep.add_argument("--verbose", action="store_true",
                     help="print the annotated walkthrough")
    rep.set_defaults(func=cmd_replay)

    srv = sub.add_parser("serve", help="serve live sessions for the web UI")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8750)
    srv.add_argument("--ui", metavar="DIR", help="static files to serve alongside")
    srv.add_argument("--seed", type=int, default=None,
                     help="fixed seed for new sessions (default: random)")
    srv.add_argument("--delay", type=float, default=0.0,
                     help="seconds between streamed events, for watchability")
    srv.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
