"""Command-line front end: ``freegroup <subcommand> ...``.

Exit status: 0 for a positive answer (member, primitive), 1 for a negative
one, 2 for invalid input.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from ctp import DepthPolicy, MembershipReport, membership_mpd
from experiments import (
    DEFAULT_ELLS,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    DEFAULT_W0_LENGTHS,
    EXPERIMENTS,
    LENGTH_DISTRIBUTIONS,
    UNIFORM_LENGTH,
    ExperimentConfig,
    TupleSizePolicy,
    run_experiment,
)
from free_words import Word
from growth import ConvergenceError, growth_table
from primitivity import is_primitive_shpilrain, is_primitive_whitehead, relative_primitivity
from shared_output import format_basis, membership_line, primitivity_line, rprim_line, stallings_summary
from stallings import build_stallings, run_mp, spanning_basis, to_dot
from trial_telemetry import TrialTelemetry, configure_logging
from word_format import infer_rank, parse_word
from word_loader import WordLoader

logger = logging.getLogger("freegroup.cli")

EXIT_YES = 0
EXIT_NO = 1
EXIT_INVALID = 2
DEFAULT_MAX_RANK = 8


def _int_list(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(item) for item in text.replace(",", " ").split())
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'") from e


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="freegroup",
        description="Membership, primitivity and growth in free groups, with average-case benchmarks.",
    )
    parser.add_argument("--log-level", default="WARNING", help="logging level (default WARNING)")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add_word_options(sub: argparse.ArgumentParser, with_gens: bool) -> None:
        sub.add_argument("--rank", type=int, default=None, help="rank r (inferred from the words if omitted)")
        sub.add_argument("--reduce", action="store_true", help="freely reduce input words instead of rejecting them")
        if with_gens:
            sub.add_argument("--gens", nargs="*", default=[], help="generator words")
            sub.add_argument("--words-file", type=Path, default=None, help="file of generator words, one per line")
            sub.add_argument("--show-basis", action="store_true", help="also print the basis the expression is written in")

    member = subparsers.add_parser("member", help="decide w0 in <gens>")
    member.add_argument("w0")
    add_word_options(member, with_gens=True)
    member.add_argument("--algorithm", choices=("mp", "mpd"), default="mpd")
    member.add_argument("--depth-policy", type=DepthPolicy.parse, default=DepthPolicy())

    primitive = subparsers.add_parser("primitive", help="decide whether w is primitive in F(A)")
    primitive.add_argument("w")
    add_word_options(primitive, with_gens=False)
    primitive.add_argument("--algorithm", choices=("shpilrain", "whitehead"), default="shpilrain")

    rprim = subparsers.add_parser("rprim", help="decide w0 in H and primitive in H")
    rprim.add_argument("w0")
    add_word_options(rprim, with_gens=True)
    rprim.add_argument("--depth-policy", type=DepthPolicy.parse, default=DepthPolicy())

    stallings = subparsers.add_parser("stallings", help="Stallings graph of <gens>")
    add_word_options(stallings, with_gens=True)
    stallings.add_argument("--dot", type=Path, default=None, help="write the graph in DOT format")

    eigen = subparsers.add_parser("eigen", help="growth moduli table as CSV")
    eigen.add_argument("--max-rank", type=int, default=DEFAULT_MAX_RANK)
    eigen.add_argument("--out", type=Path, default=None)

    bench = subparsers.add_parser("bench", help="run a Monte Carlo experiment, CSV output")
    bench.add_argument("experiment", choices=tuple(EXPERIMENTS))
    bench.add_argument("--rank", type=int, default=2)
    bench.add_argument("--seed", type=int, default=DEFAULT_SEED)
    bench.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    bench.add_argument("--lengths", type=_int_list, default=())
    bench.add_argument("--k", type=TupleSizePolicy.parse, default=TupleSizePolicy())
    bench.add_argument("--depth-policy", type=DepthPolicy.parse, default=DepthPolicy())
    bench.add_argument("--length-distribution", choices=LENGTH_DISTRIBUTIONS, default=UNIFORM_LENGTH)
    bench.add_argument("--w0-lengths", type=_int_list, default=DEFAULT_W0_LENGTHS)
    bench.add_argument("--ells", type=_int_list, default=DEFAULT_ELLS)
    bench.add_argument("--out", type=Path, default=None)
    bench.add_argument("--trials-out", type=Path, default=None, help="also write one CSV row per trial (routes, counters, wall times)")
    return parser


def _read_words(args: argparse.Namespace, leading: Sequence[str]) -> Tuple[List[Word], List[Word]]:
    """Parse the leading positional words and the generators over a common rank."""
    texts = list(leading) + list(getattr(args, "gens", []) or [])
    file_words: List[Word] = []
    if getattr(args, "words_file", None) is not None:
        file_words = WordLoader.load_words(args.words_file, args.rank, allow_unreduced=args.reduce)
    rank = args.rank
    if rank is None:
        rank = max([infer_rank(texts)] + [w.rank for w in file_words])
    words = [parse_word(text, rank, allow_unreduced=args.reduce) for text in texts]
    # file words inferred a smaller rank on their own
    words.extend(w if w.rank == rank else Word(w.letters, rank) for w in file_words)
    return words[:len(leading)], words[len(leading):]


def _cmd_member(args: argparse.Namespace) -> int:
    (w0,), generators = _read_words(args, [args.w0])
    if not generators:
        raise ValueError("❌ No generators given. Use --gens or --words-file.")
    if args.algorithm == "mp":
        result = run_mp(w0, generators)
        report = MembershipReport(
            member=result.member, expression=result.expression, path="mp",
            letters_read=result.letters_read, basis=result.basis,
        )
    else:
        report = membership_mpd(w0, generators, args.depth_policy)
    print(membership_line(report))
    if args.show_basis and report.member:
        print(format_basis(report.basis))
    return EXIT_YES if report.member else EXIT_NO


def _cmd_primitive(args: argparse.Namespace) -> int:
    (w,), _ = _read_words(args, [args.w])
    if args.algorithm == "whitehead":
        verdict = is_primitive_whitehead(w)
        print(f"{'primitive' if verdict else 'not primitive'} (whitehead)")
    else:
        report = is_primitive_shpilrain(w)
        verdict = report.verdict
        print(primitivity_line(report))
    return EXIT_YES if verdict else EXIT_NO


def _cmd_rprim(args: argparse.Namespace) -> int:
    (w0,), generators = _read_words(args, [args.w0])
    if not generators:
        raise ValueError("❌ No generators given. Use --gens or --words-file.")
    report = relative_primitivity(w0, generators, args.depth_policy)
    print(rprim_line(report))
    if args.show_basis and report.member:
        print(format_basis(report.basis))
    return EXIT_YES if report.member and report.primitive else EXIT_NO


def _cmd_stallings(args: argparse.Namespace) -> int:
    _, generators = _read_words(args, [])
    rank = generators[0].rank if generators else (args.rank or 1)
    graph = build_stallings(generators, rank=rank)
    if args.dot is not None:
        args.dot.write_text(to_dot(graph), encoding="utf-8")
        logger.info("Wrote %s", args.dot)
    print(stallings_summary(graph))
    if args.show_basis:
        print(format_basis(spanning_basis(graph).basis))
    return EXIT_YES


def _cmd_eigen(args: argparse.Namespace) -> int:
    csv_text = growth_table(args.max_rank).to_csv(index=False, float_format="%.10f", lineterminator="\n")
    if args.out is not None:
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            handle.write(csv_text)
    sys.stdout.write(csv_text)
    return EXIT_YES


def _cmd_bench(args: argparse.Namespace) -> int:
    config = ExperimentConfig(
        experiment=args.experiment,
        rank=args.rank,
        lengths=args.lengths,
        k=args.k,
        depth_policy=args.depth_policy,
        samples=args.samples,
        seed=args.seed,
        length_distribution=args.length_distribution,
        w0_lengths=args.w0_lengths,
        ells=args.ells,
        out=args.out,
    )
    telemetry = TrialTelemetry(max_history=config.samples * len(config.lengths) * max(1, len(config.w0_lengths)))
    csv_text = run_experiment(config, telemetry)
    if args.out is None:
        sys.stdout.write(csv_text)
    if args.trials_out is not None:
        telemetry.to_dataframe().to_csv(args.trials_out, index=False, lineterminator="\n")
        logger.info("Wrote %d trial records to %s", len(telemetry.records), args.trials_out)
    return EXIT_YES


COMMANDS = {
    "member": _cmd_member,
    "primitive": _cmd_primitive,
    "rprim": _cmd_rprim,
    "stallings": _cmd_stallings,
    "eigen": _cmd_eigen,
    "bench": _cmd_bench,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INVALID if e.code else EXIT_YES
    try:
        configure_logging(args.log_level)
        return COMMANDS[args.command](args)
    except (ValueError, OSError, OverflowError, ConvergenceError) as e:
        message = str(e)
        if not message.startswith("❌"):
            message = f"❌ {message}"
        print(message, file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
