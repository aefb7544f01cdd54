"""Report lines printed by the CLI subcommands.

Kept apart from cli.py so the formats can be tested without argparse.
"""

from typing import Sequence

from ctp import MembershipReport
from free_words import Word
from primitivity import PrimitivityReport, RPrimReport
from stallings import StallingsGraph, finite_index, rank
from word_format import format_word, format_xword


def format_basis(basis: Sequence[Word]) -> str:
    """'x1 = aba, x2 = bab'."""
    return ", ".join(f"x{i} = {format_word(w) or '1'}" for i, w in enumerate(basis, start=1))


def membership_line(report: MembershipReport) -> str:
    """'member x1 x2 (fast)' or 'non-member (fallback)'."""
    if not report.member:
        return f"non-member ({report.path})"
    expression = format_xword(report.expression) or "1"
    return f"member {expression} ({report.path})"


def primitivity_line(report: PrimitivityReport) -> str:
    """'primitive (short-core)' or 'not primitive (obstruction, step 3)'."""
    verdict = "primitive" if report.verdict else "not primitive"
    if report.obstruction_step is not None:
        return f"{verdict} ({report.route}, step {report.obstruction_step})"
    return f"{verdict} ({report.route})"


def rprim_line(report: RPrimReport) -> str:
    if not report.member:
        return f"non-member ({report.membership_path})"
    verdict = "primitive in H" if report.primitive else "not primitive in H"
    expression = format_xword(report.expression) or "1"
    return f"member {expression} ({report.membership_path}); {verdict} ({report.primitivity_route})"


def stallings_summary(g: StallingsGraph) -> str:
    """Vertex, edge, rank and index counts, then one line per edge numbered from 1."""
    index = finite_index(g)
    lines = [
        f"vertices={g.vertex_count} edges={g.edge_count} rank={rank(g)} "
        f"index={index if index is not None else 'inf'}"
    ]
    for source, letter, target in g.edges():
        lines.append(f"{source + 1} -{format_word(Word((letter,), g.rank))}-> {target + 1}")
    return "\n".join(lines)
