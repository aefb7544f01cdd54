"""Primitivity: Whitehead graphs, Whitehead automorphisms, Shpilrain's Algorithm S.

The exact decider is a greedy Whitehead reduction of the cyclic core:
apply the first automorphism (in a fixed enumeration order) that shortens
the cyclic length until none does; the word is primitive iff the final
length is 1. Algorithm S answers most inputs much earlier by watching the
Whitehead graph of the cyclic core become connected without a cut vertex.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, Iterator, List, Optional, Sequence, Tuple

from ctp import DepthPolicy, membership_mpd
from free_words import Alphabet, Word, cyclic_core, letter_at, letter_index, reduce
from stallings import XWord

logger = logging.getLogger("freegroup.primitivity")

SHORT_CORE = "short-core"
OBSTRUCTION = "obstruction"
WHITEHEAD_FALLBACK = "whitehead-fallback"


class WhiteheadGraph:
    """Simple undirected graph on the 2r letters, one adjacency bitmask per vertex.

    Vertex ``letter_index(x)`` stands for the letter x.
    """

    def __init__(self, rank: int):
        Alphabet(rank)
        self.rank = rank
        self.adjacency: List[int] = [0] * (2 * rank)
        self.edge_count = 0

    @property
    def vertex_count(self) -> int:
        return 2 * self.rank

    def add_edge(self, x: int, y: int) -> bool:
        """Add {x, y} for letters x != y; False if it was already present."""
        i, j = letter_index(x), letter_index(y)
        if i == j:
            raise ValueError(f"Whitehead graphs have no loops (letter {x})")
        if self.adjacency[i] >> j & 1:
            return False
        self.adjacency[i] |= 1 << j
        self.adjacency[j] |= 1 << i
        self.edge_count += 1
        return True

    def remove_edge(self, x: int, y: int) -> bool:
        """Delete {x, y}; False if it was absent."""
        i, j = letter_index(x), letter_index(y)
        if not self.adjacency[i] >> j & 1:
            return False
        self.adjacency[i] &= ~(1 << j)
        self.adjacency[j] &= ~(1 << i)
        self.edge_count -= 1
        return True

    def has_edge(self, x: int, y: int) -> bool:
        return bool(self.adjacency[letter_index(x)] >> letter_index(y) & 1)

    def neighbors(self, vertex: int) -> List[int]:
        mask = self.adjacency[vertex]
        return [v for v in range(self.vertex_count) if mask >> v & 1]

    def edges(self) -> Iterator[Tuple[int, int]]:
        """Edges as letter pairs (x, y) with x before y in letter order."""
        for i in range(self.vertex_count):
            for j in self.neighbors(i):
                if i < j:
                    yield letter_at(i), letter_at(j)

    def is_subgraph_of(self, other: "WhiteheadGraph") -> bool:
        return self.rank == other.rank and all(
            mine & ~theirs == 0 for mine, theirs in zip(self.adjacency, other.adjacency)
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, WhiteheadGraph):
            return NotImplemented
        return self.rank == other.rank and self.adjacency == other.adjacency

    def __repr__(self) -> str:
        return f"WhiteheadGraph(rank={self.rank}, edges={list(self.edges())})"


def whitehead_graph(u: Word, cyclic: bool) -> WhiteheadGraph:
    """W(u) when ``cyclic``, otherwise W'(u) (no wrap-around pair).

    Each adjacent pair x_i x_{i+1} contributes the edge {x_i, x_{i+1}^-1}.

    Raises:
        ValueError: If |u| < 2, or u is not cyclically reduced when ``cyclic``
    """
    if u.length < 2:
        raise ValueError(f"Whitehead graphs need |u| >= 2, got {u.length}")
    letters = u.letters
    if cyclic and letters[-1] == -letters[0]:
        raise ValueError("W(u) needs a cyclically reduced word")
    graph = WhiteheadGraph(u.rank)
    for left, right in zip(letters, letters[1:]):
        graph.add_edge(left, -right)
    if cyclic:
        graph.add_edge(letters[-1], -letters[0])
    return graph


def connected_without_cutvertex(graph: WhiteheadGraph) -> bool:
    """True iff the graph spans all 2r vertices connectedly and has no articulation vertex."""
    size = graph.vertex_count
    discovery = [-1] * size
    low = [0] * size
    discovery[0] = 0
    timer = 1
    root_children = 0
    stack = [(0, -1, iter(graph.neighbors(0)))]
    while stack:
        vertex, parent, pending = stack[-1]
        for neighbor in pending:
            if discovery[neighbor] < 0:
                discovery[neighbor] = low[neighbor] = timer
                timer += 1
                stack.append((neighbor, vertex, iter(graph.neighbors(neighbor))))
                break
            if neighbor != parent:
                low[vertex] = min(low[vertex], discovery[neighbor])
        else:
            stack.pop()
            if parent < 0:
                continue
            low[parent] = min(low[parent], low[vertex])
            if parent == 0:
                root_children += 1
            elif low[vertex] >= discovery[parent]:
                return False
    return timer == size and root_children <= 1


@dataclass(frozen=True)
class WhiteheadAutomorphism:
    """Type II Whitehead automorphism (S, a) with a in S and a^-1 not in S.

    For a generator x other than a^{+-1}: x -> x a when only x is in S,
    x -> a^-1 x when only x^-1 is, x -> a^-1 x a when both are; a is fixed.
    """
    rank: int
    multiplier: int
    subset: FrozenSet[int]

    def __post_init__(self):
        alphabet = Alphabet(self.rank)
        alphabet.validate_letter(self.multiplier)
        for letter in self.subset:
            alphabet.validate_letter(letter)
        if self.multiplier not in self.subset:
            raise ValueError("The multiplier must belong to S")
        if -self.multiplier in self.subset:
            raise ValueError("The inverse of the multiplier must not belong to S")

    def image(self, letter: int) -> Tuple[int, ...]:
        """Image of a single letter, unreduced."""
        a = self.multiplier
        generator = abs(letter)
        if generator == abs(a):
            return (letter,)
        x_in, inverse_in = generator in self.subset, -generator in self.subset
        if x_in and inverse_in:
            image = (-a, generator, a)
        elif x_in:
            image = (generator, a)
        elif inverse_in:
            image = (-a, generator)
        else:
            image = (generator,)
        if letter > 0:
            return image
        return tuple(-x for x in reversed(image))

    def apply(self, w: Word) -> Word:
        if w.rank != self.rank:
            raise ValueError(f"Alphabet mismatch: word rank {w.rank}, automorphism rank {self.rank}")
        return reduce([x for letter in w.letters for x in self.image(letter)], self.rank)

    def inverse(self) -> "WhiteheadAutomorphism":
        """(S - {a} + {a^-1}, a^-1)."""
        a = self.multiplier
        return WhiteheadAutomorphism(self.rank, -a, (self.subset - {a}) | {-a})

    @property
    def is_identity(self) -> bool:
        return self.subset == frozenset({self.multiplier})


def apply_whitehead(phi: WhiteheadAutomorphism, w: Word) -> Word:
    """phi(w), freely reduced."""
    return phi.apply(w)


@lru_cache(maxsize=None)
def whitehead_automorphisms(r: int) -> Tuple[WhiteheadAutomorphism, ...]:
    """Non-identity type II automorphisms: multipliers in letter order, subsets by binary counter."""
    letters = Alphabet(r).letters()
    result = []
    for a in letters:
        others = [x for x in letters if abs(x) != abs(a)]
        for mask in range(1, 1 << len(others)):
            chosen = {others[bit] for bit in range(len(others)) if mask >> bit & 1}
            result.append(WhiteheadAutomorphism(r, a, frozenset(chosen | {a})))
    return tuple(result)


def whitehead_minimize(w: Word) -> Tuple[Word, int]:
    """Greedy Whitehead reduction of the cyclic core.

    Returns:
        Tuple of (cyclically minimal core reached, automorphisms applied)
    """
    core = cyclic_core(w).core
    applied = 0
    automorphisms = whitehead_automorphisms(w.rank)
    improved = core.length > 1
    while improved:
        improved = False
        for phi in automorphisms:
            image = cyclic_core(phi.apply(core)).core
            if image.length < core.length:
                core = image
                applied += 1
                improved = core.length > 1
                break
    return core, applied


def is_primitive_whitehead(w: Word) -> bool:
    """True iff w belongs to a basis of F(A)."""
    core, _ = whitehead_minimize(w)
    return core.length == 1


def shpilrain_threshold(n: int, r: int) -> float:
    """g(n) = n - log(n^4 r^6) / log(2r - 1)."""
    if n < 1 or r < 2:
        raise ValueError(f"shpilrain_threshold needs n >= 1 and r >= 2, got n={n}, r={r}")
    return n - (4 * math.log(n) + 6 * math.log(r)) / math.log(2 * r - 1)


@dataclass(frozen=True)
class PrimitivityReport:
    """Verdict, route and counters of Algorithm S."""
    verdict: bool
    route: str
    core_length: int
    obstruction_step: Optional[int] = None
    edges_added: int = 0
    cutvertex_checks: int = 0
    automorphisms_applied: int = 0

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "route": self.route,
            "core_length": self.core_length,
            "obstruction_step": self.obstruction_step,
            "edges_added": self.edges_added,
            "cutvertex_checks": self.cutvertex_checks,
            "automorphisms_applied": self.automorphisms_applied,
        }


def is_primitive_shpilrain(u: Word) -> PrimitivityReport:
    """Algorithm S on u.

    Step 1 sends short cores (|core| <= g(|u|), |core| <= 2, or rank 1)
    straight to the Whitehead decider. Steps 2 and 3 insert the edges of
    W(core) one at a time and stop with a non-primitive verdict as soon as
    the graph is connected without a cut vertex. Step 4 is the Whitehead
    decider on the core.
    """
    if not u.length:
        return PrimitivityReport(verdict=False, route=SHORT_CORE, core_length=0)
    core = cyclic_core(u).core
    letters = core.letters
    short = (
        u.rank < 2
        or core.length <= 2
        or core.length <= shpilrain_threshold(u.length, u.rank)
    )
    edges_added = checks = 0
    if not short:
        graph = WhiteheadGraph(u.rank)
        last = len(letters) - 1
        for position in range(len(letters)):
            # the wrap-around pair comes last
            left = letters[position]
            right = letters[position + 1] if position < last else letters[0]
            if not graph.add_edge(left, -right):
                continue
            edges_added += 1
            checks += 1
            if connected_without_cutvertex(graph):
                step = 3 if position == last else 2
                return PrimitivityReport(
                    verdict=False,
                    route=OBSTRUCTION,
                    core_length=core.length,
                    obstruction_step=step,
                    edges_added=edges_added,
                    cutvertex_checks=checks,
                )
        logger.info("Algorithm S fell back to Whitehead reduction (|core|=%d)", core.length)
    minimal, applied = whitehead_minimize(core)
    return PrimitivityReport(
        verdict=minimal.length == 1,
        route=SHORT_CORE if short else WHITEHEAD_FALLBACK,
        core_length=core.length,
        edges_added=edges_added,
        cutvertex_checks=checks,
        automorphisms_applied=applied,
    )


@dataclass(frozen=True)
class RPrimReport:
    """Outcome of Algorithm RP_d: membership, then primitivity inside H."""
    member: bool
    expression: Optional[XWord]
    primitive: Optional[bool]
    membership_path: str
    primitivity_route: Optional[str] = None
    basis: Tuple[Word, ...] = ()

    def __post_init__(self):
        if (self.primitive is not None) != self.member:
            raise ValueError("The primitivity flag is defined exactly for members")


def relative_primitivity(
    w0: Word, generators: Sequence[Word], policy: Optional[DepthPolicy] = None
) -> RPrimReport:
    """Algorithm RP_d: is w0 in H = <generators>, and if so primitive in H?

    The expression x0 of w0 comes from MP_d (over the generators on the fast
    path, over the Stallings spanning basis otherwise) and Algorithm S runs
    on it in the free group of that basis.
    """
    membership = membership_mpd(w0, generators, policy)
    if not membership.member:
        return RPrimReport(
            member=False,
            expression=None,
            primitive=None,
            membership_path=membership.path,
            basis=membership.basis,
        )
    primitivity = is_primitive_shpilrain(membership.expression)
    return RPrimReport(
        member=True,
        expression=membership.expression,
        primitive=primitivity.verdict,
        membership_path=membership.path,
        primitivity_route=primitivity.route,
        basis=membership.basis,
    )
