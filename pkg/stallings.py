"""Stallings graphs of finitely generated subgroups of F(A).

Builds the folded graph of H = <w_1, ..., w_k> with a union-find over
vertices and a worklist of label clashes, extracts the spanning-tree
basis, and solves membership by reading w0 from the root while recording
the non-tree edges crossed (Algorithm MP).
"""

import logging
from collections import deque
from dataclasses import dataclass
from typing import Deque, Dict, Iterator, List, Optional, Sequence, Tuple

from free_words import Alphabet, Word, concat_reduce, invert, letter_index, log_star, product
from word_format import format_letter

logger = logging.getLogger("freegroup.stallings")

# (source, positive letter, target)
Edge = Tuple[int, int, int]


class XWord(Word):
    """Reduced word over a basis alphabet X = {x_1, ..., x_k}.

    Letter ``i`` stands for x_i and ``-i`` for x_i^-1; ``rank`` is the
    basis size k (1 for the trivial subgroup, whose only expression is
    the empty word).
    """


def letter_order(letters: Sequence[int]) -> List[int]:
    """Sort letters as a_1 < a_1^-1 < a_2 < a_2^-1 < ..."""
    return sorted(letters, key=letter_index)


@dataclass(frozen=True)
class StallingsGraph:
    """Rooted, folded A-labeled graph.

    ``transitions[p][a] = q`` for every a-labeled edge p -> q, together
    with ``transitions[q][-a] = p``. Vertices are numbered 0..V-1 in
    canonical breadth-first order from the root 0. Treat as read-only.
    """
    rank: int
    transitions: Tuple[Dict[int, int], ...]

    root = 0

    @property
    def vertex_count(self) -> int:
        return len(self.transitions)

    @property
    def edge_count(self) -> int:
        """Number of (positively oriented) edges."""
        return sum(1 for row in self.transitions for letter in row if letter > 0)

    def target(self, vertex: int, letter: int) -> Optional[int]:
        """End of the letter-labeled edge leaving ``vertex``, if any."""
        return self.transitions[vertex].get(letter)

    def degree(self, vertex: int) -> int:
        return len(self.transitions[vertex])

    def edges(self) -> Iterator[Edge]:
        """Positively labeled edges, by source vertex then letter."""
        for source, row in enumerate(self.transitions):
            for letter in sorted(row):
                if letter > 0:
                    yield source, letter, row[letter]


@dataclass(frozen=True)
class SpanningBasis:
    """Depth-first spanning tree of a Stallings graph and the basis it defines."""
    parent: Dict[int, Optional[Tuple[int, int]]]
    path_words: Dict[int, Word]
    non_tree_edges: Tuple[Edge, ...]
    basis: Tuple[Word, ...]
    # (vertex, signed letter) -> (basis index, +1 forward / -1 backward)
    crossings: Dict[Tuple[int, int], Tuple[int, int]]

    @property
    def tree_edge_count(self) -> int:
        return sum(1 for link in self.parent.values() if link is not None)

    def __len__(self) -> int:
        return len(self.basis)


@dataclass(frozen=True)
class MpResult:
    """Outcome of Algorithm MP with the basis it expressed w0 in."""
    expression: Optional[XWord]
    basis: Tuple[Word, ...]
    letters_read: int
    graph: StallingsGraph

    @property
    def member(self) -> bool:
        return self.expression is not None


class _UnionFind:
    """Union by size with path compression over integer vertices."""

    def __init__(self):
        self._parents: List[int] = []
        self._sizes: List[int] = []

    def add(self) -> int:
        self._parents.append(len(self._parents))
        self._sizes.append(1)
        return len(self._parents) - 1

    def find(self, vertex: int) -> int:
        root = vertex
        while self._parents[root] != root:
            root = self._parents[root]
        while self._parents[vertex] != root:
            self._parents[vertex], vertex = root, self._parents[vertex]
        return root

    def union(self, a: int, b: int) -> Tuple[int, int]:
        """Merge the classes of a and b; returns (kept root, absorbed root)."""
        root_a, root_b = self.find(a), self.find(b)
        if self._sizes[root_a] < self._sizes[root_b]:
            root_a, root_b = root_b, root_a
        self._parents[root_b] = root_a
        self._sizes[root_a] += self._sizes[root_b]
        return root_a, root_b


class _Folder:
    """Wedge of generator loops folded until deterministic."""

    def __init__(self, rank: int):
        self.rank = rank
        self.classes = _UnionFind()
        self.adjacency: List[Dict[int, int]] = []
        self.clashes: Deque[Tuple[int, int]] = deque()
        self.root = self._new_vertex()

    def _new_vertex(self) -> int:
        self.adjacency.append({})
        return self.classes.add()

    def _attach(self, source: int, letter: int, target: int) -> None:
        existing = self.adjacency[source].get(letter)
        if existing is None:
            self.adjacency[source][letter] = target
        else:
            self.clashes.append((existing, target))

    def add_edge(self, source: int, letter: int, target: int) -> None:
        source, target = self.classes.find(source), self.classes.find(target)
        self._attach(source, letter, target)
        self._attach(target, -letter, source)

    def add_loop(self, word: Word) -> None:
        """Add a circuit at the root labeled by ``word``."""
        current = self.root
        for position, letter in enumerate(word.letters):
            last = position == word.length - 1
            nxt = self.root if last else self._new_vertex()
            self.add_edge(current, letter, nxt)
            current = nxt

    def fold(self) -> int:
        """Identify clashing vertices until none remain; returns the merge count."""
        merges = 0
        while self.clashes:
            a, b = self.clashes.popleft()
            if self.classes.find(a) == self.classes.find(b):
                continue
            kept, absorbed = self.classes.union(a, b)
            moved, self.adjacency[absorbed] = self.adjacency[absorbed], {}
            for letter, target in moved.items():
                self._attach(kept, letter, target)
            merges += 1
        return merges

    def resolved(self) -> Dict[int, Dict[int, int]]:
        """Adjacency of the class representatives reachable from the root."""
        find = self.classes.find
        root = find(self.root)
        graph: Dict[int, Dict[int, int]] = {}
        queue = deque([root])
        while queue:
            vertex = queue.popleft()
            if vertex in graph:
                continue
            row = {letter: find(target) for letter, target in self.adjacency[vertex].items()}
            graph[vertex] = row
            queue.extend(target for target in row.values() if target not in graph)
        return graph


def _prune(graph: Dict[int, Dict[int, int]], root: int) -> int:
    """Remove degree-1 non-root vertices repeatedly; returns the count removed."""
    pending = deque(v for v, row in graph.items() if v != root and len(row) <= 1)
    removed = 0
    while pending:
        vertex = pending.popleft()
        if vertex not in graph or len(graph[vertex]) > 1:
            continue
        for letter, neighbor in graph.pop(vertex).items():
            graph[neighbor].pop(-letter, None)
            if neighbor != root and len(graph[neighbor]) <= 1:
                pending.append(neighbor)
        removed += 1
    return removed


def _canonical_numbering(graph: Dict[int, Dict[int, int]], root: int) -> Dict[int, int]:
    numbering = {root: 0}
    queue = deque([root])
    while queue:
        vertex = queue.popleft()
        for letter in letter_order(graph[vertex]):
            target = graph[vertex][letter]
            if target not in numbering:
                numbering[target] = len(numbering)
                queue.append(target)
    return numbering


def _common_rank(words: Sequence[Word], rank: Optional[int]) -> int:
    ranks = {w.rank for w in words}
    if rank is not None:
        ranks.add(rank)
    if not ranks:
        raise ValueError("Cannot infer the alphabet: no generators and no rank given")
    if len(ranks) > 1:
        raise ValueError(f"Alphabet mismatch among generators: ranks {sorted(ranks)}")
    return ranks.pop()


def build_stallings(generators: Sequence[Word], rank: Optional[int] = None) -> StallingsGraph:
    """Compute the Stallings graph of the subgroup generated by ``generators``.

    Args:
        generators: Reduced words; empty ones are dropped
        rank: Ambient rank, required only when every generator is empty

    Returns:
        StallingsGraph: Folded, pruned graph numbered in canonical BFS order

    Raises:
        ValueError: If the generators live over different alphabets
    """
    rank = _common_rank(generators, rank)
    folder = _Folder(rank)
    for word in generators:
        if word.length:
            folder.add_loop(word)
    merges = folder.fold()
    graph = folder.resolved()
    root = folder.classes.find(folder.root)
    pruned = _prune(graph, root)
    numbering = _canonical_numbering(graph, root)
    transitions: List[Dict[int, int]] = [{} for _ in numbering]
    for vertex, number in numbering.items():
        transitions[number] = {
            letter: numbering[target]
            for letter, target in sorted(graph[vertex].items(), key=lambda item: letter_index(item[0]))
        }
    result = StallingsGraph(rank=rank, transitions=tuple(transitions))
    logger.debug(
        "Folded %d generators: %d merges, %d pruned, V=%d E=%d",
        len(generators), merges, pruned, result.vertex_count, result.edge_count,
    )
    return result


def canonical_form(g: StallingsGraph) -> Tuple[Tuple[Tuple[int, int], ...], ...]:
    """Hashable form; equal for isomorphic rooted graphs."""
    return tuple(
        tuple((letter, row[letter]) for letter in letter_order(row))
        for row in g.transitions
    )


def _edge_key(source: int, letter: int, target: int) -> Edge:
    return (source, letter, target) if letter > 0 else (target, -letter, source)


def spanning_basis(g: StallingsGraph) -> SpanningBasis:
    """Depth-first spanning tree from the root and the basis b(e) of its non-tree edges.

    Letters are scanned in the order a_1 < a_1^-1 < a_2 < ...; non-tree edges
    are numbered in the order the search first meets them.
    """
    order = Alphabet(g.rank).letters()
    parent: Dict[int, Optional[Tuple[int, int]]] = {g.root: None}
    paths: Dict[int, Tuple[int, ...]] = {g.root: ()}
    seen = set()
    non_tree: List[Edge] = []
    stack = [(g.root, iter(order))]
    while stack:
        vertex, letters = stack[-1]
        descended = False
        for letter in letters:
            target = g.target(vertex, letter)
            if target is None:
                continue
            key = _edge_key(vertex, letter, target)
            if key in seen:
                continue
            seen.add(key)
            if target in parent:
                non_tree.append(key)
                continue
            parent[target] = (vertex, letter)
            paths[target] = paths[vertex] + (letter,)
            stack.append((target, iter(order)))
            descended = True
            break
        if not descended:
            stack.pop()

    path_words = {v: Word._trusted(p, g.rank) for v, p in paths.items()}
    basis = []
    crossings: Dict[Tuple[int, int], Tuple[int, int]] = {}
    for index, (source, letter, target) in enumerate(non_tree):
        edge_word = Word._trusted((letter,), g.rank)
        basis.append(
            concat_reduce(concat_reduce(path_words[source], edge_word), invert(path_words[target]))
        )
        crossings[(source, letter)] = (index, 1)
        crossings[(target, -letter)] = (index, -1)
    return SpanningBasis(
        parent=parent,
        path_words=path_words,
        non_tree_edges=tuple(non_tree),
        basis=tuple(basis),
        crossings=crossings,
    )


def rank(g: StallingsGraph) -> int:
    """Rank of H: |E| - |V| + 1."""
    return g.edge_count - g.vertex_count + 1


def finite_index(g: StallingsGraph) -> Optional[int]:
    """Index of H when every vertex has an edge for every letter, else None."""
    if g.edge_count == g.vertex_count * g.rank:
        return g.vertex_count
    return None


def _basis_rank(basis: Sequence[Word]) -> int:
    return max(1, len(basis))


def read_in_basis(w0: Word, g: StallingsGraph, sb: SpanningBasis) -> Tuple[Optional[XWord], int]:
    """Read w0 from the root and collect the non-tree edges crossed.

    Returns:
        Tuple of (expression of w0 in ``sb.basis`` or None, letters read)
    """
    if w0.rank != g.rank:
        raise ValueError(f"Alphabet mismatch: word rank {w0.rank}, graph rank {g.rank}")
    vertex = g.root
    expression: List[int] = []
    for position, letter in enumerate(w0.letters):
        target = g.target(vertex, letter)
        if target is None:
            return None, position + 1
        crossing = sb.crossings.get((vertex, letter))
        if crossing is not None:
            index, sign = crossing
            expression.append(sign * (index + 1))
        vertex = target
    if vertex != g.root:
        return None, w0.length
    return XWord(tuple(expression), _basis_rank(sb.basis)), w0.length


def run_mp(w0: Word, generators: Sequence[Word]) -> MpResult:
    """Algorithm MP: fold, pick the spanning basis, read w0."""
    g = build_stallings(generators, rank=w0.rank)
    sb = spanning_basis(g)
    expression, letters_read = read_in_basis(w0, g, sb)
    return MpResult(expression=expression, basis=sb.basis, letters_read=letters_read, graph=g)


def membership_mp(w0: Word, generators: Sequence[Word]) -> Optional[XWord]:
    """Expression of w0 in the spanning basis of <generators>, or None if w0 is not in it."""
    return run_mp(w0, generators).expression


def expand_in_basis(x: Word, basis: Sequence[Word]) -> Word:
    """Image of x under x_i -> basis[i-1], freely reduced.

    Raises:
        ValueError: If an index of x exceeds the basis size
    """
    for letter in x.letters:
        if abs(letter) > len(basis):
            raise ValueError(
                f"Basis index {abs(letter)} out of range for a basis of size {len(basis)}"
            )
    if not basis:
        return Word.empty(1)
    rank_ = _common_rank(basis, None)
    factors = [basis[letter - 1] if letter > 0 else invert(basis[-letter - 1]) for letter in x.letters]
    return product(factors, rank_)


def mp_worst_case_bound(k: int, n: int, m: int, r: int) -> float:
    """Reference cost k.n.log*(k.n) + r.k.n + m of Algorithm MP."""
    return float(k * n * log_star(k * n) + r * k * n + m)


def to_dot(g: StallingsGraph, name: str = "stallings") -> str:
    """Graphviz rendering: vertices 1..V in canonical order, root double-circled."""
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for vertex in range(g.vertex_count):
        shape = "doublecircle" if vertex == g.root else "circle"
        lines.append(f'  {vertex + 1} [shape={shape}];')
    for source, letter, target in g.edges():
        lines.append(f'  {source + 1} -> {target + 1} [label="{format_letter(letter, g.rank)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
