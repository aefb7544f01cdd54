"""Tests for Stallings graphs, spanning bases and Algorithm MP."""

import numpy as np
import pytest

from free_words import Alphabet, Word, equals, invert, product, sample_uniform_reduced
from stallings import (
    build_stallings,
    canonical_form,
    expand_in_basis,
    finite_index,
    membership_mp,
    mp_worst_case_bound,
    rank,
    run_mp,
    spanning_basis,
    to_dot,
)
from word_format import parse_word


def words(*texts, r=2):
    return [parse_word(text, r) for text in texts]


@pytest.fixture
def rng():
    return np.random.default_rng(99)


def random_tuple(rng, r=2, k=3, max_length=8):
    alphabet = Alphabet(r)
    return [sample_uniform_reduced(alphabet, int(rng.integers(1, max_length + 1)), rng) for _ in range(k)]


# --- Graph construction ---

class TestBuildStallings:
    """Test folding into the Stallings graph."""

    def test_free_basis_is_a_rose(self):
        """<a, b> is the whole group: one vertex, two loops."""
        g = build_stallings(words("a", "b"))
        assert (g.vertex_count, g.edge_count, rank(g), finite_index(g)) == (1, 2, 2, 1)

    def test_finite_index_subgroup(self):
        """<aa, b, abA> has index 2 and rank 3."""
        g = build_stallings(words("aa", "b", "abA"))
        assert (g.vertex_count, g.edge_count, rank(g), finite_index(g)) == (2, 4, 3, 2)

    def test_infinite_index_subgroup(self):
        """<aa, b> misses the b-edge at the second vertex."""
        g = build_stallings(words("aa", "b"))
        assert (g.vertex_count, g.edge_count, rank(g)) == (2, 3, 2)
        assert finite_index(g) is None

    def test_graph_is_folded(self):
        """No vertex has two edges with the same label."""
        g = build_stallings(words("abAB", "abbA", "bab"))
        for row in g.transitions:
            for letter, target in row.items():
                assert g.target(target, -letter) is not None

    def test_conjugate_generator_is_pruned(self):
        """<abA> folds to a b-loop reached through a hair at the root."""
        g = build_stallings(words("abA"))
        assert g.vertex_count == 2
        assert rank(g) == 1

    def test_generator_order_does_not_matter(self):
        """The canonical numbering is independent of generator order."""
        one = build_stallings(words("aba", "bab", "abAB"))
        two = build_stallings(words("abAB", "bab", "aba"))
        assert canonical_form(one) == canonical_form(two)

    def test_inverting_generators_gives_same_graph(self, rng):
        """<w1, w2, ...> does not change when some w_i are replaced by their inverses."""
        for _ in range(50):
            gens = random_tuple(rng)
            flipped = [invert(u) if rng.integers(0, 2) else u for u in gens]
            assert canonical_form(build_stallings(gens)) == canonical_form(build_stallings(flipped))

    def test_vertex_bound(self, rng):
        """Folding never produces more than sum |w_i| vertices."""
        for r in (2, 3):
            for _ in range(50):
                gens = random_tuple(rng, r=r, k=int(rng.integers(1, 5)))
                assert build_stallings(gens).vertex_count <= sum(u.length for u in gens)

    def test_trivial_subgroup(self):
        """Only empty generators leave the root alone."""
        g = build_stallings([Word.empty(2)], rank=2)
        assert (g.vertex_count, g.edge_count) == (1, 0)

    def test_rank_mismatch(self):
        """Generators over different alphabets are rejected."""
        with pytest.raises(ValueError, match="Alphabet mismatch"):
            build_stallings([Word((1,), 2), Word((1,), 3)])

    def test_no_generators_and_no_rank(self):
        """The alphabet cannot be inferred from nothing."""
        with pytest.raises(ValueError, match="Cannot infer"):
            build_stallings([])


# --- Spanning basis ---

class TestSpanningBasis:
    """Test the basis read off the spanning tree."""

    def test_basis_of_aa_b(self):
        """Non-tree edges in discovery order give (aa, b)."""
        sb = spanning_basis(build_stallings(words("aa", "b")))
        assert [u.letters for u in sb.basis] == [(1, 1), (2,)]
        assert sb.tree_edge_count == 1
        assert len(sb) == 2

    def test_basis_size_is_rank(self):
        """|basis| = |E| - |V| + 1."""
        g = build_stallings(words("abAB", "aab", "bbbA"))
        assert len(spanning_basis(g)) == rank(g)


# --- Algorithm MP ---

class TestMembershipMP:
    """Test membership by reading w0 in the graph."""

    def test_member_expression(self):
        """aab = x1 x2 in the basis (aa, b)."""
        expression = membership_mp(parse_word("aab", 2), words("aa", "b"))
        assert expression.letters == (1, 2)

    def test_non_member_ends_off_root(self):
        """a leaves the root and never returns."""
        result = run_mp(parse_word("a", 2), words("aa", "b"))
        assert not result.member
        assert result.letters_read == 1

    def test_non_member_falls_off_graph(self):
        """ab has no b-edge at the second vertex."""
        result = run_mp(parse_word("ab", 2), words("aa", "b"))
        assert result.expression is None
        assert result.letters_read == 2

    def test_empty_word_is_member(self):
        """The identity lies in every subgroup."""
        assert membership_mp(Word.empty(2), words("ab")).length == 0

    def test_expression_expands_back(self):
        """Expanding the expression in the basis gives w0."""
        rng = np.random.default_rng(7)
        alphabet = Alphabet(2)
        for _ in range(30):
            gens = [sample_uniform_reduced(alphabet, 4, rng) for _ in range(3)]
            x = [gens[0], gens[2], gens[1], gens[0]]
            w0 = product(x, 2)
            result = run_mp(w0, gens)
            assert result.member
            assert equals(expand_in_basis(result.expression, result.basis), w0)

    def test_expression_round_trip(self, rng):
        """Reading expand_in_basis(x) gives back exactly x."""
        for _ in range(50):
            gens = random_tuple(rng)
            basis = spanning_basis(build_stallings(gens)).basis
            if not basis:
                continue
            x = sample_uniform_reduced(Alphabet(len(basis)), int(rng.integers(0, 9)), rng)
            expression = membership_mp(expand_in_basis(x, basis), gens)
            assert expression is not None
            assert expression.letters == x.letters

    def test_word_rank_mismatch(self):
        """w0 must share the generators' alphabet."""
        with pytest.raises(ValueError, match="Alphabet mismatch"):
            membership_mp(Word((1,), 3), words("a"))


class TestHelpers:
    """Test basis expansion, bounds and DOT output."""

    def test_expand_out_of_range(self):
        """Indices beyond the basis are rejected."""
        with pytest.raises(ValueError, match="out of range"):
            expand_in_basis(Word((3,), 3), words("a", "b"))

    def test_expand_inverse_letters(self):
        """x1^-1 x2 expands to the inverse of the first generator then the second."""
        assert expand_in_basis(Word((-1, 2), 2), words("ab", "b")).letters == (-2, -1, 2)

    def test_mp_bound(self):
        """k.n.log*(k.n) + r.k.n + m."""
        assert mp_worst_case_bound(2, 8, 5, 2) == 16 * 3 + 32 + 5

    def test_dot_output(self):
        """DOT lists vertices from 1 and labels edges."""
        dot = to_dot(build_stallings(words("aa", "b")))
        assert dot.startswith("digraph stallings {")
        assert "1 [shape=doublecircle];" in dot
        assert '1 -> 2 [label="a"];' in dot
        assert '1 -> 1 [label="b"];' in dot


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
