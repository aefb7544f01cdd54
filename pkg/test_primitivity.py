"""Tests for Whitehead graphs, Whitehead automorphisms and Algorithm S."""

import time

import numpy as np
import pytest

from free_words import Alphabet, Word, cyclic_core, enumerate_reduced, invert, product, sample_uniform_reduced
from primitivity import (
    OBSTRUCTION,
    SHORT_CORE,
    WHITEHEAD_FALLBACK,
    RPrimReport,
    WhiteheadAutomorphism,
    WhiteheadGraph,
    apply_whitehead,
    connected_without_cutvertex,
    is_primitive_shpilrain,
    is_primitive_whitehead,
    relative_primitivity,
    shpilrain_threshold,
    whitehead_automorphisms,
    whitehead_graph,
    whitehead_minimize,
)
from ctp import FALLBACK, DepthPolicy
from stallings import expand_in_basis
from word_format import parse_word

CONST_ONE = DepthPolicy("const", 1)


@pytest.fixture
def rng():
    return np.random.default_rng(31)


def w(text, r=2):
    return parse_word(text, r)


def graph_from(rank, pairs):
    graph = WhiteheadGraph(rank)
    for x, y in pairs:
        graph.add_edge(x, y)
    return graph


# --- Whitehead graphs ---

class TestWhiteheadGraph:
    """Test graph construction and the cut-vertex check."""

    def test_open_graph(self):
        """W'(ab) has the single edge {a, B}."""
        graph = whitehead_graph(w("ab"), cyclic=False)
        assert list(graph.edges()) == [(1, -2)]

    def test_cyclic_graph(self):
        """W(ab) adds the wrap-around edge {b, A}."""
        graph = whitehead_graph(w("ab"), cyclic=True)
        assert graph.edge_count == 2
        assert graph.has_edge(2, -1)
        assert whitehead_graph(w("ab"), cyclic=False).is_subgraph_of(graph)

    def test_commutator_is_a_cycle(self):
        """W(abAB) is the 4-cycle a-b-A-B."""
        graph = whitehead_graph(w("abAB"), cyclic=True)
        assert graph == graph_from(2, [(1, 2), (2, -1), (-1, -2), (-2, 1)])

    def test_short_word_rejected(self):
        """Single letters have no graph."""
        with pytest.raises(ValueError, match=r"\|u\| >= 2"):
            whitehead_graph(w("a"), cyclic=False)

    def test_not_cyclically_reduced(self):
        """W(u) needs a cyclically reduced word."""
        with pytest.raises(ValueError, match="cyclically reduced"):
            whitehead_graph(w("abA"), cyclic=True)

    def test_loops_rejected(self):
        """Edges join distinct letters."""
        with pytest.raises(ValueError, match="no loops"):
            WhiteheadGraph(2).add_edge(1, 1)

    def test_duplicate_and_remove(self):
        """Adding twice is a no-op; removal restores the count."""
        graph = WhiteheadGraph(2)
        assert graph.add_edge(1, 2)
        assert not graph.add_edge(2, 1)
        assert graph.remove_edge(1, 2)
        assert not graph.remove_edge(1, 2)
        assert graph.edge_count == 0

    def test_cycle_has_no_cutvertex(self):
        """A 4-cycle is 2-connected."""
        assert connected_without_cutvertex(graph_from(2, [(1, 2), (2, -1), (-1, -2), (-2, 1)]))

    def test_path_has_cutvertex(self):
        """Inner vertices of a path are articulation points."""
        assert not connected_without_cutvertex(graph_from(2, [(1, 2), (2, -1), (-1, -2)]))

    def test_disconnected(self):
        """An isolated vertex fails connectivity."""
        assert not connected_without_cutvertex(graph_from(2, [(1, 2), (2, -1), (-1, 1)]))

    def test_complete_graph(self):
        """K_6 on the rank-3 letters is 2-connected."""
        letters = (1, -1, 2, -2, 3, -3)
        pairs = [(x, y) for i, x in enumerate(letters) for y in letters[i + 1:]]
        assert connected_without_cutvertex(graph_from(3, pairs))

    def test_open_graph_inside_cyclic_graph(self, rng):
        """W'(u) is a subgraph of W(u) for random cyclically reduced u."""
        for r in (2, 3):
            alphabet = Alphabet(r)
            for _ in range(100):
                core = cyclic_core(sample_uniform_reduced(alphabet, int(rng.integers(2, 30)), rng)).core
                if core.length < 2:
                    continue
                assert whitehead_graph(core, cyclic=False).is_subgraph_of(whitehead_graph(core, cyclic=True))


# --- Whitehead automorphisms ---

class TestWhiteheadAutomorphism:
    """Test automorphism images, inverses and enumeration."""

    def test_right_multiplication(self):
        """({a, b}, a): b -> ba."""
        phi = WhiteheadAutomorphism(2, 1, frozenset({1, 2}))
        assert apply_whitehead(phi, w("ba")) == w("baa")
        assert apply_whitehead(phi, w("bA")) == w("b")

    def test_conjugation(self):
        """({a, b, B}, a): b -> Aba."""
        phi = WhiteheadAutomorphism(2, 1, frozenset({1, 2, -2}))
        assert apply_whitehead(phi, w("b")) == w("Aba")

    def test_inverse_round_trip(self):
        """phi^-1(phi(u)) = u for every automorphism of rank 2."""
        u = w("abAAbbaB")
        for phi in whitehead_automorphisms(2):
            assert phi.inverse().apply(phi.apply(u)) == u

    def test_invalid_subset(self):
        """a must be in S and a^-1 must not."""
        with pytest.raises(ValueError, match="must belong"):
            WhiteheadAutomorphism(2, 1, frozenset({2}))
        with pytest.raises(ValueError, match="must not belong"):
            WhiteheadAutomorphism(2, 1, frozenset({1, -1}))

    def test_enumeration_size(self):
        """2r multipliers times 2^(2r-2) - 1 nonempty subsets."""
        assert len(whitehead_automorphisms(2)) == 4 * 3
        assert len(whitehead_automorphisms(3)) == 6 * 15
        assert not any(phi.is_identity for phi in whitehead_automorphisms(3))

    def test_rank_mismatch(self):
        """Words and automorphisms share the alphabet."""
        phi = WhiteheadAutomorphism(2, 1, frozenset({1, 2}))
        with pytest.raises(ValueError, match="Alphabet mismatch"):
            phi.apply(Word((1,), 3))

    def test_preserves_primitivity(self, rng):
        """Automorphisms map primitive words to primitive words and the rest to the rest."""
        automorphisms = whitehead_automorphisms(2)
        alphabet = Alphabet(2)
        for _ in range(60):
            u = sample_uniform_reduced(alphabet, int(rng.integers(1, 9)), rng)
            phi = automorphisms[int(rng.integers(0, len(automorphisms)))]
            assert is_primitive_whitehead(apply_whitehead(phi, u)) == is_primitive_whitehead(u), u


# --- Whitehead decider ---

class TestWhiteheadDecider:
    """Test primitivity by greedy Whitehead reduction."""

    @pytest.mark.parametrize("text,expected", [
        ("a", True),
        ("ab", True),
        ("aab", True),
        ("abb", True),
        ("aba", True),
        ("aa", False),
        ("abAB", False),
        ("abab", False),
        ("aabb", False),
    ])
    def test_known_words(self, text, expected):
        """Classic primitive and non-primitive words."""
        assert is_primitive_whitehead(w(text)) is expected

    def test_identity_is_not_primitive(self):
        """The empty word belongs to no basis."""
        assert not is_primitive_whitehead(Word.empty(2))

    def test_minimize_reaches_generator(self):
        """A primitive word minimizes to a single letter."""
        core, applied = whitehead_minimize(w("aba"))
        assert core.length == 1
        assert applied >= 1


# --- Algorithm S ---

class TestShpilrain:
    """Test Algorithm S routes and verdicts."""

    def test_threshold(self):
        """g(n) = n - log(n^4 r^6) / log(2r - 1)."""
        assert shpilrain_threshold(100, 2) == pytest.approx(79.4472, abs=1e-3)
        assert shpilrain_threshold(10 ** 6, 2) == pytest.approx(999945.913, abs=1e-2)

    def test_threshold_invalid(self):
        """Rank 1 has no threshold."""
        with pytest.raises(ValueError, match="r >= 2"):
            shpilrain_threshold(10, 1)

    def test_commutator_obstruction(self):
        """abAB closes its 4-cycle with the wrap edge."""
        report = is_primitive_shpilrain(w("abAB"))
        assert report.verdict is False
        assert report.route == OBSTRUCTION
        assert report.obstruction_step == 3
        assert report.edges_added == 4
        assert report.cutvertex_checks == 4

    def test_single_letter(self):
        """A letter is primitive on the short-core route."""
        report = is_primitive_shpilrain(w("a"))
        assert report.verdict is True
        assert report.route == SHORT_CORE

    def test_fallback(self):
        """abab never becomes 2-connected, so Whitehead decides."""
        report = is_primitive_shpilrain(w("abab"))
        assert report.verdict is False
        assert report.route == WHITEHEAD_FALLBACK
        assert report.edges_added == 2

    def test_conjugate_uses_core(self):
        """Conjugating does not change the verdict."""
        report = is_primitive_shpilrain(w("baB"))
        assert report.verdict is True
        assert report.core_length == 1

    def test_empty_word(self):
        """The identity is not primitive."""
        report = is_primitive_shpilrain(Word.empty(2))
        assert report.verdict is False
        assert report.core_length == 0

    def test_rank_one(self):
        """In F(a) only a and A are primitive."""
        assert is_primitive_shpilrain(Word((1,), 1)).verdict
        assert not is_primitive_shpilrain(Word((1, 1), 1)).verdict

    def test_report_dict(self):
        """Reports serialize their counters."""
        data = is_primitive_shpilrain(w("abAB")).to_dict()
        assert data["route"] == OBSTRUCTION
        assert data["obstruction_step"] == 3

    @pytest.mark.parametrize("r,max_length", [(2, 8), (3, 5)])
    def test_agrees_with_whitehead(self, r, max_length):
        """Algorithm S and the Whitehead decider agree on every short word."""
        for n in range(1, max_length + 1):
            for u in enumerate_reduced(r, n):
                assert is_primitive_shpilrain(u).verdict == is_primitive_whitehead(u), u

    def test_conjugation_invariance(self, rng):
        """u and g u g^-1 get the same verdict."""
        for r in (2, 3):
            alphabet = Alphabet(r)
            for _ in range(80):
                u = sample_uniform_reduced(alphabet, int(rng.integers(1, 12)), rng)
                g = sample_uniform_reduced(alphabet, int(rng.integers(1, 6)), rng)
                conjugate = product([g, u, invert(g)], r)
                assert is_primitive_shpilrain(conjugate).verdict == is_primitive_shpilrain(u).verdict, (u, g)

    @pytest.mark.slow
    def test_long_commutator_power_is_cheap(self):
        """An early obstruction on a word of length 10^6 costs no pass over all its pairs."""
        u = Word((1, 2, -1, -2) * 250_000, 2)
        report = is_primitive_shpilrain(u)
        assert report.route == OBSTRUCTION
        assert report.obstruction_step == 2
        assert report.edges_added == 4
        start = time.perf_counter()
        for _ in range(20):
            is_primitive_shpilrain(u)
        assert time.perf_counter() - start < 1.5

    @pytest.mark.slow
    def test_agrees_with_whitehead_length_ten(self):
        """Exhaustive agreement up to length 10 in rank 2."""
        for n in (9, 10):
            for u in enumerate_reduced(2, n):
                assert is_primitive_shpilrain(u).verdict == is_primitive_whitehead(u), u


# --- Relative primitivity ---

class TestRelativePrimitivity:
    """Test Algorithm RP_d."""

    def test_generator_is_primitive_in_h(self):
        """aba = x1 is primitive in <aba, bab>."""
        report = relative_primitivity(w("aba"), [w("aba"), w("bab")], CONST_ONE)
        assert report.member
        assert report.primitive is True
        assert report.expression.letters == (1,)

    def test_product_is_primitive_in_h(self):
        """x1 x2 is primitive in F(x1, x2)."""
        report = relative_primitivity(w("ababab"), [w("aba"), w("bab")], CONST_ONE)
        assert report.primitive is True

    def test_square_is_not_primitive_in_h(self):
        """(aba)^2 = x1^2."""
        report = relative_primitivity(w("abaaba"), [w("aba"), w("bab")], CONST_ONE)
        assert report.member
        assert report.expression.letters == (1, 1)
        assert report.primitive is False

    def test_non_member(self):
        """Non-members carry no primitivity verdict."""
        report = relative_primitivity(w("ab"), [w("aba"), w("bab")], CONST_ONE)
        assert not report.member
        assert report.primitive is None
        assert report.primitivity_route is None

    @pytest.mark.parametrize("text,expected", [("aab", True), ("abAB", False)])
    def test_fallback_path(self, text, expected):
        """Short generators: x0 is read over the spanning basis and Whitehead agrees."""
        report = relative_primitivity(w(text), [w("a"), w("b")])
        assert report.member
        assert report.membership_path == FALLBACK
        assert report.basis == (w("a"), w("b"))
        assert expand_in_basis(report.expression, report.basis) == w(text)
        assert report.primitive is is_primitive_whitehead(report.expression)
        assert report.primitive is expected

    def test_fallback_path_random(self, rng):
        """On random fallback instances the verdict is the Whitehead verdict on x0."""
        alphabet = Alphabet(2)
        for _ in range(40):
            # a length-1 generator forces the fallback
            gens = [sample_uniform_reduced(alphabet, 1, rng), sample_uniform_reduced(alphabet, int(rng.integers(2, 5)), rng)]
            picks = rng.integers(0, 2, size=4)
            w0 = product([gens[i] if rng.integers(0, 2) else invert(gens[i]) for i in picks], 2)
            report = relative_primitivity(w0, gens)
            assert report.member
            assert report.membership_path == FALLBACK
            assert expand_in_basis(report.expression, report.basis) == w0
            assert report.primitive == is_primitive_whitehead(report.expression)

    def test_flag_only_for_members(self):
        """A member needs a primitivity verdict."""
        with pytest.raises(ValueError, match="exactly for members"):
            RPrimReport(member=True, expression=None, primitive=None, membership_path="fast")


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
