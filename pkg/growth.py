"""Growth moduli of the automata A(G) built from simple graphs G on the letters.

A(G) has a y^-1-labeled edge x -> y^-1 and an x^-1-labeled edge
y -> x^-1 for every edge {x, y} of G. Its transition matrix counts the
words whose consecutive letter pairs G allows, and its dominant
eigenvalue is the growth modulus of that language.
"""

import logging
import math
from typing import Optional

import numpy as np
import pandas as pd

from free_words import Alphabet, letter_index
from primitivity import WhiteheadGraph

logger = logging.getLogger("freegroup.growth")

# Constants
POWER_ITERATION_TOLERANCE = 1e-10
MAX_POWER_ITERATIONS = 1_000_000
BISECTION_TOLERANCE = 1e-14
INT64_MAX = np.iinfo(np.int64).max

# Order-2r square matrix with entries in {0, 1}, rows and columns in letter order.
TransitionMatrix = np.ndarray


class ConvergenceError(RuntimeError):
    """Power iteration did not settle within the iteration cap."""


def automaton_matrix(graph: WhiteheadGraph) -> TransitionMatrix:
    """M(G): entry (idx(x), idx(y^-1)) and (idx(y), idx(x^-1)) set for each edge {x, y}."""
    size = graph.vertex_count
    matrix = np.zeros((size, size), dtype=np.int64)
    for x, y in graph.edges():
        matrix[letter_index(x), letter_index(-y)] = 1
        matrix[letter_index(y), letter_index(-x)] = 1
    return matrix


def complete_whitehead_graph(r: int) -> WhiteheadGraph:
    """Clique on the 2r letters; A(clique) accepts exactly the reduced words."""
    graph = WhiteheadGraph(r)
    letters = Alphabet(r).letters()
    for position, x in enumerate(letters):
        for y in letters[position + 1:]:
            graph.add_edge(x, y)
    return graph


def gaa_graph(r: int) -> WhiteheadGraph:
    """Clique minus the edge {a_1, a_1^-1}."""
    graph = complete_whitehead_graph(r)
    graph.remove_edge(1, -1)
    return graph


def gab_graph(r: int) -> WhiteheadGraph:
    """Clique minus the edge {a_1^-1, a_2^-1}.

    This is the labeling under which the matrix zeroes the entries
    (a_1^-1, a_2) and (a_2^-1, a_1); deleting {a_1, a_2} instead gives the
    transpose, with the same spectrum.
    """
    if r < 2:
        raise ValueError(f"G_ab needs two generators, got r={r}")
    graph = complete_whitehead_graph(r)
    graph.remove_edge(-1, -2)
    return graph


def dominant_eigenvalue(
    matrix: TransitionMatrix,
    tol: float = POWER_ITERATION_TOLERANCE,
    max_iterations: int = MAX_POWER_ITERATIONS,
) -> float:
    """Spectral radius of a nonnegative matrix by power iteration.

    Starts from the all-ones vector, renormalizes by the max norm, and
    stops when two successive Rayleigh quotients differ by at most ``tol``.
    A defective dominant eigenvalue only converges like 1/k, so its
    estimate is accurate to roughly sqrt(tol).

    Raises:
        ConvergenceError: If ``max_iterations`` is reached
    """
    matrix = np.asarray(matrix, dtype=float)
    if not matrix.any():
        return 0.0
    vector = np.ones(matrix.shape[0])
    previous = math.inf
    for iteration in range(1, max_iterations + 1):
        image = matrix @ vector
        scale = image.max()
        if scale == 0:
            return 0.0
        estimate = float(vector @ image) / float(vector @ vector)
        if abs(estimate - previous) <= tol:
            logger.debug("Power iteration converged after %d steps: %.12f", iteration, estimate)
            return estimate
        previous = estimate
        vector = image / scale
    raise ConvergenceError(
        f"Power iteration did not converge within {max_iterations} iterations "
        f"(last estimate {previous:.12f})"
    )


def gaa_modulus(r: int) -> float:
    """(2r - 3 + sqrt((2r + 1)^2 - 8)) / 2."""
    if r < 2:
        raise ValueError(f"gaa_modulus needs r >= 2, got {r}")
    return 0.5 * (2 * r - 3 + math.sqrt((2 * r + 1) ** 2 - 8))


def gab_modulus(r: int) -> float:
    """Largest root of X^3 - (2r-1) X^2 + 4(r-1), by bisection on [2(2r-1)/3, 2r-1]."""
    if r < 2:
        raise ValueError(f"gab_modulus needs r >= 2, got {r}")

    def cubic(x: float) -> float:
        return x ** 3 - (2 * r - 1) * x ** 2 + 4 * (r - 1)

    low, high = 2 * (2 * r - 1) / 3, float(2 * r - 1)
    # cubic(low) <= 0 < cubic(high); at r = 2 the root 2 is double and cubic(low) = 0.
    while high - low > BISECTION_TOLERANCE:
        middle = 0.5 * (low + high)
        if cubic(middle) <= 0:
            low = middle
        else:
            high = middle
    return 0.5 * (low + high)


def moduli_upper_bound(r: int) -> float:
    """(2r - 1)(1 - r^-2 / 2), above both gaa and gab."""
    return (2 * r - 1) * (1 - 0.5 / r ** 2)


def alpha_bound(r: int) -> float:
    """max(gaa, gab) / (2r - 1), the decay ratio of the cut-vertex probability."""
    return max(gaa_modulus(r), gab_modulus(r)) / (2 * r - 1)


def ctp_growth_bound(k: int, mu: int, d: int) -> float:
    """(2k - 1)^(1 / (mu - 2d)), the growth of a subgroup whose generators have the d-ctp."""
    if k < 1 or mu <= 2 * d:
        raise ValueError(f"ctp_growth_bound needs k >= 1 and mu > 2d, got k={k}, mu={mu}, d={d}")
    return float(2 * k - 1) ** (1.0 / (mu - 2 * d))


def count_paths(matrix: TransitionMatrix, n: int) -> int:
    """Number of length-n words accepted by the automaton: the sum of the entries of M^(n-1).

    Raises:
        OverflowError: If an intermediate count could exceed int64
    """
    if n < 0:
        raise ValueError(f"Length must be nonnegative, got {n}")
    if n == 0:
        return 1
    matrix = np.asarray(matrix, dtype=np.int64)
    counts = np.ones(matrix.shape[0], dtype=np.int64)
    widest_row = int(matrix.sum(axis=1).max()) if matrix.size else 0
    for step in range(n - 1):
        if int(counts.max()) * widest_row > INT64_MAX:
            raise OverflowError(f"Path counts overflow int64 at step {step + 1} of {n - 1}")
        counts = matrix @ counts
    return sum(int(count) for count in counts)


def growth_table(max_rank: int, tol: Optional[float] = None) -> pd.DataFrame:
    """Closed forms against power iteration for r = 2..max_rank."""
    if max_rank < 2:
        raise ValueError(f"max_rank must be at least 2, got {max_rank}")
    tol = POWER_ITERATION_TOLERANCE if tol is None else tol
    rows = []
    for r in range(2, max_rank + 1):
        rows.append({
            "r": r,
            "gaa_closed": gaa_modulus(r),
            "gaa_power": dominant_eigenvalue(automaton_matrix(gaa_graph(r)), tol),
            "gab_closed": gab_modulus(r),
            "gab_power": dominant_eigenvalue(automaton_matrix(gab_graph(r)), tol),
            "bound": moduli_upper_bound(r),
        })
    logger.info("Computed growth table for r = 2..%d", max_rank)
    return pd.DataFrame(rows)
