"""Free group words: alphabet, free reduction, cyclic core and sampling.

Letters are nonzero signed integers: ``i`` stands for the generator a_i and
``-i`` for its inverse, so inversion is a sign flip. Words are immutable
and carry their length, which lets the prefix tests reject on length
without reading any letter.
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np


@dataclass(frozen=True)
class Alphabet:
    """Symmetrized alphabet of a free group of rank ``rank``."""
    rank: int

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError(f"Rank must be a positive integer, got {self.rank}")

    @property
    def size(self) -> int:
        """Number of letters 2r in the symmetrized alphabet."""
        return 2 * self.rank

    def letters(self) -> Tuple[int, ...]:
        """Letters in the fixed order a_1 < a_1^-1 < a_2 < a_2^-1 < ..."""
        return tuple(x for i in range(1, self.rank + 1) for x in (i, -i))

    def validate_letter(self, letter: int) -> None:
        """Raise ValueError if ``letter`` does not belong to the alphabet."""
        if letter == 0 or abs(letter) > self.rank:
            raise ValueError(
                f"Letter {letter} out of range for rank {self.rank}"
            )


def letter_index(letter: int) -> int:
    """Position of a letter in the order a_1, a_1^-1, a_2, a_2^-1, ..."""
    return 2 * (abs(letter) - 1) + (1 if letter < 0 else 0)


def letter_at(index: int) -> int:
    """Inverse of :func:`letter_index`."""
    generator = index // 2 + 1
    return -generator if index % 2 else generator


def inverse_letter(letter: int) -> int:
    """Inverse of a letter."""
    return -letter


@dataclass(frozen=True)
class Word:
    """Freely reduced word over the alphabet of rank ``rank``.

    Construction validates letters and reducedness; use :func:`reduce`
    to build a word from an arbitrary letter sequence.
    """
    letters: Tuple[int, ...]
    rank: int
    length: int = field(init=False)

    def __post_init__(self):
        letters = tuple(self.letters)
        object.__setattr__(self, "letters", letters)
        object.__setattr__(self, "length", len(letters))
        alphabet = Alphabet(self.rank)
        for letter in letters:
            alphabet.validate_letter(letter)
        for position, (left, right) in enumerate(zip(letters, letters[1:])):
            if right == -left:
                raise ValueError(
                    f"Word is not freely reduced at position {position}: "
                    f"{left} followed by {right}"
                )

    @classmethod
    def _trusted(cls, letters: Tuple[int, ...], rank: int) -> "Word":
        # Skips validation: letters are known to be reduced and in range.
        word = object.__new__(cls)
        object.__setattr__(word, "letters", letters)
        object.__setattr__(word, "rank", rank)
        object.__setattr__(word, "length", len(letters))
        return word

    @classmethod
    def empty(cls, rank: int) -> "Word":
        """The identity element."""
        Alphabet(rank)
        return cls._trusted((), rank)

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.rank)

    def __len__(self) -> int:
        return self.length

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __getitem__(self, index):
        return self.letters[index]

    def __bool__(self) -> bool:
        return self.length > 0


@dataclass(frozen=True)
class CoreDecomposition:
    """Factorization u = v . core . v^-1 with a cyclically reduced core."""
    conjugator: Word
    core: Word

    @property
    def peel_steps(self) -> int:
        """Number of iterations of the peeling step that removed letters."""
        return self.conjugator.length


@dataclass(frozen=True)
class PrefixProbe:
    """Outcome of an instrumented prefix or equality test."""
    result: bool
    comparisons: int


def _check_same_rank(u: Word, v: Word) -> None:
    if u.rank != v.rank:
        raise ValueError(
            f"Alphabet mismatch: rank {u.rank} and rank {v.rank}"
        )


def reduce(seq: Sequence[int], rank: int) -> Word:
    """Freely reduce a letter sequence.

    Args:
        seq: Signed letters, possibly with adjacent inverse pairs
        rank: Rank of the ambient free group

    Returns:
        Word: The unique reduced word equal to ``seq`` in F(A)

    Raises:
        ValueError: If a letter is out of range for the alphabet
    """
    alphabet = Alphabet(rank)
    stack: List[int] = []
    for letter in seq:
        alphabet.validate_letter(letter)
        if stack and stack[-1] == -letter:
            stack.pop()
        else:
            stack.append(letter)
    return Word._trusted(tuple(stack), rank)


def invert(w: Word) -> Word:
    """Return w^-1: the reversed sequence of inverted letters."""
    return Word._trusted(tuple(-letter for letter in reversed(w.letters)), w.rank)


def concat_reduce(u: Word, v: Word) -> Word:
    """Group product of two reduced words.

    Only the seam needs cancelling since both factors are reduced.

    Raises:
        ValueError: If the words live over different alphabets
    """
    _check_same_rank(u, v)
    left, right = u.letters, v.letters
    cancel = 0
    limit = min(len(left), len(right))
    while cancel < limit and left[len(left) - 1 - cancel] == -right[cancel]:
        cancel += 1
    return Word._trusted(left[:len(left) - cancel] + right[cancel:], u.rank)


def is_cyclically_reduced(w: Word) -> bool:
    """True when w.w is reduced, i.e. the last letter is not the first inverted."""
    return w.length < 2 or w.letters[-1] != -w.letters[0]


def cyclic_core(u: Word) -> CoreDecomposition:
    """Compute the cyclic core by repeatedly peeling first and last letters.

    Two cursors walk inwards while the last letter is the inverse of the
    first, so only the final slices are copied.
    """
    letters = u.letters
    first, last = 0, u.length - 1
    while last - first + 1 >= 3 and letters[last] == -letters[first]:
        first += 1
        last -= 1
    conjugator = Word._trusted(letters[:first], u.rank)
    core = Word._trusted(letters[first:last + 1], u.rank)
    return CoreDecomposition(conjugator=conjugator, core=core)


def count_reduced(r: int, n: int, limit: Optional[int] = None) -> int:
    """Number of reduced words of length n: 2r(2r-1)^(n-1), and 1 for n = 0.

    Args:
        r: Rank
        n: Length
        limit: Largest admissible value; exceeding it is reported

    Raises:
        OverflowError: If the count exceeds ``limit``
    """
    if r < 1 or n < 0:
        raise ValueError(f"Invalid rank/length: r={r}, n={n}")
    count = 1 if n == 0 else 2 * r * (2 * r - 1) ** (n - 1)
    if limit is not None and count > limit:
        raise OverflowError(
            f"count_reduced({r}, {n}) = {count} exceeds the limit {limit}"
        )
    return count


def cyclically_reduced_bounds(r: int, n: int) -> Tuple[int, int]:
    """Lower and upper bounds on the number of cyclically reduced words of length n >= 2."""
    if n < 2:
        raise ValueError(f"Bounds need n >= 2, got {n}")
    lower = 2 * r * (2 * r - 1) ** (n - 2) * (2 * r - 2)
    return lower, count_reduced(r, n)


def enumerate_reduced(r: int, n: int) -> Iterator[Word]:
    """Yield every reduced word of length n in lexicographic letter order."""
    letters = Alphabet(r).letters()
    if n == 0:
        yield Word.empty(r)
        return

    def extend(prefix: List[int]) -> Iterator[Word]:
        if len(prefix) == n:
            yield Word._trusted(tuple(prefix), r)
            return
        for letter in letters:
            if prefix and letter == -prefix[-1]:
                continue
            prefix.append(letter)
            yield from extend(prefix)
            prefix.pop()

    yield from extend([])


def _codes_to_letters(codes: np.ndarray, r: int) -> np.ndarray:
    # Code c in [0, 2r): c < r is a_(c+1), otherwise a_(c-r+1)^-1.
    return np.where(codes < r, codes + 1, -(codes - r + 1))


def _letter_to_code(letter: int, r: int) -> int:
    return letter - 1 if letter > 0 else r - letter - 1


def sample_uniform_reduced_batch(
    alphabet: Alphabet,
    n: int,
    count: int,
    rng: np.random.Generator,
    after: Optional[int] = None,
) -> np.ndarray:
    """Sample ``count`` independent uniform reduced words of length n.

    The first letter is uniform over the 2r letters; every later letter is
    uniform over the 2r-1 letters other than the inverse of its
    predecessor. With codes where inv(c) = (c + r) mod 2r, picking the j-th
    admissible successor is c' = (c + r + 1 + j) mod 2r, so a row is a
    cumulative sum.

    Args:
        alphabet: Alphabet to sample from
        n: Word length
        count: Number of words
        rng: Random source
        after: Letter the sample continues; its inverse is excluded as first letter

    Returns:
        np.ndarray: ``count x n`` int64 array of signed letters
    """
    if n < 0 or count < 0:
        raise ValueError(f"Invalid sample shape: n={n}, count={count}")
    r = alphabet.rank
    size = alphabet.size
    if n == 0:
        return np.zeros((count, 0), dtype=np.int64)
    if after is None:
        first = rng.integers(0, size, size=(count, 1), dtype=np.int64)
    else:
        alphabet.validate_letter(after)
        start = _letter_to_code(after, r) + r + 1
        first = rng.integers(0, size - 1, size=(count, 1), dtype=np.int64) + start
    steps = rng.integers(0, size - 1, size=(count, n - 1), dtype=np.int64) + r + 1
    codes = np.concatenate([first, steps], axis=1).cumsum(axis=1) % size
    return _codes_to_letters(codes, r)


def sample_uniform_reduced(alphabet: Alphabet, n: int, rng: np.random.Generator) -> Word:
    """Sample a reduced word of length n uniformly among the count_reduced(r, n) words."""
    row = sample_uniform_reduced_batch(alphabet, n, 1, rng)[0]
    return Word._trusted(tuple(row.tolist()), alphabet.rank)


def sample_length_at_most(
    alphabet: Alphabet, n: int, rng: np.random.Generator, minimum: int = 0
) -> Word:
    """Sample uniformly among all reduced words with minimum <= length <= n."""
    if not 0 <= minimum <= n:
        raise ValueError(f"Invalid length range [{minimum}, {n}]")
    base = 2 * alphabet.rank - 1
    lengths = np.arange(minimum, n + 1)
    # count_reduced(r, l) / count_reduced(r, n), kept in floating range for large n
    weights = np.where(
        lengths == 0,
        float(base) ** (-n) * (base / alphabet.size),
        np.power(float(base), (lengths - n).astype(float)),
    )
    length = int(rng.choice(lengths, p=weights / weights.sum()))
    return sample_uniform_reduced(alphabet, length, rng)


def probe_proper_prefix(u: Sequence[int], v: Sequence[int], start: int = 0) -> PrefixProbe:
    """Instrumented proper-prefix test of u against v[start:].

    Reads both words left to right and stops at the first mismatch, at the
    end of u, or at the end of v.
    """
    comparisons = 0
    available = len(v) - start
    for position in range(min(len(u), available)):
        comparisons += 1
        if u[position] != v[start + position]:
            return PrefixProbe(result=False, comparisons=comparisons)
    return PrefixProbe(result=len(u) < available, comparisons=comparisons)


def probe_prefix(u: Sequence[int], v: Sequence[int], start: int = 0) -> PrefixProbe:
    """Instrumented prefix test (u may equal v[start:])."""
    comparisons = 0
    available = len(v) - start
    for position in range(min(len(u), available)):
        comparisons += 1
        if u[position] != v[start + position]:
            return PrefixProbe(result=False, comparisons=comparisons)
    return PrefixProbe(result=len(u) <= available, comparisons=comparisons)


def probe_equals(u: Sequence[int], v: Sequence[int], start: int = 0) -> PrefixProbe:
    """Instrumented equality test of u and v[start:]; lengths are compared first."""
    if len(u) != len(v) - start:
        return PrefixProbe(result=False, comparisons=0)
    return probe_prefix(u, v, start)


def is_proper_prefix(u: Word, v: Word) -> bool:
    """True iff v = u.u' with u' nonempty."""
    return probe_proper_prefix(u.letters, v.letters).result


def is_prefix(u: Word, v: Word) -> bool:
    """True iff u is a (possibly equal) prefix of v."""
    return probe_prefix(u.letters, v.letters).result


def equals(u: Word, v: Word) -> bool:
    """Letter-by-letter equality using the stored lengths first."""
    return u.rank == v.rank and probe_equals(u.letters, v.letters).result


def word_power(w: Word, exponent: int) -> Word:
    """w^exponent for any integer exponent."""
    base = w if exponent >= 0 else invert(w)
    result = Word.empty(w.rank)
    for _ in range(abs(exponent)):
        result = concat_reduce(result, base)
    return result


def product(words: Sequence[Word], rank: int) -> Word:
    """Reduced product of a sequence of words over the same alphabet."""
    return reduce(itertools.chain.from_iterable(w.letters for w in words), rank)


def log_star(n: float) -> int:
    """Iterated base-2 logarithm: applications of log2 needed to reach <= 1."""
    count = 0
    value = float(n)
    while value > 1:
        value = math.log2(value)
        count += 1
    return count
