"""Central tree property and the average-case membership algorithm MP_d.

A tuple (w_1, ..., w_k) has the d-ctp when every |w_i| > 2d and the 2k
length-d prefixes of the w_i and their inverses are pairwise distinct.
Indices are signed: w_{-i} = w_i^-1, pr_i is the length-d prefix of
w_{-i}, and w_i = pr_{-i} . mf_d(w_i) . pr_i^-1.
"""

import logging
import math
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from free_words import Word, invert
from stallings import XWord, run_mp

logger = logging.getLogger("freegroup.ctp")

# Constants
POLICY_KINDS = ("logn", "pow", "lin", "log3b", "const")
DEFAULT_POLICY = "logn"
POLICY_PATTERN = re.compile(r"^(?P<kind>[a-z0-9]+)(?::(?P<param>[0-9]*\.?[0-9]+))?$")

FAST = "fast"
FALLBACK = "fallback"


@dataclass(frozen=True)
class DepthPolicy:
    """Rule n -> d(n) for the ctp depth.

    Kinds:
        logn: ceil(log2 n)
        pow:g: ceil((2n)^g), 0 < g < 1
        lin:g: ceil(g n), 0 < g < 1/2
        log3b:b: ceil(3b / ln(2r-1) * ln(2n)), b > 0
        const:d: d
    """
    kind: str = DEFAULT_POLICY
    param: Optional[float] = None

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(
                f"Unknown depth policy '{self.kind}'. Choose one of: {', '.join(POLICY_KINDS)}"
            )
        if self.kind == "logn":
            if self.param is not None:
                raise ValueError("Depth policy 'logn' takes no parameter")
            return
        if self.param is None:
            raise ValueError(f"Depth policy '{self.kind}' needs a parameter, e.g. {self.kind}:0.5")
        if self.kind == "pow" and not 0 < self.param < 1:
            raise ValueError(f"pow exponent must lie in (0, 1), got {self.param}")
        if self.kind == "lin" and not 0 < self.param < 0.5:
            raise ValueError(f"lin density must lie in (0, 1/2), got {self.param}")
        if self.kind == "log3b" and self.param <= 0:
            raise ValueError(f"log3b parameter must be positive, got {self.param}")
        if self.kind == "const" and (self.param < 1 or self.param != int(self.param)):
            raise ValueError(f"const depth must be a positive integer, got {self.param}")

    @classmethod
    def parse(cls, text: str) -> "DepthPolicy":
        """Parse 'logn', 'pow:0.5', 'lin:0.1', 'log3b:1', 'const:3'."""
        match = POLICY_PATTERN.match(text.strip())
        if not match:
            raise ValueError(f"Cannot parse depth policy '{text}'")
        param = match.group("param")
        return cls(match.group("kind"), float(param) if param is not None else None)

    def __str__(self) -> str:
        if self.param is None:
            return self.kind
        if self.kind == "const":
            return f"const:{int(self.param)}"
        return f"{self.kind}:{self.param:g}"


def eval_depth(policy: DepthPolicy, n: int, k: int, r: int) -> int:
    """d(n) for the given policy, rounded up and clamped to [1, ceil(n/2) - 1].

    ``k`` is accepted for symmetry with the tuple-size policies; none of the
    depth formulas depends on it.
    """
    if n < 2:
        raise ValueError(f"Depth policies need n >= 2, got {n}")
    if policy.kind == "logn":
        raw = math.ceil(math.log2(n))
    elif policy.kind == "pow":
        raw = math.ceil((2 * n) ** policy.param)
    elif policy.kind == "lin":
        raw = math.ceil(policy.param * n)
    elif policy.kind == "log3b":
        if r < 2:
            raise ValueError("Depth policy 'log3b' needs rank r >= 2")
        raw = math.ceil(3 * policy.param / math.log(2 * r - 1) * math.log(2 * n))
    else:
        raw = int(policy.param)
    upper = math.ceil(n / 2) - 1
    return max(1, min(raw, upper))


class PrefixTree:
    """Trie of the 2k depth-d prefixes over the symmetrized alphabet.

    Node 0 is the root. Each leaf remembers the signed index i of the
    generator w_i it starts, so the leaf spells pr_{-i}.
    """

    def __init__(self, depth: int):
        self.depth = depth
        self.children: List[Dict[int, int]] = [{}]
        self.parent: List[int] = [-1]
        self.parent_letter: List[int] = [0]
        self.leaf_start: Dict[int, int] = {}
        self.start_leaf: Dict[int, int] = {}

    def __len__(self) -> int:
        return len(self.children)

    def insert(self, letters: Sequence[int], start: int) -> bool:
        """Insert a length-d prefix for generator ``start``; False if the leaf is taken."""
        node = 0
        for letter in letters:
            child = self.children[node].get(letter)
            if child is None:
                child = len(self.children)
                self.children.append({})
                self.parent.append(node)
                self.parent_letter.append(letter)
                self.children[node][letter] = child
            node = child
        if node in self.leaf_start:
            return False
        self.leaf_start[node] = start
        self.start_leaf[start] = node
        return True

    def spell(self, node: int) -> Tuple[int, ...]:
        """Letters on the path root -> node."""
        letters = []
        while node:
            letters.append(self.parent_letter[node])
            node = self.parent[node]
        return tuple(reversed(letters))

    @property
    def leaf_count(self) -> int:
        return len(self.leaf_start)


@dataclass(frozen=True)
class CtpCertificate:
    """Witness that a tuple has the d-ctp, with its prefix tree."""
    depth: int
    generators: Tuple[Word, ...]
    tree: PrefixTree = field(compare=False, repr=False)

    @property
    def k(self) -> int:
        return len(self.generators)

    @property
    def rank(self) -> int:
        return self.generators[0].rank

    def generator(self, i: int) -> Word:
        """w_i for a signed index i."""
        w = self.generators[abs(i) - 1]
        return w if i > 0 else invert(w)

    def prefix(self, i: int) -> Word:
        """pr_i, the length-d prefix of w_{-i}."""
        return Word._trusted(self.tree.spell(self.tree.start_leaf[-i]), self.rank)

    def middle_factor(self, i: int) -> Word:
        """mf_d(w_i), of length |w_i| - 2d."""
        w = self.generator(i)
        return Word._trusted(w.letters[self.depth:w.length - self.depth], self.rank)

    def reassemble(self, i: int) -> Tuple[int, ...]:
        """Letters of pr_{-i} . mf_d(w_i) . pr_i^-1, unreduced."""
        return (
            self.prefix(-i).letters
            + self.middle_factor(i).letters
            + invert(self.prefix(i)).letters
        )


def check_ctp(generators: Sequence[Word], d: int) -> Optional[CtpCertificate]:
    """Certificate for the d-ctp, or None when it fails.

    Builds the prefix tree from the 2k prefixes, reading at most 2kd letters.
    """
    if d < 1:
        raise ValueError(f"Depth must be positive, got {d}")
    generators = tuple(generators)
    if not generators or any(w.length <= 2 * d for w in generators):
        return None
    tree = PrefixTree(d)
    for index, w in enumerate(generators, start=1):
        head = w.letters[:d]
        tail = tuple(-letter for letter in reversed(w.letters[-d:]))
        if not tree.insert(head, index) or not tree.insert(tail, -index):
            return None
    return CtpCertificate(depth=d, generators=generators, tree=tree)


def has_ctp(generators: Sequence[Word]) -> Optional[int]:
    """Largest d with the d-ctp, or None.

    Distinct prefixes at depth d stay distinct at every larger depth, so
    testing the largest admissible d = ceil(mu/2) - 1 decides the question.
    """
    if not generators:
        return None
    shortest = min(w.length for w in generators)
    depth = math.ceil(shortest / 2) - 1
    if depth < 1:
        return None
    return depth if check_ctp(generators, depth) is not None else None


@dataclass(frozen=True)
class MembershipReport:
    """Verdict and counters of one run of Algorithm MP_d."""
    member: bool
    expression: Optional[XWord]
    path: str
    letters_read: int
    trie_steps: int = 0
    depth: Optional[int] = None
    basis: Tuple[Word, ...] = ()

    def to_dict(self) -> dict:
        return {
            "member": self.member,
            "path": self.path,
            "letters_read": self.letters_read,
            "trie_steps": self.trie_steps,
            "depth": self.depth,
            "expression_length": self.expression.length if self.expression is not None else None,
        }


class _TrieReader:
    """Reading head over w0 driven by a ctp certificate."""

    def __init__(self, w0: Word, certificate: CtpCertificate):
        self.letters = w0.letters
        self.cert = certificate
        self.tree = certificate.tree
        self.head = 0
        self.letters_read = 0
        self.trie_steps = 0

    @property
    def remaining(self) -> int:
        return len(self.letters) - self.head

    def _read(self) -> int:
        letter = self.letters[self.head]
        self.head += 1
        self.letters_read += 1
        return letter

    def descend_from_root(self) -> Optional[int]:
        """Read d letters down from the root; the leaf reached, if any."""
        node = 0
        for _ in range(self.cert.depth):
            if not self.remaining:
                return None
            node = self.tree.children[node].get(self._read())
            self.trie_steps += 1
            if node is None:
                return None
        return node

    def middle_is_proper_prefix(self, i: int) -> bool:
        """Check that mf_d(w_i) is a proper prefix of the unread suffix and skip it."""
        w = self.cert.generators[abs(i) - 1]
        d = self.cert.depth
        size = w.length - 2 * d
        if self.remaining <= size:
            return False
        for t in range(size):
            expected = w.letters[d + t] if i > 0 else -w.letters[w.length - 1 - d - t]
            if self._read() != expected:
                return False
        return True

    def suffix_is_root_path(self, leaf: int) -> bool:
        """Equality check of the unread suffix with the path leaf -> root."""
        if self.remaining != self.cert.depth:
            return False
        start, node = self.head, leaf
        while node:
            if self._read() != -self.tree.parent_letter[node]:
                self.head = start
                return False
            node = self.tree.parent[node]
            self.trie_steps += 1
        return True

    def walk_to_next_leaf(self, leaf: int) -> Optional[int]:
        """Geodesic walk from ``leaf`` to another leaf following w0."""
        node = leaf
        while True:
            if not self.remaining:
                return None
            letter = self._read()
            self.trie_steps += 1
            if node and letter == -self.tree.parent_letter[node]:
                node = self.tree.parent[node]
            else:
                node = self.tree.children[node].get(letter)
                if node is None:
                    return None
                if node in self.tree.leaf_start:
                    return node


def _fallback(w0: Word, generators: Sequence[Word], depth: Optional[int]) -> MembershipReport:
    result = run_mp(w0, generators)
    logger.info("MP_d fell back to Algorithm MP (k=%d, depth=%s)", len(generators), depth)
    return MembershipReport(
        member=result.member,
        expression=result.expression,
        path=FALLBACK,
        letters_read=result.letters_read,
        depth=depth,
        basis=result.basis,
    )


def _fast(w0: Word, certificate: CtpCertificate) -> MembershipReport:
    basis = certificate.generators
    k = certificate.k

    def report(member: bool, letters: Optional[List[int]], reader: Optional[_TrieReader]) -> MembershipReport:
        return MembershipReport(
            member=member,
            expression=XWord(tuple(letters), k) if member else None,
            path=FAST,
            letters_read=reader.letters_read if reader else 0,
            trie_steps=reader.trie_steps if reader else 0,
            depth=certificate.depth,
            basis=basis,
        )

    if not w0.length:
        return report(True, [], None)
    reader = _TrieReader(w0, certificate)
    tree = certificate.tree
    leaf = reader.descend_from_root()
    if leaf is None:
        return report(False, None, reader)
    expression: List[int] = []
    while True:
        start = tree.leaf_start[leaf]
        if not reader.middle_is_proper_prefix(start):
            return report(False, None, reader)
        expression.append(start)
        # The head now sits on pr_start^-1.
        leaf = tree.start_leaf[-start]
        if reader.suffix_is_root_path(leaf):
            return report(True, expression, reader)
        leaf = reader.walk_to_next_leaf(leaf)
        if leaf is None:
            return report(False, None, reader)


def membership_mpd(
    w0: Word, generators: Sequence[Word], policy: Optional[DepthPolicy] = None
) -> MembershipReport:
    """Algorithm MP_d: decide w0 in <generators>.

    Takes the fast trie walk when min|w| > n/2 and the d(n)-ctp holds for
    n = max|w|; otherwise delegates to Algorithm MP. The verdict always
    agrees with :func:`stallings.membership_mp`; on the fast path the
    expression is over the generators themselves.

    Raises:
        ValueError: If a generator is empty or the alphabets differ
    """
    generators = tuple(generators)
    if not generators:
        raise ValueError("At least one generator is required")
    if any(not w.length for w in generators):
        raise ValueError("Generators must be nonempty words")
    if any(w.rank != w0.rank for w in generators):
        raise ValueError("Alphabet mismatch between w0 and the generators")
    policy = policy or DepthPolicy()
    n = max(w.length for w in generators)
    shortest = min(w.length for w in generators)
    if n < 2 or 2 * shortest <= n:
        return _fallback(w0, generators, None)
    depth = eval_depth(policy, n, len(generators), w0.rank)
    certificate = check_ctp(generators, depth)
    if certificate is None:
        return _fallback(w0, generators, depth)
    return _fast(w0, certificate)


def ctp_failure_probability_bound(k: int, r: int, d_half: int) -> float:
    """k^2 (2r-1)^(-d(n/2)), the shape of the ctp failure bound with constant 1."""
    if r < 2:
        raise ValueError(f"The ctp failure bound needs r >= 2, got {r}")
    return float(k * k) * float(2 * r - 1) ** (-d_half)


def sandwich_holds(w0: Word, expression: Word, generators: Sequence[Word], depth: int) -> bool:
    """(mu - 2d) |x0| <= |w0| <= nu |x0| for a fast-path expression x0."""
    shortest = min(w.length for w in generators)
    longest = max(w.length for w in generators)
    length = expression.length
    return (shortest - 2 * depth) * length <= w0.length <= longest * length


def reassembly_holds(certificate: CtpCertificate) -> bool:
    """Every w_i equals pr_{-i} . mf_d(w_i) . pr_i^-1 letter for letter."""
    for i in range(1, certificate.k + 1):
        for signed in (i, -i):
            letters = certificate.reassemble(signed)
            if letters != certificate.generator(signed).letters:
                return False
    return True
