"""Text and numeric word formats shared by the CLI and the words-file loader.

Text format (rank <= 26): generators a..z, inverses A..Z, so "abA" is
a.b.a^-1. Numeric format (any rank): whitespace-separated signed integers,
e.g. "1 2 -1".
"""
import re
from typing import Iterable, List, Optional

from free_words import Word, reduce

# Constants
MAX_TEXT_RANK = 26
NUMERIC_PATTERN = re.compile(r"^\s*-?\d+(\s+-?\d+)*\s*$")
TEXT_PATTERN = re.compile(r"^[a-zA-Z]*$")


def is_numeric(text: str) -> bool:
    """True when ``text`` is in the numeric format."""
    return bool(NUMERIC_PATTERN.match(text))


def parse_letters(text: str) -> List[int]:
    """Split a word in either format into signed letters, without reducing.

    Raises:
        ValueError: If the text is in neither format
    """
    text = text.strip()
    if is_numeric(text):
        letters = [int(token) for token in text.split()]
        if 0 in letters:
            raise ValueError(f"❌ Letter 0 is not allowed in '{text}'")
        return letters
    if not TEXT_PATTERN.match(text):
        raise ValueError(
            f"❌ Cannot parse word '{text}'. "
            "Use letters a-z / A-Z or whitespace-separated signed integers."
        )
    return [
        ord(char) - ord("a") + 1 if char.islower() else -(ord(char) - ord("A") + 1)
        for char in text
    ]


def infer_rank(texts: Iterable[str]) -> int:
    """Smallest rank whose alphabet contains every letter of ``texts`` (at least 1)."""
    rank = 1
    for text in texts:
        for letter in parse_letters(text):
            rank = max(rank, abs(letter))
    return rank


def parse_word(text: str, rank: int, allow_unreduced: bool = False) -> Word:
    """Parse a word, rejecting unreduced input unless ``allow_unreduced``.

    Args:
        text: Word in text or numeric format
        rank: Rank of the ambient free group
        allow_unreduced: Freely reduce instead of rejecting

    Returns:
        Word: The parsed word

    Raises:
        ValueError: If the text is malformed, out of range or unreduced
    """
    letters = parse_letters(text)
    word = reduce(letters, rank)
    if word.length != len(letters) and not allow_unreduced:
        raise ValueError(
            f"❌ Word '{text.strip()}' is not freely reduced. "
            "Pass --reduce to reduce it."
        )
    return word


def format_word(word: Word, numeric: Optional[bool] = None) -> str:
    """Render a word; text format when the rank allows it unless ``numeric``."""
    if numeric is None:
        numeric = word.rank > MAX_TEXT_RANK
    if numeric:
        return " ".join(str(letter) for letter in word.letters)
    return "".join(
        chr(ord("a") + letter - 1) if letter > 0 else chr(ord("A") - letter - 1)
        for letter in word.letters
    )


def format_letter(letter: int, rank: int) -> str:
    """Render a single letter the way :func:`format_word` would."""
    return format_word(Word((letter,), rank))


def format_xword(xword: Word) -> str:
    """Render an expression over a basis as 'x1 x2^-1 ...'."""
    return " ".join(
        f"x{letter}" if letter > 0 else f"x{-letter}^-1" for letter in xword.letters
    )
