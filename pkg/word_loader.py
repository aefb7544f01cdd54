"""Loading words files: one word per line, text or numeric format.

Blank lines and lines starting with '#' are skipped.
"""

import os
from pathlib import Path
from typing import List, Optional, Union

from free_words import Word
from word_format import infer_rank, parse_word

# Constants
MAX_FILE_SIZE_BYTES = 10 * 1024 * 1024  # 10 MB
COMMENT_PREFIX = "#"
ENCODING = "utf-8"


class WordLoader:
    """Validates and reads words files."""

    @staticmethod
    def validate_file(path: Union[str, Path]) -> bool:
        """Check that the file exists, is small enough and decodes as UTF-8.

        Raises:
            ValueError: If the file is invalid, with a descriptive message
        """
        path = Path(path)
        if not path.is_file():
            raise ValueError(f"❌ Words file not found: {path}")
        size = os.path.getsize(path)
        if size > MAX_FILE_SIZE_BYTES:
            raise ValueError(
                f"❌ File too large: {size / (1024 * 1024):.1f} MB. "
                f"Maximum: {MAX_FILE_SIZE_BYTES / (1024 * 1024):.0f} MB"
            )
        try:
            path.read_bytes().decode(ENCODING)
        except UnicodeDecodeError as e:
            raise ValueError(f"❌ Words file must be UTF-8 encoded: {e}") from e
        return True

    @staticmethod
    def read_lines(path: Union[str, Path]) -> List[str]:
        """Word lines of the file, without blanks and comments."""
        WordLoader.validate_file(path)
        lines = []
        for raw in Path(path).read_text(encoding=ENCODING).splitlines():
            line = raw.strip()
            if line and not line.startswith(COMMENT_PREFIX):
                lines.append(line)
        return lines

    @staticmethod
    def load_words(
        path: Union[str, Path],
        rank: Optional[int] = None,
        allow_unreduced: bool = False,
    ) -> List[Word]:
        """Parse every word of a words file.

        Args:
            path: Words file
            rank: Ambient rank; inferred from the letters when None
            allow_unreduced: Freely reduce instead of rejecting

        Raises:
            ValueError: If the file is invalid, empty or holds a bad word
        """
        lines = WordLoader.read_lines(path)
        if not lines:
            raise ValueError(f"❌ Words file is empty: {path}")
        rank = rank if rank is not None else infer_rank(lines)
        words = []
        for number, line in enumerate(lines, start=1):
            try:
                words.append(parse_word(line, rank, allow_unreduced))
            except ValueError as e:
                raise ValueError(f"❌ {path}, word {number}: {str(e).lstrip('❌ ')}") from e
        return words
