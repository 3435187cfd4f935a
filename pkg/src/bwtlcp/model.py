"""Domain vocabulary: alphabets, sequence collections and suffix names.

Symbols are handled internally as small integer codes. Code 0 is the end
marker, codes 1..sigma are the alphabet symbols in increasing order. End
markers are never stored inside the strings: the marker of string ``i`` is
the position ``len(strings[i])``, and markers of different strings compare
by sequence index.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from .errors import EmptyCollection, EmptyString, ForeignSymbol

MARKER = "$"
MARKER_CODE = 0
UNKNOWN_CODE = 255


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of single-byte symbols, excluding the end marker."""

    symbols: str

    def __post_init__(self):
        if not 1 <= len(self.symbols) <= 255:
            raise ValueError("an alphabet holds between 1 and 255 symbols")
        codes = [ord(ch) for ch in self.symbols]
        if max(codes) > 255:
            raise ValueError("alphabet symbols must be single-byte characters")
        if any(a >= b for a, b in zip(codes, codes[1:])):
            raise ValueError(
                f"alphabet symbols must be strictly increasing: {self.symbols!r}"
            )
        if MARKER in self.symbols:
            raise ValueError(f"{MARKER!r} is reserved for the end marker")

    @classmethod
    def from_string(cls, text: str) -> Alphabet:
        """Build an alphabet from any arrangement of its symbols."""
        return cls("".join(sorted(set(text))))

    @property
    def sigma(self) -> int:
        return len(self.symbols)

    def encode(self, ch: str) -> int:
        if ch == MARKER:
            return MARKER_CODE
        idx = self.symbols.find(ch)
        if idx < 0 or len(ch) != 1:
            raise ValueError(f"{ch!r} is not in the alphabet")
        return idx + 1

    def decode(self, code: int) -> str:
        if code == MARKER_CODE:
            return MARKER
        if not 1 <= code <= self.sigma:
            raise ValueError(f"code {code} is outside [0, {self.sigma}]")
        return self.symbols[code - 1]

    @cached_property
    def lookup(self) -> np.ndarray:
        """Byte value -> symbol code; foreign bytes map to ``UNKNOWN_CODE``."""
        table = np.full(256, UNKNOWN_CODE, dtype=np.uint8)
        for code, ch in enumerate(self.symbols, start=1):
            table[ord(ch)] = code
        return table

    @cached_property
    def rendering(self) -> np.ndarray:
        """Symbol code -> output byte, with the marker rendered as ``$``."""
        table = np.zeros(self.sigma + 1, dtype=np.uint8)
        table[MARKER_CODE] = ord(MARKER)
        for code, ch in enumerate(self.symbols, start=1):
            table[code] = ord(ch)
        return table


DNA = Alphabet("ACGNT")


class GsaEntry(NamedTuple):
    """Name of one suffix: offset ``pos`` inside string ``seq``.

    ``pos == len(strings[seq])`` names the suffix made of the marker alone.
    """

    pos: int
    seq: int


@dataclass(frozen=True)
class SequenceCollection:
    strings: tuple[str, ...]
    alphabet: Alphabet = field(default=DNA)

    @property
    def m(self) -> int:
        return len(self.strings)

    @cached_property
    def lengths(self) -> np.ndarray:
        return np.fromiter(
            (len(s) for s in self.strings), dtype=np.int64, count=len(self.strings)
        )

    @cached_property
    def K(self) -> int:
        return int(self.lengths.max())

    @cached_property
    def N(self) -> int:
        return int(self.lengths.sum()) + self.m

    @cached_property
    def offsets(self) -> np.ndarray:
        """Start of every string inside :attr:`codes`."""
        offsets = np.zeros(self.m, dtype=np.int64)
        np.cumsum(self.lengths[:-1], out=offsets[1:])
        return offsets

    @cached_property
    def codes(self) -> np.ndarray:
        """All strings back to back as symbol codes, markers omitted."""
        raw = "".join(self.strings).encode("latin-1")
        return self.alphabet.lookup[np.frombuffer(raw, dtype=np.uint8)]

    def string_codes(self, seq: int) -> np.ndarray:
        start = self.offsets[seq]
        return self.codes[start:start + self.lengths[seq]]


def validate_collection(
    raw: Sequence[str], alphabet: Alphabet = DNA
) -> SequenceCollection:
    """Check ``raw`` against ``alphabet`` and wrap it, keeping input order."""
    strings = tuple(raw)
    if not strings:
        raise EmptyCollection()
    allowed = frozenset(alphabet.symbols)
    for index, s in enumerate(strings):
        if not s:
            raise EmptyString(index)
        if not allowed.issuperset(s):
            for offset, ch in enumerate(s):
                if ch not in allowed:
                    raise ForeignSymbol(index, offset, ch)
    return SequenceCollection(strings, alphabet)
