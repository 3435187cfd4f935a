"""Brute-force reference for GSA, BWT, LCP and the LCI/LSI intervals.

Everything here sorts and compares whole suffixes in memory. It is meant as
ground truth for tests and for ``--verify``, not as a construction method.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import PositionOutOfRange
from .model import MARKER_CODE, GsaEntry, SequenceCollection


@dataclass(frozen=True)
class OracleResult:
    gsa: list[GsaEntry]
    bwt: np.ndarray
    lcp: np.ndarray


def _suffix_key(text: bytes, pos: int, seq: int) -> bytes:
    # marker byte 0 sorts below every symbol code; the big-endian seq breaks
    # ties between markers of different strings
    return text[pos:] + b"\x00" + seq.to_bytes(8, "big")


def build_gsa(c: SequenceCollection) -> list[GsaEntry]:
    texts = [c.string_codes(i).tobytes() for i in range(c.m)]
    names = [
        GsaEntry(pos, seq) for seq, text in enumerate(texts) for pos in range(len(text) + 1)
    ]
    names.sort(key=lambda e: _suffix_key(texts[e.seq], e.pos, e.seq))
    return names


def gsa_to_bwt(c: SequenceCollection, gsa: Sequence[GsaEntry]) -> np.ndarray:
    out = np.empty(len(gsa), dtype=np.uint8)
    for i, (pos, seq) in enumerate(gsa):
        out[i] = MARKER_CODE if pos == 0 else c.string_codes(seq)[pos - 1]
    return out


def common_prefix(a: bytes, b: bytes) -> int:
    """Length of the shared prefix; a marker ends the comparison."""
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n


def gsa_to_lcp(c: SequenceCollection, gsa: Sequence[GsaEntry]) -> np.ndarray:
    texts = [c.string_codes(i).tobytes() for i in range(c.m)]
    out = np.zeros(len(gsa), dtype=np.int64)
    for j in range(1, len(gsa)):
        p, q = gsa[j - 1], gsa[j]
        out[j] = common_prefix(texts[p.seq][p.pos:], texts[q.seq][q.pos:])
    return out


def oracle_run(c: SequenceCollection) -> OracleResult:
    gsa = build_gsa(c)
    return OracleResult(gsa, gsa_to_bwt(c, gsa), gsa_to_lcp(c, gsa))


@dataclass(frozen=True)
class Interval:
    """Result of an LCI/LSI query on a 1-indexed segment.

    When ``found`` is true the range is ``(start, end]`` and ``minimum`` is
    the smallest LCP value inside it. Otherwise the interval degenerates to
    the point ``start == end == r`` and ``minimum`` is ``lseg[r]``.
    """

    start: int
    end: int
    minimum: int
    found: bool

    def next_lcp(self) -> int:
        """LCP contributed to the next iteration: min + 1, or 1 if degenerate."""
        return self.minimum + 1 if self.found else 1


def _check(bseg, lseg, r):
    if len(bseg) != len(lseg):
        raise ValueError("symbol and lcp segments differ in length")
    if not 1 <= r <= len(bseg):
        raise PositionOutOfRange(f"position {r} outside segment of length {len(bseg)}")


def lci(bseg, lseg, x: int, r: int) -> Interval:
    """Current interval of ``x`` at ``r``: back to the previous ``x``."""
    _check(bseg, lseg, r)
    for d in range(r - 1, 0, -1):
        if bseg[d - 1] == x:
            return Interval(d, r, int(min(lseg[d:r])), True)
    return Interval(r, r, int(lseg[r - 1]), False)


def lsi(bseg, lseg, x: int, r: int) -> Interval:
    """Successive interval of ``x`` at ``r``: forward to the next ``x``."""
    _check(bseg, lseg, r)
    for d in range(r + 1, len(bseg) + 1):
        if bseg[d - 1] == x:
            return Interval(r, d, int(min(lseg[r:d])), True)
    return Interval(r, r, int(lseg[r - 1]), False)


def rank(bseg, x: int, r: int) -> int:
    """Occurrences of ``x`` in positions 1..r."""
    return sum(1 for s in bseg[:r] if s == x)


def select(bseg, p: int, x: int) -> Optional[int]:
    """Position of the ``p``-th occurrence of ``x`` (1-indexed), if any."""
    if p < 1:
        return None
    seen = 0
    for pos, s in enumerate(bseg, start=1):
        if s == x:
            seen += 1
            if seen == p:
                return pos
    return None
