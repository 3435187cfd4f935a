"""On-disk segment generations.

A generation ``j`` is the partial BWT and LCP after iteration ``j``, split
into ``sigma + 1`` segments by the first symbol of the suffixes. Each segment
is a pair of files::

    <dir>/gen<j>.B.<h>   one byte per record (symbol code, marker = 0)
    <dir>/gen<j>.L.<h>   lcp values, fixed-width little-endian unsigned

plus, when suffix names are tracked, ``<dir>/gen<j>.G.<h>`` holding
``(pos, seq)`` as two little-endian uint32 per record. A generation becomes
visible to readers only once ``<dir>/gen<j>.meta`` has been written by
:meth:`GenerationWriter.seal`.

Writers append strictly sequentially; readers only move forward.
"""
from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np

from .errors import InconsistentState, IoFailure, MissingGeneration, WidthTooSmall

DEFAULT_BUFFER = 1 << 20
LCP_DTYPES = {1: np.dtype("<u1"), 2: np.dtype("<u2"), 4: np.dtype("<u4")}
GSA_DTYPE = np.dtype("<u4")
FIELDS = ("B", "L", "G")


class SegmentRecord(NamedTuple):
    symbol: int
    lcp: int


def segment_path(directory, iteration: int, kind: str, h: int) -> str:
    return os.path.join(directory, f"gen{iteration}.{kind}.{h}")


def meta_path(directory, iteration: int) -> Path:
    return Path(directory) / f"gen{iteration}.meta"


def lcp_dtype(width: int) -> np.dtype:
    try:
        return LCP_DTYPES[width]
    except KeyError:
        raise ValueError(f"lcp width must be one of 1, 2, 4 (got {width})") from None


def check_width(width: int, max_value: int) -> None:
    lcp_dtype(width)
    if max_value >= 1 << (8 * width):
        raise WidthTooSmall(width, max_value)


def _buffering(size: int) -> int:
    # open() reads buffering=1 as line buffering, which binary files lack
    return max(2, size)


def _record_size(kind: str, width: int) -> int:
    return {"B": 1, "L": width, "G": 2 * GSA_DTYPE.itemsize}[kind]


@dataclass
class AccessLog:
    """Records every open and every fetch made by generation readers.

    ``fetches`` holds ``(pass_id, iteration, kind, h, offset, count)`` where
    ``offset`` is the 0-based index of the first record returned.
    """

    opens: Counter = field(default_factory=Counter)
    passes: Counter = field(default_factory=Counter)
    fetches: list = field(default_factory=list)
    _next_pass: int = 0

    def new_pass(self, iteration: int) -> int:
        self._next_pass += 1
        self.passes[iteration] += 1
        return self._next_pass

    def violations(self) -> list[str]:
        """Non-sequential fetches, in human-readable form."""
        last: dict = {}
        problems = []
        for pass_id, iteration, kind, h, offset, count in self.fetches:
            key = (pass_id, iteration, kind, h)
            expected = last.get(key, 0)
            if offset != expected:
                problems.append(
                    f"gen{iteration}.{kind}.{h} pass {pass_id}: "
                    f"fetch at {offset}, expected {expected}"
                )
            last[key] = offset + count
        return problems


class GenerationWriter:
    """Append-only writer for the segments of one generation."""

    def __init__(
        self,
        directory,
        iteration: int,
        sigma: int,
        lcp_width: int = 4,
        max_lcp: int = 0,
        *,
        gsa: bool = False,
        buffer_size: int = DEFAULT_BUFFER,
    ):
        check_width(lcp_width, max_lcp)
        self.directory = Path(directory)
        self.iteration = iteration
        self.sigma = sigma
        self.lcp_width = lcp_width
        self.gsa = gsa
        self.lengths = [0] * (sigma + 1)
        self.sealed = False
        self._ldtype = lcp_dtype(lcp_width)
        kinds = FIELDS if gsa else FIELDS[:2]
        self._files = {}
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            meta_path(directory, iteration).unlink(missing_ok=True)
            for kind in kinds:
                for h in range(sigma + 1):
                    self._files[kind, h] = open(
                        segment_path(directory, iteration, kind, h), "wb",
                        buffering=_buffering(buffer_size),
                    )
        except OSError as exc:
            self._close_all()
            raise IoFailure(str(exc)) from exc

    def append(self, h: int, rec: SegmentRecord, gsa_entry=None) -> None:
        g = None
        if self.gsa:
            if gsa_entry is None:
                raise ValueError("this generation tracks suffix names")
            g = np.array([gsa_entry], dtype=GSA_DTYPE)
        self.append_block(
            h,
            np.array([rec.symbol], dtype=np.uint8),
            np.array([rec.lcp], dtype=self._ldtype),
            g,
        )

    def append_block(self, h: int, symbols, lcps, gsa=None) -> None:
        """Append parallel arrays of records to segment ``h``."""
        if self.sealed:
            raise InconsistentState(f"generation {self.iteration} is sealed")
        if not 0 <= h <= self.sigma:
            raise IndexError(f"segment {h} outside [0, {self.sigma}]")
        n = len(symbols)
        if len(lcps) != n:
            raise ValueError("symbol and lcp blocks differ in length")
        if n == 0:
            return
        try:
            self._files["B", h].write(np.ascontiguousarray(symbols, dtype=np.uint8).data)
            self._files["L", h].write(np.ascontiguousarray(lcps, dtype=self._ldtype).data)
            if self.gsa:
                self._files["G", h].write(np.ascontiguousarray(gsa, dtype=GSA_DTYPE).data)
        except OSError as exc:
            raise IoFailure(str(exc)) from exc
        self.lengths[h] += n

    def seal(self) -> None:
        if self.sealed:
            return
        self._close_all()
        lines = [
            f"iteration {self.iteration}",
            f"sigma {self.sigma}",
            f"lcp_width {self.lcp_width}",
            f"gsa {int(self.gsa)}",
            "lengths " + " ".join(str(n) for n in self.lengths),
        ]
        try:
            tmp = meta_path(self.directory, self.iteration).with_suffix(".meta.tmp")
            tmp.write_text("\n".join(lines) + "\n")
            os.replace(tmp, meta_path(self.directory, self.iteration))
        except OSError as exc:
            raise IoFailure(str(exc)) from exc
        self.sealed = True

    def _close_all(self):
        for fh in self._files.values():
            fh.close()

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            self.seal()
        else:
            self._close_all()


def open_generation_writer(iteration, directory, sigma, lcp_width=4, max_lcp=0, **kw):
    return GenerationWriter(directory, iteration, sigma, lcp_width, max_lcp, **kw)


@dataclass(frozen=True)
class GenerationMeta:
    iteration: int
    sigma: int
    lcp_width: int
    gsa: bool
    lengths: tuple[int, ...]


def read_meta(directory, iteration: int) -> GenerationMeta:
    path = meta_path(directory, iteration)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise MissingGeneration(f"generation {iteration} is not sealed in {directory}") from None
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    fields = dict(line.split(" ", 1) for line in text.splitlines() if line)
    return GenerationMeta(
        iteration=int(fields["iteration"]),
        sigma=int(fields["sigma"]),
        lcp_width=int(fields["lcp_width"]),
        gsa=fields["gsa"] == "1",
        lengths=tuple(int(x) for x in fields["lengths"].split()),
    )


def visible_lengths(directory, iteration: int, sigma: int) -> tuple[int, ...]:
    """Segment lengths as readers see them; all zero until sealed."""
    try:
        return read_meta(directory, iteration).lengths
    except MissingGeneration:
        return (0,) * (sigma + 1)


class SegmentCursor:
    """Forward-only cursor over one segment.

    ``position`` is the number of records consumed, so the next record is
    at 1-based position ``position + 1``.
    """

    def __init__(self, reader: GenerationReader, h: int, kinds):
        self.h = h
        self.length = reader.meta.lengths[h]
        self.position = 0
        self._reader = reader
        self._kinds = kinds
        self._files = {}
        meta = reader.meta
        try:
            for kind in kinds:
                self._files[kind] = open(
                    segment_path(reader.directory, meta.iteration, kind, h), "rb",
                    buffering=_buffering(reader.buffer_size),
                )
                if reader.log is not None:
                    reader.log.opens[meta.iteration, kind, h] += 1
        except OSError as exc:
            self.close()
            raise IoFailure(str(exc)) from exc

    def read(self, count: int):
        """Next ``count`` records (fewer at the end) as ``(B, L, G)`` arrays.

        Fields that were not requested when the cursor was opened are None.
        """
        count = min(count, self.length - self.position)
        meta = self._reader.meta
        out = {}
        try:
            for kind in self._kinds:
                size = _record_size(kind, meta.lcp_width)
                raw = self._files[kind].read(count * size)
                if len(raw) != count * size:
                    raise IoFailure(
                        f"gen{meta.iteration}.{kind}.{self.h} truncated at record {self.position}"
                    )
                if kind == "B":
                    out[kind] = np.frombuffer(raw, dtype=np.uint8)
                elif kind == "L":
                    out[kind] = np.frombuffer(raw, dtype=lcp_dtype(meta.lcp_width))
                else:
                    out[kind] = np.frombuffer(raw, dtype=GSA_DTYPE).reshape(-1, 2)
        except OSError as exc:
            raise IoFailure(str(exc)) from exc
        log = self._reader.log
        if log is not None and count:
            for kind in self._kinds:
                log.fetches.append(
                    (self._reader.pass_id, meta.iteration, kind, self.h, self.position, count)
                )
        self.position += count
        return out.get("B"), out.get("L"), out.get("G")

    def next(self) -> Optional[SegmentRecord]:
        """Next record, or None once the segment is exhausted."""
        if self.position >= self.length:
            return None
        b, l, _ = self.read(1)
        return SegmentRecord(int(b[0]) if b is not None else None,
                             int(l[0]) if l is not None else None)

    def __iter__(self):
        while (rec := self.next()) is not None:
            yield rec

    def close(self):
        for fh in self._files.values():
            fh.close()
        self._files = {}

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class GenerationReader:
    """One sequential pass over a sealed generation."""

    def __init__(self, directory, iteration: int, *, kinds=("B", "L"),
                 buffer_size: int = DEFAULT_BUFFER, log: Optional[AccessLog] = None):
        self.directory = Path(directory)
        self.meta = read_meta(directory, iteration)
        if "G" in kinds and not self.meta.gsa:
            raise MissingGeneration(f"generation {iteration} carries no suffix names")
        self.kinds = tuple(kinds)
        self.buffer_size = buffer_size
        self.log = log
        self.pass_id = log.new_pass(iteration) if log is not None else 0
        self._opened = set()

    @property
    def sigma(self) -> int:
        return self.meta.sigma

    @property
    def lengths(self) -> tuple[int, ...]:
        return self.meta.lengths

    def segment(self, h: int) -> SegmentCursor:
        if h in self._opened:
            raise InconsistentState(f"segment {h} already opened in this pass")
        self._opened.add(h)
        return SegmentCursor(self, h, self.kinds)


def open_generation_reader(iteration, directory, **kw) -> GenerationReader:
    return GenerationReader(directory, iteration, **kw)


def generation_files(directory, iteration: int) -> list[str]:
    prefix = f"gen{iteration}."
    return sorted(os.path.join(directory, name) for name in os.listdir(directory)
                  if name.startswith(prefix))


def delete_generation(directory, iteration: int) -> None:
    try:
        for path in generation_files(directory, iteration):
            os.unlink(path)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def swap_generations(directory, j: int) -> None:
    """Drop generation ``j - 1`` once generation ``j`` is sealed."""
    if j == 0:
        return
    read_meta(directory, j)
    delete_generation(directory, j - 1)


def read_segment(directory, iteration: int, h: int, kinds=("B", "L")):
    """Whole segment as arrays; a convenience for tests and small inputs."""
    reader = GenerationReader(directory, iteration, kinds=kinds)
    with reader.segment(h) as cur:
        return cur.read(cur.length)
