"""Simultaneous BWT and LCP construction by sequential scans.

The collection is processed right to left. Iteration ``j`` inserts the
``j``-suffix of every string that is long enough, moving from generation
``j - 1`` to generation ``j`` of the segment files in two passes:

* phase 1 reads the symbol segments once and turns each sequence's old
  position into its new one by counting symbol occurrences;
* phase 2 streams the old symbol and lcp segments into the new ones,
  placing the inserted symbols and their lcp values, while tracking for
  each symbol the minimum lcp since its previous occurrence (and up to its
  next one). Those minima are the lcp values needed by the next iteration.

Working memory is six arrays of ``m`` entries, an occurrence table of
``(sigma + 1) ** 2`` counts and ``2 (sigma + 1)`` tracker cells, plus I/O
buffers; none of it depends on the total collection length.
"""
from __future__ import annotations

import logging
import shutil
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import _kernels as kern
from .errors import InconsistentState
from .model import SequenceCollection
from .segio import (
    DEFAULT_BUFFER,
    GSA_DTYPE,
    AccessLog,
    GenerationReader,
    GenerationWriter,
    check_width,
    lcp_dtype,
    read_meta,
    swap_generations,
)

log = logging.getLogger(__name__)

POS_DTYPE = np.int64
SEQ_DTYPE = np.int64
SYM_DTYPE = np.uint8
LCP_DTYPE = np.int32


@dataclass
class EngineConfig:
    tmp_dir: Optional[Path] = None
    lcp_width: int = 4
    emit_gsa: bool = False
    buffer_size: int = DEFAULT_BUFFER

    def chunk_records(self) -> int:
        """Records per read so one chunk of each open file fits one buffer."""
        return max(1, self.buffer_size // max(self.lcp_width, 8 if self.emit_gsa else 1))


@dataclass
class IterationArrays:
    """The per-sequence working arrays.

    Slot ``q`` (for ``q < live``) describes the ``q``-th live sequence in
    (Q, P, N) order: ``N[q]`` its index, ``Q[q]`` the segment and ``P[q]``
    the 1-based position of the symbol preceding its current suffix, ``C[q]``
    and ``S[q]`` the lcp with its predecessor and successor at the next
    iteration. ``U`` is indexed by sequence and holds the symbol inserted for
    it at the current iteration. Arrays keep their allocated length ``m``;
    only the first ``live`` slots are meaningful.
    """

    P: np.ndarray
    Q: np.ndarray
    N: np.ndarray
    U: np.ndarray
    C: np.ndarray
    S: np.ndarray
    live: int

    @classmethod
    def allocate(cls, m: int) -> IterationArrays:
        return cls(
            P=np.zeros(m, dtype=POS_DTYPE),
            Q=np.zeros(m, dtype=SYM_DTYPE),
            N=np.zeros(m, dtype=SEQ_DTYPE),
            U=np.zeros(m, dtype=SYM_DTYPE),
            C=np.zeros(m, dtype=LCP_DTYPE),
            S=np.zeros(m, dtype=LCP_DTYPE),
            live=m,
        )

    def arrays(self):
        return self.P, self.Q, self.N, self.U, self.C, self.S

    def footprint(self) -> tuple[int, int]:
        """(elements, bytes) currently allocated for the six arrays."""
        arrs = self.arrays()
        return sum(a.size for a in arrs), sum(a.nbytes for a in arrs)

    def slots(self):
        """Live slots as plain tuples ``(P, Q, N, C, S)``; for inspection."""
        n = self.live
        return list(zip(self.P[:n].tolist(), self.Q[:n].tolist(), self.N[:n].tolist(),
                        self.C[:n].tolist(), self.S[:n].tolist()))


@dataclass
class MemoryAccount:
    """Peak working-set accounting, excluding I/O buffers."""

    array_elements: int = 0
    array_bytes: int = 0
    table_cells: int = 0
    tracker_cells: int = 0

    def observe(self, arrays: IterationArrays, table=None, tracker=()):
        elements, nbytes = arrays.footprint()
        self.array_elements = max(self.array_elements, elements)
        self.array_bytes = max(self.array_bytes, nbytes)
        if table is not None:
            self.table_cells = max(self.table_cells, table.size)
        cells = sum(t.size for t in tracker)
        self.tracker_cells = max(self.tracker_cells, cells)

    @property
    def total_cells(self) -> int:
        return self.array_elements + self.table_cells + self.tracker_cells

    def as_dict(self) -> dict:
        return {
            "array_elements": self.array_elements,
            "array_bytes": self.array_bytes,
            "table_cells": self.table_cells,
            "tracker_cells": self.tracker_cells,
        }


class Monitor:
    """Hooks into a run. Subclass and override what you need.

    ``access_log`` (if set) is handed to every generation reader.
    """

    access_log: Optional[AccessLog] = None

    def on_generation(self, iteration: int, directory: Path, arrays: IterationArrays):
        """Called once generation ``iteration`` is sealed, before the previous
        generation is deleted. ``arrays`` then hold the positions of the
        inserted suffixes and the C/S values for the next iteration."""


def init_iteration0(c: SequenceCollection, writer: GenerationWriter) -> IterationArrays:
    """Write generation 0 (the markers) and set up the working arrays."""
    m = c.m
    arrays = IterationArrays.allocate(m)
    last = c.codes[c.offsets + c.lengths - 1]
    gsa = None
    if writer.gsa:
        gsa = np.empty((m, 2), dtype=GSA_DTYPE)
        gsa[:, 0] = c.lengths
        gsa[:, 1] = np.arange(m)
    writer.append_block(0, last, np.zeros(m, dtype=np.uint8), gsa)
    arrays.N[:] = np.arange(m)
    arrays.P[:] = np.arange(1, m + 1)
    arrays.Q[:] = 0
    arrays.U[:] = last
    arrays.C[:] = 1
    arrays.S[:] = 1
    return arrays


def _bounds(Q, live, sigma):
    """Slot range of every segment, for slots sorted by Q."""
    return np.searchsorted(Q[:live], np.arange(sigma + 2), side="left")


def phase1_positions(arrays: IterationArrays, reader: GenerationReader, j: int,
                     c: SequenceCollection, table: np.ndarray, chunk: int = 1 << 20):
    """New (segment, position) of every live sequence, from generation ``j - 1``.

    ``table[v, x]`` ends up holding the occurrences of symbol ``x`` in
    segment ``v``. Sequences whose whole string was inserted at iteration
    ``j - 1`` leave the arrays. ``U`` is refreshed with the symbols to be
    inserted at iteration ``j``.
    """
    sigma = reader.sigma
    P, Q, N, U, C, S = arrays.arrays()
    live = arrays.live
    bounds = _bounds(Q, live, sigma)
    table[:] = 0
    prior = np.zeros(sigma + 1, dtype=np.int64)
    for v in range(sigma + 1):
        a, b = int(bounds[v]), int(bounds[v + 1])
        counts = table[v]
        slot = a
        with reader.segment(v) as cur:
            while cur.position < cur.length:
                base = cur.position
                symbols, _, _ = cur.read(chunk)
                slot = kern.scan_positions(symbols, base, P, Q, slot, b, counts, prior)
        if slot != b:
            raise InconsistentState(
                f"iteration {j}: position {P[slot]} beyond segment {v} "
                f"of length {reader.lengths[v]}"
            )
        prior += counts
    new_live = kern.retire_and_check(P, Q, N, C, S, U, live)
    if new_live < 0:
        k = -new_live - 1
        raise InconsistentState(
            f"iteration {j}: sequence {N[k]} expected symbol {U[N[k]]}, found {Q[k]}"
        )
    arrays.live = int(new_live)
    kern.next_symbols(N, U, c.codes, c.offsets, c.lengths, j, arrays.live)
    return arrays


def sort_arrays(arrays: IterationArrays) -> IterationArrays:
    """Co-sort the slot arrays by (Q, P, N), in place."""
    kern.sort_slots(arrays.P, arrays.Q, arrays.N, arrays.C, arrays.S, arrays.live)
    return arrays


def phase2_merge(arrays: IterationArrays, reader: GenerationReader,
                 writer: GenerationWriter, j: int, c: SequenceCollection,
                 chunk: int = 1 << 20, tracker=None):
    """Build generation ``j`` from ``j - 1`` and compute C/S for ``j + 1``."""
    sigma = reader.sigma
    P, Q, N, U, C, S = arrays.arrays()
    live = arrays.live
    bounds = _bounds(Q, live, sigma)
    track_gsa = writer.gsa
    if tracker is None:
        tracker = (np.full(sigma + 1, kern.CLOSED, dtype=np.int64),
                   np.full(sigma + 1, kern.CLOSED, dtype=np.int64))
    min_lci, lsi_owner = tracker
    ldtype = lcp_dtype(writer.lcp_width)
    cap = chunk
    out_b = np.empty(cap, dtype=np.uint8)
    out_l = np.empty(cap, dtype=ldtype)
    out_g = np.empty((cap if track_gsa else 0, 2), dtype=GSA_DTYPE)
    no_g = np.empty((0, 2), dtype=GSA_DTYPE)
    state = np.zeros(kern.STATE_SIZE, dtype=np.int64)

    for z in range(sigma + 1):
        a, b = int(bounds[z]), int(bounds[z + 1])
        with reader.segment(z) as cur:
            if a == b:
                # nothing lands here: plain copy
                while cur.position < cur.length:
                    bs, ls, gs = cur.read(chunk)
                    writer.append_block(z, bs, ls, gs if track_gsa else None)
                continue
            state[:] = 0
            state[kern.ST_SLOT] = a
            while True:
                bs, ls, gs = cur.read(chunk)
                if gs is None:
                    gs = no_g
                state[kern.ST_INPUT] = 0
                while True:
                    n = kern.merge_segment_chunk(
                        bs, ls, gs, out_b, out_l, out_g,
                        P, N, U, C, S, c.lengths, j, b, track_gsa,
                        state, min_lci, lsi_owner,
                    )
                    if n:
                        writer.append_block(z, out_b[:n], out_l[:n],
                                            out_g[:n] if track_gsa else None)
                    if n < cap:
                        break
                if len(bs) == 0:
                    break
        if state[kern.ST_SLOT] != b:
            k = int(state[kern.ST_SLOT])
            raise InconsistentState(
                f"iteration {j}: insertion at {P[k]} beyond end of segment {z} "
                f"({state[kern.ST_WRITTEN]} records written)"
            )
        kern.close_segment(S, min_lci, lsi_owner)
    return arrays


@dataclass
class RunResult:
    """Final generation of a run plus its statistics.

    The segment files stay on disk until :meth:`close` (or the end of a
    ``with`` block) when the run created its own temporary directory.
    """

    directory: Path
    iteration: int
    sigma: int
    lcp_width: int
    has_gsa: bool
    stats: dict = field(default_factory=dict)
    owns_directory: bool = False

    def chunks(self, chunk: int = 1 << 20):
        """Yield ``(B, L, G)`` chunks of the concatenated final segments."""
        kinds = ("B", "L", "G") if self.has_gsa else ("B", "L")
        reader = GenerationReader(self.directory, self.iteration, kinds=kinds)
        for h in range(self.sigma + 1):
            with reader.segment(h) as cur:
                while cur.position < cur.length:
                    yield cur.read(chunk)

    def arrays(self):
        """Whole BWT codes, LCP values and (if tracked) GSA pairs."""
        parts = list(self.chunks())
        bwt = np.concatenate([p[0] for p in parts]) if parts else np.empty(0, np.uint8)
        lcp = (np.concatenate([p[1] for p in parts]).astype(np.int64)
               if parts else np.empty(0, np.int64))
        gsa = None
        if self.has_gsa:
            gsa = np.concatenate([p[2] for p in parts]).astype(np.int64)
        return bwt, lcp, gsa

    def close(self):
        if self.owns_directory:
            shutil.rmtree(self.directory, ignore_errors=True)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def run(c: SequenceCollection, config: Optional[EngineConfig] = None,
        monitor: Optional[Monitor] = None) -> RunResult:
    """Compute BWT and LCP (and optionally GSA) of ``c`` in external memory."""
    cfg = config or EngineConfig()
    monitor = monitor or Monitor()
    check_width(cfg.lcp_width, c.K)
    owns = cfg.tmp_dir is None
    if owns:
        directory = Path(tempfile.mkdtemp(prefix="bwtlcp-"))
    else:
        directory = Path(cfg.tmp_dir)
        directory.mkdir(parents=True, exist_ok=True)
    sigma = c.alphabet.sigma
    chunk = cfg.chunk_records()
    started = time.perf_counter()
    account = MemoryAccount()
    table = np.zeros((sigma + 1, sigma + 1), dtype=np.int64)
    tracker = (np.full(sigma + 1, kern.CLOSED, dtype=np.int64),
               np.full(sigma + 1, kern.CLOSED, dtype=np.int64))

    def writer_for(j):
        return GenerationWriter(directory, j, sigma, cfg.lcp_width, c.K,
                                gsa=cfg.emit_gsa, buffer_size=cfg.buffer_size)

    def reader_for(j, kinds):
        return GenerationReader(directory, j, kinds=kinds, buffer_size=cfg.buffer_size,
                                log=monitor.access_log)

    try:
        with writer_for(0) as writer:
            arrays = init_iteration0(c, writer)
        account.observe(arrays, table, tracker)
        monitor.on_generation(0, directory, arrays)
        for j in range(1, c.K + 1):
            phase1_positions(arrays, reader_for(j - 1, ("B",)), j, c, table, chunk)
            sort_arrays(arrays)
            kinds = ("B", "L", "G") if cfg.emit_gsa else ("B", "L")
            with writer_for(j) as writer:
                phase2_merge(arrays, reader_for(j - 1, kinds), writer, j, c, chunk, tracker)
            account.observe(arrays, table, tracker)
            monitor.on_generation(j, directory, arrays)
            swap_generations(directory, j)
            log.debug("iteration %d done, %d live sequences", j, arrays.live)
    except BaseException:
        if owns:
            shutil.rmtree(directory, ignore_errors=True)
        raise

    seconds = time.perf_counter() - started
    bases = c.N - c.m
    stats = {
        "m": c.m,
        "N": c.N,
        "K": c.K,
        "sigma": sigma,
        "iterations": c.K,
        "seconds": seconds,
        "us_per_base": seconds * 1e6 / bases,
        "memory": account.as_dict(),
    }
    read_meta(directory, c.K)
    return RunResult(directory, c.K, sigma, cfg.lcp_width, cfg.emit_gsa, stats, owns)


def compute(c: SequenceCollection, **config):
    """In-memory convenience wrapper: ``(bwt_codes, lcp, gsa_or_None)``."""
    with run(c, EngineConfig(**config)) as result:
        return result.arrays()
