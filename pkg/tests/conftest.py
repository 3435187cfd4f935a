import os
import random
import tempfile

import numpy as np
import pytest

from bwtlcp.engine import Monitor
from bwtlcp.model import Alphabet, validate_collection
from bwtlcp.oracle import lci, lsi
from bwtlcp.segio import read_meta, read_segment

# file creation on the sandbox disk is slow; generations are small
if os.access("/dev/shm", os.W_OK):
    tempfile.tempdir = "/dev/shm"

ACGT = Alphabet("ACGT")
PAIR = ("ACACTGTACCAAC", "GAACAGAAAGCTC")


@pytest.fixture
def acgt():
    return ACGT


@pytest.fixture
def pair():
    return validate_collection(PAIR, ACGT)


def random_collection(rng: random.Random, max_m=200, max_len=60, sigmas=(2, 4, 6),
                      uniform=None):
    sigma = rng.choice(sigmas)
    alphabet = Alphabet("ABCDEF"[:sigma])
    m = rng.randint(1, max_m)
    if uniform is None:
        uniform = rng.random() < 0.3
    if uniform:
        k = rng.randint(1, max_len)
        lengths = [k] * m
    else:
        lengths = [rng.randint(1, max_len) for _ in range(m)]
    raw = ["".join(rng.choice(alphabet.symbols) for _ in range(n)) for n in lengths]
    return validate_collection(raw, alphabet)


class Recorder(Monitor):
    """Keeps a copy of every generation and of the arrays after each iteration."""

    def __init__(self, keep=None, log=None):
        self.keep = keep
        self.access_log = log
        self.generations = {}
        self.arrays = {}
        self.dirs_seen = {}

    def on_generation(self, iteration, directory, arrays):
        self.dirs_seen[iteration] = sorted(os.listdir(directory))
        if self.keep is not None and iteration not in self.keep:
            return
        sigma = read_meta(directory, iteration).sigma
        segs = []
        for h in range(sigma + 1):
            b, l, _ = read_segment(directory, iteration, h)
            segs.append((b.copy(), l.astype(np.int64)))
        self.generations[iteration] = segs
        n = arrays.live
        self.arrays[iteration] = {
            "P": arrays.P[:n].copy(), "Q": arrays.Q[:n].copy(), "N": arrays.N[:n].copy(),
            "U": arrays.U.copy(), "C": arrays.C[:n].copy(), "S": arrays.S[:n].copy(),
        }


def decode(alphabet, codes):
    return "".join(alphabet.decode(int(x)) for x in codes)


def tracker_mismatches(rec: Recorder, m: int):
    """Differences between the recorded C/S values and oracle lci/lsi.

    Every iteration ``j`` of ``rec`` must be kept. For each slot the C/S
    computed while writing generation ``j`` are recomputed from the
    materialized segments of that generation, and generation ``j + 1`` must
    hold them at and after the insertion point.
    """
    problems = []
    checked = 0
    iterations = sorted(rec.arrays)
    for j in iterations:
        snap = rec.arrays[j]
        segs = rec.generations[j]
        for P, Q, n, C, S in zip(snap["P"], snap["Q"], snap["N"], snap["C"], snap["S"]):
            beta = int(snap["U"][n])
            if beta == 0:
                continue
            bseg, lseg = segs[Q]
            want_c = lci(bseg, lseg, beta, int(P)).next_lcp()
            want_s = lsi(bseg, lseg, beta, int(P)).next_lcp()
            checked += 1
            if (C, S) != (want_c, want_s):
                problems.append(f"iter {j} seq {n}: C,S={C},{S} expected {want_c},{want_s}")
        if j + 1 not in rec.arrays:
            continue
        nxt = rec.arrays[j + 1]
        prev = {int(n): (int(c), int(s)) for n, c, s in zip(snap["N"], snap["C"], snap["S"])}
        inserted = {(int(q), int(p)) for q, p in zip(nxt["Q"], nxt["P"])}
        for P, Q, n in zip(nxt["P"], nxt["Q"], nxt["N"]):
            P, Q, n = int(P), int(Q), int(n)
            lseg = rec.generations[j + 1][Q][1]
            c_prev, s_prev = prev[n]
            want = 0 if P == 1 else c_prev
            if lseg[P - 1] != want:
                problems.append(f"iter {j + 1} seq {n}: L at {P} is {lseg[P - 1]}, expected {want}")
            if P < len(lseg) and (Q, P + 1) not in inserted and lseg[P] != s_prev:
                problems.append(f"iter {j + 1} seq {n}: L at {P + 1} is {lseg[P]}, expected {s_prev}")
    return problems, checked
