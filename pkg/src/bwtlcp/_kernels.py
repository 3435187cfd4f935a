"""Per-record loops of the two phases, compiled with numba when available.

The functions take plain numpy arrays and a small int64 ``state`` vector so
that a segment can be processed one buffered chunk at a time.
"""
import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - exercised only without numba
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

# open interval whose range is still empty
INF = np.int32(2**31 - 1)
CLOSED = -1

# phase-2 state vector layout
ST_SLOT = 0       # next slot to insert
ST_WRITTEN = 1    # records written to the output segment so far
ST_INPUT = 2      # records consumed from the current input chunk
ST_PENDING = 3    # successor lcp waiting for the record after an insertion
ST_HAS_PENDING = 4
STATE_SIZE = 5


@njit(cache=True)
def scan_positions(chunk, base, P, Q, slot, end, counts, prior):
    """Phase 1 over one chunk of ``B_{j-1}(v)``.

    ``counts`` accumulates per-symbol occurrences in the current segment and
    ``prior`` holds the totals of all earlier segments. Slots ``slot..end``
    (sorted by position) that fall inside the chunk get their new segment in
    ``Q`` and new position in ``P``. Returns the next unprocessed slot.
    """
    for idx in range(chunk.shape[0]):
        x = chunk[idx]
        counts[x] += 1
        pos = base + idx + 1
        while slot < end and P[slot] == pos:
            Q[slot] = x
            P[slot] = prior[x] + counts[x]
            slot += 1
    return slot


@njit(cache=True)
def merge_segment_chunk(
    in_b, in_l, in_g,
    out_b, out_l, out_g,
    P, N, U, C, S, wlen, j, end, track_gsa,
    state, min_lci, lsi_owner,
):
    """Phase 2 for one input chunk of segment ``z``.

    Interleaves records copied from the previous generation with the new
    symbols whose positions are ``P[state[ST_SLOT]:end]``, writing into the
    ``out_*`` buffers. While writing it keeps, per symbol, the running
    minimum of the lcp values since that symbol's last occurrence
    (``min_lci``) and the slot whose successor interval is still open
    (``lsi_owner``, running minimum kept in ``S[slot]``). Closed intervals
    overwrite ``C``/``S`` in place with the values for the next iteration.

    Stops when the output buffers are full or when the chunk is exhausted and
    no insertion is due. Returns the number of records produced.
    """
    cap = out_b.shape[0]
    n_in = in_b.shape[0]
    sigma1 = min_lci.shape[0]
    produced = 0
    slot = state[ST_SLOT]
    written = state[ST_WRITTEN]
    i = state[ST_INPUT]
    pending = state[ST_PENDING]
    has_pending = state[ST_HAS_PENDING]
    while produced < cap:
        inserting = slot < end and P[slot] == written + 1
        if inserting:
            seq = N[slot]
            x = U[seq]
            ell = 0 if P[slot] == 1 else C[slot]
            if track_gsa:
                out_g[produced, 0] = wlen[seq] - j
                out_g[produced, 1] = seq
            pending = S[slot]
            has_pending = 1
        elif i < n_in:
            x = in_b[i]
            ell = in_l[i]
            if has_pending:
                ell = pending
                has_pending = 0
            if track_gsa:
                out_g[produced, 0] = in_g[i, 0]
                out_g[produced, 1] = in_g[i, 1]
            i += 1
        else:
            break
        out_b[produced] = x
        out_l[produced] = ell
        produced += 1
        written += 1

        # every open interval now covers this position
        for a in range(sigma1):
            if min_lci[a] != CLOSED and ell < min_lci[a]:
                min_lci[a] = ell
            f = lsi_owner[a]
            if f != CLOSED and ell < S[f]:
                S[f] = ell
        # this occurrence closes the successor interval of x
        f = lsi_owner[x]
        if f != CLOSED:
            S[f] = S[f] + 1
            lsi_owner[x] = CLOSED
        if inserting:
            if x != 0:
                if min_lci[x] != CLOSED:
                    C[slot] = min_lci[x] + 1
                else:
                    C[slot] = 1
                S[slot] = INF
                lsi_owner[x] = slot
            slot += 1
        min_lci[x] = INF

    state[ST_SLOT] = slot
    state[ST_WRITTEN] = written
    state[ST_INPUT] = i
    state[ST_PENDING] = pending
    state[ST_HAS_PENDING] = has_pending
    return produced


@njit(cache=True)
def close_segment(S, min_lci, lsi_owner):
    """Successor intervals never closed end the segment with lcp 1."""
    for a in range(min_lci.shape[0]):
        f = lsi_owner[a]
        if f != CLOSED:
            S[f] = 1
        lsi_owner[a] = CLOSED
        min_lci[a] = CLOSED


@njit(cache=True)
def retire_and_check(P, Q, N, C, S, U, live):
    """Drop slots whose new segment is the marker, compacting in place.

    Also checks that the symbol found in the previous generation is the one
    that was inserted for that sequence. Returns the new live count, or
    ``-(slot + 1)`` for the first slot that disagrees.
    """
    out = 0
    for k in range(live):
        if Q[k] != U[N[k]]:
            return -(k + 1)
        if Q[k] == 0:
            continue
        P[out] = P[k]
        Q[out] = Q[k]
        N[out] = N[k]
        C[out] = C[k]
        S[out] = S[k]
        out += 1
    return out


@njit(cache=True)
def next_symbols(N, U, codes, offsets, wlen, j, live):
    """Symbol preceding each live j-suffix, or the marker for whole strings."""
    for k in range(live):
        i = N[k]
        p = wlen[i] - j - 1
        if p >= 0:
            U[i] = codes[offsets[i] + p]
        else:
            U[i] = 0


KEY_SHIFT = 48
KEY_MASK = (1 << KEY_SHIFT) - 1
SMALL = 16


@njit(cache=True)
def _less(K, N, a, b):
    return K[a] < K[b] or (K[a] == K[b] and N[a] < N[b])


@njit(cache=True)
def _swap(K, N, C, S, a, b):
    K[a], K[b] = K[b], K[a]
    N[a], N[b] = N[b], N[a]
    C[a], C[b] = C[b], C[a]
    S[a], S[b] = S[b], S[a]


@njit(cache=True)
def _insertion(K, N, C, S, lo, hi):
    for i in range(lo + 1, hi):
        k = i
        while k > lo and _less(K, N, k, k - 1):
            _swap(K, N, C, S, k, k - 1)
            k -= 1


@njit(cache=True)
def _sift(K, N, C, S, lo, root, n):
    while True:
        child = 2 * root + 1
        if child >= n:
            return
        if child + 1 < n and _less(K, N, lo + child, lo + child + 1):
            child += 1
        if not _less(K, N, lo + root, lo + child):
            return
        _swap(K, N, C, S, lo + root, lo + child)
        root = child


@njit(cache=True)
def _heapsort(K, N, C, S, lo, hi):
    n = hi - lo
    for start in range(n // 2 - 1, -1, -1):
        _sift(K, N, C, S, lo, start, n)
    for end in range(n - 1, 0, -1):
        _swap(K, N, C, S, lo, lo + end)
        _sift(K, N, C, S, lo, 0, end)


@njit(cache=True)
def _partition(K, N, C, S, lo, hi):
    mid = (lo + hi) // 2
    # median of three moved to lo
    if _less(K, N, mid, lo):
        _swap(K, N, C, S, mid, lo)
    if _less(K, N, hi - 1, lo):
        _swap(K, N, C, S, hi - 1, lo)
    if _less(K, N, hi - 1, mid):
        _swap(K, N, C, S, hi - 1, mid)
    _swap(K, N, C, S, lo, mid)
    i = lo + 1
    j = hi - 1
    while True:
        while i <= j and _less(K, N, i, lo):
            i += 1
        while i <= j and _less(K, N, lo, j):
            j -= 1
        if i >= j:
            break
        _swap(K, N, C, S, i, j)
        i += 1
        j -= 1
    _swap(K, N, C, S, lo, j)
    return j


@njit(cache=True)
def _introsort(K, N, C, S, n, depth_limit):
    # explicit stack: numba's on-disk cache does not support recursion
    stack = np.empty((128, 3), dtype=np.int64)
    top = 0
    lo, hi, depth = 0, n, depth_limit
    while True:
        while hi - lo > SMALL:
            if depth == 0:
                _heapsort(K, N, C, S, lo, hi)
                break
            depth -= 1
            p = _partition(K, N, C, S, lo, hi)
            # defer the larger side, keep working on the smaller one
            if p - lo < hi - p - 1:
                stack[top, 0], stack[top, 1], stack[top, 2] = p + 1, hi, depth
                hi = p
            else:
                stack[top, 0], stack[top, 1], stack[top, 2] = lo, p, depth
                lo = p + 1
            top += 1
        if hi - lo <= SMALL:
            _insertion(K, N, C, S, lo, hi)
        if top == 0:
            return
        top -= 1
        lo, hi, depth = stack[top, 0], stack[top, 1], stack[top, 2]


@njit(cache=True)
def sort_slots(P, Q, N, C, S, n):
    """In-place sort of the first ``n`` slots by (Q, P, N).

    Q is folded into the high bits of P for the duration of the sort, so no
    scratch arrays are needed. Positions must stay below 2**48.
    """
    ordered = True
    for k in range(n):
        P[k] = (np.int64(Q[k]) << KEY_SHIFT) | P[k]
        if ordered and k > 0 and _less(P, N, k, k - 1):
            ordered = False
    if not ordered:
        depth = 2
        size = n
        while size > 1:
            size >>= 1
            depth += 2
        _introsort(P, N, C, S, n, depth)
    for k in range(n):
        Q[k] = P[k] >> KEY_SHIFT
        P[k] = P[k] & KEY_MASK
