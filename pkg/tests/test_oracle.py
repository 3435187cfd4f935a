import pytest
from hypothesis import given
from hypothesis import strategies as st

from bwtlcp.errors import PositionOutOfRange
from bwtlcp.model import DNA, validate_collection
from bwtlcp.oracle import (
    build_gsa,
    common_prefix,
    gsa_to_bwt,
    gsa_to_lcp,
    lci,
    lsi,
    oracle_run,
    rank,
    select,
)

from conftest import ACGT, decode

PAIR_BWT = "CCGCGAA$ATCCAATCAAAGAA$ATGCC"
PAIR_LCP = [0, 0, 0, 2, 3, 2, 1, 2, 3, 2, 2, 1, 2, 0, 1, 1, 2, 2, 1, 1, 2, 0, 3, 1, 1, 0, 1, 1]

# iteration-12 segments 1 and 2 of the two-string example
B12_1 = [ACGT.encode(ch) for ch in "GCGAAATCCA"]
L12_1 = [0, 2, 3, 2, 1, 2, 2, 2, 1, 2]
B12_2 = [ACGT.encode(ch) for ch in "ATCAAAGA"]
L12_2 = [0, 1, 1, 2, 2, 1, 1, 2]
A, G = ACGT.encode("A"), ACGT.encode("G")


def pairs(gsa):
    return [tuple(e) for e in gsa]


def test_gsa_single():
    assert pairs(build_gsa(validate_collection(["A"], DNA))) == [(1, 0), (0, 0)]


def test_gsa_two_strings():
    c = validate_collection(["AA", "AC"], DNA)
    assert pairs(build_gsa(c)) == [(2, 0), (2, 1), (1, 0), (0, 0), (0, 1), (1, 1)]


def test_gsa_pair_segment_order(pair):
    gsa = build_gsa(pair)
    def text(e):
        return pair.strings[e.seq][e.pos:] + f"${e.seq}"
    assert [text(e) for e in gsa[2:5]] == ["AAAGCTC$1", "AAC$0", "AACAGAAAGCTC$1"]


def test_bwt_examples(pair):
    c = validate_collection(["A"], DNA)
    assert decode(DNA, gsa_to_bwt(c, build_gsa(c))) == "A$"
    c = validate_collection(["AA", "AC"], DNA)
    assert decode(DNA, gsa_to_bwt(c, build_gsa(c))) == "ACA$$A"
    bwt = decode(ACGT, gsa_to_bwt(pair, build_gsa(pair)))
    assert bwt == PAIR_BWT
    assert bwt[2:13] == "GCGAA$ATCCA"


def test_lcp_examples(pair):
    c = validate_collection(["A"], DNA)
    assert gsa_to_lcp(c, build_gsa(c)).tolist() == [0, 0]
    c = validate_collection(["AA", "AC"], DNA)
    assert gsa_to_lcp(c, build_gsa(c)).tolist() == [0, 0, 0, 1, 1, 0]
    lcp = oracle_run(pair).lcp.tolist()
    assert lcp == PAIR_LCP
    assert lcp[2:13] == [0, 2, 3, 2, 1, 2, 3, 2, 2, 1, 2]


def test_identical_strings_order_by_index():
    c = validate_collection(["CA", "CA"], DNA)
    assert pairs(build_gsa(c)) == [(2, 0), (2, 1), (1, 0), (1, 1), (0, 0), (0, 1)]
    assert oracle_run(c).lcp.tolist() == [0, 0, 0, 1, 0, 2]


def test_common_prefix():
    assert common_prefix(b"\x01\x02\x03", b"\x01\x02\x04") == 2
    assert common_prefix(b"\x01", b"\x01\x01") == 1
    assert common_prefix(b"", b"") == 0


def test_lci_pair():
    iv = lci(B12_2, L12_2, A, 4)
    assert (iv.start, iv.end, iv.minimum, iv.found) == (1, 4, 1, True)
    assert iv.next_lcp() == 2
    iv = lci(B12_1, L12_1, G, 3)
    assert (iv.start, iv.end, iv.minimum, iv.found) == (1, 3, 2, True)
    assert iv.next_lcp() == 3


def test_lsi_pair():
    iv = lsi(B12_2, L12_2, A, 4)
    assert (iv.start, iv.end, iv.minimum, iv.found) == (4, 5, 2, True)
    assert iv.next_lcp() == 3
    iv = lsi(B12_1, L12_1, G, 3)
    assert not iv.found
    assert iv.next_lcp() == 1


def test_degenerate_intervals():
    iv = lci(B12_2, L12_2, ACGT.encode("T"), 2)
    assert not iv.found and iv.minimum == L12_2[1]
    iv = lsi(B12_2, L12_2, A, len(B12_2))
    assert not iv.found and iv.minimum == L12_2[-1]


@pytest.mark.parametrize("r", [0, 9])
def test_position_out_of_range(r):
    with pytest.raises(PositionOutOfRange):
        lci(B12_2, L12_2, A, r)
    with pytest.raises(PositionOutOfRange):
        lsi(B12_2, L12_2, A, r)


segments = st.integers(1, 40).flatmap(
    lambda n: st.tuples(st.lists(st.integers(0, 3), min_size=n, max_size=n),
                        st.lists(st.integers(0, 9), min_size=n, max_size=n))
)


@given(segments, st.integers(0, 3), st.data())
def test_interval_endpoints_match_rank_select(seg, x, data):
    bseg, lseg = seg
    r = data.draw(st.integers(1, len(bseg)))
    k = rank(bseg, x, r)
    before = select(bseg, k - 1 if bseg[r - 1] == x else k, x)
    after = select(bseg, k + 1, x)
    iv = lci(bseg, lseg, x, r)
    if before is None:
        assert not iv.found
    else:
        assert (iv.start, iv.end) == (before, r)
        assert iv.minimum == min(lseg[before:r])
    iv = lsi(bseg, lseg, x, r)
    if after is None:
        assert not iv.found
    else:
        assert (iv.start, iv.end) == (r, after)
        assert iv.minimum == min(lseg[r:after])


raw_collections = st.lists(st.text(alphabet="ACGT", min_size=1, max_size=12),
                           min_size=1, max_size=8)


@given(raw_collections)
def test_first_m_zeros_and_recompare(raw):
    c = validate_collection(raw, ACGT)
    ref = oracle_run(c)
    assert len(ref.gsa) == len(ref.bwt) == len(ref.lcp) == c.N
    assert sorted(pairs(ref.gsa)) == sorted(
        (p, i) for i, s in enumerate(raw) for p in range(len(s) + 1))
    assert ref.lcp[: c.m].tolist() == [0] * c.m
    for j in range(1, c.N):
        (p1, s1), (p2, s2) = ref.gsa[j - 1], ref.gsa[j]
        a, b = raw[s1][p1:] + "$", raw[s2][p2:] + "$"
        n = int(ref.lcp[j])
        assert a[:n] == b[:n]
        assert a[n] != b[n] or a[n] == "$"
