from functools import cmp_to_key

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from bwtmerge import oracle
from bwtmerge.core import CIRCULAR, PERMUTERM, Cbwt, remap
from bwtmerge.merge_bwt import MergeStats
from bwtmerge.merge_circular import (CircularGapEngine, PermutermInputError, cbwt_gap_merge, cbwt_hm_merge,
                                     clcp_stats, decode_docs, lengths_of, permuterm_merge)

from conftest import circular_sets, circular_union, pair


def cbwts(docs0, docs1, mode=CIRCULAR):
    c0, c1 = pair(docs0, docs1)
    return oracle.cbwt_build(c0, mode), oracle.cbwt_build(c1, mode)


def text(c):
    return c.alphabet.decode(c.symbols).decode()


def sorted_rotations(docs, mode=CIRCULAR):
    view = oracle.csa_build(docs, mode)
    return [view.rot(p) for p in view.csa]


def inf_leq(s, t, h):
    """Order of the i-th 0 (rotation s) and j-th 1 (rotation t) in Z^(h)."""
    a = [s[i % len(s)] for i in range(h)]
    b = [t[i % len(t)] for i in range(h)]
    return a <= b


class TestExamples:
    def test_full_duplication(self):
        c0, c1 = cbwts(["ab"], ["ba"])
        out, dups = cbwt_hm_merge(c0, c1)
        assert text(out) == "ba"
        assert dups == [(0, 0), (1, 1)]
        assert cbwt_gap_merge(c0, None, c1, None)[0] == out

    def test_aab_ab(self):
        c0, c1 = cbwts(["aab"], ["ab"])
        out, dups = cbwt_hm_merge(c0, c1)
        assert text(out) == "babaa" and dups == []
        out, lengths = cbwt_gap_merge(c0, c0.lengths, c1, c1.lengths)
        assert text(out) == "babaa"
        assert lengths.per_row() == (3, 3, 2, 3, 2)

    def test_same_singleton(self):
        c0, _ = cbwts(["abc"], ["a"])
        assert cbwt_hm_merge(c0, c0)[0] == c0
        assert cbwt_gap_merge(c0, None, c0, None)[0] == c0

    def test_duplicate_singleton_deadline(self):
        c0, _ = cbwts(["aabab"], ["a"])
        eng = CircularGapEngine(c0, c0, 7)
        eng.run()
        eng_events = eng.events
        # every rotation pairs with itself; gcd(5, 5) = 5 so the deadline is 5
        assert sorted(r for _, r in eng_events) == list(range(5))
        assert {h for h, _ in eng_events} == {5}

    def test_validation(self):
        bad = Cbwt((2, 2, 1, 1), 2)          # two LF cycles, both "ab"
        with pytest.raises(oracle.CircularInputError):
            cbwt_hm_merge(bad, bad)
        with pytest.raises(ValueError, match="mode mismatch"):
            cbwt_hm_merge(Cbwt((2, 1), 2), Cbwt((2, 0, 1), 2, PERMUTERM))

    def test_decode_docs(self):
        c0, _ = cbwts(["aab", "ab"], ["a"])
        ids, docs = decode_docs(c0.symbols)
        assert sorted(docs) == [(1, 1, 2), (1, 2)]
        assert lengths_of(Cbwt(c0.symbols, c0.sigma)).per_row() == (3, 3, 2, 3, 2)


class TestPermuterm:
    def test_equal_strings(self):
        c0, c1 = cbwts(["ab"], ["ab"], PERMUTERM)
        events = []
        out = permuterm_merge(c0, c1, events=events)
        assert out == c0
        rows = dict((r, h) for h, r in events)
        assert sorted(rows) == [0, 1, 2]
        # rows are #ab, ab#, b#a; the rotation ab# needs 2 * 3 iterations
        assert rows[1] == 6 and max(rows.values()) == 6

    def test_distinct_strings(self):
        c0, c1 = cbwts(["ab"], ["ba"], PERMUTERM)
        out = permuterm_merge(c0, c1)
        expected = oracle.cbwt_build(remap(["ab", "ba"]), PERMUTERM)
        assert out.symbols == expected.symbols

    def test_missing_terminator(self):
        c = Cbwt((2, 1), 2, CIRCULAR)
        with pytest.raises(PermutermInputError):
            permuterm_merge(c, c)
        two = Cbwt((1, 0, 0, 1), 1, PERMUTERM)     # decodes to a document #a#a
        with pytest.raises(PermutermInputError):
            permuterm_merge(two, two)

    @pytest.mark.property
    @given(circular_sets(cross=False))
    def test_m_counters(self, cs):
        sigma, d0, d1 = cs
        d1 = [d for d in d1 if d != d0[0]] + [d0[0]]
        c0 = oracle.cbwt_build(d0, PERMUTERM, sigma)
        c1 = oracle.cbwt_build(d1, PERMUTERM, sigma)
        history = {}

        def watch(h, z, m):
            k = [0, 0]
            for p, b in enumerate(z):
                key = (b, k[b])
                k[b] += 1
                assert m[p] <= 2
                assert m[p] >= history.get(key, 0)
                history[key] = m[p]

        permuterm_merge(c0, c1, tau=1, clamp_tau=False, observer=watch)
        assert 2 in history.values()


class TestEquivalence:
    @given(circular_sets(), st.sampled_from([1, 4, 16]))
    @settings(max_examples=80)
    def test_three_paths_and_oracle(self, cs, tau):
        sigma, d0, d1 = cs
        c0 = oracle.cbwt_build(d0, CIRCULAR, sigma)
        c1 = oracle.cbwt_build(d1, CIRCULAR, sigma)
        expected = circular_union(d0, d1, sigma)
        hm, _ = cbwt_hm_merge(c0, c1)
        gap, lengths = cbwt_gap_merge(c0, c0.lengths, c1, c1.lengths, tau, clamp_tau=False)
        assert hm == expected and gap == expected
        assert lengths == expected.lengths
        p0 = oracle.cbwt_build(d0, PERMUTERM, sigma)
        p1 = oracle.cbwt_build(d1, PERMUTERM, sigma)
        perm = permuterm_merge(p0, p1, tau, clamp_tau=False)
        assert perm == circular_union(d0, d1, sigma, PERMUTERM)

    @given(circular_sets())
    def test_dedup_report(self, cs):
        sigma, d0, d1 = cs
        c0 = oracle.cbwt_build(d0, CIRCULAR, sigma)
        c1 = oracle.cbwt_build(d1, CIRCULAR, sigma)
        r0, r1 = sorted_rotations(d0), sorted_rotations(d1)
        expected = [(i, j) for i, s in enumerate(r0) for j, t in enumerate(r1) if s == t]
        assert sorted(cbwt_hm_merge(c0, c1)[1]) == expected


class TestProperties:
    @pytest.mark.property
    @given(circular_sets(max_len=4))
    def test_property_per_iteration(self, cs):
        sigma, d0, d1 = cs
        assume(sum(map(len, d0 + d1)) <= 24)
        r0, r1 = sorted_rotations(d0), sorted_rotations(d1)
        c0 = oracle.cbwt_build(d0, CIRCULAR, sigma)
        c1 = oracle.cbwt_build(d1, CIRCULAR, sigma)

        def check(h, z, B2):
            pos = [[], []]
            for p, b in enumerate(z):
                pos[b].append(p)
            for i, p in enumerate(pos[0]):
                for j, q in enumerate(pos[1]):
                    assert (p < q) == inf_leq(r0[i], r1[j], h), (h, i, j)

        cbwt_hm_merge(c0, c1, observer=check)

    @given(circular_sets())
    def test_iteration_bound(self, cs):
        sigma, d0, d1 = cs
        # clcp over all rotations, duplicates included
        rots = sorted_rotations(d0) + sorted_rotations(d1)
        rots.sort(key=cmp_to_key(lambda a, b: oracle.inf_cmp(a, b)[0]))
        max_clcp = max(oracle.inf_cmp(a, b)[1] for a, b in zip(rots, rots[1:]))
        stats = MergeStats()
        cbwt_hm_merge(oracle.cbwt_build(d0, CIRCULAR, sigma),
                      oracle.cbwt_build(d1, CIRCULAR, sigma), stats=stats)
        assert stats.iterations <= max_clcp + 2


class TestClcpStats:
    def test_examples(self):
        assert clcp_stats(remap(["ab"])).max_clcp == 0
        lcp = oracle.clcp_build(remap(["aab", "ab"]))
        s = clcp_stats(remap(["aab", "ab"]))
        assert s.max_clcp == max(lcp.interior)
        assert s.ave_clcp * lcp.n == sum(lcp.interior)
