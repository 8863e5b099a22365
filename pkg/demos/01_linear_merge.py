"""
Merging two multi-string BWTs with their LCP arrays
===================================================

Two one-document collections, ``abcab`` and ``aabcabc``, are indexed
separately and then merged. We watch the merge bit vector ``Z`` converge,
then run the Gap engine and the two-bit variant that streams LCP pairs.
"""

from bwtmerge import oracle
from bwtmerge.core import remap
from bwtmerge.merge_bwt import (MergeStats, gap_merge, gap_merge_bwt_only, hm_merge_lcp,
                                reconstruct_lcp)

# Both collections share one alphabet so that ranks agree.
c0, c1 = remap(["abcab", "aabcabc"]).split(1)
bwt0, lcp0 = oracle.bwt_build(c0), oracle.lcp_build(c0)
bwt1, lcp1 = oracle.bwt_build(c1), oracle.lcp_build(c1)


def show(bwt):
    return bwt.alphabet.decode(bwt.symbols, b"$").decode()


print("bwt0 =", show(bwt0), " lcp0 =", lcp0.interior)
print("bwt1 =", show(bwt1), " lcp1 =", lcp1.interior)

# %%
# Plain H&M with LCP tracking. After iteration h the bit vector orders
# the rows by their first h context symbols; B[i] = h marks the iteration
# in which rows i-1 and i were first told apart.


def trace(h, z, B):
    print(f"h={h:2d}  Z={''.join(map(str, z))}  B={B[1:-1]}")


z, B, bwt01, lcp01 = hm_merge_lcp(bwt0, bwt1, observer=trace)
print("bwt01 =", show(bwt01))
print("lcp01 =", lcp01.interior)

# %%
# The Gap engine produces the same output but stops processing a block once
# it is monochrome. The active mass counts the positions actually scanned.
stats = MergeStats()
gbwt, glcp = gap_merge(bwt0, lcp0, bwt1, lcp1, stats=stats)
assert (gbwt, glcp) == (bwt01, lcp01)
print("gap iterations:", stats.iterations, " active mass per iteration:", stats.active_mass)

# %%
# Without input LCP arrays, the two-bit variant can still emit one
# (row, lcp) pair per boundary, enough to rebuild the LCP array afterwards.
bbwt, pairs = gap_merge_bwt_only(bwt0, bwt1, emit_pairs=True)
print("pairs:", pairs)
assert reconstruct_lcp(pairs, bbwt.n) == lcp01
