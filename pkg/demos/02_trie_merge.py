"""
Merging the XBWTs of two tries
==============================

The tries hold {aa, ab, aca, bc} and {aac, ab, ba}. Each XBWT row is an
internal node, sorted by the path read from the node up to the root. The
merge interleaves the rows; nodes reached by the same path in both tries
are fused into one row whose outgoing labels are the union.
"""

from bwtmerge import oracle
from bwtmerge.core import remap
from bwtmerge.merge_bwt import MergeStats
from bwtmerge.merge_xbwt import xbwt_gap_merge, xbwt_hm_merge

c0, c1 = remap(["aa", "ab", "aca", "bc", "aac", "ab", "ba"]).split(4)
x0, x1 = oracle.xbwt_of(c0), oracle.xbwt_of(c1)


def table(x):
    return " | ".join(x.alphabet.decode(g).decode() for g in x.groups())


print("T0 groups:", table(x0))
print("T1 groups:", table(x1))

# %%
# H&M on groups: Z starts as the two roots followed by the remaining
# entries of each trie. B2 == 0 at the end marks a pair of equal paths.
out, z, B2 = xbwt_hm_merge(x0, x1, return_state=True)
print("Z  =", "".join(map(str, z)))
fused = [i for i in range(1, len(z)) if B2[i] == 0]
print("fused entry pairs end at rows:", fused)
print("T01 groups:", table(out))

# %%
# The Gap variant skips entries whose path length is already known.
stats = MergeStats()
assert xbwt_gap_merge(x0, x1, stats=stats) == out
print("gap iterations:", stats.iterations, " active mass:", stats.active_mass)

# %%
# The merge agrees with a trie built from scratch on the union.
assert out == oracle.xbwt_of(remap(["aa", "ab", "aca", "bc", "aac", "ba"]))
