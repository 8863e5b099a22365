"""
Circular BWTs and permuterm indices
===================================

A circular BWT sorts all rotations of each document by comparing their
infinite repetitions. Collections may overlap across inputs: a rotation
of a collection-0 document in collection 1 is a duplicate and is dropped.
"""

from bwtmerge import oracle
from bwtmerge.core import CIRCULAR, PERMUTERM, remap
from bwtmerge.merge_circular import (CircularGapEngine, cbwt_gap_merge, cbwt_hm_merge,
                                     permuterm_merge)

coll = remap(["aab", "abb", "bba", "ab"])
c0, c1 = coll.split(2)          # bba is a rotation of abb
cb0, cb1 = oracle.cbwt_build(c0), oracle.cbwt_build(c1)


def show(c):
    return c.alphabet.decode(c.symbols).decode()


print("cbwt0 =", show(cb0), " lengths", cb0.lengths.per_row())
print("cbwt1 =", show(cb1), " lengths", cb1.lengths.per_row())

# %%
# H&M stops when neither Z nor the boundary marks change. Rows of identical
# rotations stay adjacent with an unwritten boundary between them.
out, dups = cbwt_hm_merge(cb0, cb1)
print("merged =", show(out), " duplicate (row0, row1) pairs:", dups)

# %%
# The Gap engine needs the document lengths: a mixed pair of rows that still
# agrees after len0 + len1 - gcd symbols holds two identical rotations.
gap_out, lengths = cbwt_gap_merge(cb0, cb0.lengths, cb1, cb1.lengths)
assert gap_out == out
print("length01 =", lengths.per_row())
single = oracle.cbwt_build(remap(["aabab"]))
eng = CircularGapEngine(single, single, 7)
eng.run()
print("self-merge of aabab: pairs resolved at h =", sorted({h for h, _ in eng.events}))

# %%
# Permuterm indices append '#' to every document. Two identical rotations
# are recognised once both rows have consumed two '#' symbols.
p0 = oracle.cbwt_build(remap(["ab"]), PERMUTERM)
events = []
merged = permuterm_merge(p0, p0, events=events)
print("permuterm self-merge:", p0.alphabet.decode(merged.symbols).decode(),
      " resolved (h, row):", sorted(events))

# %%
# Cross-check against the oracle on the deduplicated union.
docs, dropped = oracle.dedup_union(c0.docs, c1.docs)
assert out == oracle.cbwt_build(docs, CIRCULAR, coll.sigma)
print("dropped collection-1 documents:", dropped)
