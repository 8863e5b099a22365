"""Brute-force constructions used as ground truth.

Everything here is deliberately naive (quadratic or worse) and written
straight from the definitions; the merge engines are checked against it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cmp_to_key
from math import gcd
from typing import Iterable, Sequence

from .core import (CIRCULAR, PERMUTERM, TERMINATOR, Cbwt, CollectionError,
                   LcpArray, LengthStructure, MultiBwt, StringCollection, Xbwt)


# ---------------------------------------------------------------------------
# linear suffixes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SuffixArrayView:
    """Suffix array over ``t_0 $_0 t_1 $_1 ...`` with 1-based positions."""

    sa: tuple[int, ...]
    doc_of: tuple[int, ...]      # 1-based position -> document (index 0 unused)
    start_of: tuple[int, ...]    # document -> 1-based start position
    text: tuple[int, ...]        # concatenation, sentinel of doc d encoded as d - k

    @property
    def n(self) -> int:
        return len(self.sa)

    def suffix(self, pos: int) -> tuple[int, ...]:
        """Suffix at 1-based ``pos`` up to and including its own sentinel."""
        d = self.doc_of[pos]
        end = self.start_of[d + 1] if d + 1 < len(self.start_of) else len(self.text)
        return self.text[pos - 1:end]


def _concat(coll: StringCollection):
    k = len(coll.docs)
    text: list[int] = []
    doc_of = [-1]
    starts = []
    for d, doc in enumerate(coll.docs):
        starts.append(len(text) + 1)
        text.extend(doc)
        # sentinels are negative, increasing with the document ordinal
        text.append(d - k)
        doc_of.extend([d] * (len(doc) + 1))
    return tuple(text), tuple(doc_of), tuple(starts)


def sa_build(coll: StringCollection) -> SuffixArrayView:
    if not coll.docs:
        raise CollectionError("empty collection")
    text, doc_of, starts = _concat(coll)
    view = SuffixArrayView((), doc_of, starts, text)
    order = sorted(range(1, len(text) + 1), key=view.suffix)
    return SuffixArrayView(tuple(order), doc_of, starts, text)


def bwt_build(coll: StringCollection, view: SuffixArrayView | None = None) -> MultiBwt:
    view = view or sa_build(coll)
    starts = set(view.start_of)
    symbols, ids = [], []
    for p in view.sa:
        if p in starts:
            symbols.append(TERMINATOR)
            ids.append(view.doc_of[p])
        else:
            symbols.append(view.text[p - 2])
    return MultiBwt(tuple(symbols), tuple(ids), coll.sigma, coll.alphabet)


def lcp_of(a: Sequence[int], b: Sequence[int]) -> int:
    """Longest common prefix length, by binary search over prefix equality."""
    n = min(len(a), len(b))
    if a[:n] == b[:n]:
        return n
    lo, hi = 0, n          # a[:lo] == b[:lo] and a[:hi] != b[:hi]
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if a[:mid] == b[:mid]:
            lo = mid
        else:
            hi = mid
    return lo


def lcp_build(coll: StringCollection, view: SuffixArrayView | None = None) -> LcpArray:
    view = view or sa_build(coll)
    sufs = [view.suffix(p) for p in view.sa]
    inner = [lcp_of(sufs[i - 1], sufs[i]) for i in range(1, len(sufs))]
    return LcpArray.from_interior(inner)


def contexts(coll: StringCollection) -> list[tuple[int, ...]]:
    """Context of every BWT row, in row order, with sentinels as ``d - k``."""
    view = sa_build(coll)
    return [view.suffix(p) for p in view.sa]


# ---------------------------------------------------------------------------
# tries
# ---------------------------------------------------------------------------

@dataclass
class TrieModel:
    """Explicit trie. Node 0 is the root; ``upward[v]`` reads v -> root."""

    parent: list[int]
    label: list[int]
    children: list[dict[int, int]]
    upward: list[tuple[int, ...]]
    height: list[int]

    @property
    def size(self) -> int:
        return len(self.parent)

    def internal_nodes(self) -> list[int]:
        return [v for v in range(self.size) if self.children[v]]


def trie_build(docs: Iterable[Sequence[int]]) -> TrieModel:
    """Trie of the documents, each extended with ``#`` (rank 0)."""
    t = TrieModel([-1], [-1], [{}], [()], [0])
    for doc in docs:
        v = 0
        for c in (*doc, TERMINATOR):
            nxt = t.children[v].get(c)
            if nxt is None:
                nxt = t.size
                t.children[v][c] = nxt
                t.parent.append(v)
                t.label.append(c)
                t.children.append({})
                t.upward.append((c,) + t.upward[v])
                t.height.append(t.height[v] + 1)
            v = nxt
    return t


def pi_strings(trie: TrieModel) -> list[tuple[int, ...]]:
    """Sorted upward paths of the internal nodes (the Pi array)."""
    return sorted(trie.upward[v] for v in trie.internal_nodes())


def xbwt_build(trie: TrieModel, sigma: int, alphabet=None) -> Xbwt:
    nodes = sorted(trie.internal_nodes(), key=lambda v: trie.upward[v])
    groups = [sorted(trie.children[v]) for v in nodes]
    return Xbwt.from_groups(groups, sigma, alphabet)


def xbwt_of(coll: StringCollection) -> Xbwt:
    return xbwt_build(trie_build(coll.docs), coll.sigma, coll.alphabet)


# ---------------------------------------------------------------------------
# circular order
# ---------------------------------------------------------------------------

def inf_cmp(t: Sequence[int], s: Sequence[int]) -> tuple[int, int]:
    """Compare ``t^inf`` with ``s^inf``.

    Returns ``(order, clcp)`` with ``order`` in ``{-1, 0, 1}``. When the
    infinite forms coincide ``clcp`` is the Fine-Wilf bound
    ``|t| + |s| - gcd(|t|, |s|)``.
    """
    if not t or not s:
        raise ValueError("inf_cmp needs nonempty strings")
    a, b = len(t), len(s)
    bound = a + b - gcd(a, b)
    for i in range(bound):
        x, y = t[i % a], s[i % b]
        if x != y:
            return (-1 if x < y else 1), i
    return 0, bound


def rotation(doc: Sequence[int], i: int) -> tuple[int, ...]:
    return tuple(doc[i:]) + tuple(doc[:i])


def _doc_bytes(doc: Sequence[int]) -> bytes:
    return bytes(doc)


def is_primitive(doc: Sequence[int]) -> bool:
    """A string is primitive iff it occurs in its square only at 0 and |t|."""
    b = _doc_bytes(doc)
    return (b + b).find(b, 1) == len(b)


def is_rotation_of(t: Sequence[int], s: Sequence[int]) -> bool:
    if len(t) != len(s):
        return False
    bt, bs = _doc_bytes(t), _doc_bytes(s)
    return (bs + bs).find(bt) >= 0


@dataclass(frozen=True)
class CircularViolation:
    kind: str            # "not-primitive" or "rotation-duplicate"
    docs: tuple[int, int]

    def __str__(self):
        i, j = self.docs
        if self.kind == "not-primitive":
            return f"document {i} is not primitive"
        return f"document {j} is a rotation of document {i}"


class CircularInputError(CollectionError):
    def __init__(self, violation: CircularViolation):
        super().__init__(str(violation))
        self.violation = violation


def validate_circular(coll: StringCollection | Sequence[Sequence[int]]):
    """Return the first violation, or ``None`` if the collection is valid."""
    docs = coll.docs if isinstance(coll, StringCollection) else list(coll)
    by_len: dict[int, list[int]] = {}
    for i, d in enumerate(docs):
        if not is_primitive(d):
            return CircularViolation("not-primitive", (i, i))
        for j in by_len.get(len(d), ()):
            if is_rotation_of(d, docs[j]):
                return CircularViolation("rotation-duplicate", (j, i))
        by_len.setdefault(len(d), []).append(i)
    return None


def dedup_union(docs0: Sequence[Sequence[int]], docs1: Sequence[Sequence[int]]):
    """Union of two circular collections, dropping collection-1 rotations of
    collection-0 documents. Returns ``(docs, dropped_indices_of_docs1)``."""
    kept, dropped = [tuple(d) for d in docs0], []
    for j, s in enumerate(docs1):
        if any(is_rotation_of(s, t) for t in docs0):
            dropped.append(j)
        else:
            kept.append(tuple(s))
    return kept, dropped


@dataclass(frozen=True)
class CircularSuffixArrayView:
    csa: tuple[int, ...]          # 1-based positions in the concatenation
    doc_of: tuple[int, ...]       # 1-based position -> document
    start_of: tuple[int, ...]
    docs: tuple[tuple[int, ...], ...]

    def rot(self, pos: int) -> tuple[int, ...]:
        d = self.doc_of[pos]
        return rotation(self.docs[d], pos - self.start_of[d])


def _circular_docs(coll, mode: str):
    docs = [tuple(d) for d in (coll.docs if isinstance(coll, StringCollection) else coll)]
    if mode == PERMUTERM:
        docs = [d + (TERMINATOR,) for d in docs]
    return docs


def csa_build(coll, mode: str = CIRCULAR) -> CircularSuffixArrayView:
    """Rotations of all documents sorted by the infinite-form order.

    In permuterm mode each document is extended with ``#`` first.
    """
    docs = _circular_docs(coll, mode)
    bad = validate_circular(docs)
    if bad is not None:
        raise CircularInputError(bad)
    doc_of, starts = [-1], []
    for d, doc in enumerate(docs):
        starts.append(len(doc_of))
        doc_of.extend([d] * len(doc))
    view = CircularSuffixArrayView((), tuple(doc_of), tuple(starts), tuple(docs))
    order = sorted(range(1, len(doc_of)),
                   key=cmp_to_key(lambda p, q: inf_cmp(view.rot(p), view.rot(q))[0]))
    return CircularSuffixArrayView(tuple(order), tuple(doc_of), tuple(starts), tuple(docs))


def cbwt_build(coll, mode: str = CIRCULAR, sigma: int | None = None,
               alphabet=None) -> Cbwt:
    if isinstance(coll, StringCollection):
        sigma = coll.sigma if sigma is None else sigma
        alphabet = alphabet or coll.alphabet
    if sigma is None:
        raise ValueError("sigma is required for raw documents")
    view = csa_build(coll, mode)
    symbols, ids, lens = [], [], []
    for p in view.csa:
        d = view.doc_of[p]
        doc = view.docs[d]
        off = p - view.start_of[d]
        symbols.append(doc[off - 1])   # off - 1 == -1 wraps to the last symbol
        ids.append(d)
        lens.append(len(doc))
    return Cbwt(tuple(symbols), sigma, mode,
                LengthStructure.from_row_lengths(ids, lens), alphabet)


def clcp_build(coll, mode: str = CIRCULAR) -> LcpArray:
    view = csa_build(coll, mode)
    rots = [view.rot(p) for p in view.csa]
    inner = [inf_cmp(rots[i - 1], rots[i])[1] for i in range(1, len(rots))]
    return LcpArray.from_interior(inner)
