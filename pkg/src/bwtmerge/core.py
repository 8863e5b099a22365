"""Alphabets, document collections, index value types and summary statistics.

Symbols are stored as small integer ranks. Rank 0 is reserved for the
terminator family: the per-document sentinels of a multi-string BWT, or the
``#`` symbol of tries and permuterm indices. Ordinary symbols occupy ranks
``1..sigma`` in byte order, so any remapping preserves lexicographic order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

TERMINATOR = 0
MAX_SIGMA = 255


class CollectionError(ValueError):
    """Raised for malformed input documents."""


@dataclass(frozen=True)
class Alphabet:
    """Order-preserving map between external bytes and ranks ``1..sigma``."""

    symbols: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= len(self.symbols) <= MAX_SIGMA:
            raise CollectionError(
                f"alphabet must hold 1..{MAX_SIGMA} symbols, got {len(self.symbols)}")
        if list(self.symbols) != sorted(set(self.symbols)):
            raise CollectionError("alphabet symbols must be distinct and sorted")

    @property
    def sigma(self) -> int:
        return len(self.symbols)

    @property
    def to_internal(self) -> dict[int, int]:
        return {b: r for r, b in enumerate(self.symbols, start=1)}

    @property
    def from_internal(self) -> tuple[int, ...]:
        # index 0 is the terminator slot and has no external byte
        return (-1,) + self.symbols

    def encode(self, raw: bytes) -> tuple[int, ...]:
        table = self.to_internal
        try:
            return tuple(table[b] for b in raw)
        except KeyError as exc:
            raise CollectionError(f"byte {exc.args[0]} not in alphabet") from None

    def decode(self, ranks: Iterable[int], terminator: bytes = b"#") -> bytes:
        out = bytearray()
        for r in ranks:
            if r == TERMINATOR:
                out += terminator
            else:
                out.append(self.symbols[r - 1])
        return bytes(out)

    def union(self, other: "Alphabet") -> "Alphabet":
        return Alphabet(tuple(sorted(set(self.symbols) | set(other.symbols))))

    @classmethod
    def of_size(cls, sigma: int) -> "Alphabet":
        """Alphabet ``a, b, c, ...`` (byte values from 97) of the given size."""
        start = 97 if sigma <= 26 else 1
        return cls(tuple(range(start, start + sigma)))


def _as_bytes(doc) -> bytes:
    if isinstance(doc, str):
        return doc.encode("utf-8")
    return bytes(doc)


@dataclass(frozen=True)
class StringCollection:
    """Documents over ranks ``1..sigma``; terminators are implicit."""

    docs: tuple[tuple[int, ...], ...]
    alphabet: Alphabet

    def __post_init__(self):
        sigma = self.alphabet.sigma
        for i, d in enumerate(self.docs):
            if not d:
                raise CollectionError(f"document {i} is empty")
            if min(d) < 1 or max(d) > sigma:
                raise CollectionError(f"document {i} has symbols outside 1..{sigma}")

    def __len__(self):
        return len(self.docs)

    @property
    def sigma(self) -> int:
        return self.alphabet.sigma

    @property
    def total_length(self) -> int:
        """Number of symbols including one terminator per document."""
        return sum(len(d) + 1 for d in self.docs)

    def raw(self) -> list[bytes]:
        return [self.alphabet.decode(d) for d in self.docs]

    def extended(self, other: "StringCollection") -> "StringCollection":
        """Concatenation of two collections over their common alphabet."""
        alpha = self.alphabet.union(other.alphabet)
        return remap(self.raw() + other.raw(), alphabet=alpha)

    def split(self, k: int) -> tuple["StringCollection", "StringCollection"]:
        return (StringCollection(self.docs[:k], self.alphabet),
                StringCollection(self.docs[k:], self.alphabet))


def remap(raw_docs: Sequence, alphabet: Alphabet | None = None) -> StringCollection:
    """Build a collection from raw byte (or str) documents.

    The alphabet defaults to the set of bytes present, ranked in byte order.
    """
    raws = [_as_bytes(d) for d in raw_docs]
    for i, r in enumerate(raws):
        if not r:
            raise CollectionError(f"document {i} is empty")
    if alphabet is None:
        present = sorted(set().union(*(set(r) for r in raws))) if raws else []
        if len(present) > MAX_SIGMA:
            raise CollectionError(
                f"{len(present)} distinct bytes exceed the {MAX_SIGMA}-symbol limit")
        if not present:
            raise CollectionError("empty collection")
        alphabet = Alphabet(tuple(present))
    return StringCollection(tuple(alphabet.encode(r) for r in raws), alphabet)


def collection_from_ranks(docs: Iterable[Sequence[int]], sigma: int) -> StringCollection:
    return StringCollection(tuple(tuple(d) for d in docs), Alphabet.of_size(sigma))


# ---------------------------------------------------------------------------
# index value types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LcpArray:
    """LCP values with the two ``-1`` guards: ``values[0]`` and ``values[n]``.

    ``values[i]`` for ``0 < i < n`` is the LCP between the contexts of rows
    ``i-1`` and ``i`` (0-based rows).
    """

    values: tuple[int, ...]

    def __post_init__(self):
        v = self.values
        if len(v) < 2 or v[0] != -1 or v[-1] != -1:
            raise ValueError("LCP array needs -1 guards at both ends")
        n = len(v) - 1
        for x in v[1:-1]:
            if x < 0 or x >= max(n, 1):
                raise ValueError(f"interior LCP value {x} out of range for n={n}")

    @property
    def n(self) -> int:
        return len(self.values) - 1

    @property
    def interior(self) -> tuple[int, ...]:
        return self.values[1:-1]

    @classmethod
    def from_interior(cls, interior: Iterable[int]) -> "LcpArray":
        return cls((-1, *interior, -1))


@dataclass(frozen=True)
class MultiBwt:
    """Multi-string BWT; rank 0 marks a sentinel.

    ``sentinel_ids[r]`` is the document ordinal of the ``r``-th sentinel in
    array order.
    """

    symbols: tuple[int, ...]
    sentinel_ids: tuple[int, ...]
    sigma: int
    alphabet: Alphabet | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        k = sum(1 for c in self.symbols if c == TERMINATOR)
        if k != len(self.sentinel_ids):
            raise ValueError(f"{k} sentinels but {len(self.sentinel_ids)} ids")
        if sorted(self.sentinel_ids) != list(range(k)):
            raise ValueError("sentinel ids must be a permutation of 0..k-1")
        if self.symbols and max(self.symbols) > self.sigma:
            raise ValueError("symbol rank exceeds sigma")

    @property
    def n(self) -> int:
        return len(self.symbols)

    @property
    def k(self) -> int:
        return len(self.sentinel_ids)

    def __len__(self):
        return len(self.symbols)


@dataclass(frozen=True)
class Xbwt:
    """XBWT of a trie: ``last`` closes each group of outgoing labels."""

    last: tuple[int, ...]
    labels: tuple[int, ...]
    sigma: int
    alphabet: Alphabet | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(self.last) != len(self.labels) or not self.last:
            raise ValueError("last/labels must be nonempty and of equal length")
        if self.last[-1] != 1:
            raise ValueError("final entry must close a group")
        prev = None
        for bit, c in zip(self.last, self.labels):
            if c < 0 or c > self.sigma:
                raise ValueError(f"label {c} outside 0..{self.sigma}")
            if prev is not None and c <= prev:
                raise ValueError("labels in a group must be strictly increasing")
            prev = None if bit else c
        if self.labels.count(TERMINATOR) != self.m + 1 - self.n:
            raise ValueError("number of # labels must equal m + 1 - n")

    @property
    def m(self) -> int:
        return len(self.labels)

    @property
    def n(self) -> int:
        return sum(self.last)

    def groups(self) -> list[tuple[int, ...]]:
        out, cur = [], []
        for bit, c in zip(self.last, self.labels):
            cur.append(c)
            if bit:
                out.append(tuple(cur))
                cur = []
        return out

    @classmethod
    def from_groups(cls, groups: Iterable[Sequence[int]], sigma: int,
                    alphabet: Alphabet | None = None) -> "Xbwt":
        last, labels = [], []
        for g in groups:
            labels.extend(g)
            last.extend([0] * (len(g) - 1) + [1])
        return cls(tuple(last), tuple(labels), sigma, alphabet)


CIRCULAR = "circular"
PERMUTERM = "permuterm"


@dataclass(frozen=True)
class LengthStructure:
    """Per-row document id plus per-document lengths."""

    doc_ids: tuple[int, ...]
    doc_lengths: tuple[int, ...]

    def __post_init__(self):
        if any(x <= 0 for x in self.doc_lengths):
            raise ValueError("document lengths must be positive")
        if sum(self.doc_lengths) != len(self.doc_ids):
            raise ValueError("document lengths must sum to n")

    def __getitem__(self, row: int) -> int:
        return self.doc_lengths[self.doc_ids[row]]

    def per_row(self) -> tuple[int, ...]:
        dl = self.doc_lengths
        return tuple(dl[d] for d in self.doc_ids)

    @classmethod
    def from_row_lengths(cls, doc_ids: Sequence[int], row_lengths: Sequence[int]):
        """Renumber documents in order of first appearance."""
        remap_ids: dict[int, int] = {}
        lengths: list[int] = []
        ids = []
        for d, ln in zip(doc_ids, row_lengths):
            if d not in remap_ids:
                remap_ids[d] = len(lengths)
                lengths.append(ln)
            ids.append(remap_ids[d])
        return cls(tuple(ids), tuple(lengths))


@dataclass(frozen=True)
class Cbwt:
    """Circular BWT; in permuterm mode every document holds one ``#``."""

    symbols: tuple[int, ...]
    sigma: int
    mode: str = CIRCULAR
    lengths: LengthStructure | None = field(default=None, compare=False)
    alphabet: Alphabet | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.mode not in (CIRCULAR, PERMUTERM):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == CIRCULAR and TERMINATOR in self.symbols:
            raise ValueError("circular mode cannot hold rank-0 symbols")
        if self.lengths is not None and len(self.lengths.doc_ids) != len(self.symbols):
            raise ValueError("length structure does not match cbwt length")

    @property
    def n(self) -> int:
        return len(self.symbols)

    def __len__(self):
        return len(self.symbols)


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IndexStats:
    """Summary statistics; averages are exact fractions."""

    max_lcp: int | None = None
    ave_lcp: Fraction | None = None
    hgt: int | None = None
    ave_hgt: Fraction | None = None
    max_clcp: int | None = None
    ave_clcp: Fraction | None = None

    def as_dict(self) -> dict:
        out = {}
        for name in ("max_lcp", "ave_lcp", "hgt", "ave_hgt", "max_clcp", "ave_clcp"):
            v = getattr(self, name)
            if v is None:
                continue
            if isinstance(v, Fraction):
                out[name] = float(v)
                out[name + "_exact"] = [v.numerator, v.denominator]
            else:
                out[name] = v
        return out


def stats_linear(lcp: LcpArray) -> IndexStats:
    inner = lcp.interior
    n = lcp.n
    return IndexStats(max_lcp=max(inner, default=0),
                      ave_lcp=Fraction(sum(inner), n) if n else Fraction(0))


def stats_trie(heights: Sequence[int]) -> IndexStats:
    """``heights`` lists the depth of every trie node, root included."""
    if not heights:
        raise ValueError("a trie has at least the root node")
    return IndexStats(hgt=max(heights), ave_hgt=Fraction(sum(heights), len(heights)))


def stats_circular(clcp: LcpArray) -> IndexStats:
    inner = clcp.interior
    n = clcp.n
    return IndexStats(max_clcp=max(inner, default=0),
                      ave_clcp=Fraction(sum(inner), n) if n else Fraction(0))


def rank_map(src: Alphabet, dst: Alphabet) -> list[int]:
    """``out[r]`` is the rank in ``dst`` of rank ``r`` of ``src`` (0 maps to 0)."""
    table = dst.to_internal
    try:
        return [0] + [table[b] for b in src.symbols]
    except KeyError as exc:
        raise CollectionError(f"byte {exc.args[0]} missing from target alphabet") from None


def rerank(index, dst: Alphabet):
    """Re-express an index over the larger alphabet ``dst``.

    The map is order preserving, so sorted structures stay sorted.
    """
    src = index.alphabet
    if src is None:
        raise CollectionError("index carries no alphabet table; cannot rerank")
    if src == dst:
        return index
    m = rank_map(src, dst)
    if isinstance(index, MultiBwt):
        return MultiBwt(tuple(m[c] for c in index.symbols), index.sentinel_ids, dst.sigma, dst)
    if isinstance(index, Xbwt):
        return Xbwt(index.last, tuple(m[c] for c in index.labels), dst.sigma, dst)
    if isinstance(index, Cbwt):
        return Cbwt(tuple(m[c] for c in index.symbols), dst.sigma, index.mode,
                    index.lengths, dst)
    raise TypeError(f"cannot rerank {type(index).__name__}")


def unify(a, b):
    """Bring two indices onto the union of their alphabets."""
    if a.alphabet is None or b.alphabet is None:
        if a.sigma != b.sigma:
            raise CollectionError("indices without alphabet tables must share sigma")
        return a, b
    u = a.alphabet.union(b.alphabet)
    return rerank(a, u), rerank(b, u)
