"""Binary index files and corpus ingestion.

Every file starts with a 6-byte header: 4-byte magic, version byte, flags
byte. Flag bit 0 means an alphabet table (``sigma`` bytes, the external byte
of each rank ``1..sigma``) follows the counts. All integers are
little-endian. Rank 0 (sentinel or ``#``) is stored as byte 0.

========  ======  ==========================================================
suffix    magic   payload after the header
========  ======  ==========================================================
.gbwt     GBW1    n, sigma, k (u64); [alphabet]; n symbols; k x u32 ids
.glcp     GLC1    n (u64); width (u8); n-1 interior values of that width
.gxbw     GXB1    m, n, sigma (u64); [alphabet]; Last bits LSB-first; m labels
.gcbw     GCB1    n, k, sigma (u64); mode (u8); [alphabet]; n symbols;
                  k x u32 document lengths in first-row order
========  ======  ==========================================================

Guards of an LCP array are implicit, so a ``.glcp`` file stores the ``n-1``
interior values.
"""

from __future__ import annotations

import os
import struct
from pathlib import Path
from typing import Iterable

from .core import (CIRCULAR, PERMUTERM, Alphabet, Cbwt, CollectionError, LcpArray,
                   LengthStructure, MultiBwt, StringCollection, Xbwt, remap)

VERSION = 1
FLAG_ALPHABET = 1
MODES = {CIRCULAR: 0, PERMUTERM: 1}
MODE_NAMES = {v: k for k, v in MODES.items()}


class IndexFormatError(ValueError):
    """Bad magic, unsupported version or truncated payload."""


class _Reader:
    def __init__(self, data: bytes, what: str):
        self.data, self.pos, self.what = data, 0, what

    def take(self, size: int) -> bytes:
        if size < 0 or self.pos + size > len(self.data):
            raise IndexFormatError(f"{self.what}: truncated file")
        out = self.data[self.pos:self.pos + size]
        self.pos += size
        return out

    def u(self, fmt: str) -> int:
        return struct.unpack("<" + fmt, self.take(struct.calcsize(fmt)))[0]

    def u32s(self, count: int) -> tuple[int, ...]:
        return struct.unpack(f"<{count}I", self.take(4 * count))

    def end(self):
        if self.pos != len(self.data):
            raise IndexFormatError(f"{self.what}: {len(self.data) - self.pos} trailing bytes")


def _header(magic: bytes, flags: int = 0) -> bytes:
    return magic + bytes([VERSION, flags])


def _open(data: bytes, magic: bytes) -> tuple[_Reader, int]:
    r = _Reader(data, magic.decode())
    got = r.take(4)
    if got != magic:
        raise IndexFormatError(f"expected magic {magic!r}, found {got!r}")
    version = r.u("B")
    if version != VERSION:
        raise IndexFormatError(f"unsupported {magic.decode()} version {version}")
    return r, r.u("B")


def _alphabet_bytes(alphabet: Alphabet | None, sigma: int) -> tuple[int, bytes]:
    if alphabet is None:
        return 0, b""
    if alphabet.sigma != sigma:
        raise ValueError("alphabet size does not match sigma")
    return FLAG_ALPHABET, bytes(alphabet.symbols)


def _read_alphabet(r: _Reader, flags: int, sigma: int) -> Alphabet | None:
    if not flags & FLAG_ALPHABET:
        return None
    try:
        return Alphabet(tuple(r.take(sigma)))
    except CollectionError as exc:
        raise IndexFormatError(f"bad alphabet table: {exc}") from None


def _u32s(values: Iterable[int]) -> bytes:
    values = list(values)
    return struct.pack(f"<{len(values)}I", *values)


def _write(path, data: bytes):
    Path(path).write_bytes(data)


def _read(path) -> bytes:
    return Path(path).read_bytes()


# ---------------------------------------------------------------------------
# MultiBwt
# ---------------------------------------------------------------------------

def dumps_bwt(bwt: MultiBwt) -> bytes:
    flags, table = _alphabet_bytes(bwt.alphabet, bwt.sigma)
    return (_header(b"GBW1", flags) + struct.pack("<QQQ", bwt.n, bwt.sigma, bwt.k)
            + table + bytes(bwt.symbols) + _u32s(bwt.sentinel_ids))


def loads_bwt(data: bytes) -> MultiBwt:
    r, flags = _open(data, b"GBW1")
    n, sigma, k = r.u("Q"), r.u("Q"), r.u("Q")
    alphabet = _read_alphabet(r, flags, sigma)
    symbols = tuple(r.take(n))
    ids = r.u32s(k)
    r.end()
    try:
        return MultiBwt(symbols, ids, sigma, alphabet)
    except ValueError as exc:
        raise IndexFormatError(f"GBW1: {exc}") from None


def write_bwt(path, bwt: MultiBwt):
    _write(path, dumps_bwt(bwt))


def read_bwt(path) -> MultiBwt:
    return loads_bwt(_read(path))


# ---------------------------------------------------------------------------
# LcpArray
# ---------------------------------------------------------------------------

_WIDTH_FMT = {1: "B", 2: "H", 4: "I", 8: "Q"}


def lcp_width(max_value: int) -> int:
    """Smallest of 1, 2, 4, 8 bytes holding ``max_value``."""
    for w in (1, 2, 4, 8):
        if max_value < 1 << (8 * w):
            return w
    raise ValueError(f"LCP value {max_value} does not fit in 8 bytes")


def dumps_lcp(lcp: LcpArray) -> bytes:
    inner = lcp.interior
    w = lcp_width(max(inner, default=0))
    return (_header(b"GLC1") + struct.pack("<QB", lcp.n, w)
            + struct.pack(f"<{len(inner)}{_WIDTH_FMT[w]}", *inner))


def loads_lcp(data: bytes) -> LcpArray:
    r, _ = _open(data, b"GLC1")
    n, w = r.u("Q"), r.u("B")
    if w not in _WIDTH_FMT:
        raise IndexFormatError(f"GLC1: bad width {w}")
    count = max(n - 1, 0)
    inner = struct.unpack(f"<{count}{_WIDTH_FMT[w]}", r.take(w * count))
    r.end()
    try:
        return LcpArray.from_interior(inner)
    except ValueError as exc:
        raise IndexFormatError(f"GLC1: {exc}") from None


def write_lcp(path, lcp: LcpArray):
    _write(path, dumps_lcp(lcp))


def read_lcp(path) -> LcpArray:
    return loads_lcp(_read(path))


# ---------------------------------------------------------------------------
# Xbwt
# ---------------------------------------------------------------------------

def _pack_bits(bits) -> bytes:
    out = bytearray((len(bits) + 7) // 8)
    for i, bit in enumerate(bits):
        if bit:
            out[i >> 3] |= 1 << (i & 7)
    return bytes(out)


def _unpack_bits(data: bytes, m: int) -> tuple[int, ...]:
    return tuple((data[i >> 3] >> (i & 7)) & 1 for i in range(m))


def dumps_xbwt(x: Xbwt) -> bytes:
    flags, table = _alphabet_bytes(x.alphabet, x.sigma)
    return (_header(b"GXB1", flags) + struct.pack("<QQQ", x.m, x.n, x.sigma)
            + table + _pack_bits(x.last) + bytes(x.labels))


def loads_xbwt(data: bytes) -> Xbwt:
    r, flags = _open(data, b"GXB1")
    m, n, sigma = r.u("Q"), r.u("Q"), r.u("Q")
    alphabet = _read_alphabet(r, flags, sigma)
    last = _unpack_bits(r.take((m + 7) // 8), m)
    labels = tuple(r.take(m))
    r.end()
    try:
        x = Xbwt(last, labels, sigma, alphabet)
    except ValueError as exc:
        raise IndexFormatError(f"GXB1: {exc}") from None
    if x.n != n:
        raise IndexFormatError(f"GXB1: header says {n} groups, Last has {x.n}")
    return x


def write_xbwt(path, x: Xbwt):
    _write(path, dumps_xbwt(x))


def read_xbwt(path) -> Xbwt:
    return loads_xbwt(_read(path))


# ---------------------------------------------------------------------------
# Cbwt
# ---------------------------------------------------------------------------

def dumps_cbwt(c: Cbwt) -> bytes:
    from .merge_circular import lengths_of
    lengths = lengths_of(c)
    # renumber by first row so the reader's LF-cycle numbering matches
    lengths = LengthStructure.from_row_lengths(lengths.doc_ids, lengths.per_row())
    flags, table = _alphabet_bytes(c.alphabet, c.sigma)
    k = len(lengths.doc_lengths)
    return (_header(b"GCB1", flags) + struct.pack("<QQQB", c.n, k, c.sigma, MODES[c.mode])
            + table + bytes(c.symbols) + _u32s(lengths.doc_lengths))


def loads_cbwt(data: bytes) -> Cbwt:
    from .merge_circular import decode_docs
    r, flags = _open(data, b"GCB1")
    n, k, sigma, mode = r.u("Q"), r.u("Q"), r.u("Q"), r.u("B")
    if mode not in MODE_NAMES:
        raise IndexFormatError(f"GCB1: unknown mode {mode}")
    alphabet = _read_alphabet(r, flags, sigma)
    symbols = tuple(r.take(n))
    doc_lengths = r.u32s(k)
    r.end()
    try:
        ids, docs = decode_docs(symbols)
    except ValueError as exc:
        raise IndexFormatError(f"GCB1: {exc}") from None
    if tuple(len(d) for d in docs) != doc_lengths:
        raise IndexFormatError("GCB1: stored lengths disagree with the LF cycles")
    try:
        return Cbwt(symbols, sigma, MODE_NAMES[mode],
                    LengthStructure(tuple(ids), doc_lengths), alphabet)
    except ValueError as exc:
        raise IndexFormatError(f"GCB1: {exc}") from None


def write_cbwt(path, c: Cbwt):
    _write(path, dumps_cbwt(c))


def read_cbwt(path) -> Cbwt:
    return loads_cbwt(_read(path))


# ---------------------------------------------------------------------------
# LCP pair stream
# ---------------------------------------------------------------------------

_PAIR = struct.Struct("<QI")


def dumps_pairs(pairs: Iterable[tuple[int, int]]) -> bytes:
    return b"".join(_PAIR.pack(i, v) for i, v in pairs)


def loads_pairs(data: bytes) -> list[tuple[int, int]]:
    if len(data) % _PAIR.size:
        raise IndexFormatError("pair stream length is not a multiple of 12")
    return [p for p in _PAIR.iter_unpack(data)]


def write_pairs(path, pairs):
    _write(path, dumps_pairs(pairs))


def read_pairs(path) -> list[tuple[int, int]]:
    return loads_pairs(_read(path))


# ---------------------------------------------------------------------------
# dispatch by suffix
# ---------------------------------------------------------------------------

READERS = {".gbwt": read_bwt, ".glcp": read_lcp, ".gxbw": read_xbwt, ".gcbw": read_cbwt}


def read_any(path):
    suffix = os.path.splitext(str(path))[1]
    try:
        return READERS[suffix](path)
    except KeyError:
        raise IndexFormatError(f"unknown index suffix {suffix!r}") from None


# ---------------------------------------------------------------------------
# ingestion
# ---------------------------------------------------------------------------

def ingest_lines(path, alphabet: Alphabet | None = None) -> StringCollection:
    """One document per line; line terminators are stripped."""
    docs = []
    with open(path, "rb") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip(b"\r\n")
            if not line:
                raise CollectionError(f"{path}:{lineno}: empty document")
            docs.append(line)
    if not docs:
        raise CollectionError(f"{path}: no documents")
    return remap(docs, alphabet)


def ingest_fasta(path, alphabet: Alphabet | None = None) -> StringCollection:
    """One document per ``>`` record; sequence lines are concatenated."""
    docs, names = [], []
    cur: bytearray | None = None
    with open(path, "rb") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if line.startswith(b">"):
                if cur is not None:
                    docs.append(bytes(cur))
                names.append(line[1:].decode(errors="replace") or f"record@{lineno}")
                cur = bytearray()
            elif line:
                if cur is None:
                    raise CollectionError(f"{path}:{lineno}: sequence before any '>' header")
                cur += line
    if cur is not None:
        docs.append(bytes(cur))
    for name, d in zip(names, docs):
        if not d:
            raise CollectionError(f"{path}: record {name!r} is empty")
    if not docs:
        raise CollectionError(f"{path}: no records")
    return remap(docs, alphabet)
