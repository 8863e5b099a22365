"""Merging circular BWTs under the infinite-form order.

Three paths produce the same result:

``cbwt_hm_merge``
    H&M with two-bit boundaries; stops when neither ``Z`` nor ``B2`` changes.
``cbwt_gap_merge``
    Gap with monochrome blocks plus size-2 mixed blocks that become
    irrelevant once the iteration passes their Fine-Wilf deadline.
``permuterm_merge``
    Gap for ``#``-terminated documents; each entry also counts the ``#``
    symbols seen so far (saturating at 2), and a mixed pair that has seen two
    of them is a pair of identical rotations.

Identical rotations end up adjacent, collection 0 first, with an unwritten
boundary between them. The collection-1 member is dropped from the output.
"""

from __future__ import annotations

import logging
from collections import Counter
from functools import lru_cache
from math import gcd
from typing import Callable

from .core import CIRCULAR, PERMUTERM, TERMINATOR, Cbwt, IndexStats, LengthStructure, stats_circular
from .merge_bwt import MergeCorruption, MergeStats, record_bytes, resolve_tau
from . import oracle

log = logging.getLogger(__name__)


class PermutermInputError(ValueError):
    pass


# ---------------------------------------------------------------------------
# decoding
# ---------------------------------------------------------------------------

def lf_mapping(symbols) -> list[int]:
    """``LF[i]`` = row of the rotation that starts with ``symbols[i]``."""
    counts = Counter(symbols)
    start, acc = {}, 0
    for c in sorted(counts):
        start[c] = acc
        acc += counts[c]
    lf = []
    for c in symbols:
        lf.append(start[c])
        start[c] += 1
    return lf


def decode_docs(symbols) -> tuple[list[int], list[tuple[int, ...]]]:
    """Recover ``(row doc ids, documents)`` from the LF cycles.

    Documents are numbered in order of their first row and each is returned
    as the rotation that starts at that row.
    """
    n = len(symbols)
    lf = lf_mapping(symbols)
    doc_of = [-1] * n
    docs = []
    for i in range(n):
        if doc_of[i] >= 0:
            continue
        d = len(docs)
        rev = []
        j = i
        while doc_of[j] < 0:
            doc_of[j] = d
            rev.append(symbols[j])
            j = lf[j]
        if j != i:
            raise ValueError("symbols do not form a union of LF cycles")
        # rev lists row i's rotation back to front
        docs.append(tuple(reversed(rev)))
    return doc_of, docs


def lengths_of(cbwt: Cbwt) -> LengthStructure:
    """The stored length structure, or one rebuilt from the LF cycles."""
    if cbwt.lengths is not None:
        return cbwt.lengths
    ids, docs = decode_docs(cbwt.symbols)
    return LengthStructure(tuple(ids), tuple(len(d) for d in docs))


def validate_input(cbwt: Cbwt):
    """Decode the documents and check the mode's requirements."""
    _, docs = decode_docs(cbwt.symbols)
    if cbwt.mode == PERMUTERM:
        for d, doc in enumerate(docs):
            if doc.count(TERMINATOR) != 1:
                raise PermutermInputError(
                    f"document {d} holds {doc.count(TERMINATOR)} terminators, expected 1")
    else:
        bad = oracle.validate_circular(docs)
        if bad is not None:
            raise oracle.CircularInputError(bad)
    return docs


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

def _check_inputs(c0: Cbwt, c1: Cbwt) -> int:
    if c0.n == 0 or c1.n == 0:
        raise ValueError("cannot merge an empty cbwt")
    if c0.sigma != c1.sigma:
        raise ValueError(f"alphabet size mismatch: {c0.sigma} vs {c1.sigma}")
    if c0.mode != c1.mode:
        raise ValueError(f"mode mismatch: {c0.mode} vs {c1.mode}")
    return c0.sigma


def _initial_f(c0: Cbwt, c1: Cbwt, sigma: int) -> list[int]:
    counts = [0] * (sigma + 1)
    for sym in (c0.symbols, c1.symbols):
        for c, v in Counter(sym).items():
            counts[c] += v
    f, acc = [0] * (sigma + 1), 0
    for c in range(sigma + 1):
        f[c] = acc
        acc += counts[c]
    return f


def _duplicates(z, B2) -> list[int]:
    """Rows ``i`` whose boundary with ``i-1`` was never written across sources."""
    return [i for i in range(1, len(z)) if B2[i] == 0 and z[i - 1] == 0 and z[i] == 1]


def _assemble(z, dups, c0: Cbwt, c1: Cbwt, with_lengths: bool):
    """Interleave symbols (and lengths) dropping the rows listed in ``dups``."""
    drop = set(dups)
    srcs = (c0.symbols, c1.symbols)
    if with_lengths:
        l0, l1 = lengths_of(c0), lengths_of(c1)
        ids = (l0.doc_ids, tuple(len(l0.doc_lengths) + d for d in l1.doc_ids))
        lens = (l0.per_row(), l1.per_row())
    k = [0, 0]
    symbols, row_ids, row_lens = [], [], []
    for i, b in enumerate(z):
        r = k[b]
        k[b] += 1
        if i in drop:
            continue
        symbols.append(srcs[b][r])
        if with_lengths:
            row_ids.append(ids[b][r])
            row_lens.append(lens[b][r])
    lengths = LengthStructure.from_row_lengths(row_ids, row_lens) if with_lengths else None
    return Cbwt(tuple(symbols), c0.sigma, c0.mode, lengths, c0.alphabet or c1.alphabet)


def _dup_report(z, dups) -> list[tuple[int, int]]:
    """Map duplicate rows to ``(row in input 0, row in input 1)`` pairs."""
    drop = set(dups)
    k = [0, 0]
    out = []
    for i, b in enumerate(z):
        if i in drop:
            out.append((k[0] - 1, k[1]))
        k[b] += 1
    return out


# ---------------------------------------------------------------------------
# H&M
# ---------------------------------------------------------------------------

def cbwt_hm_iteration(z_prev, c0: Cbwt, c1: Cbwt, f0, B2, h: int):
    """One pass; returns ``(Z^(h), number of boundary writes)``."""
    n = len(z_prev)
    F = list(f0)
    srcs = (c0.symbols, c1.symbols)
    k = [0, 0]
    z = bytearray(n)
    block_id = [-1] * len(F)
    bid = 0
    writes = 0
    cur = 2 if h % 2 == 0 else 1
    prev = 3 - cur
    for pos in range(n):
        b = z_prev[pos]
        s = B2[pos]
        if s != 0 and s != cur:
            bid = pos
            if s == prev:
                B2[pos] = 3
        c = srcs[b][k[b]]
        k[b] += 1
        j = F[c]
        F[c] = j + 1
        z[j] = b
        if block_id[c] != bid:
            block_id[c] = bid
            if B2[j] == 0:
                B2[j] = cur
                writes += 1
    return z, writes


def cbwt_hm_merge(c0: Cbwt, c1: Cbwt, *, validate: bool = True,
                  stats: MergeStats | None = None, observer: Callable | None = None):
    """Returns ``(cbwt01, duplicates)``.

    ``duplicates`` lists ``(i, j)``: row ``i`` of ``c0`` and row ``j`` of ``c1``
    hold the same rotation; the ``c1`` row is left out of ``cbwt01``.
    """
    sigma = _check_inputs(c0, c1)
    if validate:
        validate_input(c0)
        validate_input(c1)
    f0 = _initial_f(c0, c1, sigma)
    n = c0.n + c1.n
    z = bytearray(c0.n) + bytearray(b"\x01" * c1.n)
    B2 = bytearray(n + 1)
    B2[0] = B2[n] = 3
    h = 0
    while True:
        h += 1
        nz, writes = cbwt_hm_iteration(z, c0, c1, f0, B2, h)
        if observer is not None:
            observer(h, nz, B2)
        if stats is not None:
            stats.active_mass.append(n)
        stable = nz == z
        z = nz
        if stable and not writes:
            break
    if stats is not None:
        stats.iterations = h
    dups = _duplicates(z, B2)
    with_lengths = c0.lengths is not None and c1.lengths is not None
    return _assemble(z, dups, c0, c1, with_lengths), _dup_report(z, dups)


# ---------------------------------------------------------------------------
# Gap
# ---------------------------------------------------------------------------

class _Record:
    __slots__ = ("start", "end", "r0", "r1", "occ")

    def __init__(self, start, end, r0, r1, occ):
        self.start, self.end, self.r0, self.r1, self.occ = start, end, r0, r1, occ


class CircularGapEngine:
    """Gap engine for circular (``mode=CIRCULAR``) and permuterm inputs.

    Circular: a size-2 mixed block whose rows agree on ``h-1`` symbols with
    ``h-1 >= len0 + len1 - gcd`` holds identical rotations. Permuterm: the
    same holds when both rows have counted two ``#`` symbols.
    Runs containing such resolved pairs are always recorded, whatever ``tau``.
    """

    def __init__(self, c0: Cbwt, c1: Cbwt, tau: int, observer: Callable | None = None):
        self.sigma = _check_inputs(c0, c1)
        self.c0, self.c1 = c0, c1
        self.mode = c0.mode
        self.n0, self.n1 = c0.n, c1.n
        self.n = n = c0.n + c1.n
        self.tau = tau
        self.observer = observer
        self.srcs = (c0.symbols, c1.symbols)
        self.f0 = _initial_f(c0, c1, self.sigma)
        self.z_prev = bytearray(c0.n) + bytearray(b"\x01" * c1.n)
        self.z_cur = bytearray(self.z_prev)
        self.B2 = bytearray(n + 1)
        self.B2[0] = self.B2[n] = 3
        if self.mode == PERMUTERM:
            self.m_prev = bytearray(n)
            self.m_cur = bytearray(n)
            self.lens = None
        else:
            self.lens = (lengths_of(c0).per_row(), lengths_of(c1).per_row())
        self.records: list[_Record] = []
        self.stats = MergeStats(tau=tau)
        self.events: list[tuple[int, int]] = []   # (h, row of input 0) per resolved pair
        self._seen: set[int] = set()
        self.h = 0

    @staticmethod
    @lru_cache(maxsize=4096)
    def deadline(a: int, b: int) -> int:
        return a + b - gcd(a, b)

    def _resolved(self, pos: int, k0: int, k1: int) -> bool:
        """Is the size-2 mixed block at ``pos`` a pair of identical rotations?"""
        if self.mode == PERMUTERM:
            return self.m_prev[pos] == 2 and self.m_prev[pos + 1] == 2
        return self.h - 1 >= self.deadline(self.lens[0][k0], self.lens[1][k1])

    def iterate(self) -> bool:
        self.h += 1
        h = self.h
        n, sigma = self.n, self.sigma
        zp, zc, B2 = self.z_prev, self.z_cur, self.B2
        perm = self.mode == PERMUTERM
        if perm:
            mp, mc = self.m_prev, self.m_cur
        srcs = self.srcs
        F = list(self.f0)
        block_id = [-1] * (sigma + 1)
        k = [0, 0]
        cur = 2 if h % 2 == 0 else 1
        prev = 3 - cur
        records, nrec, ri = self.records, len(self.records), 0
        new_records: list[_Record] = []
        run = None      # [start, end, r0, r1, occ, keep]
        pending: list[int] = []
        active = 0
        unfinished = False
        pos = 0
        tau = self.tau

        def close(run):
            if run is not None and (run[5] or run[1] - run[0] >= tau):
                new_records.append(_Record(run[0], run[1], run[2], run[3], run[4]))

        while pos < n:
            if ri < nrec and records[ri].start == pos:
                rec = records[ri]
                ri += 1
                k[0] += rec.r0
                k[1] += rec.r1
                occ = rec.occ
                for c in range(sigma + 1):
                    F[c] += occ[c]
                if run is None:
                    run = [pos, pos, 0, 0, [0] * (sigma + 1), True]
                run[5] = True
                run[2] += rec.r0
                run[3] += rec.r1
                acc = run[4]
                for c in range(sigma + 1):
                    acc[c] += occ[c]
                pos = run[1] = rec.end
                continue

            limit = records[ri].start if ri < nrec else n
            if B2[pos] == prev:
                B2[pos] = 3
            e = pos + 1
            while e < limit:
                v = B2[e]
                if v != 0 and v != cur:
                    break
                e += 1
            size = e - pos
            active += size
            mono = zp.find(1 - zp[pos], pos, e) < 0
            resolved = False
            if not mono and size == 2:
                resolved = self._resolved(pos, k[0], k[1])
                if resolved and pos not in self._seen:
                    self._seen.add(pos)
                    self.events.append((h - 1, k[0]))
            done = mono or resolved
            bid = pos
            ks = (k[0], k[1])
            for p in range(pos, e):
                b = zp[p]
                c = srcs[b][k[b]]
                k[b] += 1
                j = F[c]
                F[c] = j + 1
                if block_id[c] != bid:
                    block_id[c] = bid
                    if B2[j] == 0:
                        B2[j] = cur
                zc[j] = b
                if perm:
                    mv = mp[p] + (c == TERMINATOR)
                    mc[j] = mv if mv < 2 else 2
                if done:
                    pending.append(j)

            if done:
                if run is None:
                    run = [pos, pos, 0, 0, [0] * (sigma + 1), False]
                run[1] = e
                acc = run[4]
                for b in (0, 1):
                    run[2 + b] += k[b] - ks[b]
                    for c, v in Counter(srcs[b][ks[b]:k[b]]).items():
                        acc[c] += v
                if resolved:
                    run[5] = True
            else:
                unfinished = True
                close(run)
                run = None
            pos = e
        close(run)

        if k[0] != self.n0 or k[1] != self.n1:
            raise MergeCorruption(f"cursor accounting mismatch at iteration {h}")
        for j in pending:
            zp[j] = zc[j]
            if perm:
                mp[j] = mc[j]

        self.records = new_records
        st = self.stats
        st.iterations = h
        st.active_mass.append(active)
        if len(new_records) > st.peak_records:
            st.peak_records = len(new_records)
            st.peak_record_bytes = len(new_records) * record_bytes(sigma)
        if self.observer is not None:
            self.observer(h, zc, mc if perm else B2)
        self.z_prev, self.z_cur = zc, zp
        if perm:
            self.m_prev, self.m_cur = mc, mp
        return unfinished

    def run(self):
        while self.iterate():
            if self.h > 4 * self.n + 8:
                raise MergeCorruption("circular gap merge failed to terminate")
        z = self.z_prev
        if sum(z) != self.n1:
            raise MergeCorruption("final Z has the wrong number of ones")
        return z


def cbwt_gap_merge(c0: Cbwt, len0: LengthStructure | None, c1: Cbwt,
                   len1: LengthStructure | None, tau: int | None = None, *,
                   clamp_tau: bool = True, validate: bool = False,
                   stats: MergeStats | None = None, observer: Callable | None = None):
    """Gap merge of two circular BWTs; returns ``(cbwt01, length01)``.

    Missing length structures are rebuilt from the LF cycles.
    """
    sigma = _check_inputs(c0, c1)
    tau = resolve_tau(tau, sigma, clamp_tau)
    c0 = _with_lengths(c0, len0)
    c1 = _with_lengths(c1, len1)
    if validate:
        validate_input(c0)
        validate_input(c1)
    eng = CircularGapEngine(c0, c1, tau, observer)
    z = eng.run()
    if stats is not None:
        stats.__dict__.update(eng.stats.__dict__)
    out = _assemble(z, _duplicates(z, eng.B2), c0, c1, True)
    return out, out.lengths


def _with_lengths(c: Cbwt, lengths: LengthStructure | None) -> Cbwt:
    if lengths is None:
        lengths = lengths_of(c)
    if len(lengths.doc_ids) != c.n:
        raise ValueError("length structure does not match the cbwt")
    return Cbwt(c.symbols, c.sigma, c.mode, lengths, c.alphabet)


def permuterm_merge(c0: Cbwt, c1: Cbwt, tau: int | None = None, *,
                    clamp_tau: bool = True, validate: bool = True,
                    stats: MergeStats | None = None, observer: Callable | None = None,
                    events: list | None = None) -> Cbwt:
    """Merge two permuterm cbwts (every document ends with ``#``).

    ``events``, when given, receives ``(h, i)`` for each identical pair: the
    pair was first seen as resolved in ``Z^(h)`` and its collection-0 row is
    row ``i`` of ``c0``.
    """
    sigma = _check_inputs(c0, c1)
    if c0.mode != PERMUTERM:
        raise PermutermInputError("inputs must be in permuterm mode")
    tau = resolve_tau(tau, sigma, clamp_tau)
    if validate:
        validate_input(c0)
        validate_input(c1)
    for c in (c0, c1):
        if TERMINATOR not in c.symbols:
            raise PermutermInputError("input holds no terminator")
    eng = CircularGapEngine(c0, c1, tau, observer)
    z = eng.run()
    if stats is not None:
        stats.__dict__.update(eng.stats.__dict__)
    if events is not None:
        events.extend(eng.events)
    with_lengths = c0.lengths is not None and c1.lengths is not None
    return _assemble(z, _duplicates(z, eng.B2), c0, c1, with_lengths)


def clcp_stats(coll, mode: str = CIRCULAR) -> IndexStats:
    """maxcLcp and avecLcp of a validated collection, via the oracle."""
    return stats_circular(oracle.clcp_build(coll, mode))
