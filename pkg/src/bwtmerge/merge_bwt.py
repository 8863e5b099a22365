"""Merging two multi-string BWTs, optionally computing the merged LCP array.

Three engines share the same merge vector ``Z``: a bit per output row telling
which input the row comes from.

``hm_merge``
    the plain H&M fixpoint iteration.
``hm_merge_lcp``
    H&M with the integer boundary array ``B``; ``lcp01 = B - 1``.
``gap_merge`` / ``gap_merge_bwt_only``
    the Gap engine, which skips irrelevant (monochrome) blocks by applying
    stored counter deltas. The BWT-only variant keeps two bits per boundary
    and can emit ``(index, lcp)`` pairs instead of an integer array.

Row and boundary indices are 0-based internally: ``B[i]`` is the boundary
between rows ``i-1`` and ``i``. Emitted pair indices are 1-based, so pair
index ``i`` describes ``LcpArray.values[i-1]``.
"""

from __future__ import annotations

import logging
import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .core import TERMINATOR, LcpArray, MultiBwt

log = logging.getLogger(__name__)

WORD_BYTES = 4


class MergeCorruption(RuntimeError):
    """An internal invariant (cursor accounting, bit counts) was violated."""


class MalformedPairStream(ValueError):
    pass


@dataclass
class MergeStats:
    """Counters collected while merging.

    ``active_mass[h-1]`` is the number of positions processed (not skipped)
    during iteration ``h``. Record storage is modelled as ``sigma + 7``
    32-bit words per irrelevant-block record.
    """

    iterations: int = 0
    active_mass: list[int] = field(default_factory=list)
    peak_records: int = 0
    peak_record_bytes: int = 0
    tau: int | None = None

    @property
    def total_active(self) -> int:
        return sum(self.active_mass)

    def as_dict(self) -> dict:
        return {"iterations": self.iterations,
                "active_mass": list(self.active_mass),
                "total_active": self.total_active,
                "peak_records": self.peak_records,
                "peak_record_bytes": self.peak_record_bytes,
                "tau": self.tau}


def record_bytes(sigma: int) -> int:
    # start, end, r0, r1, s0, s1 and one count per symbol including rank 0
    return WORD_BYTES * (sigma + 7)


def default_tau(sigma: int) -> int:
    return sigma + 2


def resolve_tau(tau: int | None, sigma: int, clamp: bool = True) -> int:
    """Apply the default and the ``sigma + 2`` floor.

    Skipping a record costs O(sigma) so shorter records never pay off; a
    smaller ``tau`` is raised with a warning unless ``clamp`` is false.
    """
    if tau is None:
        return default_tau(sigma)
    if tau < 1:
        raise ValueError(f"tau must be >= 1, got {tau}")
    if clamp and tau < default_tau(sigma):
        warnings.warn(f"tau={tau} below sigma+2={default_tau(sigma)}; clamped",
                      stacklevel=3)
        return default_tau(sigma)
    return tau


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

def _check_inputs(bwt0: MultiBwt, bwt1: MultiBwt) -> int:
    if bwt0.n == 0 or bwt1.n == 0:
        raise ValueError("cannot merge an empty BWT")
    if bwt0.sigma != bwt1.sigma:
        raise ValueError(f"alphabet size mismatch: {bwt0.sigma} vs {bwt1.sigma}")
    return bwt0.sigma


def _initial_f(bwt0: MultiBwt, bwt1: MultiBwt, sigma: int) -> list[int]:
    """``F[c]`` = first output row of contexts starting with ``c`` (0-based)."""
    counts = [0] * (sigma + 1)
    for sym in (bwt0.symbols, bwt1.symbols):
        for c, v in Counter(sym).items():
            counts[c] += v
    f = [0] * (sigma + 1)
    acc = counts[0]
    for c in range(1, sigma + 1):
        f[c] = acc
        acc += counts[c]
    return f


def _final_f(f0: list[int], bwt0: MultiBwt, bwt1: MultiBwt) -> list[int]:
    fend = list(f0)
    for sym in (bwt0.symbols, bwt1.symbols):
        for c, v in Counter(sym).items():
            if c != TERMINATOR:
                fend[c] += v
    return fend


def _initial_z(n0: int, n1: int) -> bytearray:
    return bytearray(n0) + bytearray(b"\x01" * n1)


def interleave_apply(z, bwt0: MultiBwt, bwt1: MultiBwt) -> MultiBwt:
    """Stable interleave: the i-th 0 takes ``bwt0[i]``, the j-th 1 ``bwt1[j]``."""
    ones = sum(z)
    if len(z) != bwt0.n + bwt1.n or ones != bwt1.n:
        raise ValueError("Z does not match the input sizes")
    srcs = (bwt0.symbols, bwt1.symbols)
    ids = (bwt0.sentinel_ids, tuple(bwt0.k + d for d in bwt1.sentinel_ids))
    k, s = [0, 0], [0, 0]
    symbols, sentinel_ids = [], []
    for b in z:
        c = srcs[b][k[b]]
        k[b] += 1
        symbols.append(c)
        if c == TERMINATOR:
            sentinel_ids.append(ids[b][s[b]])
            s[b] += 1
    sigma = max(bwt0.sigma, bwt1.sigma)
    return MultiBwt(tuple(symbols), tuple(sentinel_ids), sigma,
                    bwt0.alphabet or bwt1.alphabet)


# ---------------------------------------------------------------------------
# H&M
# ---------------------------------------------------------------------------

def hm_iteration(z_prev, bwt0: MultiBwt, bwt1: MultiBwt, B=None, h: int = 0,
                 f0: list[int] | None = None) -> bytearray:
    """One H&M pass from ``Z^(h-1)`` to ``Z^(h)``.

    With an integer array ``B`` the pass also records LCP boundaries: ``B[j]``
    is set to ``h`` when ``j`` receives the first symbol ``c`` of a block.
    """
    sigma = max(bwt0.sigma, bwt1.sigma)
    n = len(z_prev)
    F = list(f0) if f0 is not None else _initial_f(bwt0, bwt1, sigma)
    srcs = (bwt0.symbols, bwt1.symbols)
    ids = (bwt0.sentinel_ids, tuple(bwt0.k + d for d in bwt1.sentinel_ids))
    k, s = [0, 0], [0, 0]
    z = bytearray(n)
    block_id = [-1] * (sigma + 1)
    bid = 0
    try:
        for pos in range(n):
            b = z_prev[pos]
            if B is not None and B[pos] != 0 and B[pos] != h:
                bid = pos
            c = srcs[b][k[b]]
            k[b] += 1
            if c == TERMINATOR:
                j = ids[b][s[b]]
                s[b] += 1
                new = True
            else:
                j = F[c]
                F[c] += 1
                new = block_id[c] != bid
                block_id[c] = bid
            if B is not None and new and B[j] == 0:
                B[j] = h
            z[j] = b
    except IndexError:
        raise MergeCorruption(f"input cursor overrun at iteration {h}") from None
    return z


def hm_merge(bwt0: MultiBwt, bwt1: MultiBwt, stats: MergeStats | None = None,
             observer: Callable | None = None):
    """Iterate until ``Z^(h) == Z^(h-1)``; return ``(Z, bwt01)``."""
    sigma = _check_inputs(bwt0, bwt1)
    f0 = _initial_f(bwt0, bwt1, sigma)
    z = _initial_z(bwt0.n, bwt1.n)
    h = 0
    while True:
        h += 1
        nz = hm_iteration(z, bwt0, bwt1, f0=f0)
        if observer is not None:
            observer(h, nz, None)
        if stats is not None:
            stats.active_mass.append(len(nz))
        if nz == z:
            break
        z = nz
    if stats is not None:
        stats.iterations = h
    return z, interleave_apply(z, bwt0, bwt1)


def hm_merge_lcp(bwt0: MultiBwt, bwt1: MultiBwt, stats: MergeStats | None = None,
                 observer: Callable | None = None):
    """H&M with LCP computation; stops once every ``B`` entry is nonzero.

    Returns ``(Z, B, bwt01, lcp01)``.
    """
    sigma = _check_inputs(bwt0, bwt1)
    f0 = _initial_f(bwt0, bwt1, sigma)
    n = bwt0.n + bwt1.n
    z = _initial_z(bwt0.n, bwt1.n)
    B = [0] * (n + 1)
    B[0] = B[n] = 1
    zeros = n - 1
    h = 0
    while zeros:
        h += 1
        z = hm_iteration(z, bwt0, bwt1, B=B, h=h, f0=f0)
        zeros = B.count(0)
        if observer is not None:
            observer(h, z, B)
        if stats is not None:
            stats.active_mass.append(n)
    if stats is not None:
        stats.iterations = h
    lcp = LcpArray.from_interior(x - 1 for x in B[1:n])
    return z, B, interleave_apply(z, bwt0, bwt1), lcp


# ---------------------------------------------------------------------------
# Gap
# ---------------------------------------------------------------------------

MODE_LCP = "lcp"        # integer B, LCP completed from the input arrays
MODE_B2 = "b2"          # two-bit B, BWT only
MODE_PAIRS = "pairs"    # two-bit B, LCP emitted as (index, value) pairs


@dataclass
class _Record:
    """A skipped range ``[start, end)`` with the deltas it applies."""

    start: int
    end: int
    r0: int
    r1: int
    s0: int
    s1: int
    occ: list[int]


class _Run:
    """Consecutive irrelevant material waiting to become a record."""

    __slots__ = ("start", "end", "pieces", "records")

    def __init__(self, start: int):
        self.start = self.end = start
        self.pieces: list[tuple[int, int, int]] = []   # (source, kstart, kend)
        self.records: list[_Record] = []

    def to_record(self, srcs, sigma: int) -> _Record:
        r = [0, 0]
        s = [0, 0]
        occ = [0] * (sigma + 1)
        for rec in self.records:
            r[0] += rec.r0
            r[1] += rec.r1
            s[0] += rec.s0
            s[1] += rec.s1
            for c, v in enumerate(rec.occ):
                occ[c] += v
        for b, ks, ke in self.pieces:
            r[b] += ke - ks
            for c, v in Counter(srcs[b][ks:ke]).items():
                occ[c] += v
                if c == TERMINATOR:
                    s[b] += v
        return _Record(self.start, self.end, r[0], r[1], s[0], s[1], occ)


class GapEngine:
    """State of one Gap merge run.

    The engine walks positions with a single cursor. Recorded ranges are
    skipped in O(sigma); every other block is processed with the HMlcp body.
    After processing, an irrelevant block joins the current run; a run is
    stored as a record when it is closed and has length at least ``tau``.
    """

    def __init__(self, bwt0: MultiBwt, bwt1: MultiBwt, tau: int, mode: str,
                 observer: Callable | None = None):
        self.sigma = _check_inputs(bwt0, bwt1)
        self.bwt0, self.bwt1 = bwt0, bwt1
        self.n0, self.n1 = bwt0.n, bwt1.n
        self.n = self.n0 + self.n1
        self.tau = tau
        self.mode = mode
        self.observer = observer
        self.srcs = (bwt0.symbols, bwt1.symbols)
        self.ids = (bwt0.sentinel_ids, tuple(bwt0.k + d for d in bwt1.sentinel_ids))
        self.f0 = _initial_f(bwt0, bwt1, self.sigma)
        self.fend = _final_f(self.f0, bwt0, bwt1)
        self.z_prev = _initial_z(self.n0, self.n1)
        self.z_cur = bytearray(self.z_prev)
        n = self.n
        if mode == MODE_LCP:
            self.B = [0] * (n + 1)
            self.B[0] = self.B[n] = 1
        else:
            self.B = bytearray(n + 1)
            self.B[0] = self.B[n] = 3
        self.records: list[_Record] = []
        self.pairs: list[tuple[int, int]] | None = [] if mode == MODE_PAIRS else None
        self.stats = MergeStats(tau=tau)
        self.h = 0

    # -- one iteration -----------------------------------------------------
    def iterate(self) -> bool:
        """Run one iteration; return True if an unfinished block was seen."""
        self.h += 1
        h = self.h
        n, sigma = self.n, self.sigma
        zp, zc, B = self.z_prev, self.z_cur, self.B
        srcs, ids = self.srcs, self.ids
        sym0, sym1 = srcs
        F = list(self.f0)
        block_id = [-1] * (sigma + 1)
        k = [0, 0]
        sc = [0, 0]
        int_b = self.mode == MODE_LCP
        pairs = self.pairs
        if int_b:
            mark, stop = h, h
        else:
            mark = 2 if h % 2 == 0 else 1
            stop = mark
            prev = 3 - mark
        singletons_only = self.mode == MODE_PAIRS

        records = self.records
        nrec = len(records)
        ri = 0
        new_records: list[_Record] = []
        run: _Run | None = None
        pending: list[int] = []
        active = 0
        unfinished = False
        pos = 0

        def close(run):
            if run is not None and (run.records or run.end - run.start >= self.tau):
                new_records.append(run.to_record(srcs, sigma))

        while pos < n:
            if ri < nrec and records[ri].start == pos:
                rec = records[ri]
                ri += 1
                k[0] += rec.r0
                k[1] += rec.r1
                sc[0] += rec.s0
                sc[1] += rec.s1
                occ = rec.occ
                for c in range(1, sigma + 1):
                    F[c] += occ[c]
                if run is None:
                    run = _Run(pos)
                run.records.append(rec)
                pos = run.end = rec.end
                continue

            # block [pos, e): the next boundary, a record start or the end
            limit = records[ri].start if ri < nrec else n
            if not int_b and B[pos] == prev:
                B[pos] = 3
            e = pos + 1
            while e < limit:
                v = B[e]
                if v != 0 and v != stop:
                    break
                e += 1
            size = e - pos
            active += size
            first = zp[pos]
            mono = zp.find(1 - first, pos, e) < 0
            done = size == 1 if singletons_only else mono
            bid = pos

            if mono:
                b = first
                ks = k[b]
                syms = srcs[b]
                for i in range(ks, ks + size):
                    c = syms[i]
                    if c == TERMINATOR:
                        j = ids[b][sc[b]]
                        sc[b] += 1
                        fresh = True
                    else:
                        j = F[c]
                        F[c] = j + 1
                        fresh = block_id[c] != bid
                        block_id[c] = bid
                    if fresh and B[j] == 0:
                        B[j] = mark
                        if pairs is not None:
                            pairs.append((j + 1, h - 1))
                    zc[j] = b
                    if done:
                        pending.append(j)
                k[b] = ks + size
            else:
                for p in range(pos, e):
                    b = zp[p]
                    if b:
                        c = sym1[k[1]]
                        k[1] += 1
                    else:
                        c = sym0[k[0]]
                        k[0] += 1
                    if c == TERMINATOR:
                        j = ids[b][sc[b]]
                        sc[b] += 1
                        fresh = True
                    else:
                        j = F[c]
                        F[c] = j + 1
                        fresh = block_id[c] != bid
                        block_id[c] = bid
                    if fresh and B[j] == 0:
                        B[j] = mark
                        if pairs is not None:
                            pairs.append((j + 1, h - 1))
                    zc[j] = b
                    if done:
                        pending.append(j)

            if done:
                if run is None:
                    run = _Run(pos)
                run.pieces.append((first, k[first] - size, k[first]))
                run.end = e
            else:
                unfinished = True
                close(run)
                run = None
            pos = e
        close(run)

        if k[0] != self.n0 or k[1] != self.n1 or F != self.fend \
                or sc[0] != len(ids[0]) or sc[1] != len(ids[1]):
            raise MergeCorruption(f"cursor accounting mismatch at iteration {h}")

        # Destinations of blocks about to be skipped are final; copy them into
        # the buffer that the next iteration writes.
        for j in pending:
            zp[j] = zc[j]

        self.records = new_records
        st = self.stats
        st.iterations = h
        st.active_mass.append(active)
        if len(new_records) > st.peak_records:
            st.peak_records = len(new_records)
            st.peak_record_bytes = len(new_records) * record_bytes(sigma)
        if self.observer is not None:
            self.observer(h, zc, B)
        self.z_prev, self.z_cur = zc, zp
        return unfinished

    def run(self) -> bytearray:
        while self.iterate():
            pass
        z = self.z_prev     # buffers were swapped after the last iteration
        if sum(z) != self.n1:
            raise MergeCorruption("final Z has the wrong number of ones")
        log.debug("gap merge: %d iterations, active mass %d",
                  self.h, self.stats.total_active)
        return z

    # -- outputs -----------------------------------------------------------
    def final_lcp(self, z, lcp0: LcpArray, lcp1: LcpArray) -> LcpArray:
        """``B - 1`` where set, else the input LCP of the same-source row."""
        B = self.B
        vals = (lcp0.values, lcp1.values)
        k = [0, 0]
        inner = []
        for i, b in enumerate(z):
            if i:
                v = B[i]
                inner.append(v - 1 if v else vals[b][k[b]])
            k[b] += 1
        return LcpArray.from_interior(inner)


def _check_lcp(bwt: MultiBwt, lcp: LcpArray, which: str):
    if lcp.n != bwt.n:
        raise ValueError(f"lcp{which} has n={lcp.n}, bwt{which} has n={bwt.n}")


def gap_merge(bwt0: MultiBwt, lcp0: LcpArray, bwt1: MultiBwt, lcp1: LcpArray,
              tau: int | None = None, *, clamp_tau: bool = True,
              stats: MergeStats | None = None, observer: Callable | None = None):
    """Gap merge of two BWT+LCP pairs; returns ``(bwt01, lcp01)``."""
    _check_lcp(bwt0, lcp0, "0")
    _check_lcp(bwt1, lcp1, "1")
    tau = resolve_tau(tau, _check_inputs(bwt0, bwt1), clamp_tau)
    eng = GapEngine(bwt0, bwt1, tau, MODE_LCP, observer)
    z = eng.run()
    _copy_stats(eng.stats, stats)
    return interleave_apply(z, bwt0, bwt1), eng.final_lcp(z, lcp0, lcp1)


def gap_merge_bwt_only(bwt0: MultiBwt, bwt1: MultiBwt, tau: int | None = None,
                       emit_pairs: bool = False, *, clamp_tau: bool = True,
                       stats: MergeStats | None = None,
                       observer: Callable | None = None):
    """Two-bit Gap merge; returns ``(bwt01, pairs)``.

    ``pairs`` is None unless ``emit_pairs`` is set, in which case it lists
    ``(i, lcp)`` with 1-based ``i`` in ``2..n`` sorted by ``i``. Pair emission
    needs every boundary to be written, so only singleton blocks are treated
    as irrelevant in that mode.
    """
    tau = resolve_tau(tau, _check_inputs(bwt0, bwt1), clamp_tau)
    eng = GapEngine(bwt0, bwt1, tau, MODE_PAIRS if emit_pairs else MODE_B2, observer)
    z = eng.run()
    _copy_stats(eng.stats, stats)
    pairs = sorted(eng.pairs) if emit_pairs else None
    return interleave_apply(z, bwt0, bwt1), pairs


def _copy_stats(src: MergeStats, dst: MergeStats | None):
    if dst is not None:
        dst.__dict__.update(src.__dict__)


def reconstruct_lcp(pairs: Iterable[tuple[int, int]], n: int) -> LcpArray:
    """Rebuild an LCP array from ``(i, value)`` pairs, ``i`` 1-based in ``2..n``."""
    inner: list[int | None] = [None] * max(n - 1, 0)
    for i, v in pairs:
        if not 2 <= i <= n:
            raise MalformedPairStream(f"pair index {i} outside 2..{n}")
        if inner[i - 2] is not None:
            raise MalformedPairStream(f"duplicate pair for index {i}")
        inner[i - 2] = v
    missing = [i + 2 for i, v in enumerate(inner) if v is None]
    if missing:
        raise MalformedPairStream(f"missing pairs for indices {missing[:5]}")
    return LcpArray.from_interior(inner)
