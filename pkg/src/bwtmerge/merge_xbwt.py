"""Merging the XBWTs of two tries.

Each entry of the merge vector ``Z`` stands for one internal node, i.e. one
group of outgoing labels. Entries 0 and 1 are the two roots (upward path
epsilon); they stay in place and fuse at the end. Processing an entry
consumes its whole label group; every ordinary label ``c`` sends a copy of
the entry's bit to the next free row among paths starting with ``c``.

After the fixpoint, a boundary that was never written separates two equal
upward paths, one from each trie, and their groups are fused by set union.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

from .core import TERMINATOR, Xbwt
from .merge_bwt import MergeCorruption, MergeStats, record_bytes, resolve_tau

log = logging.getLogger(__name__)


def _check_inputs(x0: Xbwt, x1: Xbwt) -> int:
    if x0.sigma != x1.sigma:
        raise ValueError(f"alphabet size mismatch: {x0.sigma} vs {x1.sigma}")
    return x0.sigma


def _initial_f(groups0, groups1, sigma: int) -> list[int]:
    counts = [0] * (sigma + 1)
    for groups in (groups0, groups1):
        for g in groups:
            for c in g:
                counts[c] += 1
    f = [0] * (sigma + 1)
    acc = 2                       # the two root entries
    for c in range(1, sigma + 1):
        f[c] = acc
        acc += counts[c]
    return f


def _initial_z(n0: int, n1: int) -> bytearray:
    return bytearray([0, 1]) + bytearray(n0 - 1) + bytearray(b"\x01" * (n1 - 1))


def xbwt_hm_iteration(z_prev, groups0, groups1, f0: list[int], B2=None,
                      h: int = 0) -> tuple[bytearray, int]:
    """One pass from ``Z^(h-1)`` to ``Z^(h)``; returns ``(Z^(h), writes)``.

    ``B2`` uses the two-bit parity scheme: state ``cur`` means written in this
    iteration, ``prev`` written in the previous one, 3 older.
    """
    n = len(z_prev)
    F = list(f0)
    srcs = (groups0, groups1)
    k = [0, 0]
    z = bytearray(n)
    z[0], z[1] = 0, 1
    block_id = [-1] * len(F)
    bid = 0
    writes = 0
    if B2 is not None:
        cur = 2 if h % 2 == 0 else 1
        prev = 3 - cur
    try:
        for pos in range(n):
            b = z_prev[pos]
            if B2 is not None:
                s = B2[pos]
                if s != 0 and s != cur:
                    bid = pos
                    if s == prev:
                        B2[pos] = 3
            group = srcs[b][k[b]]
            k[b] += 1
            for c in group:
                if c == TERMINATOR:
                    continue
                j = F[c]
                F[c] += 1
                z[j] = b
                if B2 is not None and block_id[c] != bid:
                    block_id[c] = bid
                    if B2[j] == 0:
                        B2[j] = cur
                        writes += 1
    except IndexError:
        raise MergeCorruption(f"group cursor overrun at iteration {h}") from None
    return z, writes


def fuse_groups(z, B2, x0: Xbwt, x1: Xbwt) -> Xbwt:
    """Copy groups in ``Z`` order, fusing pairs split by a zero boundary."""
    n = len(z)
    srcs = (x0.groups(), x1.groups())
    if len(srcs[0]) + len(srcs[1]) != n:
        raise ValueError("Z does not match the group counts")
    k = [0, 0]
    out = []
    i = 0
    while i < n:
        b = z[i]
        g = srcs[b][k[b]]
        k[b] += 1
        if i + 1 < n and B2[i + 1] == 0:
            if b != 0 or z[i + 1] != 1:
                raise MergeCorruption(f"fusion mark at {i + 1} joins entries {b},{z[i + 1]}")
            if i + 2 < n and B2[i + 2] == 0:
                raise MergeCorruption(f"three consecutive entries fused at {i}")
            g1 = srcs[1][k[1]]
            k[1] += 1
            g = tuple(sorted(set(g) | set(g1)))
            i += 1
        out.append(g)
        i += 1
    return Xbwt.from_groups(out, x0.sigma, x0.alphabet or x1.alphabet)


def xbwt_hm_merge(x0: Xbwt, x1: Xbwt, stats: MergeStats | None = None,
                  observer: Callable | None = None, return_state: bool = False):
    """Iterate until ``Z`` is stable and no boundary was written, then fuse."""
    sigma = _check_inputs(x0, x1)
    g0, g1 = x0.groups(), x1.groups()
    f0 = _initial_f(g0, g1, sigma)
    n = len(g0) + len(g1)
    z = _initial_z(len(g0), len(g1))
    B2 = bytearray(n + 1)
    B2[0] = B2[n] = 3
    h = 0
    while True:
        h += 1
        nz, writes = xbwt_hm_iteration(z, g0, g1, f0, B2, h)
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
    out = fuse_groups(z, B2, x0, x1)
    return (out, z, B2) if return_state else out


@dataclass
class _Record:
    start: int
    end: int
    r0: int
    r1: int
    occ: list[int]


def xbwt_gap_merge(x0: Xbwt, x1: Xbwt, tau: int | None = None, *,
                   clamp_tau: bool = True, stats: MergeStats | None = None,
                   observer: Callable | None = None, return_state: bool = False):
    """Gap merge of two XBWTs.

    ``C2`` tracks the upward-path length of each entry with the same parity
    trick as ``B2``: 0 unknown, ``cur`` set in this iteration, ``prev`` set in
    the previous one, 3 older. An entry in state ``prev`` hands ``cur`` to its
    children and becomes 3. Entries in state 3 have final rows and final
    children, so runs of them (at least ``tau`` long) are skipped.
    The merge ends after the iteration that assigns the last length.
    """
    sigma = _check_inputs(x0, x1)
    tau = resolve_tau(tau, sigma, clamp_tau)
    srcs = (x0.groups(), x1.groups())
    n0, n1 = len(srcs[0]), len(srcs[1])
    n = n0 + n1
    f0 = _initial_f(srcs[0], srcs[1], sigma)
    zp = _initial_z(n0, n1)
    zc = bytearray(zp)
    B2 = bytearray(n + 1)
    B2[0] = B2[n] = 3
    C2 = bytearray(n)
    C2[0] = C2[1] = 2              # roots have length 0, "set before h=1"
    unknown = n - 2
    records: list[_Record] = []
    st = MergeStats(tau=tau)
    h = 0

    while True:
        h += 1
        cur = 2 if h % 2 == 0 else 1
        prev = 3 - cur
        F = list(f0)
        block_id = [-1] * (sigma + 1)
        k = [0, 0]
        bid = 0
        ri, nrec = 0, len(records)
        new_records: list[_Record] = []
        run = None          # [start, end, r0, r1, occ, holds_record]
        pending: list[int] = []
        active = 0
        pos = 0

        def close(run):
            if run is None:
                return
            if run[5] or run[1] - run[0] >= tau:
                start, end, r0, r1, occ, _ = run
                new_records.append(_Record(start, end, r0, r1, occ))

        while pos < n:
            if ri < nrec and records[ri].start == pos:
                rec = records[ri]
                ri += 1
                k[0] += rec.r0
                k[1] += rec.r1
                for c in range(1, sigma + 1):
                    F[c] += rec.occ[c]
                if run is None:
                    run = [pos, pos, 0, 0, [0] * (sigma + 1), True]
                run[5] = True
                run[2] += rec.r0
                run[3] += rec.r1
                occ = run[4]
                for c, v in enumerate(rec.occ):
                    occ[c] += v
                pos = run[1] = rec.end
                bid = -1            # force a new block after a skip
                continue

            b = zp[pos]
            s = B2[pos]
            if bid < 0 or (s != 0 and s != cur):
                bid = pos
                if s == prev:
                    B2[pos] = 3
            state = C2[pos]
            ks = k[b]
            group = srcs[b][ks]
            k[b] = ks + 1
            parent_prev = state == prev
            for c in group:
                if c == TERMINATOR:
                    continue
                j = F[c]
                F[c] = j + 1
                zc[j] = b
                if block_id[c] != bid:
                    block_id[c] = bid
                    if B2[j] == 0:
                        B2[j] = cur
                if parent_prev:
                    if C2[j] == 0:
                        C2[j] = cur
                        unknown -= 1
                    pending.append(j)
            active += 1
            if parent_prev:
                C2[pos] = state = 3
            if state == 3:
                if run is None:
                    run = [pos, pos, 0, 0, [0] * (sigma + 1), False]
                run[1] = pos + 1
                run[2 + b] += 1
                occ = run[4]
                for c in group:
                    occ[c] += 1
            else:
                close(run)
                run = None
            pos += 1
        close(run)

        if k[0] != n0 or k[1] != n1:
            raise MergeCorruption(f"group accounting mismatch at iteration {h}")
        for j in pending:
            zp[j] = zc[j]
        records = new_records
        st.iterations = h
        st.active_mass.append(active)
        if len(records) > st.peak_records:
            st.peak_records = len(records)
            st.peak_record_bytes = len(records) * record_bytes(sigma)
        if observer is not None:
            observer(h, zc, B2)
        zp, zc = zc, zp
        # the root entries never move; keep both buffers pinned
        zc[0], zc[1] = 0, 1
        if unknown == 0:
            break
        if h > 2 * n + 4:
            raise MergeCorruption("xbwt gap merge failed to terminate")

    z = zp
    if stats is not None:
        stats.__dict__.update(st.__dict__)
    log.debug("xbwt gap merge: %d iterations", h)
    out = fuse_groups(z, B2, x0, x1)
    return (out, z, B2) if return_state else out
