"""Synthetic collections and a measured merge runner.

The shared-prefix family ``a^m b`` / ``a^m c`` has ``maxLcp = m`` and
``sum(lcp01)`` quadratic in ``m``, which makes the cost model of the Gap
engine visible: iterations grow like ``m`` and the processed mass like
``n * aveLcp``.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass

from . import oracle
from .core import StringCollection, collection_from_ranks, remap
from .merge_bwt import MergeStats, gap_merge, record_bytes


def shared_prefix_pair(m: int) -> tuple[StringCollection, StringCollection]:
    both = remap([b"a" * m + b"b", b"a" * m + b"c"])
    return both.split(1)


def random_collection(rng: random.Random, sigma: int, ndocs: int,
                      min_len: int = 1, max_len: int = 32) -> StringCollection:
    docs = [[rng.randint(1, sigma) for _ in range(rng.randint(min_len, max_len))]
            for _ in range(ndocs)]
    return collection_from_ranks(docs, sigma)


@dataclass
class BenchRow:
    label: str
    n: int
    tau: int
    iterations: int
    max_lcp: int
    sum_lcp: int
    active_mass: int
    peak_records: int
    peak_record_bytes: int
    seconds: float

    @property
    def mass_ratio(self) -> float:
        """Processed positions per unit of ``n * aveLcp``."""
        return self.active_mass / self.sum_lcp if self.sum_lcp else float("inf")

    @property
    def index_bytes(self) -> int:
        # n bytes of BWT, 4n of integer B, n of merge bits
        return 6 * self.n

    @property
    def block_fraction(self) -> float:
        return self.peak_record_bytes / self.index_bytes

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d.update(mass_ratio=self.mass_ratio, index_bytes=self.index_bytes,
                 block_fraction=self.block_fraction)
        return d


def run_linear(c0: StringCollection, c1: StringCollection, tau: int | None = None,
               label: str = "") -> BenchRow:
    """Build both inputs with the oracle, Gap-merge them and time the merge."""
    b0, b1 = oracle.bwt_build(c0), oracle.bwt_build(c1)
    l0, l1 = oracle.lcp_build(c0), oracle.lcp_build(c1)
    st = MergeStats()
    t = time.perf_counter()
    bwt01, lcp01 = gap_merge(b0, l0, b1, l1, tau, stats=st)
    dt = time.perf_counter() - t
    inner = lcp01.interior
    return BenchRow(label, bwt01.n, st.tau, st.iterations, max(inner, default=0),
                    sum(inner), st.total_active, st.peak_records,
                    st.peak_record_bytes, dt)


def shared_prefix_rows(ms, tau: int | None = None) -> list[BenchRow]:
    return [run_linear(*shared_prefix_pair(m), tau, label=f"m={m}") for m in ms]


def random_rows(seed: int, sigmas=(2, 4, 8), ndocs: int = 400, min_len: int = 100,
                max_len: int = 200, tau: int | None = None) -> list[BenchRow]:
    rng = random.Random(seed)
    rows = []
    for sigma in sigmas:
        coll = random_collection(rng, sigma, ndocs, min_len, max_len)
        c0, c1 = coll.split(ndocs // 2)
        rows.append(run_linear(c0, c1, tau, label=f"random sigma={sigma}"))
    return rows


__all__ = ["BenchRow", "random_collection", "random_rows", "record_bytes",
           "run_linear", "shared_prefix_pair", "shared_prefix_rows"]
