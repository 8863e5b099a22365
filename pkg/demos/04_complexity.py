"""
How much work does the Gap merge do?
====================================

On the family ``a^m b`` / ``a^m c`` the largest LCP is m, so the merge needs
about m iterations. Because finished blocks are skipped, the total number of
scanned positions follows the sum of the LCP values rather than n * maxLcp.
The second half sweeps the record threshold tau on a random corpus and
reports the peak space spent on skip records.
"""

import sys

from bwtmerge import bench

quick = "--quick" in sys.argv
ms = [16, 64, 256] if quick else [16, 64, 256, 1024, 4096]

print(f"{'m':>6}{'n':>8}{'iters':>7}{'active':>10}{'sum lcp':>10}{'ratio':>8}{'secs':>8}")
for m, row in zip(ms, bench.shared_prefix_rows(ms)):
    print(f"{m:>6}{row.n:>8}{row.iterations:>7}{row.active_mass:>10}{row.sum_lcp:>10}"
          f"{row.mass_ratio:>8.3f}{row.seconds:>8.3f}")

# %%
# Each record stores start, end, two row deltas, two sentinel deltas and
# sigma + 1 symbol counts. Small tau records many short runs; the index
# itself is counted as 6 bytes per row.
ndocs = 40 if quick else 200
for sigma in (4, 26):
    print(f"\nsigma={sigma}")
    for tau in (sigma + 2, 32, 64, 128):
        row = bench.random_rows(seed=1, sigmas=(sigma,), ndocs=ndocs, min_len=100,
                                max_len=200, tau=tau)[0]
        print(f"  tau={tau:>4}  peak records={row.peak_records:>6}"
              f"  block bytes / index bytes = {row.block_fraction:6.1%}")
