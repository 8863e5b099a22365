"""Build and merge BWT-based indices: multi-string BWT+LCP, XBWT tries and
circular / permuterm BWTs.

The merge engines (``merge_bwt``, ``merge_xbwt``, ``merge_circular``) work on
the value types of ``core``; ``oracle`` holds brute-force builders used as
ground truth and ``io`` the binary file formats.
"""

from .core import (CIRCULAR, PERMUTERM, TERMINATOR, Alphabet, Cbwt, CollectionError,
                   IndexStats, LcpArray, LengthStructure, MultiBwt, StringCollection,
                   Xbwt, collection_from_ranks, remap, stats_circular, stats_linear,
                   stats_trie)
from .merge_bwt import (MergeCorruption, MergeStats, gap_merge, gap_merge_bwt_only,
                        hm_iteration, hm_merge, hm_merge_lcp, interleave_apply,
                        reconstruct_lcp)
from .merge_circular import cbwt_gap_merge, cbwt_hm_merge, clcp_stats, permuterm_merge
from .merge_xbwt import fuse_groups, xbwt_gap_merge, xbwt_hm_iteration, xbwt_hm_merge

__version__ = "0.1.0"

__all__ = [
    "CIRCULAR", "PERMUTERM", "TERMINATOR", "Alphabet", "Cbwt", "CollectionError",
    "IndexStats", "LcpArray", "LengthStructure", "MergeCorruption", "MergeStats",
    "MultiBwt", "StringCollection", "Xbwt", "cbwt_gap_merge", "cbwt_hm_merge",
    "clcp_stats", "collection_from_ranks", "fuse_groups", "gap_merge",
    "gap_merge_bwt_only", "hm_iteration", "hm_merge", "hm_merge_lcp",
    "interleave_apply", "permuterm_merge", "reconstruct_lcp", "remap",
    "stats_circular", "stats_linear", "stats_trie", "xbwt_gap_merge",
    "xbwt_hm_iteration", "xbwt_hm_merge",
]
