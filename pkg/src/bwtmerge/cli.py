"""Command-line driver: ``bwtmerge {build,merge,verify,stats,bench}``.

Index files are addressed by prefix: ``build corpus.txt --mode bwt-lcp -o idx``
writes ``idx.gbwt`` and ``idx.glcp``; ``merge idx0 idx1 --mode bwt-lcp -o out``
reads them back. ``merge`` also writes ``<output>.merge.json`` with the merge
counters, which ``stats`` picks up.

Set ``BWTMERGE_LOG`` (DEBUG, INFO, WARNING, ...) to control log verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import bench, io, oracle
from .core import (CIRCULAR, PERMUTERM, Alphabet, CollectionError, StringCollection,
                   stats_circular, stats_linear, stats_trie, unify)
from .merge_bwt import MergeStats, gap_merge, gap_merge_bwt_only, hm_merge
from .merge_circular import cbwt_gap_merge, decode_docs, permuterm_merge
from .merge_xbwt import xbwt_gap_merge

log = logging.getLogger("bwtmerge")

MODES = ("bwt", "bwt-lcp", "xbwt", "circular", "permuterm")
SUFFIXES = {"bwt": (".gbwt",), "bwt-lcp": (".gbwt", ".glcp"), "xbwt": (".gxbw",),
            "circular": (".gcbw",), "permuterm": (".gcbw",)}
DEFAULT_MAX_ORACLE_N = 1 << 20


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

CORPUS_EXTS = (".txt", ".fa", ".fasta", ".fna")


def _prefix(path: str) -> str:
    """Index prefix of an index file, a corpus file or a bare prefix."""
    base, ext = os.path.splitext(path)
    return base if ext in io.READERS or ext.lower() in CORPUS_EXTS else path


def load_corpus(path: str, fmt: str = "auto", alphabet: Alphabet | None = None):
    if fmt == "auto":
        fmt = "fasta" if Path(path).suffix.lower() in CORPUS_EXTS[1:] else "lines"
    reader = io.ingest_fasta if fmt == "fasta" else io.ingest_lines
    return reader(path, alphabet)


def _cap(coll: StringCollection, limit: int):
    if coll.total_length > limit:
        raise UsageError(f"corpus has {coll.total_length} symbols; the oracle builders "
                         f"are capped at {limit} (raise --max-oracle-n)")


def build_index(coll: StringCollection, mode: str) -> dict:
    """Oracle-build the index files of ``mode`` as ``{suffix: object}``."""
    if mode in ("bwt", "bwt-lcp"):
        view = oracle.sa_build(coll)
        out = {".gbwt": oracle.bwt_build(coll, view)}
        if mode == "bwt-lcp":
            out[".glcp"] = oracle.lcp_build(coll, view)
        return out
    if mode == "xbwt":
        return {".gxbw": oracle.xbwt_of(coll)}
    cmode = PERMUTERM if mode == "permuterm" else CIRCULAR
    return {".gcbw": oracle.cbwt_build(coll, cmode)}


def write_index(prefix: str, parts: dict):
    writers = {".gbwt": io.write_bwt, ".glcp": io.write_lcp,
               ".gxbw": io.write_xbwt, ".gcbw": io.write_cbwt}
    for suffix, obj in parts.items():
        writers[suffix](prefix + suffix, obj)


def read_index(prefix: str, mode: str) -> dict:
    parts = {}
    for suffix in SUFFIXES[mode]:
        path = prefix + suffix
        if not os.path.exists(path):
            raise UsageError(f"missing index file {path}")
        parts[suffix] = io.read_any(path)
    return parts


def merge_parts(a: dict, b: dict, mode: str, tau: int | None, emit_pairs: bool,
                stats: MergeStats):
    """Dispatch to the engine of ``mode``; returns ``(parts, pairs)``."""
    pairs = None
    if mode in ("bwt", "bwt-lcp"):
        b0, b1 = unify(a[".gbwt"], b[".gbwt"])
        if mode == "bwt-lcp":
            bwt01, lcp01 = gap_merge(b0, a[".glcp"], b1, b[".glcp"], tau, stats=stats)
            out = {".gbwt": bwt01, ".glcp": lcp01}
            if emit_pairs:
                _, pairs = gap_merge_bwt_only(b0, b1, tau, emit_pairs=True)
        else:
            bwt01, pairs = gap_merge_bwt_only(b0, b1, tau, emit_pairs, stats=stats)
            out = {".gbwt": bwt01}
        return out, pairs
    if emit_pairs:
        raise UsageError("--emit-pairs applies to the bwt and bwt-lcp modes only")
    if mode == "xbwt":
        x0, x1 = unify(a[".gxbw"], b[".gxbw"])
        return {".gxbw": xbwt_gap_merge(x0, x1, tau, stats=stats)}, None
    c0, c1 = unify(a[".gcbw"], b[".gcbw"])
    if mode == "permuterm":
        return {".gcbw": permuterm_merge(c0, c1, tau, stats=stats)}, None
    out, _ = cbwt_gap_merge(c0, c0.lengths, c1, c1.lengths, tau, validate=True, stats=stats)
    return {".gcbw": out}, None


def _emit(payload: dict, as_json: bool, out=None):
    out = out or sys.stdout
    if as_json:
        json.dump(payload, out, indent=2, sort_keys=True, default=_json_default)
        out.write("\n")
        return
    for key, value in payload.items():
        if isinstance(value, (list, dict)) and len(str(value)) > 80:
            value = json.dumps(value, default=_json_default)[:77] + "..."
        print(f"{key:>20}: {value}", file=out)


def _json_default(obj):
    if isinstance(obj, Fraction):
        return [obj.numerator, obj.denominator]
    raise TypeError(type(obj).__name__)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_build(args) -> int:
    coll = load_corpus(args.corpus, args.format)
    _cap(coll, args.max_oracle_n)
    parts = build_index(coll, args.mode)
    prefix = args.output or _prefix(args.corpus)
    write_index(prefix, parts)
    _emit({"documents": len(coll), "symbols": coll.total_length, "sigma": coll.sigma,
           "files": [prefix + s for s in parts]}, args.json)
    return 0


def cmd_merge(args) -> int:
    a = read_index(_prefix(args.index_a), args.mode)
    b = read_index(_prefix(args.index_b), args.mode)
    stats = MergeStats()
    parts, pairs = merge_parts(a, b, args.mode, args.tau, bool(args.emit_pairs), stats)
    write_index(args.output, parts)
    if args.emit_pairs:
        io.write_pairs(args.emit_pairs, pairs)
    report = {"mode": args.mode, **stats.as_dict(),
              "files": [args.output + s for s in parts]}
    Path(args.output + ".merge.json").write_text(json.dumps(report, indent=2) + "\n")
    _emit(report, args.json)
    return 0


def _union_oracle(c0: StringCollection, c1: StringCollection, mode: str) -> dict:
    if mode in ("circular", "permuterm"):
        cmode = PERMUTERM if mode == "permuterm" else CIRCULAR
        if cmode == PERMUTERM:
            seen = set(c0.docs)
            docs = list(c0.docs) + [d for d in c1.docs if d not in seen]
        else:
            docs, _ = oracle.dedup_union(c0.docs, c1.docs)
        return {".gcbw": oracle.cbwt_build(docs, cmode, c0.sigma, c0.alphabet)}
    return build_index(StringCollection(c0.docs + c1.docs, c0.alphabet), mode)


def cmd_verify(args) -> int:
    raw0 = load_corpus(args.corpus_a, args.format)
    raw1 = load_corpus(args.corpus_b, args.format)
    alpha = raw0.alphabet.union(raw1.alphabet)
    c0 = load_corpus(args.corpus_a, args.format, alpha)
    c1 = load_corpus(args.corpus_b, args.format, alpha)
    for c in (c0, c1):
        _cap(c, args.max_oracle_n)
    a, b = build_index(c0, args.mode), build_index(c1, args.mode)
    merged, _ = merge_parts(a, b, args.mode, args.tau, False, MergeStats())
    expected = _union_oracle(c0, c1, args.mode)
    dumps = {".gbwt": io.dumps_bwt, ".glcp": io.dumps_lcp,
             ".gxbw": io.dumps_xbwt, ".gcbw": io.dumps_cbwt}
    mismatched = [s for s in expected if dumps[s](merged[s]) != dumps[s](expected[s])]
    ok = not mismatched
    _emit({"mode": args.mode, "passed": ok, "mismatched": mismatched}, args.json)
    return 0 if ok else 1


def trie_heights(x) -> list[int]:
    """Height of every trie node, decoded from an XBWT.

    Row 0 is the root. The ordinary labels ``c`` are handed to the rows of
    upward paths starting with ``c`` in parent row order, which gives every
    row its parent; each ``#`` label is a leaf one level below its row.
    """
    groups = x.groups()
    counts = [0] * (x.sigma + 1)
    for g in groups:
        for c in g:
            counts[c] += 1
    nxt, acc = [0] * (x.sigma + 1), 1
    for c in range(1, x.sigma + 1):
        nxt[c] = acc
        acc += counts[c]
    parent = [-1] * len(groups)
    for i, g in enumerate(groups):
        for c in g:
            if c:
                parent[nxt[c]] = i
                nxt[c] += 1
    depth = [-1] * len(groups)
    depth[0] = 0
    heights = []
    for r, g in enumerate(groups):
        chain = []
        q = r
        while depth[q] < 0:
            chain.append(q)
            q = parent[q]
        for node in reversed(chain):
            depth[node] = depth[parent[node]] + 1
        heights.append(depth[r])
        heights.extend([depth[r] + 1] * g.count(0))
    return heights


def cmd_stats(args) -> int:
    path = args.target
    suffix = os.path.splitext(path)[1]
    report: dict = {}
    if suffix in io.READERS:
        obj = io.read_any(path)
        if suffix == ".glcp":
            report.update(stats_linear(obj).as_dict())
        elif suffix == ".gbwt":
            sibling = _prefix(path) + ".glcp"
            report.update(n=obj.n, k=obj.k, sigma=obj.sigma)
            if os.path.exists(sibling):
                report.update(stats_linear(io.read_lcp(sibling)).as_dict())
        elif suffix == ".gxbw":
            report.update(m=obj.m, n=obj.n, **stats_trie(trie_heights(obj)).as_dict())
        else:
            _, docs = decode_docs(obj.symbols)
            if obj.n > args.max_oracle_n:
                raise UsageError("cbwt too large for the oracle clcp computation")
            report.update(n=obj.n, documents=len(docs), mode=obj.mode,
                          **stats_circular(oracle.clcp_build(docs)).as_dict())
        merge_json = Path(_prefix(path) + ".merge.json")
        if merge_json.exists():
            last = json.loads(merge_json.read_text())
            report["last_merge"] = {k: last[k] for k in
                                    ("iterations", "total_active", "peak_records",
                                     "peak_record_bytes", "tau") if k in last}
    else:
        coll = load_corpus(path, args.format)
        _cap(coll, args.max_oracle_n)
        mode = args.mode or "bwt-lcp"
        report.update(documents=len(coll), symbols=coll.total_length, sigma=coll.sigma)
        if mode in ("bwt", "bwt-lcp"):
            report.update(stats_linear(oracle.lcp_build(coll)).as_dict())
        elif mode == "xbwt":
            report.update(stats_trie(oracle.trie_build(coll.docs).height).as_dict())
        else:
            cmode = PERMUTERM if mode == "permuterm" else CIRCULAR
            report.update(stats_circular(oracle.clcp_build(coll, cmode)).as_dict())
    _emit(report, args.json)
    return 0


def cmd_bench(args) -> int:
    if args.family == "shared-prefix":
        ms = [int(x) for x in args.m.split(",")]
        rows = bench.shared_prefix_rows(ms, args.tau)
    else:
        sigmas = tuple(int(x) for x in args.sigmas.split(","))
        rows = bench.random_rows(args.seed, sigmas, args.docs, args.min_len,
                                 args.max_len, args.tau)
    if args.json:
        _emit({"family": args.family, "rows": [r.as_dict() for r in rows]}, True)
        return 0
    print(f"{'case':<20}{'n':>8}{'tau':>5}{'iters':>7}{'maxLcp':>8}"
          f"{'mass/sumLcp':>13}{'blocks%':>9}{'secs':>9}")
    for r in rows:
        print(f"{r.label:<20}{r.n:>8}{r.tau:>5}{r.iterations:>7}{r.max_lcp:>8}"
              f"{r.mass_ratio:>13.3f}{100 * r.block_fraction:>9.2f}{r.seconds:>9.3f}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser):
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--max-oracle-n", type=int, default=DEFAULT_MAX_ORACLE_N,
                   help="refuse oracle builds above this many symbols")
    p.add_argument("--format", choices=("auto", "lines", "fasta"), default="auto",
                   help="corpus format")


def _tau(value: str) -> int:
    tau = int(value)
    if tau < 1:
        raise argparse.ArgumentTypeError("tau must be >= 1")
    return tau


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bwtmerge", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="oracle-build index files from a corpus")
    b.add_argument("corpus")
    b.add_argument("--mode", choices=MODES, default="bwt-lcp")
    b.add_argument("--output", "-o", help="output prefix (default: corpus name)")
    _common(b)

    m = sub.add_parser("merge", help="merge two indices")
    m.add_argument("index_a")
    m.add_argument("index_b")
    m.add_argument("--mode", choices=MODES, default="bwt-lcp")
    m.add_argument("--tau", type=_tau, default=None, help="min recorded block size")
    m.add_argument("--emit-pairs", metavar="PATH", help="write the (index, lcp) pair stream")
    m.add_argument("--output", "-o", required=True, help="output prefix")
    _common(m)

    v = sub.add_parser("verify", help="merge two corpora and compare with the oracle")
    v.add_argument("corpus_a")
    v.add_argument("corpus_b")
    v.add_argument("--mode", choices=MODES, default="bwt-lcp")
    v.add_argument("--tau", type=_tau, default=None)
    _common(v)

    s = sub.add_parser("stats", help="LCP / height statistics of an index or corpus")
    s.add_argument("target")
    s.add_argument("--mode", choices=MODES, default=None)
    _common(s)

    k = sub.add_parser("bench", help="synthetic merge benchmarks")
    k.add_argument("--family", choices=("shared-prefix", "random"), default="shared-prefix")
    k.add_argument("--m", default="16,32,64,128,256", help="prefix lengths (shared-prefix)")
    k.add_argument("--sigmas", default="2,4,8", help="alphabet sizes (random)")
    k.add_argument("--docs", type=int, default=200)
    k.add_argument("--min-len", type=int, default=50)
    k.add_argument("--max-len", type=int, default=100)
    k.add_argument("--tau", type=_tau, default=None)
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--json", action="store_true")
    return p


COMMANDS = {"build": cmd_build, "merge": cmd_merge, "verify": cmd_verify,
            "stats": cmd_stats, "bench": cmd_bench}


def main(argv=None) -> int:
    level = os.environ.get("BWTMERGE_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    args = make_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, CollectionError, io.IndexFormatError, OSError, ValueError) as exc:
        print(f"bwtmerge {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
