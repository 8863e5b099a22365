import json
import subprocess
import sys

import pytest

from bwtmerge import io
from bwtmerge.cli import main, trie_heights
from bwtmerge import oracle
from bwtmerge.core import remap

from conftest import TWO_DOCS, TRIE_T0, TRIE_T1


@pytest.fixture
def corpora(tmp_path):
    def make(name, lines):
        p = tmp_path / name
        p.write_text("\n".join(lines) + "\n")
        return str(p)
    return make


def run_json(capsys, argv):
    capsys.readouterr()
    code = main(argv + ["--json"])
    return code, json.loads(capsys.readouterr().out)


def test_two_docs_merge(tmp_path, corpora, capsys):
    a, b = corpora("two_a.txt", TWO_DOCS[:1]), corpora("two_b.txt", TWO_DOCS[1:])
    for src in (a, b):
        assert main(["build", src, "--mode", "bwt-lcp"]) == 0
    out = str(tmp_path / "ab")
    pairs = str(tmp_path / "ab.pairs")
    code, report = run_json(capsys, ["merge", a, b, "--mode", "bwt-lcp", "-o", out,
                                     "--emit-pairs", pairs])
    assert code == 0 and report["iterations"] > 0
    bwt = io.read_bwt(out + ".gbwt")
    assert bwt.alphabet.decode(bwt.symbols, b"$") == b"bc$cc$aaaaabbb"
    expected = (0, 0, 1, 2, 3, 5, 0, 1, 2, 4, 0, 1, 3)
    assert io.read_lcp(out + ".glcp").interior == expected
    assert [v for _, v in io.read_pairs(pairs)] == list(expected)

    code, stats = run_json(capsys, ["stats", out + ".glcp"])
    assert stats["max_lcp"] == 5 and stats["ave_lcp_exact"] == [11, 7]
    assert stats["last_merge"]["iterations"] == report["iterations"]


@pytest.mark.parametrize("mode", ["bwt", "bwt-lcp", "xbwt", "circular", "permuterm"])
def test_verify_modes(corpora, capsys, mode):
    a = corpora("a.txt", ["ab", "aab", "acb"])
    b = corpora("b.txt", ["ba", "abc", "cab"] if mode != "circular" else ["abc", "bba"])
    code, report = run_json(capsys, ["verify", a, b, "--mode", mode, "--tau", "8"])
    assert code == 0 and report["passed"] is True


def test_verify_identical_corpora(corpora, capsys):
    a = corpora("a.txt", TRIE_T0)
    assert main(["verify", a, a, "--mode", "xbwt"]) == 0
    assert main(["verify", a, a, "--mode", "permuterm"]) == 0


@pytest.mark.parametrize("mode,suffix", [("xbwt", ".gxbw"), ("circular", ".gcbw"),
                                          ("permuterm", ".gcbw"), ("bwt", ".gbwt")])
def test_build_merge_round_trip(tmp_path, corpora, capsys, mode, suffix):
    a, b = corpora("a.txt", ["ab", "aab", "acb", "bc"]), corpora("b.txt", ["aacb", "bbc"])
    pa, pb = str(tmp_path / "A"), str(tmp_path / "B")
    assert main(["build", a, "--mode", mode, "-o", pa]) == 0
    assert main(["build", b, "--mode", mode, "-o", pb]) == 0
    assert main(["merge", pa, pb + suffix, "--mode", mode, "-o", str(tmp_path / "AB")]) == 0
    assert (tmp_path / ("AB" + suffix)).exists()
    assert json.loads((tmp_path / "AB.merge.json").read_text())["mode"] == mode
    code, stats = run_json(capsys, ["stats", str(tmp_path / ("AB" + suffix))])
    assert code == 0 and "last_merge" in stats


def test_trie_heights_match_oracle():
    coll = remap(list(TRIE_T0 + TRIE_T1))
    trie = oracle.trie_build(coll.docs)
    x = oracle.xbwt_build(trie, coll.sigma)
    assert sorted(trie_heights(x)) == sorted(trie.height)


def test_stats_corpus(corpora, capsys):
    a = corpora("a.txt", TRIE_T0)
    code, report = run_json(capsys, ["stats", a, "--mode", "xbwt"])
    assert report["hgt"] == 4 and report["ave_hgt_exact"] == [13, 6]


def test_errors(tmp_path, corpora, capsys):
    a = corpora("a.txt", ["ab"])
    b = corpora("b.txt", ["ba"])
    assert main(["verify", a, corpora("c.txt", ["ab", "ba"]), "--mode", "circular"]) == 2
    assert main(["build", a, "--max-oracle-n", "2"]) == 2
    assert main(["merge", str(tmp_path / "x"), str(tmp_path / "y"), "-o", "z"]) == 2
    main(["build", a, "--mode", "xbwt"])
    main(["build", b, "--mode", "xbwt"])
    assert main(["merge", a, b, "--mode", "xbwt", "--emit-pairs", "p",
                 "-o", str(tmp_path / "o")]) == 2
    assert "error" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["merge", a, b, "--tau", "0", "-o", "o"])


def test_bench_json(capsys):
    code, report = run_json(capsys, ["bench", "--m", "8,16"])
    rows = report["rows"]
    assert [r["iterations"] - r["max_lcp"] for r in rows] == [2, 2]


def test_module_entry_point(corpora):
    a = corpora("a.txt", ["abc"])
    proc = subprocess.run([sys.executable, "-m", "bwtmerge", "verify", a, a],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "passed" in proc.stdout
