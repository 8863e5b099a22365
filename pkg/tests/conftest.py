"""Shared helpers: collection builders, hypothesis strategies and oracles."""

import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from bwtmerge import oracle
from bwtmerge.core import CIRCULAR, PERMUTERM, collection_from_ranks, remap

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

TWO_DOCS = ("abcab", "aabcabc")
TRIE_T0 = ("aa", "ab", "aca", "bc")
TRIE_T1 = ("aac", "ab", "ba")


def pair(docs0, docs1):
    """Two collections over the union alphabet of their raw documents."""
    both = remap(list(docs0) + list(docs1))
    return both.split(len(docs0))


def linear_inputs(c0, c1):
    return (oracle.bwt_build(c0), oracle.lcp_build(c0),
            oracle.bwt_build(c1), oracle.lcp_build(c1))


def linear_union(c0, c1):
    u = collection_from_ranks(c0.docs + c1.docs, c0.sigma)
    return oracle.bwt_build(u), oracle.lcp_build(u)


def circular_union(docs0, docs1, sigma, mode=CIRCULAR):
    if mode == PERMUTERM:
        seen = set(docs0)
        docs = list(docs0) + [d for d in docs1 if d not in seen]
    else:
        docs, _ = oracle.dedup_union(docs0, docs1)
    return oracle.cbwt_build(docs, mode, sigma)


# ---------------------------------------------------------------------------
# strategies
# ---------------------------------------------------------------------------

def docs_strategy(sigma, min_docs=1, max_docs=4, max_len=6):
    return st.lists(st.lists(st.integers(1, sigma), min_size=1, max_size=max_len)
                    .map(tuple), min_size=min_docs, max_size=max_docs)


@st.composite
def linear_pairs(draw, max_sigma=4, max_docs=4, max_len=6):
    sigma = draw(st.integers(1, max_sigma))
    d0 = draw(docs_strategy(sigma, 1, max_docs, max_len))
    d1 = draw(docs_strategy(sigma, 1, max_docs, max_len))
    return collection_from_ranks(d0, sigma), collection_from_ranks(d1, sigma)


@st.composite
def circular_sets(draw, max_sigma=3, max_docs=3, max_len=5, cross=True):
    """Two valid circular collections, optionally sharing rotations."""
    sigma = draw(st.integers(2, max_sigma))
    pool = draw(docs_strategy(sigma, 1, 2 * max_docs, max_len))
    pool = [d for d in pool if oracle.is_primitive(d)]
    d0, d1 = [], []
    for d in pool:
        side = d0 if draw(st.booleans()) else d1
        if oracle.validate_circular(side + [d]) is None:
            side.append(d)
    if cross and d0 and draw(st.booleans()):
        src = draw(st.sampled_from(d0))
        shift = draw(st.integers(0, len(src) - 1))
        cand = oracle.rotation(src, shift)
        if oracle.validate_circular(d1 + [cand]) is None:
            d1.append(cand)
    if not d0 or not d1:
        d0, d1 = [(1, 2)], [(1, 1, 2)]
    return sigma, d0, d1


# ---------------------------------------------------------------------------
# seeded generators for the deterministic suites
# ---------------------------------------------------------------------------

def random_docs(rng: random.Random, sigma, ndocs, max_len, min_len=1):
    return [tuple(rng.randint(1, sigma) for _ in range(rng.randint(min_len, max_len)))
            for _ in range(ndocs)]


def random_primitive_docs(rng: random.Random, sigma, ndocs, max_len):
    docs = []
    while len(docs) < ndocs:
        d = tuple(rng.randint(1, sigma) for _ in range(rng.randint(1, max_len)))
        if oracle.is_primitive(d) and oracle.validate_circular(docs + [d]) is None:
            docs.append(d)
    return docs


@pytest.fixture
def rng():
    return random.Random(20261015)


# ---------------------------------------------------------------------------
# acceptance report
# ---------------------------------------------------------------------------

ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def record_acceptance(key: str, passed: bool, detail: str):
    ACCEPTANCE[key] = (passed, detail)
    print(f"criterion {key}: {'PASS' if passed else 'FAIL'} ({detail})")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(k.split()[0]), k)):
        passed, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if passed else 'FAIL'} ({detail})")
