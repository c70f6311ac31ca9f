import random

import pytest

from gridfed.directory import OFC, OFT, FederationDirectory, Quote

from conftest import ARCHIVE_CLUSTERS


def archive_directory() -> FederationDirectory:
    directory = FederationDirectory()
    for rid, _, procs, mips, quote, _ in ARCHIVE_CLUSTERS:
        directory.subscribe(Quote(rid, quote, mips, procs))
    return directory


def test_subscribe_registers_all_eight():
    assert len(archive_directory()) == 8


def test_oft_rank1_is_fastest():
    d = archive_directory()
    top = d.query_kth(OFT, 1)
    assert top.resource_id == 5  # NASA iPSC, 930 MIPS
    assert top.mips == 930.0


def test_oft_rank2_is_second_fastest():
    d = archive_directory()
    assert d.query_kth(OFT, 2).mips == 920.0  # SDSC SP2


def test_ofc_rank1_is_cheapest():
    d = archive_directory()
    top = d.query_kth(OFC, 1)
    assert top.resource_id == 4  # LANL Origin, 3.59
    assert top.price == 3.59


def test_rank_exhausted_returns_none():
    d = archive_directory()
    assert d.query_kth(OFT, 9) is None


def test_resubscribe_replaces_quote():
    d = archive_directory()
    d.subscribe(Quote(4, 9.99, 630.0, 2048))
    assert d.query_kth(OFC, 1).resource_id != 4
    assert len(d) == 8


def test_unsubscribe_semantics():
    d = archive_directory()
    assert d.unsubscribe(5) is True
    assert d.unsubscribe(5) is False
    assert d.query_kth(OFT, 1).resource_id != 5
    for rid, *_ in ARCHIVE_CLUSTERS:
        d.unsubscribe(rid)
    assert d.query_kth(OFT, 1) is None


def test_min_processors_filter():
    d = archive_directory()
    # only CTC SP2, LANL CM5, LANL Origin and SDSC Blue have >= 512
    wide = [d.query_kth(OFT, k, min_processors=512) for k in range(1, 6)]
    assert [q.resource_id for q in wide if q is not None] == [1, 7, 3, 4]
    assert wide[-1] is None
    assert d.count_eligible(512) == 4
    assert all(q.processors >= 512 for q in wide if q is not None)


def test_enumeration_matches_naive_sort_oracle():
    rng = random.Random(23)
    for _ in range(50):
        d = FederationDirectory()
        quotes = []
        for rid in range(rng.randint(1, 20)):
            q = Quote(
                rid,
                price=round(rng.uniform(1, 10), 2),
                mips=float(rng.randint(100, 930)),
                processors=rng.choice([2, 8, 32, 128]),
            )
            quotes.append(q)
            d.subscribe(q)
        min_procs = rng.choice([1, 8, 32])
        eligible = [q for q in quotes if q.processors >= min_procs]
        by_speed = sorted(eligible, key=lambda q: (-q.mips, q.resource_id))
        by_price = sorted(eligible, key=lambda q: (q.price, q.resource_id))
        walked_oft = [d.query_kth(OFT, k, min_procs) for k in range(1, len(eligible) + 2)]
        walked_ofc = [d.query_kth(OFC, k, min_procs) for k in range(1, len(eligible) + 2)]
        assert walked_oft[:-1] == by_speed and walked_oft[-1] is None
        assert walked_ofc[:-1] == by_price and walked_ofc[-1] is None


def test_each_eligible_resource_enumerated_exactly_once():
    d = archive_directory()
    seen = [d.query_kth(OFT, k).resource_id for k in range(1, 9)]
    assert sorted(seen) == [1, 2, 3, 4, 5, 6, 7, 8]


def test_k_must_be_positive():
    with pytest.raises(ValueError):
        archive_directory().query_kth(OFT, 0)
