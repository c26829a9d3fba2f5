import random

import pytest

from oracles import levenshtein, pairwise_edges
from helpers import random_lexicon
from phononet.exceptions import DuplicateInsert, MissingRemove
from phononet.wordspace import (NeighborIndex, build_index, deletion_variants,
                                edit_distance, layer_profile)

K, AE, T, B, S, I = range(6)
KAT, BAT, AT, KATS, SIT = bytes([K, AE, T]), bytes([B, AE, T]), bytes([AE, T]), \
    bytes([K, AE, T, S]), bytes([S, I, T])


@pytest.mark.parametrize("u,v,d", [(KAT, KAT, 0), (KAT, BAT, 1), (AT, KATS, 2),
                                   (b"", KAT, 3), (KAT, b"", 3)])
def test_edit_distance_examples(u, v, d):
    assert edit_distance(u, v) == d


def test_edit_distance_matches_recursive_definition():
    rnd = random.Random(1)
    for _ in range(300):
        u = bytes(rnd.randrange(3) for _ in range(rnd.randint(0, 6)))
        v = bytes(rnd.randrange(3) for _ in range(rnd.randint(0, 6)))
        assert edit_distance(u, v) == levenshtein(u, v)


def test_toy_edges():
    idx = build_index([AT, KAT, BAT, KATS])
    assert idx.edges() == {(0, 1), (0, 2), (1, 2), (1, 3)}


def test_single_word_has_no_edges():
    assert build_index([KAT]).n_edges() == 0


def test_prospective_query():
    idx = build_index([BAT, KATS, SIT])
    assert idx.neighbors(KAT) == {0, 1}
    assert KAT not in idx


def test_query_on_empty_index():
    assert NeighborIndex().neighbors(KAT) == set()


def test_query_excludes_self():
    idx = build_index([KAT, BAT])
    assert idx.neighbors(KAT) == {1}


def test_insert_reports_affected():
    idx = build_index([KAT])
    assert idx.insert(BAT, 1) == {0}
    assert idx.degree(0) == 1


def test_remove_reinsert_restores_state():
    idx = build_index([AT, KAT, BAT, KATS])
    before = idx.state()
    nb = idx.remove(KAT)
    assert nb == {0, 2, 3}
    idx.insert(KAT, 1)
    assert idx.state() == before


def test_duplicate_and_missing():
    idx = build_index([KAT])
    with pytest.raises(DuplicateInsert):
        idx.insert(KAT, 5)
    with pytest.raises(DuplicateInsert):
        idx.insert(BAT, 0)
    with pytest.raises(MissingRemove):
        idx.remove(BAT)


def test_substitution_and_deletion_path_gives_one_edge():
    # "aa" and "a": deletion neighbours through either position
    idx = build_index([b"\x00\x00", b"\x00"])
    assert idx.edges() == {(0, 1)}


@pytest.mark.parametrize("seed", range(5))
def test_oracle_equivalence_small(seed):
    lex = random_lexicon(seed, n=200, alphabet=4, lengths=(1, 5))
    assert build_index(lex.words).edges() == pairwise_edges(lex.words)


def test_interleaved_updates_match_rebuild():
    rnd = random.Random(7)
    idx = NeighborIndex()
    live = {}
    next_id = 0
    for _ in range(10_000):
        if live and rnd.random() < 0.45:
            w = rnd.choice(sorted(live))
            idx.remove(w)
            del live[w]
        else:
            w = bytes(rnd.randrange(4) for _ in range(rnd.randint(1, 5)))
            if w in live:
                continue
            idx.insert(w, next_id)
            live[w] = next_id
            next_id += 1
    fresh = NeighborIndex()
    for w, i in live.items():
        fresh.insert(w, i)
    assert idx.state() == fresh.state()


def test_deletion_variants():
    assert deletion_variants(bytes([1, 2, 2])) == {bytes([2, 2]), bytes([1, 2])}


def test_layer_profile_english_l4():
    p = layer_profile(36, 4)
    assert p.coordination == 140
    assert p.layer_size == 1_679_616
    assert p.bethe_threshold == pytest.approx(1 / 139)
    assert p.regime == "subcritical"


def test_layer_profile_full_layer():
    p = layer_profile(2, 1, {1: 2})
    assert p.occupation == 1.0 and p.regime == "supercritical"


def test_layer_profile_large_length_exact():
    assert layer_profile(36, 21).layer_size == 36 ** 21


def test_layer_profile_regime_threshold():
    # kappa = 9*2 = 18, p_c = 1/17; 100 words of 100 -> occupation 1 > p_c
    assert layer_profile(10, 2, {2: 6}).regime == "supercritical"
    assert layer_profile(10, 2, {2: 5}).regime == "subcritical"


@pytest.mark.parametrize("a,l", [(1, 3), (4, 0)])
def test_layer_profile_rejects(a, l):
    with pytest.raises(ValueError):
        layer_profile(a, l)
