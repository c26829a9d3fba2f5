from collections import Counter

import numpy as np
import pytest
from scipy import stats

from phononet.datasets import make_desk_lexicon
from phononet.exceptions import LayerExhausted
from phononet.lexicon import PhonemeInventory, PhonemeStats, length_histogram
from phononet.network import build_network, component_stats
from phononet.percolation import (PercolationModel, WordSampler, generate_pseudolexicon,
                                  generate_word, percolation_experiment)
from phononet._validation import py_random

AB = PhonemeInventory("ab")


def chain_stats():
    # initial {a:1}; a -> b, b -> a
    return PhonemeStats(np.array([1, 1]), np.array([1, 0]), np.array([[0, 1], [1, 0]]))


def test_type0_uniform_over_sequences():
    sampler = WordSampler("type0", PhonemeStats.uniform(2))
    rnd = py_random(np.random.default_rng(0))
    counts = Counter(sampler(3, rnd) for _ in range(100_000))
    assert len(counts) == 8
    assert stats.chisquare(list(counts.values())).pvalue > 0.001


def test_type1_follows_unigram():
    st = PhonemeStats(np.array([9, 1]), np.array([1, 1]), np.ones((2, 2), int))
    sampler = WordSampler("type1", st)
    rnd = py_random(np.random.default_rng(1))
    share = sum(sampler(1, rnd) == b"\x00" for _ in range(10_000)) / 10_000
    assert share == pytest.approx(0.9, abs=0.01)


def test_type2_deterministic_chain():
    for seed in range(5):
        assert generate_word("type2", 4, chain_stats(), seed) == bytes([0, 1, 0, 1])


def test_feasible_layer():
    pl = generate_pseudolexicon({2: 3}, "type0", PhonemeStats.uniform(2), AB, 0)
    assert len(set(pl.lexicon.words)) == 3
    assert all(len(w) == 2 for w in pl.lexicon.words)


def test_overfull_layer_exhausts():
    with pytest.raises(LayerExhausted):
        generate_pseudolexicon({1: 3}, "type0", PhonemeStats.uniform(2), AB, 0, retry_cap=1000)


def test_chain_with_one_word_exhausts():
    with pytest.raises(LayerExhausted):
        generate_pseudolexicon({4: 2}, "type2", chain_stats(), AB, 0, retry_cap=1000)


@pytest.mark.parametrize("kind", ["type0", "type1", "type2"])
def test_histogram_exact_and_unique(kind, desk600):
    pl = PercolationModel(kind).fit(desk600).sample(3)
    assert length_histogram(pl.lexicon) == length_histogram(desk600)
    assert len(set(pl.lexicon.words)) == len(desk600)


def test_same_seed_same_stats(desk600):
    a = percolation_experiment(desk600, "type2", ensemble=1, seed=11)
    b = percolation_experiment(desk600, "type2", ensemble=1, seed=11)
    assert a.stats == b.stats


def test_ensemble_mean_and_sem(desk600):
    res = percolation_experiment(desk600, "type1", ensemble=4, seed=2)
    gcs = [s.gc for s in res.stats]
    assert res.mean["gc"] == pytest.approx(np.mean(gcs))
    assert res.sem["gc"] == pytest.approx(np.std(gcs, ddof=1) / 2)


def test_type0_far_fewer_links(desk1000):
    real = build_network(desk1000).n_edges
    res = percolation_experiment(desk1000, "type0", ensemble=3, seed=0)
    assert res.mean["L"] < 0.6 * real


def test_estimator_params():
    m = PercolationModel(kind="type1", retry_cap=5)
    assert m.get_params() == {"kind": "type1", "retry_cap": 5}
    with pytest.raises(ValueError):
        PercolationModel(kind="type9").fit(make_desk_lexicon(50))


def test_low_degree_shape_matches_chain_source():
    lex = make_desk_lexicon(2000, derivation=0.0, random_state=0)
    ref = build_network(lex).degrees
    pseudo = build_network(PercolationModel("type2").fit(lex).sample(0).lexicon).degrees
    a = np.bincount(ref[ref < 30], minlength=30)
    b = np.bincount(pseudo[pseudo < 30], minlength=30)
    keep = (a + b) >= 10
    assert stats.chi2_contingency(np.vstack([a[keep], b[keep]]))[1] > 0.01


def _largest_layer_cluster(lex, length):
    words = [w for w in lex.words if len(w) == length]
    cs = component_stats(build_network(words))
    return len(cs.giant) / len(words)


def test_type0_layer_regimes_at_english_densities():
    inv = PhonemeInventory([f"p{i}" for i in range(36)])
    hist = {2: 400, 3: 3000, 5: 3000}
    lex = generate_pseudolexicon(hist, "type0", PhonemeStats.uniform(36), inv, 5).lexicon
    assert _largest_layer_cluster(lex, 2) > 0.5
    assert _largest_layer_cluster(lex, 3) > 0.5
    assert _largest_layer_cluster(lex, 5) < 0.01
