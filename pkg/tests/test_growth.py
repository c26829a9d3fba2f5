import math
import random
from collections import Counter

import numpy as np
import pytest
from scipy import stats

from phononet.growth import (GrowthModel, RejectionModel, attachment_schedule,
                             degree_penalty, draw_core_threshold, grow_repertoire,
                             random_schedule, rejection_probability,
                             total_rejection_probability)
from phononet.lexicon import length_histogram, phoneme_stats
from phononet.exceptions import SlotStarvation


def test_penalty_isolated():
    assert degree_penalty(0, [], 25, 0.1) == pytest.approx(math.exp(-2.5))
    assert degree_penalty(0, [], 25, 0.1) == pytest.approx(0.0821, abs=1e-4)


def test_penalty_clamped():
    assert degree_penalty(26, [25], 25, 0.1) == 1.0


def test_penalty_wall():
    assert degree_penalty(25, [25, 25], 25, 0.1) == 1.0


def test_penalty_neighbour_terms_add_to_exponent():
    # each neighbour contributes (k_n + 1) - k_max: above the cap it raises p_k
    base = degree_penalty(3, [], 25, 0.1)
    assert degree_penalty(3, [25], 25, 0.1) == pytest.approx(base)
    assert degree_penalty(3, [30], 25, 0.1) == pytest.approx(base * math.exp(0.5))
    assert degree_penalty(3, [5], 25, 0.1) == pytest.approx(base * math.exp(-2.0))


def test_unattached_rejection_is_f():
    m = RejectionModel(f=0.3, k_max=None)
    assert total_rejection_probability(m, 4, 0) == pytest.approx(0.3)
    rnd = random.Random(0)
    hits = sum(rejection_probability(m, 4, 0, random_state=rnd)[0] for _ in range(20_000))
    assert hits / 20_000 == pytest.approx(0.3, abs=0.015)


def test_core_gate_active():
    m = RejectionModel(mode="cp", k_max=None, W_C=5, m_C=4)
    assert total_rejection_probability(m, 3, 2) == pytest.approx(0.99)
    assert total_rejection_probability(m, 5, 2) == 0.0
    assert total_rejection_probability(m, 3, 4) == 0.0


def test_fractional_threshold_frequency():
    rnd = random.Random(3)
    draws = [draw_core_threshold(4.2, rnd) for _ in range(10_000)]
    assert set(draws) == {4, 5}
    assert draws.count(5) / 10_000 == pytest.approx(0.2, abs=0.02)


def test_gate_chain_matches_closed_form():
    m = RejectionModel(f=0.4, k_max=6, nu=0.3, mode="cp_eps", W_C=4, m_C=2.5,
                       delta=0.8, eps=0.6)
    rnd = random.Random(9)
    for length, k, nbd, g in [(3, 2, [3, 4], True), (3, 0, [], False), (6, 1, [6], True)]:
        p = total_rejection_probability(m, length, k, nbd, g)
        n = 40_000
        hits = sum(rejection_probability(m, length, k, nbd, g, rnd)[0] for _ in range(n))
        assert hits / n == pytest.approx(p, abs=4 * math.sqrt(p * (1 - p) / n) + 1e-9)


def test_causes_reported():
    m = RejectionModel(f=1.0, k_max=None)
    assert rejection_probability(m, 3, 0, random_state=0) == (True, "unattached")
    m = RejectionModel(mode="cp_eps", k_max=None, eps=1.0)
    assert rejection_probability(m, 9, 1, (), True, 0) == (True, "gc-link")
    assert rejection_probability(m, 9, 1, (), False, 0) == (False, None)


@pytest.mark.parametrize("kw", [dict(f=1.2), dict(nu=0), dict(W_C=0), dict(m_C=-1),
                                dict(mode="bogus"), dict(eps=-0.1)])
def test_model_validation(kw):
    with pytest.raises(ValueError):
        RejectionModel(**kw)


def test_dash_mode_alias():
    assert RejectionModel(mode="cp-eps").mode == "cp_eps"


def test_schedule_extremes():
    assert attachment_schedule({2: 2, 5: 1}, 0.0, 0).lengths == (2, 2, 5)
    assert attachment_schedule({2: 2, 5: 1}, 1.0, 0).lengths == (5, 2, 2)


def _english_like_histogram():
    rng = np.random.default_rng(0)
    lengths = np.clip(np.round(rng.gamma(7.5, 1.0, 30_000)).astype(int), 1, 21)
    return {int(k): int(v) for k, v in zip(*np.unique(lengths, return_counts=True))}


def _rank_corr(sched):
    return stats.spearmanr(np.arange(len(sched)), sched)[0]


def test_schedule_disorder_weakens_length_order():
    hist = _english_like_histogram()
    rho_low = _rank_corr(attachment_schedule(hist, 0.01, 0).lengths)
    rho_high = [_rank_corr(attachment_schedule(hist, 0.9, s).lengths) for s in range(3)]
    assert rho_low > 0.95
    # measured about -0.33: far from length order, but long words come early
    assert all(abs(r) < 0.4 for r in rho_high)


@pytest.mark.parametrize("tau", [0.0, 0.3, 0.9, 1.0])
def test_schedule_multiset(tau):
    hist = {1: 3, 2: 5, 4: 7, 9: 1}
    assert Counter(attachment_schedule(hist, tau, 1).lengths) == Counter(hist)
    assert Counter(random_schedule(hist, 1).lengths) == Counter(hist)


@pytest.mark.parametrize("mode,kw", [("gc", dict(f=0.5)), ("cp", dict(f=0.3, m_C=2.4)),
                                     ("cp_eps", dict(f=0.3, m_C=2.0, eps=0.5))])
def test_growth_histogram_exact(mode, kw, desk600):
    res = GrowthModel(mode=mode, k_max=None, check_every=50, **kw).fit(desk600).sample(0)
    assert length_histogram(res.lexicon) == length_histogram(desk600)
    assert len(set(res.lexicon.words)) == len(desk600)
    assert res.giant_checks == len(desk600) // 50
    assert sum(res.counters.values()) == res.proposals - len(desk600)


@pytest.mark.xfail(strict=True, reason="summed exponent lets low-degree terms offset a hub "
                   "neighbour's excess; measured tail about 8e-3 on 2000 desk words")
def test_degree_cap_tail(desk2000):
    res = GrowthModel(f=0.9, k_max=25, nu=0.1).fit(desk2000).sample(0)
    assert np.mean(res.network.degrees > 35) < 1e-3


def test_degree_cap_fires_for_hub_neighbours(desk1000):
    res = GrowthModel(f=0.9, k_max=15, nu=0.1).fit(desk1000).sample(0)
    assert res.counters["degree-cap"] > 0
    capped = GrowthModel(f=0.9, k_max=None).fit(desk1000).sample(0)
    assert res.network.degrees.max() < capped.network.degrees.max()


def test_trace_rows(desk600):
    res = GrowthModel(f=0.5, k_max=None, record_trace=True).fit(desk600).sample(1)
    assert len(res.trace) == res.proposals - res.counters["stuck"]
    accepted = [r for r in res.trace if r[3] == ""]
    assert len(accepted) == len(desk600)


def test_same_seed_same_growth(desk600):
    m = GrowthModel(f=0.5, k_max=None).fit(desk600)
    assert m.sample(5).lexicon.words == m.sample(5).lexicon.words


def test_slot_starvation(desk600):
    hist = {1: 5}
    st = phoneme_stats(desk600)
    with pytest.raises(SlotStarvation):
        grow_repertoire(hist, st, RejectionModel(f=1.0, k_max=None), 0.0, "type1", 0,
                        inventory=desk600.inventory, slot_retry_cap=200)


def test_estimator_roundtrip_params():
    m = GrowthModel(mode="cp", m_C=4.2)
    assert m.get_params()["m_C"] == 4.2
    assert m.set_params(f=0.7).rejection_model.f == 0.7
