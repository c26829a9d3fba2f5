"""Type 0/1/2 pseudolexicon generators and percolation experiments."""

from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass
from itertools import accumulate

from sklearn.base import BaseEstimator

from ._validation import check_kind, check_lexicon, check_random_state, py_random
from .exceptions import LayerExhausted, StuckChain
from .lexicon import Lexicon, PhonemeStats, length_histogram, phoneme_stats

KINDS = ("type0", "type1", "type2")


class WordSampler:
    """Draws phoneme sequences of a given length.

    * ``type0``: i.i.d. uniform phonemes;
    * ``type1``: i.i.d. phonemes from the unigram frequencies;
    * ``type2``: first phoneme from the word-initial frequencies, each next
      one from the bigram row of its predecessor (first-order chain).

    Calling the sampler takes a :class:`random.Random`; the hot loops of the
    growth and MCMC models call it millions of times.
    """

    def __init__(self, kind: str, stats: PhonemeStats):
        self.kind = check_kind(kind)
        self.n_phonemes = stats.n_phonemes
        self.population = list(range(self.n_phonemes))
        if self.kind == "type1":
            self._cum = list(accumulate(stats.unigram_counts.tolist()))
            if self._cum[-1] <= 0:
                raise ValueError("unigram counts are all zero")
        elif self.kind == "type2":
            self._init = list(accumulate(stats.initial_counts.tolist()))
            if self._init[-1] <= 0:
                raise ValueError("initial counts are all zero")
            self._rows = [list(accumulate(r)) for r in stats.bigram_counts.tolist()]

    def __call__(self, length: int, rnd: random.Random) -> bytes:
        if self.kind == "type0":
            n = self.n_phonemes
            r = rnd.random
            return bytes([int(r() * n) for _ in range(length)])
        if self.kind == "type1":
            return bytes(rnd.choices(self.population, cum_weights=self._cum, k=length))
        r = rnd.random
        cum = self._init
        s = bisect_right(cum, r() * cum[-1])
        out = [s]
        rows = self._rows
        for _ in range(length - 1):
            cum = rows[s]
            total = cum[-1]
            if total <= 0:
                raise StuckChain(f"phoneme {s} has no outgoing transitions")
            s = bisect_right(cum, r() * total)
            out.append(s)
        return bytes(out)


def generate_word(kind: str, length: int, stats: PhonemeStats, random_state=None) -> bytes:
    if length < 1:
        raise ValueError("length must be >= 1")
    rnd = py_random(check_random_state(random_state))
    return WordSampler(kind, stats)(length, rnd)


@dataclass(frozen=True, eq=False)
class PseudoLexicon:
    lexicon: Lexicon
    kind: str
    seed: object
    duplicates: int
    stuck: int
    chain: str = "first-order Markov"


def _sample_layers(histogram, sampler, rnd, retry_cap):
    words = []
    seen = set()
    dups = stuck = 0
    for length, count in sorted(histogram.items()):
        got = fails = 0
        while got < count:
            try:
                w = sampler(length, rnd)
            except StuckChain:
                stuck += 1
                fails += 1
            else:
                if w in seen:
                    dups += 1
                    fails += 1
                else:
                    seen.add(w)
                    words.append(w)
                    got += 1
                    fails = 0
                    continue
            if fails >= retry_cap:
                raise LayerExhausted(
                    f"{fails} consecutive failures in layer l={length} "
                    f"after {got} of {count} words")
    return words, dups, stuck


def generate_pseudolexicon(histogram: dict, kind: str, stats: PhonemeStats, inventory,
                           random_state=None, retry_cap: int = 10**6) -> PseudoLexicon:
    """Rejection-sample ``histogram[l]`` unique words for every length ``l``."""
    rng = check_random_state(random_state)
    sampler = WordSampler(kind, stats)
    words, dups, stuck = _sample_layers(histogram, sampler, py_random(rng), retry_cap)
    lex = Lexicon(tuple(words), inventory)
    return PseudoLexicon(lex, kind, random_state, dups, stuck)


class PercolationModel(BaseEstimator):
    """Pseudolexicon generator matched to a reference lexicon.

    ``fit`` learns the word-length histogram and phoneme statistics of the
    reference; ``sample`` draws a pseudolexicon with exactly that histogram.

    Parameters
    ----------
    kind : {"type0", "type1", "type2"}
        Phoneme model.
    retry_cap : int
        Consecutive duplicate or stuck draws tolerated within one layer.
    """

    def __init__(self, kind="type2", retry_cap=10**6):
        self.kind = kind
        self.retry_cap = retry_cap

    def fit(self, X, y=None):
        lex = check_lexicon(X)
        check_kind(self.kind)
        self.histogram_ = length_histogram(lex)
        self.stats_ = phoneme_stats(lex)
        if self.kind == "type0":
            self.stats_ = PhonemeStats.uniform(len(lex.inventory))
        self.inventory_ = lex.inventory
        return self

    def sample(self, random_state=None) -> PseudoLexicon:
        return generate_pseudolexicon(self.histogram_, self.kind, self.stats_,
                                      self.inventory_, random_state, self.retry_cap)


def _percolation_member(model: PercolationModel, seed):
    from .network import build_network, net_stats
    pseudo = model.sample(seed)
    return net_stats(build_network(pseudo.lexicon))


def percolation_experiment(lexicon, kind="type2", ensemble=10, seed=0, jobs=1,
                           retry_cap=10**6):
    """Build ``ensemble`` pseudolexica of one kind and measure their networks."""
    from .ensemble import run_ensemble
    if ensemble < 1:
        raise ValueError("ensemble must be >= 1")
    model = PercolationModel(kind=kind, retry_cap=retry_cap).fit(lexicon)
    return run_ensemble(_percolation_member, model, ensemble, seed, jobs)
