"""Bundled data and synthetic desk-scale lexicons."""

from __future__ import annotations

import math
from bisect import bisect_right
from pathlib import Path

import numpy as np

from ._validation import check_random_state
from .lexicon import Lexicon, PhonemeInventory, load_inventory, read_lexicon

DATA_DIR = Path(__file__).parent / "data"

_CONSONANTS = ("t", "n", "s", "r", "l", "d", "k", "m", "p", "b", "z", "f", "v",
               "ʃ", "h", "g", "w", "j", "ŋ", "θ", "tʃ", "dʒ", "ð", "ʒ")
_VOWELS = ("ə", "ɪ", "i", "ɛ", "æ", "eɪ", "ʌ", "aɪ", "u", "oʊ", "ɑ", "ɔ")


def toy_lexicon() -> Lexicon:
    """The four-word example: æt, kæt, bæt, kæts."""
    return read_lexicon(DATA_DIR / "toy.tsv", load_inventory())


def make_desk_lexicon(n_words: int = 2000, *, n_consonants: int = 16, n_vowels: int = 8,
                      length_mean: float = 6.0, derivation: float = 0.6,
                      zipf: float = 1.0, base_bias: float = 0.2,
                      random_state=0) -> Lexicon:
    """Synthetic English-like lexicon for desk-scale experiments.

    Words come from a consonant/vowel phonotactic chain with Zipf-skewed
    phoneme frequencies.  With probability ``derivation`` a new word is
    instead a one-phoneme edit of an existing word, biased towards short
    bases; this produces the excess connectivity that distinguishes a real
    repertoire from percolation pseudolexica.
    """
    if not 1 <= n_consonants <= len(_CONSONANTS) or not 1 <= n_vowels <= len(_VOWELS):
        raise ValueError("too many consonants or vowels requested")
    rng = check_random_state(random_state)
    symbols = _CONSONANTS[:n_consonants] + _VOWELS[:n_vowels]
    inv = PhonemeInventory(symbols)
    n_sym = len(symbols)
    is_vowel = np.array([False] * n_consonants + [True] * n_vowels)

    def zipf_weights(n):
        w = 1.0 / np.arange(1, n + 1) ** zipf
        return w / w.sum()

    cw = np.zeros(n_sym)
    cw[:n_consonants] = zipf_weights(n_consonants)
    vw = np.zeros(n_sym)
    vw[n_consonants:] = zipf_weights(n_vowels)
    # per-phoneme transition preferences on top of the class pattern
    pref = rng.gamma(1.0, 1.0, size=(n_sym, n_sym))
    trans = np.empty((n_sym, n_sym))
    for s in range(n_sym):
        p_vowel = 0.25 if is_vowel[s] else 0.8
        row = (p_vowel * vw + (1 - p_vowel) * cw) * pref[s]
        trans[s] = row / row.sum()
    initial = 0.55 * cw + 0.45 * vw
    unigram = 0.6 * cw + 0.4 * vw
    cum_trans = np.cumsum(trans, axis=1)

    def fresh(length):
        s = rng.choice(n_sym, p=initial)
        out = [s]
        for u in rng.random(length - 1):
            s = min(int(np.searchsorted(cum_trans[s], u, side="right")), n_sym - 1)
            out.append(s)
        return bytes(out)

    def derive(base):
        b = list(base)
        op = rng.random()
        pos = int(rng.integers(len(b) + 1))
        ph = int(rng.choice(n_sym, p=unigram))
        if op < 0.5 or len(b) == 1:
            pos = min(pos, len(b) - 1)
            b[pos] = ph
        elif op < 0.8:
            b.insert(pos, ph)
        else:
            del b[min(pos, len(b) - 1)]
        return bytes(b)

    words = []
    seen = set()
    cum_bias = []
    while len(words) < n_words:
        if words and rng.random() < derivation:
            i = bisect_right(cum_bias, rng.random() * cum_bias[-1])
            w = derive(words[min(i, len(words) - 1)])
            if len(w) < 2:
                continue
        else:
            w = fresh(1 + int(rng.negative_binomial(4, 4 / (4 + length_mean - 1))))
        if len(w) > 21 or w in seen:
            continue
        seen.add(w)
        words.append(w)
        # derivations start preferentially from short words
        cum_bias.append((cum_bias[-1] if cum_bias else 0.0) + math.exp(-base_bias * len(w)))
    labels = tuple(f"w{i:05d}" for i in range(len(words)))
    return Lexicon(tuple(words), inv, labels)
