"""Random lexicon and graph generators for tests."""

import random

from phononet.lexicon import Lexicon, PhonemeInventory


def random_lexicon(seed, n=300, alphabet=10, lengths=(1, 8)) -> Lexicon:
    rnd = random.Random(seed)
    inv = PhonemeInventory("abcdefghijklmnopqrstuvwxyz"[:alphabet])
    words = set()
    while len(words) < n:
        l = rnd.randint(*lengths)
        words.add(bytes(rnd.randrange(alphabet) for _ in range(l)))
    return Lexicon(tuple(sorted(words)), inv)


def random_graph(seed, n_max=200):
    rnd = random.Random(seed)
    n = rnd.randint(5, n_max)
    p = rnd.uniform(1.5, 6.0) / n
    edges = sorted({(i, j) for i in range(n) for j in range(i + 1, n) if rnd.random() < p})
    return n, edges
