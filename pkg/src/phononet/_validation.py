"""Input validation helpers shared by the estimators."""

from __future__ import annotations

import numbers
import random

import numpy as np

from .lexicon import Lexicon


def check_random_state(seed) -> np.random.Generator:
    """Turn ``None``, an int, a ``SeedSequence`` or a ``Generator`` into a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None or isinstance(seed, (numbers.Integral, np.random.SeedSequence)):
        return np.random.default_rng(seed)
    raise ValueError(f"{seed!r} cannot be used to seed a numpy Generator")


def py_random(rng: np.random.Generator) -> random.Random:
    """Stdlib stream for scalar hot loops, seeded from ``rng``."""
    return random.Random(int(rng.integers(0, 2**63)))


def check_lexicon(X) -> Lexicon:
    if isinstance(X, Lexicon):
        if len(X) == 0:
            raise ValueError("empty lexicon")
        return X
    raise TypeError(f"expected a Lexicon, got {type(X).__name__}")


def check_kind(kind) -> str:
    aliases = {0: "type0", 1: "type1", 2: "type2", "0": "type0", "1": "type1", "2": "type2"}
    kind = aliases.get(kind, kind)
    if kind not in ("type0", "type1", "type2"):
        raise ValueError(f"unknown generator kind {kind!r}")
    return kind


def check_probability(value, name: str) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


def check_histogram(histogram) -> dict:
    out = {}
    for length, count in dict(histogram).items():
        length, count = int(length), int(count)
        if length < 1 or count < 0:
            raise ValueError(f"invalid histogram entry {length}: {count}")
        if count:
            out[length] = count
    if not out:
        raise ValueError("histogram is empty")
    return dict(sorted(out.items()))
