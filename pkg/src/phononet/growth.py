"""Repertoire growth by rejection sampling.

New words of a scheduled length are proposed by a phoneme model and run
through a chain of rejection gates; the first candidate surviving all gates
is added.  Three model families share the machinery:

``gc``
    unattached candidates are discarded with probability ``f``; a soft
    degree cap suppresses candidates whose own or neighbours' degree would
    approach ``k_max``.
``cp``
    adds a core constraint: candidates shorter than ``W_C`` with fewer than
    ``m_C`` links are discarded with probability ``delta``.
``cp_eps``
    additionally discards candidates joining the current largest component
    with probability ``eps``.

The gates are conditional Bernoulli trials, so the total rejection
probability is ``f + (1-f) p_k + (1-f)(1-p_k) C + (1-f)(1-p_k)(1-C) R``
with ``f`` counted only for unattached candidates.
"""

from __future__ import annotations

import math
import random
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Optional

from sklearn.base import BaseEstimator

from ._validation import (check_histogram, check_kind, check_lexicon,
                          check_probability, check_random_state, py_random)
from .exceptions import SlotStarvation, StuckChain
from .lexicon import Lexicon, PhonemeStats, length_histogram, phoneme_stats
from .network import PhonNetwork
from .percolation import WordSampler
from .wordspace import NeighborIndex

MODES = ("gc", "cp", "cp_eps")
# k_max from the growth-model discussion (25) and from the summary table caption (20)
KMAX_PRESETS = {"text": 25, "table": 20}

CAUSES = ("stuck", "duplicate", "unattached", "degree-cap", "core", "gc-link")


@dataclass(frozen=True)
class RejectionModel:
    """Parameters of the rejection gates; ``mode`` decides which are read.

    ``k_max=None`` switches the degree gate off.
    """

    f: float = 0.0
    k_max: Optional[int] = 25
    nu: float = 0.1
    mode: str = "gc"
    W_C: int = 5
    m_C: float = 0.0
    delta: float = 0.99
    eps: float = 0.0

    def __post_init__(self):
        mode = self.mode.replace("-", "_")
        if mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        object.__setattr__(self, "mode", mode)
        check_probability(self.f, "f")
        check_probability(self.delta, "delta")
        check_probability(self.eps, "eps")
        if self.nu <= 0:
            raise ValueError("nu must be positive")
        if self.W_C < 1:
            raise ValueError("W_C must be >= 1")
        if self.m_C < 0:
            raise ValueError("m_C must be >= 0")


def degree_penalty(k_w: int, neighbor_degrees, k_max: int, nu: float) -> float:
    """Soft degree-cap rejection probability.

    ``neighbor_degrees`` are the neighbours' degrees *after* the candidate
    joins (``k_n + 1``).  The exponent sums ``nu * (k - k_max)`` over the
    candidate and its neighbours and the result is clamped at 1, so the gate
    is negligible far below the cap and certain once the sum reaches it.
    """
    if nu <= 0:
        raise ValueError("nu must be positive")
    x = nu * ((k_w - k_max) + sum(k - k_max for k in neighbor_degrees))
    return 1.0 if x >= 0 else math.exp(x)


def draw_core_threshold(m_C: float, rnd) -> int:
    """Fractional thresholds: ``ceil(m_C)`` with probability ``m_C - floor(m_C)``."""
    lo = math.floor(m_C)
    frac = m_C - lo
    if frac == 0.0:
        return int(lo)
    return int(lo) + 1 if rnd.random() < frac else int(lo)


def rejection_probability(model: RejectionModel, length: int, degree: int,
                          neighbor_degrees=(), links_to_giant: bool = False,
                          random_state=None):
    """One pass through the gate chain.

    Returns ``(rejected, cause)``; ``cause`` is ``None`` on acceptance.
    ``random_state`` may be a :class:`random.Random` to share a stream.
    """
    rnd = random_state if isinstance(random_state, random.Random) \
        else py_random(check_random_state(random_state))
    return _gates(model, length, degree, neighbor_degrees, links_to_giant, rnd)


def _gates(model, length, degree, neighbor_degrees, links_to_giant, rnd):
    r = rnd.random
    if degree == 0 and model.f > 0.0 and r() < model.f:
        return True, "unattached"
    if model.k_max is not None:
        p = degree_penalty(degree, neighbor_degrees, model.k_max, model.nu)
        if p > 0.0 and r() < p:
            return True, "degree-cap"
    if model.mode != "gc" and length < model.W_C:
        if degree < draw_core_threshold(model.m_C, rnd) and r() < model.delta:
            return True, "core"
    if model.mode == "cp_eps" and links_to_giant and model.eps > 0.0 and r() < model.eps:
        return True, "gc-link"
    return False, None


def total_rejection_probability(model: RejectionModel, length: int, degree: int,
                                neighbor_degrees=(), links_to_giant: bool = False) -> float:
    """Closed form of the gate chain, averaged over the fractional core threshold."""
    f = model.f if degree == 0 else 0.0
    pk = 0.0 if model.k_max is None else degree_penalty(
        degree, neighbor_degrees, model.k_max, model.nu)
    c = 0.0
    if model.mode != "gc" and length < model.W_C:
        lo = math.floor(model.m_C)
        frac = model.m_C - lo
        p_below = (1 - frac) * (degree < lo) + frac * (degree < lo + 1)
        c = model.delta * p_below
    rr = model.eps if (model.mode == "cp_eps" and links_to_giant) else 0.0
    return f + (1 - f) * pk + (1 - f) * (1 - pk) * c + (1 - f) * (1 - pk) * (1 - c) * rr


@dataclass(frozen=True)
class AttachmentSchedule:
    lengths: tuple
    tau: Optional[float]
    order: str = "ordered"

    def __len__(self):
        return len(self.lengths)

    def __iter__(self):
        return iter(self.lengths)


def attachment_schedule(histogram: dict, tau: float, random_state=None) -> AttachmentSchedule:
    """Order in which word lengths are attached.

    Each slot starts at the shortest length still available and keeps
    stepping to the next length with probability ``tau``, never past the
    longest available one.  A length with nothing left falls back to the
    closest smaller available length.  ``tau=0`` attaches shortest first and
    ``tau=1`` longest first.
    """
    check_probability(tau, "tau")
    remaining = check_histogram(histogram)
    avail = sorted(remaining)
    rnd = py_random(check_random_state(random_state))
    r = rnd.random
    out = []
    while avail:
        l, top = avail[0], avail[-1]
        while l < top and r() < tau:
            l += 1
        if remaining.get(l, 0) == 0:
            l = avail[bisect_right(avail, l) - 1]
        out.append(l)
        remaining[l] -= 1
        if remaining[l] == 0:
            avail.remove(l)
    return AttachmentSchedule(tuple(out), tau, "ordered")


def random_schedule(histogram: dict, random_state=None) -> AttachmentSchedule:
    hist = check_histogram(histogram)
    lengths = [l for l, c in hist.items() for _ in range(c)]
    rng = check_random_state(random_state)
    rng.shuffle(lengths)
    return AttachmentSchedule(tuple(int(l) for l in lengths), None, "random")


class _Components:
    """Insert-only disjoint-set union that tracks the largest component."""

    def __init__(self):
        self.parent = []
        self.size = []
        self.largest = -1

    def add(self) -> int:
        i = len(self.parent)
        self.parent.append(i)
        self.size.append(1)
        if self.largest < 0:
            self.largest = i
        return i

    def find(self, i: int) -> int:
        parent = self.parent
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:
            parent[i], i = root, parent[i]
        return root

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        if rb == self.largest or self.size[ra] > self.size[self.find(self.largest)]:
            self.largest = ra
        return ra

    def largest_size(self) -> int:
        return self.size[self.find(self.largest)] if self.largest >= 0 else 0

    def true_largest_size(self) -> int:
        roots = {self.find(i) for i in range(len(self.parent))}
        return max((self.size[r] for r in roots), default=0)


@dataclass(eq=False)
class GrowthResult:
    lexicon: Lexicon
    network: PhonNetwork
    schedule: AttachmentSchedule
    counters: dict
    proposals: int
    max_slot_tries: int
    giant_checks: int
    trace: Optional[list] = field(default=None, repr=False)


def grow_repertoire(histogram: dict, stats: PhonemeStats, model: RejectionModel,
                    tau: float = 0.01, kind: str = "type2", random_state=None, *,
                    inventory=None, order: str = "ordered",
                    slot_retry_cap: int = 10**7, check_every: int = 1000,
                    record_trace: bool = False) -> GrowthResult:
    """Grow a repertoire slot by slot until its length histogram equals ``histogram``."""
    rng = check_random_state(random_state)
    if order == "ordered":
        schedule = attachment_schedule(histogram, tau, rng)
    elif order == "random":
        schedule = random_schedule(histogram, rng)
    else:
        raise ValueError(f"unknown order {order!r}")
    sampler = WordSampler(kind, stats)
    rnd = py_random(rng)

    index = NeighborIndex()
    occ = index.occupancy
    adj = index.adjacency
    comps = _Components()
    counters = dict.fromkeys(CAUSES, 0)
    trace = [] if record_trace else None
    need_nb_degrees = model.k_max is not None
    need_giant = model.mode == "cp_eps"
    words = []
    proposals = 0
    max_tries = 0
    checks = 0

    for slot, length in enumerate(schedule.lengths):
        tries = 0
        while True:
            tries += 1
            proposals += 1
            if tries > slot_retry_cap:
                raise SlotStarvation(
                    f"slot {slot} (l={length}) exceeded {slot_retry_cap} proposals")
            try:
                w = sampler(length, rnd)
            except StuckChain:
                counters["stuck"] += 1
                continue
            if w in occ:
                counters["duplicate"] += 1
                if trace is not None:
                    trace.append((proposals, length, -1, "duplicate"))
                continue
            nb = index.neighbors(w)
            k = len(nb)
            nbd = [len(adj[j]) + 1 for j in nb] if need_nb_degrees else ()
            links = False
            if need_giant and k and comps.largest >= 0:
                g = comps.find(comps.largest)
                links = any(comps.find(j) == g for j in nb)
            rejected, cause = _gates(model, length, k, nbd, links, rnd)
            if trace is not None:
                trace.append((proposals, length, k, cause or ""))
            if rejected:
                counters[cause] += 1
                continue
            wid = comps.add()
            index.insert(w, wid, nb)
            for j in nb:
                comps.union(wid, j)
            words.append(w)
            break
        max_tries = max(max_tries, tries)
        if check_every and len(words) % check_every == 0:
            checks += 1
            if comps.largest_size() != comps.true_largest_size():
                raise RuntimeError("largest-component tracking is inconsistent")

    lex = Lexicon(tuple(words), inventory) if inventory is not None else None
    net = PhonNetwork.from_index(index, len(words))
    return GrowthResult(lex, net, schedule, counters, proposals, max_tries, checks, trace)


class GrowthModel(BaseEstimator):
    """Rejection-sampling growth model fitted to a reference lexicon.

    ``fit`` learns the reference word-length histogram and phoneme
    statistics; ``sample`` grows one repertoire with exactly that histogram.

    Parameters
    ----------
    mode : {"gc", "cp", "cp_eps"}
    f : float
        Rejection probability of candidates without any link.
    k_max : int or None
        Degree-cap centre; ``None`` disables the degree gate.
    nu : float
        Degree-cap sharpness.
    tau : float
        Attachment disorder, used when ``order="ordered"``.
    order : {"ordered", "random"}
    W_C, m_C, delta : core length bound, core link threshold, core strictness.
    eps : float
        Rejection probability for candidates joining the largest component.
    kind : {"type0", "type1", "type2"}
        Phoneme model used to propose candidates.
    """

    def __init__(self, mode="gc", f=0.0, k_max=25, nu=0.1, tau=0.01, order="ordered",
                 W_C=5, m_C=0.0, delta=0.99, eps=0.0, kind="type2",
                 slot_retry_cap=10**7, check_every=1000, record_trace=False):
        self.mode = mode
        self.f = f
        self.k_max = k_max
        self.nu = nu
        self.tau = tau
        self.order = order
        self.W_C = W_C
        self.m_C = m_C
        self.delta = delta
        self.eps = eps
        self.kind = kind
        self.slot_retry_cap = slot_retry_cap
        self.check_every = check_every
        self.record_trace = record_trace

    @property
    def rejection_model(self) -> RejectionModel:
        return RejectionModel(f=self.f, k_max=self.k_max, nu=self.nu, mode=self.mode,
                              W_C=self.W_C, m_C=self.m_C, delta=self.delta, eps=self.eps)

    def fit(self, X, y=None):
        lex = check_lexicon(X)
        kind = check_kind(self.kind)
        self.rejection_model  # validates parameters early
        self.histogram_ = length_histogram(lex)
        self.stats_ = (PhonemeStats.uniform(len(lex.inventory)) if kind == "type0"
                       else phoneme_stats(lex))
        self.inventory_ = lex.inventory
        return self

    def sample(self, random_state=None) -> GrowthResult:
        return grow_repertoire(
            self.histogram_, self.stats_, self.rejection_model, self.tau,
            check_kind(self.kind), random_state, inventory=self.inventory_, order=self.order,
            slot_retry_cap=self.slot_retry_cap, check_every=self.check_every,
            record_trace=self.record_trace)
