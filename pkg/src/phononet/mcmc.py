"""Link-preserving randomization of a phonological network.

Each step removes a random word, proposes a same-length replacement from the
type-2 phoneme chain and accepts it only if it is new and has the degree
the removed word had.  Node count, the length histogram and the total link
count are therefore conserved exactly.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from sklearn.base import BaseEstimator

from ._validation import check_kind, check_lexicon, check_random_state, py_random
from .ensemble import mean_sem
from .exceptions import StuckChain
from .lexicon import Lexicon, phoneme_stats
from .network import (PhonNetwork, build_network, clustering, component_stats,
                      geodesic_stats, local_clustering)
from .percolation import WordSampler
from .wordspace import build_index

TRAJECTORY_COLUMNS = ("sweep", "k_max", "gc", "CC", "d")


class McmcState:
    """Mutable chain state; word slot ``i`` is node ``i`` throughout."""

    def __init__(self, lexicon: Lexicon, sampler: WordSampler):
        self.inventory = lexicon.inventory
        self.words = list(lexicon.words)
        self.index = build_index(self.words)
        self.sampler = sampler
        self.n_links = self.index.n_edges()
        self.counters = Counter(proposed=0, accepted=0, rejected_duplicate=0,
                                rejected_degree=0, rejected_stuck=0)
        self.sweeps = 0

    def __len__(self):
        return len(self.words)

    def network(self) -> PhonNetwork:
        return PhonNetwork.from_index(self.index, len(self.words))

    def lexicon(self) -> Lexicon:
        return Lexicon(tuple(self.words), self.inventory)


def mcmc_step(state: McmcState, rnd) -> str:
    """One proposal; returns ``"accepted"`` or the rejection cause.

    The candidate is evaluated against the repertoire without the selected
    word, which is only taken out of the index if the move is accepted, so
    a rejected step leaves the index untouched.
    """
    index = state.index
    i = int(rnd.random() * len(state.words))
    w = state.words[i]
    state.counters["proposed"] += 1
    try:
        cand = state.sampler(len(w), rnd)
    except StuckChain:
        state.counters["rejected_stuck"] += 1
        return "rejected_stuck"
    if cand == w:
        # re-proposing the removed word restores it with its own degree
        state.counters["accepted"] += 1
        return "accepted"
    if cand in index.occupancy:
        state.counters["rejected_duplicate"] += 1
        return "rejected_duplicate"
    nb = index.neighbors(cand)
    nb.discard(i)
    if len(nb) != len(index.adjacency[i]):
        state.counters["rejected_degree"] += 1
        return "rejected_degree"
    index.remove(w)
    index.insert(cand, i, nb)
    state.words[i] = cand
    state.counters["accepted"] += 1
    return "accepted"


@dataclass(frozen=True)
class TrajectoryPoint:
    sweep: int
    k_max: int
    gc: int
    CC: float
    d: float
    L: int

    def row(self):
        return [getattr(self, c) for c in TRAJECTORY_COLUMNS]


@dataclass(eq=False)
class McmcResult:
    trajectory: list
    mean: dict
    sem: dict
    counters: dict
    final_lexicon: Lexicon
    checks: int = 0
    config: dict = field(default_factory=dict)


def _measure(state: McmcState, sweep: int, with_d: bool) -> TrajectoryPoint:
    net = state.network()
    comps = component_stats(net)
    cc, _ = clustering(net, "giant", _local=local_clustering(net), _comps=comps)
    d = geodesic_stats(net, "giant", _comps=comps)[0] if with_d else float("nan")
    return TrajectoryPoint(sweep, int(net.degrees.max()) if net.n_nodes else 0,
                           len(comps.giant), cc, d, net.n_edges)


def _check_conservation(state: McmcState, n0: int, hist0: Counter, links0: int):
    net = build_network(state.words)
    if (len(state.words) != n0 or Counter(map(len, state.words)) != hist0
            or net.n_edges != links0 or state.index.n_edges() != links0):
        raise RuntimeError(
            f"conservation violated after {state.sweeps} sweeps: "
            f"L={net.n_edges} (expected {links0})")


def run_mcmc(lexicon: Lexicon, sweeps: int, burn_in=None, stride: int = 1,
             random_state=None, *, d_stride: int = 10, check_every: int = 10,
             kind: str = "type2", stats=None) -> McmcResult:
    """Run ``sweeps * N`` proposals, sampling the trajectory every ``stride`` sweeps.

    Ensemble means cover trajectory samples taken after ``burn_in`` sweeps
    (default ``sweeps // 2``).  ``d`` is evaluated every ``d_stride``
    sweeps only; a full recount checks conservation every ``check_every``.
    """
    lexicon = check_lexicon(lexicon)
    if sweeps < 0 or stride < 1 or d_stride < 1:
        raise ValueError("sweeps must be >= 0 and strides >= 1")
    if burn_in is None:
        burn_in = sweeps // 2
    if not 0 <= burn_in <= sweeps:
        raise ValueError("burn_in must lie in [0, sweeps]")
    rng = check_random_state(random_state)
    rnd = py_random(rng)
    sampler = WordSampler(check_kind(kind), stats or phoneme_stats(lexicon))
    state = McmcState(lexicon, sampler)
    n0, links0 = len(state), state.n_links
    hist0 = Counter(map(len, state.words))

    trajectory = [_measure(state, 0, True)]
    checks = 0
    n = len(state)
    for sweep in range(1, sweeps + 1):
        for _ in range(n):
            mcmc_step(state, rnd)
        state.sweeps = sweep
        if check_every and sweep % check_every == 0:
            _check_conservation(state, n0, hist0, links0)
            checks += 1
        if sweep % stride == 0:
            trajectory.append(_measure(state, sweep, sweep % d_stride == 0))

    post = [p for p in trajectory if p.sweep > burn_in] or trajectory[-1:]
    mean, sem = {}, {}
    for name in ("k_max", "gc", "CC", "d", "L"):
        mean[name], sem[name] = mean_sem(getattr(p, name) for p in post)
    config = dict(sweeps=sweeps, burn_in=burn_in, stride=stride, d_stride=d_stride,
                  check_every=check_every, kind=kind)
    return McmcResult(trajectory, mean, sem, dict(state.counters), state.lexicon(),
                      checks, config)


class LinkPreservingRandomizer(BaseEstimator):
    """sklearn-style wrapper: ``fit`` stores the reference, ``sample`` runs a chain."""

    def __init__(self, sweeps=200, burn_in=None, stride=1, d_stride=10,
                 check_every=10, kind="type2"):
        self.sweeps = sweeps
        self.burn_in = burn_in
        self.stride = stride
        self.d_stride = d_stride
        self.check_every = check_every
        self.kind = kind

    def fit(self, X, y=None):
        self.lexicon_ = check_lexicon(X)
        self.stats_ = phoneme_stats(self.lexicon_)
        return self

    def sample(self, random_state=None) -> McmcResult:
        return run_mcmc(self.lexicon_, self.sweeps, self.burn_in, self.stride,
                        random_state, d_stride=self.d_stride,
                        check_every=self.check_every, kind=self.kind, stats=self.stats_)
