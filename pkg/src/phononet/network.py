"""Phonological network construction and the summary measurements."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .exceptions import DegenerateVariance, DisconnectedScope, NoInterLayerLinks
from .wordspace import build_index

# column order of the summary table; extra columns follow
STAT_COLUMNS = ("L", "L0", "lr", "gc", "k_max", "CC", "a", "d", "d_max")
EXTRA_COLUMNS = ("n_nodes", "n_components", "mean_island_size")

_BFS_CHUNK = 256


class PhonNetwork:
    """Undirected simple graph over word nodes ``0..n-1``.

    ``lengths[i]`` is the word length (layer) of node ``i``; ``edges`` holds
    each link once as a sorted ``(u, v)`` row with ``u < v``.
    """

    def __init__(self, lengths, edges):
        self.lengths = np.asarray(lengths, dtype=np.int64)
        n = len(self.lengths)
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if len(edges):
            edges = np.sort(edges, axis=1)
            if np.any(edges[:, 0] == edges[:, 1]):
                raise ValueError("self-loops are not allowed")
            if edges.min() < 0 or edges.max() >= n:
                raise ValueError("edge endpoint out of range")
            edges = np.unique(edges, axis=0)
        self.edges = edges
        data = np.ones(2 * len(edges), dtype=np.int64)
        rows = np.concatenate([edges[:, 0], edges[:, 1]])
        cols = np.concatenate([edges[:, 1], edges[:, 0]])
        self.adjacency = sparse.csr_matrix((data, (rows, cols)), shape=(n, n))
        self.degrees = np.diff(self.adjacency.indptr)

    @property
    def n_nodes(self) -> int:
        return len(self.lengths)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def neighbors(self, i: int) -> np.ndarray:
        a = self.adjacency
        return a.indices[a.indptr[i]:a.indptr[i + 1]]

    @classmethod
    def from_index(cls, index, n_nodes: int) -> "PhonNetwork":
        """Snapshot of a :class:`NeighborIndex` whose ids are ``0..n_nodes-1``."""
        lengths = np.zeros(n_nodes, dtype=np.int64)
        for wid, w in index.words.items():
            lengths[wid] = len(w)
        edges = [(a, b) for a, nb in index.adjacency.items() for b in nb if a < b]
        return cls(lengths, edges)

    def to_networkx(self):
        import networkx as nx
        g = nx.Graph()
        g.add_nodes_from((i, {"length": int(l)}) for i, l in enumerate(self.lengths))
        g.add_edges_from(map(tuple, self.edges.tolist()))
        return g


def build_network(lexicon) -> PhonNetwork:
    """Node per word, link per pair of words at edit distance 1."""
    words = lexicon.words if hasattr(lexicon, "words") else tuple(lexicon)
    index = build_index(words)
    edges = [(a, b) for a, nb in index.adjacency.items() for b in nb if a < b]
    return PhonNetwork([len(w) for w in words], edges)


@dataclass(frozen=True)
class ComponentStats:
    labels: np.ndarray
    giant: np.ndarray
    size_histogram: dict
    mean_island_size: float
    n_components: int
    tie_broken: bool


def component_stats(net: PhonNetwork) -> ComponentStats:
    """Connected components; the giant is the largest, ties go to the
    component holding the smallest node id."""
    n = net.n_nodes
    if n == 0:
        return ComponentStats(np.zeros(0, np.int64), np.zeros(0, np.int64), {},
                              float("nan"), 0, False)
    ncomp, labels = csgraph.connected_components(net.adjacency, directed=False)
    sizes = np.bincount(labels, minlength=ncomp)
    candidates = np.flatnonzero(sizes == sizes.max())
    first_node = np.full(ncomp, n, dtype=np.int64)
    np.minimum.at(first_node, labels, np.arange(n))
    giant_label = candidates[np.argmin(first_node[candidates])]
    giant = np.flatnonzero(labels == giant_label)
    hist_sizes, hist_counts = np.unique(sizes, return_counts=True)
    islands = np.delete(sizes, giant_label)
    islands = islands[islands >= 2]
    mean_island = float(islands.mean()) if len(islands) else float("nan")
    return ComponentStats(labels, giant,
                          dict(zip(hist_sizes.tolist(), hist_counts.tolist())),
                          mean_island, int(ncomp), len(candidates) > 1)


def local_clustering(net: PhonNetwork) -> np.ndarray:
    """C_i = 2 T_i / (k_i (k_i - 1)); zero for nodes of degree < 2."""
    a = net.adjacency
    tri = np.asarray((a @ a).multiply(a).sum(axis=1)).ravel() / 2.0
    k = net.degrees.astype(float)
    out = np.zeros(net.n_nodes)
    mask = k >= 2
    out[mask] = 2.0 * tri[mask] / (k[mask] * (k[mask] - 1.0))
    return out


def _resolve_scope(net, scope, comps=None):
    if scope is None or (isinstance(scope, str) and scope == "giant"):
        comps = comps or component_stats(net)
        return comps.giant
    if isinstance(scope, str) and scope == "all":
        return np.arange(net.n_nodes)
    return np.asarray(sorted(scope), dtype=np.int64)


def clustering(net: PhonNetwork, scope="giant", *, _local=None, _comps=None):
    """Mean local clustering over ``scope`` and its per-degree curve."""
    nodes = _resolve_scope(net, scope, _comps)
    c = local_clustering(net) if _local is None else _local
    if len(nodes) == 0:
        return 0.0, {}
    cs = c[nodes]
    ks = net.degrees[nodes]
    curve = {int(k): float(cs[ks == k].mean()) for k in np.unique(ks)}
    return float(cs.mean()), curve


def assortativity(net: PhonNetwork) -> float:
    """Pearson correlation of remaining degrees across edge ends.

    Each edge is counted in both orientations.
    """
    if net.n_edges == 0:
        raise DegenerateVariance("no edges")
    k = net.degrees
    u, v = net.edges[:, 0], net.edges[:, 1]
    x = np.concatenate([k[u], k[v]]).astype(float) - 1.0
    y = np.concatenate([k[v], k[u]]).astype(float) - 1.0
    xc = x - x.mean()
    yc = y - y.mean()
    var = float(np.dot(xc, xc))
    if var == 0.0:
        raise DegenerateVariance("all edge ends have the same degree")
    return float(np.dot(xc, yc) / var)


def geodesic_stats(net: PhonNetwork, scope="giant", *, _comps=None):
    """Exact mean shortest-path length and diameter over a connected scope.

    The mean runs over ordered pairs of distinct nodes.
    """
    nodes = _resolve_scope(net, scope, _comps)
    n = len(nodes)
    if n <= 1:
        return 0.0, 0
    sub = net.adjacency[nodes][:, nodes]
    ncomp, _ = csgraph.connected_components(sub, directed=False)
    if ncomp != 1:
        raise DisconnectedScope(f"scope splits into {ncomp} components")
    total = 0
    dmax = 0
    for start in range(0, n, _BFS_CHUNK):
        idx = np.arange(start, min(start + _BFS_CHUNK, n))
        dist = csgraph.shortest_path(sub, method="D", directed=False,
                                     unweighted=True, indices=idx)
        total += int(dist.sum())
        dmax = max(dmax, int(dist.max()))
    return total / (n * (n - 1)), dmax


def layer_link_counts(net: PhonNetwork):
    if net.n_edges == 0:
        return 0, 0
    lu = net.lengths[net.edges[:, 0]]
    lv = net.lengths[net.edges[:, 1]]
    intra = int(np.sum(lu == lv))
    return intra, net.n_edges - intra


def layer_link_ratio(net: PhonNetwork) -> float:
    """Intra-layer over inter-layer link count."""
    intra, inter = layer_link_counts(net)
    if inter == 0:
        raise NoInterLayerLinks("no links between words of different length")
    return intra / inter


@dataclass(frozen=True)
class NetStats:
    L: int
    L0: int
    lr: float
    gc: int
    k_max: int
    CC: float
    a: float
    d: float
    d_max: int
    n_nodes: int = 0
    n_components: int = 0
    mean_island_size: float = float("nan")
    scope: str = "giant"
    gc_tie_broken: bool = False
    warnings: tuple = ()

    def row(self) -> list:
        return [getattr(self, c) for c in STAT_COLUMNS + EXTRA_COLUMNS]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["warnings"] = list(self.warnings)
        return d

    @classmethod
    def numeric_fields(cls):
        return STAT_COLUMNS + EXTRA_COLUMNS


@dataclass(frozen=True)
class DistributionBundle:
    degree_histogram: dict
    component_sizes: dict
    mean_degree_by_length: dict
    clustering_by_degree: dict
    giant_length_histogram: dict
    length_histogram: dict = field(default_factory=dict)


def net_stats(net: PhonNetwork, scope: str = "giant", *, with_geodesics: bool = True):
    """All summary measures plus the distribution curves.

    Errors in individual measures are recorded in ``NetStats.warnings`` and
    the value is set to NaN.  ``scope`` is ``"giant"`` or ``"all"`` and
    applies to CC, d and d_max; the whole-network d/d_max is only defined
    when the network is connected.
    """
    warnings = []
    comps = component_stats(net)
    giant = comps.giant
    in_giant = np.zeros(net.n_nodes, dtype=bool)
    in_giant[giant] = True
    L = net.n_edges
    L0 = int(np.sum(in_giant[net.edges[:, 0]])) if L else 0
    try:
        lr = layer_link_ratio(net)
    except NoInterLayerLinks as exc:
        lr = float("nan")
        warnings.append(f"lr: {exc}")
    local = local_clustering(net)
    CC, cc_curve = clustering(net, scope, _local=local, _comps=comps)
    try:
        a = assortativity(net)
    except DegenerateVariance as exc:
        a = float("nan")
        warnings.append(f"a: {exc}")
    d, d_max = float("nan"), -1
    if with_geodesics:
        try:
            d, d_max = geodesic_stats(net, scope, _comps=comps)
        except DisconnectedScope as exc:
            warnings.append(f"d: {exc}")
    k = net.degrees
    stats = NetStats(
        L=L, L0=L0, lr=lr, gc=len(giant), k_max=int(k.max()) if len(k) else 0,
        CC=CC, a=a, d=d, d_max=d_max, n_nodes=net.n_nodes,
        n_components=comps.n_components, mean_island_size=comps.mean_island_size,
        scope=scope, gc_tie_broken=comps.tie_broken, warnings=tuple(warnings))

    kvals, kcounts = np.unique(k, return_counts=True)
    lvals = np.unique(net.lengths)
    mean_deg = {int(l): float(k[net.lengths == l].mean()) for l in lvals}
    lhist = {int(l): int(np.sum(net.lengths == l)) for l in lvals}
    gl, gcnt = np.unique(net.lengths[giant], return_counts=True)
    dist = DistributionBundle(
        degree_histogram=dict(zip(kvals.tolist(), kcounts.tolist())),
        component_sizes=comps.size_histogram,
        mean_degree_by_length=mean_deg,
        clustering_by_degree=cc_curve,
        giant_length_histogram=dict(zip(gl.tolist(), gcnt.tolist())),
        length_histogram=lhist,
    )
    return stats, dist
