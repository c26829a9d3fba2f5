"""Edit distance, the edit-distance-1 neighbour index, and layer arithmetic."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .exceptions import DuplicateInsert, MissingRemove

HOLE = b"\xff"


def edit_distance(u, v) -> int:
    """Unit-cost Levenshtein distance between two phoneme sequences."""
    if len(u) < len(v):
        u, v = v, u
    prev = list(range(len(v) + 1))
    for i, a in enumerate(u, 1):
        cur = [i]
        for j, b in enumerate(v, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a != b)))
        prev = cur
    return prev[-1]


def substitution_keys(w: bytes) -> list:
    return [w[:i] + HOLE + w[i + 1:] for i in range(len(w))]


def deletion_variants(w: bytes) -> set:
    return {w[:i] + w[i + 1:] for i in range(len(w))}


class NeighborIndex:
    """Incremental index of a word set under edit-distance-1 adjacency.

    Two key families make every query linear in word length:

    * substitution buckets ``w[:i] + HOLE + w[i+1:]`` collect same-length
      words that differ at position ``i`` only;
    * deletion keys map each delete-one variant of an indexed word back to
      the word, so a query for ``w`` finds longer neighbours under ``w``
      itself and shorter ones by looking its own variants up in ``occupancy``.

    The index also keeps the adjacency sets of indexed words so degrees are
    O(1).  Word ids are chosen by the caller and must be hashable.
    """

    def __init__(self):
        self.occupancy = {}      # word -> id
        self.words = {}          # id -> word
        self._subs = {}          # substitution key -> set of ids
        self._dels = {}          # deletion variant -> set of ids
        self.adjacency = {}      # id -> set of ids

    def __len__(self):
        return len(self.occupancy)

    def __contains__(self, word):
        return word in self.occupancy

    def neighbors(self, word: bytes) -> set:
        """Ids of indexed words at edit distance exactly 1 from ``word``."""
        res = set()
        subs, occ = self._subs, self.occupancy
        n = len(word)
        for i in range(n):
            b = subs.get(word[:i] + HOLE + word[i + 1:])
            if b:
                res |= b
        if n > 1:
            for i in range(n):
                j = occ.get(word[:i] + word[i + 1:])
                if j is not None:
                    res.add(j)
        b = self._dels.get(word)
        if b:
            res |= b
        own = occ.get(word)
        if own is not None:
            res.discard(own)
        return res

    def insert(self, word: bytes, wid, neighbors: Optional[set] = None) -> set:
        """Add ``word`` under id ``wid``; return the ids whose degree changed.

        ``neighbors`` may pass a prospective query result already computed
        for ``word`` against the current state.
        """
        if word in self.occupancy:
            raise DuplicateInsert(word)
        if wid in self.words:
            raise DuplicateInsert(f"id {wid!r} already in use")
        nb = self.neighbors(word) if neighbors is None else neighbors
        self.occupancy[word] = wid
        self.words[wid] = word
        subs, dels = self._subs, self._dels
        for i in range(len(word)):
            key = word[:i] + HOLE + word[i + 1:]
            b = subs.get(key)
            if b is None:
                subs[key] = {wid}
            else:
                b.add(wid)
        if len(word) > 1:
            for v in deletion_variants(word):
                b = dels.get(v)
                if b is None:
                    dels[v] = {wid}
                else:
                    b.add(wid)
        adj = self.adjacency
        for j in nb:
            adj[j].add(wid)
        adj[wid] = set(nb)
        return set(nb)

    def remove(self, word: bytes) -> set:
        """Drop ``word``; return the ids of its former neighbours."""
        wid = self.occupancy.pop(word, None)
        if wid is None:
            raise MissingRemove(word)
        del self.words[wid]
        subs, dels = self._subs, self._dels
        for i in range(len(word)):
            key = word[:i] + HOLE + word[i + 1:]
            b = subs[key]
            b.discard(wid)
            if not b:
                del subs[key]
        if len(word) > 1:
            for v in deletion_variants(word):
                b = dels[v]
                b.discard(wid)
                if not b:
                    del dels[v]
        nb = self.adjacency.pop(wid)
        for j in nb:
            self.adjacency[j].discard(wid)
        return nb

    def degree(self, wid) -> int:
        return len(self.adjacency[wid])

    def edges(self) -> set:
        """Edge set as ``(min id, max id)`` pairs."""
        return {(a, b) if a < b else (b, a)
                for a, nb in self.adjacency.items() for b in nb}

    def n_edges(self) -> int:
        return sum(len(nb) for nb in self.adjacency.values()) // 2

    def state(self) -> tuple:
        """Hashable snapshot of the full internal state, for consistency checks."""
        return (
            frozenset(self.occupancy.items()),
            frozenset((k, frozenset(v)) for k, v in self._subs.items()),
            frozenset((k, frozenset(v)) for k, v in self._dels.items()),
            frozenset((k, frozenset(v)) for k, v in self.adjacency.items()),
        )


def build_index(words: Iterable[bytes]) -> NeighborIndex:
    """Index ``words`` using their positions as ids."""
    idx = NeighborIndex()
    for i, w in enumerate(words):
        idx.insert(w, i)
    return idx


@dataclass(frozen=True)
class LayerProfile:
    alphabet_size: int
    length: int
    layer_size: int
    coordination: int
    occupation: float
    bethe_threshold: float
    regime: str


def layer_profile(alphabet_size: int, length: int, histogram=None) -> LayerProfile:
    """Occupation and Bethe-lattice percolation estimate for one layer.

    The layer holds all ``alphabet_size ** length`` sequences; each has
    ``(alphabet_size - 1) * length`` substitution neighbours and the site
    threshold is estimated as ``1 / (coordination - 1)``.  A fully occupied
    layer is connected and counts as supercritical whatever the estimate.
    """
    if alphabet_size < 2:
        raise ValueError("alphabet_size must be >= 2")
    if length < 1:
        raise ValueError("length must be >= 1")
    layer_size = alphabet_size ** length
    kappa = (alphabet_size - 1) * length
    count = (histogram or {}).get(length, 0)
    if count > layer_size:
        raise ValueError(f"H({length})={count} exceeds the layer size {layer_size}")
    occupation = count / layer_size
    threshold = 1.0 / (kappa - 1) if kappa > 1 else float("inf")
    super_ = occupation > threshold or count == layer_size
    return LayerProfile(alphabet_size, length, layer_size, kappa, occupation,
                        threshold, "supercritical" if super_ else "subcritical")
