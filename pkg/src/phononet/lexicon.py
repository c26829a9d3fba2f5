"""Phoneme inventories, transcription parsing and lexicon statistics.

Words are stored as ``bytes``: byte ``i`` is the inventory id of the i-th
phoneme.  This keeps hashing and slicing cheap in the neighbour index and
caps inventories at 255 symbols (0xFF is reserved as a wildcard).
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .exceptions import EmptyAfterStripping, EmptyLexicon, UntokenizableInput

logger = logging.getLogger(__name__)

PhonWord = bytes

DEFAULT_STRIP_SET = frozenset({"ˈ", "ˌ", "ː"})
DEFAULT_MAX_LENGTH = 21
MAX_INVENTORY_SIZE = 255


class PhonemeInventory:
    """Ordered phoneme symbol set; list position is the phoneme id."""

    def __init__(self, symbols: Iterable[str]):
        symbols = tuple(symbols)
        if len(symbols) < 2:
            raise ValueError("an inventory needs at least 2 symbols")
        if len(symbols) > MAX_INVENTORY_SIZE:
            raise ValueError(f"at most {MAX_INVENTORY_SIZE} symbols are supported")
        for s in symbols:
            if not s or any(ch.isspace() for ch in s):
                raise ValueError(f"invalid phoneme symbol {s!r}")
        if len(set(symbols)) != len(symbols):
            dup = [s for s, c in Counter(symbols).items() if c > 1]
            raise ValueError(f"duplicate phoneme symbols: {dup}")
        self.symbols = symbols
        self.index = {s: i for i, s in enumerate(symbols)}
        self._max_len = max(len(s) for s in symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __eq__(self, other) -> bool:
        return isinstance(other, PhonemeInventory) and self.symbols == other.symbols

    def __hash__(self) -> int:
        return hash(self.symbols)

    def __repr__(self) -> str:
        return f"PhonemeInventory({len(self)} symbols)"

    @classmethod
    def from_file(cls, path) -> "PhonemeInventory":
        return cls(_read_lines(path))

    def render(self, word: PhonWord, sep: str = "") -> str:
        return sep.join(self.symbols[i] for i in word)

    def tokenize(self, text: str) -> PhonWord:
        """Greedy longest-match tokenization. Whitespace separates tokens."""
        ids = []
        pos, n = 0, len(text)
        while pos < n:
            if text[pos].isspace():
                pos += 1
                continue
            for size in range(min(self._max_len, n - pos), 0, -1):
                i = self.index.get(text[pos:pos + size])
                if i is not None:
                    ids.append(i)
                    pos += size
                    break
            else:
                raise UntokenizableInput(
                    f"no phoneme matches {text[pos:]!r} in {text!r}")
        return bytes(ids)


def parse_transcription(raw: str, inventory: PhonemeInventory,
                        strip_set: Iterable[str] = DEFAULT_STRIP_SET) -> PhonWord:
    text = raw
    # longer marks first so a multi-char mark is not split by a shorter one
    for mark in sorted(strip_set, key=len, reverse=True):
        text = text.replace(mark, "")
    if not text.strip():
        raise EmptyAfterStripping(f"nothing left of {raw!r} after stripping marks")
    return inventory.tokenize(text)


@dataclass(frozen=True)
class SkippedRecord:
    line: int
    label: str
    transcription: str
    reason: str


@dataclass(frozen=True, eq=False)
class Lexicon:
    """A deduplicated word repertoire.

    ``words[i]`` is node ``i`` in every network built from the lexicon.
    """

    words: tuple
    inventory: PhonemeInventory
    labels: Optional[tuple] = None
    skipped: tuple = field(default=(), repr=False)
    _members: frozenset = field(init=False, repr=False)

    def __post_init__(self):
        words = tuple(bytes(w) for w in self.words)
        object.__setattr__(self, "words", words)
        members = frozenset(words)
        if len(members) != len(words):
            raise ValueError("lexicon words must be unique")
        if self.labels is not None and len(self.labels) != len(words):
            raise ValueError("labels and words differ in length")
        n = len(self.inventory)
        for w in words:
            if not w:
                raise ValueError("empty word in lexicon")
            if max(w) >= n:
                raise ValueError(f"phoneme id out of range in {w!r}")
        object.__setattr__(self, "_members", members)

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self) -> Iterator[PhonWord]:
        return iter(self.words)

    def __contains__(self, word) -> bool:
        return bytes(word) in self._members

    def __eq__(self, other) -> bool:
        if not isinstance(other, Lexicon):
            return NotImplemented
        return self.inventory == other.inventory and self._members == other._members

    __hash__ = None

    @property
    def lengths(self) -> np.ndarray:
        return np.fromiter((len(w) for w in self.words), dtype=np.int64,
                           count=len(self.words))

    def render(self, word: PhonWord, sep: str = "") -> str:
        return self.inventory.render(word, sep)

    def records(self, sep: str = "") -> list:
        """(label, transcription) pairs, the inverse of :func:`load_lexicon`."""
        labels = self.labels or tuple(f"w{i}" for i in range(len(self.words)))
        return [(lab, self.render(w, sep)) for lab, w in zip(labels, self.words)]


def load_lexicon(records: Iterable[Sequence[str]], inventory: PhonemeInventory,
                 strip_set: Iterable[str] = DEFAULT_STRIP_SET, *,
                 keep_first_homophone: bool = False,
                 max_length: int = DEFAULT_MAX_LENGTH) -> Lexicon:
    """Parse ``(label, transcription)`` records into a homophone-free lexicon.

    By default every member of a homophone clash set is dropped, not just
    the later duplicates.  Unparseable records are skipped and listed in
    ``Lexicon.skipped``.
    """
    strip_set = tuple(strip_set)
    parsed = []
    skipped = []
    for lineno, rec in enumerate(records, 1):
        label, raw = rec[0], rec[1]
        try:
            word = parse_transcription(raw, inventory, strip_set)
        except (UntokenizableInput, EmptyAfterStripping) as exc:
            skipped.append(SkippedRecord(lineno, label, raw, str(exc)))
            continue
        if len(word) > max_length:
            skipped.append(SkippedRecord(lineno, label, raw,
                                         f"longer than {max_length} phonemes"))
            continue
        parsed.append((label, word))
    for s in skipped:
        logger.warning("skipped record %d (%s): %s", s.line, s.label, s.reason)

    counts = Counter(w for _, w in parsed)
    words, labels, seen = [], [], set()
    for label, w in parsed:
        if counts[w] > 1:
            if not keep_first_homophone or w in seen:
                continue
        seen.add(w)
        words.append(w)
        labels.append(label)
    if not words:
        raise EmptyLexicon("no word survived parsing and homophone removal")
    return Lexicon(tuple(words), inventory, tuple(labels), tuple(skipped))


def _read_lines(path) -> list:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                out.append(line)
    return out


def read_records(path) -> list:
    """Read a ``label<TAB>transcription`` file."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            if "\t" in line:
                label, raw = line.split("\t", 1)
            else:
                label = raw = line
            records.append((label, raw))
    return records


def read_strip_set(path) -> frozenset:
    return frozenset(_read_lines(path))


def read_lexicon(path, inventory: PhonemeInventory,
                 strip_set: Iterable[str] = DEFAULT_STRIP_SET, **kwargs) -> Lexicon:
    return load_lexicon(read_records(path), inventory, strip_set, **kwargs)


def write_lexicon(lexicon: Lexicon, path, sep: str = " ") -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for label, tr in lexicon.records(sep):
            fh.write(f"{label}\t{tr}\n")


def length_histogram(lexicon: Lexicon) -> dict:
    """Word count per length, ``{l: H(l)}`` sorted by length."""
    if len(lexicon) == 0:
        raise EmptyLexicon("empty lexicon")
    counts = Counter(len(w) for w in lexicon.words)
    return dict(sorted(counts.items()))


@dataclass(frozen=True, eq=False)
class PhonemeStats:
    """Raw phoneme counts; ``unigram``, ``initial`` and ``bigram`` normalise on access."""

    unigram_counts: np.ndarray
    initial_counts: np.ndarray
    bigram_counts: np.ndarray

    @property
    def n_phonemes(self) -> int:
        return len(self.unigram_counts)

    @staticmethod
    def _normalise(v):
        total = v.sum()
        return v / total if total > 0 else np.zeros_like(v, dtype=float)

    @property
    def unigram(self) -> np.ndarray:
        return self._normalise(self.unigram_counts.astype(float))

    @property
    def initial(self) -> np.ndarray:
        return self._normalise(self.initial_counts.astype(float))

    @property
    def bigram(self) -> np.ndarray:
        counts = self.bigram_counts.astype(float)
        rows = counts.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.where(rows > 0, counts / np.where(rows > 0, rows, 1), 0.0)
        return out

    @classmethod
    def uniform(cls, n_phonemes: int) -> "PhonemeStats":
        ones = np.ones(n_phonemes, dtype=np.int64)
        return cls(ones, ones.copy(), np.ones((n_phonemes, n_phonemes), dtype=np.int64))


def phoneme_stats(lexicon: Lexicon) -> PhonemeStats:
    if len(lexicon) == 0:
        raise EmptyLexicon("empty lexicon")
    n = len(lexicon.inventory)
    uni = np.zeros(n, dtype=np.int64)
    ini = np.zeros(n, dtype=np.int64)
    bi = np.zeros((n, n), dtype=np.int64)
    for w in lexicon.words:
        arr = np.frombuffer(w, dtype=np.uint8)
        np.add.at(uni, arr, 1)
        ini[arr[0]] += 1
        if len(arr) > 1:
            np.add.at(bi, (arr[:-1], arr[1:]), 1)
    return PhonemeStats(uni, ini, bi)


def load_inventory(path=None) -> PhonemeInventory:
    """Read an inventory file, or the bundled 36-symbol English one."""
    if path is None:
        path = Path(__file__).parent / "data" / "english_inventory.txt"
    return PhonemeInventory.from_file(path)
