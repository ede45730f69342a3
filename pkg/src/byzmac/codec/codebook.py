"""Deterministic and randomized codebooks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidParams, NonIntegerType, SizeMismatch
from ..mac_core import as_distribution, composition_counts


def _word_table(words):
    arr = np.asarray(words, dtype=np.int64)
    if arr.ndim != 2:
        raise SizeMismatch(f"codeword table must be 2-d, got shape {arr.shape}")
    return arr


@dataclass(eq=False)
class Codebook:
    """Codeword tables for both users; message ``m`` (1-based) maps to row ``m - 1``.

    ``comp1``/``comp2`` are the common compositions of the codewords, or
    ``None`` for hand-built codes whose words do not share a type.
    """

    words1: np.ndarray
    words2: np.ndarray
    comp1: np.ndarray | None = None
    comp2: np.ndarray | None = None

    def __post_init__(self):
        self.words1 = _word_table(self.words1)
        self.words2 = _word_table(self.words2)
        if self.words1.shape[1] != self.words2.shape[1]:
            raise SizeMismatch("the two users' codewords have different lengths")
        for name, words in (("comp1", self.words1), ("comp2", self.words2)):
            comp = getattr(self, name)
            if comp is None:
                continue
            comp = as_distribution(comp)
            setattr(self, name, comp)
            counts = composition_counts(comp, self.n)
            if counts is None:
                raise NonIntegerType(comp, self.n)
            for w in words:
                got = np.bincount(w, minlength=comp.size)
                if got.size != comp.size or np.any(got != counts):
                    raise InvalidParams(f"codeword {w.tolist()} does not have composition {comp.tolist()}")

    @property
    def n(self):
        return self.words1.shape[1]

    @property
    def N1(self):
        return self.words1.shape[0]

    @property
    def N2(self):
        return self.words2.shape[0]

    @property
    def rates(self):
        return np.log2(self.N1) / self.n, np.log2(self.N2) / self.n

    def word1(self, m):
        return self.words1[m - 1]

    def word2(self, m):
        return self.words2[m - 1]

    def swapped(self):
        """Codebook with the users' roles exchanged (pairs with ``Mac.transpose``)."""
        return Codebook(self.words2, self.words1, self.comp2, self.comp1)


def generate_constant_composition_codebook(comp1, comp2, n, N1, N2, seed):
    """Draw codewords independently and uniformly from the two type classes.

    A uniformly random permutation of a fixed word of the right type is
    uniform on its type class.  Duplicate codewords are kept.

    Raises
    ------
    NonIntegerType
        If ``n * comp`` is not an integer vector.
    """
    comp1 = as_distribution(comp1)
    comp2 = as_distribution(comp2)
    if N1 < 1 or N2 < 1:
        raise InvalidParams("message counts must be positive")
    base = []
    for comp in (comp1, comp2):
        counts = composition_counts(comp, n)
        if counts is None:
            raise NonIntegerType(comp, n)
        base.append(np.repeat(np.arange(comp.size), counts))
    rng = np.random.default_rng(seed)
    words1 = np.array([rng.permutation(base[0]) for _ in range(N1)])
    words2 = np.array([rng.permutation(base[1]) for _ in range(N2)])
    return Codebook(words1, words2, comp1, comp2)


@dataclass(eq=False)
class RandomizedCode:
    """Encoder lists with shared-randomness weights and a decoder per index pair.

    ``decoders[l1][l2]`` decodes when encoders ``l1`` and ``l2`` (0-based) are in
    use.  A code whose decoder table is ``None`` can still serve as a
    stochastic encoder description for the converse computations.
    """

    encoders1: list
    encoders2: list
    weights1: np.ndarray = None
    weights2: np.ndarray = None
    decoders: list | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.encoders1 = [_word_table(e) for e in self.encoders1]
        self.encoders2 = [_word_table(e) for e in self.encoders2]
        shapes1 = {e.shape for e in self.encoders1}
        shapes2 = {e.shape for e in self.encoders2}
        if len(shapes1) != 1 or len(shapes2) != 1:
            raise SizeMismatch("all encoders of a user must share N and n")
        if next(iter(shapes1))[1] != next(iter(shapes2))[1]:
            raise SizeMismatch("the two users' encoders have different blocklengths")
        if self.weights1 is None:
            self.weights1 = np.full(len(self.encoders1), 1.0 / len(self.encoders1))
        if self.weights2 is None:
            self.weights2 = np.full(len(self.encoders2), 1.0 / len(self.encoders2))
        self.weights1 = as_distribution(self.weights1, len(self.encoders1))
        self.weights2 = as_distribution(self.weights2, len(self.encoders2))
        if self.decoders is not None:
            if len(self.decoders) != self.L1 or any(len(row) != self.L2 for row in self.decoders):
                raise SizeMismatch("decoder table must be L1 x L2")

    @property
    def L1(self):
        return len(self.encoders1)

    @property
    def L2(self):
        return len(self.encoders2)

    @property
    def n(self):
        return self.encoders1[0].shape[1]

    @property
    def N1(self):
        return self.encoders1[0].shape[0]

    @property
    def N2(self):
        return self.encoders2[0].shape[0]

    def codebook(self, l1, l2):
        return Codebook(self.encoders1[l1], self.encoders2[l2])

    def decoder(self, l1, l2):
        return self.decoders[l1][l2]

    @classmethod
    def from_codebook(cls, codebook, decoder):
        return cls([codebook.words1], [codebook.words2], decoders=[[decoder]])
