"""Channel and distribution primitives.

Channels are stored as dense probability tables. A two-user MAC ``W(z|x,y)``
is an array indexed ``[x, y, z]`` and an arbitrarily varying MAC adds a state
axis, ``[x, y, s, z]``. All information measures are in bits.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (
    AlphabetMismatch,
    LengthMismatch,
    NegativeEntry,
    NonStochastic,
    OverlappingGroups,
    SymbolOutOfRange,
    UnknownChannel,
)

ROW_TOL = 1e-9
# Divergence against a distribution with a hole in the support.  Python floats
# order +inf correctly, and no code path subtracts two divergences, so the
# value never turns into a NaN.
INFINITE_DIVERGENCE = math.inf


def _check_rows(table, n_in_axes, kind):
    table = np.asarray(table, dtype=float)
    if np.any(table < 0):
        bad = tuple(int(i) for i in np.argwhere(table < 0)[0])
        raise NegativeEntry(f"{kind} has a negative entry at {bad}")
    sums = table.sum(axis=-1)
    dev = np.abs(sums - 1.0)
    if dev.size and dev.max() > ROW_TOL:
        row = tuple(int(i) for i in np.unravel_index(np.argmax(dev), dev.shape))
        raise NonStochastic(row, float(1.0 - sums[row]))
    # absorb the tiny residual so the stored table sums to 1 to machine precision
    return table / sums[..., None]


@dataclass(eq=False)
class Mac:
    """Two-input discrete memoryless channel ``W(z|x,y)``."""

    w: np.ndarray
    label: str = ""

    @property
    def nx(self):
        return self.w.shape[0]

    @property
    def ny(self):
        return self.w.shape[1]

    @property
    def nz(self):
        return self.w.shape[2]

    def transpose(self):
        """Return the channel with the roles of the two users exchanged."""
        return Mac(np.ascontiguousarray(self.w.transpose(1, 0, 2)), label=f"{self.label}^T")

    def __repr__(self):
        return f"Mac(label={self.label!r}, nx={self.nx}, ny={self.ny}, nz={self.nz})"


@dataclass(eq=False)
class AvMac:
    """Arbitrarily varying MAC ``W(z|x,y,s)`` stored as ``w[x, y, s, z]``."""

    w: np.ndarray
    label: str = ""

    @property
    def nx(self):
        return self.w.shape[0]

    @property
    def ny(self):
        return self.w.shape[1]

    @property
    def ns(self):
        return self.w.shape[2]

    @property
    def nz(self):
        return self.w.shape[3]

    def state_mac(self, s):
        return Mac(np.ascontiguousarray(self.w[:, :, s, :]), label=f"{self.label}[s={s}]")

    def mixed(self, p_s):
        """Channel seen under an i.i.d. state distribution ``p_s``."""
        return Mac(np.einsum("xysz,s->xyz", self.w, np.asarray(p_s, float)))

    def __repr__(self):
        return f"AvMac(label={self.label!r}, nx={self.nx}, ny={self.ny}, ns={self.ns}, nz={self.nz})"


@dataclass(eq=False)
class Kernel:
    """Conditional distribution ``K(b|a_1, ..., a_k)``, stored as ``k[a_1, ..., a_k, b]``."""

    k: np.ndarray

    @property
    def input_shape(self):
        return tuple(self.k.shape[:-1])

    @property
    def output_size(self):
        return self.k.shape[-1]

    @classmethod
    def validated(cls, table):
        table = np.asarray(table, dtype=float)
        return cls(_check_rows(table, table.ndim - 1, "kernel"))

    @classmethod
    def uniform(cls, input_shape, output_size):
        shape = tuple(input_shape) + (output_size,)
        return cls(np.full(shape, 1.0 / output_size))

    @classmethod
    def identity(cls, size):
        return cls(np.eye(size))

    def row_deviation(self):
        """Largest stochasticity defect: negative mass or row-sum error."""
        neg = max(0.0, float(-self.k.min())) if self.k.size else 0.0
        sums = np.abs(self.k.sum(axis=-1) - 1.0)
        return max(neg, float(sums.max()) if sums.size else 0.0)

    def to_list(self):
        return self.k.tolist()

    def __repr__(self):
        return f"Kernel(input_shape={self.input_shape}, output_size={self.output_size})"


@dataclass(eq=False)
class JointType:
    """Empirical joint distribution of equal-length symbol vectors."""

    n: int
    var_sizes: tuple
    counts: np.ndarray = field(repr=False)

    @property
    def probs(self):
        return self.counts / self.n

    def fractions(self):
        """Exact rational probabilities, keyed by symbol tuple (nonzero cells only)."""
        return {
            tuple(int(i) for i in idx): Fraction(int(c), self.n)
            for idx, c in np.ndenumerate(self.counts)
            if c
        }

    def marginal(self, axes):
        axes = tuple(axes)
        drop = tuple(a for a in range(len(self.var_sizes)) if a not in axes)
        counts = self.counts.sum(axis=drop) if drop else self.counts
        # sum() keeps the surviving axes in their original order
        order = sorted(axes)
        counts = np.moveaxis(counts, [order.index(a) for a in axes], range(len(axes)))
        return JointType(self.n, tuple(self.var_sizes[a] for a in axes), counts)


def as_distribution(probs, size=None):
    """Validate a probability vector and return it as a float array."""
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or (size is not None and p.size != size):
        raise AlphabetMismatch(f"expected a vector of length {size}, got shape {p.shape}")
    if np.any(p < 0):
        raise NegativeEntry("distribution has a negative entry")
    if abs(p.sum() - 1.0) > ROW_TOL:
        raise NonStochastic((), float(1.0 - p.sum()))
    return p / p.sum()


def validate_mac(raw, label=""):
    """Check a ``[x][y][z]`` table and wrap it as a :class:`Mac`.

    Raises
    ------
    NonStochastic
        If some ``(x, y)`` row sum is off by more than 1e-9.
    NegativeEntry
        If any entry is negative.
    """
    table = np.asarray(raw, dtype=float)
    if table.ndim != 3 or 0 in table.shape:
        raise AlphabetMismatch(f"channel table must be 3-dimensional, got shape {table.shape}")
    return Mac(_check_rows(table, 2, "channel"), label=label)


def validate_avmac(raw, label=""):
    table = np.asarray(raw, dtype=float)
    if table.ndim != 4 or 0 in table.shape:
        raise AlphabetMismatch(f"AV-MAC table must be 4-dimensional, got shape {table.shape}")
    return AvMac(_check_rows(table, 3, "AV-MAC"), label=label)


def mac_from_function(nx, ny, nz, f, label=""):
    """Deterministic channel with output ``f(x, y)``."""
    w = np.zeros((nx, ny, nz))
    for x, y in itertools.product(range(nx), range(ny)):
        w[x, y, f(x, y)] = 1.0
    return Mac(w, label=label)


def identity_channel(nx, ny):
    """Channel revealing both inputs, ``z = x * ny + y``."""
    return mac_from_function(nx, ny, nx * ny, lambda x, y: x * ny + y, label="identity")


def _parallel_ex3(x, y):
    # x = 2*x1 + x2, y = 2*y1 + y2, z = 2*(x1 + y1) + (x2 xor y2)
    return 2 * (x // 2 + y // 2) + ((x % 2) ^ (y % 2))


BUILTINS = {
    "erasure": lambda: mac_from_function(2, 2, 3, lambda x, y: x + y, label="erasure"),
    "xor": lambda: mac_from_function(2, 2, 2, lambda x, y: x ^ y, label="xor"),
    "parallel_ex3": lambda: mac_from_function(4, 4, 6, _parallel_ex3, label="parallel_ex3"),
}


def builtin_channel(name):
    """Return one of the named example channels.

    ``parallel_ex3`` packs the bit pairs as ``x = 2*x1 + x2`` (same for ``y``)
    and the output pair ``(x1 + y1, x2 xor y2)`` as ``z = 2*z1 + z2``.
    """
    try:
        return BUILTINS[name]()
    except KeyError:
        raise UnknownChannel(f"unknown builtin channel {name!r}; known: {sorted(BUILTINS)}") from None


def _as_symbols(vec, size, what):
    v = np.asarray(vec, dtype=np.int64)
    if v.ndim != 1:
        raise LengthMismatch(f"{what} must be a 1-d symbol vector")
    if v.size and (v.min() < 0 or v.max() >= size):
        raise SymbolOutOfRange(f"{what} has a symbol outside [0, {size})")
    return v


def product_channel_prob(mac, x_vec, y_vec, z_vec):
    """Probability ``prod_t W(z_t | x_t, y_t)`` of the n-fold product channel."""
    x = _as_symbols(x_vec, mac.nx, "x")
    y = _as_symbols(y_vec, mac.ny, "y")
    z = _as_symbols(z_vec, mac.nz, "z")
    if not (x.size == y.size == z.size):
        raise LengthMismatch(f"lengths {x.size}, {y.size}, {z.size} differ")
    return float(np.prod(mac.w[x, y, z]))


def output_distribution(rows):
    """Distribution over ``Z^n`` (lexicographic order) of independent letters.

    ``rows`` is an ``(n, nz)`` array of per-letter output distributions.
    """
    out = np.ones(1)
    for r in rows:
        out = np.kron(out, r)
    return out


def joint_type(vectors, sizes=None):
    """Joint type of equal-length symbol vectors.

    Parameters
    ----------
    vectors : sequence of 1-d integer arrays
    sizes : sequence of int, optional
        Alphabet size per coordinate. Defaults to ``max + 1`` of each vector.
    """
    vecs = [np.asarray(v, dtype=np.int64) for v in vectors]
    if not vecs:
        raise LengthMismatch("no vectors given")
    n = vecs[0].size
    if any(v.size != n for v in vecs):
        raise LengthMismatch(f"vector lengths differ: {[v.size for v in vecs]}")
    if sizes is None:
        sizes = [int(v.max()) + 1 if v.size else 1 for v in vecs]
    sizes = tuple(int(s) for s in sizes)
    for v, s in zip(vecs, sizes):
        if v.size and (v.min() < 0 or v.max() >= s):
            raise SymbolOutOfRange(f"symbol outside alphabet of size {s}")
    counts = np.zeros(sizes, dtype=np.int64)
    np.add.at(counts, tuple(vecs), 1)
    return JointType(n, sizes, counts)


def _probs(obj):
    if isinstance(obj, JointType):
        return obj.probs
    return np.asarray(obj, dtype=float)


def entropy(p):
    """Shannon entropy in bits of an array of probabilities (any shape)."""
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def divergence(p, q):
    """Relative entropy ``D(p||q)`` in bits.

    Returns :data:`INFINITE_DIVERGENCE` when ``p`` charges a zero of ``q``.
    """
    p = _probs(p)
    q = _probs(q)
    if p.shape != q.shape:
        raise AlphabetMismatch(f"shapes {p.shape} and {q.shape} differ")
    mask = p > 0
    if np.any(q[mask] <= 0):
        return INFINITE_DIVERGENCE
    d = float(np.sum(p[mask] * np.log2(p[mask] / q[mask])))
    return max(d, 0.0)


def tv_distance(p, q):
    p = _probs(p)
    q = _probs(q)
    if p.shape != q.shape:
        raise AlphabetMismatch(f"shapes {p.shape} and {q.shape} differ")
    return 0.5 * float(np.abs(p - q).sum())


def _marginal_entropy(p, keep):
    drop = tuple(a for a in range(p.ndim) if a not in keep)
    return entropy(p.sum(axis=drop) if drop else p)


def mutual_information(joint, group_a: Sequence[int], group_b: Sequence[int], given: Sequence[int] = ()):
    """Conditional mutual information ``I(A;B|C)`` in bits.

    ``joint`` is a :class:`JointType` or a probability array with one axis per
    coordinate; the groups are sets of axis indices.
    """
    p = _probs(joint)
    a, b, c = set(group_a), set(group_b), set(given)
    if a & b or a & c or b & c:
        raise OverlappingGroups(f"groups {sorted(a)}, {sorted(b)}, {sorted(c)} overlap")
    if not a or not b:
        return 0.0
    if any(i < 0 or i >= p.ndim for i in a | b | c):
        raise AlphabetMismatch(f"coordinate out of range for a {p.ndim}-way joint")
    val = (
        _marginal_entropy(p, a | c)
        + _marginal_entropy(p, b | c)
        - _marginal_entropy(p, a | b | c)
        - _marginal_entropy(p, c)
    )
    return max(val, 0.0)


def type_class_size(counts):
    """Number of sequences with the given symbol counts (multinomial)."""
    counts = [int(c) for c in counts]
    out = math.factorial(sum(counts))
    for c in counts:
        out //= math.factorial(c)
    return out


def composition_counts(comp, n):
    """Integer counts ``n * comp`` or ``None`` when they are not integers."""
    scaled = np.asarray(comp, dtype=float) * n
    counts = np.rint(scaled).astype(np.int64)
    if np.max(np.abs(scaled - counts)) > 1e-9 or counts.sum() != n:
        return None
    return counts


# -- batched helpers used by the exhaustive decoders --------------------------


def all_sequences(q, n):
    """All of ``range(q)^n`` as an ``(q**n, n)`` array in lexicographic order."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grid = np.indices((q,) * n).reshape(n, -1).T
    return np.ascontiguousarray(grid, dtype=np.int64)


def batch_counts(coords, sizes):
    """Joint type counts for a batch of tuples of sequences.

    ``coords`` is a list of integer arrays, each broadcastable to ``(B, n)``.
    Returns an int array of shape ``(B, *sizes)``.
    """
    arrs = np.broadcast_arrays(*[np.asarray(c, dtype=np.int64) for c in coords])
    if arrs[0].ndim == 1:
        arrs = [a[None, :] for a in arrs]
    idx = np.zeros(arrs[0].shape, dtype=np.int64)
    for a, s in zip(arrs, sizes):
        idx = idx * s + a
    k = int(np.prod(sizes))
    b = idx.shape[0]
    flat = idx + (np.arange(b, dtype=np.int64) * k)[:, None]
    counts = np.bincount(flat.ravel(), minlength=b * k)
    return counts.reshape((b,) + tuple(sizes))


def _batch_entropy(p, keep):
    # p has a leading batch axis; keep refers to the remaining axes
    drop = tuple(1 + a for a in range(p.ndim - 1) if a not in keep)
    m = p.sum(axis=drop) if drop else p
    m = m.reshape(m.shape[0], -1)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(m > 0, m * np.log2(np.where(m > 0, m, 1.0)), 0.0)
    return -t.sum(axis=1)


def batch_mutual_information(p, group_a, group_b, given=()):
    """Vectorized :func:`mutual_information` over a leading batch axis."""
    a, b, c = set(group_a), set(group_b), set(given)
    val = (
        _batch_entropy(p, a | c)
        + _batch_entropy(p, b | c)
        - _batch_entropy(p, a | b | c)
        - _batch_entropy(p, c)
    )
    return np.maximum(val, 0.0)
