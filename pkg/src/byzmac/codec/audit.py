"""Exhaustive audit of a codebook against the random-codebook guarantees.

Five statements are checked for the user-1 side and five mirrored ones with
the users exchanged (names ending in ``q``).  Fraction statements bound the
share of messages whose codeword, together with other codewords and an
external sequence, has a given joint type; they only bind when their
mutual-information hypothesis holds.  Count statements bound the number of
codeword pairs of a given joint type and always bind.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import TooLarge
from ..mac_core import all_sequences, batch_counts, batch_mutual_information
from .decoders import DEFAULT_BUDGET


def _pos(a):
    return np.maximum(a, 0.0)


@dataclass
class PropertyRecord:
    """Outcome of one audited statement.

    ``lhs`` is the largest bound-relevant left-hand side (a fraction or a
    count) and ``threshold`` the bound it is compared with; for count
    statements both refer to the entry closest to violating its own bound.
    """

    name: str
    kind: str
    lhs: float
    threshold: float
    active: bool
    status: str
    cells: int
    worst: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "name": self.name,
            "kind": self.kind,
            "lhs": self.lhs,
            "threshold": self.threshold,
            "active": self.active,
            "status": self.status,
            "cells": self.cells,
            "worst": self.worst,
        }


def _grid(*sizes):
    """Index grid of all combinations, one column per factor."""
    return np.indices(sizes).reshape(len(sizes), -1).T


def _group(keys, counts_flat, distinct=None):
    """Group rows by ``(keys, type)``; count rows or distinct values of ``distinct``."""
    table = np.column_stack([keys, counts_flat] + ([distinct] if distinct is not None else []))
    if distinct is not None:
        table = np.unique(table, axis=0)[:, :-1]
    uniq, sizes = np.unique(table, axis=0, return_counts=True)
    return uniq, sizes


def _fraction_record(name, groups, sizes, norm, active, n, eps, ncols):
    frac = sizes / norm
    threshold = 2.0 ** (-n * eps / 2)
    cells = int(len(sizes))
    if not active.any():
        return PropertyRecord(name, "fraction", 0.0, threshold, False, "vacuous", cells)
    idx = np.flatnonzero(active)[np.argmax(frac[active])]
    lhs = float(frac[idx])
    worst = {"external": groups[idx, :ncols].tolist(), "type_counts": groups[idx, ncols:].tolist()}
    status = "pass" if lhs <= threshold else "fail"
    return PropertyRecord(name, "fraction", lhs, threshold, True, status, cells, worst)


def _count_record(name, groups, sizes, exponent, n, ncols):
    thresholds = 2.0 ** (n * exponent)
    cells = int(len(sizes))
    if cells == 0:
        return PropertyRecord(name, "count", 0.0, 0.0, False, "vacuous", 0)
    ratio = sizes / thresholds
    idx = int(np.argmax(ratio))
    worst = {
        "external": groups[idx, :ncols].tolist(),
        "type_counts": groups[idx, ncols:].tolist(),
        "max_count": int(sizes.max()),
    }
    status = "pass" if ratio[idx] <= 1.0 else "fail"
    return PropertyRecord(name, "count", float(sizes[idx]), float(thresholds[idx]), True, status, cells, worst)


def _side(words_a, words_b, na, nb, eps, suffix, budget):
    """Audit the five statements with ``words_a`` in the role of user 1."""
    n = words_a.shape[1]
    n1, n2 = words_a.shape[0], words_b.shape[0]
    r1, r2 = np.log2(n1) / n, np.log2(n2) / n
    xs = all_sequences(na, n)
    ys = all_sequences(nb, n)
    records = []

    def guard(rows, what):
        if rows > budget:
            raise TooLarge(f"audit {what}{suffix}", rows, budget)

    def mi(counts, a, b, c=()):
        return batch_mutual_information(counts / n, a, b, c)

    def types(ug, ncols, shape):
        return ug[:, ncols:].reshape((-1,) + shape).astype(float)

    # (1): share of m1 with (x_m1, y) of a given type, for each y
    guard(n1 * len(ys), "1")
    g = _grid(n1, len(ys))
    c = batch_counts([words_a[g[:, 0]], ys[g[:, 1]]], (na, nb))
    ug, sz = _group(g[:, 1:2], c.reshape(len(g), -1))
    t = types(ug, 1, (na, nb))
    active = mi(t, {0}, {1}) > eps
    records.append(_fraction_record("1" + suffix, ug, sz, n1, active, n, eps, 1))

    # (2b): share of m1 with (x_m1, x_m~1, y_m2, y) of a given type for some m~1 != m1, m2
    guard(n1 * n1 * n2 * len(ys), "2b")
    g = _grid(n1, n1, n2, len(ys))
    g = g[g[:, 0] != g[:, 1]]
    if len(g):
        c = batch_counts([words_a[g[:, 0]], words_a[g[:, 1]], words_b[g[:, 2]], ys[g[:, 3]]], (na, na, nb, nb))
        ug, sz = _group(g[:, 3:4], c.reshape(len(g), -1), distinct=g[:, 0])
        t = types(ug, 1, (na, na, nb, nb))
        lhs = mi(t, {0}, {1, 2, 3}) - _pos(r1 - mi(t, {1}, {2, 3})) - _pos(r2 - mi(t, {2}, {3}))
        records.append(_fraction_record("2b" + suffix, ug, sz, n1, lhs > eps, n, eps, 1))
    else:
        records.append(PropertyRecord("2b" + suffix, "fraction", 0.0, 2.0 ** (-n * eps / 2), False, "vacuous", 0))

    # (3b): number of (m~1, m~2) with (x, x_m~1, y_m~2, y) of a given type
    guard(len(xs) * len(ys) * n1 * n2, "3b")
    g = _grid(len(xs), len(ys), n1, n2)
    c = batch_counts([xs[g[:, 0]], words_a[g[:, 2]], words_b[g[:, 3]], ys[g[:, 1]]], (na, na, nb, nb))
    ug, sz = _group(g[:, :2], c.reshape(len(g), -1))
    t = types(ug, 2, (na, na, nb, nb))
    expo = _pos(r1 - mi(t, {1}, {2, 0, 3})) + _pos(r2 - mi(t, {2}, {0, 3})) + eps
    records.append(_count_record("3b" + suffix, ug, sz, expo, n, 2))

    # (4): share of m1 with (x_m1, y_a, y_b, y') of a given type for some a, b
    guard(n1 * n2 * n2 * len(ys), "4")
    g = _grid(n1, n2, n2, len(ys))
    c = batch_counts([words_a[g[:, 0]], words_b[g[:, 1]], words_b[g[:, 2]], ys[g[:, 3]]], (na, nb, nb, nb))
    ug, sz = _group(g[:, 3:4], c.reshape(len(g), -1), distinct=g[:, 0])
    t = types(ug, 1, (na, nb, nb, nb))
    lhs = mi(t, {0}, {1, 2, 3}) - _pos(r2 - mi(t, {1}, {3})) - _pos(r2 - mi(t, {2}, {1, 3}))
    records.append(_fraction_record("4" + suffix, ug, sz, n1, lhs > eps, n, eps, 1))

    # (5): number of (a, b) with (x', y_a, y_b, y') of a given type
    guard(len(xs) * len(ys) * n2 * n2, "5")
    g = _grid(len(xs), len(ys), n2, n2)
    c = batch_counts([xs[g[:, 0]], words_b[g[:, 2]], words_b[g[:, 3]], ys[g[:, 1]]], (na, nb, nb, nb))
    ug, sz = _group(g[:, :2], c.reshape(len(g), -1))
    t = types(ug, 2, (na, nb, nb, nb))
    expo = _pos(r2 - mi(t, {1}, {0, 3})) + _pos(r2 - mi(t, {2}, {1, 0, 3})) + eps
    records.append(_count_record("5" + suffix, ug, sz, expo, n, 2))
    return records


def audit_codebook(codebook, epsilon, mac_alphabets, budget=DEFAULT_BUDGET):
    """Check the ten codebook statements exhaustively at the codebook's blocklength.

    Parameters
    ----------
    codebook : Codebook
    epsilon : float
        Slack in the hypotheses and thresholds (bits).
    mac_alphabets : (int, int)
        Input alphabet sizes ``(|X|, |Y|)``.

    Returns
    -------
    list of PropertyRecord
        Statements ``1, 2b, 3b, 4, 5`` followed by their mirrors ``1q ... 5q``.
        The mirrored fraction statements are normalized by ``N2``.
    """
    nx, ny = mac_alphabets
    records = _side(codebook.words1, codebook.words2, nx, ny, epsilon, "", budget)
    records += _side(codebook.words2, codebook.words1, ny, nx, epsilon, "q", budget)
    return records
