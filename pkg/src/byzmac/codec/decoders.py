"""Adversary-identifying decoders evaluated by exhaustive enumeration.

Both decoders first find, for each message, the auxiliary sequences that
make its codeword typical with the received word: for user 1 the ``y`` in
``Y^n`` with ``D(P_XYZ || P_X P_Y W) <= eta`` for the joint type of
``(x_m1, y, z)``, and symmetrically for user 2.  A message with at least
one such sequence is a *candidate*.  Messages are 1-based throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidParams, TooLarge
from ..mac_core import all_sequences, batch_counts, batch_mutual_information

DEFAULT_BUDGET = 2**24
PAIR, BLAME1, BLAME2 = "pair", "blame1", "blame2"
ORDERS = ("step2_first", "step3_first")


@dataclass(frozen=True)
class DecoderParams:
    """Typicality slack ``eta`` and the rate/type slacks ``epsilon``, ``delta``.

    ``epsilon`` and ``delta`` default to ``eta / 8``.  ``alpha`` is the
    smallest composition mass the codebook may use.
    """

    eta: float
    epsilon: float | None = None
    delta: float | None = None
    alpha: float = 1e-3
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.epsilon is None:
            object.__setattr__(self, "epsilon", self.eta / 8)
        if self.delta is None:
            object.__setattr__(self, "delta", self.eta / 8)
        if not self.eta > 3 * self.epsilon + 4 * self.delta:
            raise InvalidParams(f"need eta > 3*epsilon + 4*delta, got eta={self.eta}, epsilon={self.epsilon}, delta={self.delta}")
        if min(self.epsilon, self.delta) < 0:
            raise InvalidParams("epsilon and delta must be nonnegative")
        if not self.alpha > 0:
            raise InvalidParams("alpha must be positive")


@dataclass(frozen=True)
class DecoderOutput:
    """Decoder verdict plus the candidate sets that produced it.

    ``fallback`` is ``"both-empty"`` or ``"ambiguous"`` when the pair (1, 1)
    comes from the catch-all rule.  ``stages`` holds the five-step sets.
    """

    kind: str
    m1: int | None = None
    m2: int | None = None
    d1: tuple = ()
    d2: tuple = ()
    fallback: str | None = None
    stages: dict | None = field(default=None, compare=False)

    @property
    def is_pair(self):
        return self.kind == PAIR

    def phi1(self):
        """User-1 component: the decoded message, or the blame symbol."""
        return self.m1 if self.kind == PAIR else self.kind

    def phi2(self):
        return self.m2 if self.kind == PAIR else self.kind

    def label(self):
        if self.kind == PAIR:
            return f"Pair({self.m1},{self.m2})"
        return "Blame1" if self.kind == BLAME1 else "Blame2"

    def to_dict(self):
        out = {"kind": self.kind, "m1": self.m1, "m2": self.m2, "d1": list(self.d1), "d2": list(self.d2), "fallback": self.fallback}
        if self.stages is not None:
            out["stages"] = {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.stages.items()}
        return out

    @classmethod
    def from_dict(cls, d):
        stages = d.get("stages")
        if stages is not None:
            stages = {k: (tuple(v) if isinstance(v, list) else v) for k, v in stages.items()}
        return cls(d["kind"], d["m1"], d["m2"], tuple(d["d1"]), tuple(d["d2"]), d["fallback"], stages)


def pair(m1, m2, d1=(), d2=(), fallback=None, stages=None):
    return DecoderOutput(PAIR, m1, m2, tuple(d1), tuple(d2), fallback, stages)


def blame(user, d1=(), d2=(), stages=None):
    return DecoderOutput(BLAME1 if user == 1 else BLAME2, None, None, tuple(d1), tuple(d2), None, stages)


def output_rule(d1, d2, stages=None):
    """Four-case map from the two candidate sets to a decoder output."""
    d1, d2 = tuple(sorted(d1)), tuple(sorted(d2))
    if len(d1) == 1 and len(d2) == 1:
        return pair(d1[0], d2[0], d1, d2, stages=stages)
    if not d1 and d2:
        return blame(1, d1, d2, stages)
    if d1 and not d2:
        return blame(2, d1, d2, stages)
    cause = "both-empty" if not d1 and not d2 else "ambiguous"
    return pair(1, 1, d1, d2, fallback=cause, stages=stages)


def uniqueness_violated(out):
    """Both sets nonempty and at least one of them has two or more elements."""
    return len(out.d1) >= 1 and len(out.d2) >= 1 and len(out.d1) + len(out.d2) >= 3


def check_budget(codebook, mac, budget, what="exhaustive decoding"):
    n = codebook.n
    cells = (mac.nx**n) * (mac.ny**n) * (mac.nz**n)
    if cells > budget:
        raise TooLarge(what, cells, budget)


def _batch_divergence(counts, w, n):
    """``D(P_XYZ || P_X P_Y W)`` for a batch of ``(x, y, z)`` joint types."""
    p = counts / n
    b = p.shape[0]
    px = p.sum(axis=(2, 3))
    py = p.sum(axis=(1, 3))
    q = px[:, :, None, None] * py[:, None, :, None] * w[None]
    pos = p > 0
    bad = (pos & (q <= 0)).reshape(b, -1).any(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(pos, p * np.log2(np.where(pos, p, 1.0) / np.where(q > 0, q, 1.0)), 0.0)
    d = np.maximum(t.reshape(b, -1).sum(axis=1), 0.0)
    d[bad] = np.inf
    return d


class _Explainer:
    """Typicality sets and mutual-information tests for one received word."""

    # axis layout of the five-way joint types: X, Y, second, third, Z
    def __init__(self, codebook, mac, z, params):
        check_budget(codebook, mac, params.budget)
        self.cb = codebook
        self.mac = mac
        self.eta = params.eta
        self.z = np.asarray(z, dtype=np.int64)
        if self.z.shape != (codebook.n,):
            raise InvalidParams(f"received word must have length {codebook.n}")
        n = codebook.n
        nx, ny, nz = mac.nx, mac.ny, mac.nz
        xs = all_sequences(nx, n)
        ys = all_sequences(ny, n)
        self.ys1 = []  # per m1: typical y sequences
        for x in codebook.words1:
            d = _batch_divergence(batch_counts([x, ys, self.z], (nx, ny, nz)), mac.w, n)
            self.ys1.append(ys[d <= self.eta])
        self.xs2 = []  # per m2: typical x sequences
        for y in codebook.words2:
            d = _batch_divergence(batch_counts([xs, y, self.z], (nx, ny, nz)), mac.w, n)
            self.xs2.append(xs[d <= self.eta])
        self.cand1 = [m for m in range(1, codebook.N1 + 1) if len(self.ys1[m - 1])]
        self.cand2 = [m for m in range(1, codebook.N2 + 1) if len(self.xs2[m - 1])]

    def _mi1(self, m1, ybar, second, third, sizes):
        """``I(second third; X Z | Y)`` on ``(x_m1, ybar, second, third, z)`` for each ybar."""
        nx, ny, nz = self.mac.nx, self.mac.ny, self.mac.nz
        counts = batch_counts([self.cb.word1(m1), ybar, second, third, self.z], (nx, ny) + sizes + (nz,))
        return batch_mutual_information(counts / self.cb.n, {2, 3}, {0, 4}, {1})

    def _mi2(self, m2, xbar, second, third, sizes):
        """``I(second third; Y Z | X)`` on ``(xbar, y_m2, second, third, z)`` for each xbar."""
        nx, ny, nz = self.mac.nx, self.mac.ny, self.mac.nz
        counts = batch_counts([xbar, self.cb.word2(m2), second, third, self.z], (nx, ny) + sizes + (nz,))
        return batch_mutual_information(counts / self.cb.n, {2, 3}, {1, 4}, {0})

    def explains1(self, m1, cross, pairs2, strict=True):
        """Does some typical ``y`` keep every competing MI below ``eta``?

        ``cross`` lists ``(m~1, m~2)`` competitors for ``I(X~Y~;XZ|Y)`` and
        ``pairs2`` lists ``(m~21, m~22)`` for ``I(Y~1Y~2;XZ|Y)``.  With
        ``strict=False`` the comparison is ``<= eta``.
        """
        nx, ny = self.mac.nx, self.mac.ny
        tests = [(self.cb.word1(a), self.cb.word2(b), (nx, ny)) for a, b in cross]
        tests += [(self.cb.word2(a), self.cb.word2(b), (ny, ny)) for a, b in pairs2]
        return self._any_survivor(self._mi1, m1, self.ys1[m1 - 1], tests, strict)

    def explains2(self, m2, cross, pairs1, strict=True):
        """Mirror of :meth:`explains1`; ``pairs1`` are user-1 message pairs."""
        nx, ny = self.mac.nx, self.mac.ny
        tests = [(self.cb.word1(a), self.cb.word2(b), (nx, ny)) for a, b in cross]
        tests += [(self.cb.word1(a), self.cb.word1(b), (nx, nx)) for a, b in pairs1]
        return self._any_survivor(self._mi2, m2, self.xs2[m2 - 1], tests, strict)

    def _any_survivor(self, mi, m, aux, tests, strict):
        below = np.less if strict else np.less_equal
        for second, third, sizes in tests:
            aux = aux[below(mi(m, aux, second, third, sizes), self.eta)]
            if len(aux) == 0:
                return False
        return len(aux) > 0


def decode_feasibility(codebook, mac, z_vec, params):
    """Typicality decoder with competing-pair mutual-information caps.

    ``m1`` is kept when one typical ``y`` satisfies, simultaneously, the
    cross test against every candidate pair ``(m~1 != m1, m~2)`` and the
    pair test against every two distinct user-2 candidates.  User 2 mirrors.

    Returns
    -------
    DecoderOutput
        Pair, Blame1 or Blame2 with the candidate sets ``d1``, ``d2``.
    """
    ex = _Explainer(codebook, mac, z_vec, params)
    c1, c2 = ex.cand1, ex.cand2
    pairs2 = list(itertools.combinations(c2, 2))
    pairs1 = list(itertools.combinations(c1, 2))
    d1 = []
    for m1 in c1:
        cross = [(a, b) for a in c1 if a != m1 for b in c2]
        if ex.explains1(m1, cross, pairs2):
            d1.append(m1)
    d2 = []
    for m2 in c2:
        cross = [(a, b) for a in c1 for b in c2 if b != m2]
        if ex.explains2(m2, cross, pairs1):
            d2.append(m2)
    return output_rule(d1, d2)


def decode_five_step(codebook, mac, z_vec, params, order="step2_first"):
    """Sequential-pruning decoder.

    Step 1 takes the candidates ``A1``, ``B1``.  Steps 2 and 3 prune each
    side against distinct pairs of the other side's survivors; steps 4 and 5
    prune against competing cross pairs.  A message survives a step when some
    typical auxiliary sequence keeps every relevant mutual information at most
    ``eta``.  ``order="step3_first"`` runs step 3 before step 2.
    """
    if order not in ORDERS:
        raise InvalidParams(f"order must be one of {ORDERS}")
    ex = _Explainer(codebook, mac, z_vec, params)
    a1, b1 = list(ex.cand1), list(ex.cand2)

    def step2(a, b):
        pairs = list(itertools.combinations(b, 2))
        return [m for m in a if ex.explains1(m, [], pairs, strict=False)]

    def step3(a, b):
        pairs = list(itertools.combinations(a, 2))
        return [m for m in b if ex.explains2(m, [], pairs, strict=False)]

    if order == "step2_first":
        a2 = step2(a1, b1)
        b2 = step3(a2, b1)
    else:
        b2 = step3(a1, b1)
        a2 = step2(a1, b2)
    a3 = [m for m in a2 if ex.explains1(m, [(t, u) for t in a2 if t != m for u in b2], [], strict=False)]
    b3 = [m for m in b2 if ex.explains2(m, [(t, u) for t in a3 for u in b2 if u != m], [], strict=False)]
    stages = {
        "A1": tuple(a1),
        "A2": tuple(a2),
        "A3": tuple(a3),
        "B1": tuple(b1),
        "B2": tuple(b2),
        "B3": tuple(b3),
        "order": order,
    }
    stages["monotone"] = set(a3) <= set(a2) <= set(a1) and set(b3) <= set(b2) <= set(b1)
    return output_rule(a3, b3, stages)


class Decoder:
    """Caching callable wrapper ``z -> DecoderOutput`` around a decoding rule."""

    def __init__(self, fn, name="decoder"):
        self._fn = fn
        self._cache = {}
        self.name = name

    def __call__(self, z):
        key = tuple(int(v) for v in z)
        out = self._cache.get(key)
        if out is None:
            out = self._fn(np.asarray(key, dtype=np.int64))
            self._cache[key] = out
        return out


def feasibility_decoder(codebook, mac, params, five_step=False, order="step2_first"):
    if five_step:
        return Decoder(lambda z: decode_five_step(codebook, mac, z, params, order), "five-step")
    return Decoder(lambda z: decode_feasibility(codebook, mac, z, params), "feasibility")


@dataclass
class SweepResult:
    eta: float
    violations: int
    outputs: list
    monotone: bool


def sweep_outputs(codebook, mac, params, five_step=False, order="step2_first", workers=1):
    """Decode every ``z`` in ``Z^n`` (lexicographic order)."""
    zs = all_sequences(mac.nz, codebook.n)
    if five_step:
        fn = lambda z: decode_five_step(codebook, mac, z, params, order)  # noqa: E731
    else:
        fn = lambda z: decode_feasibility(codebook, mac, z, params)  # noqa: E731
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(fn, zs))
    return [fn(z) for z in zs]


def eta_search(codebook, mac, start=0.5, factor=2.0, min_eta=1e-6, five_step=False, workers=1, **param_kw):
    """Shrink ``eta`` geometrically until an exhaustive sweep has no uniqueness violation.

    Returns the accepted :class:`SweepResult`, or the last one tried when
    ``min_eta`` is reached first (its ``violations`` is then nonzero).
    """
    eta = start
    while True:
        params = DecoderParams(eta, **param_kw)
        outs = sweep_outputs(codebook, mac, params, five_step=five_step, workers=workers)
        bad = sum(uniqueness_violated(o) for o in outs)
        mono = all(o.stages["monotone"] for o in outs) if five_step else True
        result = SweepResult(eta, bad, outs, mono)
        if bad == 0 or eta / factor < min_eta:
            return result
        eta /= factor
