"""Exact and Monte Carlo evaluation of the three error probabilities.

Error events, for messages ``(m1, m2)``:

* honest: the decoder output differs from ``(m1, m2)``;
* user 1 adversarial: the user-2 component is neither ``m2`` nor Blame1;
* user 2 adversarial: the user-1 component is neither ``m1`` nor Blame2.

Exact evaluation sums over the support of ``W^n(.|x, y)`` only, so sparse
(for instance deterministic) channels stay cheap at larger ``n``.  The
budget counts the visited (input pair, output) cells.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .attack import Attack, attack_input_distribution, sample_attack_input
from .codec.codebook import RandomizedCode
from .codec.decoders import BLAME1, BLAME2, DEFAULT_BUDGET
from .errors import InvalidParams, TooLarge
from .mac_core import all_sequences

Z95 = 1.96
CHUNK = 1000


@dataclass
class ErrorReport:
    """Error probabilities of one code/decoder pair.

    ``p_mal1``/``p_mal2`` are ``None`` when not evaluated.  With supplied
    adversary vectors the malicious maxima only cover those vectors and
    ``p_mal_is_lower_bound`` is set.
    """

    p_hon: float | None
    p_mal1: float | None
    p_mal2: float | None
    mode: str = "exact"
    trials: int | None = None
    seed: int | None = None
    half_widths: dict | None = None
    worst_attack_vectors: dict = field(default_factory=dict)
    p_mal_is_lower_bound: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("p_hon", "p_mal1", "p_mal2"):
            val = getattr(self, name)
            if val is not None:
                setattr(self, name, float(val))

    @property
    def p_e(self):
        vals = [p for p in (self.p_hon, self.p_mal1, self.p_mal2) if p is not None]
        return max(vals) if vals else None

    def to_dict(self):
        return {
            "p_hon": self.p_hon,
            "p_mal1": self.p_mal1,
            "p_mal2": self.p_mal2,
            "p_e": self.p_e,
            "mode": self.mode,
            "trials": self.trials,
            "seed": self.seed,
            "half_widths": self.half_widths,
            "worst_attack_vectors": self.worst_attack_vectors,
            "p_mal_is_lower_bound": self.p_mal_is_lower_bound,
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            d["p_hon"],
            d["p_mal1"],
            d["p_mal2"],
            d["mode"],
            d.get("trials"),
            d.get("seed"),
            d.get("half_widths"),
            {k: list(v) for k, v in (d.get("worst_attack_vectors") or {}).items()},
            d.get("p_mal_is_lower_bound", False),
            d.get("meta") or {},
        )


class ExactEvaluator:
    """Exact error of one deterministic codebook and decoder on a MAC."""

    def __init__(self, code, decoder, mac, budget=DEFAULT_BUDGET):
        self.code = code
        self.decoder = decoder
        self.mac = mac
        self.budget = budget
        self.cells = 0
        self._support = [[np.flatnonzero(mac.w[x, y] > 0) for y in range(mac.ny)] for x in range(mac.nx)]
        self._table = {}

    def _charge(self, x, y):
        size = 1
        for a, b in zip(x, y):
            size *= len(self._support[a][b])
        self.cells += size
        if self.cells > self.budget:
            raise TooLarge("exact error evaluation", self.cells, self.budget)

    def _phi(self, z):
        out = self._table.get(z)
        if out is None:
            d = self.decoder(np.asarray(z, dtype=np.int64))
            out = (d.phi1(), d.phi2())
            self._table[z] = out
        return out

    def _mass(self, x, y, bad):
        """Probability that ``bad(phi1, phi2)`` holds when ``(x, y)`` is sent."""
        self._charge(x, y)
        w = self.mac.w
        supports = [self._support[a][b] for a, b in zip(x, y)]
        total = 0.0
        for z in itertools.product(*supports):
            p = 1.0
            for t, zt in enumerate(z):
                p *= w[x[t], y[t], zt]
            if bad(*self._phi(tuple(int(v) for v in z))):
                total += p
        return total

    def honest(self):
        c = self.code
        total = 0.0
        for m1 in range(1, c.N1 + 1):
            for m2 in range(1, c.N2 + 1):
                total += self._mass(c.word1(m1), c.word2(m2), lambda a, b, m1=m1, m2=m2: (a, b) != (m1, m2))
        return total / (c.N1 * c.N2)

    def malicious(self, user, v):
        """Average error over the honest user's messages when ``user`` sends ``v``."""
        c = self.code
        v = np.asarray(v, dtype=np.int64)
        if v.shape != (c.n,):
            raise InvalidParams(f"attack vector must have length {c.n}")
        total = 0.0
        if user == 1:
            for m2 in range(1, c.N2 + 1):
                total += self._mass(v, c.word2(m2), lambda a, b, m2=m2: b != m2 and b != BLAME1)
            return total / c.N2
        for m1 in range(1, c.N1 + 1):
            total += self._mass(c.word1(m1), v, lambda a, b, m1=m1: a != m1 and a != BLAME2)
        return total / c.N1


def _adversary_list(mac, n, user, adversary_vectors):
    if adversary_vectors is not None and adversary_vectors.get(user) is not None:
        return [np.asarray(v, dtype=np.int64) for v in adversary_vectors[user]], True
    return list(all_sequences(mac.nx if user == 1 else mac.ny, n)), False


def _max_over(values, vectors):
    # ties resolve to the first vector in the given order
    best, arg = -1.0, None
    for val, vec in zip(values, vectors):
        if val > best:
            best, arg = val, vec
    return best, arg


def exact_error_probabilities(code, decoder, mac, adversary_vectors=None, budget=DEFAULT_BUDGET):
    """Exact ``(P_hon, P_mal1, P_mal2)``.

    Parameters
    ----------
    code : Codebook or RandomizedCode
        A randomized code uses its own decoder table; ``decoder`` is ignored.
    adversary_vectors : dict, optional
        ``{1: [...], 2: [...]}`` restricts the adversary maxima to the listed
        vectors; the report is then flagged as a lower bound on ``P_mal``.
    """
    if isinstance(code, RandomizedCode):
        return randomized_error_probabilities(code, mac, adversary_vectors, budget)
    ev = ExactEvaluator(code, decoder, mac, budget)
    p_hon = ev.honest()
    worst = {}
    partial = False
    mal = {}
    for user in (1, 2):
        vecs, supplied = _adversary_list(mac, code.n, user, adversary_vectors)
        partial |= supplied
        best, arg = _max_over((ev.malicious(user, v) for v in vecs), vecs)
        mal[user] = best
        worst[str(user)] = None if arg is None else [int(a) for a in arg]
    return ErrorReport(p_hon, mal[1], mal[2], "exact", worst_attack_vectors=worst, p_mal_is_lower_bound=partial)


def randomized_error_probabilities(rcode, mac, adversary_vectors=None, budget=DEFAULT_BUDGET):
    """Exact errors of a randomized code.

    The honest error averages over both encoder indices.  An adversarial
    user maximizes over its input and its own encoder index, while the
    honest user's index is averaged.
    """
    if rcode.decoders is None:
        raise InvalidParams("randomized code has no decoders")
    evs = [[ExactEvaluator(rcode.codebook(a, b), rcode.decoder(a, b), mac, budget) for b in range(rcode.L2)] for a in range(rcode.L1)]
    w1, w2 = rcode.weights1, rcode.weights2
    p_hon = sum(w1[a] * w2[b] * evs[a][b].honest() for a in range(rcode.L1) for b in range(rcode.L2) if w1[a] * w2[b] > 0)
    mal, worst, partial = {}, {}, False
    for user in (1, 2):
        vecs, supplied = _adversary_list(mac, rcode.n, user, adversary_vectors)
        partial |= supplied
        own, other = (rcode.L1, rcode.L2) if user == 1 else (rcode.L2, rcode.L1)
        w_other = w2 if user == 1 else w1

        def value(v, user=user, own=own, other=other, w_other=w_other):
            best = 0.0
            for a in range(own):
                acc = 0.0
                for b in range(other):
                    if w_other[b] > 0:
                        ev = evs[a][b] if user == 1 else evs[b][a]
                        acc += w_other[b] * ev.malicious(user, v)
                best = max(best, acc)
            return best

        best, arg = _max_over((value(v) for v in vecs), vecs)
        mal[user] = best
        worst[str(user)] = None if arg is None else [int(a) for a in arg]
    return ErrorReport(p_hon, mal[1], mal[2], "exact", worst_attack_vectors=worst, p_mal_is_lower_bound=partial, meta={"randomized": True})


def exact_attack_error(code, decoder, mac, attack, budget=DEFAULT_BUDGET):
    """Exact error of ``attack`` against a deterministic code.

    Returns ``(error, support_max)`` where ``support_max`` is the largest
    error of a deterministic vector in the attack's support; the first never
    exceeds the second.
    """
    alphabet = mac.nx if attack.user == 1 else mac.ny
    dist = attack_input_distribution(attack, code, alphabet, budget)
    vecs = all_sequences(alphabet, code.n)
    ev = ExactEvaluator(code, decoder, mac, budget)
    err, top = 0.0, 0.0
    for idx in np.flatnonzero(dist > 0):
        e = ev.malicious(attack.user, vecs[idx])
        err += dist[idx] * e
        top = max(top, e)
    return err, top


def _draw(rows, rng):
    cum = np.cumsum(rows, axis=-1)
    u = rng.random(len(rows))
    return np.minimum((u[:, None] >= cum).sum(axis=1), rows.shape[-1] - 1)


def _pick(weights, rng):
    if len(weights) == 1:
        return 0
    return int(rng.choice(len(weights), p=weights))


def _trial(code, decoder, mac, strategy, seed, stream, t):
    rng = np.random.default_rng([seed, stream, t])
    if isinstance(code, RandomizedCode):
        l1, l2 = _pick(code.weights1, rng), _pick(code.weights2, rng)
        book, dec = code.codebook(l1, l2), code.decoder(l1, l2)
    else:
        book, dec = code, decoder
    m1 = int(rng.integers(book.N1)) + 1
    m2 = int(rng.integers(book.N2)) + 1
    x, y = book.word1(m1), book.word2(m2)
    if strategy != "honest":
        v = sample_attack_input(strategy, code, mac.nx if strategy.user == 1 else mac.ny, rng)
        if strategy.user == 1:
            x = v
        else:
            y = v
    z = _draw(mac.w[x, y], rng)
    out = dec(z)
    if strategy == "honest":
        return out.phi1() != m1 or out.phi2() != m2
    if strategy.user == 1:
        return out.phi2() not in (m2, BLAME1)
    return out.phi1() not in (m1, BLAME2)


def _count_errors(code, decoder, mac, strategy, seed, stream, start, stop):
    return sum(_trial(code, decoder, mac, strategy, seed, stream, t) for t in range(start, stop))


def monte_carlo_error(code, decoder, mac, adversary_strategy="honest", trials=10_000, seed=0, workers=1):
    """Estimate one error probability by i.i.d. trials.

    ``adversary_strategy`` is ``"honest"`` (estimates ``P_hon``) or an
    :class:`~byzmac.attack.Attack` (estimates the attacked user's error
    under that strategy).  Trial ``t`` draws from
    ``default_rng([seed, stream, t])``, so the estimate does not depend on
    ``workers``.
    """
    if trials < 1:
        raise InvalidParams("trials must be positive")
    if adversary_strategy != "honest" and not isinstance(adversary_strategy, Attack):
        raise InvalidParams("strategy must be 'honest' or an Attack")
    stream = 0 if adversary_strategy == "honest" else adversary_strategy.user
    bounds = [(s, min(s + CHUNK, trials)) for s in range(0, trials, CHUNK)]
    args = (code, decoder, mac, adversary_strategy, seed, stream)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            counts = list(pool.map(lambda b: _count_errors(*args, *b), bounds))
    else:
        counts = [_count_errors(*args, *b) for b in bounds]
    p = sum(counts) / trials
    hw = Z95 * math.sqrt(p * (1 - p) / trials)
    fields = {"p_hon": None, "p_mal1": None, "p_mal2": None}
    key = "p_hon" if adversary_strategy == "honest" else f"p_mal{adversary_strategy.user}"
    fields[key] = p
    meta = {"strategy": "honest" if adversary_strategy == "honest" else adversary_strategy.kind}
    return ErrorReport(**fields, mode="monte_carlo", trials=trials, seed=seed, half_widths={key: hw}, meta=meta)


__all__ = [
    "ErrorReport",
    "ExactEvaluator",
    "exact_attack_error",
    "exact_error_probabilities",
    "monte_carlo_error",
    "randomized_error_probabilities",
]
