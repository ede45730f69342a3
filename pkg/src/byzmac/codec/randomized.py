"""Sampling-based reduction of randomized codes and two-phase composition."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SizeMismatch
from .codebook import Codebook, RandomizedCode
from .decoders import DEFAULT_BUDGET, Decoder, blame, pair


@dataclass
class Derandomized:
    """Reduced code, the sampled encoder indices, and before/after error reports."""

    code: RandomizedCode
    indices1: np.ndarray
    indices2: np.ndarray
    before: object
    after: object


def derandomize(randomized_code, mac, seed, attack_budget=None, budget=DEFAULT_BUDGET, evaluate=True):
    """Keep ``n^2`` encoders per user drawn i.i.d. from the shared-randomness weights.

    The reduced code uses uniform weights over the sampled encoders (repeats
    allowed) and the matching decoders.  Both codes are evaluated exactly;
    ``attack_budget`` (``{1: vectors, 2: vectors}``) restricts the adversary
    maxima when full enumeration is too large.  Nothing guarantees that the
    reduced code is as good as the original; the reports just measure it.
    """
    from ..sim import exact_error_probabilities

    rc = randomized_code
    size = rc.n**2
    rng = np.random.default_rng(seed)
    idx1 = rng.choice(rc.L1, size=size, p=rc.weights1)
    idx2 = rng.choice(rc.L2, size=size, p=rc.weights2)
    decoders = None
    if rc.decoders is not None:
        decoders = [[rc.decoder(int(a), int(b)) for b in idx2] for a in idx1]
    reduced = RandomizedCode(
        [rc.encoders1[a] for a in idx1],
        [rc.encoders2[b] for b in idx2],
        decoders=decoders,
        meta={"derandomized_from_seed": seed},
    )
    before = after = None
    if evaluate:
        before = exact_error_probabilities(rc, None, mac, attack_budget, budget)
        after = exact_error_probabilities(reduced, None, mac, attack_budget, budget)
    return Derandomized(reduced, idx1, idx2, before, after)


@dataclass
class CompositeCode:
    """Deterministic code made of a short prefix code and a randomized suffix code.

    Composite message ``(l - 1) * N + m`` sends the prefix codeword of ``l``
    followed by codeword ``m`` of encoder ``l``.
    """

    codebook: Codebook
    decoder: Decoder
    k: int
    n: int
    N_inner: tuple = (1, 1)

    def split(self, user, label):
        """Composite label to ``(l, m)``, both 1-based."""
        per = self.N_inner[user - 1]
        return (label - 1) // per + 1, (label - 1) % per + 1


def compose_two_phase(short_code, reduced_code):
    """Two-phase code: the prefix conveys the encoder indices, the suffix the messages.

    Parameters
    ----------
    short_code : (Codebook, callable)
        Prefix code with ``L1`` and ``L2`` messages and its decoder.
    reduced_code : RandomizedCode
        Suffix code with ``L1`` and ``L2`` encoders and a decoder table.

    A Blame verdict from either phase is the composite verdict.
    """
    book, dec = short_code
    rc = reduced_code
    if (book.N1, book.N2) != (rc.L1, rc.L2):
        raise SizeMismatch(f"prefix code has {book.N1}x{book.N2} messages but the suffix code has {rc.L1}x{rc.L2} encoders")
    if rc.decoders is None:
        raise SizeMismatch("suffix code has no decoders")
    k, n = book.n, rc.n
    n1, n2 = rc.N1, rc.N2
    words1 = np.array([np.concatenate([book.word1(l), rc.encoders1[l - 1][m - 1]]) for l in range(1, rc.L1 + 1) for m in range(1, n1 + 1)])
    words2 = np.array([np.concatenate([book.word2(l), rc.encoders2[l - 1][m - 1]]) for l in range(1, rc.L2 + 1) for m in range(1, n2 + 1)])

    def decode(z):
        head = dec(z[:k])
        if not head.is_pair:
            return blame(1 if head.kind == "blame1" else 2)
        l1, l2 = head.m1, head.m2
        tail = rc.decoder(l1 - 1, l2 - 1)(z[k:])
        if not tail.is_pair:
            return blame(1 if tail.kind == "blame1" else 2)
        return pair((l1 - 1) * n1 + tail.m1, (l2 - 1) * n2 + tail.m2, fallback=head.fallback or tail.fallback)

    return CompositeCode(Codebook(words1, words2), Decoder(decode, "two-phase"), k, n, (n1, n2))
