"""Spoofing attacks and the converse bound, evaluated exactly.

A spoofing pair built from a user-1 certificate (``family=1``) holds
``Q_{Y|X~Y~}`` and ``Q_{X|X~X'}``.  Three scenarios are compared for
messages ``i, j`` of user 1 and ``k`` of user 2:

* ``P_ijk``: user 1 sends ``x_i``; user 2 passes ``(x_j, y_k)`` through
  ``Q_{Y|X~Y~}``.
* ``P_jik``: the same with ``i`` and ``j`` exchanged.
* ``Q_ijk``: user 2 sends ``y_k``; user 1 passes ``(x_i, x_j)`` through
  ``Q_{X|X~X'}``.

On a spoofable channel the three output distributions coincide, so no
decoder can tell which user deviated.  ``family=2`` is the mirror image with
``Q_{X|X~Y~}`` and ``Q_{Y|Y~Y'}``, messages ``i, j`` of user 2 and ``k`` of
user 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .codec.codebook import Codebook, RandomizedCode
from .codec.decoders import BLAME1, BLAME2, DEFAULT_BUDGET
from .errors import InvalidParams, TooLarge, TrivialCode
from .mac_core import Kernel, all_sequences, output_distribution

KINDS = ("deterministic_vector", "memoryless_kernel", "spoof_pair")


@dataclass(eq=False)
class SpoofPair:
    family: int
    q_a: Kernel
    q_b: Kernel

    def __post_init__(self):
        if self.family not in (1, 2):
            raise InvalidParams("spoof family must be 1 or 2")
        self.q_a = self.q_a if isinstance(self.q_a, Kernel) else Kernel(np.asarray(self.q_a, float))
        self.q_b = self.q_b if isinstance(self.q_b, Kernel) else Kernel(np.asarray(self.q_b, float))

    @classmethod
    def from_outcome(cls, outcome, family):
        if outcome.certificate is None:
            raise InvalidParams("outcome carries no certificate")
        return cls(family, *outcome.certificate)

    @classmethod
    def uniform(cls, mac, family):
        nx, ny = mac.nx, mac.ny
        if family == 1:
            return cls(1, Kernel.uniform((nx, ny), ny), Kernel.uniform((nx, nx), nx))
        return cls(2, Kernel.uniform((nx, ny), nx), Kernel.uniform((ny, ny), ny))


@dataclass(eq=False)
class Attack:
    """An adversarial strategy for user ``user``.

    ``payload`` is a symbol vector, a per-letter :class:`Kernel` applied to the
    attacker's own codeword of a uniformly drawn message, or a
    :class:`SpoofPair`.
    """

    kind: str
    user: int
    payload: object = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParams(f"attack kind must be one of {KINDS}")
        if self.user not in (1, 2):
            raise InvalidParams("attacking user must be 1 or 2")
        if self.kind == "deterministic_vector":
            self.payload = np.asarray(self.payload, dtype=np.int64)


def _mixture(code, user, m):
    """List of ``(weight, codeword)`` for message ``m`` (stochastic encoders allowed)."""
    if isinstance(code, RandomizedCode):
        encs, wts = (code.encoders1, code.weights1) if user == 1 else (code.encoders2, code.weights2)
        return [(float(w), e[m - 1]) for w, e in zip(wts, encs) if w > 0]
    return [(1.0, code.word1(m) if user == 1 else code.word2(m))]


def _sizes(code):
    return code.N1, code.N2


def attack_input_distribution(attack, code, alphabet, budget=DEFAULT_BUDGET):
    """Exact distribution of the attacker's input over ``alphabet^n`` (lexicographic)."""
    n = code.n
    cells = alphabet**n
    if cells > budget:
        raise TooLarge("attack input distribution", cells, budget)
    n1, n2 = _sizes(code)
    if attack.kind == "deterministic_vector":
        out = np.zeros(cells)
        out[int(np.ravel_multi_index(tuple(attack.payload), (alphabet,) * n))] = 1.0
        return out
    if attack.kind == "memoryless_kernel":
        k = attack.payload.k
        nm = n1 if attack.user == 1 else n2
        out = np.zeros(cells)
        for m in range(1, nm + 1):
            for w, word in _mixture(code, attack.user, m):
                out += w / nm * output_distribution(k[word])
        return out
    sp = attack.payload
    out = np.zeros(cells)
    if sp.family == 1 and attack.user == 2:
        # user 2 simulates user 1 sending x_j while itself sending y_k
        for j, k in itertools.product(range(1, n1 + 1), range(1, n2 + 1)):
            for (wa, xj), (wb, yk) in itertools.product(_mixture(code, 1, j), _mixture(code, 2, k)):
                out += wa * wb / (n1 * n2) * output_distribution(sp.q_a.k[xj, yk])
    elif sp.family == 1:
        for i, j in itertools.product(range(1, n1 + 1), repeat=2):
            for (wa, xi), (wb, xj) in itertools.product(_mixture(code, 1, i), _mixture(code, 1, j)):
                out += wa * wb / (n1 * n1) * output_distribution(sp.q_b.k[xi, xj])
    elif attack.user == 1:
        for k, j in itertools.product(range(1, n1 + 1), range(1, n2 + 1)):
            for (wa, xk), (wb, yj) in itertools.product(_mixture(code, 1, k), _mixture(code, 2, j)):
                out += wa * wb / (n1 * n2) * output_distribution(sp.q_a.k[xk, yj])
    else:
        for i, j in itertools.product(range(1, n2 + 1), repeat=2):
            for (wa, yi), (wb, yj) in itertools.product(_mixture(code, 2, i), _mixture(code, 2, j)):
                out += wa * wb / (n2 * n2) * output_distribution(sp.q_b.k[yi, yj])
    return out


def sample_attack_input(attack, code, alphabet, rng):
    """Draw one attacker input vector (used by Monte Carlo evaluation)."""
    n1, n2 = _sizes(code)

    def draw(kern_rows):
        cum = np.cumsum(kern_rows, axis=-1)
        u = rng.random(len(kern_rows))
        return np.minimum((u[:, None] >= cum).sum(axis=1), alphabet - 1)

    def word(user, m):
        mix = _mixture(code, user, m)
        if len(mix) == 1:
            return mix[0][1]
        w = np.array([a for a, _ in mix])
        return mix[int(rng.choice(len(mix), p=w / w.sum()))][1]

    if attack.kind == "deterministic_vector":
        return attack.payload
    if attack.kind == "memoryless_kernel":
        nm = n1 if attack.user == 1 else n2
        m = int(rng.integers(nm)) + 1
        return draw(attack.payload.k[word(attack.user, m)])
    sp = attack.payload
    if sp.family == 1 and attack.user == 2:
        j, k = int(rng.integers(n1)) + 1, int(rng.integers(n2)) + 1
        return draw(sp.q_a.k[word(1, j), word(2, k)])
    if sp.family == 1:
        i, j = int(rng.integers(n1)) + 1, int(rng.integers(n1)) + 1
        return draw(sp.q_b.k[word(1, i), word(1, j)])
    if attack.user == 1:
        k, j = int(rng.integers(n1)) + 1, int(rng.integers(n2)) + 1
        return draw(sp.q_a.k[word(1, k), word(2, j)])
    i, j = int(rng.integers(n2)) + 1, int(rng.integers(n2)) + 1
    return draw(sp.q_b.k[word(2, i), word(2, j)])


def _rows_user1_honest(w, q_y, x_hon, x_sim, y_sim):
    # per-letter: sum_y Q(y | x_sim, y_sim) W(z | x_hon, y)
    return np.einsum("ty,tyz->tz", q_y[x_sim, y_sim], w[x_hon, :, :])


def _rows_user2_honest(w, q_x, a, b, y_hon):
    # per-letter: sum_x Q(x | a, b) W(z | x, y_hon)
    return np.einsum("tx,txz->tz", q_x[a, b], w[:, y_hon, :].transpose(1, 0, 2))


def spoof_output_dists(code, mac, spoof_pair, i, j, k, budget=DEFAULT_BUDGET):
    """Exact ``(P_ijk, P_jik, Q_ijk)`` over ``Z^n`` in lexicographic order.

    For ``family=1``, ``i, j`` index user-1 messages and ``k`` a user-2
    message; ``family=2`` swaps the roles.
    """
    n = code.n
    cells = mac.nz**n
    if cells > budget:
        raise TooLarge("spoof output distributions", cells, budget)
    sp = spoof_pair
    w = mac.w
    qa, qb = sp.q_a.k, sp.q_b.k
    first = 1 if sp.family == 1 else 2
    other = 3 - first
    p_ijk = np.zeros(cells)
    p_jik = np.zeros(cells)
    q_ijk = np.zeros(cells)
    mixes = itertools.product(_mixture(code, first, i), _mixture(code, first, j), _mixture(code, other, k))
    for (wi, ui), (wj, uj), (wk, vk) in mixes:
        wt = wi * wj * wk
        if sp.family == 1:
            # ui, uj are user-1 words, vk a user-2 word
            p_ijk += wt * output_distribution(_rows_user1_honest(w, qa, ui, uj, vk))
            p_jik += wt * output_distribution(_rows_user1_honest(w, qa, uj, ui, vk))
            q_ijk += wt * output_distribution(_rows_user2_honest(w, qb, ui, uj, vk))
        else:
            # ui, uj are user-2 words, vk a user-1 word
            p_ijk += wt * output_distribution(_rows_user2_honest(w, qa, vk, uj, ui))
            p_jik += wt * output_distribution(_rows_user2_honest(w, qa, vk, ui, uj))
            q_ijk += wt * output_distribution(_rows_user1_honest(w, qb, vk, ui, uj))
    return p_ijk, p_jik, q_ijk


def decoder_table(decoder, nz, n):
    """Decoder components over all of ``Z^n``: message number or -1 (Blame1) / -2 (Blame2)."""
    zs = all_sequences(nz, n)
    phi1 = np.empty(len(zs), dtype=np.int64)
    phi2 = np.empty(len(zs), dtype=np.int64)
    code_of = {BLAME1: -1, BLAME2: -2}
    for idx, z in enumerate(zs):
        out = decoder(z)
        if out.is_pair:
            phi1[idx], phi2[idx] = out.m1, out.m2
        else:
            phi1[idx] = phi2[idx] = code_of[out.kind]
    return phi1, phi2


@dataclass
class ConverseReport:
    family: int
    p_mal_spoof_a: float
    p_mal_spoof_b: float
    p_mal_spoof_other: float
    lhs: float
    rhs: float
    pe_lower: float
    holds: bool
    max_gap: float

    def __post_init__(self):
        for name in ("p_mal_spoof_a", "p_mal_spoof_b", "p_mal_spoof_other", "lhs", "rhs", "pe_lower", "max_gap"):
            setattr(self, name, float(getattr(self, name)))
        self.holds = bool(self.holds)

    @property
    def p_mal1_spoof(self):
        return self.p_mal_spoof_other if self.family == 1 else self.p_mal_spoof_a

    @property
    def p_mal2_spoof(self):
        return self.p_mal_spoof_a if self.family == 1 else self.p_mal_spoof_other

    def to_dict(self):
        return {
            "family": self.family,
            "p_mal1_spoof": self.p_mal1_spoof,
            "p_mal2_spoof": self.p_mal2_spoof,
            "scenario_sums": [self.p_mal_spoof_a, self.p_mal_spoof_b, self.p_mal_spoof_other],
            "lhs": self.lhs,
            "rhs": self.rhs,
            "pe_lower": self.pe_lower,
            "holds": self.holds,
            "max_gap": self.max_gap,
        }


def converse_bound_eval(code, decoder, mac, spoof_pair, budget=DEFAULT_BUDGET):
    """Exact error sums of the three spoofing scenarios.

    For ``family=1`` the sums are, with weight ``1 / (N1^2 N2)`` over all
    ``(i, j, k)``: ``P_ijk(phi_1 not in {i, Blame2})``,
    ``P_jik(phi_1 not in {j, Blame2})`` and ``Q_ijk(phi_2 not in {k, Blame1})``.
    Their total is at least ``(N1 - 1) / (2 N1)`` whenever the three
    distributions coincide, and the largest of the three is a lower bound on
    the code's maximal error.
    """
    sp = spoof_pair
    n1, n2 = _sizes(code)
    nself, nother = (n1, n2) if sp.family == 1 else (n2, n1)
    if nself < 2:
        raise TrivialCode(f"user {sp.family} needs at least two messages")
    phi1, phi2 = decoder_table(decoder, mac.nz, code.n)
    # the spoofed user's decoded component and the blame that excuses it
    mine, excuse_mine = (phi1, -2) if sp.family == 1 else (phi2, -1)
    theirs, excuse_theirs = (phi2, -1) if sp.family == 1 else (phi1, -2)
    s_a = s_b = s_c = 0.0
    gap = 0.0
    for i, j in itertools.product(range(1, nself + 1), repeat=2):
        bad_i = (mine != i) & (mine != excuse_mine)
        bad_j = (mine != j) & (mine != excuse_mine)
        for k in range(1, nother + 1):
            p_ijk, p_jik, q_ijk = spoof_output_dists(code, mac, sp, i, j, k, budget)
            s_a += p_ijk[bad_i].sum()
            s_b += p_jik[bad_j].sum()
            s_c += q_ijk[(theirs != k) & (theirs != excuse_theirs)].sum()
            gap = max(gap, np.abs(p_ijk - p_jik).max(), np.abs(p_ijk - q_ijk).max(), np.abs(p_jik - q_ijk).max())
    norm = nself * nself * nother
    s_a, s_b, s_c = s_a / norm, s_b / norm, s_c / norm
    lhs = s_a + s_b + s_c
    rhs = (nself - 1) / (2 * nself)
    return ConverseReport(sp.family, s_a, s_b, s_c, lhs, rhs, rhs / 3, lhs >= rhs - 1e-9, float(gap))


__all__ = [
    "Attack",
    "Codebook",
    "ConverseReport",
    "SpoofPair",
    "attack_input_distribution",
    "converse_bound_eval",
    "decoder_table",
    "sample_attack_input",
    "spoof_output_dists",
]
