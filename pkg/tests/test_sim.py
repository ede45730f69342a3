import itertools

import numpy as np
import pytest

from byzmac.attack import Attack, SpoofPair
from byzmac.codec import Codebook, RandomizedCode, build_erasure_example_code
from byzmac.codec.decoders import Decoder, pair
from byzmac.errors import InvalidParams, TooLarge
from byzmac.mac_core import Kernel
from byzmac.sim import ErrorReport, exact_attack_error, exact_error_probabilities, monte_carlo_error

from conftest import random_mac


def _dense_errors(code, decoder, mac):
    # dense oracle: full output distributions over Z^n for every input pair
    n = code.n
    zs = list(itertools.product(range(mac.nz), repeat=n))
    outs = [decoder(np.array(z)) for z in zs]

    def dist(x, y):
        d = np.ones(1)
        for t in range(n):
            d = np.kron(d, mac.w[x[t], y[t]])
        return d

    hon = np.mean([sum(p for p, o in zip(dist(code.word1(a), code.word2(b)), outs) if (o.phi1(), o.phi2()) != (a, b))
                   for a in range(1, code.N1 + 1) for b in range(1, code.N2 + 1)])
    mal1 = max(np.mean([sum(p for p, o in zip(dist(v, code.word2(b)), outs) if o.phi2() not in (b, "blame1"))
                        for b in range(1, code.N2 + 1)]) for v in itertools.product(range(mac.nx), repeat=n))
    mal2 = max(np.mean([sum(p for p, o in zip(dist(code.word1(a), v), outs) if o.phi1() not in (a, "blame2"))
                        for a in range(1, code.N1 + 1)]) for v in itertools.product(range(mac.ny), repeat=n))
    return hon, mal1, mal2


@pytest.mark.parametrize("n", [3, 4, 5])
def test_erasure_example_closed_form(erasure, n):
    code, dec = build_erasure_example_code(n)
    rep = exact_error_probabilities(code, dec, erasure)
    # only the m1 == m2 pairs are ambiguous and (1, 1) is the fallback
    assert rep.p_hon == pytest.approx((n - 1) / n**2, abs=1e-15)
    assert (rep.p_hon, rep.p_mal1, rep.p_mal2) == pytest.approx(_dense_errors(code, dec, erasure), abs=1e-12)


def test_exact_matches_dense_oracle_on_noisy_channel():
    rng = np.random.default_rng(5)
    mac = random_mac(rng, 2, 2, 2)
    code = Codebook([[0, 1, 1], [1, 0, 0]], [[0, 0, 1], [1, 1, 0]])
    table = {z: pair(1 + z[0], 1 + z[2]) for z in itertools.product((0, 1), repeat=3)}
    dec = Decoder(lambda z: table[tuple(int(v) for v in z)])
    rep = exact_error_probabilities(code, dec, mac)
    assert (rep.p_hon, rep.p_mal1, rep.p_mal2) == pytest.approx(_dense_errors(code, dec, mac), abs=1e-12)
    assert rep.p_e == max(rep.p_hon, rep.p_mal1, rep.p_mal2)


def test_supplied_vectors_give_lower_bound(erasure):
    code, dec = build_erasure_example_code(4)
    full = exact_error_probabilities(code, dec, erasure)
    part = exact_error_probabilities(code, dec, erasure, {1: [[0, 0, 0, 0]], 2: [[1, 1, 1, 1]]})
    assert part.p_mal_is_lower_bound and not full.p_mal_is_lower_bound
    assert part.p_mal1 <= full.p_mal1 and part.p_mal2 <= full.p_mal2
    assert part.worst_attack_vectors == {"1": [0, 0, 0, 0], "2": [1, 1, 1, 1]}


def test_budget_counts_support_cells(erasure):
    code, dec = build_erasure_example_code(4)
    with pytest.raises(TooLarge):
        exact_error_probabilities(code, dec, erasure, budget=10)


def test_attack_error_never_exceeds_support_max(erasure):
    code, dec = build_erasure_example_code(4)
    rng = np.random.default_rng(6)
    for _ in range(5):
        k = Kernel(rng.dirichlet(np.ones(2), size=2))
        err, top = exact_attack_error(code, dec, erasure, Attack("memoryless_kernel", 2, k))
        assert err <= top + 1e-12
    for fam in (1, 2):
        err, top = exact_attack_error(code, dec, erasure, Attack("spoof_pair", fam, SpoofPair.uniform(erasure, fam)))
        assert err <= top + 1e-12
    full = exact_error_probabilities(code, dec, erasure)
    assert top <= max(full.p_mal1, full.p_mal2) + 1e-12


def test_weight_two_attack_is_a_quarter(erasure):
    code, dec = build_erasure_example_code(8)
    err, _ = exact_attack_error(code, dec, erasure, Attack("deterministic_vector", 1, [1, 1, 0, 0, 0, 0, 0, 0]))
    assert err == pytest.approx(0.25)


def test_randomized_singleton_matches_deterministic(erasure):
    code, dec = build_erasure_example_code(4)
    a = exact_error_probabilities(code, dec, erasure)
    b = exact_error_probabilities(RandomizedCode.from_codebook(code, dec), None, erasure)
    assert (a.p_hon, a.p_mal1, a.p_mal2) == pytest.approx((b.p_hon, b.p_mal1, b.p_mal2))


def test_randomized_adversary_picks_its_encoder(erasure):
    code, dec = build_erasure_example_code(3)
    useless = Decoder(lambda z: pair(1, 1))
    rc = RandomizedCode([code.words1, code.words1], [code.words2], [0.5, 0.5], None, [[dec], [useless]])
    rep = exact_error_probabilities(rc, None, erasure)
    good = exact_error_probabilities(code, dec, erasure)
    bad = exact_error_probabilities(code, useless, erasure)
    assert rep.p_hon == pytest.approx((good.p_hon + bad.p_hon) / 2)
    assert rep.p_mal1 == pytest.approx(max(good.p_mal1, bad.p_mal1))
    with pytest.raises(InvalidParams):
        exact_error_probabilities(RandomizedCode([code.words1], [code.words2]), None, erasure)


def test_monte_carlo_agrees_with_exact(erasure):
    code, dec = build_erasure_example_code(5)
    rep = monte_carlo_error(code, dec, erasure, trials=20000, seed=3)
    assert abs(rep.p_hon - 4 / 25) <= 2 * rep.half_widths["p_hon"] + 1e-3
    att = Attack("deterministic_vector", 1, [1, 1, 0, 0, 0])
    exact, _ = exact_attack_error(code, dec, erasure, att)
    mc = monte_carlo_error(code, dec, erasure, att, trials=20000, seed=3)
    assert mc.p_hon is None and mc.p_mal2 is None
    assert abs(mc.p_mal1 - exact) <= 2 * mc.half_widths["p_mal1"] + 1e-3


def test_monte_carlo_worker_invariance(erasure):
    code, dec = build_erasure_example_code(4)
    a = monte_carlo_error(code, dec, erasure, trials=3000, seed=9, workers=1)
    b = monte_carlo_error(code, dec, erasure, trials=3000, seed=9, workers=3)
    assert a.p_hon == b.p_hon
    with pytest.raises(InvalidParams):
        monte_carlo_error(code, dec, erasure, trials=0)
    with pytest.raises(InvalidParams):
        monte_carlo_error(code, dec, erasure, adversary_strategy="sneaky")


def test_report_round_trip():
    rep = ErrorReport(np.float64(0.1), None, 0.25, "monte_carlo", 100, 1, {"p_hon": 0.05})
    assert type(rep.p_hon) is float
    again = ErrorReport.from_dict(rep.to_dict())
    assert again.to_dict() == rep.to_dict()
    assert again.p_e == 0.25
