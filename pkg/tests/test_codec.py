import itertools
from collections import Counter

import numpy as np
import pytest

from byzmac.codec import (
    BLAME1,
    BLAME2,
    Codebook,
    DecoderParams,
    RandomizedCode,
    audit_codebook,
    build_erasure_example_code,
    compose_two_phase,
    decode_feasibility,
    decode_five_step,
    derandomize,
    eta_search,
    feasibility_decoder,
    generate_constant_composition_codebook,
    output_rule,
    uniqueness_violated,
)
from byzmac.codec.decoders import Decoder, blame, pair
from byzmac.errors import InvalidParams, NonIntegerType, SizeMismatch, TooLarge


def small_code():
    return generate_constant_composition_codebook([1 / 3, 2 / 3], [2 / 3, 1 / 3], 6, 2, 2, seed=0)


def test_generated_words_have_their_composition():
    cb = generate_constant_composition_codebook([0.25, 0.75], [0.5, 0.5], 8, 5, 3, seed=4)
    assert cb.words1.shape == (5, 8) and cb.words2.shape == (3, 8)
    assert np.all(cb.words1.sum(axis=1) == 6)
    assert np.all(cb.words2.sum(axis=1) == 4)
    again = generate_constant_composition_codebook([0.25, 0.75], [0.5, 0.5], 8, 5, 3, seed=4)
    assert np.array_equal(cb.words1, again.words1)


def test_composition_must_be_integral():
    with pytest.raises(NonIntegerType):
        generate_constant_composition_codebook([1 / 3, 2 / 3], [0.5, 0.5], 4, 2, 2, seed=0)
    with pytest.raises(InvalidParams):
        Codebook([[0, 1]], [[0, 0]], [0.5, 0.5], [0.5, 0.5])
    with pytest.raises(SizeMismatch):
        Codebook([[0, 1]], [[0, 0, 1]])


def test_rates_and_swap():
    cb = small_code()
    assert cb.rates == pytest.approx((1 / 6, 1 / 6))
    sw = cb.swapped()
    assert np.array_equal(sw.words1, cb.words2) and np.array_equal(sw.comp1, cb.comp2)


def test_output_rule_cases():
    assert output_rule([2], [1]).label() == "Pair(2,1)"
    assert output_rule([], [1]).kind == BLAME1
    assert output_rule([1], []).kind == BLAME2
    assert output_rule([], []).fallback == "both-empty"
    amb = output_rule([1, 2], [1])
    assert amb.fallback == "ambiguous" and uniqueness_violated(amb)
    assert not uniqueness_violated(output_rule([], [1, 2]))


def test_decoder_params_validation():
    assert DecoderParams(0.8).epsilon == pytest.approx(0.1)
    with pytest.raises(InvalidParams):
        DecoderParams(0.5, epsilon=0.1, delta=0.1)


def test_erasure_example_decodes_honest_words():
    code, dec = build_erasure_example_code(5)
    for m1, m2 in itertools.product(range(1, 6), repeat=2):
        z = code.word1(m1) + code.word2(m2)
        out = dec(z)
        if m1 != m2:
            assert out.label() == f"Pair({m1},{m2})"
        else:
            # the all-ones output carries no position information
            assert out.fallback == "ambiguous"


def test_erasure_example_blames_heavy_words():
    code, dec = build_erasure_example_code(4)
    assert dec(np.array([0, 0, 1, 1]) + code.word2(1)).kind == BLAME1
    # an extra 1 hidden under user 2's zero looks like an all-ones user 2
    assert dec(np.array([1, 0, 1, 0]) + code.word2(1)).kind == BLAME2
    assert dec(code.word1(1) + np.array([0, 0, 0, 0])).kind == BLAME2
    with pytest.raises(InvalidParams):
        build_erasure_example_code(2)


def test_eta_search_reaches_uniqueness(erasure):
    cb = small_code()
    for five in (False, True):
        res = eta_search(cb, erasure, five_step=five)
        assert res.violations == 0
        assert res.eta == pytest.approx(0.25)
        assert res.monotone
        assert len(res.outputs) == 3**6


def test_decoders_recover_messages_on_noiseless_sums(erasure):
    cb = small_code()
    # at n = 6 the accepted eta of 0.25 is strict enough to empty both sets
    params = DecoderParams(0.5)
    for m1, m2 in itertools.product((1, 2), repeat=2):
        z = cb.word1(m1) + cb.word2(m2)
        for out in (decode_feasibility(cb, erasure, z, params), decode_five_step(cb, erasure, z, params)):
            assert out.label() == f"Pair({m1},{m2})"


def test_five_step_orders_and_bad_order(erasure):
    cb = small_code()
    params = DecoderParams(0.25)
    z = cb.word1(1) + cb.word2(2)
    a = decode_five_step(cb, erasure, z, params, "step2_first")
    b = decode_five_step(cb, erasure, z, params, "step3_first")
    assert a.label() == b.label()
    with pytest.raises(InvalidParams):
        decode_five_step(cb, erasure, z, params, "sideways")


def test_decoder_budget(erasure):
    cb = generate_constant_composition_codebook([0.5, 0.5], [0.5, 0.5], 10, 2, 2, seed=0)
    with pytest.raises(TooLarge):
        decode_feasibility(cb, erasure, np.ones(10, dtype=int), DecoderParams(0.5, budget=1000))


def _mi(pairs):
    # independent plug-in mutual information from a list of symbol pairs
    n = len(pairs)
    joint = Counter(pairs)
    a = Counter(p[0] for p in pairs)
    b = Counter(p[1] for p in pairs)
    return sum(c / n * np.log2(c * n / (a[u] * b[v])) for (u, v), c in joint.items())


def test_audit_statement_one_matches_brute_force():
    cb = small_code()
    eps = 0.1
    n = cb.n
    worst = 0.0
    for y in itertools.product((0, 1), repeat=n):
        by_type = Counter()
        for x in cb.words1:
            pairs = list(zip(x.tolist(), y))
            if _mi(pairs) > eps:
                by_type[tuple(sorted(Counter(pairs).items()))] += 1
        if by_type:
            worst = max(worst, max(by_type.values()) / cb.N1)
    rec = {r.name: r for r in audit_codebook(cb, eps, (2, 2))}
    assert rec["1"].lhs == pytest.approx(worst)
    assert rec["1"].threshold == pytest.approx(2 ** (-n * eps / 2))
    assert rec["1"].status == ("pass" if worst <= rec["1"].threshold else "fail")


def test_audit_returns_ten_records():
    names = [r.name for r in audit_codebook(small_code(), 0.1, (2, 2))]
    assert names == ["1", "2b", "3b", "4", "5", "1q", "2bq", "3bq", "4q", "5q"]
    with pytest.raises(TooLarge):
        audit_codebook(small_code(), 0.1, (2, 2), budget=10)


def test_derandomize_singleton_is_unchanged(erasure):
    code, dec = build_erasure_example_code(4)
    rc = RandomizedCode.from_codebook(code, dec)
    res = derandomize(rc, erasure, seed=1)
    assert res.code.L1 == 16 and np.all(res.indices1 == 0)
    assert res.before.p_hon == pytest.approx(res.after.p_hon)
    assert res.before.p_mal1 == pytest.approx(res.after.p_mal1)


def test_derandomize_draws_from_weights(erasure):
    code, dec = build_erasure_example_code(3)
    rc = RandomizedCode([code.words1] * 3, [code.words2] * 2, [0.0, 1.0, 0.0], None, [[dec] * 2] * 3)
    res = derandomize(rc, erasure, seed=5, evaluate=False)
    assert np.all(res.indices1 == 1)
    assert res.code.L1 == 9 and res.code.L2 == 9
    assert res.before is None


def test_compose_two_phase_on_noiseless_channel():
    # prefix: user 1 sends one bit, user 2 sends nothing informative
    prefix = Codebook([[0], [1]], [[0]])

    def head(z):
        return pair(int(z[0] // 2) + 1, 1)

    inner = [np.array([[0, 0], [0, 1]]), np.array([[1, 0], [1, 1]])]
    tails = [np.array([[0, 0]])]

    def tail(z):
        return pair(int(z[1] // 2) + 1, 1) if z[0] < 4 else blame(2)

    rc = RandomizedCode(inner, tails, decoders=[[Decoder(tail)], [Decoder(tail)]])
    comp = compose_two_phase((prefix, Decoder(head)), rc)
    assert comp.codebook.N1 == 4 and comp.codebook.n == 3
    for label in range(1, 5):
        z = 2 * comp.codebook.word1(label) + comp.codebook.word2(1)
        out = comp.decoder(z)
        assert out.label() == f"Pair({label},1)"
        l, m = comp.split(1, label)
        assert (l - 1) * 2 + m == label
    # blame in the second phase is the composite verdict
    assert comp.decoder(np.array([0, 0, 0])).is_pair
    bad = RandomizedCode(inner, tails, decoders=[[Decoder(lambda z: blame(2))]] * 2)
    assert compose_two_phase((prefix, Decoder(head)), bad).decoder(np.array([0, 0, 0])).kind == BLAME2
    # blame in the first phase too
    comp2 = compose_two_phase((prefix, Decoder(lambda z: blame(1))), rc)
    assert comp2.decoder(np.array([0, 0, 0])).kind == BLAME1


def test_compose_size_mismatch():
    prefix = Codebook([[0]], [[0]])
    rc = RandomizedCode([np.array([[0]])] * 2, [np.array([[0]])], decoders=[[None], [None]])
    with pytest.raises(SizeMismatch):
        compose_two_phase((prefix, Decoder(lambda z: pair(1, 1))), rc)
    with pytest.raises(SizeMismatch):
        compose_two_phase((Codebook([[0]], [[0]]), None), RandomizedCode([np.array([[0]])], [np.array([[0]])]))


def test_feasibility_decoder_caches(erasure):
    cb = small_code()
    dec = feasibility_decoder(cb, erasure, DecoderParams(0.25))
    z = cb.word1(1) + cb.word2(1)
    assert dec(z) is dec(z.tolist())
