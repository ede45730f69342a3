"""Seeded randomized checks of information identities and class implications."""

import math

import numpy as np
import pytest

from byzmac import io
from byzmac.classifier import (
    check_overwritable,
    spoof1_from_overwritable,
    spoof1_problem,
    spoof2_from_overwritable,
    spoof2_problem,
    sym1_from_spoof1,
    sym2_from_spoof2,
    symmetrizable_problem,
)
from byzmac.feasibility import FeasibilityProblem, Verdict, solve_linear_feasibility, verify_certificate
from byzmac.mac_core import Mac, divergence, entropy, mutual_information, tv_distance, type_class_size

from conftest import overwritable2_mac

INSTANCES = 100
LOG2E = 1 / math.log(2)


def test_pinsker():
    rng = np.random.default_rng(100)
    for _ in range(INSTANCES):
        k = int(rng.integers(2, 7))
        p, q = rng.dirichlet(np.ones(k)), rng.dirichlet(np.ones(k))
        assert divergence(p, q) >= 2 * LOG2E * tv_distance(p, q) ** 2 - 1e-12


def test_mutual_information_chain_rule_and_bounds():
    rng = np.random.default_rng(101)
    for _ in range(INSTANCES):
        shape = tuple(int(s) for s in rng.integers(2, 4, size=3))
        p = rng.dirichlet(np.ones(int(np.prod(shape)))).reshape(shape)
        whole = mutual_information(p, {0}, {1, 2})
        parts = mutual_information(p, {0}, {1}) + mutual_information(p, {0}, {2}, (1,))
        assert whole == pytest.approx(parts, abs=1e-12)
        assert 0.0 <= mutual_information(p, {0}, {1}) <= min(entropy(p.sum(axis=(1, 2))), entropy(p.sum(axis=(0, 2)))) + 1e-12
        assert mutual_information(p, {0}, {2}, (1,)) >= 0.0
        # independence gives zero
        q = np.einsum("a,b->ab", p.sum(axis=(1, 2)), p.sum(axis=(0, 2)))
        assert mutual_information(q, {0}, {1}) == pytest.approx(0.0, abs=1e-12)


def test_type_class_bounds():
    rng = np.random.default_rng(102)
    for _ in range(INSTANCES):
        k = int(rng.integers(2, 5))
        n = int(rng.integers(1, 30))
        counts = rng.multinomial(n, rng.dirichlet(np.ones(k)))
        size = type_class_size(counts)
        h = entropy(counts / n)
        assert size <= 2 ** (n * h) * (1 + 1e-9)
        assert size >= 2 ** (n * h) / (n + 1) ** k * (1 - 1e-9)


def test_certificates_survive_serialization():
    rng = np.random.default_rng(103)
    for _ in range(INSTANCES):
        nin, nout = int(rng.integers(1, 4)), int(rng.integers(2, 4))
        truth = rng.dirichlet(np.ones(nout), size=nin)
        prob = FeasibilityProblem([((nin,), nout)])
        for _ in range(int(rng.integers(1, 4))):
            c = rng.normal(size=(nin, nout))
            prob.add_equality([(0, (i,), o, c[i, o]) for i in range(nin) for o in range(nout)], float((c * truth).sum()))
        out = solve_linear_feasibility(prob)
        assert out.verdict is Verdict.FEASIBLE
        back = io.outcome_from_dict(io.outcome_to_dict(out))
        assert verify_certificate(prob, back.certificate) == verify_certificate(prob, out.certificate)
        assert verify_certificate(prob, back.certificate) <= 1e-9


def test_overwritable_implies_spoofable_implies_symmetrizable():
    rng = np.random.default_rng(104)
    for _ in range(INSTANCES):
        mac = overwritable2_mac(rng)
        over = check_overwritable(mac, 2)
        assert over.verdict is Verdict.FEASIBLE
        q_x, q_y = spoof2_from_overwritable(over.certificate[0], rng.dirichlet(np.ones(mac.ny)))
        assert verify_certificate(spoof2_problem(mac), [q_x, q_y]) <= 1e-8
        x_tilde = int(rng.integers(mac.nx))
        assert verify_certificate(symmetrizable_problem(mac, 2), [sym2_from_spoof2(q_x, x_tilde)]) <= 1e-8


def test_mirrored_implications_on_transposed_channels():
    rng = np.random.default_rng(105)
    for _ in range(INSTANCES):
        mac = Mac(overwritable2_mac(rng).w.transpose(1, 0, 2))
        over = check_overwritable(mac, 1)
        assert over.verdict is Verdict.FEASIBLE
        q_y, q_x = spoof1_from_overwritable(over.certificate[0], rng.dirichlet(np.ones(mac.nx)))
        assert verify_certificate(spoof1_problem(mac), [q_y, q_x]) <= 1e-8
        y_tilde = int(rng.integers(mac.ny))
        assert verify_certificate(symmetrizable_problem(mac, 1), [sym1_from_spoof1(q_y, y_tilde)]) <= 1e-8
