import numpy as np
import pytest

from byzmac.attack import SpoofPair
from byzmac.classifier import (
    PROPERTIES,
    check_avmac_symmetrizable,
    check_overwritable,
    check_spoofable_1,
    check_symmetrizable,
    classify,
    hierarchy_notes,
    problem_for,
    spoof1_problem,
    spoof2_problem,
    symmetrizable_problem,
)
from byzmac.errors import InvalidParams
from byzmac.feasibility import FeasibilityOutcome, Verdict, verify_certificate
from byzmac.mac_core import AvMac, Kernel, Mac, identity_channel

from conftest import overwritable2_mac, random_mac

F, I = Verdict.FEASIBLE, Verdict.INFEASIBLE


def test_erasure_row(erasure):
    rep = classify(erasure)
    assert rep.table() == {
        "spoofable_1": "INFEASIBLE",
        "spoofable_2": "INFEASIBLE",
        "symmetrizable_1": "FEASIBLE",
        "symmetrizable_2": "FEASIBLE",
        "overwritable_1": "INFEASIBLE",
        "overwritable_2": "INFEASIBLE",
    }
    assert rep.hierarchy_consistent


def test_erasure_identity_symmetrizes(erasure):
    for user in (1, 2):
        assert verify_certificate(symmetrizable_problem(erasure, user), [Kernel.identity(2)]) <= 1e-9


def test_xor_row_and_uniform_certificate(xor):
    rep = classify(xor)
    assert rep.verdict("spoofable_1") is F and rep.verdict("spoofable_2") is F
    assert rep.verdict("overwritable_1") is I and rep.verdict("overwritable_2") is I
    for fam, prob in ((1, spoof1_problem(xor)), (2, spoof2_problem(xor))):
        sp = SpoofPair.uniform(xor, fam)
        assert verify_certificate(prob, [sp.q_a, sp.q_b]) <= 1e-9


def test_parallel_example_row(ex3):
    rep = classify(ex3)
    assert rep.verdict("symmetrizable_1") is F and rep.verdict("symmetrizable_2") is F
    assert rep.verdict("overwritable_1") is I and rep.verdict("overwritable_2") is I
    # the erasure half of the channel blocks spoofing
    assert rep.verdict("spoofable_1") is I and rep.verdict("spoofable_2") is I
    assert rep.hierarchy_consistent


def test_identity_channel_nothing_holds():
    rep = classify(identity_channel(2, 2))
    assert all(o.verdict is I for o in rep.outcomes.values())


def test_certificates_verify_by_substitution(xor, erasure):
    for mac in (xor, erasure):
        for prop in PROPERTIES:
            out = classify(mac).outcomes[prop]
            if out.verdict is F:
                assert verify_certificate(problem_for(mac, prop), out.certificate) <= 1e-9


def test_overwritable_family_detected():
    rng = np.random.default_rng(3)
    for _ in range(5):
        mac = overwritable2_mac(rng)
        out = check_overwritable(mac, 2)
        assert out.verdict is F
        # the mirrored condition is about the transposed channel
        assert check_overwritable(Mac(mac.w.transpose(1, 0, 2)), 1).verdict is F


def test_random_channels_respect_hierarchy():
    rng = np.random.default_rng(11)
    for _ in range(10):
        rep = classify(random_mac(rng, 2, 2, 3))
        assert rep.hierarchy_consistent, rep.notes
    rng = np.random.default_rng(12)
    for _ in range(5):
        rep = classify(overwritable2_mac(rng))
        assert rep.hierarchy_consistent, rep.notes
        assert rep.verdict("spoofable_2") is F and rep.verdict("symmetrizable_2") is F


def test_hierarchy_notes_flag_violations():
    outs = {p: FeasibilityOutcome(I, None, 1.0, 1.0) for p in PROPERTIES}
    outs["overwritable_1"] = FeasibilityOutcome(F, [], 0.0, 0.0)
    notes = hierarchy_notes(outs)
    assert notes == ["overwritable_1 is FEASIBLE but spoofable_1 is INFEASIBLE"]


def test_avmac_symmetrizability():
    xor = np.array([[[1.0, 0.0], [0.0, 1.0]], [[0.0, 1.0], [1.0, 0.0]]])
    av = AvMac(np.stack([xor, xor[:, :, ::-1]], axis=2))
    for kind in ("X", "Y", "XY"):
        assert check_avmac_symmetrizable(av, kind).verdict is F
    av1 = AvMac(identity_channel(2, 2).w[:, :, None, :])
    for kind in ("X", "Y", "XY"):
        assert check_avmac_symmetrizable(av1, kind).verdict is I
    with pytest.raises(InvalidParams):
        check_avmac_symmetrizable(av, "Z")


def test_bad_user_and_property():
    mac = identity_channel(2, 2)
    with pytest.raises(InvalidParams):
        check_symmetrizable(mac, 3)
    with pytest.raises(InvalidParams):
        problem_for(mac, "weird_1")


def test_tolerance_is_passed_through(xor):
    out = check_spoofable_1(xor, tol=1e-12)
    assert out.verdict is F and out.violation <= 1e-12
