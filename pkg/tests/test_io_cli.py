import json
import subprocess
import sys

import numpy as np
import pytest

from byzmac import io
from byzmac.classifier import classify
from byzmac.cli import EXIT_INCONCLUSIVE, EXIT_OK, EXIT_TOO_LARGE, EXIT_USAGE, run
from byzmac.codec import RandomizedCode, build_erasure_example_code, generate_constant_composition_codebook
from byzmac.errors import InvalidParams
from byzmac.mac_core import AvMac


def test_channel_round_trip(tmp_path, ex3):
    path = tmp_path / "ch.json"
    io.write_json(path, io.channel_to_dict(ex3))
    back = io.load_channel(str(path))
    assert np.array_equal(back.w, ex3.w) and back.label == ex3.label
    av = AvMac(np.stack([ex3.w, ex3.w], axis=2), label="two")
    assert np.array_equal(io.channel_from_dict(io.channel_to_dict(av)).w, av.w)
    bad = io.channel_to_dict(ex3)
    bad["nz"] += 1
    with pytest.raises(InvalidParams):
        io.channel_from_dict(bad)


def test_float_round_trip_is_exact():
    d = {"x": 0.1 + 0.2, "y": np.float64(1 / 3), "z": np.arange(3)}
    assert json.loads(io.dumps(d)) == {"x": 0.1 + 0.2, "y": 1 / 3, "z": [0, 1, 2]}


def test_code_round_trips(tmp_path):
    cb = generate_constant_composition_codebook([0.5, 0.5], [0.25, 0.75], 4, 3, 2, seed=1)
    path = tmp_path / "cb.json"
    io.write_json(path, io.codebook_to_dict(cb))
    back = io.load_code(str(path))
    assert np.array_equal(back.words1, cb.words1) and np.allclose(back.comp2, cb.comp2)
    code, _ = build_erasure_example_code(3)
    rc = RandomizedCode([code.words1, code.words1[::-1]], [code.words2], [0.25, 0.75])
    io.write_json(path, io.randomized_to_dict(rc))
    back = io.load_code(str(path))
    assert back.L1 == 2 and np.allclose(back.weights1, [0.25, 0.75])
    bad = io.codebook_to_dict(cb)
    bad["N1"] = 7
    with pytest.raises(InvalidParams):
        io.codebook_from_dict(bad)


def test_report_round_trip(xor):
    rep = classify(xor)
    d = io.report_to_dict(rep)
    again = io.report_to_dict(io.report_from_dict(json.loads(io.dumps(d))))
    assert io.dumps(again) == io.dumps(d)


def test_envelope_schema(tmp_path):
    path = tmp_path / "env.json"
    io.write_json(path, io.envelope("x", {"a": 1}, io.make_manifest("classify")))
    env = io.read_envelope(path)
    assert env["schema_version"] == io.SCHEMA_VERSION and env["manifest"]["subcommand"] == "classify"
    env["schema_version"] = 99
    io.write_json(path, env)
    with pytest.raises(InvalidParams):
        io.read_envelope(path)


def test_classify_cli(capsys, tmp_path):
    out = tmp_path / "r.json"
    assert run(["classify", "--channel", "builtin:erasure", "--out", str(out)]) == EXIT_OK
    text = capsys.readouterr().out
    assert "symmetrizable_1    FEASIBLE" in text and "hierarchy_consistent=True" in text
    env = io.read_envelope(out)
    assert env["result"]["outcomes"]["spoofable_1"]["verdict"] == "INFEASIBLE"


def test_results_are_byte_identical_across_runs(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(["classify", "--channel", "builtin:xor", "--out", str(path)]) == EXIT_OK
    assert io.result_payload(io.read_envelope(a)) == io.result_payload(io.read_envelope(b))


def test_require_decisive_exit_code(capsys):
    # a tolerance this loose puts the erasure spoofing margins in the guard band
    assert run(["classify", "--channel", "builtin:erasure", "--tol", "0.9", "--require-decisive"]) == EXIT_INCONCLUSIVE
    assert run(["classify", "--channel", "builtin:erasure", "--tol", "0.9"]) == EXIT_OK


def test_usage_errors(capsys):
    assert run(["frobnicate"]) == EXIT_USAGE
    assert run(["codebook", "gen", "--n", "4"]) == EXIT_USAGE
    assert run(["region", "polytope"]) == EXIT_USAGE
    assert run(["region", "inner", "--channel", "builtin:erasure"]) == EXIT_USAGE


def test_too_large_exit_code(capsys):
    assert run(["region", "polytope", "--channel", "builtin:parallel_ex3", "--budget", "5"]) == EXIT_TOO_LARGE


def test_codebook_simulate_and_decode(tmp_path, capsys):
    cb = tmp_path / "cb.json"
    assert run(["codebook", "gen", "--comp1", "0.3333333333333333,0.6666666666666667", "--comp2", "0.6666666666666667,0.3333333333333333",
                "--n", "6", "--out", str(cb)]) == EXIT_OK
    assert run(["codebook", "audit", "--code", str(cb), "--channel", "builtin:erasure"]) == EXIT_OK
    assert "5q" in capsys.readouterr().out
    assert run(["decode", "--channel", "builtin:erasure", "--code", str(cb), "--received", "1,1,1,2,1,0", "--eta", "0.5"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "Pair(1,1)"
    assert run(["decode", "--channel", "builtin:erasure", "--code", str(cb), "--received", "1,1", "--eta", "0.5"]) == EXIT_USAGE


def test_simulate_erasure_example(tmp_path, capsys):
    code, _ = build_erasure_example_code(4)
    path = tmp_path / "ex.json"
    io.write_json(path, io.codebook_to_dict(code))
    rep = tmp_path / "rep.json"
    args = ["simulate", "--channel", "builtin:erasure", "--code", str(path), "--decoder", "erasure-example"]
    assert run(args + ["--exact", "--out", str(rep)]) == EXIT_OK
    assert io.read_envelope(rep)["result"]["p_hon"] == pytest.approx(3 / 16)
    assert run(args + ["--trials", "500", "--adversary", "vector:1:1,1,0,0"]) == EXIT_OK
    assert "p_mal1" in capsys.readouterr().out
    assert run(args + ["--trials", "10", "--adversary", "telepathy"]) == EXIT_USAGE
    assert run(args + ["--trials", "10", "--adversary", "spoof:1:2"]) == EXIT_USAGE
    assert run(["simulate", "--channel", "builtin:erasure", "--code", str(path), "--exact"]) == EXIT_USAGE


def test_region_and_examples(capsys):
    assert run(["region", "erasure-exact", "--delta", "0.01"]) == EXIT_OK
    assert "corner1 r1=0.500088442832" in capsys.readouterr().out
    assert run(["region", "jahn", "--channel", "builtin:xor"]) == EXIT_OK
    assert run(["region", "inner", "--channel", "builtin:erasure", "--comp1", "0.4,0.6", "--comp2", "0.6,0.4", "--form", "R1_form"]) == EXIT_OK
    assert run(["examples", "reproduce", "--which", "erasure-2n", "--n", "8"]) == EXIT_OK
    assert capsys.readouterr().out.strip().splitlines()[-1] == "0.25"
    assert run(["attack-demo", "--channel", "builtin:xor", "--n", "4", "--eta", "0.5"]) == EXIT_OK
    assert "True" in capsys.readouterr().out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "byzmac", "classify", "--channel", "builtin:xor"], capture_output=True, text=True)
    assert proc.returncode == 0 and "spoofable_1" in proc.stdout
