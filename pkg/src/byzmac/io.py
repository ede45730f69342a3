"""JSON reading and writing for channels, codes and reports.

Floats are written with ``repr`` precision, so every file reads back to the
same binary64 values.  Reports are wrapped in an envelope carrying the
schema version and the run manifest; only the manifest holds a timestamp.
"""

from __future__ import annotations

import json
import time
from importlib import metadata
from pathlib import Path

import numpy as np

from .classifier import ClassificationReport
from .codec.codebook import Codebook, RandomizedCode
from .errors import InvalidParams
from .feasibility import FeasibilityOutcome, Verdict
from .mac_core import AvMac, Kernel, builtin_channel, validate_avmac, validate_mac

SCHEMA_VERSION = 1


def tool_version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def _plain(obj):
    """Convert numpy containers and scalars to JSON-native values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    return obj


def dumps(obj):
    return json.dumps(_plain(obj), sort_keys=True, indent=1)


# -- channels ------------------------------------------------------------------


def channel_to_dict(ch):
    if isinstance(ch, AvMac):
        return {"label": ch.label, "nx": ch.nx, "ny": ch.ny, "ns": ch.ns, "nz": ch.nz, "w": ch.w.tolist()}
    return {"label": ch.label, "nx": ch.nx, "ny": ch.ny, "nz": ch.nz, "w": ch.w.tolist()}


def channel_from_dict(d):
    w = np.asarray(d["w"], dtype=float)
    expected = (d["nx"], d["ny"], d["ns"], d["nz"]) if "ns" in d else (d["nx"], d["ny"], d["nz"])
    if w.shape != tuple(expected):
        raise InvalidParams(f"channel array has shape {w.shape}, header says {tuple(expected)}")
    if "ns" in d:
        return validate_avmac(w, d.get("label", ""))
    return validate_mac(w, d.get("label", ""))


def load_channel(source):
    """``builtin:NAME`` or a path to a channel file."""
    if source.startswith("builtin:"):
        return builtin_channel(source.split(":", 1)[1])
    return channel_from_dict(json.loads(Path(source).read_text()))


# -- codes -----------------------------------------------------------------------


def codebook_to_dict(cb):
    return {
        "n": cb.n,
        "N1": cb.N1,
        "N2": cb.N2,
        "words1": cb.words1.tolist(),
        "words2": cb.words2.tolist(),
        "comp1": None if cb.comp1 is None else cb.comp1.tolist(),
        "comp2": None if cb.comp2 is None else cb.comp2.tolist(),
    }


def codebook_from_dict(d):
    cb = Codebook(d["words1"], d["words2"], d.get("comp1"), d.get("comp2"))
    if (cb.n, cb.N1, cb.N2) != (d["n"], d["N1"], d["N2"]):
        raise InvalidParams("code header does not match its codeword tables")
    return cb


def randomized_to_dict(rc):
    return {
        "n": rc.n,
        "N1": rc.N1,
        "N2": rc.N2,
        "encoders1": [e.tolist() for e in rc.encoders1],
        "encoders2": [e.tolist() for e in rc.encoders2],
        "weights1": rc.weights1.tolist(),
        "weights2": rc.weights2.tolist(),
    }


def randomized_from_dict(d, decoders=None):
    return RandomizedCode(d["encoders1"], d["encoders2"], d["weights1"], d["weights2"], decoders)


def load_code(path):
    d = json.loads(Path(path).read_text())
    if "encoders1" in d:
        return randomized_from_dict(d)
    return codebook_from_dict(d)


# -- feasibility and classification -------------------------------------------------


def outcome_to_dict(o):
    cert = None if o.certificate is None else [k.to_list() for k in o.certificate]
    return {"verdict": o.verdict.value, "certificate": cert, "violation": o.violation, "margin": o.margin, "names": list(o.names)}


def outcome_from_dict(d):
    cert = None if d["certificate"] is None else [Kernel(np.asarray(k, dtype=float)) for k in d["certificate"]]
    return FeasibilityOutcome(Verdict(d["verdict"]), cert, d["violation"], d["margin"], list(d.get("names", [])))


def report_to_dict(r):
    return {
        "label": r.label,
        "hierarchy_consistent": r.hierarchy_consistent,
        "notes": list(r.notes),
        "outcomes": {k: outcome_to_dict(v) for k, v in r.outcomes.items()},
    }


def report_from_dict(d):
    outcomes = {k: outcome_from_dict(v) for k, v in d["outcomes"].items()}
    return ClassificationReport(outcomes, d["hierarchy_consistent"], list(d["notes"]), d.get("label", ""))


# -- envelopes -------------------------------------------------------------------------


def make_manifest(subcommand, inputs=None, parameters=None, started=None):
    now = time.time()
    return {
        "subcommand": subcommand,
        "inputs": inputs or {},
        "parameters": parameters or {},
        "tool_version": tool_version(),
        "wall_clock_s": 0.0 if started is None else now - started,
        "timestamp": now,
    }


def envelope(kind, result, manifest):
    return {"schema_version": SCHEMA_VERSION, "kind": kind, "manifest": manifest, "result": result}


def write_json(path, obj):
    Path(path).write_text(dumps(obj) + "\n")


def read_envelope(path):
    d = json.loads(Path(path).read_text())
    if d.get("schema_version") != SCHEMA_VERSION:
        raise InvalidParams(f"unsupported schema version {d.get('schema_version')}")
    return d


def result_payload(env):
    """Canonical text of an envelope's result, for byte-level comparisons."""
    return dumps(env["result"])


__all__ = [
    "SCHEMA_VERSION",
    "channel_from_dict",
    "channel_to_dict",
    "codebook_from_dict",
    "codebook_to_dict",
    "dumps",
    "envelope",
    "load_channel",
    "load_code",
    "make_manifest",
    "outcome_from_dict",
    "outcome_to_dict",
    "randomized_from_dict",
    "randomized_to_dict",
    "read_envelope",
    "report_from_dict",
    "report_to_dict",
    "result_payload",
    "write_json",
]
