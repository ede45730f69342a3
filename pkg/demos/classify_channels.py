"""Classify the three built-in channels and check every certificate by substitution."""

from byzmac.classifier import PROPERTIES, classify, problem_for
from byzmac.feasibility import Verdict, verify_certificate
from byzmac.mac_core import builtin_channel

for name in ("erasure", "xor", "parallel_ex3"):
    mac = builtin_channel(name)
    rep = classify(mac)
    print(f"== {name} (hierarchy consistent: {rep.hierarchy_consistent})")
    for prop in PROPERTIES:
        out = rep.outcomes[prop]
        line = f"  {prop:16s} {out.verdict.value}"
        if out.verdict is Verdict.FEASIBLE:
            line += f"  certificate residual {verify_certificate(problem_for(mac, prop), out.certificate):.2e}"
        print(line)
