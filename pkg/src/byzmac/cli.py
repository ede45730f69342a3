"""Command-line frontend.

Every subcommand prints a short summary (12 significant digits) and, with
``--out``, writes a JSON envelope holding the schema version, the run
manifest and the result.

Exit codes: 0 success, 1 other package error, 2 usage error, 3 size budget
exceeded, 4 an INCONCLUSIVE verdict where ``--require-decisive`` asks for a
decision.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import io
from .attack import Attack, SpoofPair, converse_bound_eval, spoof_output_dists
from .classifier import PROPERTIES, check_spoofable_1, check_spoofable_2, classify
from .codec import (
    Codebook,
    DecoderParams,
    audit_codebook,
    build_erasure_example_code,
    erasure_example_decode,
    feasibility_decoder,
    generate_constant_composition_codebook,
)
from .codec.decoders import ORDERS, Decoder, decode_feasibility, decode_five_step
from .errors import ByzmacError, TooLarge
from .feasibility import Verdict
from .mac_core import AvMac, Mac, builtin_channel
from .region import (
    FORMS,
    RegionSample,
    attack_polytope_vertices,
    avmac_rate_region,
    erasure_inner_bound_exact,
    induced_avmac,
    inner_bound_corner,
    inner_region_sample,
)
from .sim import ExactEvaluator, exact_error_probabilities, monte_carlo_error

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_TOO_LARGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4
EXAMPLES = ("erasure-2n", "spoof-uniform", "inner-corners", "converse-112")


class UsageError(Exception):
    pass


def fmt(x):
    if x is None:
        return "-"
    return f"{x:.12g}"


def _floats(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def _ints(text):
    try:
        return [int(v) for v in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def _mac(source):
    ch = io.load_channel(source)
    if not isinstance(ch, Mac):
        raise UsageError(f"{source} is an AV-MAC, a MAC is needed here")
    return ch


def _emit(args, kind, result, started, inputs=None, params=None):
    if getattr(args, "out", None):
        man = io.make_manifest(args.command, inputs, params, started)
        io.write_json(args.out, io.envelope(kind, result, man))


def _decoder(args, code, mac):
    kind = getattr(args, "decoder", "feasibility")
    if kind == "erasure-example":
        return Decoder(erasure_example_decode, "erasure-example")
    if args.eta is None:
        raise UsageError("--eta is required for the typicality decoders")
    params = DecoderParams(args.eta)
    return feasibility_decoder(code, mac, params, five_step=kind == "five-step", order=args.order)


def _code(args, mac):
    if args.code:
        code = io.load_code(args.code)
        if not isinstance(code, Codebook):
            raise UsageError("this subcommand needs a deterministic code file")
        return code
    if args.n is None:
        raise UsageError("give --code or --n")
    comp1 = [1.0 / mac.nx] * mac.nx
    comp2 = [1.0 / mac.ny] * mac.ny
    return generate_constant_composition_codebook(comp1, comp2, args.n, 2, 2, args.seed)


# -- subcommands -------------------------------------------------------------------


def cmd_classify(args, started):
    mac = _mac(args.channel)
    rep = classify(mac, args.tol)
    for p in PROPERTIES:
        o = rep.outcomes[p]
        print(f"{p:18s} {o.verdict.value:13s} violation={fmt(o.violation)} margin={fmt(o.margin)}")
    print(f"hierarchy_consistent={rep.hierarchy_consistent}")
    _emit(args, "classification", io.report_to_dict(rep), started, {"channel": args.channel}, {"tol": args.tol})
    if args.require_decisive and any(o.verdict is Verdict.INCONCLUSIVE for o in rep.outcomes.values()):
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _spoof_pair(mac, family, tol):
    out = (check_spoofable_1 if family == 1 else check_spoofable_2)(mac, tol)
    return out, (SpoofPair.from_outcome(out, family) if out.feasible else None)


def cmd_attack_demo(args, started):
    mac = _mac(args.channel)
    code = _code(args, mac)
    outcome, sp = _spoof_pair(mac, args.family, args.tol)
    result = {"family": args.family, "verdict": outcome.verdict.value}
    print(f"spoofable_{args.family}: {outcome.verdict.value}")
    if sp is None:
        _emit(args, "attack_demo", result, started, {"channel": args.channel, "code": args.code}, {"family": args.family})
        if outcome.verdict is Verdict.INCONCLUSIVE and args.require_decisive:
            return EXIT_INCONCLUSIVE
        return EXIT_OK
    n_self, n_other = (code.N1, code.N2) if args.family == 1 else (code.N2, code.N1)
    gap = 0.0
    for i in range(1, n_self + 1):
        for j in range(1, n_self + 1):
            for k in range(1, n_other + 1):
                p, pj, q = spoof_output_dists(code, mac, sp, i, j, k)
                gap = max(gap, np.abs(p - pj).max(), np.abs(p - q).max(), np.abs(pj - q).max())
    decoder = _decoder(args, code, mac)
    conv = converse_bound_eval(code, decoder, mac, sp)
    result.update({"max_distribution_gap": float(gap), "converse": conv.to_dict(), "certificate_violation": outcome.violation})
    print(f"max distribution gap {fmt(gap)}")
    print(f"lhs {fmt(conv.lhs)} >= rhs {fmt(conv.rhs)}: {conv.holds}; P_e >= {fmt(conv.pe_lower)}")
    _emit(args, "attack_demo", result, started, {"channel": args.channel, "code": args.code}, {"family": args.family, "eta": args.eta, "n": code.n})
    return EXIT_OK


def cmd_decode(args, started):
    mac = _mac(args.channel)
    code = io.load_code(args.code)
    z = np.asarray(_ints(args.received), dtype=np.int64)
    if z.size != code.n:
        raise UsageError(f"received word has length {z.size}, code has n={code.n}")
    params = DecoderParams(args.eta)
    out = decode_five_step(code, mac, z, params, args.order) if args.five_step else decode_feasibility(code, mac, z, params)
    print(out.label())
    _emit(args, "decoder_output", out.to_dict(), started, {"channel": args.channel, "code": args.code}, {"eta": args.eta, "five_step": args.five_step, "order": args.order})
    return EXIT_OK


def _adversary(text, mac, code, tol):
    if text in (None, "honest"):
        return "honest"
    parts = text.split(":")
    if parts[0] == "vector" and len(parts) == 3:
        return Attack("deterministic_vector", int(parts[1]), _ints(parts[2]))
    if parts[0] == "spoof" and len(parts) == 3:
        family, user = int(parts[1]), int(parts[2])
        outcome, sp = _spoof_pair(mac, family, tol)
        if sp is None:
            raise UsageError(f"channel is not {family}-spoofable ({outcome.verdict.value})")
        return Attack("spoof_pair", user, sp)
    raise UsageError("adversary must be honest, vector:USER:SYMBOLS or spoof:FAMILY:USER")


def cmd_simulate(args, started):
    mac = _mac(args.channel)
    code = io.load_code(args.code)
    decoder = _decoder(args, code, mac)
    params = {"decoder": args.decoder, "eta": args.eta, "order": args.order, "adversary": args.adversary}
    if args.exact:
        rep = exact_error_probabilities(code, decoder, mac)
    else:
        if args.trials is None:
            raise UsageError("give --exact or --trials")
        strategy = _adversary(args.adversary, mac, code, args.tol)
        rep = monte_carlo_error(code, decoder, mac, strategy, args.trials, args.seed, args.workers)
        params.update({"trials": args.trials, "seed": args.seed})
    hw = rep.half_widths or {}
    for name in ("p_hon", "p_mal1", "p_mal2"):
        val = getattr(rep, name)
        extra = f" +/- {fmt(hw[name])}" if name in hw else ""
        print(f"{name} {fmt(val)}{extra}")
    print(f"p_e {fmt(rep.p_e)}")
    _emit(args, "error_report", rep.to_dict(), started, {"channel": args.channel, "code": args.code}, params)
    return EXIT_OK


def cmd_codebook(args, started):
    if args.action == "gen":
        cb = generate_constant_composition_codebook(_floats(args.comp1), _floats(args.comp2), args.n, args.N1, args.N2, args.seed)
        print(f"n={cb.n} N1={cb.N1} N2={cb.N2}")
        if args.out:
            io.write_json(args.out, io.codebook_to_dict(cb))
        return EXIT_OK
    code = io.load_code(args.code)
    if args.channel:
        mac = _mac(args.channel)
        alph = (mac.nx, mac.ny)
    else:
        alph = (int(code.words1.max()) + 1, int(code.words2.max()) + 1)
    recs = audit_codebook(code, args.epsilon, alph)
    for r in recs:
        print(f"{r.name:4s} {r.kind:8s} {r.status:8s} lhs={fmt(r.lhs)} threshold={fmt(r.threshold)}")
    _emit(args, "audit", [r.to_dict() for r in recs], started, {"code": args.code}, {"epsilon": args.epsilon})
    return EXIT_OK


def _print_points(sample):
    for p in sample.points:
        print(f"{sample.provenance} r1={fmt(p.r1)} r2={fmt(p.r2)} {p.flag}")


def cmd_region(args, started):
    if args.action == "erasure-exact":
        c1, c2 = erasure_inner_bound_exact(args.delta)
        print(f"corner1 r1={fmt(c1.r1)} r2={fmt(c1.r2)}")
        print(f"corner2 r1={fmt(c2.r1)} r2={fmt(c2.r2)}")
        _emit(args, "region", RegionSample([c1, c2], "inner", {"delta": args.delta}).to_dict(), started, {}, {"delta": args.delta})
        return EXIT_OK
    ch = io.load_channel(args.channel)
    if args.action == "inner":
        if not isinstance(ch, Mac):
            raise UsageError("inner bound needs a MAC")
        if args.form:
            pt = inner_bound_corner(ch, _floats(args.comp1), _floats(args.comp2), args.form)
            sample = RegionSample([pt], "inner_corner_1" if args.form == "R1_form" else "inner_corner_2", {"form": args.form})
        else:
            sample = inner_region_sample(ch, _floats(args.comp1), _floats(args.comp2))
        _print_points(sample)
        _emit(args, "region", sample.to_dict(), started, {"channel": args.channel}, {"comp1": args.comp1, "comp2": args.comp2, "form": args.form})
        return EXIT_OK
    if args.action == "polytope":
        if not isinstance(ch, Mac):
            raise UsageError("the attack polytope needs a MAC")
        verts = attack_polytope_vertices(ch, args.budget)
        print(f"{len(verts)} vertices")
        res = []
        for v in verts:
            print(f"Qx={v.qx.to_list()} Qy={v.qy.to_list()} residual={fmt(v.residual)}")
            res.append({"qx": v.qx.to_list(), "qy": v.qy.to_list(), "channel": v.channel.w.tolist(), "residual": v.residual})
        _emit(args, "polytope", res, started, {"channel": args.channel}, {"budget": args.budget})
        return EXIT_OK
    av = ch if isinstance(ch, AvMac) else induced_avmac(ch, budget=args.budget)
    sample = avmac_rate_region(av, args.input_grid, args.state_grid)
    worst = max(max(r["r1_max"], r["r2_max"], r["sum_max"]) for r in sample.rows)
    print(f"{len(sample.rows)} grid points, states={av.ns}, largest bound {fmt(worst)}")
    _emit(args, "region", sample.to_dict(), started, {"channel": args.channel}, {"input_grid": args.input_grid, "state_grid": args.state_grid})
    return EXIT_OK


def _reproduce(which, n):
    if which == "erasure-2n":
        mac = builtin_channel("erasure")
        code, dec = build_erasure_example_code(n)
        v = np.zeros(n, dtype=np.int64)
        v[:2] = 1
        # probability over user 2's message that the output has no 0
        no_zero = np.mean([not np.any(v + code.word2(m) == 0) for m in range(1, code.N2 + 1)])
        err = ExactEvaluator(code, dec, mac).malicious(1, v)
        print(fmt(no_zero))
        return {"n": n, "no_zero_probability": float(no_zero), "attack_error": float(err), "expected": 2 / n}
    if which == "spoof-uniform":
        mac = builtin_channel("xor")
        code = generate_constant_composition_codebook([0.5, 0.5], [0.5, 0.5], n, 2, 2, seed=0)
        sp = SpoofPair.uniform(mac, 1)
        gap, dev = 0.0, 0.0
        for i, j, k in np.ndindex(2, 2, 2):
            p, pj, q = spoof_output_dists(code, mac, sp, i + 1, j + 1, k + 1)
            gap = max(gap, np.abs(p - pj).max(), np.abs(p - q).max())
            dev = max(dev, np.abs(p - 2.0**-n).max())
        print(f"max gap {fmt(gap)}, max deviation from uniform {fmt(dev)}")
        return {"n": n, "max_gap": float(gap), "max_uniform_deviation": float(dev)}
    if which == "inner-corners":
        rows = []
        for d in (0.2, 0.1, 0.05, 0.02, 0.01):
            c1, c2 = erasure_inner_bound_exact(d)
            rows.append({"delta": d, "corner1": c1.to_dict(), "corner2": c2.to_dict()})
            print(f"delta={fmt(d)} corner1=({fmt(c1.r1)}, {fmt(c1.r2)}) corner2=({fmt(c2.r1)}, {fmt(c2.r2)})")
        return {"rows": rows}
    mac = builtin_channel("xor")
    code = generate_constant_composition_codebook([0.5, 0.5], [0.5, 0.5], n, 2, 2, seed=0)
    dec = feasibility_decoder(code, mac, DecoderParams(0.5))
    conv = converse_bound_eval(code, dec, mac, SpoofPair.uniform(mac, 1))
    print(f"lhs {fmt(conv.lhs)} rhs {fmt(conv.rhs)} pe_lower {fmt(conv.pe_lower)}")
    return conv.to_dict()


def cmd_examples(args, started):
    defaults = {"erasure-2n": 8, "spoof-uniform": 6, "inner-corners": 0, "converse-112": 4}
    n = args.n if args.n is not None else defaults[args.which]
    res = _reproduce(args.which, n)
    _emit(args, "example", res, started, {}, {"which": args.which, "n": n})
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="byzmac", description="Adversary identification over two-user MACs")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, out=True):
        if out:
            sp.add_argument("--out", help="write a JSON report here")
        sp.add_argument("--tol", type=float, default=1e-9)
        sp.add_argument("--require-decisive", action="store_true")

    def decoder_opts(sp):
        sp.add_argument("--decoder", choices=("feasibility", "five-step", "erasure-example"), default="feasibility")
        sp.add_argument("--eta", type=float)
        sp.add_argument("--order", choices=ORDERS, default="step2_first")

    s = sub.add_parser("classify")
    s.add_argument("--channel", required=True)
    common(s)

    s = sub.add_parser("attack-demo")
    s.add_argument("--channel", required=True)
    s.add_argument("--code")
    s.add_argument("--n", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--family", type=int, choices=(1, 2), default=1)
    decoder_opts(s)
    s.set_defaults(eta=0.5)
    common(s)

    s = sub.add_parser("decode")
    s.add_argument("--channel", required=True)
    s.add_argument("--code", required=True)
    s.add_argument("--received", required=True, help="comma-separated output symbols")
    s.add_argument("--eta", type=float, required=True)
    s.add_argument("--five-step", action="store_true")
    s.add_argument("--order", choices=ORDERS, default="step2_first")
    common(s)

    s = sub.add_parser("simulate")
    s.add_argument("--channel", required=True)
    s.add_argument("--code", required=True)
    mode = s.add_mutually_exclusive_group(required=True)
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--trials", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--adversary", default="honest")
    s.add_argument("--workers", type=int, default=1)
    decoder_opts(s)
    common(s)

    s = sub.add_parser("codebook")
    s.add_argument("action", choices=("gen", "audit"))
    s.add_argument("--comp1")
    s.add_argument("--comp2")
    s.add_argument("--n", type=int)
    s.add_argument("--N1", type=int, default=2)
    s.add_argument("--N2", type=int, default=2)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--code")
    s.add_argument("--channel")
    s.add_argument("--epsilon", type=float, default=0.1)
    common(s)

    s = sub.add_parser("region")
    s.add_argument("action", choices=("inner", "erasure-exact", "polytope", "jahn"))
    s.add_argument("--channel")
    s.add_argument("--comp1")
    s.add_argument("--comp2")
    s.add_argument("--form", choices=FORMS)
    s.add_argument("--delta", type=float, default=0.05)
    s.add_argument("--budget", type=int, default=10**6)
    s.add_argument("--input-grid", type=int, default=4)
    s.add_argument("--state-grid", type=int, default=4)
    common(s)

    s = sub.add_parser("examples")
    s.add_argument("action", choices=("reproduce",))
    s.add_argument("--which", choices=EXAMPLES, required=True)
    s.add_argument("--n", type=int)
    common(s)
    return p


HANDLERS = {
    "classify": cmd_classify,
    "attack-demo": cmd_attack_demo,
    "decode": cmd_decode,
    "simulate": cmd_simulate,
    "codebook": cmd_codebook,
    "region": cmd_region,
    "examples": cmd_examples,
}


def _check_args(args):
    if args.command == "codebook":
        if args.action == "gen" and (args.comp1 is None or args.comp2 is None or args.n is None):
            raise UsageError("codebook gen needs --comp1, --comp2 and --n")
        if args.action == "audit" and args.code is None:
            raise UsageError("codebook audit needs --code")
    if args.command == "region":
        if args.action != "erasure-exact" and args.channel is None:
            raise UsageError(f"region {args.action} needs --channel")
        if args.action == "inner" and (args.comp1 is None or args.comp2 is None):
            raise UsageError("region inner needs --comp1 and --comp2")


def run(argv=None):
    started = time.time()
    try:
        args = build_parser().parse_args(argv)
        _check_args(args)
        return HANDLERS[args.command](args, started)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TooLarge as exc:
        print(f"too large: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    except (ByzmacError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
