"""Channel conditions as feasibility problems.

Each ``*_problem`` builder turns one channel condition into a
:class:`~byzmac.feasibility.FeasibilityProblem`; the ``check_*`` wrappers
solve it.  Kernel input tuples follow the order of the conditioning
variables in the kernel's name, e.g. ``Q_{Y|X~Y~}`` is indexed ``[x~, y~, y]``.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParams
from .feasibility import DEFAULT_TOL, FeasibilityProblem, Verdict, solve_linear_feasibility
from .mac_core import Kernel

PROPERTIES = (
    "spoofable_1",
    "spoofable_2",
    "symmetrizable_1",
    "symmetrizable_2",
    "overwritable_1",
    "overwritable_2",
)


def _difference(plus, minus):
    """Merge two term lists into ``plus - minus`` with zero terms removed."""
    acc = defaultdict(float)
    for k, i, o, c in plus:
        acc[(k, i, o)] += c
    for k, i, o, c in minus:
        acc[(k, i, o)] -= c
    return [(k, i, o, c) for (k, i, o), c in sorted(acc.items()) if c != 0.0]


def _add(problem, plus, minus, rhs=0.0):
    terms = _difference(plus, minus)
    if terms or rhs != 0.0:
        problem.add_equality(terms, rhs)


def spoof1_problem(mac):
    """Kernels ``Q_{Y|X~Y~}`` and ``Q_{X|X~X'}``; three expressions equal for all x', x~, y~, z."""
    w = mac.w
    nx, ny, nz = mac.nx, mac.ny, mac.nz
    prob = FeasibilityProblem([((nx, ny), ny), ((nx, nx), nx)], names=["Q_Y|XtYt", "Q_X|XtXp"])
    for xp, xt, yt, z in itertools.product(range(nx), range(nx), range(ny), range(nz)):
        e1 = [(0, (xt, yt), y, w[xp, y, z]) for y in range(ny)]
        e2 = [(0, (xp, yt), y, w[xt, y, z]) for y in range(ny)]
        e3 = [(1, (xt, xp), x, w[x, yt, z]) for x in range(nx)]
        _add(prob, e1, e2)
        _add(prob, e1, e3)
    return prob


def spoof2_problem(mac):
    """Kernels ``Q_{X|X~Y~}`` and ``Q_{Y|Y~Y'}``; three expressions equal for all x~, y~, y', z."""
    w = mac.w
    nx, ny, nz = mac.nx, mac.ny, mac.nz
    prob = FeasibilityProblem([((nx, ny), nx), ((ny, ny), ny)], names=["Q_X|XtYt", "Q_Y|YtYp"])
    for xt, yt, yp, z in itertools.product(range(nx), range(ny), range(ny), range(nz)):
        f1 = [(0, (xt, yt), x, w[x, yp, z]) for x in range(nx)]
        f2 = [(0, (xt, yp), x, w[x, yt, z]) for x in range(nx)]
        f3 = [(1, (yt, yp), y, w[xt, y, z]) for y in range(ny)]
        _add(prob, f1, f2)
        _add(prob, f1, f3)
    return prob


def symmetrizable_problem(mac, user):
    """User 2: kernel ``P_{X|Y}``; user 1: kernel ``P_{Y|X}``."""
    w = mac.w
    nx, ny, nz = mac.nx, mac.ny, mac.nz
    if user == 2:
        prob = FeasibilityProblem([((ny,), nx)], names=["P_X|Y"])
        for y, yp, z in itertools.product(range(ny), range(ny), range(nz)):
            lhs = [(0, (yp,), x, w[x, y, z]) for x in range(nx)]
            rhs = [(0, (y,), x, w[x, yp, z]) for x in range(nx)]
            _add(prob, lhs, rhs)
    elif user == 1:
        prob = FeasibilityProblem([((nx,), ny)], names=["P_Y|X"])
        for x, xp, z in itertools.product(range(nx), range(nx), range(nz)):
            lhs = [(0, (xp,), y, w[x, y, z]) for y in range(ny)]
            rhs = [(0, (x,), y, w[xp, y, z]) for y in range(ny)]
            _add(prob, lhs, rhs)
    else:
        raise InvalidParams(f"user must be 1 or 2, got {user}")
    return prob


def overwritable_problem(mac, user):
    """User 2: kernel ``P_{X'|XY}`` (user 1 erases user 2); user 1 mirrors with ``P_{Y'|XY}``."""
    w = mac.w
    nx, ny, nz = mac.nx, mac.ny, mac.nz
    if user == 2:
        prob = FeasibilityProblem([((nx, ny), nx)], names=["P_Xp|XY"])
        for x, y, yp, z in itertools.product(range(nx), range(ny), range(ny), range(nz)):
            terms = [(0, (x, y), xp, w[xp, yp, z]) for xp in range(nx)]
            _add(prob, terms, [], w[x, y, z])
    elif user == 1:
        prob = FeasibilityProblem([((nx, ny), ny)], names=["P_Yp|XY"])
        for x, y, xp, z in itertools.product(range(nx), range(ny), range(nx), range(nz)):
            terms = [(0, (x, y), yp, w[xp, yp, z]) for yp in range(ny)]
            _add(prob, terms, [], w[x, y, z])
    else:
        raise InvalidParams(f"user must be 1 or 2, got {user}")
    return prob


def avmac_symmetrizable_problem(avmac, kind):
    """State kernel ``U(s|.)`` conditioned on x, y or (x, y) depending on ``kind``."""
    w = avmac.w
    nx, ny, ns, nz = avmac.nx, avmac.ny, avmac.ns, avmac.nz
    S = range(ns)
    if kind == "X":
        prob = FeasibilityProblem([((nx,), ns)], names=["U_S|X"])
        for x, xp, y, z in itertools.product(range(nx), range(nx), range(ny), range(nz)):
            lhs = [(0, (xp,), s, w[x, y, s, z]) for s in S]
            rhs = [(0, (x,), s, w[xp, y, s, z]) for s in S]
            _add(prob, lhs, rhs)
    elif kind == "Y":
        prob = FeasibilityProblem([((ny,), ns)], names=["U_S|Y"])
        for x, y, yp, z in itertools.product(range(nx), range(ny), range(ny), range(nz)):
            lhs = [(0, (yp,), s, w[x, y, s, z]) for s in S]
            rhs = [(0, (y,), s, w[x, yp, s, z]) for s in S]
            _add(prob, lhs, rhs)
    elif kind == "XY":
        prob = FeasibilityProblem([((nx, ny), ns)], names=["U_S|XY"])
        pairs = list(itertools.product(range(nx), range(ny)))
        for (x, y), (xp, yp), z in itertools.product(pairs, pairs, range(nz)):
            lhs = [(0, (xp, yp), s, w[x, y, s, z]) for s in S]
            rhs = [(0, (x, y), s, w[xp, yp, s, z]) for s in S]
            _add(prob, lhs, rhs)
    else:
        raise InvalidParams(f"kind must be X, Y or XY, got {kind!r}")
    return prob


def check_spoofable_1(mac, tol=DEFAULT_TOL):
    return solve_linear_feasibility(spoof1_problem(mac), tol)


def check_spoofable_2(mac, tol=DEFAULT_TOL):
    return solve_linear_feasibility(spoof2_problem(mac), tol)


def check_symmetrizable(mac, user, tol=DEFAULT_TOL):
    return solve_linear_feasibility(symmetrizable_problem(mac, user), tol)


def check_overwritable(mac, user, tol=DEFAULT_TOL):
    return solve_linear_feasibility(overwritable_problem(mac, user), tol)


def check_avmac_symmetrizable(avmac, kind, tol=DEFAULT_TOL):
    return solve_linear_feasibility(avmac_symmetrizable_problem(avmac, kind), tol)


def problem_for(mac, prop):
    """Feasibility problem behind one of :data:`PROPERTIES`."""
    name, user = prop.rsplit("_", 1)
    user = int(user)
    if name == "spoofable":
        return spoof1_problem(mac) if user == 1 else spoof2_problem(mac)
    if name == "symmetrizable":
        return symmetrizable_problem(mac, user)
    if name == "overwritable":
        return overwritable_problem(mac, user)
    raise InvalidParams(f"unknown property {prop!r}")


@dataclass
class ClassificationReport:
    outcomes: dict
    hierarchy_consistent: bool
    notes: list = field(default_factory=list)
    label: str = ""

    def verdict(self, prop):
        return self.outcomes[prop].verdict

    def table(self):
        return {p: self.outcomes[p].verdict.value for p in PROPERTIES}


def hierarchy_notes(outcomes):
    """Violations of overwritable => spoofable => symmetrizable among decisive verdicts."""
    notes = []
    decisive = (Verdict.FEASIBLE, Verdict.INFEASIBLE)
    for i in (1, 2):
        chain = [f"overwritable_{i}", f"spoofable_{i}", f"symmetrizable_{i}"]
        for stronger, weaker in zip(chain, chain[1:]):
            a, b = outcomes[stronger].verdict, outcomes[weaker].verdict
            if a in decisive and b in decisive and a is Verdict.FEASIBLE and b is not Verdict.FEASIBLE:
                notes.append(f"{stronger} is FEASIBLE but {weaker} is {b.value}")
    return notes


def classify(mac, tol=DEFAULT_TOL):
    """Run all six checks in a fixed order and cross-check the class hierarchy."""
    outcomes = {}
    for prop in PROPERTIES:
        outcomes[prop] = solve_linear_feasibility(problem_for(mac, prop), tol)
    violations = hierarchy_notes(outcomes)
    notes = list(violations)
    for prop in PROPERTIES:
        if outcomes[prop].verdict is Verdict.INCONCLUSIVE:
            notes.append(f"{prop} is INCONCLUSIVE (margin {outcomes[prop].margin:.3e})")
    return ClassificationReport(outcomes, not violations, notes, label=mac.label)


# -- constructive implications between the classes ----------------------------


def spoof2_from_overwritable(p_xp_xy, q_y=None):
    """Spoofing pair for user 2 built from a 2-overwriting kernel ``P_{X'|XY}``.

    ``Q_{X|X~Y~}(x|x~,y~) = sum_y Q_Y(y) P(x|x~,y)`` and ``Q_{Y|Y~Y'} = Q_Y``.
    """
    p = np.asarray(p_xp_xy.k if isinstance(p_xp_xy, Kernel) else p_xp_xy, float)
    ny = p.shape[1]
    q_y = np.full(ny, 1.0 / ny) if q_y is None else np.asarray(q_y, float)
    mix = np.einsum("y,ayx->ax", q_y, p)
    q_x = np.repeat(mix[:, None, :], ny, axis=1)
    q_yy = np.broadcast_to(q_y, (ny, ny, ny)).copy()
    return Kernel(q_x), Kernel(q_yy)


def spoof1_from_overwritable(p_yp_xy, q_x=None):
    """Mirror of :func:`spoof2_from_overwritable` built from ``P_{Y'|XY}``."""
    p = np.asarray(p_yp_xy.k if isinstance(p_yp_xy, Kernel) else p_yp_xy, float)
    nx = p.shape[0]
    q_x = np.full(nx, 1.0 / nx) if q_x is None else np.asarray(q_x, float)
    mix = np.einsum("x,xby->by", q_x, p)
    q_y = np.repeat(mix[None, :, :], nx, axis=0)
    q_xx = np.broadcast_to(q_x, (nx, nx, nx)).copy()
    return Kernel(q_y), Kernel(q_xx)


def sym2_from_spoof2(q_x_xtyt, x_tilde=0):
    """``P_{X|Y}(x|y) = Q_{X|X~Y~}(x|x~,y)`` for a fixed ``x~``."""
    q = np.asarray(q_x_xtyt.k if isinstance(q_x_xtyt, Kernel) else q_x_xtyt, float)
    return Kernel(q[x_tilde].copy())


def sym1_from_spoof1(q_y_xtyt, y_tilde=0):
    """``P_{Y|X}(y|x) = Q_{Y|X~Y~}(y|x,y~)`` for a fixed ``y~``."""
    q = np.asarray(q_y_xtyt.k if isinstance(q_y_xtyt, Kernel) else q_y_xtyt, float)
    return Kernel(q[:, y_tilde].copy())
