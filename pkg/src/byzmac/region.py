"""Rate-region computations.

* corners of the inner bound, minimized over the joint distributions of
  ``(X, Y, X~, Y~, Z)`` whose ``(X, Y~, Z)`` and ``(X~, Y, Z)`` marginals look
  like honest transmissions with the given compositions;
* the closed form of those corners for the binary erasure MAC;
* vertices of the polytope of attack pairs ``(Q_{X'|X}, Q_{Y'|Y})`` that
  induce the same channel from either side, and the AV-MAC they generate;
* the randomized-coding region of an AV-MAC evaluated on simplex grids.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded, DeltaOutOfRange, GridTooCoarse, InfeasibleConstraintSet, InvalidParams
from .mac_core import AvMac, Kernel, Mac, as_distribution, builtin_channel, entropy, mutual_information

HEURISTIC_UPPER_BOUND_ON_MIN = "HEURISTIC_UPPER_BOUND_ON_MIN"
EXACT = "EXACT"
FORMS = ("R1_form", "R2_form")
LN2 = math.log(2.0)


@dataclass
class RatePoint:
    r1: float
    r2: float
    flag: str = EXACT

    def __post_init__(self):
        self.r1 = float(self.r1)
        self.r2 = float(self.r2)
        if not (math.isfinite(self.r1) and math.isfinite(self.r2)):
            raise InvalidParams("rates must be finite")
        # solver noise can leave values a hair below zero
        self.r1 = max(self.r1, 0.0) if self.r1 > -1e-9 else self.r1
        self.r2 = max(self.r2, 0.0) if self.r2 > -1e-9 else self.r2
        if self.r1 < 0 or self.r2 < 0:
            raise InvalidParams("rates must be nonnegative")

    def to_dict(self):
        return {"r1": self.r1, "r2": self.r2, "flag": self.flag}

    @classmethod
    def from_dict(cls, d):
        return cls(d["r1"], d["r2"], d.get("flag", EXACT))


@dataclass
class RegionSample:
    """Rate points with their provenance.

    ``provenance`` is one of ``inner_corner_1``, ``inner_corner_2``,
    ``inner``, ``jahn`` or ``mac_capacity``; ``rows`` holds per-grid-point
    bounds when the sample comes from a grid.
    """

    points: list
    provenance: str
    parameters: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)

    def __post_init__(self):
        if not self.points:
            raise InvalidParams("a region sample needs at least one point")

    def to_dict(self):
        return {
            "provenance": self.provenance,
            "parameters": self.parameters,
            "points": [p.to_dict() for p in self.points],
            "rows": self.rows,
        }

    @classmethod
    def from_dict(cls, d):
        return cls([RatePoint.from_dict(p) for p in d["points"]], d["provenance"], d.get("parameters") or {}, d.get("rows") or [])

    def table(self):
        return [{"provenance": self.provenance, "r1": p.r1, "r2": p.r2, "flag": p.flag} for p in self.points]


# -- inner bound ---------------------------------------------------------------


def _terms(form):
    # (term for r1, needs X indep Y), (term for r2, needs X indep Y)
    if form == "R1_form":
        return ("I(X;Z)", False), ("I(Y;Z|X)", True)
    return ("I(X;Z|Y)", True), ("I(Y;Z)", False)


def _evaluate(term, p):
    """Mutual-information term of a joint array indexed ``[x, y, x~, y~, z]``."""
    axes = {"I(X;Z)": ({0}, {4}, ()), "I(Y;Z|X)": ({1}, {4}, (0,)), "I(X;Z|Y)": ({0}, {4}, (1,)), "I(Y;Z)": ({1}, {4}, ())}
    a, b, c = axes[term]
    return mutual_information(p, a, b, c)


def natural_joint(mac, comp1, comp2):
    """The honest point ``X~ = X``, ``Y~ = Y`` with independent inputs."""
    nx, ny, nz = mac.w.shape
    p = np.zeros((nx, ny, nx, ny, nz))
    for x, y in itertools.product(range(nx), range(ny)):
        p[x, y, x, y, :] = comp1[x] * comp2[y] * mac.w[x, y]
    return p


def constraint_residual(mac, comp1, comp2, p, independent=False):
    """Largest violation of the marginal constraints defining the joint set."""
    w = mac.w
    p_xtz = p.sum(axis=(1, 2))
    p_ty = p_xtz.sum(axis=(0, 2))
    p_tyz = p.sum(axis=(0, 3))
    p_tx = p_tyz.sum(axis=(1, 2))
    r = max(
        np.abs(p_xtz - np.einsum("x,t,xtz->xtz", comp1, p_ty, w)).max(),
        np.abs(p_tyz - np.einsum("t,y,tyz->tyz", p_tx, comp2, w)).max(),
        np.abs(p.sum() - 1.0),
        max(0.0, -p.min()),
    )
    if independent:
        r = max(r, np.abs(p.sum(axis=(2, 3, 4)) - np.outer(comp1, comp2)).max())
    return float(r)


def _solve_term(mac, comp1, comp2, term, independent, solver):
    import cvxpy as cp

    nx, ny, nz = mac.w.shape
    w = mac.w
    dim = nx * ny * nx * ny * nz
    v = cp.Variable(dim, nonneg=True)
    shape = (nx, ny, nx, ny, nz)
    idx = np.arange(dim).reshape(shape)

    def marg(keep):
        """Sparse 0/1 matrix mapping the flat joint to a marginal over ``keep``."""
        keys = np.ravel_multi_index(tuple(np.indices(shape)[list(keep)].reshape(len(keep), -1)), tuple(shape[a] for a in keep))
        size = int(np.prod([shape[a] for a in keep]))
        mat = np.zeros((size, dim))
        mat[keys, idx.ravel()] = 1.0
        return mat

    m_xtz, m_ty = marg((0, 3, 4)), marg((3,))
    m_tyz, m_tx = marg((2, 1, 4)), marg((2,))
    # P_{X Y~ Z}(x, t, z) = P1(x) P_{Y~}(t) W(z | x, t), linear in the joint
    lift1 = np.zeros((nx * ny * nz, ny))
    for x, t, z in itertools.product(range(nx), range(ny), range(nz)):
        lift1[(x * ny + t) * nz + z, t] = comp1[x] * w[x, t, z]
    lift2 = np.zeros((nx * ny * nz, nx))
    for t, y, z in itertools.product(range(nx), range(ny), range(nz)):
        lift2[(t * ny + y) * nz + z, t] = comp2[y] * w[t, y, z]
    cons = [cp.sum(v) == 1, m_xtz @ v == lift1 @ (m_ty @ v), m_tyz @ v == lift2 @ (m_tx @ v)]
    if independent:
        cons.append(marg((0, 1)) @ v == np.outer(comp1, comp2).ravel())
    # each term is a relative entropy between a marginal and an affine reference
    if term == "I(X;Z)":
        a = marg((0, 4)) @ v
        ref = cp.hstack([comp1[x] * (marg((4,)) @ v) for x in range(nx)])
    elif term == "I(Y;Z)":
        a = marg((1, 4)) @ v
        ref = cp.hstack([comp2[y] * (marg((4,)) @ v) for y in range(ny)])
    elif term == "I(Y;Z|X)":
        a = marg((0, 1, 4)) @ v
        m_xz = marg((0, 4)) @ v
        ref = cp.hstack([comp2[y] * m_xz[x * nz : (x + 1) * nz] for x in range(nx) for y in range(ny)])
    else:
        a = marg((1, 0, 4)) @ v
        m_yz = marg((1, 4)) @ v
        ref = cp.hstack([comp1[x] * m_yz[y * nz : (y + 1) * nz] for y in range(ny) for x in range(nx)])
    prob = cp.Problem(cp.Minimize(cp.sum(cp.rel_entr(a, ref)) / LN2), cons)
    try:
        prob.solve(solver=solver)
    except cp.error.SolverError:
        return None
    if prob.status in ("infeasible", "infeasible_inaccurate"):
        raise InfeasibleConstraintSet(f"no joint distribution satisfies the constraints for {term}")
    if v.value is None:
        return None
    p = np.clip(v.value, 0.0, None)
    return (p / p.sum()).reshape(shape)


def inner_bound_corner(mac, comp1, comp2, form="R1_form", search_config=None):
    """One corner of the inner bound for input compositions ``comp1``, ``comp2``.

    ``R1_form`` minimizes ``I(X;Z)`` and, over inputs with ``X`` independent
    of ``Y``, ``I(Y;Z|X)``; ``R2_form`` minimizes ``I(X;Z|Y)`` (independent
    inputs) and ``I(Y;Z)``.  Each term is minimized separately.

    With the input marginals pinned by the constraints every term is convex
    in the joint, so a conic solver is used.  The reported value is the
    smaller of the solver's point (re-evaluated here, constraint residual
    at most ``search_config["tol"]``) and the honest point, and the result
    is flagged :data:`HEURISTIC_UPPER_BOUND_ON_MIN` because solver
    tolerances prevent a certified minimum.

    ``search_config`` keys: ``solver`` (default ``"CLARABEL"``), ``tol``
    (default ``1e-6``).
    """
    if form not in FORMS:
        raise InvalidParams(f"form must be one of {FORMS}")
    cfg = {"solver": "CLARABEL", "tol": 1e-6}
    cfg.update(search_config or {})
    comp1 = as_distribution(comp1, mac.nx)
    comp2 = as_distribution(comp2, mac.ny)
    start = natural_joint(mac, comp1, comp2)
    vals = []
    for term, independent in _terms(form):
        best = _evaluate(term, start)
        p = _solve_term(mac, comp1, comp2, term, independent, cfg["solver"])
        if p is not None and constraint_residual(mac, comp1, comp2, p, independent) <= cfg["tol"]:
            best = min(best, _evaluate(term, p))
        vals.append(best)
    return RatePoint(vals[0], vals[1], HEURISTIC_UPPER_BOUND_ON_MIN)


def inner_region_sample(mac, comp1, comp2, search_config=None):
    pts = [inner_bound_corner(mac, comp1, comp2, f, search_config) for f in FORMS]
    params = {"comp1": list(map(float, comp1)), "comp2": list(map(float, comp2))}
    return RegionSample(pts, "inner", params)


def erasure_inner_bound_exact(delta):
    """Both inner-bound corners of the binary erasure MAC in closed form.

    With ``P1 = (1/2 - delta, 1/2 + delta)`` and ``P2 = (1/2 + delta, 1/2 - delta)``
    every admissible joint has ``X~ = X`` and ``Y~ = Y``, so the corners are
    ``(I(X; X+Y), H(Y))`` and ``(H(X), I(Y; X+Y))`` under independent inputs.
    """
    if not 0 < delta < 0.5:
        raise DeltaOutOfRange(f"delta must lie in (0, 0.5), got {delta}")
    p1 = np.array([0.5 - delta, 0.5 + delta])
    p2 = np.array([0.5 + delta, 0.5 - delta])
    w = builtin_channel("erasure").w
    joint = np.einsum("x,y,xyz->xyz", p1, p2, w)
    c1 = RatePoint(mutual_information(joint, {0}, {2}), entropy(p2))
    c2 = RatePoint(entropy(p1), mutual_information(joint, {1}, {2}))
    return c1, c2


# -- outer bound: attack polytope -------------------------------------------------


def _polytope_system(mac):
    nx, ny, nz = mac.w.shape
    w = mac.w
    d = nx * nx + ny * ny
    rows, rhs = [], []
    for x, y, z in itertools.product(range(nx), range(ny), range(nz)):
        row = np.zeros(d)
        for xp in range(nx):
            row[x * nx + xp] += w[xp, y, z]
        for yp in range(ny):
            row[nx * nx + y * ny + yp] -= w[x, yp, z]
        rows.append(row)
        rhs.append(0.0)
    for x in range(nx):
        row = np.zeros(d)
        row[x * nx : (x + 1) * nx] = 1.0
        rows.append(row)
        rhs.append(1.0)
    for y in range(ny):
        row = np.zeros(d)
        row[nx * nx + y * ny : nx * nx + (y + 1) * ny] = 1.0
        rows.append(row)
        rhs.append(1.0)
    return np.array(rows), np.array(rhs)


def _split(q, nx, ny):
    return Kernel(q[: nx * nx].reshape(nx, nx)), Kernel(q[nx * nx :].reshape(ny, ny))


def outer_bound_residual(mac, qx, qy):
    """Largest gap between the two induced channels, plus any stochasticity defect."""
    qx = qx.k if isinstance(qx, Kernel) else np.asarray(qx, float)
    qy = qy.k if isinstance(qy, Kernel) else np.asarray(qy, float)
    left = np.einsum("ab,byz->ayz", qx, mac.w)
    right = np.einsum("cd,xdz->xcz", qy, mac.w)
    stoch = max(np.abs(qx.sum(axis=1) - 1).max(), np.abs(qy.sum(axis=1) - 1).max(), -min(qx.min(), qy.min(), 0.0))
    return float(max(np.abs(left - right).max(), stoch))


def induced_channel(mac, qx):
    qx = qx.k if isinstance(qx, Kernel) else np.asarray(qx, float)
    return Mac(np.einsum("ab,byz->ayz", qx, mac.w))


@dataclass
class PolytopeVertex:
    qx: Kernel
    qy: Kernel
    channel: Mac
    residual: float


def attack_polytope_vertices(mac, budget=10**6, dedupe_tol=1e-6):
    """Vertices of the set of attack pairs inducing a common channel.

    Every vertex is a basic feasible solution of the equality system with
    nonnegativity, so all column subsets of size ``rank`` are tried.

    Raises
    ------
    BudgetExceeded
        When the number of subsets exceeds ``budget``.
    """
    nx, ny = mac.nx, mac.ny
    a, b = _polytope_system(mac)
    d = a.shape[1]
    # keep an independent set of rows (pivoted QR on the transpose)
    from scipy.linalg import qr

    _, r_mat, piv = qr(a.T, pivoting=True, mode="economic")
    diag = np.abs(np.diag(r_mat))
    rank = int((diag > 1e-10 * max(diag.max(), 1.0)).sum())
    rows = np.sort(piv[:rank])
    a_red, b_red = a[rows], b[rows]
    subsets = math.comb(d, rank)
    if subsets > budget:
        raise BudgetExceeded("attack polytope basis enumeration", subsets, budget)
    found = []
    for cols in itertools.combinations(range(d), rank):
        sub = a_red[:, cols]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        q_b = np.linalg.solve(sub, b_red)
        if q_b.min() < -1e-10:
            continue
        q = np.zeros(d)
        q[list(cols)] = np.clip(q_b, 0.0, None)
        if np.abs(a @ q - b).max() > 1e-9:
            continue
        if any(np.abs(q - other).max() <= dedupe_tol for other in found):
            continue
        found.append(q)
    out = []
    for q in found:
        qx, qy = _split(q, nx, ny)
        out.append(PolytopeVertex(qx, qy, induced_channel(mac, qx), outer_bound_residual(mac, qx, qy)))
    return out


def induced_avmac(mac, vertices=None, budget=10**6):
    """AV-MAC whose states are the channels induced by the polytope vertices."""
    if vertices is None:
        vertices = attack_polytope_vertices(mac, budget)
    w = np.stack([v.channel.w for v in vertices], axis=2)
    return AvMac(w, label=f"outer({mac.label})")


# -- AV-MAC region ----------------------------------------------------------------


def simplex_grid(size, resolution):
    """All distributions on ``size`` symbols with entries in ``{0, 1/res, ..., 1}``."""
    if resolution < 1:
        raise InvalidParams("grid resolution must be at least 1")
    if resolution < 2:
        warnings.warn(f"simplex grid with resolution {resolution} only contains vertices", GridTooCoarse, stacklevel=2)
    pts = [c for c in itertools.product(range(resolution + 1), repeat=size) if sum(c) == resolution]
    return np.array(pts, dtype=float) / resolution


def _jahn_terms(avmac, px, py, ps):
    joint = np.einsum("x,y,xyz->xyz", px, py, avmac.mixed(ps).w)
    return (
        mutual_information(joint, {0}, {2}, (1,)),
        mutual_information(joint, {1}, {2}, (0,)),
        mutual_information(joint, {0, 1}, {2}),
    )


def avmac_rate_region(avmac, input_grid=4, state_grid=4, provenance="jahn"):
    """Randomized-coding region of an AV-MAC on simplex grids.

    For every ``(P_X, P_Y)`` on the input grid the three bounds are
    minimized over ``P_S`` on the state grid, each term on its own.  Each row
    records the bounds; the points are the two corners of each pentagon.
    """
    pxs = simplex_grid(avmac.nx, input_grid)
    pys = simplex_grid(avmac.ny, input_grid)
    pss = simplex_grid(avmac.ns, state_grid)
    rows, points = [], []
    for px in pxs:
        for py in pys:
            vals = np.array([_jahn_terms(avmac, px, py, ps) for ps in pss])
            a, b, c = vals.min(axis=0)
            rows.append({"p_x": px.tolist(), "p_y": py.tolist(), "r1_max": float(a), "r2_max": float(b), "sum_max": float(c)})
            r1 = min(a, c)
            points.append(RatePoint(r1, max(0.0, min(b, c - r1))))
            r2 = min(b, c)
            points.append(RatePoint(max(0.0, min(a, c - r2)), r2))
    params = {"input_grid": input_grid, "state_grid": state_grid, "label": avmac.label}
    return RegionSample(points, provenance, params, rows)


def mac_region_sample(mac, input_grid=4):
    """Non-adversarial MAC region on the same grid (a one-state AV-MAC)."""
    av = AvMac(mac.w[:, :, None, :], label=mac.label)
    # any state resolution gives the single point mass
    return avmac_rate_region(av, input_grid, 2, provenance="mac_capacity")
