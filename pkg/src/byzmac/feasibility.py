"""Linear feasibility over stochastic-kernel variables.

A :class:`FeasibilityProblem` asks for kernels (row-stochastic tables) that
satisfy a list of linear equalities.  :func:`solve_linear_feasibility`
minimizes the total absolute violation of the equalities with the HiGHS
linear-programming solver and maps the optimum to a three-way verdict.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import bmat, coo_matrix, identity

from .errors import Degenerate, ShapeMismatch
from .mac_core import Kernel

DEFAULT_TOL = 1e-9


class Verdict(str, Enum):
    FEASIBLE = "FEASIBLE"
    INFEASIBLE = "INFEASIBLE"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass
class FeasibilityProblem:
    """Kernel variables plus linear equality constraints.

    Attributes
    ----------
    kernels : list of (input_shape, output_size)
        Shapes of the unknown kernels.
    equalities : list of (terms, rhs)
        Each term is ``(kernel_index, input_tuple, output_symbol, coefficient)``
        and the constraint reads ``sum(coef * K[input, output]) == rhs``.
    names : list of str
        Optional labels for the kernels, carried into reports.
    """

    kernels: list
    equalities: list = field(default_factory=list)
    names: list = field(default_factory=list)

    def __post_init__(self):
        self.kernels = [(tuple(int(a) for a in shp), int(out)) for shp, out in self.kernels]
        self._offsets = np.cumsum([0] + [int(np.prod(s)) * o for s, o in self.kernels])

    @property
    def num_vars(self):
        return int(self._offsets[-1])

    def add_equality(self, terms, rhs=0.0):
        self.equalities.append((list(terms), float(rhs)))

    def var_index(self, kernel, inputs, output):
        shp, out = self.kernels[kernel]
        local = np.ravel_multi_index(tuple(inputs) + (output,), shp + (out,))
        return int(self._offsets[kernel] + local)

    def scaled(self, factor):
        """Copy with every equality (both sides) multiplied by ``factor``."""
        eqs = [([(k, i, o, c * factor) for k, i, o, c in terms], rhs * factor) for terms, rhs in self.equalities]
        return FeasibilityProblem(list(self.kernels), eqs, list(self.names))

    def matrices(self):
        """Equality matrix ``A``, right-hand side ``b`` and row-sum matrix ``R``."""
        rows, cols, vals = [], [], []
        b = np.zeros(len(self.equalities))
        for r, (terms, rhs) in enumerate(self.equalities):
            b[r] = rhs
            for k, inp, o, c in terms:
                if k < 0 or k >= len(self.kernels):
                    raise ShapeMismatch(f"kernel index {k} out of range")
                rows.append(r)
                cols.append(self.var_index(k, inp, o))
                vals.append(float(c))
        a = coo_matrix((vals, (rows, cols)), shape=(len(self.equalities), self.num_vars)).tocsr()
        srows, scols = [], []
        r = 0
        for kidx, (shp, out) in enumerate(self.kernels):
            for row in range(int(np.prod(shp))):
                base = int(self._offsets[kidx]) + row * out
                srows.extend([r] * out)
                scols.extend(range(base, base + out))
                r += 1
        s = coo_matrix((np.ones(len(srows)), (srows, scols)), shape=(r, self.num_vars)).tocsr()
        return a, b, s

    def unflatten(self, q):
        out = []
        for kidx, (shp, o) in enumerate(self.kernels):
            block = q[self._offsets[kidx] : self._offsets[kidx + 1]]
            out.append(Kernel(np.asarray(block, dtype=float).reshape(shp + (o,))))
        return out

    def flatten(self, kernels):
        if len(kernels) != len(self.kernels):
            raise ShapeMismatch(f"expected {len(self.kernels)} kernels, got {len(kernels)}")
        parts = []
        for kern, (shp, o) in zip(kernels, self.kernels):
            arr = np.asarray(kern.k if isinstance(kern, Kernel) else kern, dtype=float)
            if arr.shape != shp + (o,):
                raise ShapeMismatch(f"kernel shape {arr.shape} does not match {shp + (o,)}")
            parts.append(arr.ravel())
        return np.concatenate(parts) if parts else np.zeros(0)


@dataclass
class FeasibilityOutcome:
    verdict: Verdict
    certificate: list | None
    violation: float
    margin: float
    names: list = field(default_factory=list)

    @property
    def feasible(self):
        return self.verdict is Verdict.FEASIBLE


def verify_certificate(problem, kernels):
    """Largest equality residual or stochasticity defect of ``kernels``.

    Computed by direct substitution, independently of the solver.
    """
    q = problem.flatten(kernels)
    worst = 0.0
    for terms, rhs in problem.equalities:
        lhs = sum(c * q[problem.var_index(k, i, o)] for k, i, o, c in terms)
        worst = max(worst, abs(lhs - rhs))
    for kern in kernels:
        kern = kern if isinstance(kern, Kernel) else Kernel(np.asarray(kern, float))
        worst = max(worst, kern.row_deviation())
    return float(worst)


def _residual(a, b, s, q):
    eq = np.abs(a @ q - b).max() if b.size else 0.0
    rs = np.abs(s @ q - 1.0).max() if s.shape[0] else 0.0
    return max(float(eq), float(rs), float(max(0.0, -q.min())) if q.size else 0.0)


def _polish(a, b, s, q):
    """Project ``q`` onto the equality system restricted to its support.

    Solver output carries residuals around the solver's own tolerance; a
    minimum-norm correction on the support usually brings it to rounding
    level without leaving the nonnegative orthant.
    """
    support = np.flatnonzero(q > 1e-12)
    if support.size == 0:
        return q
    m = np.vstack([a[:, support].toarray(), s[:, support].toarray()])
    rhs = np.concatenate([b, np.ones(s.shape[0])])
    resid = rhs - m @ q[support]
    delta, *_ = np.linalg.lstsq(m, resid, rcond=None)
    out = q.copy()
    out[support] += delta
    if out.min() < 0:
        return q
    return out


def solve_linear_feasibility(problem, tol=DEFAULT_TOL):
    """Decide whether the kernels of ``problem`` can satisfy its equalities.

    The linear program minimizes ``sum |A q - b|`` over row-stochastic ``q``.
    The minimum is the reported ``margin``.

    Returns
    -------
    FeasibilityOutcome
        FEASIBLE when the polished solution verifies to within ``tol``;
        INFEASIBLE when the margin exceeds ``10 * tol``; INCONCLUSIVE otherwise.
    """
    nv = problem.num_vars
    if nv == 0:
        raise Degenerate("problem has no variables")
    a, b, s = problem.matrices()
    m = a.shape[0]
    # variables: q (nv), positive slack (m), negative slack (m)
    cost = np.concatenate([np.zeros(nv), np.ones(2 * m)])
    if m:
        a_eq = bmat(
            [
                [a, -identity(m), identity(m)],
                [s, None, None],
            ],
            format="csr",
        )
    else:
        a_eq = s
    b_eq = np.concatenate([b, np.ones(s.shape[0])])
    res = linprog(
        cost,
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=(0, None),
        method="highs",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status != 0:
        return FeasibilityOutcome(Verdict.INCONCLUSIVE, None, float("inf"), 0.0, list(problem.names))
    q = np.clip(res.x[:nv], 0.0, None)
    margin = float(max(res.fun, 0.0))
    viol = _residual(a, b, s, q)
    if viol > tol:
        q = _polish(a, b, s, q)
        viol = _residual(a, b, s, q)
    if viol <= tol:
        kernels = problem.unflatten(q)
        return FeasibilityOutcome(Verdict.FEASIBLE, kernels, verify_certificate(problem, kernels), margin, list(problem.names))
    verdict = Verdict.INFEASIBLE if margin > 10 * tol else Verdict.INCONCLUSIVE
    return FeasibilityOutcome(verdict, None, viol, margin, list(problem.names))
