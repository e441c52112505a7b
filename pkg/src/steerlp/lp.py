"""Minimum hidden-state mass as a sparse linear program.

Variables are node masses q_j and joint masses w_{A,a,j} = q_j * p(a|A, xi_j).
Constraints: outcome sums of w return q (per measurement and node), first
moments of w reproduce the shrinked vectors, and outcome totals of w
reproduce the outcome probabilities times the total mass.  Minimizing
sum_j q_j yields the smallest model mass on the given grid; the optimum
exceeding 1 certifies steering for the measurement set, with the dual
solution providing the witness functional.
"""

import io

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from . import _kernels
from .assemblage import Assemblage
from .gmodel import (
    ExtremeGModel,
    HiddenGrid,
    complete_to_lhs,
    check_gmodel,
)
from .qubit import ValidationError

FEAS_TOL = 1e-8        # absolute, on scaled rows
CS_TOL = 1e-7          # complementary slackness
GAP_TOL = 1e-7         # relative duality gap
STEERABLE_MARGIN = 1e-6
UNSTEERABLE_MARGIN = 1e-9
LHS_CHECK_TOL = 1e-7

_HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": 1e-9,
    "dual_feasibility_tolerance": 1e-9,
}


class NoWitnessError(ValueError):
    """Witness extraction requires an optimal objective above 1."""


class SteeringLP:
    """Sparse equality-form LP: minimize c.x, A x = b, x >= 0.

    Column layout: q_0..q_{n-1}, then w ordered (measurement, outcome, node).
    Row layout: response-normalization block (measurement, node), moment
    block (measurement, outcome, coordinate), probability block (one row
    per measurement; the other outcome's row is implied and dropped).
    Probability rows are rescaled to unit coefficient norm; the divisors
    are kept for dual recovery.
    """

    def __init__(self, target, grid, a_eq, b_eq, c, prob_row_scale):
        self.target = target
        self.grid = grid
        self.a_eq = a_eq
        self.b_eq = b_eq
        self.c = c
        self.prob_row_scale = prob_row_scale
        n = grid.n_nodes
        m = len(target)
        self.n_nodes = n
        self.n_meas = m
        self.n_vars = n + 2 * m * n
        self.resp_rows = slice(0, m * n)
        self.mom_rows = slice(m * n, m * n + 6 * m)
        self.prob_rows = slice(m * n + 6 * m, m * n + 7 * m)

    def w_col(self, meas, outcome_idx, node):
        return self.n_nodes + (meas * 2 + outcome_idx) * self.n_nodes + node


def build_steering_lp(target: Assemblage, grid: HiddenGrid) -> SteeringLP:
    m = len(target)
    if m == 0:
        raise ValidationError("measurement set is empty")
    n = grid.n_nodes
    ns = grid.n_surface
    nodes = grid.surface_nodes

    rows = []
    cols = []
    vals = []

    def w_col(a_i, out_i, j):
        return n + (a_i * 2 + out_i) * n + j

    # response normalization: w(A,+,j) + w(A,-,j) - q_j = 0
    r0 = 0
    for a_i in range(m):
        base = r0 + a_i * n
        for j in range(n):
            rows.extend((base + j, base + j, base + j))
            cols.extend((w_col(a_i, 0, j), w_col(a_i, 1, j), j))
            vals.extend((1.0, 1.0, -1.0))

    # moments: sum_j w(A,a,j) xi_j = s_A^a (center has zero coefficients)
    m0 = m * n
    b_mom = np.zeros(6 * m)
    for a_i in range(m):
        for out_i in range(2):
            for coord in range(3):
                row = m0 + (a_i * 2 + out_i) * 3 + coord
                b_mom[(a_i * 2 + out_i) * 3 + coord] = target.sv[a_i, out_i, coord]
                for j in range(ns):
                    v = nodes[j, coord]
                    if v != 0.0:
                        rows.append(row)
                        cols.append(w_col(a_i, out_i, j))
                        vals.append(v)

    # probabilities (retained outcome + only, scaled to unit norm):
    #   sum_j w(A,+,j) - p(+|A) sum_j q_j = 0
    p0 = m0 + 6 * m
    prob_scale = np.empty(m)
    for a_i in range(m):
        p_plus = target.p[a_i, 0]
        nu = np.sqrt(n * (1.0 + p_plus * p_plus))
        prob_scale[a_i] = nu
        row = p0 + a_i
        for j in range(n):
            rows.append(row)
            cols.append(w_col(a_i, 0, j))
            vals.append(1.0 / nu)
        if p_plus != 0.0:
            for j in range(n):
                rows.append(row)
                cols.append(j)
                vals.append(-p_plus / nu)

    n_rows = m * n + 7 * m
    n_cols = n + 2 * m * n
    a_eq = sp.csr_matrix(
        (np.array(vals), (np.array(rows), np.array(cols))), shape=(n_rows, n_cols)
    )
    b_eq = np.concatenate([np.zeros(m * n), b_mom, np.zeros(m)])
    c = np.zeros(n_cols)
    c[:n] = 1.0
    return SteeringLP(target, grid, a_eq, b_eq, c, prob_scale)


class LPSolution:
    def __init__(self, status, objective, x, y, residuals, message=""):
        self.status = status  # optimal | infeasible | unbounded | tolerance-failure
        self.objective = objective
        self.x = x
        self.y = y
        self.residuals = residuals
        self.message = message


def solve_lp(lp: SteeringLP) -> LPSolution:
    """Solve with HiGHS and verify the optimality certificates.

    A returned 'optimal' status guarantees primal feasibility <= 1e-8,
    complementary slackness <= 1e-7 and relative duality gap <= 1e-7;
    anything looser is downgraded to 'tolerance-failure'.
    """
    res = linprog(
        lp.c,
        A_eq=lp.a_eq,
        b_eq=lp.b_eq,
        bounds=(0.0, None),
        method="highs",
        options=dict(_HIGHS_OPTIONS),
    )
    if res.status == 2:
        return LPSolution("infeasible", None, None, None, {}, res.message)
    if res.status == 3:
        return LPSolution("unbounded", None, None, None, {}, res.message)
    if res.status != 0:
        return LPSolution("tolerance-failure", None, None, None, {}, res.message)

    x = res.x
    y = res.eqlin.marginals
    primal_res = float(np.abs(lp.a_eq @ x - lp.b_eq).max())
    reduced = lp.c - lp.a_eq.T @ y
    dual_res = float(max(0.0, -reduced.min()))
    comp_slack = float(np.abs(x * reduced).max())
    obj = float(lp.c @ x)
    gap = float(abs(obj - lp.b_eq @ y) / (1.0 + abs(obj)))
    residuals = {
        "primal": primal_res,
        "dual": dual_res,
        "complementary_slackness": comp_slack,
        "duality_gap_rel": gap,
    }
    status = "optimal"
    if primal_res > FEAS_TOL or comp_slack > CS_TOL or gap > GAP_TOL:
        status = "tolerance-failure"
    return LPSolution(status, obj, x, y, residuals, res.message)


def model_from_solution(sol: LPSolution, lp: SteeringLP) -> ExtremeGModel:
    """Fold the primal vector back into node masses and responses."""
    n = lp.n_nodes
    m = lp.n_meas
    q = sol.x[:n].copy()
    w = sol.x[n:].reshape(m, 2, n)
    resp = np.full((m, 2, n), 0.5)
    occ = q > 1e-14
    with np.errstate(invalid="ignore", divide="ignore"):
        raw = w[:, :, occ] / q[occ]
    raw = np.clip(raw, 0.0, None)
    tot = raw.sum(axis=1, keepdims=True)
    resp[:, :, occ] = np.where(tot > 0.0, raw / tot, 0.5)
    return ExtremeGModel(lp.grid, lp.target.mset, q, resp)


class Witness:
    """Linear steering certificate assembled from the dual solution.

    For the solved target it evaluates to the LP optimum; for the
    reconstruction of any grid model of total mass 1 it evaluates to at
    most 1, so a value above 1 is incompatible with every hidden-state
    model on the grid.
    """

    def __init__(self, vectors, scalars, p_target):
        self.vectors = vectors      # (M, 2, 3) moment-row multipliers
        self.scalars = scalars      # (M,) probability-row multipliers
        self.p_target = p_target    # (M, 2)

    def evaluate(self, mass, moments, total=1.0) -> float:
        """mass: (M, 2) outcome masses, moments: (M, 2, 3), total: model mass."""
        val = float(np.einsum("maj,maj->", self.vectors, moments))
        val += float(self.scalars @ (mass[:, 0] - self.p_target[:, 0] * total))
        return val

    def evaluate_assemblage(self, asm: Assemblage) -> float:
        return self.evaluate(asm.p, asm.sv, 1.0)

    def evaluate_model(self, model: ExtremeGModel) -> float:
        mass, mom = _kernels.moment_sums(model.q, model.response, model.grid.nodes)
        return self.evaluate(mass, mom, float(model.q.sum()))


def witness_from_dual(sol: LPSolution, lp: SteeringLP) -> Witness:
    if sol.status != "optimal" or sol.objective is None or sol.objective <= 1.0:
        raise NoWitnessError("witness requires an optimal objective above 1")
    y_mom = sol.y[lp.mom_rows].reshape(lp.n_meas, 2, 3)
    y_prob = sol.y[lp.prob_rows] / lp.prob_row_scale  # undo row scaling
    return Witness(y_mom.copy(), y_prob.copy(), lp.target.p.copy())


class SteerabilityReport:
    def __init__(
        self,
        s_value,
        verdict,
        grid_level,
        n_nodes,
        n_measurements,
        residuals,
        witness=None,
        model=None,
        lhs_model=None,
        message="",
    ):
        self.s_value = s_value
        self.verdict = verdict
        self.grid_level = grid_level
        self.n_nodes = n_nodes
        self.n_measurements = n_measurements
        self.residuals = residuals
        self.witness = witness
        self.model = model
        self.lhs_model = lhs_model
        self.message = message

    def to_json_dict(self) -> dict:
        d = {
            "s_value": self.s_value,
            "verdict": self.verdict,
            "grid": {"level": self.grid_level, "nodes": self.n_nodes},
            "measurements": self.n_measurements,
            "residuals": self.residuals,
        }
        if self.witness is not None:
            d["witness"] = {
                "vectors": self.witness.vectors.tolist(),
                "scalars": self.witness.scalars.tolist(),
                "p_target": self.witness.p_target.tolist(),
            }
        if self.message:
            d["message"] = self.message
        return d


def min_s(target: Assemblage, grid: HiddenGrid) -> SteerabilityReport:
    """Smallest grid-model mass for the assemblage, with verdict.

    The finite grid makes the value an upper bound on the grid-free
    optimum, and the finite measurement set makes any verdict relative
    to that set.  'unsteerable-for-set' is only issued once the primal
    model has been completed to a mass-1 model that revalidates against
    the target; 'steerable-for-set' requires the optimum to clear 1 by
    more than the solver margin.
    """
    lp = build_steering_lp(target, grid)
    sol = solve_lp(lp)
    level = grid.level
    base = dict(
        grid_level=level,
        n_nodes=grid.n_nodes,
        n_measurements=len(target),
    )
    if sol.status != "optimal":
        return SteerabilityReport(
            None, "inconclusive", residuals=sol.residuals,
            message=f"solver status: {sol.status} {sol.message}", **base,
        )
    s_value = sol.objective
    if s_value <= 1.0 + UNSTEERABLE_MARGIN:
        model = model_from_solution(sol, lp)
        try:
            lhs = complete_to_lhs(model, target)
            ok, rep = check_gmodel(lhs, target, LHS_CHECK_TOL)
        except (ValueError, ValidationError) as exc:
            return SteerabilityReport(
                s_value, "inconclusive", residuals=sol.residuals,
                message=f"completion failed: {exc}", model=model, **base,
            )
        if not ok:
            return SteerabilityReport(
                s_value, "inconclusive", residuals=sol.residuals,
                message=f"completed model residual {rep['max_residual']:.3e}",
                model=model, **base,
            )
        return SteerabilityReport(
            s_value, "unsteerable-for-set", residuals=sol.residuals,
            model=model, lhs_model=lhs, **base,
        )
    if s_value > 1.0 + STEERABLE_MARGIN:
        witness = witness_from_dual(sol, lp)
        return SteerabilityReport(
            s_value, "steerable-for-set", residuals=sol.residuals,
            witness=witness, model=model_from_solution(sol, lp), **base,
        )
    return SteerabilityReport(
        s_value, "inconclusive", residuals=sol.residuals,
        message="objective within solver margin of 1", **base,
    )


def export_triplets(lp: SteeringLP) -> str:
    """Deterministic sparse text dump for cross-checking with other solvers.

    Sections: 'objective' (col value), 'matrix' (row col value), 'rhs'
    (row value); all variables are >= 0 and all constraints equalities.
    """
    buf = io.StringIO()
    coo = lp.a_eq.tocoo()
    order = np.lexsort((coo.col, coo.row))
    buf.write(f"steering-lp rows {lp.a_eq.shape[0]} cols {lp.a_eq.shape[1]}\n")
    buf.write("objective\n")
    for j in np.flatnonzero(lp.c):
        buf.write(f"{j} {lp.c[j]:.17g}\n")
    buf.write(f"matrix {coo.nnz}\n")
    for k in order:
        buf.write(f"{coo.row[k]} {coo.col[k]} {coo.data[k]:.17g}\n")
    buf.write("rhs\n")
    for i in np.flatnonzero(lp.b_eq):
        buf.write(f"{i} {lp.b_eq[i]:.17g}\n")
    buf.write("bounds\nall >= 0\n")
    return buf.getvalue()
