"""Geometric hidden-state models on a discretized probability Bloch sphere.

A model assigns nonnegative mass q_j to hidden-state nodes (unit vectors on
the sphere surface plus one center node at the origin) together with response
probabilities p(a|A, node).  The total mass S is the model's resource count:
an assemblage admits a local-hidden-state explanation iff some model with
S <= 1 reproduces it.
"""

import json

import numpy as np

from . import _kernels
from .assemblage import Assemblage, MeasurementSet
from .icosphere import NODE_COUNTS, icosphere, vertex_area_weights
from .qubit import ValidationError, _readonly


class DegenerateModelError(ValueError):
    """Operation needs nonzero total mass."""


class NotCompletableError(ValueError):
    """Model mass exceeds 1; no normalized completion exists."""


class InconsistencyError(ValueError):
    """Model and target disagree beyond tolerance."""


class GridMismatchError(ValueError):
    """Models live on different grids or measurement sets."""


class HiddenGrid:
    """Icosphere surface nodes plus one center node (index n_surface).

    weights_area are steradian quadrature weights for the base icosphere
    vertices (one third of each incident spherical triangle, summing to
    4*pi); augmented nodes carry zero weight and only matter as extra
    support points for models and the LP.
    """

    def __init__(self, surface_nodes, weights_area, level=None, n_extra=0):
        nodes = np.asarray(surface_nodes, dtype=float)
        w = np.asarray(weights_area, dtype=float)
        if nodes.ndim != 2 or nodes.shape[1] != 3 or len(w) != len(nodes):
            raise ValidationError("grid arrays have inconsistent shapes")
        if np.abs(np.linalg.norm(nodes, axis=1) - 1.0).max() > 1e-12:
            raise ValidationError("surface nodes must be unit vectors")
        if w.min() < 0.0:
            raise ValidationError("area weights must be nonnegative")
        self.surface_nodes = _readonly(nodes)
        self.weights_area = _readonly(w)
        self.level = level
        self.n_extra = n_extra
        full = np.vstack([nodes, np.zeros(3)])
        self.nodes = _readonly(full)  # center last

    @classmethod
    def from_level(cls, level: int) -> "HiddenGrid":
        verts, faces = icosphere(level)
        return cls(verts, vertex_area_weights(verts, faces), level=level)

    @property
    def n_surface(self):
        return self.surface_nodes.shape[0]

    @property
    def n_nodes(self):
        return self.n_surface + 1

    @property
    def center_index(self):
        return self.n_surface

    def augment(self, extra_nodes) -> "HiddenGrid":
        """Add surface nodes (normalized, zero area weight)."""
        extra = np.atleast_2d(np.asarray(extra_nodes, dtype=float))
        extra = extra / np.linalg.norm(extra, axis=1)[:, None]
        return HiddenGrid(
            np.vstack([self.surface_nodes, extra]),
            np.concatenate([self.weights_area, np.zeros(len(extra))]),
            level=self.level,
            n_extra=self.n_extra + len(extra),
        )

    def rotate(self, rot) -> "HiddenGrid":
        """Apply a rotation matrix to every surface node."""
        return HiddenGrid(
            self.surface_nodes @ np.asarray(rot).T,
            self.weights_area,
            level=None,
            n_extra=self.n_extra,
        )

    def nearest_node(self, direction) -> int:
        return int(np.argmax(self.surface_nodes @ np.asarray(direction)))

    def mesh_angle(self) -> float:
        """Max angular distance from a surface node to its nearest neighbor."""
        return _kernels.max_nearest_gap(self.surface_nodes)

    def same_nodes(self, other) -> bool:
        return self.n_nodes == other.n_nodes and np.array_equal(
            self.surface_nodes, other.surface_nodes
        )


class ExtremeGModel:
    """Masses and responses on the surface-plus-center node set."""

    def __init__(self, grid: HiddenGrid, mset: MeasurementSet, q, response):
        q = np.asarray(q, dtype=float)
        r = np.asarray(response, dtype=float)
        n = grid.n_nodes
        m = len(mset)
        if q.shape != (n,):
            raise ValidationError(f"q must have length {n}")
        if r.shape != (m, 2, n):
            raise ValidationError(f"response must have shape ({m}, 2, {n})")
        if q.min() < -1e-12:
            raise ValidationError(f"negative node mass {q.min():.3e}")
        if r.min() < -1e-10 or r.max() > 1.0 + 1e-10:
            raise ValidationError("responses must lie in [0, 1]")
        if np.abs(r.sum(axis=1) - 1.0).max() > 1e-10:
            raise ValidationError("responses must sum to 1 over outcomes")
        self.grid = grid
        self.mset = mset
        self.q = _readonly(np.clip(q, 0.0, None))
        self.response = _readonly(np.clip(r, 0.0, 1.0))

    def compatible(self, other):
        return self.grid.same_nodes(other.grid) and np.array_equal(
            self.mset.directions, other.mset.directions
        )


class LhsModel(ExtremeGModel):
    """An extreme model with total mass 1: a genuine local-hidden-state model."""

    def __init__(self, grid, mset, q, response):
        super().__init__(grid, mset, q, response)
        total = self.q.sum()
        if abs(total - 1.0) > 1e-10:
            raise ValidationError(f"LHS model mass is {total}, expected 1")


class InteriorGModel:
    """Point-mass model with atoms anywhere inside the unit ball."""

    def __init__(self, mset: MeasurementSet, eta, mass, response):
        eta = np.asarray(eta, dtype=float)
        mass = np.asarray(mass, dtype=float)
        r = np.asarray(response, dtype=float)
        k = eta.shape[0]
        if eta.shape != (k, 3) or mass.shape != (k,) or r.shape != (len(mset), 2, k):
            raise ValidationError("interior model arrays have inconsistent shapes")
        if np.linalg.norm(eta, axis=1).max() > 1.0 + 1e-12:
            raise ValidationError("atom outside the unit ball")
        if mass.min() < 0.0:
            raise ValidationError("atom masses must be nonnegative")
        if np.abs(r.sum(axis=1) - 1.0).max() > 1e-10:
            raise ValidationError("responses must sum to 1 over outcomes")
        self.mset = mset
        self.eta = _readonly(eta)
        self.mass = _readonly(mass)
        self.response = _readonly(r)


def s_quantity(m) -> float:
    """Total hidden-state mass of a model (center included)."""
    if isinstance(m, InteriorGModel):
        return float(m.mass.sum())
    return float(m.q.sum())


class Reconstruction:
    """Assemblage-like data reconstructed from a model."""

    def __init__(self, mass, moments, total):
        self.mass = mass          # (M, 2): sum_j q_j p(a|A,j)
        self.moments = moments    # (M, 2, 3): sum_j q_j p(a|A,j) xi_j
        self.total = total        # model mass S
        self.p_hat = mass / total if total > 0.0 else None


def reconstruct_assemblage(m: ExtremeGModel) -> Reconstruction:
    mass, mom = _kernels.moment_sums(m.q, m.response, m.grid.nodes)
    return Reconstruction(mass, mom, float(m.q.sum()))


def check_gmodel(m: ExtremeGModel, target: Assemblage, tol: float):
    """Residuals of the probability and moment reproduction conditions.

    Returns (ok, report); ok is True when the largest residual over
    sum_j q_j p(a|A,j) = p(a|A) * S  and  sum_j q_j p(a|A,j) xi_j = s_A^a
    does not exceed tol.
    """
    if not np.array_equal(m.mset.directions, target.mset.directions):
        raise GridMismatchError("model and target use different measurement sets")
    rec = reconstruct_assemblage(m)
    res_p = np.abs(rec.mass - target.p * rec.total).max()
    res_s = np.linalg.norm(rec.moments - target.sv, axis=2).max()
    worst = max(float(res_p), float(res_s))
    report = {
        "residual_probability": float(res_p),
        "residual_moment": float(res_s),
        "max_residual": worst,
        "s_value": rec.total,
    }
    return worst <= tol, report


def to_extreme(m: InteriorGModel, grid: HiddenGrid, exact=False) -> ExtremeGModel:
    """Split every interior atom into a surface part and a center part.

    An atom (eta, mass) contributes mass*|eta| at direction eta/|eta| with
    its own responses, and mass*(1-|eta|) at the center with responses
    averaged over all center contributions.  Total mass is preserved
    exactly.  Surface directions are snapped to the nearest grid node
    unless exact=True, in which case off-grid directions are appended as
    extra nodes; the induced moment perturbation is measured and attached
    as model.snap_report.
    """
    mcount = len(m.mset)
    radii = np.linalg.norm(m.eta, axis=1)
    out_grid = grid
    if exact:
        off = [
            m.eta[k] / radii[k]
            for k in range(len(radii))
            if radii[k] > 1e-15
            and np.max(grid.surface_nodes @ (m.eta[k] / radii[k])) < 1.0 - 1e-12
        ]
        if off:
            out_grid = grid.augment(np.array(off))

    n = out_grid.n_nodes
    ci = out_grid.center_index
    q = np.zeros(n)
    rw = np.zeros((mcount, 2, n))  # response-weighted mass accumulator
    displacement = 0.0
    for k in range(len(radii)):
        qk = m.mass[k]
        if qk == 0.0:
            continue
        r = radii[k]
        if r > 1e-15:
            d = m.eta[k] / r
            j = out_grid.nearest_node(d)
            displacement = max(displacement, float(np.linalg.norm(d - out_grid.surface_nodes[j])))
            q[j] += qk * r
            rw[:, :, j] += qk * r * m.response[:, :, k]
        q[ci] += qk * (1.0 - r)
        rw[:, :, ci] += qk * (1.0 - r) * m.response[:, :, k]

    resp = np.full((mcount, 2, n), 0.5)
    occupied = q > 0.0
    resp[:, :, occupied] = rw[:, :, occupied] / q[occupied]

    model = ExtremeGModel(out_grid, m.mset, q, resp)
    interior_mom = np.einsum("maK,K,Kj->maj", m.response, m.mass, m.eta)
    rec = reconstruct_assemblage(model)
    model.snap_report = {
        "max_displacement": displacement,
        "max_moment_shift": float(
            np.linalg.norm(rec.moments - interior_mom, axis=2).max()
        ),
        "mesh_angle": out_grid.mesh_angle(),
    }
    return model


def complete_to_lhs(m: ExtremeGModel, target: Assemblage) -> LhsModel:
    """Pad a model of mass S <= 1 with center mass (1 - S) into an LHS model.

    The center response is chosen so the completed model reproduces the
    target probabilities with total mass exactly 1; when the center ends
    up massless the response defaults to 1/2.
    """
    s_val = s_quantity(m)
    if s_val > 1.0 + 1e-9:
        raise NotCompletableError(
            f"model mass {s_val:.6f} exceeds 1: steerable for this set"
        )
    ci = m.grid.center_index
    q = m.q.copy()
    center_mass = (1.0 - s_val) + q[ci]
    q[ci] = center_mass

    resp = m.response.copy()
    if center_mass > 1e-300:
        surf_mass, _ = _kernels.moment_sums(
            np.concatenate([m.q[:ci], [0.0]]), m.response, m.grid.nodes
        )
        numer = target.p - surf_mass
        if numer.min() < -1e-10:
            raise InconsistencyError(
                f"negative center response numerator {numer.min():.3e}"
            )
        center_resp = np.clip(numer, 0.0, None) / center_mass
        norm = center_resp.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            center_resp = np.where(norm > 0.0, center_resp / norm, 0.5)
        resp[:, :, ci] = center_resp
    else:
        resp[:, :, ci] = 0.5
    return LhsModel(m.grid, m.mset, q, resp)


def mix_gmodels(models, weights, targets) -> ExtremeGModel:
    """Combine models of components into a model of the convex mixture.

    Node masses and responses are mass-weighted averages; the center then
    absorbs the smallest extra mass that keeps every probability-matching
    numerator nonnegative, so the resulting total never exceeds the
    largest component total.
    """
    weights = np.asarray(weights, dtype=float)
    if weights.min() < 0.0 or abs(weights.sum() - 1.0) > 1e-9:
        raise ValidationError("weights must be a probability vector")
    if len(models) != len(weights) or len(targets) != len(weights):
        raise ValidationError("models, weights and targets must align")
    first = models[0]
    for other in models[1:]:
        if not first.compatible(other):
            raise GridMismatchError("mixed models must share grid and measurements")

    ci = first.grid.center_index
    n = first.grid.n_nodes
    mcount = len(first.mset)

    q_mix = np.zeros(n)
    rw = np.zeros((mcount, 2, n))
    surf_l = np.zeros((mcount, 2))
    s_i = np.empty(len(models))
    p_mix = np.zeros((mcount, 2))
    for i, (mod, c, tgt) in enumerate(zip(models, weights, targets)):
        q_mix += c * mod.q
        rw += c * mod.q[None, None, :] * mod.response
        s_i[i] = s_quantity(mod)
        p_mix += c * tgt.p
        surf_only = mod.q.copy()
        surf_only[ci] = 0.0
        sm, _ = _kernels.moment_sums(surf_only, mod.response, mod.grid.nodes)
        surf_l += c * sm

    s_mixture = float(weights @ s_i)
    # smallest admissible total mass: every center numerator
    # p(a|A) * S - L(a|A) and the center mass itself must be nonnegative
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(p_mix > 0.0, surf_l / p_mix, 0.0)
    s_rho = max(s_mixture - float(q_mix[ci]), float(ratio.max()))

    q_out = q_mix.copy()
    q_out[ci] = s_rho - s_mixture + q_mix[ci]
    resp = np.full((mcount, 2, n), 0.5)
    occupied = q_mix > 0.0
    occupied[ci] = False
    resp[:, :, occupied] = rw[:, :, occupied] / q_mix[occupied]
    if q_out[ci] > 1e-300:
        center_resp = (p_mix * s_rho - surf_l) / q_out[ci]
        center_resp = np.clip(center_resp, 0.0, None)
        norm = center_resp.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            resp[:, :, ci] = np.where(norm > 0.0, center_resp / norm, 0.5)
    return ExtremeGModel(first.grid, first.mset, q_out, resp)


def scale_gmodel(m: ExtremeGModel, c: float, c0: float) -> ExtremeGModel:
    """Model for the shrunk state phi(c) given a model for phi(c0).

    Masses scale by c/c0, responses are unchanged; the total mass and all
    reconstructed moments scale linearly.
    """
    if not 0.0 < c0 <= 1.0:
        raise ValidationError("c0 must lie in (0, 1]")
    if not 0.0 <= c <= 1.0:
        raise ValidationError("c must lie in [0, 1]")
    return ExtremeGModel(m.grid, m.mset, (c / c0) * m.q, m.response)


def werner_singlet_model(grid: HiddenGrid, mset: MeasurementSet) -> ExtremeGModel:
    """Hemisphere model for the singlet: uniform surface density 1/(2*pi),
    response 1 on the open hemisphere xi . s_A^a > 0 (1/2 on its boundary
    circle), 1/2 at the center.  Total mass is 2 by exactness of the area
    weights.
    """
    n = grid.n_nodes
    q = np.zeros(n)
    q[: grid.n_surface] = grid.weights_area / (2.0 * np.pi)
    sv_plus = -0.5 * mset.directions  # singlet: s_A^+ = -x/2
    resp = np.empty((len(mset), 2, n))
    resp[:, :, : grid.n_surface] = _kernels.hemisphere_response(
        grid.surface_nodes, sv_plus
    )
    resp[:, :, grid.center_index] = 0.5
    return ExtremeGModel(grid, mset, q, resp)


def equator_directions(k: int):
    """k equally spaced unit vectors in the z = 0 plane."""
    th = 2.0 * np.pi * np.arange(k) / k
    return np.column_stack([np.cos(th), np.sin(th), np.zeros(k)])


def equatorial_t_model(t: float, grid: HiddenGrid, mset: MeasurementSet) -> ExtremeGModel:
    """Model for the Bell-diagonal state with correlation diag(t, t, 0).

    Its steering figure is a circle of radius |t|/2 in the z = 0 plane.
    Mass is spread along the grid's equatorial nodes with line density
    |t|/4 (total pi*|t|/2, half the circle circumference); the response
    mixes a half-circle indicator with a coin flip so measurements tilted
    out of the plane are reproduced exactly.
    """
    eq = np.flatnonzero(np.abs(grid.surface_nodes[:, 2]) <= 1e-9)
    if len(eq) < 4:
        raise ValidationError(
            "grid has too few equatorial nodes; augment with equator_directions"
        )
    theta = np.arctan2(grid.surface_nodes[eq, 1], grid.surface_nodes[eq, 0])
    order = np.argsort(theta)
    eq = eq[order]
    theta = theta[order]
    # trapezoidal arc weights around the circle (sum exactly 2*pi)
    gaps = np.diff(np.concatenate([theta, [theta[0] + 2.0 * np.pi]]))
    arc = 0.5 * (gaps + np.roll(gaps, 1))

    n = grid.n_nodes
    q = np.zeros(n)
    q[eq] = (abs(t) / 4.0) * arc

    resp = np.full((len(mset), 2, n), 0.5)
    x = mset.directions
    sv_plus = np.column_stack([0.5 * t * x[:, 0], 0.5 * t * x[:, 1], np.zeros(len(x))])
    rho = np.linalg.norm(x[:, :2], axis=1)  # in-plane fraction of the axis
    ind = _kernels.hemisphere_response(grid.surface_nodes[eq], sv_plus)
    for i in range(len(mset)):
        if rho[i] < 1e-15:
            continue
        resp[i][:, eq] = rho[i] * ind[i] + (1.0 - rho[i]) * 0.5
    return ExtremeGModel(grid, mset, q, resp)


def lhs_joint_probability(m: ExtremeGModel, meas_index: int, a: int, mB, b: int) -> float:
    """Joint outcome probability predicted by the hidden-state model:
    sum_j q_j p(a|A, xi_j) * Tr(B_b rho(xi_j)).
    """
    if a not in (1, -1) or b not in (1, -1):
        raise ValidationError("outcomes must be +1 or -1")
    ai = 0 if a == 1 else 1
    y = b * mB.axis
    qp = m.q * m.response[meas_index, ai]
    return float(0.5 * (qp.sum() + qp @ (m.grid.nodes @ y)))


def lhs_joint_table(m: ExtremeGModel, bob_axes):
    """(M, 2, B, 2) table of model joint probabilities over Bob axes."""
    return _kernels.joint_table(
        m.q, m.response, m.grid.nodes, np.asarray(bob_axes, dtype=float)
    )


def trine_povm_counterexample() -> dict:
    """Evaluate the lifted singlet hemisphere model on the trine POVM.

    The three POVM elements are 2/3 times the projectors onto |0>, |alpha>,
    |beta> with |alpha/beta> = |0>/2 +- (sqrt(3)/2)|1>.  Lifting the
    hemisphere responses to the POVM gives outcome weights that should sum
    to 1 for every hidden vector; they do not, so the lift is not a valid
    hidden-state model.
    """
    axes = np.array(
        [
            [0.0, 0.0, 1.0],
            [np.sqrt(3.0) / 2.0, 0.0, -0.5],
            [-np.sqrt(3.0) / 2.0, 0.0, -0.5],
        ]
    )
    weight = 1.0 / 3.0

    def lifted_sum(v):
        v = np.asarray(v, dtype=float)
        if np.linalg.norm(v) < 1e-15:
            return weight * 3 * 0.5
        d = axes @ v
        return weight * float(np.where(d > 0.0, 1.0, np.where(d == 0.0, 0.5, 0.0)).sum())

    probes = {
        "z+": np.array([0.0, 0.0, 1.0]),
        "center": np.zeros(3),
        "z-": np.array([0.0, 0.0, -1.0]),
    }
    sums = {k: lifted_sum(v) for k, v in probes.items()}
    deviations = {k: abs(s - 1.0) for k, s in sums.items()}
    return {
        "projector_axes": axes,
        "outcome_weight": weight,
        "sums": sums,
        "deviations": deviations,
        "differs_from_one": max(deviations.values()) > 1e-12,
    }


# ---------------------------------------------------------------------------
# serialization ("gmodel-v1"): icosphere nodes are reconstructed from the
# level; augmented nodes are stored explicitly.


def gmodel_to_json_dict(m: ExtremeGModel) -> dict:
    grid = m.grid
    if grid.level is None:
        raise ValidationError("only icosphere-based grids are serializable")
    d = {
        "version": "gmodel-v1",
        "grid_level": grid.level,
        "q": m.q.tolist(),
        "response": m.response.ravel().tolist(),  # (measurement, outcome, node)
        "directions": m.mset.directions.tolist(),
        "label": m.mset.label,
    }
    if grid.n_extra:
        d["extra_nodes"] = grid.surface_nodes[-grid.n_extra :].tolist()
    return d


def gmodel_from_json_dict(d: dict) -> ExtremeGModel:
    if d.get("version") != "gmodel-v1":
        raise ValidationError(f'unsupported model version {d.get("version")!r}')
    level = int(d["grid_level"])
    if level not in NODE_COUNTS:
        raise ValidationError(f"unsupported grid level {level}")
    grid = HiddenGrid.from_level(level)
    if d.get("extra_nodes"):
        grid = grid.augment(np.asarray(d["extra_nodes"], dtype=float))
    mset = MeasurementSet(d["directions"], d.get("label", ""))
    q = np.asarray(d["q"], dtype=float)
    resp = np.asarray(d["response"], dtype=float).reshape(
        len(mset), 2, grid.n_nodes
    )
    cls = LhsModel if abs(q.sum() - 1.0) <= 1e-10 else ExtremeGModel
    return cls(grid, mset, q, resp)


def save_gmodel(m: ExtremeGModel, path):
    with open(path, "w") as fh:
        json.dump(gmodel_to_json_dict(m), fh)


def load_gmodel(path) -> ExtremeGModel:
    with open(path) as fh:
        return gmodel_from_json_dict(json.load(fh))
