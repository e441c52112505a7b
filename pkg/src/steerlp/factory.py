"""Constructors for the standard state families and random states."""

import numpy as np

from .qubit import (
    DensityMatrix,
    TwoQubitState,
    ValidationError,
    state_from_density,
)


def maximally_mixed() -> TwoQubitState:
    return TwoQubitState.from_blocks()


def singlet() -> TwoQubitState:
    return TwoQubitState.from_blocks(t=-np.eye(3))


def werner(p: float) -> TwoQubitState:
    """p * singlet + (1 - p) * I/4; correlation block -p * identity."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError("werner parameter must lie in [0, 1]")
    return TwoQubitState.from_blocks(t=-p * np.eye(3))


def t_state(t1: float, t2: float, t3: float) -> TwoQubitState:
    """Bell-diagonal state with correlation diag(t1, t2, t3).

    Valid parameters form the Bell tetrahedron; anything outside is
    rejected with the offending eigenvalue.
    """
    eigs = 0.25 * np.array(
        [
            1.0 - t1 - t2 - t3,
            1.0 - t1 + t2 + t3,
            1.0 + t1 - t2 + t3,
            1.0 + t1 + t2 - t3,
        ]
    )
    if eigs.min() < -1e-10:
        raise ValidationError(
            f"diag({t1}, {t2}, {t3}) is outside the Bell tetrahedron: "
            f"eigenvalue {eigs.min():.6g}"
        )
    return TwoQubitState.from_blocks(t=np.diag([t1, t2, t3]))


def unsteerable_mixture(p: float, component: TwoQubitState) -> TwoQubitState:
    """p * singlet + (1 - p) * component, mixed at the density level."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError("mixture parameter must lie in [0, 1]")
    g = p * singlet().g + (1.0 - p) * component.g
    return TwoQubitState(g)


class AbtDecomposition:
    """Split of G into local-vector parts and a pure-correlation part."""

    def __init__(self, coefficients, component_g, physical):
        self.coefficients = coefficients  # (c1, c2, c3)
        self.component_g = component_g    # three 4x4 G matrices
        self.physical = physical          # PSD flags per component

    def recombined(self):
        return sum(c * g for c, g in zip(self.coefficients, self.component_g))


def decompose_abt(s: TwoQubitState) -> AbtDecomposition:
    """Write G as c1*G_a + c2*G_b + c3*G_T with rescaled blocks.

    The correlation coefficient c3 is minimized (it equals the largest
    |T_ij|); remaining weight is split evenly on top of the |a| and |b|
    floors.  Components need not be physical states; each carries a PSD
    flag.  Infeasible when |a| + |b| + max|T_ij| > 1, since each block
    forces a floor on its coefficient.
    """
    na = float(np.linalg.norm(s.a))
    nb = float(np.linalg.norm(s.b))
    c3 = float(np.abs(s.t).max())
    slack = 1.0 - na - nb - c3
    if slack < -1e-12:
        raise ValidationError(
            f"no admissible split: |a| + |b| + max|T| = {na + nb + c3:.6g} > 1"
        )
    slack = max(slack, 0.0)
    if na == 0.0 and nb == 0.0 and c3 == 0.0:
        c1 = c2 = c3 = 1.0 / 3.0  # maximally mixed: conventional even split
        slack = 0.0
    else:
        c1 = na + slack / 2.0
        c2 = nb + slack / 2.0

    def block_g(a=None, b=None, t=None):
        g = np.zeros((4, 4))
        g[0, 0] = 1.0
        if a is not None:
            g[1:, 0] = a
        if b is not None:
            g[0, 1:] = b
        if t is not None:
            g[1:, 1:] = t
        return g

    g_a = block_g(a=s.a / c1 if c1 > 0.0 else None)
    g_b = block_g(b=s.b / c2 if c2 > 0.0 else None)
    g_t = block_g(t=s.t / c3 if c3 > 0.0 else None)

    physical = []
    for g in (g_a, g_b, g_t):
        try:
            TwoQubitState(g)
            physical.append(True)
        except ValidationError:
            physical.append(False)
    return AbtDecomposition((c1, c2, c3), (g_a, g_b, g_t), physical)


def random_state(seed: int, rank=None) -> TwoQubitState:
    """Random state from a 4 x k complex Gaussian purification block.

    Deterministic in the seed; rank defaults to a seed-derived choice in
    1..4 (rank 1 gives a pure state).
    """
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 5)) if rank is None else int(rank)
    if not 1 <= k <= 4:
        raise ValidationError("rank must lie in 1..4")
    m = rng.normal(size=(4, k)) + 1j * rng.normal(size=(4, k))
    rho = m @ m.conj().T
    rho /= rho.trace().real
    rho = 0.5 * (rho + rho.conj().T)
    return state_from_density(DensityMatrix(rho))
