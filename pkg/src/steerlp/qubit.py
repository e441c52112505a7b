"""Two-qubit state algebra in the Pauli / G-matrix representation.

A state is stored as the real 4x4 coefficient matrix G with
rho = 1/4 sum_{u,v} G[u,v] sigma_u (x) sigma_v, Pauli order (I, sx, sy, sz),
sy = [[0, -i], [i, 0]].  Blocks: G[1:,0] = a (Alice Bloch vector),
G[0,1:] = b (Bob Bloch vector), G[1:,1:] = T (correlation matrix).
"""

import json

import numpy as np

HERM_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = -1e-10

SIGMA = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

# sigma_u (x) sigma_v for all 16 index pairs, shape (4, 4, 4, 4)
_PAULI_KRON = np.array(
    [[np.kron(SIGMA[u], SIGMA[v]) for v in range(4)] for u in range(4)]
)


class ValidationError(ValueError):
    """An input violated a declared invariant."""


def _readonly(arr):
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


class DensityMatrix:
    """A validated 4x4 density matrix.

    Hermiticity and unit trace are enforced to 1e-12.  Eigenvalues may dip
    to -1e-10 (rounding noise in file-sourced states); such inputs are
    clamped by projecting negative eigenvalues to zero and renormalizing.
    """

    def __init__(self, entries):
        m = np.asarray(entries, dtype=complex)
        if m.shape != (4, 4):
            raise ValidationError(f"density matrix must be 4x4, got {m.shape}")
        if np.abs(m - m.conj().T).max() > HERM_TOL:
            raise ValidationError("density matrix is not Hermitian to 1e-12")
        tr = m.trace()
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"density matrix trace is {tr}, expected 1")
        evals, evecs = np.linalg.eigh(m)
        if evals.min() < PSD_TOL:
            raise ValidationError(
                f"density matrix has negative eigenvalue {evals.min():.3e}"
            )
        if evals.min() < 0.0:
            evals = np.clip(evals, 0.0, None)
            m = (evecs * evals) @ evecs.conj().T
            m /= m.trace().real
        self.entries = _readonly(m)

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.entries)


class TwoQubitState:
    """Two-qubit state held as its real G coefficient matrix."""

    def __init__(self, g):
        g = np.asarray(g, dtype=float)
        if g.shape != (4, 4):
            raise ValidationError(f"G matrix must be 4x4, got {g.shape}")
        if g[0, 0] != 1.0:
            raise ValidationError(f"G[0][0] must be exactly 1, got {g[0, 0]}")
        self.g = _readonly(g)
        self.a = _readonly(g[1:, 0])
        self.b = _readonly(g[0, 1:])
        self.t = _readonly(g[1:, 1:])
        if np.linalg.norm(self.a) > 1.0 + 1e-10:
            raise ValidationError(f"|a| = {np.linalg.norm(self.a)} exceeds 1")
        if np.linalg.norm(self.b) > 1.0 + 1e-10:
            raise ValidationError(f"|b| = {np.linalg.norm(self.b)} exceeds 1")
        rho = np.tensordot(g, _PAULI_KRON, axes=([0, 1], [0, 1])) / 4.0
        if np.linalg.eigvalsh(rho).min() < PSD_TOL:
            raise ValidationError("G matrix does not correspond to a PSD state")
        self._rho = _readonly(rho)

    @classmethod
    def from_blocks(cls, a=None, b=None, t=None):
        g = np.zeros((4, 4))
        g[0, 0] = 1.0
        if a is not None:
            g[1:, 0] = a
        if b is not None:
            g[0, 1:] = b
        if t is not None:
            g[1:, 1:] = t
        return cls(g)


class ProjectiveMeasurement:
    """Binary projective measurement along a Bloch axis; outcomes are +-1.

    The outcome -1 operator equals the outcome +1 operator of the
    reversed axis, so assemblage code treats (axis, -1) and (-axis, +1)
    as the same entry.
    """

    def __init__(self, axis):
        axis = np.asarray(axis, dtype=float)
        if axis.shape != (3,):
            raise ValidationError("measurement axis must be a 3-vector")
        n = np.linalg.norm(axis)
        if abs(n - 1.0) > 1e-12:
            raise ValidationError(f"measurement axis norm is {n}, expected 1")
        self.axis = _readonly(axis)

    def operator(self, outcome):
        """Projector 1/2 (I + outcome * axis . sigma)."""
        if outcome not in (1, -1):
            raise ValidationError("outcome must be +1 or -1")
        x = outcome * self.axis
        return 0.5 * (SIGMA[0] + x[0] * SIGMA[1] + x[1] * SIGMA[2] + x[2] * SIGMA[3])


def state_from_density(rho: DensityMatrix) -> TwoQubitState:
    """Extract G[u,v] = Tr((sigma_u (x) sigma_v) rho)."""
    g = np.tensordot(_PAULI_KRON, rho.entries, axes=([2, 3], [1, 0])).real
    g[0, 0] = 1.0  # exact by trace normalization
    return TwoQubitState(g)


def density_from_state(s: TwoQubitState) -> DensityMatrix:
    return DensityMatrix(s._rho)


def conditioned_state(s: TwoQubitState, m: ProjectiveMeasurement, outcome):
    """Probability and shrinked Bloch vector of Bob's conditioned state.

    Returns (p, sv) with p = (1 + x.a)/2 and sv = (b + T^t x)/2 where
    x = outcome * axis.
    """
    if outcome not in (1, -1):
        raise ValidationError("outcome must be +1 or -1")
    x = outcome * m.axis
    p = 0.5 * (1.0 + x @ s.a)
    sv = 0.5 * (s.b + s.t.T @ x)
    return float(p), sv


def partial_transpose_bob(rho):
    """Transpose the second qubit of a 4x4 matrix."""
    m = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)
    return m.transpose(0, 3, 2, 1).reshape(4, 4)


def is_entangled_ppt(s: TwoQubitState) -> bool:
    """Peres-Horodecki test; decisive for two qubits."""
    pt = partial_transpose_bob(s._rho)
    return bool(np.linalg.eigvalsh(pt).min() < -1e-10)


def joint_probability(s, mA, mB, a, b) -> float:
    """p(a,b|A,B) = Tr(A_a (x) B_b rho) from the G blocks."""
    if a not in (1, -1) or b not in (1, -1):
        raise ValidationError("outcomes must be +1 or -1")
    x = a * mA.axis
    y = b * mB.axis
    return float(0.25 * (1.0 + x @ s.a + y @ s.b + x @ s.t @ y))


# ---------------------------------------------------------------------------
# state JSON schema (CLI contract): {"density": [[{"re":..,"im":..}, ...], ...]}
# or {"g": [[.. 4x4 real ..]]}


def state_to_json_dict(s: TwoQubitState) -> dict:
    return {"g": s.g.tolist()}


def state_from_json_dict(d: dict) -> TwoQubitState:
    if "g" in d:
        g = np.asarray(d["g"], dtype=float)
        if g.shape != (4, 4):
            raise ValidationError('field "g" must be a 4x4 real matrix')
        return TwoQubitState(g)
    if "density" in d:
        rows = d["density"]
        try:
            m = np.array(
                [[complex(c["re"], c["im"]) for c in row] for row in rows],
                dtype=complex,
            )
        except (TypeError, KeyError) as exc:
            raise ValidationError(
                'field "density" must be a 4x4 matrix of {"re":..,"im":..} cells'
            ) from exc
        return state_from_density(DensityMatrix(m))
    raise ValidationError('state JSON needs a "g" or "density" field')


def load_state(path) -> TwoQubitState:
    with open(path) as fh:
        return state_from_json_dict(json.load(fh))


def save_state(s: TwoQubitState, path):
    with open(path, "w") as fh:
        json.dump(state_to_json_dict(s), fh, indent=1)
