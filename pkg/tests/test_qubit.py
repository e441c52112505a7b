"""Tests for the G-matrix state representation and qubit algebra."""

import json

import numpy as np
import pytest

from steerlp.qubit import (
    DensityMatrix,
    ProjectiveMeasurement,
    TwoQubitState,
    ValidationError,
    conditioned_state,
    density_from_state,
    is_entangled_ppt,
    joint_probability,
    load_state,
    partial_transpose_bob,
    save_state,
    state_from_density,
    state_from_json_dict,
    SIGMA,
)
from steerlp.factory import random_state, singlet, werner


def random_density(rng, rank=4):
    m = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = m @ m.conj().T
    rho /= rho.trace().real
    return DensityMatrix(0.5 * (rho + rho.conj().T))


def test_pauli_basics():
    for s in SIGMA[1:]:
        assert abs(np.trace(s)) < 1e-15
        assert np.allclose(s @ s, np.eye(2))
    # sy convention: sy = [[0, -i], [i, 0]]
    assert SIGMA[2][0, 1] == -1j and SIGMA[2][1, 0] == 1j


def test_density_matrix_validation():
    with pytest.raises(ValidationError):
        DensityMatrix(np.eye(3) / 3.0)
    with pytest.raises(ValidationError):
        DensityMatrix(np.eye(4) / 2.0)  # trace 2
    m = np.eye(4, dtype=complex) / 4.0
    m[0, 1] = 1.0  # not Hermitian
    with pytest.raises(ValidationError):
        DensityMatrix(m)
    d = np.diag([0.5, 0.5, 0.1, -0.1]).astype(complex)
    with pytest.raises(ValidationError):
        DensityMatrix(d)


def test_density_matrix_clamps_rounding_noise():
    d = DensityMatrix(np.diag([0.6, 0.4 + 5e-11, -5e-11, 0.0]).astype(complex))
    ev = d.eigenvalues()
    assert ev.min() >= 0.0
    assert abs(d.entries.trace() - 1.0) < 1e-12


def test_state_density_roundtrip_random():
    rng = np.random.default_rng(11)
    for _ in range(25):
        d = random_density(rng)
        s = state_from_density(d)
        back = density_from_state(s)
        assert np.abs(back.entries - d.entries).max() < 1e-12
        # G blocks are real expectation values, bounded by 1
        assert np.abs(s.g).max() <= 1.0 + 1e-10


def test_singlet_blocks():
    s = singlet()
    assert np.allclose(s.a, 0.0) and np.allclose(s.b, 0.0)
    assert np.allclose(s.t, -np.eye(3))
    rho = density_from_state(s).entries
    psi = np.array([0.0, 1.0, -1.0, 0.0]) / np.sqrt(2.0)
    assert np.abs(rho - np.outer(psi, psi)).max() < 1e-12


def test_g_matrix_validation():
    with pytest.raises(ValidationError):
        TwoQubitState(np.zeros((4, 4)))  # G[0,0] != 1
    g = np.eye(4)
    g[1, 0] = 1.5  # |a| > 1
    with pytest.raises(ValidationError):
        TwoQubitState(g)
    # non-PSD combination: all three correlations +1
    with pytest.raises(ValidationError):
        TwoQubitState.from_blocks(t=np.eye(3))


def test_conditioned_state_matches_density_calculation():
    rng = np.random.default_rng(5)
    for _ in range(20):
        s = state_from_density(random_density(rng))
        rho = density_from_state(s).entries
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        m = ProjectiveMeasurement(axis)
        for outcome in (1, -1):
            p, sv = conditioned_state(s, m, outcome)
            proj = np.kron(m.operator(outcome), np.eye(2))
            sub = proj @ rho @ proj
            rho_b = sub.reshape(2, 2, 2, 2).trace(axis1=0, axis2=2)
            assert abs(p - rho_b.trace().real) < 1e-12
            bloch = np.array(
                [np.trace(SIGMA[k] @ rho_b).real for k in (1, 2, 3)]
            )
            assert np.abs(sv - bloch).max() < 1e-12


def test_conditioned_states_sum_to_bob_marginal():
    rng = np.random.default_rng(6)
    s = state_from_density(random_density(rng))
    m = ProjectiveMeasurement([0.0, 0.0, 1.0])
    p1, sv1 = conditioned_state(s, m, 1)
    p2, sv2 = conditioned_state(s, m, -1)
    assert abs(p1 + p2 - 1.0) < 1e-12
    assert np.abs(sv1 + sv2 - s.b).max() < 1e-12


def test_joint_probability_against_trace():
    rng = np.random.default_rng(17)
    for _ in range(20):
        s = state_from_density(random_density(rng))
        rho = density_from_state(s).entries
        xa = rng.normal(size=3)
        xb = rng.normal(size=3)
        ma = ProjectiveMeasurement(xa / np.linalg.norm(xa))
        mb = ProjectiveMeasurement(xb / np.linalg.norm(xb))
        for a in (1, -1):
            for b in (1, -1):
                op = np.kron(ma.operator(a), mb.operator(b))
                want = np.trace(op @ rho).real
                assert abs(joint_probability(s, ma, mb, a, b) - want) < 1e-12


def test_partial_transpose_is_involution():
    rng = np.random.default_rng(3)
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    assert np.abs(partial_transpose_bob(partial_transpose_bob(m)) - m).max() == 0.0


def test_ppt_known_states():
    assert is_entangled_ppt(singlet())
    assert not is_entangled_ppt(werner(0.0))
    # Werner states are entangled iff p > 1/3
    assert is_entangled_ppt(werner(0.34))
    assert not is_entangled_ppt(werner(0.33))
    prod = TwoQubitState.from_blocks(
        a=[0.0, 0.0, 0.5], b=[0.0, 0.0, 0.5], t=np.diag([0.0, 0.0, 0.25])
    )
    assert not is_entangled_ppt(prod)


def test_state_json_roundtrip(tmp_path):
    rng = np.random.default_rng(23)
    s = state_from_density(random_density(rng))
    path = tmp_path / "state.json"
    save_state(s, path)
    back = load_state(path)
    assert np.abs(back.g - s.g).max() < 1e-15

    # density schema
    rho = density_from_state(s).entries
    doc = {
        "density": [
            [{"re": c.real, "im": c.imag} for c in row] for row in rho
        ]
    }
    back2 = state_from_json_dict(json.loads(json.dumps(doc)))
    assert np.abs(back2.g - s.g).max() < 1e-9


def test_state_json_errors():
    with pytest.raises(ValidationError):
        state_from_json_dict({})
    with pytest.raises(ValidationError):
        state_from_json_dict({"g": [[1.0]]})
    with pytest.raises(ValidationError):
        state_from_json_dict({"density": [[1.0] * 4] * 4})


def test_random_state_deterministic_and_physical():
    for seed in range(8):
        s1 = random_state(seed)
        s2 = random_state(seed)
        assert np.array_equal(s1.g, s2.g)
    pure = random_state(1, rank=1)
    ev = density_from_state(pure).eigenvalues()
    assert ev.max() > 1.0 - 1e-10  # rank 1: one unit eigenvalue
