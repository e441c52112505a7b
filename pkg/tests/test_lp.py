"""Tests for the steering LP, its certificates and the export format."""

import numpy as np
import pytest

from steerlp.assemblage import build_assemblage, fibonacci_directions
from steerlp.factory import maximally_mixed, singlet, werner
from steerlp.gmodel import ExtremeGModel, HiddenGrid, check_gmodel, s_quantity
from steerlp.lp import (
    NoWitnessError,
    SteerabilityReport,
    build_steering_lp,
    export_triplets,
    min_s,
    model_from_solution,
    solve_lp,
    witness_from_dual,
)
from steerlp.qubit import TwoQubitState


GRID1 = HiddenGrid.from_level(1)
GRID2 = HiddenGrid.from_level(2)


def test_lp_dimensions():
    asm = build_assemblage(werner(0.2), fibonacci_directions(3))
    lp = build_steering_lp(asm, GRID1)
    n, m = GRID1.n_nodes, 3
    assert lp.a_eq.shape == (m * n + 7 * m, n + 2 * m * n)
    assert lp.b_eq.shape == (m * n + 7 * m,)
    assert lp.c.sum() == n


def test_product_state_optimum_is_bob_norm():
    # for a = T = 0 the only constraint with content is reproducing
    # sv = p * b / ... ; the optimum equals |b| when b-hat is a grid node
    state = TwoQubitState.from_blocks(b=[0.0, 0.0, 0.6])
    grid = GRID2.augment([[0.0, 0.0, 1.0]])
    rep = min_s(build_assemblage(state, fibonacci_directions(6)), grid)
    assert rep.verdict == "unsteerable-for-set"
    assert rep.s_value == pytest.approx(0.6, abs=1e-9)


def test_maximally_mixed_optimum_is_zero():
    rep = min_s(build_assemblage(maximally_mixed(), fibonacci_directions(6)), GRID2)
    assert rep.verdict == "unsteerable-for-set"
    assert rep.s_value == pytest.approx(0.0, abs=1e-12)
    assert isinstance(rep, SteerabilityReport)
    assert rep.lhs_model is not None and rep.witness is None


def test_unsteerable_report_carries_validated_model():
    asm = build_assemblage(werner(0.4), fibonacci_directions(6))
    rep = min_s(asm, GRID2)
    assert rep.verdict == "unsteerable-for-set"
    assert rep.s_value < 1.0
    ok, info = check_gmodel(rep.lhs_model, asm, 1e-7)
    assert ok, info
    assert rep.residuals["primal"] <= 1e-8
    assert rep.residuals["duality_gap_rel"] <= 1e-7


def test_steerable_report_carries_witness():
    asm = build_assemblage(werner(0.9), fibonacci_directions(6))
    rep = min_s(asm, GRID2)
    assert rep.verdict == "steerable-for-set"
    assert rep.s_value > 1.0 + 1e-6
    wit = rep.witness
    # the witness reproduces the optimum on the solved assemblage
    assert wit.evaluate_assemblage(asm) == pytest.approx(rep.s_value, abs=1e-9)
    # and stays below 1 on random mass-1 grid models
    rng = np.random.default_rng(21)
    n = GRID2.n_nodes
    for _ in range(50):
        q = rng.dirichlet(np.full(n, 0.1))
        r = rng.uniform(size=(6, 2, n))
        r /= r.sum(axis=1, keepdims=True)
        model = ExtremeGModel(GRID2, asm.mset, q, r)
        assert wit.evaluate_model(model) <= 1.0 + 1e-7


def test_witness_requires_steering():
    asm = build_assemblage(werner(0.3), fibonacci_directions(4))
    lp = build_steering_lp(asm, GRID1)
    sol = solve_lp(lp)
    assert sol.status == "optimal"
    with pytest.raises(NoWitnessError):
        witness_from_dual(sol, lp)


def test_model_from_solution_reproduces_assemblage():
    asm = build_assemblage(werner(0.45), fibonacci_directions(5))
    lp = build_steering_lp(asm, GRID2)
    sol = solve_lp(lp)
    model = model_from_solution(sol, lp)
    assert s_quantity(model) == pytest.approx(sol.objective, abs=1e-9)
    ok, info = check_gmodel(model, asm, 1e-6)
    assert ok, info


def test_grid_refinement_cannot_raise_optimum():
    asm = build_assemblage(werner(0.9), fibonacci_directions(6))
    coarse = min_s(asm, GRID1).s_value
    fine = min_s(asm, GRID2).s_value
    assert fine <= coarse + 1e-7
    # frozen reference values for this configuration
    assert coarse == pytest.approx(1.7028688680364246, abs=1e-6)
    assert fine == pytest.approx(1.6482729689205735, abs=1e-6)


def test_more_measurements_cannot_lower_optimum():
    big = fibonacci_directions(8)
    asm_small = build_assemblage(singlet(), big.subset(4))
    asm_big = build_assemblage(singlet(), big)
    v_small = min_s(asm_small, GRID1).s_value
    v_big = min_s(asm_big, GRID1).s_value
    assert v_big >= v_small - 1e-7


def test_export_triplets_deterministic_and_parseable():
    asm = build_assemblage(werner(0.5), fibonacci_directions(2))
    lp = build_steering_lp(asm, GRID1)
    text = export_triplets(lp)
    assert text == export_triplets(lp)
    lines = text.splitlines()
    header = lines[0].split()
    assert header[0] == "steering-lp"
    rows, cols = int(header[2]), int(header[4])
    assert (rows, cols) == lp.a_eq.shape
    k = lines.index("matrix " + str(lp.a_eq.nnz))
    dense = np.zeros((rows, cols))
    for ln in lines[k + 1 : k + 1 + lp.a_eq.nnz]:
        i, j, v = ln.split()
        dense[int(i), int(j)] = float(v)
    assert np.abs(dense - lp.a_eq.toarray()).max() == 0.0
