"""Tests for icosphere subdivision and quadrature weights."""

import numpy as np

from steerlp.icosphere import NODE_COUNTS, icosphere, solid_angles, vertex_area_weights


def test_node_counts():
    for level, count in NODE_COUNTS.items():
        verts, faces = icosphere(level)
        assert verts.shape == (count, 3)
        # Euler: V - E + F = 2 with E = 3F/2
        assert len(faces) == 2 * count - 4


def test_vertices_are_unit():
    for level in range(4):
        verts, _ = icosphere(level)
        assert np.abs(np.linalg.norm(verts, axis=1) - 1.0).max() < 1e-14


def test_vertices_nest_across_levels():
    prev, _ = icosphere(0)
    for level in (1, 2, 3):
        verts, _ = icosphere(level)
        assert np.array_equal(verts[: len(prev)], prev)
        prev = verts


def test_vertices_centrally_symmetric():
    for level in range(4):
        verts, _ = icosphere(level)
        dots = verts @ verts.T
        assert dots.min(axis=1).max() < -1.0 + 1e-12


def test_solid_angles_positive_and_total():
    for level in range(4):
        verts, faces = icosphere(level)
        omega = solid_angles(verts, faces)
        assert omega.min() > 0.0
        assert abs(omega.sum() - 4.0 * np.pi) < 1e-12


def test_area_weights_sum_and_symmetry():
    for level in range(4):
        verts, faces = icosphere(level)
        w = vertex_area_weights(verts, faces)
        assert len(w) == len(verts)
        assert w.min() > 0.0
        assert abs(w.sum() - 4.0 * np.pi) < 1e-12
        anti = np.argmin(verts @ verts.T, axis=1)
        assert np.abs(w - w[anti]).max() < 1e-14


def test_weights_match_hemisphere_integral():
    # integral of max(z, 0) over the sphere is pi; the error should be
    # modest at moderate subdivision and shrink with refinement
    errs = []
    for level in (2, 3):
        verts, faces = icosphere(level)
        w = vertex_area_weights(verts, faces)
        val = float(w @ np.clip(verts[:, 2], 0.0, None))
        errs.append(abs(val - np.pi))
    assert errs[0] < 2e-2
    assert errs[1] < 5e-3
    assert errs[1] < errs[0] / 3.0
