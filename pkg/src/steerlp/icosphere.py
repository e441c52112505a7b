"""Subdivided-icosahedron meshes with spherical-area vertex weights.

Vertices of level L form a prefix of the vertices of level L+1, so grids
at increasing levels are nested.
"""

import numpy as np

NODE_COUNTS = {0: 12, 1: 42, 2: 162, 3: 642, 4: 2562, 5: 10242}


def _base_icosahedron():
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array(
        [
            [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
            [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
            [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
        ],
        dtype=float,
    )
    verts /= np.linalg.norm(verts, axis=1)[:, None]
    faces = np.array(
        [
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ],
        dtype=np.int64,
    )
    return verts, faces


def _subdivide(verts, faces):
    verts = list(verts)
    cache = {}

    def midpoint(i, j):
        key = (i, j) if i < j else (j, i)
        if key not in cache:
            m = verts[i] + verts[j]
            m /= np.linalg.norm(m)
            cache[key] = len(verts)
            verts.append(m)
        return cache[key]

    new_faces = []
    for a, b, c in faces:
        ab = midpoint(a, b)
        bc = midpoint(b, c)
        ca = midpoint(c, a)
        new_faces.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]])
    return np.array(verts), np.array(new_faces, dtype=np.int64)


def icosphere(level: int):
    """Return (vertices, faces) of the level-times subdivided icosahedron."""
    if level < 0:
        raise ValueError("level must be >= 0")
    verts, faces = _base_icosahedron()
    for _ in range(level):
        verts, faces = _subdivide(verts, faces)
    return verts, faces


def solid_angles(verts, faces):
    """Spherical area of each triangular face (van Oosterom-Strackee)."""
    v1 = verts[faces[:, 0]]
    v2 = verts[faces[:, 1]]
    v3 = verts[faces[:, 2]]
    num = np.abs(np.einsum("ij,ij->i", v1, np.cross(v2, v3)))
    den = 1.0 + np.einsum("ij,ij->i", v1, v2) \
        + np.einsum("ij,ij->i", v2, v3) \
        + np.einsum("ij,ij->i", v3, v1)
    return 2.0 * np.arctan2(num, den)


def vertex_area_weights(verts, faces):
    """Per-vertex quadrature weights: one third of each incident face area.

    Sums to 4*pi up to floating point rounding.
    """
    areas = solid_angles(verts, faces)
    w = np.zeros(len(verts))
    for k in range(3):
        np.add.at(w, faces[:, k], areas / 3.0)
    return w
