"""Hot numeric kernels with numba-compiled and pure-numpy variants.

Set STEERLP_DISABLE_NUMBA=1 to force the numpy path (useful on platforms
where numba is unavailable or for benchmarking; see benchmarks/).
"""

import os

import numpy as np

_DISABLE = os.environ.get("STEERLP_DISABLE_NUMBA", "").strip() not in ("", "0")

try:
    if _DISABLE:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):  # no-op decorator fallback
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


# ---------------------------------------------------------------------------
# model moment sums:  mass(A,a) = sum_j q_j p(a|A,j)
#                     mom(A,a,:) = sum_j q_j p(a|A,j) xi_j


def moment_sums_numpy(q, response, nodes):
    """response: (M, 2, n) table, q: (n,), nodes: (n, 3)."""
    qp = response * q[None, None, :]
    mass = qp.sum(axis=2)
    mom = qp @ nodes
    return mass, mom


@njit(cache=True)
def _moment_sums_nb(q, response, nodes):
    m, no, n = response.shape
    mass = np.zeros((m, no))
    mom = np.zeros((m, no, 3))
    for i in range(m):
        for a in range(no):
            acc0 = 0.0
            ax = 0.0
            ay = 0.0
            az = 0.0
            for j in range(n):
                w = q[j] * response[i, a, j]
                acc0 += w
                ax += w * nodes[j, 0]
                ay += w * nodes[j, 1]
                az += w * nodes[j, 2]
            mass[i, a] = acc0
            mom[i, a, 0] = ax
            mom[i, a, 1] = ay
            mom[i, a, 2] = az
    return mass, mom


def moment_sums_numba(q, response, nodes):
    return _moment_sums_nb(
        np.ascontiguousarray(q),
        np.ascontiguousarray(response),
        np.ascontiguousarray(nodes),
    )


# ---------------------------------------------------------------------------
# hidden-model joint probability table over Bob axes:
#   out(A,a,B,b) = sum_j q_j p(a|A,j) * 0.5*(1 + sign_b * y_B . xi_j)


def joint_table_numpy(q, response, nodes, bob_axes):
    qp = response * q[None, None, :]          # (M, 2, n)
    mass = qp.sum(axis=2)                      # (M, 2)
    proj = qp @ nodes @ bob_axes.T             # (M, 2, B)
    out = np.empty((qp.shape[0], 2, bob_axes.shape[0], 2))
    out[:, :, :, 0] = 0.5 * (mass[:, :, None] + proj)
    out[:, :, :, 1] = 0.5 * (mass[:, :, None] - proj)
    return out


@njit(cache=True)
def _joint_table_nb(q, response, nodes, bob_axes):
    m, no, n = response.shape
    nb = bob_axes.shape[0]
    out = np.zeros((m, no, nb, 2))
    for i in range(m):
        for a in range(no):
            mass = 0.0
            mx = 0.0
            my = 0.0
            mz = 0.0
            for j in range(n):
                w = q[j] * response[i, a, j]
                mass += w
                mx += w * nodes[j, 0]
                my += w * nodes[j, 1]
                mz += w * nodes[j, 2]
            for k in range(nb):
                d = mx * bob_axes[k, 0] + my * bob_axes[k, 1] + mz * bob_axes[k, 2]
                out[i, a, k, 0] = 0.5 * (mass + d)
                out[i, a, k, 1] = 0.5 * (mass - d)
    return out


def joint_table_numba(q, response, nodes, bob_axes):
    return _joint_table_nb(
        np.ascontiguousarray(q),
        np.ascontiguousarray(response),
        np.ascontiguousarray(nodes),
        np.ascontiguousarray(bob_axes),
    )


# ---------------------------------------------------------------------------
# hemisphere indicator responses:  r(A,a,j) = 1 if xi_j . s(A,a) > 0,
# 1/2 on the dividing great circle, complementary between the two outcomes.
# Splitting ties evenly keeps the outcome masses of an antipodally
# symmetric grid at exactly half the total mass.


def hemisphere_response_numpy(nodes, sv_plus):
    dots = sv_plus @ nodes.T                   # (M, n)
    plus = np.where(dots > 0.0, 1.0, 0.0)
    plus[dots == 0.0] = 0.5
    out = np.empty((sv_plus.shape[0], 2, nodes.shape[0]))
    out[:, 0, :] = plus
    out[:, 1, :] = 1.0 - plus
    return out


@njit(cache=True)
def _hemisphere_response_nb(nodes, sv_plus):
    m = sv_plus.shape[0]
    n = nodes.shape[0]
    out = np.zeros((m, 2, n))
    for i in range(m):
        for j in range(n):
            d = (
                sv_plus[i, 0] * nodes[j, 0]
                + sv_plus[i, 1] * nodes[j, 1]
                + sv_plus[i, 2] * nodes[j, 2]
            )
            if d > 0.0:
                out[i, 0, j] = 1.0
            elif d == 0.0:
                out[i, 0, j] = 0.5
                out[i, 1, j] = 0.5
            else:
                out[i, 1, j] = 1.0
    return out


def hemisphere_response_numba(nodes, sv_plus):
    return _hemisphere_response_nb(
        np.ascontiguousarray(nodes), np.ascontiguousarray(sv_plus)
    )


# ---------------------------------------------------------------------------
# direction-set geometry (brute force over pairs)


def pairwise_min_angle_numpy(dirs):
    dots = np.clip(dirs @ dirs.T, -1.0, 1.0)
    ang = np.arccos(dots)
    np.fill_diagonal(ang, np.inf)
    return float(ang.min())


def max_nearest_gap_numpy(dirs):
    dots = np.clip(dirs @ dirs.T, -1.0, 1.0)
    ang = np.arccos(dots)
    np.fill_diagonal(ang, np.inf)
    return float(ang.min(axis=1).max())


@njit(cache=True)
def _angle_stats_nb(dirs):
    n = dirs.shape[0]
    global_min = np.inf
    max_nn = 0.0
    for i in range(n):
        nn = np.inf
        for j in range(n):
            if i == j:
                continue
            d = (
                dirs[i, 0] * dirs[j, 0]
                + dirs[i, 1] * dirs[j, 1]
                + dirs[i, 2] * dirs[j, 2]
            )
            if d > 1.0:
                d = 1.0
            elif d < -1.0:
                d = -1.0
            a = np.arccos(d)
            if a < nn:
                nn = a
        if nn < global_min:
            global_min = nn
        if nn > max_nn:
            max_nn = nn
    return global_min, max_nn


def pairwise_min_angle_numba(dirs):
    return float(_angle_stats_nb(np.ascontiguousarray(dirs))[0])


def max_nearest_gap_numba(dirs):
    return float(_angle_stats_nb(np.ascontiguousarray(dirs))[1])


if HAVE_NUMBA:
    moment_sums = moment_sums_numba
    joint_table = joint_table_numba
    hemisphere_response = hemisphere_response_numba
    pairwise_min_angle = pairwise_min_angle_numba
    max_nearest_gap = max_nearest_gap_numba
else:
    moment_sums = moment_sums_numpy
    joint_table = joint_table_numpy
    hemisphere_response = hemisphere_response_numpy
    pairwise_min_angle = pairwise_min_angle_numpy
    max_nearest_gap = max_nearest_gap_numpy
