"""Measurement sets, assemblages and steering figures."""

import json

import numpy as np

from . import _kernels
from .qubit import ProjectiveMeasurement, TwoQubitState, ValidationError, _readonly

ANTIPODAL_TOL = 1e-9  # radians

# outcome index convention used throughout: column 0 <-> outcome +1, 1 <-> -1
OUTCOMES = (1, -1)


class MeasurementSet:
    """Ordered set of binary projective measurement directions."""

    def __init__(self, directions, label=""):
        dirs = np.asarray(directions, dtype=float)
        if dirs.ndim != 2 or dirs.shape[1] != 3 or dirs.shape[0] == 0:
            raise ValidationError("directions must be a nonempty (n, 3) array")
        norms = np.linalg.norm(dirs, axis=1)
        if np.abs(norms - 1.0).max() > 1e-12:
            raise ValidationError("all measurement directions must be unit vectors")
        dots = np.abs(np.clip(dirs @ dirs.T, -1.0, 1.0))
        np.fill_diagonal(dots, 0.0)
        if np.arccos(dots.max()) < ANTIPODAL_TOL:
            i, j = np.unravel_index(np.argmax(dots), dots.shape)
            raise ValidationError(
                f"directions {i} and {j} coincide or are antipodal"
            )
        self.directions = _readonly(dirs)
        self.label = label

    def __len__(self):
        return self.directions.shape[0]

    def measurement(self, i) -> ProjectiveMeasurement:
        return ProjectiveMeasurement(self.directions[i])

    def subset(self, k, label=None) -> "MeasurementSet":
        """First k directions; keeps ordering, so subsets nest."""
        return MeasurementSet(
            self.directions[:k], label or f"{self.label}[:{k}]"
        )

    def union(self, other, label=None) -> "MeasurementSet":
        """Append other's directions, dropping (anti)parallel duplicates."""
        kept = list(self.directions)
        for d in other.directions:
            dots = np.abs(np.clip(np.array(kept) @ d, -1.0, 1.0))
            if np.arccos(dots.max()) >= ANTIPODAL_TOL:
                kept.append(d)
        return MeasurementSet(
            np.array(kept), label or f"{self.label}+{other.label}"
        )


def _dedupe_antipodal(dirs):
    kept = []
    for d in dirs:
        dup = any(
            np.arccos(min(abs(e @ d), 1.0)) < ANTIPODAL_TOL for e in kept
        )
        if not dup:
            kept.append(d)
    return np.array(kept)


def fibonacci_directions(n: int, label=None) -> MeasurementSet:
    """Fibonacci-lattice directions on the sphere, antipodal-filtered."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    i = np.arange(n)
    z = 1.0 - (2.0 * i + 1.0) / n
    golden = (1.0 + np.sqrt(5.0)) / 2.0
    phi = 2.0 * np.pi * i / golden
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    dirs = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    dirs = _dedupe_antipodal(dirs)
    return MeasurementSet(dirs, label or f"fib:{n}")


def coordinate_axes() -> MeasurementSet:
    return MeasurementSet(np.eye(3), "axes:xyz")


def parse_measurement_spec(spec: str) -> MeasurementSet:
    """Grammar: "fib:<n>" | "axes:xyz" | "file:<path>" (JSON array of 3-vectors)."""
    if spec.startswith("fib:"):
        return fibonacci_directions(int(spec[4:]))
    if spec == "axes:xyz":
        return coordinate_axes()
    if spec.startswith("file:"):
        with open(spec[5:]) as fh:
            raw = np.asarray(json.load(fh), dtype=float)
        if raw.ndim != 2 or raw.shape[1] != 3:
            raise ValidationError(f"{spec[5:]}: expected a JSON array of 3-vectors")
        norms = np.linalg.norm(raw, axis=1)
        if norms.min() <= 0.0:
            raise ValidationError(f"{spec[5:]}: zero-length direction")
        return MeasurementSet(raw / norms[:, None], spec)
    raise ValidationError(f"unknown measurement spec {spec!r}")


class Assemblage:
    """Per (measurement, outcome) probabilities and shrinked Bloch vectors."""

    def __init__(self, mset: MeasurementSet, p, sv, bob_bloch):
        p = np.asarray(p, dtype=float)
        sv = np.asarray(sv, dtype=float)
        bob = np.asarray(bob_bloch, dtype=float)
        m = len(mset)
        if p.shape != (m, 2) or sv.shape != (m, 2, 3) or bob.shape != (3,):
            raise ValidationError("assemblage arrays have inconsistent shapes")
        if np.abs(p.sum(axis=1) - 1.0).max() > 1e-12:
            raise ValidationError("outcome probabilities must sum to 1")
        if np.abs(sv.sum(axis=1) - bob).max() > 1e-12:
            raise ValidationError("no-signalling violated: sv(+) + sv(-) != b")
        if (np.linalg.norm(sv, axis=2) - p).max() > 1e-12:
            raise ValidationError("|sv| > p: conditioned state not a valid qubit")
        self.mset = mset
        self.p = _readonly(p)
        self.sv = _readonly(sv)
        self.bob_bloch = _readonly(bob)

    def __len__(self):
        return len(self.mset)

    def mix(self, other, c, label=None) -> "Assemblage":
        """Convex combination c*self + (1-c)*other over the same directions."""
        if len(self) != len(other) or not np.array_equal(
            self.mset.directions, other.mset.directions
        ):
            raise ValidationError("assemblages use different measurement sets")
        return Assemblage(
            self.mset,
            c * self.p + (1 - c) * other.p,
            c * self.sv + (1 - c) * other.sv,
            c * self.bob_bloch + (1 - c) * other.bob_bloch,
        )


def build_assemblage(s: TwoQubitState, mset: MeasurementSet) -> Assemblage:
    """Evaluate p(a|A) = (1 + x.a)/2, s_A^a = (b + T^t x)/2 over the set."""
    x = mset.directions
    pa = 0.5 * (1.0 + x @ s.a)
    p = np.column_stack([pa, 1.0 - pa])
    tv = 0.5 * (x @ s.t)  # = (T^t x)/2 rows
    sv = np.empty((len(mset), 2, 3))
    sv[:, 0, :] = 0.5 * s.b + tv
    sv[:, 1, :] = 0.5 * s.b - tv
    return Assemblage(mset, p, sv, s.b)


RANK_TOL = 1e-9
_CLASS_BY_RANK = {0: "point", 1: "segment", 2: "ellipse", 3: "ellipsoid"}


class SteeringFigure:
    """Image of Alice's projective measurements in the probability Bloch sphere."""

    def __init__(self, center, shape):
        self.center = _readonly(np.asarray(center, dtype=float))
        self.shape = _readonly(np.asarray(shape, dtype=float))
        rank = int(np.sum(np.linalg.svd(self.shape, compute_uv=False) > RANK_TOL))
        self.classification = _CLASS_BY_RANK[rank]

    def semi_axes(self):
        """Singular values of the shape matrix (degenerate ones are zero)."""
        return np.linalg.svd(self.shape, compute_uv=False)


def steering_figure(s: TwoQubitState) -> SteeringFigure:
    return SteeringFigure(0.5 * s.b, 0.5 * s.t.T)


def max_nearest_neighbor_gap(mset: MeasurementSet) -> float:
    """Largest angular distance from any direction to its nearest neighbor."""
    return _kernels.max_nearest_gap(mset.directions)
