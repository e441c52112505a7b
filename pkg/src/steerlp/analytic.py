"""Closed-form reference values for planar steering figures and mixtures."""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .qubit import ValidationError


@dataclass(frozen=True)
class EllipseAxes:
    """Semi-axes of a planar steering ellipse, in probability-Bloch units."""

    semi_major: float
    semi_minor: float

    def __post_init__(self):
        if not self.semi_major >= self.semi_minor >= 0.0:
            raise ValidationError("require semi_major >= semi_minor >= 0")


def ellipse_half_circumference(ax: EllipseAxes) -> float:
    """Half the circumference of the ellipse: the minimum model mass for a
    planar correlation state whose steering figure is that ellipse.

    Computed by adaptive quadrature of the arc-length integral; accurate
    across eccentricities including the degenerate segment case.
    """
    a, b = ax.semi_major, ax.semi_minor
    if a == 0.0:
        return 0.0

    def speed(t):
        return np.hypot(a * np.sin(t), b * np.cos(t))

    # quarter arc times two; splitting at pi/2 keeps quad happy near b = 0
    quarter, _ = quad(speed, 0.0, np.pi / 2.0, epsabs=0.0, epsrel=1e-12, limit=200)
    return 2.0 * quarter


def bell_diag_mix_s(weights, s_values) -> float:
    """Model mass of a mixture of Bell-diagonal components: the weighted sum
    of the component masses (all outcome probabilities equal 1/2, so the
    mixing construction needs no extra center mass).
    """
    w = np.asarray(weights, dtype=float)
    s = np.asarray(s_values, dtype=float)
    if w.shape != s.shape:
        raise ValidationError("weights and s_values must align")
    if w.min() < 0.0 or abs(w.sum() - 1.0) > 1e-9:
        raise ValidationError("weights must be a probability vector")
    return float(w @ s)


def mixture_threshold(s_component: float):
    """Largest singlet fraction p keeping 2p + (1-p)s <= 1.

    Returns (p_star, attainable); when the component mass already exceeds
    1 no positive threshold exists and (0.0, False) is returned.
    """
    if s_component < 0.0:
        raise ValidationError("component mass must be nonnegative")
    if s_component > 1.0:
        return 0.0, False
    return (1.0 - s_component) / (2.0 - s_component), True
