"""Hill-region membership and orientation classification on the shape space.

For energy E and angular-momentum magnitude r > 0, a shape-orientation point
(shape, Jhat) is admissible iff some dilation factor lam > 0 satisfies

    F(lam) = lam^2 E - E_R - lam Vt >= 0,

where Vt is the potential restricted to the I = 1 shape space and
E_R = r^2 * (1/2) Jhat . Mt^-1 . Jhat is the rotational energy built from the
dilation-reduced inertia tensor Mt.  F is a quadratic with discriminant
Delta = 4 E E_R + Vt^2, which yields:

* E > 0: always admissible;
* E = 0: admissible iff Vt < 0;
* E < 0: admissible iff Vt < 0 and Delta >= 0.

For E < 0 everything depends on (E, r) only through nu = -E r^2.  Sweeping
Jhat over the unit sphere at fixed shape, the accessible set is empty, two
caps around the axis-3 poles, a band (ring), or the full sphere, with
transitions exactly at nu = (1/2) Mt_k Vt^2 for k = 3, 2, 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .coords import Distances, Shape, pair_geometry
from .systems import BodySystem


class OrientationClass(IntEnum):
    """Accessible set on the orientation sphere, ordered by inclusion."""

    EMPTY = 0
    CAPS = 1
    RING = 2
    FULL = 3


@dataclass(frozen=True)
class ShapeEvaluation:
    """Dilation-reduced data of one shape.

    ``m_tilde`` is (Mt1, Mt2, Mt3) ascending with Mt1 + Mt2 = Mt3 = 1;
    ``thresholds`` is the ascending triple (1/(2 Mt3), 1/(2 Mt2), 1/(2 Mt1))
    of critical normalized rotational energies.
    """

    shape: Shape
    v_tilde: float
    m_tilde: tuple[float, float, float]
    thresholds: tuple[float, float, float]


@dataclass(frozen=True)
class HillMembership:
    member: bool
    region_case: str  # I, IIa, IIb, IIIa, IIIb, IV or axis-degenerate
    discriminant: float
    lambda_minus: float | None = None
    lambda_plus: float | None = None


def potential(system: BodySystem, dist: Distances) -> float:
    """V = -a3/r12 - a2/r13 - a1/r23; collisions give a signed infinity."""
    a1, a2, a3 = system.alphas
    total = 0.0
    for gam, r in ((a3, dist.r12), (a2, dist.r13), (a1, dist.r23)):
        if r < 0:
            raise ValueError("distances must be nonnegative")
        if r == 0.0:
            if gam == 0.0:
                continue
            return math.copysign(math.inf, -gam)
        total -= gam / r
    return total


def v_tilde(system: BodySystem, w1: float, w2: float) -> float:
    """Shape-space potential at the disk point (w1, w2) using the affine
    pair-distance forms r_ij^2 = (1 - w1 cos psi_ij - w2 sin psi_ij)/(2 mu_ij)."""
    total = 0.0
    for mu, gam, psi in pair_geometry(system):
        r2 = (1.0 - w1 * math.cos(psi) - w2 * math.sin(psi)) / (2.0 * mu)
        total -= gam / math.sqrt(r2)
    return total


def shape_eval(system: BodySystem, shape: Shape) -> ShapeEvaluation:
    """Restrict V and the principal moments to the shape space.

    On the I = 1 section the moments depend only on the disk radius s:
    Mt1 = (1-s)/2, Mt2 = (1+s)/2, Mt3 = 1.
    """
    s = shape.radius
    m1, m2, m3 = 0.5 * (1.0 - s), 0.5 * (1.0 + s), 1.0
    vt = v_tilde(system, shape.w1, shape.w2)
    return ShapeEvaluation(
        shape=shape,
        v_tilde=vt,
        m_tilde=(m1, m2, m3),
        thresholds=(0.5, 0.5 / m2, 0.5 / m1),
    )


def f_lambda(E: float, E_R: float, v_tilde: float, lam: float) -> float:
    """The dilation quadratic F(lam) = lam^2 E - E_R - lam Vt."""
    return lam * lam * E - E_R - lam * v_tilde


def f_analysis(E: float, E_R: float, v_tilde: float) -> HillMembership:
    """Classify F(lam) by the six-region decomposition of the (E, Vt) plane.

    Membership means F(lam) >= 0 for some lam > 0.  The coordinate axes
    E = 0 and Vt = 0 are reported as 'axis-degenerate'.
    """
    if E_R <= 0.0:
        raise ValueError("rotational energy must be positive (r > 0)")
    disc = 4.0 * E * E_R + v_tilde * v_tilde
    lam_minus = lam_plus = None
    if E != 0.0 and disc >= 0.0:
        root = math.sqrt(disc)
        pair = sorted(((v_tilde - root) / (2.0 * E), (v_tilde + root) / (2.0 * E)))
        lam_minus, lam_plus = pair
    if E > 0.0:
        case = "I" if v_tilde > 0.0 else ("IV" if v_tilde < 0.0 else "axis-degenerate")
        return HillMembership(True, case, disc, lam_minus, lam_plus)
    if E == 0.0:
        # F is affine: F(lam) = -E_R - lam Vt, eventually positive iff Vt < 0.
        if v_tilde != 0.0:
            lam_minus = lam_plus = -E_R / v_tilde
        return HillMembership(v_tilde < 0.0, "axis-degenerate", disc, lam_minus, lam_plus)
    if v_tilde > 0.0:
        return HillMembership(False, "IIa" if disc >= 0.0 else "IIb", disc, lam_minus, lam_plus)
    if v_tilde == 0.0:
        # F(lam) = lam^2 E - E_R < 0 for all lam; forced non-member.
        return HillMembership(False, "axis-degenerate", disc, None, None)
    if disc >= 0.0:
        return HillMembership(True, "IIIa", disc, lam_minus, lam_plus)
    return HillMembership(False, "IIIb", disc, None, None)


def _normalized_rotational_energy(ev: ShapeEvaluation, j_hat: np.ndarray) -> float:
    j_hat = np.asarray(j_hat, dtype=float)
    if abs(np.linalg.norm(j_hat) - 1.0) > 1e-12:
        raise ValueError("J_hat must be a unit vector (principal-axis components)")
    m1, m2, m3 = ev.m_tilde
    return 0.5 * (j_hat[0] ** 2 / m1 + j_hat[1] ** 2 / m2 + j_hat[2] ** 2 / m3)


def membership(
    system: BodySystem, E: float, r: float, shape: Shape, j_hat: np.ndarray
) -> HillMembership:
    """Hill-region test for one shape-orientation point.

    ``j_hat`` holds components along the shape's principal axes, ascending
    (axis 3 is the normal of the configuration plane).
    """
    if r <= 0.0:
        raise ValueError("the Hill region is defined for r > 0")
    ev = shape_eval(system, shape)
    E_R = r * r * _normalized_rotational_energy(ev, j_hat)
    return f_analysis(E, E_R, ev.v_tilde)


def bif_function(system: BodySystem, shape: Shape, j_hat: np.ndarray) -> float:
    """Value whose sublevel set at -sqrt(nu) is the Hill region for E < 0.

    Returns Vt / (2 sqrt((1/2) Jhat . Mt^-1 . Jhat)).  Along principal axis k
    this equals Vt sqrt(Mt_k / 2), so its critical values are -sqrt(nu) at the
    critical points of sqrt(Mt_k) Vt.
    """
    ev = shape_eval(system, shape)
    return ev.v_tilde / (2.0 * math.sqrt(_normalized_rotational_energy(ev, j_hat)))


def nu_thresholds(system: BodySystem, shape: Shape) -> tuple[float, float, float]:
    """(nu_caps, nu_ring, nu_full) = (1/2) Mt_k Vt^2 for k = 3, 2, 1.

    For 0 < nu <= nu_caps the accessible set is nonempty; at nu <= nu_ring
    axis 2 opens up; at nu <= nu_full every orientation is admissible.
    Meaningful only where Vt < 0.
    """
    ev = shape_eval(system, shape)
    v2 = ev.v_tilde * ev.v_tilde
    m1, m2, m3 = ev.m_tilde
    return 0.5 * m3 * v2, 0.5 * m2 * v2, 0.5 * m1 * v2


def class_from_level(
    level: float, thresholds: tuple[float, float, float]
) -> OrientationClass:
    """Class of the sublevel set {E_R <= level} on the orientation sphere.

    ``thresholds`` is the ascending triple of critical normalized rotational
    energies.  The membership inequality is non-strict, so a level exactly at
    a threshold already includes the newly opened orientations.
    """
    if level >= thresholds[2]:
        return OrientationClass.FULL
    if level >= thresholds[1]:
        return OrientationClass.RING
    if level >= thresholds[0]:
        return OrientationClass.CAPS
    return OrientationClass.EMPTY


def orientation_class(system: BodySystem, nu: float, shape: Shape) -> OrientationClass:
    """Four-way class of the accessible set on the orientation sphere.

    For nu <= 0 (E >= 0) everything with Vt < 0 is fully accessible; for
    nu > 0 the squared normalized level Vt^2/(4 nu) is compared against the
    thresholds 1/(2 Mt_k).
    """
    ev = shape_eval(system, shape)
    if nu < 0.0:
        return OrientationClass.FULL
    if nu == 0.0:
        return OrientationClass.FULL if ev.v_tilde < 0.0 else OrientationClass.EMPTY
    if ev.v_tilde >= 0.0:
        return OrientationClass.EMPTY
    return class_from_level(ev.v_tilde * ev.v_tilde / (4.0 * nu), ev.thresholds)
