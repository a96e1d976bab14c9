"""Shared fixtures and independent oracles.

The oracles below rebuild configurations from explicit body positions and
plain mass-weighted definitions; they deliberately avoid the closed-form
paths in the package so that agreement is meaningful.
"""

import math

import numpy as np
import pytest

from trihill.systems import BodySystem, preset


@pytest.fixture(scope="session")
def gravity():
    return preset("gravity-demo")


@pytest.fixture(scope="session")
def helium():
    return preset("helium")


@pytest.fixture(scope="session")
def eep():
    return preset("eep")


@pytest.fixture(scope="session")
def all_systems(gravity, helium, eep):
    return {"gravity-demo": gravity, "helium": helium, "eep": eep}


def oracle_positions(system: BodySystem, rho1: float, rho2: float, phi: float) -> np.ndarray:
    """Body positions (rows 1..3, centre of mass at origin) from first principles."""
    m1, m2, m3 = system.masses
    mu1 = m1 * m3 / (m1 + m3)
    mu2 = m2 * (m1 + m3) / (m1 + m2 + m3)
    d13 = np.array([rho1, 0.0, 0.0]) / math.sqrt(mu1)
    d2 = np.array([rho2 * math.cos(phi), rho2 * math.sin(phi), 0.0]) / math.sqrt(mu2)
    mtot = m1 + m2 + m3
    b13 = -m2 / mtot * d2
    x1 = b13 + m3 / (m1 + m3) * d13
    x3 = b13 - m1 / (m1 + m3) * d13
    x2 = b13 + d2
    return np.vstack([x1, x2, x3])


def oracle_distances(positions: np.ndarray) -> tuple[float, float, float]:
    """(r12, r13, r23) from positions."""
    x1, x2, x3 = positions
    return (
        float(np.linalg.norm(x1 - x2)),
        float(np.linalg.norm(x1 - x3)),
        float(np.linalg.norm(x2 - x3)),
    )


def oracle_inertia_tensor(system: BodySystem, positions: np.ndarray) -> np.ndarray:
    """Moment-of-inertia tensor about the centre of mass."""
    masses = np.asarray(system.masses)
    com = masses @ positions / masses.sum()
    M = np.zeros((3, 3))
    for m, x in zip(masses, positions - com):
        M += m * (np.dot(x, x) * np.eye(3) - np.outer(x, x))
    return M


def oracle_potential(system: BodySystem, positions: np.ndarray) -> float:
    r12, r13, r23 = oracle_distances(positions)
    a1, a2, a3 = system.alphas
    return -a3 / r12 - a2 / r13 - a1 / r23


def oracle_lambda_grid_member(
    system: BodySystem,
    rho1: float,
    rho2: float,
    phi: float,
    j_hat: np.ndarray,
    E: float,
    r: float,
    n_lambda: int = 2001,
) -> bool:
    """Scan the raw Hill inequality over dilations of the configuration.

    Every scaled configuration is rebuilt from positions; principal moments
    come from numpy's eigensolver, the potential from measured distances.
    """
    base = oracle_positions(system, rho1, rho2, phi)
    lams = np.logspace(-6.0, 6.0, n_lambda)
    pos = lams[:, None, None] * base[None, :, :]
    a1, a2, a3 = system.alphas
    d12 = np.linalg.norm(pos[:, 0] - pos[:, 1], axis=-1)
    d13 = np.linalg.norm(pos[:, 0] - pos[:, 2], axis=-1)
    d23 = np.linalg.norm(pos[:, 1] - pos[:, 2], axis=-1)
    V = -(a3 / d12 + a2 / d13 + a1 / d23)
    masses = np.asarray(system.masses)
    sq = np.einsum("lbx,lbx->lb", pos, pos)
    M = np.einsum("b,lb,xy->lxy", masses, sq, np.eye(3)) - np.einsum(
        "b,lbx,lby->lxy", masses, pos, pos
    )
    mom = np.linalg.eigvalsh(M)
    er = 0.5 * r * r * (
        j_hat[0] ** 2 / mom[:, 0] + j_hat[1] ** 2 / mom[:, 1] + j_hat[2] ** 2 / mom[:, 2]
    )
    return bool(np.min(er + V) <= E)


def sphere_grid(step_deg: float = 2.0) -> np.ndarray:
    """Geodesic-style latitude/longitude grid of unit vectors, (ntheta, nphi, 3)."""
    th = np.radians(np.arange(step_deg / 2.0, 180.0, step_deg))
    ph = np.radians(np.arange(0.0, 360.0, step_deg))
    TH, PH = np.meshgrid(th, ph, indexing="ij")
    return np.stack([np.sin(TH) * np.cos(PH), np.sin(TH) * np.sin(PH), np.cos(TH)], axis=-1)


def count_components_periodic(mask: np.ndarray, polar: bool = True) -> int:
    """4-connected components on a (colatitude, longitude) grid.

    The longitude axis is periodic.  With ``polar`` set, accessible cells of
    the first (last) colatitude row are merged through the omitted pole: the
    rotational energy is monotone in colatitude near the poles, so whenever a
    first-row cell is accessible the polar cap above it is too.
    """
    from scipy import ndimage

    lab, n = ndimage.label(mask)
    if n == 0:
        return 0
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for i in range(mask.shape[0]):
        a, b = lab[i, 0], lab[i, -1]
        if a and b:
            union(a, b)
    if polar:
        for row in (0, -1):
            labels = [x for x in np.unique(lab[row]) if x]
            for x in labels[1:]:
                union(labels[0], x)
    return len({find(x) for x in range(1, n + 1)})


def oracle_orientation_class(
    system: BodySystem,
    nu: float,
    rho1: float,
    rho2: float,
    phi: float,
    grid: np.ndarray,
) -> int:
    """0 empty / 1 caps / 2 ring / 3 full, from sphere sampling.

    The accessibility of each sampled direction uses the discriminant
    inequality with principal moments taken from the positions oracle, and
    the caps/ring split comes from counting connected components (two
    components containing the polar rows = caps; one band = ring).
    """
    pos = oracle_positions(system, rho1, rho2, phi)
    mom = np.linalg.eigvalsh(oracle_inertia_tensor(system, pos))
    I = 0.5 * np.trace(oracle_inertia_tensor(system, pos))
    vt = oracle_potential(system, pos) * math.sqrt(I)  # homogeneity: V at I = 1
    momt = mom / I
    er = 0.5 * (
        grid[..., 0] ** 2 / momt[0] + grid[..., 1] ** 2 / momt[1] + grid[..., 2] ** 2 / momt[2]
    )
    if nu < 0:
        acc = np.ones(er.shape, dtype=bool)
    elif nu == 0:
        acc = np.full(er.shape, vt < 0.0)
    elif vt >= 0:
        acc = np.zeros(er.shape, dtype=bool)
    else:
        acc = er <= vt * vt / (4.0 * nu)
    if acc.all():
        return 3
    if not acc.any():
        return 0
    ncomp = count_components_periodic(acc)
    if ncomp == 2 and acc[0].any() and acc[-1].any():
        return 1
    return 2
