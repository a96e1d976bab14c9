"""End-to-end verification: relative-equilibrium dynamics and invariant suites.

Ties the critical-value catalog to the reduced dynamics: every catalog entry
with an interior shape yields an initial condition the integrator must hold
fixed, with the virial identity E = V/2 and nu = -E r^2 recovered to tight
tolerances.  ``verify_all`` aggregates these dynamical checks with catalog
regressions against reference values and randomized invariant suites into a
line-oriented report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coords import (
    JacobiShapeCoords,
    WCoords,
    collision_angles,
    dilate,
    distances_from_w,
    dragt_from_w,
    jacobi_from_w,
    positions_from_jacobi,
    w_from_dragt,
    w_from_jacobi,
)
from .critical import (
    CriticalValue,
    critical_catalog,
    find_critical_shapes,
    langmuir_geometry,
    nu_diabolic,
    nu_lagrange,
    nu_langmuir,
)
from .errors import UnsupportedFamilyError
from .hill import membership, orientation_class, shape_eval
from .reduction import (
    RovibState,
    eom,
    hamiltonian,
    integrate,
    principal_axes,
    relequil_residual,
)
from .systems import PRESETS, BodySystem

VIRIAL_DT_FACTOR = 1e-3  # dt = factor * (2 pi r / |V|), the rotation period


def build_relequil_state(system: BodySystem, critical: CriticalValue, r: float) -> RovibState:
    """Initial condition of the relative equilibrium behind a catalog entry.

    The shape is rescaled so that the virial relation r^2 = -M_k(q) V(q)
    holds at the requested angular-momentum magnitude; J points along
    principal axis k and the momenta are the gauge values p = J.A (zero for
    in-plane axes).
    """
    if r <= 0.0:
        raise ValueError("r must be positive")
    if critical.w is None:
        raise UnsupportedFamilyError(
            f"{critical.family} entries carry no configuration to rescale"
        )
    shape = critical.shape()  # raises for boundary points (infinity/collinear)
    if critical.axis is None:
        raise UnsupportedFamilyError(f"{critical.family} entry has no rotation axis")
    k = critical.axis
    ev = shape_eval(system, shape)
    if ev.v_tilde >= 0.0:
        raise UnsupportedFamilyError("no real spin rate: shape potential is nonnegative")
    mk = ev.m_tilde[k - 1]
    lam = r * r / (-mk * ev.v_tilde)
    q = dilate(shape.to_jacobi(), lam)
    _, axes = principal_axes(q)
    J = r * axes[:, k - 1]
    a_phi = q.rho2**2 / (q.rho1**2 + q.rho2**2)
    p = np.array([0.0, 0.0, J[2] * a_phi])
    return RovibState(np.array([q.rho1, q.rho2, q.phi]), p, J)


@dataclass
class Check:
    name: str
    passed: bool
    measured: float
    tol: float
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        out = f"CHECK {self.name} {status} measured={self.measured:.6g} tol={self.tol:.6g}"
        if self.note:
            out += f" ({self.note})"
        return out


@dataclass
class VerificationReport:
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, measured: float, tol: float, note: str = "") -> None:
        self.checks.append(Check(name, bool(measured <= tol), float(measured), float(tol), note))

    def add_flag(self, name: str, ok: bool, note: str = "") -> None:
        self.checks.append(Check(name, bool(ok), 0.0 if ok else 1.0, 0.5, note))

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def text(self) -> str:
        return "\n".join(c.line() for c in self.checks) + "\n"


# Reference catalogs.  Values are the published decimals; each carries the
# relative tolerance it actually satisfies against the exact formulas (the
# helium Langmuir decimal is only accurate to about 8 significant digits).
CATALOG_REFERENCES: dict[str, list[tuple[float, str, float]]] = {
    "gravity-demo": [
        (0.0, "zero", 1e-9),
        (0.3927272727, "infinity", 1e-9),
        (0.7876923077, "infinity", 1e-9),
        (1.263908571, "infinity", 1e-9),
        (6.961348535, "diabolic", 1e-9),
        (13.83605894, "lagrange", 1e-9),
        (18.56904438, "collinear", 1e-6),
        (19.12865697, "collinear", 1e-6),
        (19.44296212, "collinear", 1e-6),
    ],
    "helium": [
        (0.0, "zero", 1e-9),
        (1.999725672, "infinity", 1e-9),
        (5.420669550, "diabolic", 1e-9),
        (6.748148600, "langmuir", 2e-8),
        (12.25, "collinear", 1e-9),
    ],
    "eep": [
        (0.0, "zero", 1e-9),
        (0.25, "infinity", 1e-9),
        (0.2925594730, "langmuir", 1e-9),
        (2.25, "collinear", 1e-9),
    ],
}


def _preset_name(system: BodySystem) -> str | None:
    for name, sys_ in PRESETS.items():
        if sys_.masses == system.masses and sys_.alphas == system.alphas:
            return name
    return None


def _langmuir_force_residual(system: BodySystem) -> float:
    """Worst force-balance residual of the isosceles configuration.

    Solves the spin rate from the apex body's radial balance, then checks
    the remaining radial and vertical balances, all at leg length a = 1.
    """
    geom = langmuir_geometry(system)
    i, j = geom.like_pair
    g_like = system.pair_coupling(i, j)
    g_cross = system.pair_coupling(i, geom.apex)
    m_like = system.masses[i - 1]
    m_apex = system.masses[geom.apex - 1]
    sin_t, cos_t = math.sin(geom.theta), math.cos(geom.theta)
    omega2 = 2.0 * g_cross * cos_t / (m_apex * geom.c)
    r_apex = m_apex * omega2 * geom.c - 2.0 * g_cross * cos_t
    r_side = m_like * omega2 * geom.d - g_cross * cos_t
    r_vert = g_like / (2.0 * geom.b) ** 2 + g_cross * sin_t
    return max(abs(r_apex), abs(r_side), abs(r_vert))


def _relequil_checks(
    report: VerificationReport,
    system: BodySystem,
    entry: CriticalValue,
    r: float = 1.0,
    nsteps: int = 10_000,
) -> None:
    tag = entry.family
    state = build_relequil_state(system, entry, r)
    res1, res3 = relequil_residual(system, state.jacobi(), state.J)
    report.add(f"{tag}.residual", max(np.linalg.norm(res1), np.linalg.norm(res3)), 1e-8)

    E = hamiltonian(system, state)
    from .reduction import _potential_and_grad

    V, _ = _potential_and_grad(system, state.q)
    report.add(f"{tag}.virial", abs(E - 0.5 * V), 1e-10 * abs(V), "E = V/2")
    report.add(
        f"{tag}.nu_roundtrip",
        abs(-E * r * r - entry.nu) / entry.nu,
        1e-9,
        "nu = -E r^2 vs catalog",
    )

    dt = VIRIAL_DT_FACTOR * 2.0 * math.pi * r / abs(V)
    traj, cons = integrate(system, state, dt, nsteps)
    report.add_flag(f"{tag}.complete", cons.ok, cons.message or f"{nsteps} steps")
    qp0 = traj.states[0, :6]
    drift = float(np.max(np.abs(traj.states[:, :6] - qp0)))
    report.add(f"{tag}.qp_drift", drift, 1e-6)
    report.add(f"{tag}.energy_drift", cons.energy_drift / abs(E), 1e-8, "|dH|/|E|")
    report.add(f"{tag}.J_drift", cons.momentum_drift, 1e-10)


def _roundtrip_suite(report: VerificationReport, samples: int = 10_000) -> None:
    rng = np.random.default_rng(20260808)
    worst = 0.0
    for _ in range(samples):
        rho1, rho2 = rng.uniform(0.1, 3.0, 2)
        phi = rng.uniform(0.05, math.pi - 0.05)
        j = JacobiShapeCoords(rho1, rho2, phi)
        w = w_from_jacobi(j)
        j2 = jacobi_from_w(w)
        d = dragt_from_w(w)
        w2 = w_from_dragt(d)
        scale = max(1.0, rho1, rho2)
        err = max(
            abs(j2.rho1 - rho1) / scale,
            abs(j2.rho2 - rho2) / scale,
            abs(j2.phi - phi),
            abs(w2.w1 - w.w1) / max(1.0, w.norm),
            abs(w2.w2 - w.w2) / max(1.0, w.norm),
            abs(w2.w3 - w.w3) / max(1.0, w.norm),
        )
        worst = max(worst, err)
    report.add("coords.roundtrip", worst, 1e-10, f"{samples} samples")


def _inertia_suite(report: VerificationReport, samples: int = 2_000) -> None:
    from .reduction import inertia

    rng = np.random.default_rng(77)
    worst_sum = worst_tr = worst_hom = 0.0
    for _ in range(samples):
        rho1, rho2 = rng.uniform(0.05, 4.0, 2)
        phi = rng.uniform(0.0, math.pi)
        j = JacobiShapeCoords(rho1, rho2, phi)
        data = inertia(j)
        m1, m2, m3 = data.principal
        scale = max(1.0, data.I)
        worst_sum = max(worst_sum, abs(m1 + m2 - m3) / scale)
        worst_tr = max(worst_tr, abs(0.5 * np.trace(data.tensor) - data.I) / scale)
        lam = float(rng.uniform(1e-3, 1e3))
        scaled = inertia(dilate(j, lam))
        worst_hom = max(
            worst_hom,
            float(np.max(np.abs(scaled.tensor - lam * lam * data.tensor)))
            / max(1.0, lam * lam * data.I),
        )
    report.add("inertia.sum_rule", worst_sum, 1e-12, "M1 + M2 = M3")
    report.add("inertia.trace", worst_tr, 1e-12, "tr M / 2 = I")
    report.add("inertia.homogeneity", worst_hom, 1e-12, "M(d_lam q) = lam^2 M(q)")


def _eom_fd_suite(report: VerificationReport, system: BodySystem, samples: int = 300) -> None:
    rng = np.random.default_rng(13)
    worst = 0.0
    for _ in range(samples):
        q = np.array(
            [rng.uniform(0.3, 2.0), rng.uniform(0.3, 2.0), rng.uniform(0.3, math.pi - 0.3)]
        )
        p = rng.normal(0.0, 1.0, 3)
        J = rng.normal(0.0, 1.0, 3)
        state = RovibState(q, p, J)
        d = eom(system, state)
        scale = max(1.0, float(np.max(np.abs(d.q))), float(np.max(np.abs(d.p))))

        def h_of(qq, pp, JJ):
            return hamiltonian(system, RovibState(qq, pp, JJ))

        for mu in range(3):
            hh = 1e-6 * max(1.0, abs(q[mu]))
            qp, qm = q.copy(), q.copy()
            qp[mu] += hh
            qm[mu] -= hh
            fd = (h_of(qp, p, J) - h_of(qm, p, J)) / (2 * hh)
            worst = max(worst, abs(-fd - d.p[mu]) / scale)
            pp_, pm = p.copy(), p.copy()
            pp_[mu] += hh
            pm[mu] -= hh
            fd = (h_of(q, pp_, J) - h_of(q, pm, J)) / (2 * hh)
            worst = max(worst, abs(fd - d.q[mu]) / scale)
        jdot_dot_j = abs(float(np.dot(d.J, J)))
        worst = max(worst, jdot_dot_j / max(1.0, float(np.dot(J, J))))
    report.add("eom.finite_difference", worst, 1e-6, f"{samples} random states")


def _collision_angle_check(report: VerificationReport, system: BodySystem) -> None:
    psi12, psi23, _ = collision_angles(system)
    worst = 0.0
    for psi, attr in ((psi12, "r12"), (psi23, "r23"), (math.pi, "r13")):
        w = WCoords(math.cos(psi), math.sin(psi), 0.0)
        d = distances_from_w(system, w)
        worst = max(worst, getattr(d, attr))
    report.add("coords.collision_angles", worst, 1e-10, "r_ij = 0 on collision rays")


def _sphere_grid(step_deg: float = 2.0):
    th = np.radians(np.arange(step_deg / 2.0, 180.0, step_deg))
    ph = np.radians(np.arange(0.0, 360.0, step_deg))
    TH, PH = np.meshgrid(th, ph, indexing="ij")
    return np.stack(
        [np.sin(TH) * np.cos(PH), np.sin(TH) * np.sin(PH), np.cos(TH)], axis=-1
    )


def _orientation_oracle(system: BodySystem, nu: float, shape, grid) -> int:
    """Class from sampling the membership inequality over the J sphere.

    Independent of the threshold shortcut: counts connected components of
    the accessible set (axis 3 of the grid is the third principal axis).
    """
    ev = shape_eval(system, shape)
    m1, m2, m3 = ev.m_tilde
    er = 0.5 * (
        grid[..., 0] ** 2 / m1 + grid[..., 1] ** 2 / m2 + grid[..., 2] ** 2 / m3
    )
    if nu < 0:
        acc = np.ones_like(er, dtype=bool)
    elif nu == 0:
        acc = np.full_like(er, ev.v_tilde < 0.0, dtype=bool)
    elif ev.v_tilde >= 0:
        acc = np.zeros_like(er, dtype=bool)
    else:
        acc = er <= ev.v_tilde**2 / (4.0 * nu)
    if acc.all():
        return 3  # FULL
    if not acc.any():
        return 0  # EMPTY
    n = _label_periodic(acc)
    return 1 if n == 2 else 2  # two polar caps vs one band


def _label_periodic(mask: np.ndarray) -> int:
    """Components on the (colatitude, longitude) grid: periodic in longitude,
    with first- and last-row cells joined through the omitted poles (the
    rotational energy is monotone in colatitude near each pole)."""
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
    for row in (0, -1):
        labels = [x for x in np.unique(lab[row]) if x]
        for x in labels[1:]:
            union(labels[0], x)
    return len({find(x) for x in range(1, n + 1)})


def _oracle_suites(report: VerificationReport, system: BodySystem, samples: int = 150) -> None:
    rng = np.random.default_rng(5150)
    grid = _sphere_grid()
    lam_grid = np.logspace(-6.0, 6.0, 1_500)
    mismatch_m = mismatch_o = 0
    from .coords import Shape

    for _ in range(samples):
        while True:
            w1, w2 = rng.uniform(-0.98, 0.98, 2)
            if math.hypot(w1, w2) < 0.98:
                break
        shape = Shape(w1, w2)
        # membership against the dilation-grid inequality
        jh = rng.normal(0.0, 1.0, 3)
        jh /= np.linalg.norm(jh)
        E = float(rng.uniform(-3.0, 1.0))
        r = float(rng.uniform(0.2, 2.0))
        got = membership(system, E, r, shape, jh).member
        want = _lambda_grid_member(system, shape, jh, E, r, lam_grid)
        mismatch_m += got != want
        # orientation class against the sphere-sampling census
        nu = float(rng.uniform(-0.5, 3.0)) * max(1.0, abs(shape_eval(system, shape).v_tilde))
        got_c = int(orientation_class(system, nu, shape))
        want_c = _orientation_oracle(system, nu, shape, grid)
        if _near_threshold(system, shape, nu):
            continue
        mismatch_o += got_c != want_c
    report.add("hill.membership_oracle", float(mismatch_m), 0.0, f"{samples} samples")
    report.add("hill.orientation_oracle", float(mismatch_o), 0.0, f"{samples} samples")


def _empty_full_counts(system: BodySystem, nu: float, n: int = 400) -> tuple[int, int]:
    from scipy import ndimage

    from .scan import CellClass, scan_disk

    cells = scan_disk(system, nu, n).cells
    _, ne = ndimage.label(cells == CellClass.EMPTY)
    _, nf = ndimage.label(cells == CellClass.FULL)
    return int(ne), int(nf)


def _census_event_checks(report: VerificationReport, system: BodySystem) -> None:
    """Raster-visible bifurcation events at the interior critical values.

    The forbidden region vanishes at the Lagrange value; the fully-accessible
    region is born at the diabolic value (when isolated in the catalog) or at
    the Langmuir value when that lies above it.
    """
    catalog = critical_catalog(system)
    nus = [cv.nu for cv in catalog]

    def gaps_at(nu0: float) -> tuple[float, float]:
        i = min(range(len(nus)), key=lambda k: abs(nus[k] - nu0))
        lo = nus[i] - nus[i - 1] if i > 0 else nus[i]
        hi = nus[i + 1] - nus[i] if i + 1 < len(nus) else lo
        return lo, hi

    for cv in catalog:
        if cv.family == "lagrange":
            lo, hi = gaps_at(cv.nu)
            below = _empty_full_counts(system, cv.nu - 0.01 * lo)[0]
            above = _empty_full_counts(system, cv.nu + 0.01 * hi)[0]
            report.add_flag(
                "scan.lagrange_event",
                below == 0 and above >= 1,
                f"Empty components {below}->{above} across nu_Lagrange",
            )
        if cv.family == "diabolic" and cv.multiplicity == 1:
            lo, hi = gaps_at(cv.nu)
            if min(lo, hi) < 1e-3 * cv.nu:
                continue  # too close to a neighbour to separate at N = 400
            below = _empty_full_counts(system, cv.nu - 0.01 * lo)[1]
            above = _empty_full_counts(system, cv.nu + 0.01 * hi)[1]
            report.add_flag(
                "scan.diabolic_event",
                below == 1 and above == 0,
                f"Full components {below}->{above} across nu_diabolic",
            )
        if cv.family == "langmuir":
            lo, hi = gaps_at(cv.nu)
            if cv.axis == 1 and cv.nu > nu_diabolic(system).nu:
                # axis-1 equilibrium above the diabolic value: this is where
                # the fully-accessible region is born (the green dot)
                below = _empty_full_counts(system, cv.nu - 0.01 * lo)[1]
                above = _empty_full_counts(system, cv.nu + 0.01 * hi)[1]
                report.add_flag(
                    "scan.langmuir_event",
                    below == 1 and above == 0,
                    f"Full components {below}->{above} across nu_Langmuir",
                )
            else:
                ok = _census_sig(system, cv.nu - 0.01 * lo) != _census_sig(
                    system, cv.nu + 0.01 * hi
                )
                report.add_flag("scan.langmuir_event", ok, "census changes across nu_Langmuir")


def _census_sig(system: BodySystem, nu: float):
    from .scan import component_census, scan_disk

    return component_census(scan_disk(system, nu, 400)).signature()


def _near_threshold(system: BodySystem, shape, nu: float, margin: float = 1e-6) -> bool:
    ev = shape_eval(system, shape)
    if ev.v_tilde >= 0.0:
        return abs(nu) < margin
    v2 = ev.v_tilde**2
    for mk in ev.m_tilde:
        if abs(nu - 0.5 * mk * v2) < margin * max(1.0, v2):
            return True
    return abs(nu) < margin


def _lambda_grid_member(system, shape, j_hat, E, r, lam_grid) -> bool:
    """Hill inequality scanned over dilations, from positions and eigvalsh.

    Rebuilds the inertia tensor of every scaled configuration from body
    positions; independent of the closed-form moments and of f_analysis.
    """
    j = shape.to_jacobi()
    pos1 = positions_from_jacobi(system, j)
    masses = np.asarray(system.masses)
    pos = lam_grid[:, None, None] * pos1[None, :, :]  # (L, body, xyz)
    a1, a2, a3 = system.alphas
    d12 = np.linalg.norm(pos[:, 0] - pos[:, 1], axis=-1)
    d13 = np.linalg.norm(pos[:, 0] - pos[:, 2], axis=-1)
    d23 = np.linalg.norm(pos[:, 1] - pos[:, 2], axis=-1)
    V = -(a3 / d12 + a2 / d13 + a1 / d23)
    sq = np.einsum("lbx,lbx->lb", pos, pos)
    M = np.einsum("b,lb,xy->lxy", masses, sq, np.eye(3)) - np.einsum(
        "b,lbx,lby->lxy", masses, pos, pos
    )
    mom = np.linalg.eigvalsh(M)  # (L, 3) ascending
    er = 0.5 * r * r * (
        j_hat[0] ** 2 / mom[:, 0] + j_hat[1] ** 2 / mom[:, 1] + j_hat[2] ** 2 / mom[:, 2]
    )
    return bool(np.min(er + V) <= E)


def verify_all(system: BodySystem, deep: bool = True) -> VerificationReport:
    """Run the full verification battery for a system.

    Reference-catalog regression applies when the system matches a preset;
    everything else (cross-validation of closed forms against the generic
    search, relative-equilibrium dynamics, invariant and oracle suites) runs
    for any system.  ``deep=False`` shrinks the randomized sample counts.
    """
    report = VerificationReport()
    catalog = critical_catalog(system)

    name = _preset_name(system)
    if name is not None:
        refs = CATALOG_REFERENCES[name]
        if len(catalog) == len(refs):
            worst = 0.0
            ok = True
            for cv, (ref, fam, tol) in zip(catalog, refs):
                err = abs(cv.nu - ref) / max(abs(ref), 1e-30) if ref else abs(cv.nu)
                ok &= err <= tol and cv.family == fam
                worst = max(worst, err)
            report.add_flag(
                "catalog.reference", ok, f"{len(refs)} values, worst rel err {worst:.3g}"
            )
        else:
            report.add_flag(
                "catalog.reference", False, f"expected {len(refs)} entries, got {len(catalog)}"
            )

    _collision_angle_check(report, system)

    # Closed-form families against the generic critical-shape search.
    try:
        lag = nu_lagrange(system)
        hits = find_critical_shapes(system, 3)
        err = min(
            (abs(nu - lag.nu) / lag.nu for _, nu in hits), default=math.inf
        )
        report.add("lagrange.search_crosscheck", err, 1e-6, f"{len(hits)} critical shapes")
        _relequil_checks(report, system, lag)
    except UnsupportedFamilyError:
        pass
    try:
        lng = nu_langmuir(system)
        report.add("langmuir.force_balance", _langmuir_force_residual(system), 1e-12)
        hits = find_critical_shapes(system, lng.axis)
        err = min(
            (abs(nu - lng.nu) / lng.nu for _, nu in hits), default=math.inf
        )
        report.add("langmuir.search_crosscheck", err, 1e-6, f"{len(hits)} critical shapes")
        _relequil_checks(report, system, lng)
    except UnsupportedFamilyError:
        pass

    # nu = (1/2) Mt_k Vt^2 for every stored interior shape.
    worst = 0.0
    for cv in catalog:
        if cv.w is None or cv.axis is None:
            continue
        if cv.w[0] ** 2 + cv.w[1] ** 2 >= 1.0:
            continue
        ev = shape_eval(system, cv.shape())
        worst = max(worst, abs(0.5 * ev.m_tilde[cv.axis - 1] * ev.v_tilde**2 - cv.nu) / cv.nu)
    report.add("catalog.nu_identity", worst, 1e-9, "nu = Mt_k Vt^2 / 2")

    _census_event_checks(report, system)
    _roundtrip_suite(report, 10_000 if deep else 1_000)
    _inertia_suite(report, 2_000 if deep else 200)
    _eom_fd_suite(report, system, 300 if deep else 50)
    _oracle_suites(report, system, 150 if deep else 30)
    return report
