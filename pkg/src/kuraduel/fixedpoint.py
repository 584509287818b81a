"""Centroid-angle steady states, their time dependence and stability.

Two-cluster ansatz (Blue and Red each internally locked). With
delta = mean(omega) - mean(nu) the centroid lead alpha = B - P obeys, to
leading order,

    dalpha/dt = delta + S cos(alpha) - C sin(alpha)

and K = C^2 + S^2 - delta^2 decides between a plateau (K > 0) and winding.

Three-cluster ansatz (Red split into R1, linked to Blue, and R2): the two
independent angles alpha_BR1 = B - P1 and alpha_R1R2 = P1 - P2 obey a pair of
reduced equations whose steady states are governed by J = C1^2 + S1^2 - chi1^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import wrap_angle
from .eigen import default_zero_tol
from .errors import (
    BracketError,
    DegenerateCouplingError,
    DegenerateParameterizationError,
    InfeasibleError,
    NoInteractionError,
)
from .graph import cross_degrees
from .linearized import build_frag_super_laplacian, build_super_laplacian, lambda1

ROOT_TOL = 1e-8


# ---------------------------------------------------------------------------
# two clusters


@dataclass(frozen=True)
class TwoClusterCoefficients:
    c: float
    s: float
    delta: float
    k: float

    @property
    def r2(self):
        return self.c * self.c + self.s * self.s

    def rate(self, alpha):
        """Right-hand side of the leading-order centroid equation."""
        return self.delta + self.s * math.cos(alpha) - self.c * math.sin(alpha)

    def slope(self, alpha):
        return -self.s * math.sin(alpha) - self.c * math.cos(alpha)


def two_cluster_coeffs(cfg):
    _, _, d_br = cross_degrees(cfg.cross)
    d_rb = int(cfg.cross.a_rb.sum())
    n, m = cfg.n_blue, cfg.n_red
    gb = d_br * cfg.zeta_br / n
    gr = d_rb * cfg.zeta_rb / m
    c = gb * math.cos(cfg.phi) + gr * math.cos(cfg.psi)
    s = gb * math.sin(cfg.phi) - gr * math.sin(cfg.psi)
    delta = cfg.mean_omega - cfg.mean_nu
    return TwoClusterCoefficients(c, s, delta, c * c + s * s - delta * delta)


@dataclass(frozen=True)
class SteadyRoot:
    alpha: float
    branch: int  # +1 / -1: sign in front of the square root
    residual: float
    slope: float

    @property
    def stable(self):
        return self.slope < 0.0


@dataclass(frozen=True)
class SteadyAngles:
    sin_roots: tuple  # (plus, minus); complex when K < 0
    complex_roots: bool
    roots: tuple  # validated SteadyRoot solutions, may be empty

    @property
    def stable(self):
        st = [r for r in self.roots if r.stable]
        return st[0] if st else None

    @property
    def unstable(self):
        un = [r for r in self.roots if not r.stable]
        return un[0] if un else None


def _polish(f, df, x, scale):
    # one or two Newton steps; skipped at (near) double roots
    for _ in range(2):
        d = df(x)
        if abs(d) <= 1e-6 * scale:
            break
        x = x - f(x) / d
    return x


def _arcsin_candidates(x):
    x = min(1.0, max(-1.0, x))
    a = math.asin(x)
    return [float(wrap_angle(a)), float(wrap_angle(math.pi - a))]


def alpha_steady(coeffs):
    """Both roots of the steady-state condition, solved for sin(alpha).

    Each real root yields the arcsin branches alpha and pi - alpha; only those
    satisfying the steady-state equation itself are kept.
    """
    c, s, delta, k = coeffs.c, coeffs.s, coeffs.delta, coeffs.k
    r2 = coeffs.r2
    if r2 == 0.0:
        raise NoInteractionError("C = S = 0: the steady angle is undetermined")
    sq = complex(k) ** 0.5 if k < 0 else math.sqrt(k)
    plus = (delta * c + s * sq) / r2
    minus = (delta * c - s * sq) / r2
    if k < 0:
        return SteadyAngles((plus, minus), True, ())
    scale = max(1.0, abs(delta), math.sqrt(r2))
    roots = []
    for branch, x in ((1, plus), (-1, minus)):
        if abs(x) > 1.0 + 1e-12:
            continue
        for cand in _arcsin_candidates(x):
            if abs(coeffs.rate(cand)) > ROOT_TOL * scale:
                continue
            a = float(wrap_angle(_polish(coeffs.rate, coeffs.slope, cand, math.sqrt(r2))))
            if any(abs(wrap_angle(a - r.alpha)) < 1e-9 for r in roots):
                continue
            roots.append(SteadyRoot(a, branch, coeffs.rate(a), coeffs.slope(a)))
    return SteadyAngles((plus, minus), False, tuple(roots))


@dataclass(frozen=True)
class AlphaTimeSolution:
    """Closed-form alpha(t) of the leading-order centroid equation.

    With u = tan(alpha/2) the equation is a Riccati equation,
    2 u' = A u^2 - 2 C u + (delta + S), A = delta - S, solved by
    u = (C - sqrt(K) tanh(sqrt(K) (t + c0) / 2)) / A (or its coth twin when
    the start lies outside the tanh range). For K < 0 the tanh turns into a
    tangent and alpha winds with period 2 pi / sqrt(-K).
    """

    coeffs: TwoClusterCoefficients
    alpha0: float
    form: str  # "tanh", "coth", "tan", "rational", "fixed"
    const: float

    @property
    def period(self):
        if self.coeffs.k < 0:
            return 2.0 * math.pi / math.sqrt(-self.coeffs.k)
        return math.inf

    @property
    def plateau(self):
        """Large-t limit for K > 0 (the attracting root)."""
        c = self.coeffs
        if c.k <= 0 and self.form != "fixed":
            return None
        if self.form == "fixed":
            return float(wrap_angle(self.alpha0))
        a = c.delta - c.s
        return float(wrap_angle(2.0 * math.atan((c.c - math.sqrt(c.k)) / a)))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        c = self.coeffs
        a = c.delta - c.s
        if self.form == "fixed":
            return np.full_like(t, wrap_angle(self.alpha0))
        if self.form == "rational":
            u = c.c / a - 2.0 / (a * (t + self.const))
        elif self.form == "tan":
            q = math.sqrt(-c.k)
            u = (c.c + q * np.tan(0.5 * q * (t + self.const))) / a
        else:
            rk = math.sqrt(c.k)
            x = 0.5 * rk * (t + self.const)
            with np.errstate(divide="ignore"):  # coth(0) = inf maps to alpha = pi
                h = np.tanh(x) if self.form == "tanh" else 1.0 / np.tanh(x)
            u = (c.c - rk * h) / a
        return wrap_angle(2.0 * np.arctan(u))


def alpha_of_t(coeffs, alpha0):
    """Fix the integration constant from alpha(0) = alpha0."""
    c = coeffs
    a = c.delta - c.s
    if abs(a) <= 1e-14 * max(1.0, abs(c.delta), abs(c.s)):
        raise DegenerateParameterizationError(
            "delta - S = 0: closed form undefined, integrate the ODE (alpha_ode_oracle)"
        )
    half = 0.5 * float(wrap_angle(alpha0))
    # u0 = tan(alpha0/2); alpha0 = pi corresponds to u0 = inf
    u0 = math.inf if abs(abs(half) - 0.5 * math.pi) < 1e-15 else math.tan(half)
    if c.k > 0:
        rk = math.sqrt(c.k)
        z = math.copysign(math.inf, a) if math.isinf(u0) else (c.c - a * u0) / rk
        if abs(z) < 1.0:
            return AlphaTimeSolution(c, alpha0, "tanh", 2.0 * math.atanh(z) / rk)
        if abs(z) > 1.0:
            return AlphaTimeSolution(c, alpha0, "coth", 2.0 * math.atanh(1.0 / z) / rk)
        return AlphaTimeSolution(c, alpha0, "fixed", 0.0)
    if c.k < 0:
        q = math.sqrt(-c.k)
        x0 = 0.5 * math.pi if math.isinf(u0) else math.atan((a * u0 - c.c) / q)
        return AlphaTimeSolution(c, alpha0, "tan", 2.0 * x0 / q)
    w0 = math.inf if math.isinf(u0) else u0 - c.c / a
    if w0 == 0.0:
        return AlphaTimeSolution(c, alpha0, "fixed", 0.0)
    const = 0.0 if math.isinf(w0) else -2.0 / (a * w0)
    return AlphaTimeSolution(c, alpha0, "rational", const)


def rk4_scalar_system(f, y0, t_end, dt, sample_every=1):
    """Plain RK4 for small systems given as ``f(y) -> list``; returns (t, Y)."""
    n_steps = max(1, int(round(t_end / dt)))
    y = [float(v) for v in y0]
    dim = len(y)
    ts = [0.0]
    ys = [list(y)]
    h2, h6 = 0.5 * dt, dt / 6.0
    for step in range(1, n_steps + 1):
        k1 = f(y)
        k2 = f([y[i] + h2 * k1[i] for i in range(dim)])
        k3 = f([y[i] + h2 * k2[i] for i in range(dim)])
        k4 = f([y[i] + dt * k3[i] for i in range(dim)])
        y = [y[i] + h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) for i in range(dim)]
        if step % sample_every == 0:
            ts.append(step * dt)
            ys.append(list(y))
    return np.array(ts), np.array(ys)


def alpha_ode_oracle(coeffs, alpha0, t_end, dt=0.01, sample_every=1):
    """RK4 on the scalar centroid equation; alpha returned unwrapped."""
    c = coeffs
    cs, cc, d = c.s, c.c, c.delta

    def f(y):
        return [d + cs * math.cos(y[0]) - cc * math.sin(y[0])]

    t, y = rk4_scalar_system(f, [alpha0], t_end, dt, sample_every)
    return t, y[:, 0]


def taylor_stability_two(cfg, alpha):
    return (math.cos(cfg.phi - alpha) >= 0.0, math.cos(cfg.psi + alpha) >= 0.0)


def critical_phi(cfg, psi_fixed=None, bracket=(0.0, math.pi), tol=1e-6):
    """Frustration phi* at which K changes sign (bisection)."""
    if psi_fixed is not None:
        cfg = cfg.replace(psi=psi_fixed)

    def k_of(phi):
        return two_cluster_coeffs(cfg.replace(phi=phi)).k

    lo, hi = float(bracket[0]), float(bracket[1])
    klo, khi = k_of(lo), k_of(hi)
    # endpoint values within roundoff of zero carry no sign information
    ends = [two_cluster_coeffs(cfg.replace(phi=x)) for x in (lo, hi)]
    floor = 1e-12 * max(co.c**2 + co.s**2 + co.delta**2 for co in ends)
    klo = 0.0 if abs(klo) <= floor else klo
    khi = 0.0 if abs(khi) <= floor else khi
    if klo == 0.0:
        return lo
    if khi == 0.0 and klo * khi >= 0:
        raise BracketError("K has no sign change inside the bracket (it only touches zero)")
    if klo * khi > 0 or khi == 0.0:
        raise BracketError(f"K does not change sign on [{lo}, {hi}] (K={klo:.3g}, {khi:.3g})")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        km = k_of(mid)
        if km == 0.0:
            return mid
        if (km > 0) == (klo > 0):
            lo, klo = mid, km
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ScanRow:
    phi: float
    alpha_stable: float
    alpha_unstable: float
    k: float
    lambda1_at_stable: float
    disagreement: bool = False


@dataclass(frozen=True)
class OptimizeResult:
    phi_opt: float
    alpha_opt: float
    rows: tuple
    interior: bool  # alpha rises then turns: the optimum is not a grid end


def classify_roots(cfg, steady, backend=None):
    """Pick the stable root: scalar-equation slope, confirmed by lambda_1.

    Returns (stable root or None, unstable root or None, lambda_1 at stable,
    disagreement flag).
    """
    lam_of = {}
    for r in steady.roots:
        m = build_super_laplacian(cfg, r.alpha).m
        lam_of[r] = float(lambda1(m, backend=backend).real)
    tol = 1e-9
    spectral = [r for r in steady.roots if lam_of[r] >= -tol]
    scalar = [r for r in steady.roots if r.stable]
    disagree = set(spectral) != set(scalar)
    pick = [r for r in spectral if r.stable] or spectral
    stable = pick[0] if pick else None
    others = [r for r in steady.roots if r is not stable]
    unstable = others[0] if others else None
    lam = lam_of[stable] if stable is not None else math.nan
    return stable, unstable, lam, disagree


def optimize_phi(cfg, psi_fixed=None, grid=None, backend=None):
    """Blue's best frustration: maximise the stable steady alpha over a phi grid."""
    if psi_fixed is not None:
        cfg = cfg.replace(psi=psi_fixed)
    if grid is None:
        grid = np.linspace(0.0, math.pi, 1001)
    rows = []
    for phi in grid:
        c = cfg.replace(phi=float(phi))
        coeffs = two_cluster_coeffs(c)
        try:
            steady = alpha_steady(coeffs)
        except NoInteractionError:
            rows.append(ScanRow(float(phi), math.nan, math.nan, coeffs.k, math.nan))
            continue
        stable, unstable, lam, disagree = classify_roots(c, steady, backend=backend)
        rows.append(
            ScanRow(
                float(phi),
                stable.alpha if stable else math.nan,
                unstable.alpha if unstable else math.nan,
                coeffs.k,
                lam,
                disagree,
            )
        )
    alphas = np.array([r.alpha_stable for r in rows])
    if not np.isfinite(alphas).any():
        raise InfeasibleError("no stable real steady state on the phi grid")
    i = int(np.nanargmax(alphas))
    feasible = np.flatnonzero(np.isfinite(alphas))
    interior = feasible[0] < i < feasible[-1]
    return OptimizeResult(rows[i].phi, rows[i].alpha_stable, tuple(rows), bool(interior))


def scan_csv(rows, header_comment=None):
    lines = [f"# {header_comment}"] if header_comment else []
    lines.append("phi,alpha_stable,alpha_unstable,K,lambda1_at_stable")
    for r in rows:
        lines.append(
            f"{r.phi!r},{r.alpha_stable!r},{r.alpha_unstable!r},{r.k!r},{r.lambda1_at_stable!r}"
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# three clusters


@dataclass(frozen=True)
class ThreeClusterCoefficients:
    chi1: float
    chi2: float
    c1: float
    s1: float
    c2: float
    s2: float
    j: float


def _frag_rates(cfg, partition):
    """Prefactors of the reduced two-angle equations."""
    n, m1, m2 = cfg.n_blue, partition.m1, partition.m2
    nu = np.asarray(cfg.nu)
    return dict(
        d1=cfg.mean_omega - float(nu[list(partition.r1)].mean()),
        d12=float(nu[list(partition.r1)].mean() - nu[list(partition.r2)].mean()),
        b=cfg.zeta_br * partition.d_br1 / n,
        b2=cfg.zeta_br * partition.d_br2 / n,
        a=cfg.zeta_rb * partition.d_r1b / m1,
        a2=cfg.zeta_rb * partition.d_r2b / m2,
        c=cfg.sigma_r * partition.d_r1r2 / m1,
        e=cfg.sigma_r * partition.d_r1r2 * (1.0 / m1 + 1.0 / m2),
    )


def three_cluster_coeffs(cfg, partition):
    if partition.d_br2 != 0 or partition.d_r2b != 0:
        raise ValueError("closed form needs R2 free of cross links (d_T^(BR2) = d_T^(R2B) = 0)")
    n, m, m1, m2 = cfg.n_blue, partition.m, partition.m1, partition.m2
    sd = cfg.sigma_r * partition.d_r1r2
    if sd == 0.0:
        raise DegenerateCouplingError("sigma_R * d_T^(R1R2) = 0")
    nu = np.asarray(cfg.nu)
    wbar = cfg.mean_omega
    nu1 = float(nu[list(partition.r1)].mean())
    nu2 = float(nu[list(partition.r2)].mean())
    zb = cfg.zeta_br * partition.d_br1
    zr = cfg.zeta_rb * partition.d_r1b
    cphi, sphi = math.cos(cfg.phi), math.sin(cfg.phi)
    cpsi, spsi = math.cos(cfg.psi), math.sin(cfg.psi)
    chi1 = wbar - nu2 + m1 / m2 * (wbar - nu1)
    chi2 = m1 / sd * (nu1 - wbar)
    c1 = m * zb * cphi / (m2 * n) + zr * cpsi / m2
    s1 = m * zb * sphi / (m2 * n) - zr * spsi / m2
    c2 = m1 * zb * cphi / (n * sd) + zr * cpsi / sd
    s2 = m1 * zb * sphi / (n * sd) - zr * spsi / sd
    return ThreeClusterCoefficients(chi1, chi2, c1, s1, c2, s2, c1 * c1 + s1 * s1 - chi1 * chi1)


@dataclass(frozen=True)
class FragAngles:
    sin_br1: tuple  # (plus, minus)
    sin_r1r2: tuple  # paired with sin_br1
    cos_br1: tuple
    j: float
    complex_roots: bool
    exists: tuple  # per branch: real and |sin alpha_R1R2| <= 1


def frag_angles(co):
    r2 = co.c1 * co.c1 + co.s1 * co.s1
    if r2 == 0.0:
        raise NoInteractionError("C1 = S1 = 0: alpha_BR1 undetermined")
    sq = complex(co.j) ** 0.5 if co.j < 0 else math.sqrt(co.j)
    sin_br1, cos_br1, sin_r1r2, exists = [], [], [], []
    base = co.chi2 + co.chi1 * (co.c1 * co.c2 + co.s1 * co.s2) / r2
    for sgn in (1, -1):
        sin_br1.append((co.chi1 * co.c1 + sgn * co.s1 * sq) / r2)
        cos_br1.append((-co.chi1 * co.s1 + sgn * co.c1 * sq) / r2)
        y = base + sgn * (co.s1 * co.c2 - co.c1 * co.s2) * sq / r2
        sin_r1r2.append(y)
        exists.append(co.j >= 0 and abs(y) <= 1.0)
    return FragAngles(
        tuple(sin_br1), tuple(sin_r1r2), tuple(cos_br1), co.j, co.j < 0, tuple(exists)
    )


def frag_rhs(cfg, partition):
    """Reduced equations for (alpha_BR1, alpha_R1R2), five-term form."""
    p = _frag_rates(cfg, partition)
    phi, psi = cfg.phi, cfg.psi

    def f(y):
        x, z = y[0], y[1]
        return [
            p["d1"]
            - p["b"] * math.sin(x - phi)
            - p["b2"] * math.sin(x + z - phi)
            - p["a"] * math.sin(x + psi)
            + p["c"] * math.sin(z),
            p["d12"]
            + p["a"] * math.sin(x + psi)
            - p["a2"] * math.sin(x + z + psi)
            - p["e"] * math.sin(z),
        ]

    return f


def frag_jacobian(cfg, partition, x, z):
    p = _frag_rates(cfg, partition)
    phi, psi = cfg.phi, cfg.psi
    return np.array(
        [
            [
                -p["b"] * math.cos(x - phi) - p["b2"] * math.cos(x + z - phi) - p["a"] * math.cos(x + psi),
                -p["b2"] * math.cos(x + z - phi) + p["c"] * math.cos(z),
            ],
            [
                p["a"] * math.cos(x + psi) - p["a2"] * math.cos(x + z + psi),
                -p["a2"] * math.cos(x + z + psi) - p["e"] * math.cos(z),
            ],
        ]
    )


@dataclass(frozen=True)
class FragSteadyState:
    a_br1: float
    a_r1r2: float
    branch: int
    residual: float
    stable: bool


def frag_steady_states(cfg, partition, coeffs=None):
    """All real (alpha_BR1, alpha_R1R2) steady states from the closed form."""
    co = coeffs or three_cluster_coeffs(cfg, partition)
    fa = frag_angles(co)
    if fa.complex_roots:
        return []
    f = frag_rhs(cfg, partition)
    out = []
    for i, branch in enumerate((1, -1)):
        y = fa.sin_r1r2[i]
        if abs(y) > 1.0 + 1e-12:
            continue
        x = math.atan2(fa.sin_br1[i], fa.cos_br1[i])
        for z in _arcsin_candidates(y):
            res = max(abs(v) for v in f([x, z]))
            jac = frag_jacobian(cfg, partition, x, z)
            stable = bool(np.trace(jac) < 0 and np.linalg.det(jac) > 0)
            out.append(FragSteadyState(float(x), z, branch, res, stable))
    return out


def stable_frag_state(cfg, partition):
    for st in frag_steady_states(cfg, partition):
        if st.stable:
            return st
    return None


def taylor_stability_three(cfg, partition, a_br1, a_r1r2):
    """The three quadratic-form conditions, with alpha_BR2 = alpha_BR1 + alpha_R1R2.

    The third inequality is evaluated multiplied through by zeta_RB d_T^(R1B)
    so that a vanishing denominator is handled.
    """
    first = math.cos(cfg.phi - a_br1) >= 0.0
    second = math.cos(a_r1r2) >= 0.0
    lhs = cfg.zeta_rb * partition.d_r1b * math.cos(cfg.psi + a_br1 + a_r1r2)
    rhs = -cfg.sigma_r * partition.d_r1r2 * math.cos(a_r1r2)
    return first, second, lhs >= rhs


def frag_centroid_ode_oracle(cfg, partition, initial, t_end, dt=0.01, sample_every=1):
    """RK4 on the reduced two-angle system; returns (t, alpha_BR1, alpha_R1R2)."""
    t, y = rk4_scalar_system(frag_rhs(cfg, partition), initial, t_end, dt, sample_every)
    return t, y[:, 0], y[:, 1]


def _with_zeta(cfg, zeta):
    return cfg.replace(zeta_br=zeta, zeta_rb=zeta)


def critical_zeta(cfg, partition, bracket, tol=1e-6):
    """Cross coupling (zeta_BR = zeta_RB) where |sin alpha_R1R2| reaches 1.

    The +/- branch is the one that is real, residual-valid and stable at the
    lower end of the bracket; it is then followed across the threshold.
    """
    lo, hi = map(float, bracket)
    st = stable_frag_state(_with_zeta(cfg, lo), partition)
    if st is None:
        raise BracketError(f"no stable three-cluster state at zeta={lo}")
    idx = 0 if st.branch == 1 else 1

    def g(z):
        fa = frag_angles(three_cluster_coeffs(_with_zeta(cfg, z), partition))
        y = fa.sin_r1r2[idx]
        if isinstance(y, complex):
            return math.inf
        return abs(y) - 1.0

    glo, ghi = g(lo), g(hi)
    if not (glo < 0 < ghi):
        raise BracketError(f"|sin alpha_R1R2| - 1 does not cross zero on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def frag_lambda1(cfg, partition, a_br1, a_r1r2, backend=None):
    m = build_frag_super_laplacian(cfg, partition, a_br1, a_r1r2).m
    return lambda1(m, n_zero=1, zero_tol=default_zero_tol(m), backend=backend)


# ---------------------------------------------------------------------------
# report


@dataclass(frozen=True)
class FixedPointReport:
    ansatz: str  # "two-cluster" | "three-cluster"
    discriminant: float  # K or J
    candidates: tuple  # angles (alpha,) or (alpha_BR1, alpha_R1R2)
    complex_roots: bool
    exists: bool
    spectral_stable: tuple
    taylor: tuple
    lambda1: tuple = field(default=())


def fixed_point_report(cfg, partition=None, backend=None):
    if partition is None:
        co = two_cluster_coeffs(cfg)
        steady = alpha_steady(co)
        cands, spec, tay, lams = [], [], [], []
        for r in steady.roots:
            lam = lambda1(build_super_laplacian(cfg, r.alpha).m, backend=backend)
            cands.append((r.alpha,))
            lams.append(lam)
            spec.append(bool(lam.real >= -1e-9))
            tay.append(taylor_stability_two(cfg, r.alpha))
        return FixedPointReport(
            "two-cluster", co.k, tuple(cands), steady.complex_roots, bool(cands),
            tuple(spec), tuple(tay), tuple(lams),
        )
    co = three_cluster_coeffs(cfg, partition)
    fa = frag_angles(co)
    cands, spec, tay, lams = [], [], [], []
    for st in frag_steady_states(cfg, partition, co):
        lam = frag_lambda1(cfg, partition, st.a_br1, st.a_r1r2, backend=backend)
        cands.append((st.a_br1, st.a_r1r2))
        lams.append(lam)
        spec.append(bool(lam.real >= -1e-9))
        tay.append(taylor_stability_three(cfg, partition, st.a_br1, st.a_r1r2))
    return FixedPointReport(
        "three-cluster", co.j, tuple(cands), fa.complex_roots, any(fa.exists),
        tuple(spec), tuple(tay), tuple(lams),
    )
