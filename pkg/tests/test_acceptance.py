"""End-to-end acceptance checks, one test per criterion.

Each test prints (and records for the terminal summary) a single
``criterion N: PASS|FAIL ...`` line, then asserts on the same condition.
"""
import math
import time

import numpy as np
import pytest

from kuraduel import config, experiments as ex
from kuraduel.dynamics import integrate, random_state, zero_state, order_of_convergence_probe
from kuraduel.dynamics import wrap_angle
from kuraduel.eigen import eigs, eigvals
from kuraduel.fixedpoint import (
    TwoClusterCoefficients,
    alpha_steady,
    critical_phi,
    critical_zeta,
    frag_lambda1,
    optimize_phi,
    stable_frag_state,
    two_cluster_coeffs,
)
from kuraduel.linearized import build_super_laplacian, eigenvector_step_profile, lambda1, lowest_mode
from kuraduel.measures import centroids

from conftest import ACCEPTANCE_LINES, canonical, frag_canonical
from oracles import best_match_distance, companion_eigenvalues, two_cluster_alpha_symmetric

pytestmark = pytest.mark.slow

C0 = 16 * 0.4 / 21  # cross-degree total times coupling over population size


def record(label, ok, detail):
    line = f"criterion {label}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


def full_run():
    return ex.RunSettings(dt=0.01, t_end=2000.0, sample_every=10)


def sign_change_roots(f, lo, hi, n, tol=1e-9):
    """Bisect every sign change of f found on an n-point grid over [lo, hi]."""
    xs = np.linspace(lo, hi, n)
    vals = np.array([f(x) for x in xs])
    roots = []
    for i in np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:])):
        a, b, fa = xs[i], xs[i + 1], vals[i]
        while b - a > tol:
            m = 0.5 * (a + b)
            fm = f(m)
            if np.sign(fm) == np.sign(fa):
                a, fa = m, fm
            else:
                b = m
        roots.append(0.5 * (a + b))
    return roots


def test_criterion_1_free_decoupling():
    cfg = canonical(zeta_br=0.0, zeta_rb=0.0)
    t0 = time.perf_counter()
    traj = integrate(cfg, zero_state(cfg), 2000.0, 0.01, 10)
    cents = centroids(traj)
    slope = np.polyfit(traj.times, cents.alpha, 1)[0]
    elapsed = time.perf_counter() - t0
    delta = cfg.mean_omega - cfg.mean_nu
    err = abs(slope - delta)
    ok = err <= 1e-6 and elapsed < 5.0
    record(1, ok, f"|slope - delta| = {err:.2e} (tol 1e-6), runtime {elapsed:.2f} s (limit 5 s)")
    assert ok


def test_criterion_2_conservation():
    worst = 0.0
    for seed, (sb, sr, z) in enumerate([(8.0, 0.5, 0.4), (1.0, 3.0, 2.0), (0.2, 0.2, 5.0), (5.0, 5.0, 0.05)]):
        cfg = canonical(phi=0.0, psi=0.0, sigma_b=sb, sigma_r=sr, zeta_br=z, zeta_rb=z)
        assert np.array_equal(cfg.cross.a_rb, cfg.cross.a_br.T)
        traj = integrate(cfg, random_state(cfg, seed), 100.0, 0.01, 100)
        total = traj.phases.sum(axis=1)
        expected = float(np.sum(cfg.omega) + np.sum(cfg.nu))
        rate = (total[1:] - total[0]) / (traj.times[1:] - traj.times[0])
        worst = max(worst, float(np.max(np.abs(rate - expected))))
    ok = worst <= 1e-8
    record(2, ok, f"max |drift rate - (sum omega + sum nu)| over t in [0, 100] = {worst:.2e} (tol 1e-8)")
    assert ok


def test_criterion_3_integrator_order():
    cfg = canonical()
    probe = order_of_convergence_probe(cfg, random_state(cfg, 1), 20.0, dt=0.01)
    ok = not probe.exact and abs(probe.order - 4.0) <= 0.5
    record(3, ok, f"observed order log2(e(h)/e(h/2)) = {probe} (target 4.0 +/- 0.5), errors {probe.errors[0]:.2e}, {probe.errors[1]:.2e}")
    assert ok


def test_criterion_4_two_cluster_agreement():
    settings = full_run()
    rows, ok = [], True
    for frac in (0.2, 0.3, 0.8, 0.86):
        t0 = time.perf_counter()
        spot = ex.spot_check(canonical(phi=frac * math.pi), settings)
        elapsed = time.perf_counter() - t0
        diff = abs(float(wrap_angle(spot.alpha_numeric - spot.alpha_stable)))
        ok &= spot.locked and diff <= 0.02 and elapsed < 60.0
        rows.append(f"{frac}pi: {diff:.4f} rad/{elapsed:.1f} s")
    record(4, ok, "|alpha_numeric - alpha_stable| (tol 0.02), runtime (limit 60 s): " + "; ".join(rows))
    assert ok


def test_criterion_5_critical_frustration():
    cfg = canonical()
    phi_star = critical_phi(cfg)
    grid = np.arange(80, 101) * 0.01 * math.pi
    last_locked, first_unlocked = ex.lock_loss_phi(cfg, grid, full_run())
    numeric = 0.5 * (last_locked + first_unlocked)
    gap = abs(phi_star - numeric) / math.pi
    in_window = 0.93 <= phi_star / math.pi <= 0.96
    delta = cfg.mean_omega - cfg.mean_nu
    ok = gap <= 0.02 and in_window
    record(
        5,
        ok,
        f"phi* = {phi_star / math.pi:.4f}pi, lock lost between {last_locked / math.pi:.2f}pi and "
        f"{first_unlocked / math.pi:.2f}pi, gap {gap:.4f}pi (tol 0.02pi); delta = {delta:.4f}, "
        f"phi* in [0.93pi, 0.96pi]: {in_window}",
    )
    assert ok


def test_criterion_6_optimal_strategy():
    cfg = canonical()
    delta = cfg.mean_omega - cfg.mean_nu
    assert abs(abs(delta) - 0.05) < 0.005
    res = optimize_phi(cfg)
    # closed-form turning point: argmax of the stable root on a dense grid below the K = 0 root
    dense = np.linspace(0.0, critical_phi(cfg) - 1e-9, 200001)
    curve = np.array([two_cluster_alpha_symmetric(p, delta, C0) for p in dense])
    turning = dense[int(np.argmax(curve))]
    gap = abs(res.phi_opt - turning) / math.pi
    c, s = C0 * (1 + math.cos(0.82 * math.pi)), C0 * math.sin(0.82 * math.pi)
    k = TwoClusterCoefficients(c, s, -0.048, c * c + s * s - 0.048**2)
    sin_pkg = math.sin(alpha_steady(k).stable.alpha)
    sin_oracle = math.sin(two_cluster_alpha_symmetric(0.82 * math.pi, -0.048, C0))
    ok = gap <= 0.02 and abs(sin_oracle - 0.842) <= 0.002 and abs(sin_pkg - 0.842) <= 0.002
    record(
        6,
        ok,
        f"phi_opt = {res.phi_opt / math.pi:.4f}pi vs dense-grid turning point {turning / math.pi:.4f}pi "
        f"(gap {gap:.4f}pi, tol 0.02pi); delta=-0.048 at 0.82pi: sin alpha = {sin_pkg:.4f} "
        f"(oracle {sin_oracle:.4f}, target 0.842 +/- 0.002)",
    )
    assert ok


def test_criterion_7_spectral_coherence():
    # symmetric case: psi = -phi makes both cross-coupling weights cos(phi - alpha)
    phi = 0.2 * math.pi
    cfg = canonical(phi=phi, psi=-phi)

    def lam(a):
        return lambda1(build_super_laplacian(cfg, a).m).real

    roots = sign_change_roots(lam, -math.pi + 0.001, math.pi - 0.001, 733)
    boundary = [phi - math.pi / 2, phi + math.pi / 2]
    dist = max(min(abs(float(wrap_angle(r - b))) for r in roots) for b in boundary) if roots else math.inf
    steady = alpha_steady(two_cluster_coeffs(cfg))
    lam_s, lam_u = lam(steady.stable.alpha), lam(steady.unstable.alpha)
    ok = len(roots) == 2 and dist <= 0.01 and lam_s >= -1e-9 and lam_u < 0
    record(
        7,
        ok,
        f"lambda_1 zero crossings at {[round(float(r), 6) for r in roots]} vs phi -/+ pi/2 "
        f"(max distance {dist:.1e}, tol 0.01); lambda_1(stable) = {lam_s:.4f}, lambda_1(unstable) = {lam_u:.4f}",
    )
    assert ok


def test_criterion_8_eigenvector_step():
    cfg = canonical()
    alpha = alpha_steady(two_cluster_coeffs(cfg)).stable.alpha
    lam, vec = lowest_mode(cfg, alpha)
    prof = eigenvector_step_profile(vec, cfg.n_blue)
    record(
        8,
        prof.is_step,
        f"r=1 mode (lambda_1 = {lam.real:.4f}): between-population gap {prof.gap:.3f}, "
        f"within-population std {math.sqrt(max(prof.var_blue, prof.var_red)):.4f}",
    )
    assert prof.is_step


@pytest.fixture(scope="module")
def frag_setup():
    cfg = frag_canonical()
    part = config.red_partition(cfg)
    return cfg, part, critical_zeta(cfg, part, (0.5, 20.0))


def test_criterion_9a_fragmentation_angle(frag_setup):
    cfg, part, z_crit = frag_setup
    worst, ok = 0.0, True
    for z in np.linspace(0.5, 0.9 * z_crit, 6):
        p = ex.frag_point(cfg, part, float(z), full_run())
        diff = abs(float(wrap_angle(p.alpha_br1_numeric - p.alpha_br1_analytic)))
        worst = max(worst, diff)
        ok &= p.locked_br1
    ok &= worst <= 0.05
    record("9a", ok, f"max |alpha_BR1 numeric - analytic| for zeta in [0.5, {0.9 * z_crit:.3f}] = {worst:.4f} rad (tol 0.05)")
    assert ok


def test_criterion_9b_fragmentation_onset(frag_setup):
    cfg, part, z_crit = frag_setup
    settings = full_run()
    points = ex.frag_sweep(cfg, part, np.arange(5.0, 7.51, 0.25), settings)
    lost = ex.numeric_lock_loss_zeta(cfg, part, points, settings)
    gap = abs(z_crit - lost) if lost is not None else math.inf
    ok = gap <= 0.2
    record("9b", ok, f"analytic onset zeta = {z_crit:.4f}, numeric alpha_R1R2 lock loss = {lost}, gap {gap:.3f} (tol 0.2)")
    assert ok


def test_criterion_9c_fragmentation_spectrum(frag_setup):
    cfg0, part, z_crit = frag_setup
    worst = 0.0
    counts = []
    for z in (1.0, 3.0, 5.0):
        cfg = cfg0.replace(zeta_br=z, zeta_rb=z)
        st = stable_frag_state(cfg, part)
        roots = sign_change_roots(
            lambda y: frag_lambda1(cfg, part, st.a_br1, y).real, -math.pi + 0.001, math.pi - 0.001, 733
        )
        counts.append(len(roots))
        for b in (-math.pi / 2, math.pi / 2):
            worst = max(worst, min((abs(r - b) for r in roots), default=math.inf))
    ok = worst <= 0.01 and all(c == 2 for c in counts)
    record("9c", ok, f"lambda_1 of the three-cluster operator crosses zero within {worst:.1e} rad of +/- pi/2 (tol 0.01)")
    assert ok


def test_criterion_10_eigensolver():
    rng = np.random.default_rng(20161)
    worst = 0.0
    for _ in range(1000):
        a = rng.standard_normal((10, 10))
        spec = eigs(a)
        norm = np.linalg.norm(a, 2)
        for lam, v in zip(spec.eigenvalues, spec.eigenvectors.T):
            r = np.linalg.norm(a @ v - lam * v) / (np.linalg.norm(v) * norm)
            worst = max(worst, float(r))
    gap = 0.0
    for _ in range(100):
        a = rng.standard_normal((4, 4))
        gap = max(gap, best_match_distance(eigvals(a), companion_eigenvalues(a)))
    ok = worst <= 1e-8 and gap <= 1e-6
    record(10, ok, f"max relative residual on 1000 random 10x10 = {worst:.1e} (tol 1e-8); max distance to characteristic-polynomial roots on 100 random 4x4 = {gap:.1e} (tol 1e-6)")
    assert ok
