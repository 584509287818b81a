import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kuraduel.dynamics import (
    PhaseState,
    integrate,
    order_of_convergence_probe,
    random_state,
    rhs,
    uniform_frequencies,
    wrap_angle,
    zero_state,
)
from kuraduel.errors import DimensionError, DivergenceError

from conftest import canonical, pair_model


def brute_rhs(cfg, s):
    """Direct double loop over the model equations."""
    n, m = cfg.n_blue, cfg.n_red
    b, r = s.beta, s.rho
    B, R = cfg.blue.adjacency, cfg.red.adjacency
    out = np.empty(n + m)
    for i in range(n):
        v = cfg.omega[i]
        v += cfg.sigma_b * sum(B[i, j] * math.sin(b[j] - b[i]) for j in range(n))
        v += cfg.zeta_br * sum(cfg.cross.a_br[i, j] * math.sin(r[j] + cfg.phi - b[i]) for j in range(m))
        out[i] = v
    for i in range(m):
        v = cfg.nu[i]
        v += cfg.sigma_r * sum(R[i, j] * math.sin(r[j] - r[i]) for j in range(m))
        v += cfg.zeta_rb * sum(cfg.cross.a_rb[i, j] * math.sin(b[j] + cfg.psi - r[i]) for j in range(n))
        out[n + i] = v
    return out


class TestRhs:
    def test_matches_brute_force(self, backend):
        cfg = canonical(psi=0.3)
        s = random_state(cfg, 5)
        assert np.allclose(rhs(cfg, s, backend), brute_rhs(cfg, s), atol=1e-12)

    def test_uncoupled_returns_frequencies(self, backend):
        cfg = canonical(sigma_b=0.0, sigma_r=0.0, zeta_br=0.0, zeta_rb=0.0)
        v = rhs(cfg, random_state(cfg, 1), backend)
        assert np.array_equal(v, np.concatenate([cfg.omega, cfg.nu]))

    def test_pair_at_rest(self, backend):
        cfg = pair_model(omega=0.3, nu=0.7)
        assert np.allclose(rhs(cfg, PhaseState([0.0], [0.0]), backend), [0.3, 0.7])

    def test_pair_quarter_frustration(self, backend):
        cfg = pair_model(omega=0.3, nu=0.0, zeta_br=2.0, phi=math.pi / 2)
        assert rhs(cfg, PhaseState([0.0], [0.0]), backend)[0] == pytest.approx(2.3, abs=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            rhs(canonical(), PhaseState([0.0], [0.0]))

    @given(st.floats(-50, 50), st.integers(0, 1000))
    @settings(max_examples=25, deadline=None)
    def test_shift_equivariance(self, c, seed):
        cfg = canonical(psi=-0.4)
        s = random_state(cfg, seed)
        shifted = PhaseState(s.beta + c, s.rho + c)
        assert np.allclose(rhs(cfg, s), rhs(cfg, shifted), atol=1e-9)


class TestIntegrate:
    def test_uncoupled_linear_flow(self, backend):
        cfg = canonical(sigma_b=0.0, sigma_r=0.0, zeta_br=0.0, zeta_rb=0.0)
        s0 = random_state(cfg, 2)
        tr = integrate(cfg, s0, 10.0, 0.01, sample_every=100, backend=backend)
        expect = s0.y + np.outer(tr.times, np.concatenate([cfg.omega, cfg.nu]))
        assert np.max(np.abs(tr.phases - expect)) < 1e-10

    def test_pair_relaxation_matches_quadrature(self):
        # d(Delta)/dt = -2 sin(Delta) has tan(Delta/2) = tan(Delta0/2) exp(-2t)
        cfg = pair_model(omega=0.2, nu=0.2)
        d0 = 2.0
        tr = integrate(cfg, PhaseState([d0], [0.0]), 5.0, 0.01, sample_every=10)
        delta = tr.beta[:, 0] - tr.rho[:, 0]
        exact = 2 * np.arctan(math.tan(d0 / 2) * np.exp(-2 * tr.times))
        assert np.max(np.abs(delta - exact)) < 1e-6

    def test_step_halving_ratio_near_16(self):
        cfg = canonical()
        s0 = random_state(cfg, 4)
        y = [integrate(cfg, s0, 10.0, h, sample_every=int(round(10 / h))).final.y for h in (0.02, 0.01, 0.005)]
        ratio = np.max(np.abs(y[0] - y[1])) / np.max(np.abs(y[1] - y[2]))
        assert 16 / 1.5 < ratio < 16 * 1.5

    def test_sampling_and_metadata(self):
        cfg = canonical()
        tr = integrate(cfg, zero_state(cfg), 1.0, 0.01, sample_every=10)
        assert tr.times.shape == (11,) and tr.phases.shape == (11, 42)
        assert np.all(np.diff(tr.times) > 0)
        assert tr.rhs_evals == 400 and tr.method == "rk4"
        assert tr.final.t == pytest.approx(1.0)
        assert np.array_equal(tr.phases[-1], tr.final.y)

    def test_final_state_off_grid(self):
        cfg = canonical()
        tr = integrate(cfg, zero_state(cfg), 0.07, 0.01, sample_every=5)
        assert tr.final.t == pytest.approx(0.07) and tr.times[-1] == pytest.approx(0.05)

    def test_deterministic(self):
        cfg = canonical()
        a = integrate(cfg, random_state(cfg, 9), 5.0, 0.01)
        b = integrate(cfg, random_state(cfg, 9), 5.0, 0.01)
        assert np.array_equal(a.phases, b.phases)

    def test_divergence_error(self):
        cfg = pair_model(omega=1e308, nu=0.0)
        with pytest.raises(DivergenceError) as err:
            integrate(cfg, PhaseState([1e308], [0.0]), 1.0, 0.5)
        assert err.value.t >= 0

    @pytest.mark.parametrize("kw", [dict(dt=0.0), dict(t_end=0.0), dict(sample_every=0)])
    def test_bad_arguments(self, kw):
        cfg = canonical()
        args = dict(t_end=1.0, dt=0.01, sample_every=1) | kw
        with pytest.raises(ValueError):
            integrate(cfg, zero_state(cfg), **args)

    def test_zero_cross_coupling_decouples(self):
        cfg = canonical(zeta_br=0.0, zeta_rb=0.0)
        other = cfg.replace(nu=cfg.nu[::-1] + 0.3)
        a = integrate(cfg, zero_state(cfg), 20.0, 0.01, sample_every=50)
        b = integrate(other, zero_state(other), 20.0, 0.01, sample_every=50)
        assert np.array_equal(a.beta, b.beta)

    def test_conservation_symmetric_unfrustrated(self):
        cfg = canonical(phi=0.0, psi=0.0)
        s0 = random_state(cfg, 11)
        tr = integrate(cfg, s0, 100.0, 0.01, sample_every=100)
        total = tr.phases.sum(axis=1) - s0.y.sum()
        rate = cfg.omega.sum() + cfg.nu.sum()
        assert np.max(np.abs(total - rate * tr.times)) < 1e-8 * max(1.0, rate * 100)

    def test_csv_header(self):
        cfg = canonical()
        text = integrate(cfg, zero_state(cfg), 0.02, 0.01).to_csv("config_hash=x")
        lines = text.splitlines()
        assert lines[0] == "# config_hash=x"
        assert lines[1].split(",")[:2] == ["t", "beta_0"] and lines[1].endswith("rho_20")
        assert len(lines) == 5


class TestConvergenceProbe:
    def test_uncoupled_reports_exact(self):
        cfg = canonical(sigma_b=0.0, sigma_r=0.0, zeta_br=0.0, zeta_rb=0.0)
        probe = order_of_convergence_probe(cfg, zero_state(cfg), 5.0)
        assert probe.exact and str(probe) == "exact"

    def test_pair_locked_order_four(self):
        cfg = pair_model(omega=0.5, nu=0.2, zeta_br=1.0, zeta_rb=1.0)
        probe = order_of_convergence_probe(cfg, PhaseState([2.5], [0.0]), 2.0, dt=0.05)
        assert 3.5 <= probe.order <= 4.5

    def test_span_not_a_multiple_of_dt(self):
        # 5 / 0.015 is not an integer; all three runs must still end together
        cfg = canonical()
        probe = order_of_convergence_probe(cfg, random_state(cfg, 1), 5.0, dt=0.015)
        assert 3.5 <= probe.order <= 4.5
        assert probe.errors[0] < 1e-4


def test_wrap_angle_range():
    x = np.array([-math.pi, math.pi, 3 * math.pi, -3 * math.pi + 1e-9, 0.0, 7.0])
    w = wrap_angle(x)
    assert np.all(w > -math.pi) and np.all(w <= math.pi)
    assert np.allclose(np.exp(1j * w), np.exp(1j * x))


def test_frustration_is_wrapped():
    cfg = canonical(phi=3 * math.pi / 2)
    assert cfg.phi == pytest.approx(-math.pi / 2)


def test_uniform_frequencies_in_range():
    w, v = uniform_frequencies(21, 21, 703)
    assert w.shape == v.shape == (21,)
    assert 0 <= w.min() and w.max() <= 1 and 0 <= v.min() and v.max() <= 1
    # frozen realised means of the canonical draw
    assert w.mean() == pytest.approx(0.48772, abs=5e-6)
    assert v.mean() == pytest.approx(0.53581, abs=5e-6)


def test_model_rejects_bad_dimensions():
    cfg = canonical()
    with pytest.raises(DimensionError):
        cfg.replace(omega=np.zeros(3))
    with pytest.raises(ValueError):
        cfg.replace(sigma_b=float("nan"))
