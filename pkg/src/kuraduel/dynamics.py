"""Full nonlinear Blue-vs-Red vector field and its fixed-step RK4 integration.

    dbeta_i/dt = omega_i + sigma_B sum_j B_ij sin(beta_j - beta_i)
                         + zeta_BR sum_j A^BR_ij sin(rho_j + phi - beta_i)
    drho_i/dt  = nu_i    + sigma_R sum_j R_ij sin(rho_j - rho_i)
                         + zeta_RB sum_j A^RB_ij sin(beta_j + psi - rho_i)

Phases are never reduced modulo 2*pi, so winding stays observable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from . import _backend
from .errors import DimensionError, DivergenceError
from .graph import CrossNetwork, Graph


def wrap_angle(x):
    """Map angles into (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2.0 * np.pi)


def _csr(rows, offset):
    ptr = [0]
    idx = []
    for row in rows:
        nz = np.flatnonzero(row) + offset
        idx.extend(nz.tolist())
        ptr.append(len(idx))
    return ptr, idx


@dataclass(frozen=True, eq=False)
class ModelConfig:
    blue: Graph
    red: Graph
    cross: CrossNetwork
    sigma_b: float
    sigma_r: float
    zeta_br: float
    zeta_rb: float
    phi: float
    psi: float
    omega: np.ndarray
    nu: np.ndarray

    def __post_init__(self):
        n, m = self.blue.n, self.red.n
        omega = np.array(self.omega, dtype=float)
        nu = np.array(self.nu, dtype=float)
        if omega.shape != (n,) or nu.shape != (m,):
            raise DimensionError(
                f"frequency vectors must have lengths N={n}, M={m}; "
                f"got {omega.shape} and {nu.shape}"
            )
        if self.cross.a_br.shape != (n, m):
            raise DimensionError(f"cross block is {self.cross.a_br.shape}, expected {(n, m)}")
        for name in ("sigma_b", "sigma_r", "zeta_br", "zeta_rb", "phi", "psi"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if not (np.isfinite(omega).all() and np.isfinite(nu).all()):
            raise ValueError("frequencies must be finite")
        object.__setattr__(self, "phi", float(wrap_angle(self.phi)))
        object.__setattr__(self, "psi", float(wrap_angle(self.psi)))
        omega.setflags(write=False)
        nu.setflags(write=False)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "nu", nu)

    @property
    def n_blue(self):
        return self.blue.n

    @property
    def n_red(self):
        return self.red.n

    @property
    def size(self):
        return self.blue.n + self.red.n

    @property
    def mean_omega(self):
        return float(self.omega.mean())

    @property
    def mean_nu(self):
        return float(self.nu.mean())

    def replace(self, **changes):
        return replace(self, **changes)

    @cached_property
    def kernel_args(self):
        """Flat arrays consumed by the RK4/rhs kernels (CSR neighbour lists)."""
        n, m = self.n_blue, self.n_red
        in_ptr_b, in_idx_b = _csr(self.blue.adjacency, 0)
        in_ptr_r, in_idx_r = _csr(self.red.adjacency, n)
        x_ptr_b, x_idx_b = _csr(self.cross.a_br, n)
        x_ptr_r, x_idx_r = _csr(self.cross.a_rb, 0)
        in_ptr = in_ptr_b + [p + in_ptr_b[-1] for p in in_ptr_r[1:]]
        x_ptr = x_ptr_b + [p + x_ptr_b[-1] for p in x_ptr_r[1:]]

        def per_pop(b, r):
            return np.concatenate([np.full(n, b), np.full(m, r)])

        as_long = lambda v: np.ascontiguousarray(v, dtype=np.int_)  # noqa: E731
        return dict(
            w=np.concatenate([self.omega, self.nu]),
            sig=per_pop(self.sigma_b, self.sigma_r),
            zet=per_pop(self.zeta_br, self.zeta_rb),
            cf=per_pop(math.cos(self.phi), math.cos(self.psi)),
            sf=per_pop(math.sin(self.phi), math.sin(self.psi)),
            in_ptr=as_long(in_ptr),
            in_idx=as_long(in_idx_b + in_idx_r),
            x_ptr=as_long(x_ptr),
            x_idx=as_long(x_idx_b + x_idx_r),
        )


@dataclass(frozen=True, eq=False)
class PhaseState:
    beta: np.ndarray
    rho: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        beta = np.array(self.beta, dtype=float)
        rho = np.array(self.rho, dtype=float)
        if not (np.isfinite(beta).all() and np.isfinite(rho).all()):
            raise ValueError("phase state must be finite")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "rho", rho)

    @property
    def y(self):
        return np.concatenate([self.beta, self.rho])

    @classmethod
    def from_vector(cls, y, n_blue, t=0.0):
        return cls(y[:n_blue], y[n_blue:], t)


def zero_state(cfg):
    return PhaseState(np.zeros(cfg.n_blue), np.zeros(cfg.n_red), 0.0)


def random_state(cfg, seed):
    """Phases uniform on (-pi, pi]."""
    rng = np.random.default_rng(seed)
    y = wrap_angle(rng.uniform(-np.pi, np.pi, size=cfg.size))
    return PhaseState.from_vector(y, cfg.n_blue)


def uniform_frequencies(n_blue, n_red, seed, low=0.0, high=1.0):
    """Natural frequencies drawn uniform on [low, high], Blue first then Red."""
    rng = np.random.default_rng(seed)
    return rng.uniform(low, high, size=n_blue), rng.uniform(low, high, size=n_red)


def rhs(cfg, s, backend=None):
    """Phase velocities (Blue then Red) at state ``s``."""
    y = s.y
    if y.size != cfg.size:
        raise DimensionError(f"state has {y.size} phases, model has {cfg.size}")
    return _backend.get(backend).rhs(np.ascontiguousarray(y), **cfg.kernel_args)


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    phases: np.ndarray
    n_blue: int
    dt: float
    method: str
    rhs_evals: int
    final: PhaseState = field(repr=False)

    @property
    def beta(self):
        return self.phases[:, : self.n_blue]

    @property
    def rho(self):
        return self.phases[:, self.n_blue :]

    def to_csv(self, header_comment=None):
        n, m = self.n_blue, self.phases.shape[1] - self.n_blue
        cols = ["t"] + [f"beta_{i}" for i in range(n)] + [f"rho_{j}" for j in range(m)]
        lines = []
        if header_comment:
            lines.append(f"# {header_comment}")
        lines.append(",".join(cols))
        for t, row in zip(self.times, self.phases):
            lines.append(",".join([repr(float(t))] + [repr(float(v)) for v in row]))
        return "\n".join(lines) + "\n"


def _n_steps(span, dt):
    k = span / dt
    r = round(k)
    if r >= 1 and abs(k - r) <= 1e-9 * max(1.0, k):
        return int(r)
    return max(1, math.ceil(k))


def integrate(cfg, s0, t_end, dt=0.01, sample_every=1, backend=None):
    """Classical RK4 with fixed step ``dt`` from ``s0.t`` to (within dt of) ``t_end``.

    Samples every ``sample_every`` steps starting with the initial state. The
    final state is always available as ``traj.final`` even when the last step
    is not on the sampling grid.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_end <= s0.t:
        raise ValueError("t_end must exceed the initial time")
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    n_steps = _n_steps(t_end - s0.t, dt)
    kern = _backend.get(backend)
    samples, last, failed = kern.rk4(
        np.ascontiguousarray(s0.y), float(dt), int(n_steps), int(sample_every), **cfg.kernel_args
    )
    if failed >= 0:
        raise DivergenceError(s0.t + failed * dt)
    times = s0.t + (sample_every * np.arange(samples.shape[0])) * dt
    return Trajectory(
        times=times,
        phases=samples,
        n_blue=cfg.n_blue,
        dt=float(dt),
        method="rk4",
        rhs_evals=4 * n_steps,
        final=PhaseState.from_vector(last, cfg.n_blue, s0.t + n_steps * dt),
    )


@dataclass(frozen=True)
class ConvergenceProbe:
    order: float | None
    errors: tuple
    exact: bool

    def __str__(self):
        return "exact" if self.exact else f"{self.order:.3f}"


def order_of_convergence_probe(cfg, s0, t_end, dt=0.01, backend=None, exact_tol=1e-11):
    """Observed order from runs at dt, dt/2, dt/4 (Richardson ratio, log2)."""
    # all three runs must stop at the same time: n, 2n and 4n steps
    n = _n_steps(t_end - s0.t, dt)
    t_stop = s0.t + n * dt
    finals = []
    for k in (1, 2, 4):
        traj = integrate(cfg, s0, t_stop, dt / k, sample_every=k * n, backend=backend)
        finals.append(traj.final.y)
    e1 = float(np.max(np.abs(finals[0] - finals[1])))
    e2 = float(np.max(np.abs(finals[1] - finals[2])))
    scale = max(1.0, float(np.max(np.abs(finals[2]))))
    if max(e1, e2) <= exact_tol * scale:
        return ConvergenceProbe(None, (e1, e2), True)
    return ConvergenceProbe(math.log2(e1 / e2), (e1, e2), False)
