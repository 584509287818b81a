"""Simulation sweeps shared by the command-line runner and the test-suite."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dynamics import integrate, random_state, wrap_angle, zero_state
from .errors import BracketError
from .fixedpoint import (
    alpha_steady,
    critical_zeta,
    frag_angles,
    frag_lambda1,
    stable_frag_state,
    three_cluster_coeffs,
    two_cluster_coeffs,
)
from .measures import (
    FragmentationThresholds,
    centroids,
    classify_fragmentation,
    detect_lock,
    order_params,
)


@dataclass(frozen=True)
class RunSettings:
    dt: float = 0.01
    t_end: float = 2000.0
    sample_every: int = 10
    initial: str = "zero"
    initial_seed: int = 0
    lock_window: float = 0.1
    slope_tol: float = 1e-3
    locked_threshold: float = 0.99
    splay_threshold: float = 0.3

    @classmethod
    def from_config(cls, cfg):
        return cls(
            cfg.dt,
            cfg.t_end,
            cfg.sample_every,
            cfg.initial,
            cfg.initial_seed,
            cfg.lock_window,
            cfg.slope_tol,
            cfg.locked_threshold,
            cfg.splay_threshold,
        )

    @property
    def thresholds(self):
        return FragmentationThresholds(self.locked_threshold, self.splay_threshold, self.lock_window)


def initial_state(model, settings):
    if settings.initial == "random":
        return random_state(model, settings.initial_seed)
    return zero_state(model)


def simulate(model, settings, partition=None):
    """Integrate and post-process one configuration."""
    traj = integrate(
        model, initial_state(model, settings), settings.t_end, settings.dt, settings.sample_every
    )
    order = order_params(traj, partition)
    cents = centroids(traj, partition)
    return traj, order, cents


def lock_of(times, series, settings):
    return detect_lock(times, series, settings.lock_window, settings.slope_tol)


# ---------------------------------------------------------------------------
# two clusters


@dataclass(frozen=True)
class SpotCheck:
    phi: float
    alpha_numeric: float
    locked: bool
    alpha_stable: float
    period: float | None


def spot_check(model, settings):
    """Trailing-window alpha from the full simulation beside the analytic stable root."""
    traj, _, cents = simulate(model, settings)
    rep = lock_of(cents.times, cents.alpha, settings)
    try:
        root = alpha_steady(two_cluster_coeffs(model)).stable
    except ValueError:
        root = None
    return SpotCheck(
        model.phi, rep.plateau, rep.locked, root.alpha if root else math.nan, rep.period
    )


def _spot_worker(args):
    model, settings = args
    return spot_check(model, settings)


def map_jobs(fn, items, jobs=1):
    """Ordered map, in a process pool when ``jobs > 1``."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def spot_checks(model, phis, settings, jobs=1):
    return map_jobs(_spot_worker, [(model.replace(phi=float(p)), settings) for p in phis], jobs)


def lock_loss_phi(model, phis, settings):
    """First grid phi at which alpha no longer locks, by bisection over grid indices.

    Assumes lock holds at ``phis[0]`` and fails at ``phis[-1]``; returns the
    pair (last locked, first unlocked).
    """
    phis = [float(p) for p in phis]

    def locked(i):
        return spot_check(model.replace(phi=phis[i]), settings).locked

    lo, hi = 0, len(phis) - 1
    if not locked(lo):
        raise BracketError("alpha already unlocked at the first grid point")
    if locked(hi):
        raise BracketError("alpha still locked at the last grid point")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if locked(mid):
            lo = mid
        else:
            hi = mid
    return phis[lo], phis[hi]


# ---------------------------------------------------------------------------
# three clusters


@dataclass(frozen=True)
class FragPoint:
    zeta: float
    o_b: float
    o_r: float
    o_r1: float
    o_r2: float
    alpha_br1_numeric: float
    alpha_r1r2_numeric: float
    locked_br1: bool
    locked_r1r2: bool
    state: str
    sin_a_br1: float
    sin_a_r1r2: float
    j: float
    exists: bool
    branch: int  # index into the +/- pair used for the analytic columns
    alpha_br1_analytic: float
    alpha_r1r2_analytic: float
    lambda1_analytic: float
    lambda1_numeric: float


def frag_point(model, partition, zeta, settings):
    m = model.replace(zeta_br=zeta, zeta_rb=zeta)
    traj, order, cents = simulate(m, settings, partition)
    t = cents.times
    locks = {
        "alpha": lock_of(t, cents.alpha, settings),
        "alpha_br1": lock_of(t, cents.alpha_br1, settings),
        "alpha_r1r2": lock_of(t, cents.alpha_r1r2, settings),
    }
    state = classify_fragmentation(order, locks, settings.thresholds)
    w = settings.lock_window
    fa = frag_angles(three_cluster_coeffs(m, partition))
    st = stable_frag_state(m, partition)
    idx = 0 if st is None or st.branch == 1 else 1
    a_br1 = st.a_br1 if st else math.nan
    a_r1r2 = st.a_r1r2 if st else math.nan
    lam_an = frag_lambda1(m, partition, a_br1, a_r1r2).real if st else math.nan
    num_br1, num_r1r2 = locks["alpha_br1"].plateau, locks["alpha_r1r2"].plateau
    lam_num = frag_lambda1(m, partition, num_br1, num_r1r2).real

    def real(x):
        return float(x.real) if isinstance(x, complex) else float(x)

    return FragPoint(
        float(zeta),
        order.trailing_mean("o_b", w),
        order.trailing_mean("o_r", w),
        order.trailing_mean("o_r1", w),
        order.trailing_mean("o_r2", w),
        num_br1,
        num_r1r2,
        locks["alpha_br1"].locked,
        locks["alpha_r1r2"].locked,
        state,
        real(fa.sin_br1[idx]),
        real(fa.sin_r1r2[idx]),
        fa.j,
        bool(fa.exists[idx]),
        idx,
        a_br1,
        a_r1r2,
        float(lam_an),
        float(lam_num),
    )


def _frag_worker(args):
    return frag_point(*args)


def frag_sweep(model, partition, zetas, settings, jobs=1):
    return map_jobs(_frag_worker, [(model, partition, float(z), settings) for z in zetas], jobs)


def numeric_lock_loss_zeta(model, partition, points, settings, tol=0.02):
    """Refine the zeta where alpha_R1R2 stops locking between grid neighbours."""
    lo = hi = None
    for p in points:
        if p.locked_r1r2:
            lo = p.zeta
        else:
            hi = p.zeta
            break
    if lo is None or hi is None:
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if frag_point(model, partition, mid, settings).locked_r1r2:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def analytic_onset_zeta(model, partition, bracket):
    try:
        return critical_zeta(model, partition, bracket)
    except BracketError:
        return None


FRAG_COLUMNS = (
    "zeta,O_B,O_R,O_R1,O_R2,alpha_br1_numeric,alpha_r1r2_numeric,locked_br1,locked_r1r2,"
    "state,sin_a_br1,sin_a_r1r2,J,exists,alpha_br1_analytic,alpha_r1r2_analytic,"
    "lambda1_analytic,lambda1_numeric"
)


def frag_csv(points, header_comment=None):
    lines = [f"# {header_comment}"] if header_comment else []
    lines.append(FRAG_COLUMNS)
    for p in points:
        vals = [
            p.zeta, p.o_b, p.o_r, p.o_r1, p.o_r2, p.alpha_br1_numeric, p.alpha_r1r2_numeric,
            int(p.locked_br1), int(p.locked_r1r2), p.state, p.sin_a_br1, p.sin_a_r1r2, p.j,
            int(p.exists), p.alpha_br1_analytic, p.alpha_r1r2_analytic, p.lambda1_analytic,
            p.lambda1_numeric,
        ]
        lines.append(",".join(v if isinstance(v, str) else repr(v) for v in vals))
    return "\n".join(lines) + "\n"


def zeta_scan_csv(points, header_comment=None):
    """The ``zeta,sin_a_br1,sin_a_r1r2,J,exists`` view of a fragmentation sweep."""
    lines = [f"# {header_comment}"] if header_comment else []
    lines.append("zeta,sin_a_br1,sin_a_r1r2,J,exists")
    for p in points:
        lines.append(f"{p.zeta!r},{p.sin_a_br1!r},{p.sin_a_r1r2!r},{p.j!r},{int(p.exists)}")
    return "\n".join(lines) + "\n"


def spot_csv(spots, header_comment=None):
    lines = [f"# {header_comment}"] if header_comment else []
    lines.append("phi,alpha_numeric,locked,alpha_stable,difference")
    for s in spots:
        diff = float(wrap_angle(s.alpha_numeric - s.alpha_stable)) if np.isfinite(s.alpha_stable) else math.nan
        lines.append(f"{s.phi!r},{s.alpha_numeric!r},{int(s.locked)},{s.alpha_stable!r},{diff!r}")
    return "\n".join(lines) + "\n"
