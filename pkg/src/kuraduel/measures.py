"""Order parameters, centroid angles, lock detection and fragmentation tags."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import wrap_angle

LOCKED_2 = "locked-2cluster"
LOCKED_3 = "locked-3cluster"
SPLAY_R2 = "splay-R2"
EVAPORATED = "evaporated"


def order_parameter(phases):
    """|mean(exp(i theta))| along the last axis, clipped into [0, 1]."""
    p = np.asarray(phases, dtype=float)
    if p.shape[-1] == 0:
        raise ValueError("order parameter of an empty population")
    o = np.abs(np.exp(1j * p).mean(axis=-1))
    if p.shape[-1] == 1:
        return np.ones_like(o)
    return np.clip(o, 0.0, 1.0)


@dataclass(frozen=True, eq=False)
class OrderSeries:
    times: np.ndarray
    o_b: np.ndarray
    o_r: np.ndarray
    o_r1: np.ndarray | None = None
    o_r2: np.ndarray | None = None

    def trailing_mean(self, name, window=0.1):
        v = getattr(self, name)
        if v is None:
            return None
        return float(v[_trailing_slice(v.size, window)].mean())


def order_params(traj, partition=None):
    rho = traj.rho
    o_r1 = o_r2 = None
    if partition is not None:
        o_r1 = order_parameter(rho[:, list(partition.r1)])
        o_r2 = order_parameter(rho[:, list(partition.r2)])
    return OrderSeries(
        traj.times, order_parameter(traj.beta), order_parameter(rho), o_r1, o_r2
    )


@dataclass(frozen=True, eq=False)
class CentroidSeries:
    """Linear centroids of the unwrapped phases and the angles between them.

    ``circ_b`` / ``circ_p`` are circular means of the wrapped phases, kept as a
    diagnostic only.
    """

    times: np.ndarray
    b: np.ndarray
    p: np.ndarray
    alpha: np.ndarray
    circ_b: np.ndarray
    circ_p: np.ndarray
    p1: np.ndarray | None = None
    p2: np.ndarray | None = None
    alpha_br1: np.ndarray | None = None
    alpha_r1r2: np.ndarray | None = None
    alpha_br2: np.ndarray | None = None

    @property
    def alpha_wrapped(self):
        return wrap_angle(self.alpha)


def _circ_mean(phases):
    return np.angle(np.exp(1j * phases).mean(axis=1))


def centroids(traj, partition=None):
    beta, rho = traj.beta, traj.rho
    b = beta.mean(axis=1)
    p = rho.mean(axis=1)
    extra = {}
    if partition is not None:
        p1 = rho[:, list(partition.r1)].mean(axis=1)
        p2 = rho[:, list(partition.r2)].mean(axis=1)
        extra = dict(p1=p1, p2=p2, alpha_br1=b - p1, alpha_r1r2=p1 - p2, alpha_br2=b - p2)
    return CentroidSeries(
        traj.times, b, p, b - p, _circ_mean(beta), _circ_mean(rho), **extra
    )


def _trailing_slice(n, window):
    k = max(2, int(math.ceil(window * n)))
    if k > n:
        raise ValueError(f"window of {k} samples exceeds a series of {n}")
    return slice(n - k, n)


@dataclass(frozen=True)
class LockReport:
    locked: bool
    plateau: float  # trailing-window mean, wrapped into (-pi, pi]
    window: tuple  # (t_start, t_end) of the detection window
    windings: int  # 2 pi slips inside the detection window
    max_slope: float
    period: float | None  # mean spacing of slips over the whole series


def count_slips(values):
    """Indices at which an unwrapped series completes another full turn.

    The anchor starts at ``values[0]`` and moves by 2 pi each time the series
    gets 2 pi away from it, so ripples around any level (even near +/- pi)
    are never counted.
    """
    v = np.asarray(values, dtype=float)
    out = []
    anchor = v[0] if v.size else 0.0
    two_pi = 2.0 * math.pi
    i = 1
    while i < v.size:
        # jump straight to the next sample that leaves the band around the anchor
        far = np.flatnonzero(np.abs(v[i:] - anchor) >= two_pi)
        if far.size == 0:
            break
        i += int(far[0])
        turns = math.floor(abs(v[i] - anchor) / two_pi)
        anchor += math.copysign(turns * two_pi, v[i] - anchor)
        out.extend([i] * turns)
        i += 1
    return np.asarray(out, dtype=int)


def detect_lock(times, values, window=0.1, slope_tol=1e-3, wind_tol=0):
    """Locked when the trailing window is flat and free of 2 pi slips.

    ``values`` should be an unwrapped angle series (e.g. a centroid difference).
    Slope is the finite-difference derivative. The plateau is the trailing
    mean, so adding a constant to every phase shifts only the plateau's
    pre-image, never the flags.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.shape != v.shape or t.ndim != 1:
        raise ValueError("times and values must be 1-d of equal length")
    if v.size < 3:
        raise ValueError("series too short for lock detection")
    sl = _trailing_slice(v.size, window)
    if sl.start == 0:
        raise ValueError("window must be shorter than the series")
    # centre on the window start so large offsets do not cost precision
    tw, vw = t[sl], v[sl] - v[sl.start]
    slopes = np.diff(vw) / np.diff(tw)
    max_slope = float(np.abs(slopes).max())
    slips = count_slips(v)
    in_window = int(np.count_nonzero(slips >= sl.start + 1))
    period = None
    if slips.size >= 2:
        period = float(np.diff(t[slips]).mean())
    locked = max_slope < slope_tol and in_window <= wind_tol
    plateau = float(wrap_angle(v[sl.start] + vw.mean()))
    return LockReport(locked, plateau, (float(tw[0]), float(tw[-1])), in_window, max_slope, period)


@dataclass(frozen=True)
class FragmentationThresholds:
    locked: float = 0.99
    splay: float = 0.3
    window: float = 0.1


def classify_fragmentation(order, locks, thresholds=FragmentationThresholds()):
    """Tag the late-time state of Red.

    ``locks`` maps angle names ("alpha", "alpha_br1", "alpha_r1r2") to
    LockReports; missing entries count as unlocked.
    """
    if order.o_r1 is None or order.o_r2 is None:
        raise ValueError("fragmentation needs a Red partition")
    w, hi, lo = thresholds.window, thresholds.locked, thresholds.splay
    ob, orr = order.trailing_mean("o_b", w), order.trailing_mean("o_r", w)
    o1, o2 = order.trailing_mean("o_r1", w), order.trailing_mean("o_r2", w)

    def is_locked(name):
        rep = locks.get(name)
        return bool(rep is not None and rep.locked)

    if min(ob, orr) >= hi and is_locked("alpha"):
        return LOCKED_2
    if min(ob, o1) >= hi and is_locked("alpha_br1") and is_locked("alpha_r1r2"):
        return LOCKED_3
    if o2 <= lo:
        return SPLAY_R2
    return EVAPORATED


def measures_csv(order, cents, header_comment=None):
    """t,O_B,O_R,O_R1,O_R2,alpha,alpha_br1,alpha_r1r2 (absent columns empty)."""
    lines = [f"# {header_comment}"] if header_comment else []
    lines.append("t,O_B,O_R,O_R1,O_R2,alpha,alpha_br1,alpha_r1r2")

    def cell(arr, i):
        return "" if arr is None else repr(float(arr[i]))

    for i, t in enumerate(order.times):
        lines.append(
            ",".join(
                [
                    repr(float(t)),
                    cell(order.o_b, i),
                    cell(order.o_r, i),
                    cell(order.o_r1, i),
                    cell(order.o_r2, i),
                    cell(cents.alpha, i),
                    cell(cents.alpha_br1, i),
                    cell(cents.alpha_r1r2, i),
                ]
            )
        )
    return "\n".join(lines) + "\n"
