"""Linearised operators around the internally locked and fragmented states.

Two-cluster super-Laplacian (Blue rows first, Red rows second), with
p = zeta_BR cos(phi - alpha) and q = zeta_RB cos(psi + alpha):

    [ sigma_B L_B + p D_BR      -p A_BR             ]
    [ -q A_RB                   sigma_R L_R + q D_RB ]

The three-cluster version orders the rows as (B, R1, R2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigen import default_zero_tol, eigs, eigvals, lowest_nonzero_mode, Spectrum
from .graph import laplacian


@dataclass(frozen=True, eq=False)
class SuperLaplacian:
    m: np.ndarray
    alpha: float
    symmetric_flag: bool


@dataclass(frozen=True, eq=False)
class DriftVector:
    v: np.ndarray


@dataclass(frozen=True, eq=False)
class FragSuperLaplacian:
    m: np.ndarray
    a_br1: float
    a_r1r2: float
    a_br2: float
    v1: np.ndarray
    v2: np.ndarray
    v3: np.ndarray
    red_order: np.ndarray  # red indices in (R1, R2) order


def cross_weights(cfg, alpha):
    """(p, q) cosine weights of the cross blocks at centroid angle alpha."""
    return (
        cfg.zeta_br * math.cos(cfg.phi - alpha),
        cfg.zeta_rb * math.cos(cfg.psi + alpha),
    )


def build_super_laplacian(cfg, alpha):
    n = cfg.n_blue
    p, q = cross_weights(cfg, alpha)
    a_br = cfg.cross.a_br.astype(float)
    a_rb = cfg.cross.a_rb.astype(float)
    m = np.empty((cfg.size, cfg.size))
    m[:n, :n] = cfg.sigma_b * laplacian(cfg.blue) + p * np.diag(a_br.sum(axis=1))
    m[:n, n:] = -p * a_br
    m[n:, :n] = -q * a_rb
    m[n:, n:] = cfg.sigma_r * laplacian(cfg.red) + q * np.diag(a_rb.sum(axis=1))
    sym = bool(math.isclose(p, q, rel_tol=1e-12, abs_tol=1e-15) and cfg.cross.is_mutual)
    return SuperLaplacian(m, float(alpha), sym)


def build_free_laplacian(cfg):
    """Block-diagonal super-Laplacian without cross coupling."""
    n = cfg.n_blue
    m = np.zeros((cfg.size, cfg.size))
    m[:n, :n] = cfg.sigma_b * laplacian(cfg.blue)
    m[n:, n:] = cfg.sigma_r * laplacian(cfg.red)
    return m


def build_drift(cfg, alpha):
    d_br = cfg.cross.a_br.sum(axis=1)
    d_rb = cfg.cross.a_rb.sum(axis=1)
    blue = cfg.omega + cfg.zeta_br * math.sin(cfg.phi - alpha) * d_br
    red = cfg.nu + cfg.zeta_rb * math.sin(cfg.psi + alpha) * d_rb
    return DriftVector(np.concatenate([blue, red]))


def build_frag_super_laplacian(cfg, partition, a_br1, a_r1r2, a_br2=None):
    """Three-cluster operator; ``a_br2`` defaults to a_br1 + a_r1r2."""
    if a_br2 is None:
        a_br2 = a_br1 + a_r1r2
    r1 = list(partition.r1)
    r2 = list(partition.r2)
    n, m1, m2 = cfg.n_blue, len(r1), len(r2)
    a_br = cfg.cross.a_br.astype(float)
    a_rb = cfg.cross.a_rb.astype(float)
    red = cfg.red.adjacency.astype(float)

    a_br1_blk, a_br2_blk = a_br[:, r1], a_br[:, r2]
    a_r1b_blk, a_r2b_blk = a_rb[r1, :], a_rb[r2, :]
    a_r1r2_blk = red[np.ix_(r1, r2)]
    l_r1 = laplacian_sub(red, r1)
    l_r2 = laplacian_sub(red, r2)

    c_br1 = cfg.zeta_br * math.cos(cfg.phi - a_br1)
    c_br2 = cfg.zeta_br * math.cos(cfg.phi - a_br2)
    c_r1b = cfg.zeta_rb * math.cos(cfg.psi + a_br1)
    c_r2b = cfg.zeta_rb * math.cos(cfg.psi + a_br2)
    c_rr = cfg.sigma_r * math.cos(a_r1r2)

    v1 = c_br1 * a_br1_blk.sum(axis=1) + c_br2 * a_br2_blk.sum(axis=1)
    v2 = c_r1b * a_r1b_blk.sum(axis=1) + c_rr * a_r1r2_blk.sum(axis=1)
    v3 = c_r2b * a_r2b_blk.sum(axis=1) + c_rr * a_r1r2_blk.sum(axis=0)

    b, s1, s2 = slice(0, n), slice(n, n + m1), slice(n + m1, n + m1 + m2)
    mat = np.zeros((n + m1 + m2,) * 2)
    mat[b, b] = cfg.sigma_b * laplacian(cfg.blue) + np.diag(v1)
    mat[b, s1] = -c_br1 * a_br1_blk
    mat[b, s2] = -c_br2 * a_br2_blk
    mat[s1, b] = -c_r1b * a_r1b_blk
    mat[s1, s1] = cfg.sigma_r * l_r1 + np.diag(v2)
    mat[s1, s2] = -c_rr * a_r1r2_blk
    mat[s2, b] = -c_r2b * a_r2b_blk
    mat[s2, s1] = -c_rr * a_r1r2_blk.T
    mat[s2, s2] = cfg.sigma_r * l_r2 + np.diag(v3)
    return FragSuperLaplacian(
        mat, float(a_br1), float(a_r1r2), float(a_br2), v1, v2, v3, partition.order
    )


def laplacian_sub(adj, idx):
    """Laplacian of the subgraph induced on ``idx``."""
    a = adj[np.ix_(idx, idx)]
    return np.diag(a.sum(axis=1)) - a


def lambda1(m, n_zero=1, zero_tol=None, backend=None):
    """Lowest non-zero eigenvalue of ``m`` (no eigenvectors computed)."""
    vals = eigvals(m, backend=backend)
    tol = default_zero_tol(m) if zero_tol is None else zero_tol
    lam, _ = lowest_nonzero_mode(Spectrum(vals, None, float("nan")), n_zero, tol)
    return lam


def lambda1_sweep(cfg, alphas=None, backend=None):
    """Re/Im of lambda_1 of the super-Laplacian over a grid of alpha."""
    if alphas is None:
        alphas = np.linspace(-np.pi, np.pi, 721)
    lam = np.array(
        [lambda1(build_super_laplacian(cfg, a).m, backend=backend) for a in alphas]
    )
    return np.asarray(alphas, dtype=float), lam


def lowest_mode(cfg, alpha, backend=None):
    """(lambda_1, eigenvector) of the two-cluster super-Laplacian."""
    m = build_super_laplacian(cfg, alpha).m
    spec = eigs(m, vectors=False, backend=backend)
    return lowest_nonzero_mode(spec, 1, default_zero_tol(m), matrix=m)


@dataclass(frozen=True)
class StepProfile:
    var_blue: float
    var_red: float
    gap: float
    is_step: bool


def eigenvector_step_profile(evec, n_blue, factor=5.0):
    """Does ``evec`` only separate Blue from Red (a step at the population boundary)?"""
    v = np.asarray(evec)
    if np.iscomplexobj(v):
        j = int(np.argmax(np.abs(v)))
        v = (v * (abs(v[j]) / v[j])).real if v[j] != 0 else v.real
    v = np.asarray(v, dtype=float)
    vb, vr = v[:n_blue], v[n_blue:]
    var_b, var_r = float(vb.var()), float(vr.var())
    gap = float(abs(vb.mean() - vr.mean()))
    return StepProfile(var_b, var_r, gap, gap > factor * math.sqrt(max(var_b, var_r)))


@dataclass(frozen=True, eq=False)
class SmallnessReport:
    ratios: np.ndarray  # |f_r / lambda_r^(0)| for the retained modes
    modes: np.ndarray  # global mode index r (Blue 0..N-1, Red N..N+M-1)
    eigenvalues: np.ndarray
    excluded: np.ndarray  # modes dropped for a (near) zero eigenvalue

    @property
    def max_ratio(self):
        return float(self.ratios.max()) if self.ratios.size else 0.0


def smallness_criterion(cfg, alpha=0.0, zero_tol=1e-9):
    """|f_r / lambda_r^(0)| for the free-system normal modes.

    f_r is the projection of the drift vector at ``alpha`` on the orthonormal
    eigenvectors of sigma_B L_B and sigma_R L_R.
    """
    n = cfg.n_blue
    omega = build_drift(cfg, alpha).v
    lam_b, vec_b = np.linalg.eigh(cfg.sigma_b * laplacian(cfg.blue))
    lam_r, vec_r = np.linalg.eigh(cfg.sigma_r * laplacian(cfg.red))
    f = np.concatenate([vec_b.T @ omega[:n], vec_r.T @ omega[n:]])
    lam = np.concatenate([lam_b, lam_r])
    modes = np.arange(lam.size)
    # the first mode of each block is the population zero mode
    zero_mode = (modes == 0) | (modes == n)
    tiny = np.abs(lam) <= zero_tol * max(1.0, np.abs(lam).max())
    excluded = modes[tiny & ~zero_mode]
    keep = ~zero_mode & ~tiny
    return SmallnessReport(
        ratios=np.abs(f[keep] / lam[keep]),
        modes=modes[keep],
        eigenvalues=lam[keep],
        excluded=excluded,
    )


def spectrum_csv(spectrum):
    lines = ["index,re,im"]
    for k, lam in enumerate(spectrum.eigenvalues):
        lines.append(f"{k},{float(lam.real)!r},{float(lam.imag)!r}")
    return "\n".join(lines) + "\n"


def sweep_csv(alphas, lams, header_comment=None):
    lines = [f"# {header_comment}"] if header_comment else []
    lines.append("alpha,re_lambda_1,im_lambda_1")
    for a, lam in zip(alphas, lams):
        lines.append(f"{float(a)!r},{float(lam.real)!r},{float(lam.imag)!r}")
    return "\n".join(lines) + "\n"
