"""Dense eigen-decomposition of real nonsymmetric matrices.

Eigenvalues come from balancing, elimination to upper Hessenberg form and the
Francis double-shift QR iteration (compiled kernel when available). Right
eigenvectors are then recovered one at a time by shifted inverse iteration on
the original matrix.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import ConvergenceError, DegenerateSpectrumError


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    residual: float

    def __len__(self):
        return self.eigenvalues.size


def _order(vals):
    # ascending real part, then ascending imaginary part
    return np.lexsort((vals.imag, vals.real))


def eigvals(m, backend=None):
    """Unsorted complex eigenvalues of a real square matrix."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError("matrix has non-finite entries")
    n = a.shape[0]
    if n == 0:
        return np.zeros(0, dtype=complex)
    wr, wi, sweeps = _backend.get(backend).eigvals(a, 30 * max(n, 1))
    if sweeps < 0:
        raise ConvergenceError(f"QR iteration exceeded {30 * n} sweeps (n={n})")
    return wr + 1j * wi


def _start_vector(n, k):
    # fixed pseudo-random start; distinct per k so repeated eigenvalues get
    # different (not necessarily independent) vectors
    rng = np.random.default_rng([7919, k])
    return rng.standard_normal(n) + 1.0


def inverse_iteration(a, lam, k=0, iters=3):
    """Unit right eigenvector for the eigenvalue estimate ``lam``."""
    n = a.shape[0]
    scale = max(np.abs(a).max(), 1.0)
    real = abs(lam.imag) <= 1e-14 * scale
    shift = lam.real if real else lam
    # nudge off the exact eigenvalue so the shifted matrix stays invertible
    shift = shift + 64 * np.finfo(float).eps * scale
    dtype = float if real else complex
    shifted = a.astype(dtype) - shift * np.eye(n, dtype=dtype)
    v = _start_vector(n, k).astype(dtype)
    v /= np.linalg.norm(v)
    for _ in range(iters):
        try:
            x = np.linalg.solve(shifted, v)
        except np.linalg.LinAlgError:
            # shift landed exactly on the spectrum: take the null direction
            v = np.linalg.svd(shifted)[2][-1].conj()
            break
        nx = np.linalg.norm(x)
        if not np.isfinite(nx) or nx == 0.0:
            break
        v = x / nx
    if not real:
        # fix the arbitrary complex phase: largest component real positive
        j = int(np.argmax(np.abs(v)))
        v = v * (abs(v[j]) / v[j])
    return v


def eigs(m, vectors=True, backend=None):
    """Full spectrum sorted by (real, imag) with matching right eigenvectors."""
    a = np.asarray(m, dtype=float)
    vals = eigvals(a, backend=backend)
    vals = vals[_order(vals)]
    if not vectors:
        return Spectrum(vals, None, float("nan"))
    n = a.shape[0]
    vecs = np.empty((n, n), dtype=complex)
    res = 0.0
    for k, lam in enumerate(vals):
        v = inverse_iteration(a, lam, k)
        vecs[:, k] = v
        res = max(res, float(np.linalg.norm(a @ v - lam * v)))
    return Spectrum(vals, vecs, res)


def default_zero_tol(m):
    return 1e-9 * max(np.abs(np.asarray(m)).sum(axis=1).max(), 1.0)


def lowest_nonzero_mode(spectrum, n_zero=1, zero_tol=1e-9, matrix=None):
    """Eigenvalue of smallest real part once up to ``n_zero`` zero modes are dropped.

    The zero modes removed are the (at most ``n_zero``) eigenvalues of smallest
    modulus among those with modulus below ``zero_tol``. Returns
    ``(lambda_1, eigenvector)``; the vector is ``None`` when the spectrum was
    computed without vectors and no ``matrix`` is supplied to recover it.
    """
    vals = spectrum.eigenvalues
    mods = np.abs(vals)
    near = np.flatnonzero(mods < zero_tol)
    drop = near[np.argsort(mods[near], kind="stable")][:n_zero]
    keep = np.setdiff1d(np.arange(vals.size), drop)
    if keep.size == 0:
        raise DegenerateSpectrumError("every mode is a zero mode")
    k = keep[_order(vals[keep])[0]]
    lam = vals[k]
    if spectrum.eigenvectors is not None:
        vec = spectrum.eigenvectors[:, k]
    elif matrix is not None:
        vec = inverse_iteration(np.asarray(matrix, dtype=float), lam, int(k))
    else:
        vec = None
    return lam, vec


def gershgorin_discs(m):
    """Diagnostic only: (centres, radii) of the row Gershgorin discs."""
    a = np.asarray(m, dtype=float)
    centres = np.diag(a).copy()
    radii = np.abs(a).sum(axis=1) - np.abs(centres)
    return centres, radii
