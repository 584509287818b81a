# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: fixed-step RK4 for the coupled phase model and the
Hessenberg/Francis-QR eigenvalue iteration.

Both mirror ``_pykernels`` operation for operation; ``_backend`` picks one.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, fabs, sqrt, isfinite

cnp.import_array()

DEF EPS = 2.220446049250313e-16


cdef void _rhs(const double[::1] th, double[::1] out, double[::1] s, double[::1] c,
               const double[::1] w, const double[::1] sig, const double[::1] zet,
               const double[::1] cf, const double[::1] sf,
               const long[::1] in_ptr, const long[::1] in_idx,
               const long[::1] x_ptr, const long[::1] x_idx, Py_ssize_t n) nogil:
    cdef Py_ssize_t i, k, j
    cdef double ss, sc, xs, xc, acc
    for i in range(n):
        s[i] = sin(th[i])
        c[i] = cos(th[i])
    for i in range(n):
        acc = w[i]
        ss = 0.0
        sc = 0.0
        for k in range(in_ptr[i], in_ptr[i + 1]):
            j = in_idx[k]
            ss += s[j]
            sc += c[j]
        if in_ptr[i + 1] > in_ptr[i]:
            acc += sig[i] * (c[i] * ss - s[i] * sc)
        ss = 0.0
        sc = 0.0
        for k in range(x_ptr[i], x_ptr[i + 1]):
            j = x_idx[k]
            ss += s[j]
            sc += c[j]
        if x_ptr[i + 1] > x_ptr[i]:
            # sum sin(th_j + f - th_i) = cos f * sum sin(th_j - th_i) + sin f * sum cos(th_j - th_i)
            xs = c[i] * ss - s[i] * sc
            xc = c[i] * sc + s[i] * ss
            acc += zet[i] * (cf[i] * xs + sf[i] * xc)
        out[i] = acc


def rhs(double[::1] th, double[::1] w, double[::1] sig, double[::1] zet,
        double[::1] cf, double[::1] sf, long[::1] in_ptr, long[::1] in_idx,
        long[::1] x_ptr, long[::1] x_idx):
    cdef Py_ssize_t n = th.shape[0]
    out = np.empty(n)
    s = np.empty(n)
    c = np.empty(n)
    _rhs(th, out, s, c, w, sig, zet, cf, sf, in_ptr, in_idx, x_ptr, x_idx, n)
    return out


def rk4(double[::1] y0, double dt, long n_steps, long sample_every,
        double[::1] w, double[::1] sig, double[::1] zet, double[::1] cf, double[::1] sf,
        long[::1] in_ptr, long[::1] in_idx, long[::1] x_ptr, long[::1] x_idx):
    """Integrate ``n_steps`` RK4 steps; returns (samples, final, failed_step).

    ``samples`` holds the state at steps 0, sample_every, 2*sample_every, ...
    ``failed_step`` is -1 on success, else the first step whose result is not
    finite (integration stops there).
    """
    cdef Py_ssize_t n = y0.shape[0]
    cdef long n_samples = n_steps // sample_every + 1
    samples_arr = np.empty((n_samples, n))
    cdef double[:, ::1] samples = samples_arr
    y_arr = np.array(y0, copy=True)
    cdef double[::1] y = y_arr
    cdef double[::1] k1 = np.empty(n), k2 = np.empty(n), k3 = np.empty(n), k4 = np.empty(n)
    cdef double[::1] tmp = np.empty(n), s = np.empty(n), c = np.empty(n)
    cdef double h2 = 0.5 * dt, h6 = dt / 6.0
    cdef long step, row = 0, failed = -1
    cdef Py_ssize_t i
    cdef bint bad
    with nogil:
        for i in range(n):
            samples[0, i] = y[i]
        row = 1
        for step in range(1, n_steps + 1):
            _rhs(y, k1, s, c, w, sig, zet, cf, sf, in_ptr, in_idx, x_ptr, x_idx, n)
            for i in range(n):
                tmp[i] = y[i] + h2 * k1[i]
            _rhs(tmp, k2, s, c, w, sig, zet, cf, sf, in_ptr, in_idx, x_ptr, x_idx, n)
            for i in range(n):
                tmp[i] = y[i] + h2 * k2[i]
            _rhs(tmp, k3, s, c, w, sig, zet, cf, sf, in_ptr, in_idx, x_ptr, x_idx, n)
            for i in range(n):
                tmp[i] = y[i] + dt * k3[i]
            _rhs(tmp, k4, s, c, w, sig, zet, cf, sf, in_ptr, in_idx, x_ptr, x_idx, n)
            bad = False
            for i in range(n):
                y[i] = y[i] + h6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
                if not isfinite(y[i]):
                    bad = True
            if bad:
                failed = step
                break
            if step % sample_every == 0:
                for i in range(n):
                    samples[row, i] = y[i]
                row += 1
    return samples_arr[:row], y_arr, failed


cdef void _balance(double[:, ::1] a, Py_ssize_t n) nogil:
    cdef double RADIX = 2.0, sqrdx = 4.0
    cdef double c, r, g, f, s
    cdef Py_ssize_t i, j
    cdef bint done = False
    while not done:
        done = True
        for i in range(n):
            r = 0.0
            c = 0.0
            for j in range(n):
                if j != i:
                    c += fabs(a[j, i])
                    r += fabs(a[i, j])
            if c != 0.0 and r != 0.0:
                g = r / RADIX
                f = 1.0
                s = c + r
                while c < g:
                    f *= RADIX
                    c *= sqrdx
                g = r * RADIX
                while c > g:
                    f /= RADIX
                    c /= sqrdx
                if (c + r) / f < 0.95 * s:
                    done = False
                    g = 1.0 / f
                    for j in range(n):
                        a[i, j] *= g
                    for j in range(n):
                        a[j, i] *= f


cdef void _elmhes(double[:, ::1] a, Py_ssize_t n) nogil:
    cdef Py_ssize_t m, i, j, piv
    cdef double x, y, t
    for m in range(1, n - 1):
        x = 0.0
        piv = m
        for j in range(m, n):
            if fabs(a[j, m - 1]) > fabs(x):
                x = a[j, m - 1]
                piv = j
        if piv != m:
            for j in range(m - 1, n):
                t = a[piv, j]
                a[piv, j] = a[m, j]
                a[m, j] = t
            for j in range(n):
                t = a[j, piv]
                a[j, piv] = a[j, m]
                a[j, m] = t
        if x != 0.0:
            for i in range(m + 1, n):
                y = a[i, m - 1]
                if y != 0.0:
                    y /= x
                    a[i, m - 1] = y
                    for j in range(m, n):
                        a[i, j] -= y * a[m, j]
                    for j in range(n):
                        a[j, m] += y * a[j, i]
    for i in range(2, n):
        for j in range(i - 1):
            a[i, j] = 0.0


cdef inline double _sign(double a, double b) nogil:
    return fabs(a) if b >= 0.0 else -fabs(a)


cdef long _hqr(double[:, ::1] a, Py_ssize_t n, double[::1] wr, double[::1] wi,
               long max_iter) nogil:
    """Francis double-shift QR on an upper Hessenberg matrix.

    Returns the total number of QR sweeps, or -1 when ``max_iter`` is hit.
    """
    cdef Py_ssize_t nn, m, l, k, j, i, mmin
    cdef double z = 0.0, y = 0.0, x = 0.0, w = 0.0, v, u, t = 0.0, s, r = 0.0, q = 0.0, p = 0.0
    cdef double anorm = 0.0
    cdef long its, total = 0
    for i in range(n):
        for j in range(i - 1 if i > 0 else 0, n):
            anorm += fabs(a[i, j])
    nn = n - 1
    while nn >= 0:
        its = 0
        while True:
            l = nn
            while l >= 1:
                s = fabs(a[l - 1, l - 1]) + fabs(a[l, l])
                if s == 0.0:
                    s = anorm
                if fabs(a[l, l - 1]) <= EPS * s:
                    a[l, l - 1] = 0.0
                    break
                l -= 1
            x = a[nn, nn]
            if l == nn:
                wr[nn] = x + t
                wi[nn] = 0.0
                nn -= 1
                break
            y = a[nn - 1, nn - 1]
            w = a[nn, nn - 1] * a[nn - 1, nn]
            if l == nn - 1:
                p = 0.5 * (y - x)
                q = p * p + w
                z = sqrt(fabs(q))
                x += t
                if q >= 0.0:
                    z = p + _sign(z, p)
                    wr[nn - 1] = x + z
                    wr[nn] = x + z
                    if z != 0.0:
                        wr[nn] = x - w / z
                    wi[nn - 1] = 0.0
                    wi[nn] = 0.0
                else:
                    wr[nn - 1] = x + p
                    wr[nn] = x + p
                    wi[nn - 1] = -z
                    wi[nn] = z
                nn -= 2
                break
            if total >= max_iter:
                return -1
            if its > 0 and its % 10 == 0:
                # exceptional shift
                t += x
                for i in range(nn + 1):
                    a[i, i] -= x
                s = fabs(a[nn, nn - 1]) + fabs(a[nn - 1, nn - 2])
                x = 0.75 * s
                y = x
                w = -0.4375 * s * s
            its += 1
            total += 1
            m = nn - 2
            while m >= l:
                z = a[m, m]
                r = x - z
                s = y - z
                p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
                q = a[m + 1, m + 1] - z - r - s
                r = a[m + 2, m + 1]
                s = fabs(p) + fabs(q) + fabs(r)
                p /= s
                q /= s
                r /= s
                if m == l:
                    break
                u = fabs(a[m, m - 1]) * (fabs(q) + fabs(r))
                v = fabs(p) * (fabs(a[m - 1, m - 1]) + fabs(z) + fabs(a[m + 1, m + 1]))
                if u <= EPS * v:
                    break
                m -= 1
            for i in range(m + 2, nn + 1):
                a[i, i - 2] = 0.0
                if i != m + 2:
                    a[i, i - 3] = 0.0
            for k in range(m, nn):
                if k != m:
                    p = a[k, k - 1]
                    q = a[k + 1, k - 1]
                    r = 0.0
                    if k != nn - 1:
                        r = a[k + 2, k - 1]
                    x = fabs(p) + fabs(q) + fabs(r)
                    if x != 0.0:
                        p /= x
                        q /= x
                        r /= x
                s = _sign(sqrt(p * p + q * q + r * r), p)
                if s != 0.0:
                    if k == m:
                        if l != m:
                            a[k, k - 1] = -a[k, k - 1]
                    else:
                        a[k, k - 1] = -s * x
                    p += s
                    x = p / s
                    y = q / s
                    z = r / s
                    q /= p
                    r /= p
                    for j in range(k, nn + 1):
                        p = a[k, j] + q * a[k + 1, j]
                        if k != nn - 1:
                            p += r * a[k + 2, j]
                            a[k + 2, j] -= p * z
                        a[k + 1, j] -= p * y
                        a[k, j] -= p * x
                    mmin = nn if nn < k + 3 else k + 3
                    for i in range(l, mmin + 1):
                        p = x * a[i, k] + y * a[i, k + 1]
                        if k != nn - 1:
                            p += z * a[i, k + 2]
                            a[i, k + 2] -= p * r
                        a[i, k + 1] -= p * q
                        a[i, k] -= p
            if l >= nn - 1:
                break
    return total


def eigvals(double[:, :] m, long max_iter):
    """Balance, reduce to Hessenberg form, run Francis QR.

    Returns (wr, wi, sweeps); sweeps is -1 if the iteration cap was reached.
    """
    cdef Py_ssize_t n = m.shape[0]
    a_arr = np.array(m, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] a = a_arr
    wr_arr = np.zeros(n)
    wi_arr = np.zeros(n)
    cdef double[::1] wr = wr_arr, wi = wi_arr
    cdef long sweeps
    with nogil:
        _balance(a, n)
        _elmhes(a, n)
        sweeps = _hqr(a, n, wr, wi, max_iter)
    return wr_arr, wi_arr, sweeps
