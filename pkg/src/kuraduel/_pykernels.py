"""Pure numpy versions of the kernels in ``_ckernels.pyx``.

Same algorithms, vectorised along rows/columns where the compiled code has
an inner loop. The QR iteration performs identical floating point operations
per element; the RK4 neighbour sums go through dense mat-vecs instead.
"""
import math

import numpy as np

EPS = np.finfo(float).eps


def _dense(n, ptr, idx):
    a = np.zeros((n, n))
    for i in range(n):
        a[i, idx[ptr[i]:ptr[i + 1]]] = 1.0
    return a


class _Field:
    def __init__(self, w, sig, zet, cf, sf, in_ptr, in_idx, x_ptr, x_idx):
        n = w.shape[0]
        self.w = w
        self.a_in = _dense(n, in_ptr, in_idx) * sig[:, None]
        a_x = _dense(n, x_ptr, x_idx) * zet[:, None]
        self.a_xc = a_x * cf[:, None]
        self.a_xs = a_x * sf[:, None]

    def __call__(self, th):
        s = np.sin(th)
        c = np.cos(th)
        ins, inc = self.a_in @ s, self.a_in @ c
        xcs, xcc = self.a_xc @ s, self.a_xc @ c
        xss, xsc = self.a_xs @ s, self.a_xs @ c
        return (
            self.w
            + (c * ins - s * inc)
            + (c * xcs - s * xcc)
            + (c * xsc + s * xss)
        )


def rhs(th, w, sig, zet, cf, sf, in_ptr, in_idx, x_ptr, x_idx):
    return _Field(w, sig, zet, cf, sf, in_ptr, in_idx, x_ptr, x_idx)(th)


def rk4(y0, dt, n_steps, sample_every, w, sig, zet, cf, sf, in_ptr, in_idx, x_ptr, x_idx):
    f = _Field(w, sig, zet, cf, sf, in_ptr, in_idx, x_ptr, x_idx)
    y = np.array(y0, dtype=float, copy=True)
    samples = np.empty((n_steps // sample_every + 1, y.size))
    samples[0] = y
    row = 1
    h2, h6 = 0.5 * dt, dt / 6.0
    for step in range(1, n_steps + 1):
        k1 = f(y)
        k2 = f(y + h2 * k1)
        k3 = f(y + h2 * k2)
        k4 = f(y + dt * k3)
        y = y + h6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.isfinite(y).all():
            return samples[:row], y, step
        if step % sample_every == 0:
            samples[row] = y
            row += 1
    return samples[:row], y, -1


def _balance(a):
    n = a.shape[0]
    done = False
    while not done:
        done = True
        for i in range(n):
            c = np.abs(a[:, i]).sum() - abs(a[i, i])
            r = np.abs(a[i, :]).sum() - abs(a[i, i])
            if c != 0.0 and r != 0.0:
                g = r / 2.0
                f = 1.0
                s = c + r
                while c < g:
                    f *= 2.0
                    c *= 4.0
                g = r * 2.0
                while c > g:
                    f /= 2.0
                    c /= 4.0
                if (c + r) / f < 0.95 * s:
                    done = False
                    a[i, :] *= 1.0 / f
                    a[:, i] *= f


def _elmhes(a):
    n = a.shape[0]
    for m in range(1, n - 1):
        col = np.abs(a[m:, m - 1])
        piv = m + int(np.argmax(col))
        x = a[piv, m - 1]
        if abs(x) == 0.0:
            piv = m
            x = 0.0
        if piv != m:
            a[[piv, m], m - 1:] = a[[m, piv], m - 1:]
            a[:, [piv, m]] = a[:, [m, piv]]
        if x != 0.0:
            for i in range(m + 1, n):
                y = a[i, m - 1]
                if y != 0.0:
                    y /= x
                    a[i, m - 1] = y
                    a[i, m:] -= y * a[m, m:]
                    a[:, m] += y * a[:, i]
    for i in range(2, n):
        a[i, : i - 1] = 0.0


def _sign(a, b):
    return abs(a) if b >= 0.0 else -abs(a)


def _hqr(a, wr, wi, max_iter):
    n = a.shape[0]
    anorm = 0.0
    for i in range(n):
        anorm += np.abs(a[i, max(i - 1, 0):]).sum()
    nn = n - 1
    t = 0.0
    total = 0
    x = y = z = w = p = q = r = 0.0
    while nn >= 0:
        its = 0
        while True:
            l = nn
            while l >= 1:
                s = abs(a[l - 1, l - 1]) + abs(a[l, l])
                if s == 0.0:
                    s = anorm
                if abs(a[l, l - 1]) <= EPS * s:
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
                z = math.sqrt(abs(q))
                x += t
                if q >= 0.0:
                    z = p + _sign(z, p)
                    wr[nn - 1] = wr[nn] = x + z
                    if z != 0.0:
                        wr[nn] = x - w / z
                    wi[nn - 1] = wi[nn] = 0.0
                else:
                    wr[nn - 1] = wr[nn] = x + p
                    wi[nn - 1] = -z
                    wi[nn] = z
                nn -= 2
                break
            if total >= max_iter:
                return -1
            if its > 0 and its % 10 == 0:
                t += x
                idx = np.arange(nn + 1)
                a[idx, idx] -= x
                s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
                x = y = 0.75 * s
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
                s = abs(p) + abs(q) + abs(r)
                p /= s
                q /= s
                r /= s
                if m == l:
                    break
                u = abs(a[m, m - 1]) * (abs(q) + abs(r))
                v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
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
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0.0:
                        p /= x
                        q /= x
                        r /= x
                s = _sign(math.sqrt(p * p + q * q + r * r), p)
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
                    cols = slice(k, nn + 1)
                    pv = a[k, cols] + q * a[k + 1, cols]
                    if k != nn - 1:
                        pv += r * a[k + 2, cols]
                        a[k + 2, cols] -= pv * z
                    a[k + 1, cols] -= pv * y
                    a[k, cols] -= pv * x
                    rows = slice(l, min(nn, k + 3) + 1)
                    pv = x * a[rows, k] + y * a[rows, k + 1]
                    if k != nn - 1:
                        pv += z * a[rows, k + 2]
                        a[rows, k + 2] -= pv * r
                    a[rows, k + 1] -= pv * q
                    a[rows, k] -= pv
            if l >= nn - 1:
                break
    return total


def eigvals(m, max_iter):
    a = np.array(m, dtype=np.float64, order="C", copy=True)
    n = a.shape[0]
    wr = np.zeros(n)
    wi = np.zeros(n)
    _balance(a)
    _elmhes(a)
    sweeps = _hqr(a, wr, wi, max_iter)
    return wr, wi, sweeps
