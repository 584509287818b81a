"""Compare the compiled and numpy kernels on the canonical instance.

    python3 benchmarks/bench_backends.py [--steps 20000] [--repeat 3]

Reports the best wall time per kernel and backend plus the speed-up, and
checks that both backends agree.
"""
import argparse
import math
import time
from importlib import resources

import numpy as np

from kuraduel import _backend, config
from kuraduel.dynamics import zero_state
from kuraduel.linearized import build_super_laplacian


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=20000, help="RK4 steps per run")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--eig-count", type=int, default=50, help="42x42 eigenvalue solves")
    args = ap.parse_args()

    path = resources.files("kuraduel") / "data" / "canonical.ini"
    cfg = config.parse(path.read_text(), base_dir=str(path.parent))
    model = config.model_from(cfg, config.realize(cfg))
    y0 = np.ascontiguousarray(zero_state(model).y)
    kw = model.kernel_args
    mats = [build_super_laplacian(model, a).m for a in np.linspace(-math.pi, math.pi, args.eig_count)]

    backends = ["python"] + (["cython"] if _backend.compiled is not None else [])
    rows = {}
    for name in backends:
        k = _backend.get(name)
        t_rk4, (_, final, _) = best_of(lambda: k.rk4(y0, 0.01, args.steps, args.steps, **kw), args.repeat)
        t_eig, vals = best_of(lambda: [k.eigvals(m, 30 * m.shape[0]) for m in mats], args.repeat)
        rows[name] = (t_rk4, t_eig, final, vals)
        print(f"{name:>7}: rk4 {args.steps} steps {t_rk4 * 1e3:9.1f} ms | "
              f"eigvals x{len(mats)} (42x42) {t_eig * 1e3:9.1f} ms")

    if "cython" in rows:
        py, cy = rows["python"], rows["cython"]
        print(f"speed-up: rk4 {py[0] / cy[0]:.1f}x, eigvals {py[1] / cy[1]:.1f}x")
        drift = float(np.max(np.abs(py[2] - cy[2])))
        eig_gap = max(
            float(np.max(np.abs(np.sort_complex(a[0] + 1j * a[1]) - np.sort_complex(b[0] + 1j * b[1]))))
            for a, b in zip(py[3], cy[3])
        )
        print(f"agreement: final state max |diff| {drift:.2e}, eigenvalues max |diff| {eig_gap:.2e}")
    else:
        print("compiled kernels not built; only the numpy fallback was timed")


if __name__ == "__main__":
    main()
