"""``kuraduel`` command-line experiment runner.

Exit codes: 0 success, 2 config or checksum error, 3 numerical error (also a
rerun whose outputs differ), 4 infeasible analysis.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from pathlib import Path

from . import __version__, _backend
from . import config as cfgmod
from . import experiments as ex
from .errors import (
    BracketError,
    ChecksumError,
    ConfigError,
    ConvergenceError,
    DegenerateCouplingError,
    DegeneratePartitionError,
    DivergenceError,
    InfeasibleError,
    KuraduelError,
)
from .fixedpoint import alpha_steady, optimize_phi, scan_csv, two_cluster_coeffs
from .linearized import build_super_laplacian, lambda1, lambda1_sweep, sweep_csv
from .measures import measures_csv

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_INFEASIBLE = 0, 2, 3, 4
MANIFEST = "manifest.json"
SEED_ENV = "KURADUEL_SEED"


def sha256(data):
    if isinstance(data, str):
        data = data.encode()
    return hashlib.sha256(data).hexdigest()


def _canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


class Run:
    """One command execution: owns the manifest and the output directory."""

    def __init__(self, command, config_text, base_dir, out_dir, grid=None, jobs=1,
                 seed_override=None, realized=None):
        self.command = command
        self.config_text = config_text
        self.cfg = cfgmod.parse(config_text, base_dir)
        self.out = Path(out_dir if out_dir is not None else self.cfg.out_dir)
        self.grid = grid
        self.jobs = jobs
        self.seed_override = seed_override
        self.real = realized or cfgmod.realize(self.cfg, seed_override)
        self.model = cfgmod.model_from(self.cfg, self.real)
        self.settings = ex.RunSettings.from_config(self.cfg)
        self.config_hash = sha256(config_text)
        self.manifest = dict(
            tool="kuraduel",
            version=__version__,
            backend=_backend.name,
            command=command,
            grid=grid,
            config_text=config_text,
            config_hash=self.config_hash,
            seed_override=seed_override,
            realized=self.real.to_json(),
            realized_hash=sha256(_canonical_json(self.real.to_json())),
            status="incomplete",
            outputs={},
            results={},
        )

    @property
    def header(self):
        extra = f" seed_override={self.seed_override}" if self.seed_override is not None else ""
        return f"config_hash={self.config_hash}{extra}"

    def write_manifest(self):
        self.out.mkdir(parents=True, exist_ok=True)
        tmp = self.out / (MANIFEST + ".tmp")
        tmp.write_text(json.dumps(self.manifest, indent=1, sort_keys=True) + "\n")
        os.replace(tmp, self.out / MANIFEST)

    def emit(self, name, text):
        (self.out / name).write_text(text)
        self.manifest["outputs"][name] = sha256(text)
        self.write_manifest()

    def grid_values(self, default):
        return cfgmod.parse_grid(self.grid).values() if self.grid else default.values()

    def execute(self):
        self.write_manifest()
        try:
            results = COMMANDS[self.command](self)
        except KuraduelError as exc:
            self.manifest["status"] = "failed"
            self.manifest["error"] = f"{type(exc).__name__}: {exc}"
            self.write_manifest()
            raise
        self.manifest["results"] = results
        self.manifest["status"] = "complete"
        self.write_manifest()
        return results


def _partition_or_none(model):
    try:
        return cfgmod.red_partition(model)
    except DegeneratePartitionError:
        return None


def cmd_simulate(run):
    part = _partition_or_none(run.model)
    traj, order, cents = ex.simulate(run.model, run.settings, part)
    run.emit("trajectory.csv", traj.to_csv(run.header))
    run.emit("measures.csv", measures_csv(order, cents, run.header))
    lock = ex.lock_of(cents.times, cents.alpha, run.settings)
    w = run.settings.lock_window
    res = dict(
        O_B=order.trailing_mean("o_b", w),
        O_R=order.trailing_mean("o_r", w),
        alpha_locked=lock.locked,
        alpha_plateau=lock.plateau,
        alpha_windings=lock.windings,
        alpha_slip_period=lock.period,
    )
    try:
        root = alpha_steady(two_cluster_coeffs(run.model)).stable
        res["alpha_stable_analytic"] = root.alpha if root else None
    except KuraduelError:
        res["alpha_stable_analytic"] = None
    return res


def cmd_spectrum(run):
    alphas = run.grid_values(run.cfg.alpha_grid)
    alphas, lams = lambda1_sweep(run.model, alphas)
    run.emit("spectrum.csv", sweep_csv(alphas, lams, run.header))
    lines = [f"# {run.header}", "alpha,branch,scalar_slope,re_lambda_1,im_lambda_1"]
    try:
        steady = alpha_steady(two_cluster_coeffs(run.model))
        roots = steady.roots
    except KuraduelError:
        roots = ()
    for r in roots:
        lam = lambda1(build_super_laplacian(run.model, r.alpha).m)
        lines.append(f"{r.alpha!r},{r.branch},{r.slope!r},{float(lam.real)!r},{float(lam.imag)!r}")
    run.emit("roots.csv", "\n".join(lines) + "\n")
    return dict(n_alpha=len(alphas), n_roots=len(roots))


def cmd_optimize(run):
    grid = run.grid_values(run.cfg.phi_grid)
    opt = optimize_phi(run.model, grid=grid)
    run.emit("scan.csv", scan_csv(opt.rows, run.header))
    spots = ex.spot_checks(run.model, run.cfg.spot_phi, run.settings, run.jobs)
    run.emit("spot.csv", ex.spot_csv(spots, run.header))
    disagreements = [r.phi for r in opt.rows if r.disagreement]
    return dict(
        phi_opt=opt.phi_opt,
        phi_opt_over_pi=opt.phi_opt / math.pi,
        alpha_opt=opt.alpha_opt,
        interior_maximum=opt.interior,
        stability_disagreements=len(disagreements),
    )


def cmd_fragmentation(run):
    part = cfgmod.red_partition(run.model)
    zetas = run.grid_values(run.cfg.zeta_grid)
    points = ex.frag_sweep(run.model, part, zetas, run.settings, run.jobs)
    run.emit("fragmentation.csv", ex.frag_csv(points, run.header))
    run.emit("zeta_scan.csv", ex.zeta_scan_csv(points, run.header))
    onset = ex.analytic_onset_zeta(run.model, part, (float(min(zetas)), float(max(zetas))))
    lost = ex.numeric_lock_loss_zeta(run.model, part, points, run.settings)
    report = dict(
        zeta_onset_analytic=onset,
        zeta_lock_loss_numeric=lost,
        gap=abs(onset - lost) if onset is not None and lost is not None else None,
    )
    run.emit("threshold.json", json.dumps(report, indent=1, sort_keys=True) + "\n")
    return report


COMMANDS = dict(
    simulate=cmd_simulate,
    spectrum=cmd_spectrum,
    optimize=cmd_optimize,
    fragmentation=cmd_fragmentation,
)


def load_manifest(path):
    path = Path(path)
    try:
        man = json.loads(path.read_text())
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read manifest {path}: {exc}") from None
    if sha256(man.get("config_text", "")) != man.get("config_hash"):
        raise ChecksumError("config text does not match its recorded hash")
    if sha256(_canonical_json(man.get("realized"))) != man.get("realized_hash"):
        raise ChecksumError("realized networks/frequencies do not match their recorded hash")
    return man


def rerun(manifest_path, out_dir=None, jobs=1):
    """Re-execute a recorded run; returns (run, mismatched output names)."""
    man = load_manifest(manifest_path)
    src = Path(manifest_path).resolve().parent
    out = Path(out_dir) if out_dir is not None else src / "rerun"
    run = Run(
        man["command"],
        man["config_text"],
        src,
        out,
        grid=man.get("grid"),
        jobs=jobs,
        seed_override=man.get("seed_override"),
        realized=cfgmod.Realized.from_json(man["realized"]),
    )
    run.execute()
    recorded = man.get("outputs", {})
    fresh = run.manifest["outputs"]
    bad = sorted(k for k in set(recorded) | set(fresh) if recorded.get(k) != fresh.get(k))
    return run, bad


def _parser():
    p = argparse.ArgumentParser(prog="kuraduel", description="Blue-vs-Red oscillator experiments")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("simulate", "integrate one configuration; trajectory and measures CSV"),
        ("spectrum", "lambda_1 of the super-Laplacian over an alpha grid"),
        ("optimize", "Blue's best frustration phi plus simulation spot checks"),
        ("fragmentation", "sweep the cross coupling and locate the Red split threshold"),
    ):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--config", required=True, help="experiment config file")
        sp.add_argument("--out", help="output directory (default: [output] dir)")
        sp.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes")
        sp.add_argument("--grid", help="sweep grid start:stop:count (angles accept 'pi')")
    sp = sub.add_parser("rerun", help="re-execute a manifest and compare output checksums")
    sp.add_argument("manifest")
    sp.add_argument("--out", help="output directory (default: <manifest dir>/rerun)")
    sp.add_argument("--jobs", type=int, default=1)
    return p


def _seed_override():
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == "rerun":
            run, bad = rerun(args.manifest, args.out, args.jobs)
            if bad:
                print(f"outputs differ from the recorded run: {', '.join(bad)}", file=sys.stderr)
                return EXIT_NUMERIC
            print(f"rerun identical ({len(run.manifest['outputs'])} outputs) in {run.out}")
            return EXIT_OK
        if args.grid is not None:
            cfgmod.parse_grid(args.grid)
        path = Path(args.config)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        run = Run(
            args.command,
            text,
            path.resolve().parent,
            args.out,
            grid=args.grid,
            jobs=max(1, args.jobs),
            seed_override=_seed_override(),
        )
        results = run.execute()
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (DivergenceError, ConvergenceError, DegenerateCouplingError, BracketError,
            ArithmeticError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ChecksumError, DegeneratePartitionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for key, val in results.items():
        print(f"{key} = {val}")
    print(f"outputs written to {run.out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
