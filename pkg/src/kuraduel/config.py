"""Experiment configuration: a sectioned key = value text format.

Grammar (one ``key = value`` per line, ``#`` or ``;`` comments)::

    [blue] / [red]   kind = tree | er | file
                     tree: branching, depth     er: n, p, seed
                     file: path (relative to the config file)
    [cross]          kind = leaf_matching ; symmetric = true | false
    [couplings]      sigma_b, sigma_r, zeta_br, zeta_rb
    [frustration]    phi, psi            (angles; "0.2pi" means 0.2*pi)
    [frequencies]    kind = uniform (seed, low, high) | explicit (omega, nu)
    [integration]    dt, t_end, sample_every, initial = zero | random, initial_seed
    [analysis]       phi_grid, alpha_grid, zeta_grid (grids "start:stop:count"),
                     spot_phi (comma list), lock_window, slope_tol,
                     locked_threshold, splay_threshold
    [output]         dir

Every value accepted by the parser is printed back by ``dump`` so that
``parse(dump(c)) == c``; floats are written with ``repr`` to survive the trip.
"""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import ModelConfig, uniform_frequencies
from .errors import ConfigError, EdgeListParseError
from .graph import (
    Graph,
    complete_kary_tree,
    erdos_renyi,
    leaf_matching_cross,
    partition_red,
    read_edge_list,
)

_ANGLE = re.compile(r"^([-+]?)\s*((?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)?\s*\*?\s*(pi|π)?$")


def parse_angle(text):
    """Float radians from '1.2', '0.2pi', '-pi', '0.5*pi'."""
    m = _ANGLE.match(text.strip())
    if not m or (m.group(2) is None and m.group(3) is None):
        raise ValueError(f"not an angle: {text!r}")
    coef = float(m.group(2)) if m.group(2) is not None else 1.0
    if m.group(1) == "-":
        coef = -coef
    return coef * math.pi if m.group(3) else coef


@dataclass(frozen=True)
class Grid:
    start: float
    stop: float
    count: int

    def values(self):
        return np.linspace(self.start, self.stop, self.count)

    def __str__(self):
        return f"{self.start!r}:{self.stop!r}:{self.count}"


def parse_grid(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be start:stop:count, got {text!r}")
    count = int(parts[2])
    if count < 1:
        raise ValueError("grid count must be >= 1")
    return Grid(parse_angle(parts[0]), parse_angle(parts[1]), count)


@dataclass(frozen=True)
class NetworkSpec:
    kind: str
    branching: int = 0
    depth: int = 0
    n: int = 0
    p: float = 0.0
    seed: int = 0
    path: str = ""

    def build(self, base_dir):
        if self.kind == "tree":
            return complete_kary_tree(self.branching, self.depth)
        if self.kind == "er":
            return erdos_renyi(self.n, self.p, self.seed)
        path = Path(self.path)
        if not path.is_absolute():
            path = Path(base_dir) / path
        return read_edge_list(path.read_text())

    def items(self):
        if self.kind == "tree":
            return [("kind", "tree"), ("branching", str(self.branching)), ("depth", str(self.depth))]
        if self.kind == "er":
            return [("kind", "er"), ("n", str(self.n)), ("p", repr(self.p)), ("seed", str(self.seed))]
        return [("kind", "file"), ("path", self.path)]


@dataclass(frozen=True)
class FrequencySpec:
    kind: str
    seed: int = 0
    low: float = 0.0
    high: float = 1.0
    omega: tuple = ()
    nu: tuple = ()

    def items(self):
        if self.kind == "uniform":
            return [
                ("kind", "uniform"),
                ("seed", str(self.seed)),
                ("low", repr(self.low)),
                ("high", repr(self.high)),
            ]
        return [
            ("kind", "explicit"),
            ("omega", ", ".join(repr(v) for v in self.omega)),
            ("nu", ", ".join(repr(v) for v in self.nu)),
        ]


@dataclass(frozen=True)
class ExperimentConfig:
    blue: NetworkSpec
    red: NetworkSpec
    cross_symmetric: bool = True
    sigma_b: float = 8.0
    sigma_r: float = 0.5
    zeta_br: float = 0.4
    zeta_rb: float = 0.4
    phi: float = 0.0
    psi: float = 0.0
    frequencies: FrequencySpec = field(default_factory=lambda: FrequencySpec("uniform", 703))
    dt: float = 0.01
    t_end: float = 2000.0
    sample_every: int = 10
    initial: str = "zero"
    initial_seed: int = 0
    phi_grid: Grid = Grid(0.0, math.pi, 1001)
    alpha_grid: Grid = Grid(-math.pi, math.pi, 721)
    zeta_grid: Grid = Grid(0.5, 7.0, 27)
    spot_phi: tuple = ()
    lock_window: float = 0.1
    slope_tol: float = 1e-3
    locked_threshold: float = 0.99
    splay_threshold: float = 0.3
    out_dir: str = "out"
    base_dir: str = field(default=".", compare=False)


_SCALARS = {
    "couplings": [("sigma_b", float), ("sigma_r", float), ("zeta_br", float), ("zeta_rb", float)],
    "frustration": [("phi", parse_angle), ("psi", parse_angle)],
    "integration": [
        ("dt", float),
        ("t_end", float),
        ("sample_every", int),
        ("initial", str),
        ("initial_seed", int),
    ],
    "analysis": [
        ("phi_grid", parse_grid),
        ("alpha_grid", parse_grid),
        ("zeta_grid", parse_grid),
        ("spot_phi", lambda s: tuple(parse_angle(x) for x in s.split(",") if x.strip())),
        ("lock_window", float),
        ("slope_tol", float),
        ("locked_threshold", float),
        ("splay_threshold", float),
    ],
}
_KNOWN_SECTIONS = {"blue", "red", "cross", "frequencies", "output", *_SCALARS}


def _key_line(text, section, key):
    """1-based line number of ``key`` inside ``[section]`` (None if absent)."""
    current = None
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
        elif current == section and re.match(rf"{re.escape(key)}\s*[=:]", line):
            return i
    return None


def _section_line(text, section):
    for i, raw in enumerate(text.splitlines(), start=1):
        if raw.strip() == f"[{section}]":
            return i
    return None


class _Reader:
    def __init__(self, text):
        self.text = text
        cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
        cp.optionxform = str
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"config syntax: {exc}") from None
        self.cp = cp
        for sec in cp.sections():
            if sec not in _KNOWN_SECTIONS:
                raise ConfigError(f"line {_section_line(text, sec)}: unknown section [{sec}]")

    def fail(self, section, key, msg):
        line = _key_line(self.text, section, key)
        where = f"line {line}: " if line else ""
        return ConfigError(f"{where}[{section}] {key}: {msg}")

    def get(self, section, key, conv, default=None, required=False):
        if not self.cp.has_option(section, key):
            if required:
                line = _section_line(self.text, section)
                where = f"line {line}: " if line else ""
                raise ConfigError(f"{where}[{section}] missing required key '{key}'")
            return default
        raw = self.cp.get(section, key).strip()
        try:
            return conv(raw)
        except (ValueError, TypeError) as exc:
            raise self.fail(section, key, str(exc)) from None

    def check_keys(self, section, allowed):
        if not self.cp.has_section(section):
            return
        for key in self.cp.options(section):
            if key not in allowed:
                raise self.fail(section, key, "unknown key")


def _bool(text):
    low = text.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _floats(text):
    return tuple(float(x) for x in text.replace("\n", " ").split(",") if x.strip())


def _network(r, section):
    if not r.cp.has_section(section):
        raise ConfigError(f"missing section [{section}]")
    kind = r.get(section, "kind", str, required=True)
    if kind == "tree":
        r.check_keys(section, {"kind", "branching", "depth"})
        return NetworkSpec(
            "tree",
            branching=r.get(section, "branching", int, required=True),
            depth=r.get(section, "depth", int, required=True),
        )
    if kind == "er":
        r.check_keys(section, {"kind", "n", "p", "seed"})
        return NetworkSpec(
            "er",
            n=r.get(section, "n", int, required=True),
            p=r.get(section, "p", float, required=True),
            seed=r.get(section, "seed", int, required=True),
        )
    if kind == "file":
        r.check_keys(section, {"kind", "path"})
        return NetworkSpec("file", path=r.get(section, "path", str, required=True))
    raise r.fail(section, "kind", f"expected tree, er or file, got {kind!r}")


def _frequencies(r):
    sec = "frequencies"
    kind = r.get(sec, "kind", str, "uniform")
    if kind == "uniform":
        r.check_keys(sec, {"kind", "seed", "low", "high"})
        return FrequencySpec(
            "uniform",
            seed=r.get(sec, "seed", int, required=True),
            low=r.get(sec, "low", float, 0.0),
            high=r.get(sec, "high", float, 1.0),
        )
    if kind == "explicit":
        r.check_keys(sec, {"kind", "omega", "nu"})
        return FrequencySpec(
            "explicit",
            omega=r.get(sec, "omega", _floats, required=True),
            nu=r.get(sec, "nu", _floats, required=True),
        )
    raise r.fail(sec, "kind", f"expected uniform or explicit, got {kind!r}")


def parse(text, base_dir="."):
    r = _Reader(text)
    values = dict(
        blue=_network(r, "blue"),
        red=_network(r, "red"),
        frequencies=_frequencies(r),
        base_dir=str(base_dir),
    )
    if r.cp.has_section("cross"):
        r.check_keys("cross", {"kind", "symmetric"})
        kind = r.get("cross", "kind", str, "leaf_matching")
        if kind != "leaf_matching":
            raise r.fail("cross", "kind", f"only leaf_matching is supported, got {kind!r}")
        values["cross_symmetric"] = r.get("cross", "symmetric", _bool, True)
    for sec, keys in _SCALARS.items():
        r.check_keys(sec, {k for k, _ in keys})
        for key, conv in keys:
            v = r.get(sec, key, conv)
            if v is not None:
                values[key] = v
    r.check_keys("output", {"dir"})
    out = r.get("output", "dir", str)
    if out is not None:
        values["out_dir"] = out
    cfg = ExperimentConfig(**values)
    _validate(cfg, r)
    return cfg


def _validate(cfg, r):
    if cfg.dt <= 0:
        raise r.fail("integration", "dt", "must be positive")
    if cfg.t_end <= 0:
        raise r.fail("integration", "t_end", "must be positive")
    if cfg.sample_every < 1:
        raise r.fail("integration", "sample_every", "must be >= 1")
    if cfg.initial not in ("zero", "random"):
        raise r.fail("integration", "initial", "expected zero or random")
    if not 0 < cfg.lock_window < 1:
        raise r.fail("analysis", "lock_window", "must lie in (0, 1)")


def load(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse(text, base_dir=path.resolve().parent), text


def dump(cfg):
    out = []

    def section(name, items):
        out.append(f"[{name}]")
        out.extend(f"{k} = {v}" for k, v in items)
        out.append("")

    section("blue", cfg.blue.items())
    section("red", cfg.red.items())
    section("cross", [("kind", "leaf_matching"), ("symmetric", str(cfg.cross_symmetric).lower())])
    section("frequencies", cfg.frequencies.items())
    for sec, keys in _SCALARS.items():
        items = []
        for key, _ in keys:
            v = getattr(cfg, key)
            if key == "spot_phi":
                v = ", ".join(repr(x) for x in v)
            elif isinstance(v, float):
                v = repr(v)
            items.append((key, str(v)))
        section(sec, items)
    section("output", [("dir", cfg.out_dir)])
    return "\n".join(out)


# ---------------------------------------------------------------------------
# realisation


@dataclass(frozen=True, eq=False)
class Realized:
    """Everything random or file-backed, pinned to concrete values."""

    blue_n: int
    blue_edges: tuple
    red_n: int
    red_edges: tuple
    cross_symmetric: bool
    omega: tuple
    nu: tuple

    def to_json(self):
        return dict(
            blue_n=self.blue_n,
            blue_edges=[list(e) for e in self.blue_edges],
            red_n=self.red_n,
            red_edges=[list(e) for e in self.red_edges],
            cross_symmetric=self.cross_symmetric,
            omega=list(self.omega),
            nu=list(self.nu),
        )

    @classmethod
    def from_json(cls, d):
        return cls(
            int(d["blue_n"]),
            tuple(tuple(e) for e in d["blue_edges"]),
            int(d["red_n"]),
            tuple(tuple(e) for e in d["red_edges"]),
            bool(d["cross_symmetric"]),
            tuple(float(v) for v in d["omega"]),
            tuple(float(v) for v in d["nu"]),
        )


def realize(cfg, seed_override=None):
    try:
        blue = cfg.blue.build(cfg.base_dir)
        red = cfg.red.build(cfg.base_dir)
    except (OSError, EdgeListParseError) as exc:
        raise ConfigError(f"network: {exc}") from None
    fs = cfg.frequencies
    if fs.kind == "uniform":
        seed = fs.seed if seed_override is None else int(seed_override)
        omega, nu = uniform_frequencies(blue.n, red.n, seed, fs.low, fs.high)
    else:
        omega, nu = np.array(fs.omega), np.array(fs.nu)
        if omega.size != blue.n or nu.size != red.n:
            raise ConfigError(
                f"[frequencies] expected {blue.n} omega and {red.n} nu values, "
                f"got {omega.size} and {nu.size}"
            )
    return Realized(
        blue.n,
        tuple(blue.edges()),
        red.n,
        tuple(red.edges()),
        cfg.cross_symmetric,
        tuple(float(v) for v in omega),
        tuple(float(v) for v in nu),
    )


def model_from(cfg, real, **overrides):
    """ModelConfig from an experiment config and its realisation."""
    blue = Graph.from_edges(real.blue_n, real.blue_edges)
    red = Graph.from_edges(real.red_n, real.red_edges)
    cross = leaf_matching_cross(blue, red, symmetric=real.cross_symmetric)
    params = dict(
        sigma_b=cfg.sigma_b,
        sigma_r=cfg.sigma_r,
        zeta_br=cfg.zeta_br,
        zeta_rb=cfg.zeta_rb,
        phi=cfg.phi,
        psi=cfg.psi,
    )
    params.update(overrides)
    return ModelConfig(blue, red, cross, omega=np.array(real.omega), nu=np.array(real.nu), **params)


def red_partition(model):
    return partition_red(model.red, model.cross)

