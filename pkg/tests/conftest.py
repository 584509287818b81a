import math
from importlib import resources

import numpy as np
import pytest

from kuraduel import _backend, config
from kuraduel.dynamics import ModelConfig
from kuraduel.graph import CrossNetwork, Graph

BACKENDS = ["python"] + (["cython"] if _backend.compiled is not None else [])


def canonical_experiment():
    path = resources.files("kuraduel") / "data" / "canonical.ini"
    return config.parse(path.read_text(), base_dir=str(path.parent))


_CANON = None


def canonical(**overrides):
    """ModelConfig of the committed instance (phi = 0.2 pi, psi = 0 unless overridden)."""
    global _CANON
    if _CANON is None:
        exp = canonical_experiment()
        _CANON = config.model_from(exp, config.realize(exp))
    return _CANON.replace(**overrides) if overrides else _CANON


def frag_canonical(zeta=1.0):
    return canonical(phi=math.pi / 4, psi=math.pi / 4, zeta_br=zeta, zeta_rb=zeta)


def pair_model(omega=0.0, nu=0.0, sigma=0.0, zeta_br=1.0, zeta_rb=1.0, phi=0.0, psi=0.0, mutual=True):
    """N = M = 1 with one cross link."""
    one = Graph.from_edges(1, [])
    a = np.ones((1, 1), dtype=np.int8)
    cross = CrossNetwork(a, a.copy() if mutual else np.zeros_like(a))
    return ModelConfig(one, one, cross, sigma, sigma, zeta_br, zeta_rb, phi, psi, [omega], [nu])


@pytest.fixture
def canon():
    return canonical()


@pytest.fixture
def canon_partition():
    return config.red_partition(canonical())


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":abc"))):
            terminalreporter.write_line(line)
