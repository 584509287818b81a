"""Kernel selection.

Uses the compiled ``_ckernels`` extension when it is importable, else the
numpy fallback. Set ``KURADUEL_BACKEND=python`` to force the fallback.
"""
import logging
import os

from . import _pykernels

log = logging.getLogger(__name__)

python = _pykernels

try:
    from . import _ckernels as compiled
except ImportError:  # extension not built
    compiled = None

if os.environ.get("KURADUEL_BACKEND", "").lower() == "python" or compiled is None:
    kernels = _pykernels
    name = "python"
else:
    kernels = compiled
    name = "cython"

log.debug("kuraduel kernel backend: %s", name)


def get(which=None):
    """Return the kernel module called ``which`` ("cython"/"python"), or the active one."""
    if which is None:
        return kernels
    if which == "python":
        return _pykernels
    if which == "cython":
        if compiled is None:
            raise ImportError("compiled kernels are not built")
        return compiled
    raise ValueError(f"unknown backend {which!r}")
