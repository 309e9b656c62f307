"""Insertion-scan kernels: compiled extension when available, pure Python otherwise.

Set DPRLNS_PURE=1 to force the pure-Python fallback.  ``use_pure`` swaps the
active implementation at runtime (used by the kernel benchmark and tests).
"""

import os

from . import _slow

try:
    from . import _fast
except ImportError:  # extension not built on this install
    _fast = None

HAVE_FAST = _fast is not None

_impl = _slow if (os.environ.get("DPRLNS_PURE") == "1" or _fast is None) else _fast


def use_pure(flag: bool) -> None:
    global _impl
    if not flag and _fast is None:
        raise RuntimeError("compiled kernel is not available")
    _impl = _slow if flag else _fast


def active() -> str:
    return "pure" if _impl is _slow else "compiled"


def scan_route(dist, demand, tw_start, tw_end, service, capacity, t_max, route, c):
    return _impl.scan_route(dist, demand, tw_start, tw_end, service, capacity, t_max, route, c)
