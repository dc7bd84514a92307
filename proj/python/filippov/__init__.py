"""Planar Filippov systems from Python.

Structured results come back as plain dicts and lists.
"""

import json as _json

from ._filippov import Expr, FilippovError, System
from . import _filippov as _core

__all__ = [
    "Expr",
    "FilippovError",
    "System",
    "circle_winding",
    "classify_point",
    "convergence_study",
    "detect_canard",
    "direction_function",
    "fold_census",
    "hybrid_orbit",
    "pseudo_equilibria",
    "sigma_loop_scan",
    "sliding_field",
    "slow_manifold",
    "trace_slow_dynamics",
    "winding",
]

direction_function = _core.direction_function
sliding_field = _core.sliding_field
slow_manifold = _core.slow_manifold


def _decoded(fn):
    def wrapper(*args, **kwargs):
        return _json.loads(fn(*args, **kwargs))

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


classify_point = _decoded(_core.classify_point)
pseudo_equilibria = _decoded(_core.pseudo_equilibria)
fold_census = _decoded(_core.fold_census)
hybrid_orbit = _decoded(_core.hybrid_orbit)
detect_canard = _decoded(_core.detect_canard)
sigma_loop_scan = _decoded(_core.sigma_loop_scan)
convergence_study = _decoded(_core.convergence_study)
winding = _decoded(_core.winding)
circle_winding = _decoded(_core.circle_winding)
trace_slow_dynamics = _decoded(_core.trace_slow_dynamics)
