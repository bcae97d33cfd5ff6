"""Global tolerances and size guardrails.

Both can be overridden through the environment:
``COARSEKIT_EPSILON`` and ``COARSEKIT_MAX_POINTS``.
"""
from __future__ import annotations

import os

DEFAULT_EPSILON = 1e-9
DEFAULT_MAX_POINTS = 20_000


def get_epsilon(eps: float | None = None) -> float:
    if eps is not None:
        return float(eps)
    return float(os.environ.get("COARSEKIT_EPSILON", DEFAULT_EPSILON))


def get_max_points(cap: int | None = None) -> int:
    if cap is not None:
        return int(cap)
    return int(os.environ.get("COARSEKIT_MAX_POINTS", DEFAULT_MAX_POINTS))
