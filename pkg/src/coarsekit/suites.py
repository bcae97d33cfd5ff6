"""Randomized certificate trials shared by the CLI and the test-suite."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .actions import QuasiAction
from .config import get_epsilon
from .fibrations import CoarseFibration, descend_map, orbit_fibration
from .generate import isometric_action, perturb, random_fibration, random_space, random_subgroup
from .groups import small_groups
from .metric import Subset
from .quasimaps import QuasiMap

RADII = (0.0, 0.5, 1.0, 1.5, 2.0)
PROBE_L = (1.0, 1.0, 1.5, 2.0)


@dataclass(frozen=True)
class TrialResult:
    seed: int
    trial: int
    group: str
    order: int
    size: int
    radius: float
    L: float
    A_qa: float
    fibration_A: float
    fibration_bound: float
    descent_A: float
    descent_bound: float
    action: QuasiAction


def random_quasi_action(seed: int, trial: int, max_size: int = 30) -> tuple[str, QuasiAction, float, float]:
    rng = np.random.default_rng([seed, trial])
    groups = small_groups()
    name = list(groups)[int(rng.integers(len(groups)))]
    H = random_subgroup(rng, groups[name])
    size = int(rng.integers(2, max_size + 1))
    radius = float(rng.choice(RADII))
    L = float(rng.choice(PROBE_L))
    rho = perturb(rng, isometric_action(rng, H.group, size), radius)
    return f"{name}>{len(H)}", rho, radius, L


def certificate_trial(seed: int, trial: int, max_size: int = 30,
                      eps: float | None = None) -> TrialResult:
    """Orbit-fibration and descent certificates for one random quasi-action."""
    eps = get_epsilon(eps)
    name, rho, radius, L = random_quasi_action(seed, trial, max_size)
    orb = orbit_fibration(rho, L, eps, check=False)
    rng = np.random.default_rng([seed, trial, 1])
    g = rho.group.elements[int(rng.integers(len(rho.group)))]
    dm = descend_map(rho.map(g), orb.fibration, orb.fibration, L, eps, check=False)
    return TrialResult(
        seed, trial, name, len(rho.group), len(rho.space), radius, L,
        orb.action_report.A_qa, orb.report.A, 3 * orb.action_report.A_qa,
        dm.report.A, dm.bound, rho,
    )


@dataclass(frozen=True)
class DescentTrial:
    A: float
    C: float
    base_A: float
    L: float


def random_descent_trial(seed: int, trial: int, eps: float | None = None) -> DescentTrial:
    """Arbitrary map between random graph spaces with random covering families."""
    eps = get_epsilon(eps)
    rng = np.random.default_rng([seed, trial, 2])
    Y = random_space(rng, int(rng.integers(3, 16)))
    Y2 = random_space(rng, int(rng.integers(3, 16)), prefix="y")
    phi = QuasiMap(Y, Y2, rng.integers(len(Y2), size=len(Y)))
    F = CoarseFibration(Y, [Subset(Y, m) for m in random_fibration(rng, Y)])
    F2 = CoarseFibration(Y2, [Subset(Y2, m) for m in random_fibration(rng, Y2)])
    L = float(rng.choice(PROBE_L))
    dm = descend_map(phi, F, F2, L, eps, check=False)
    return DescentTrial(dm.source_report.A, dm.C, dm.report.A, L)
