"""
run_simulation tool

Integrates the vortex or traveling-wave filament system from the ring
equilibrium plus a small perturbation, along a mode-k direction or a
seeded random direction.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from ringbif.core.dynamics import IntegratorConfig, dominant_frequency, integrate, mode_direction
from ringbif.core.model import Configuration, Kind, ring_equilibrium
from ringbif.tools.bifurcations import make_params

MIN_FREQUENCY_SAMPLES = 64


def trajectory_columns(n: int, with_velocities: bool) -> list[str]:
    columns = ["t"]
    for j in range(n + 1):
        columns += [f"x{j}", f"y{j}"]
    if with_velocities:
        for j in range(n + 1):
            columns += [f"vx{j}", f"vy{j}"]
    return columns


def run_simulation(
    kind: str = "vortex",
    n: int = 4,
    mu: float = 1.0,
    gamma: float = 0.0,
    perturb: float = 0.0,
    k: int = 1,
    t_end: float = 10.0,
    tol: float = 1e-10,
    method: str = "dp54",
    sample_dt: float = 1e-2,
    seed: Optional[int] = None,
    include_samples: bool = True,
) -> dict:
    """Integrate from a perturbed ring and report drift, collision and dominant frequency.

    Args:
        perturb: Size of the initial displacement.
        k: Block whose mode direction is used when no seed is given.
        seed: Seed for a random unit displacement direction instead.
        include_samples: Attach the sampled trajectory rows.

    Raises:
        UnsupportedParameterError: mu = 0.
    """
    params = make_params(kind, n, mu, gamma)
    icfg = IntegratorConfig(method=method, t_end=t_end, tol=tol, sample_dt=sample_dt)

    if seed is not None:
        direction = np.random.default_rng(seed).standard_normal(params.size)
        direction /= np.linalg.norm(direction)
    else:
        direction = mode_direction(n, k)
    start = ring_equilibrium(params).flat() + perturb * direction
    traj = integrate(Configuration(start), params, icfg)

    result = {**traj.summary(), "perturb": perturb, "k": k, "seed": seed, "method": icfg.method.value}
    signal = traj.project(direction)
    if perturb > 0 and not traj.collided and len(signal) >= MIN_FREQUENCY_SAMPLES:
        result["dominant_frequency"] = dominant_frequency(signal, sample_dt)

    if include_samples:
        with_velocities = params.kind is Kind.FILAMENT
        result["columns"] = trajectory_columns(n, with_velocities)
        blocks = [traj.times[:, None], traj.positions.reshape(len(traj.times), -1)]
        if with_velocities:
            blocks.append(traj.velocities.reshape(len(traj.times), -1))
        result["rows"] = np.hstack(blocks).tolist()
    return result
