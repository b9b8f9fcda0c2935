"""
equilibrium_report tool

Checks that the polygon with a central element is a critical point of the
rotating-frame potential and reports the kernel of its Hessian.
"""

import numpy as np

from ringbif.core.model import (
    ProblemParams,
    angular_impulse,
    grad_potential,
    hess_potential,
    potential,
    ring_equilibrium,
)

EQUILIBRIUM_TOL = 1e-10
KERNEL_TOL = 1e-8


def equilibrium_report(n: int, mu: float = 0.0) -> dict:
    """Equilibrium positions, omega, gradient norm and Hessian kernel.

    Args:
        n: Number of peripheral elements (>= 2).
        mu: Circulation of the central element.

    Returns:
        Report dict; ``is_equilibrium`` is true when the gradient norm is below 1e-10.
    """
    params = ProblemParams(n, mu)
    cfg = ring_equilibrium(params)
    grad_norm = float(np.linalg.norm(grad_potential(cfg, params)))
    eigs = np.linalg.eigvalsh(hess_potential(cfg, params))
    scale = 1.0 + float(np.max(np.abs(eigs)))
    kernel_dim = int(np.sum(np.abs(eigs) <= KERNEL_TOL * scale))

    return {
        "n": params.n,
        "mu": params.mu,
        "s1": params.s1,
        "omega": params.omega,
        "positions": cfg.positions.tolist(),
        "potential": float(potential(cfg, params)),
        "angular_impulse": float(angular_impulse(cfg, params)),
        "grad_norm": grad_norm,
        "kernel_dim": kernel_dim,
        "hessian_eigenvalues": eigs.tolist(),
        "is_equilibrium": grad_norm < EQUILIBRIUM_TOL,
    }
