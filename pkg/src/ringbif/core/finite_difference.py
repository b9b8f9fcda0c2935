"""
Central-difference oracles for checking the analytic gradient and Hessian.

Fixed steps, no adaptive refinement: h = 1e-6 for gradients of a scalar
function, h = 1e-5 for Jacobians of a vector function.
"""

from __future__ import annotations

import logging
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray

logger = logging.getLogger(__name__)

GRADIENT_STEP = 1e-6
HESSIAN_STEP = 1e-5
RELATIVE_FLOOR = 1e-12


def fd_gradient(
    func: Callable[[NDArray[np.float64]], float], x0: ArrayLike, h: float = GRADIENT_STEP
) -> NDArray[np.float64]:
    """Centered-difference gradient of a scalar function."""
    x0 = np.asarray(x0, dtype=float)
    logger.debug("finite-difference gradient in %d variables, h=%g", x0.size, h)
    grad = np.zeros(x0.size)
    for j in range(x0.size):
        x = x0.copy()
        x[j] = x0[j] + h
        fplus = func(x)
        x[j] = x0[j] - h
        fminus = func(x)
        grad[j] = (fplus - fminus) / (2 * h)
    return grad


def fd_jacobian(
    func: Callable[[NDArray[np.float64]], NDArray[np.float64]],
    x0: ArrayLike,
    h: float = HESSIAN_STEP,
) -> NDArray[np.float64]:
    """Centered-difference Jacobian; applied to a gradient it gives the Hessian."""
    x0 = np.asarray(x0, dtype=float)
    eye = h * np.eye(x0.size)
    plus = np.array([func(x0 + e) for e in eye])
    minus = np.array([func(x0 - e) for e in eye])
    return ((plus - minus) / (2 * h)).T


def fd_hessian(grad: Callable, x0: ArrayLike, h: float = HESSIAN_STEP) -> NDArray[np.float64]:
    jac = fd_jacobian(grad, x0, h)
    return 0.5 * (jac + jac.T)


def max_relative_error(analytic: ArrayLike, approx: ArrayLike, floor: float = RELATIVE_FLOOR) -> float:
    """Largest entry deviation over the largest analytic entry (at least floor)."""
    analytic = np.asarray(analytic, dtype=float)
    approx = np.asarray(approx, dtype=float)
    scale = max(float(np.max(np.abs(analytic))), floor)
    return float(np.max(np.abs(analytic - approx))) / scale
