"""
bifurcation_table and spectrum_table tools

Lists the bifurcation frequencies of every block with their index jumps,
and tabulates the spectrum of m_k(nu) over a frequency grid. The per-k
work is independent and fans out to a thread pool.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from ringbif.config import worker_count
from ringbif.core.model import Kind, ProblemParams
from ringbif.core.spectral import (
    DEFAULT_GRID,
    TOL_ZERO,
    bif_points,
    block_family,
    check_degeneracy,
    default_nu_max,
    scan_bif_points,
    sigma,
)

logger = logging.getLogger(__name__)

SPECTRUM_GRID = 200
METHODS = ("auto", "scan")


def _per_k(func: Callable[[int], list], ks: list[int]) -> list:
    workers = min(worker_count(), len(ks))
    if workers <= 1:
        return [func(k) for k in ks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, ks))


def make_params(kind: str, n: int, mu: float, gamma: float) -> ProblemParams:
    return ProblemParams(n, mu, gamma, Kind(kind))


def bifurcation_table(
    kind: str = "vortex",
    n: int = 4,
    mu: float = 0.0,
    gamma: float = 0.0,
    nu_max: Optional[float] = None,
    grid: int = DEFAULT_GRID,
    method: str = "auto",
) -> dict:
    """Bifurcation points of every block k = 1..n, sorted by k then nu.

    Args:
        method: "auto" uses the closed forms where they exist and scans
            otherwise; "scan" scans every block on [0, nu_max].
        nu_max: Upper end of the scan window; in "auto" mode closed-form
            points above it are dropped.

    Raises:
        DegenerateParameterError: mu on a degeneracy curve or omega = 0.
    """
    if method not in METHODS:
        raise ValueError(f"Invalid method: {method}. Use one of {', '.join(METHODS)}.")
    params = make_params(kind, n, mu, gamma)
    check_degeneracy(params)

    def points_for(k: int):
        if method == "scan":
            return scan_bif_points(k, params, nu_max=nu_max, grid=grid)
        found = bif_points(k, params)
        if nu_max is not None:
            found = [p for p in found if p.nu0 <= nu_max]
        return found

    per_k = _per_k(points_for, list(range(1, n + 1)))
    points = [p.to_dict() for found in per_k for p in found]
    points.sort(key=lambda p: (p["k"], p["nu"]))
    logger.debug("%s n=%d mu=%g gamma=%g: %d points", kind, n, mu, gamma, len(points))

    return {
        "kind": params.kind.value,
        "n": params.n,
        "mu": params.mu,
        "gamma": params.gamma,
        "omega": params.omega,
        "sigma": sigma(params),
        "method": method,
        "points": points,
        "count_by_k": {k: sum(1 for p in points if p["k"] == k) for k in range(1, n + 1)},
    }


def _track(eigs: np.ndarray) -> np.ndarray:
    """Reorder each row of eigenvalues to continue the curves of the previous rows."""
    tracked = eigs.copy()
    for i in range(1, len(tracked)):
        guess = tracked[i - 1] if i == 1 else 2.0 * tracked[i - 1] - tracked[i - 2]
        cost = np.abs(guess[:, None] - eigs[i][None, :])
        _, cols = linear_sum_assignment(cost)
        tracked[i] = eigs[i][cols]
    return tracked


def spectrum_table(
    kind: str = "vortex",
    n: int = 4,
    mu: float = 0.0,
    gamma: float = 0.0,
    k: Optional[int] = None,
    nu_max: Optional[float] = None,
    grid: int = SPECTRUM_GRID,
    track: bool = True,
) -> dict:
    """Eigenvalues, Morse index, kernel dimension and det of m_k(nu) on [0, nu_max].

    With ``track`` the eigenvalue columns follow continuous curves across
    crossings instead of being sorted at every nu.
    """
    params = make_params(kind, n, mu, gamma)
    if grid < 2:
        raise ValueError(f"grid must be >= 2, got {grid}")
    ks = list(range(1, n + 1)) if k is None else [k]
    if k is not None and not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}, got {k}")
    if nu_max is None:
        nu_max = max(default_nu_max(j, params) for j in ks)
    if not nu_max > 0:
        raise ValueError(f"nu_max must be positive, got {nu_max}")
    nus = np.linspace(0.0, nu_max, grid + 1)

    def rows_for(j: int) -> list[dict]:
        blocks = block_family(j, params)(nus)
        eigs = np.linalg.eigvalsh(blocks)
        dets = np.real(np.linalg.det(blocks))
        morse = np.sum(eigs < -TOL_ZERO, axis=-1)
        kernel = np.sum(np.abs(eigs) <= TOL_ZERO, axis=-1)
        shown = _track(eigs) if track else eigs
        return [
            {
                "k": j,
                "nu": float(nu),
                "eigenvalues": shown[i].tolist(),
                "morse_index": int(morse[i]),
                "kernel_dim": int(kernel[i]),
                "det": float(dets[i]),
            }
            for i, nu in enumerate(nus)
        ]

    rows = [row for block_rows in _per_k(rows_for, ks) for row in block_rows]
    return {
        "kind": params.kind.value,
        "n": params.n,
        "mu": params.mu,
        "gamma": params.gamma,
        "nu_max": float(nu_max),
        "grid": grid,
        "rows": rows,
    }
