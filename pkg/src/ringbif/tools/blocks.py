"""
block_table tool

Compares the closed-form blocks B_k with the blocks extracted numerically
from P* D^2V(a) P and checks B_{n-k} = conj(B_k).
"""

import numpy as np

from ringbif.core.model import ProblemParams, hess_potential, ring_equilibrium
from ringbif.core.symmetry import analytic_Bk, decompose_hessian

BLOCK_TOL = 1e-8


def complex_matrix(M: np.ndarray) -> dict:
    return {"re": np.real(M).tolist(), "im": np.imag(M).tolist()}


def block_table(n: int, mu: float = 0.0) -> dict:
    """Analytic and numeric B_k side by side with their largest deviation.

    Returns:
        Report dict with one row per k in 1..n, the off-block residual and
        ``ok`` (every deviation and the residual at most 1e-8).
    """
    params = ProblemParams(n, mu)
    H = hess_potential(ring_equilibrium(params), params)
    decomposition = decompose_hessian(H, n)

    rows = []
    for k in range(1, n + 1):
        analytic = analytic_Bk(params, k)
        numeric = decomposition.blocks[k]
        partner = decomposition.blocks[n - k] if k < n else None
        rows.append(
            {
                "k": k,
                "dim": int(analytic.shape[0]),
                "deviation": float(np.max(np.abs(analytic - numeric))),
                "conjugate_deviation": None
                if partner is None
                else float(np.max(np.abs(partner - numeric.conj()))),
                "analytic": complex_matrix(analytic),
                "numeric": complex_matrix(numeric),
            }
        )

    max_deviation = max(r["deviation"] for r in rows)
    conj = [r["conjugate_deviation"] for r in rows if r["conjugate_deviation"] is not None]
    return {
        "n": params.n,
        "mu": params.mu,
        "omega": params.omega,
        "off_block_residual": decomposition.residual,
        "max_deviation": max_deviation,
        "conjugate_ok": all(c <= BLOCK_TOL for c in conj),
        "ok": max_deviation <= BLOCK_TOL and decomposition.residual <= BLOCK_TOL,
        "blocks": rows,
    }
