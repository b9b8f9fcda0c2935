"""
run_branch tool

Starts a periodic branch at a chosen bifurcation point of block k:
predictor from the kernel of m_k, amplitude-pinned correction, then
pseudo-arclength continuation. Reports every state plus sampled loops
for the first and last state.
"""

from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np

from ringbif.core.continuation import (
    DEFAULT_TRUNCATION,
    Constraints,
    ContinuationSettings,
    FourierLoop,
    continue_branch,
    galerkin_residual,
    loop_potential_drift,
    newton_correct,
    predictor,
)
from ringbif.core.model import Kind
from ringbif.core.spectral import BifurcationPoint, bif_points, scan_bif_points
from ringbif.tools.bifurcations import make_params

logger = logging.getLogger(__name__)

LOOP_SAMPLES = 64
POINT_LABELS = ("nu_plus", "nu_minus", "nu_bar_plus", "nu_bar_minus", "nu0", "nu1", "nu_s1", "nu_k")


def select_point(points: list[BifurcationPoint], point: Optional[str], k: int) -> BifurcationPoint:
    """The point with the given label, or the lowest-frequency one."""
    if not points:
        raise ValueError(f"block k={k} has no bifurcation points for these parameters")
    if point is None:
        return points[0]
    if point.startswith("scan:"):
        try:
            index = int(point.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"Invalid point: {point}. Use scan:INDEX.") from None
        if not 0 <= index < len(points):
            raise ValueError(f"scan index {index} out of range (k={k} has {len(points)} points)")
        return points[index]
    for p in points:
        if p.label == point:
            return p
    labels = ", ".join(p.label for p in points)
    raise ValueError(f"no point labelled {point} for k={k}; available: {labels}")


def _loop_rows(loop: FourierLoop, samples: int = LOOP_SAMPLES) -> list[list[float]]:
    """Rows (t, x0, y0, x1, y1, ...) over one period in physical time."""
    s = 2.0 * math.pi * np.arange(samples + 1) / samples
    positions = loop.evaluate(s).reshape(samples + 1, -1)
    t = s / loop.nu
    return np.column_stack([t, positions]).tolist()


def run_branch(
    kind: str = "vortex",
    n: int = 4,
    mu: float = 0.0,
    gamma: float = 0.0,
    k: int = 1,
    point: Optional[str] = None,
    amplitude: float = 1e-3,
    steps: int = 30,
    truncation: int = DEFAULT_TRUNCATION,
    step: Optional[float] = None,
) -> dict:
    """Follow the periodic branch born at a bifurcation point of block k.

    Args:
        point: Label of the bifurcation point (``nu_plus``, ``nu0``, ...) or
            ``scan:INDEX`` to pick from a scan; defaults to the lowest nu.
        amplitude: First-harmonic amplitude 2|x_1| of the starting loop.
        steps: Continuation steps after the starting loop.
        step: Arclength step; defaults to the amplitude.

    Raises:
        ConvergenceError: the starting loop could not be corrected.
    """
    if not amplitude > 0:
        raise ValueError(f"amplitude must be positive, got {amplitude}")
    if steps < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")
    params = make_params(kind, n, mu, gamma)
    if not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}, got {k}")

    if point is not None and point.startswith("scan:"):
        points = scan_bif_points(k, params)
    else:
        points = bif_points(k, params)
    bp = select_point(points, point, k)
    logger.info("k=%d: starting at %s nu=%.12g (eta=%d)", k, bp.label, bp.nu0, bp.eta)

    guess = predictor(k, bp, amplitude, params, truncation)
    start = newton_correct(guess, params, Constraints(amplitude=amplitude), k=k)
    settings = ContinuationSettings(step=step if step is not None else amplitude)
    branch = continue_branch(start, steps, params, settings, k=k, nu_onset=bp.nu0)

    records = branch.records()
    first, last = branch.states[0].loop, branch.states[-1].loop
    galerkin = [float(np.max(np.abs(galerkin_residual(s.loop, params)))) for s in branch.states]
    for record, value in zip(records, galerkin):
        record["galerkin_residual"] = value

    result = {
        "kind": params.kind.value,
        "n": params.n,
        "mu": params.mu,
        "gamma": params.gamma,
        "k": k,
        "truncation": truncation,
        "point": bp.to_dict(),
        "nu_start": first.nu,
        "nu_offset": first.nu - bp.nu0,
        "termination": branch.termination.value,
        "failure": branch.failure,
        "direction": branch.direction,
        "state_count": len(branch.states),
        "max_galerkin_residual": max(galerkin),
        "max_symmetry_residual": max(r["symmetry_residual"] for r in records),
        "central_fixed_by_symmetry": math.gcd(k, n) > 1,
        "max_central_displacement": float(np.max(np.abs(last.nodes()[:, 0, :]))),
        "states": records,
        "loops": {"start": _loop_rows(first), "final": _loop_rows(last)},
    }
    if params.kind is Kind.VORTEX:
        result["potential_drift"] = loop_potential_drift(last, params)
    return result
