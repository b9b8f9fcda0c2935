"""
Exception hierarchy.

Everything derives from ValueError so callers can keep catching the
built-in type; the subclasses carry the context the CLI and server report.
"""

from __future__ import annotations

from typing import Optional


class RingBifError(ValueError):
    """Base class for analysis-level failures."""


class CollisionError(RingBifError):
    """Two elements coincide (or come closer than the collision threshold)."""

    def __init__(self, i: int, j: int, distance: float, node: Optional[int] = None):
        self.pair = (i, j)
        self.distance = distance
        self.node = node
        where = f" at quadrature node {node}" if node is not None else ""
        super().__init__(
            f"collision between elements {i} and {j}{where} (distance {distance:.3e})"
        )


class UnsupportedParameterError(RingBifError):
    """The requested operation is undefined for these parameters."""


class DegenerateParameterError(RingBifError):
    """Parameters sit on a degeneracy curve of the bifurcation analysis."""

    def __init__(self, degeneracy: str, detail: str = ""):
        self.degeneracy = degeneracy
        message = f"degenerate parameters: {degeneracy}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


class ProbeWidthError(RingBifError):
    """The index-jump probes could not be placed off the kernel."""


class BoundaryError(RingBifError):
    """A point handed to region classification lies on a boundary curve."""


class DegenerateBifurcationError(RingBifError):
    """The kernel at a bifurcation point is not one-dimensional."""


class ConvergenceError(RingBifError):
    """Newton correction did not reach the requested residual."""

    def __init__(self, message: str, iterations: int = 0, residual_norm: float = float("nan")):
        self.iterations = iterations
        self.residual_norm = residual_norm
        super().__init__(message)


class NearDegeneracyError(ConvergenceError):
    """The augmented Jacobian is numerically singular."""

    def __init__(self, condition: float, iterations: int = 0, residual_norm: float = float("nan")):
        self.condition = condition
        super().__init__(
            f"near-degenerate Jacobian (condition number {condition:.3e})",
            iterations=iterations,
            residual_norm=residual_norm,
        )
