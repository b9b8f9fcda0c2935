"""
ringbif MCP Server

Bifurcation analysis of the polygonal vortex and filament ring, exposed
to AI agents as read-only tools.

Tools:
  - equilibrium: ring equilibrium, gradient norm and Hessian kernel
  - hessian_blocks: analytic vs numeric blocks B_k
  - bifurcation_points: bifurcation frequencies with index jumps per k
  - spectrum: spectrum and Morse index of m_k(nu) on a grid
  - spectral_stability: stability window in mu and a numeric verdict
  - follow_branch: periodic branch continuation from a bifurcation point
  - simulate_ring: time integration from the perturbed ring

Resources:
  - reference://model, blocks, bifurcations, regions, conventions
  - server://version
"""

import json
import os
import sys
from typing import Optional

from fastmcp import FastMCP

from ringbif import __version__
from ringbif.resources.reference import get_resource, list_resources
from ringbif.tools.bifurcations import bifurcation_table, spectrum_table
from ringbif.tools.blocks import block_table
from ringbif.tools.branch import run_branch
from ringbif.tools.equilibrium import equilibrium_report
from ringbif.tools.simulate import run_simulation
from ringbif.tools.stability import stability_report

TOOLS = [
    "equilibrium",
    "hessian_blocks",
    "bifurcation_points",
    "spectrum",
    "spectral_stability",
    "follow_branch",
    "simulate_ring",
]

# Branch and trajectory payloads are trimmed for MCP clients.
MAX_BRANCH_STEPS = 200
MAX_SIMULATION_TIME = 1000.0

print(f"[ringbif] MCP server {__version__} starting", file=sys.stderr)

mcp = FastMCP(
    "ringbif",
    instructions=(
        "Bifurcation analysis of n point vortices (or nearly parallel vortex filaments) "
        "on a regular polygon around a central element of circulation mu. "
        "Tools: equilibrium check, Hessian block decomposition, bifurcation frequencies "
        "with index jumps, m_k(nu) spectra, spectral stability window, periodic-branch "
        "continuation and time integration. See reference:// resources for formulas "
        "and conventions."
    ),
)

_ANNOTATIONS = {
    "readOnlyHint": True,
    "destructiveHint": False,
    "idempotentHint": True,
    "openWorldHint": False,
}


def _run(func, **kwargs) -> str:
    try:
        return json.dumps(func(**kwargs), indent=2, default=str)
    except Exception as e:
        return json.dumps({"error": str(e)})


# --- Tools ---


@mcp.tool(annotations={"title": "Ring Equilibrium", **_ANNOTATIONS})
def equilibrium(n: int, mu: float = 0.0) -> str:
    """Check that the n-gon with a central element is an equilibrium of the rotating frame.

    Args:
        n: Number of peripheral elements (>= 2).
        mu: Circulation of the central element.

    Returns:
        JSON with positions, omega, s1, gradient norm, Hessian kernel dimension and eigenvalues.
    """
    return _run(equilibrium_report, n=n, mu=mu)


@mcp.tool(annotations={"title": "Hessian Blocks", **_ANNOTATIONS})
def hessian_blocks(n: int, mu: float = 0.0) -> str:
    """Block-diagonalize the Hessian at the ring and compare with the closed-form blocks B_k.

    Returns:
        JSON with analytic and numeric B_k (real and imaginary parts), deviations,
        the off-block residual and the B_(n-k) = conj(B_k) check.
    """
    return _run(block_table, n=n, mu=mu)


@mcp.tool(annotations={"title": "Bifurcation Points", **_ANNOTATIONS})
def bifurcation_points(
    n: int,
    mu: float = 0.0,
    kind: str = "vortex",
    gamma: float = 0.0,
    method: str = "auto",
    nu_max: Optional[float] = None,
) -> str:
    """List bifurcation frequencies of periodic solutions for every block k.

    Args:
        n: Number of peripheral elements (>= 2).
        mu: Central circulation.
        kind: "vortex" or "filament" (traveling waves).
        gamma: Traveling-wave speed (filament only).
        method: "auto" (closed forms, scanning where none exist) or "scan".
        nu_max: Upper frequency limit.

    Returns:
        JSON with points sorted by k then nu: nu, index jump eta, symmetry label,
        provenance and det residual. Degenerate parameters return an error.
    """
    return _run(bifurcation_table, kind=kind, n=n, mu=mu, gamma=gamma, method=method, nu_max=nu_max)


@mcp.tool(annotations={"title": "Block Spectrum", **_ANNOTATIONS})
def spectrum(
    n: int,
    mu: float = 0.0,
    kind: str = "vortex",
    gamma: float = 0.0,
    k: Optional[int] = None,
    nu_max: Optional[float] = None,
    grid: int = 100,
) -> str:
    """Eigenvalues, Morse index, kernel dimension and determinant of m_k(nu) on [0, nu_max].

    Args:
        k: One block, or all blocks when omitted.
        grid: Number of frequency intervals.
    """
    return _run(spectrum_table, kind=kind, n=n, mu=mu, gamma=gamma, k=k, nu_max=nu_max, grid=grid)


@mcp.tool(annotations={"title": "Spectral Stability", **_ANNOTATIONS})
def spectral_stability(n: int, check_mu: Optional[float] = None) -> str:
    """Interval of mu where the vortex ring can be spectrally stable (n >= 3).

    Args:
        check_mu: Also eigensolve the linearized flow at this mu.
    """
    return _run(stability_report, n=n, check_mu=check_mu)


@mcp.tool(annotations={"title": "Follow Branch", **_ANNOTATIONS})
def follow_branch(
    n: int,
    k: int,
    mu: float = 0.0,
    kind: str = "vortex",
    gamma: float = 0.0,
    point: Optional[str] = None,
    amplitude: float = 1e-3,
    steps: int = 20,
    truncation: int = 16,
) -> str:
    """Continue the periodic branch born at a bifurcation point of block k.

    Args:
        point: "nu_plus", "nu_minus", "nu_bar_plus", "nu_bar_minus", "nu0" or "scan:INDEX";
            defaults to the lowest frequency.
        amplitude: Starting first-harmonic amplitude.
        steps: Continuation steps (at most 200).

    Returns:
        JSON with per-state nu, amplitude, residuals, the termination class and
        the sampled final loop.
    """
    if steps > MAX_BRANCH_STEPS:
        return json.dumps({"error": f"steps must be <= {MAX_BRANCH_STEPS}"})
    return _run(
        run_branch,
        kind=kind,
        n=n,
        mu=mu,
        gamma=gamma,
        k=k,
        point=point,
        amplitude=amplitude,
        steps=steps,
        truncation=truncation,
    )


@mcp.tool(annotations={"title": "Simulate Ring", **_ANNOTATIONS})
def simulate_ring(
    n: int,
    mu: float,
    kind: str = "vortex",
    gamma: float = 0.0,
    perturb: float = 1e-4,
    k: int = 1,
    t_end: float = 50.0,
    method: str = "dp54",
    seed: Optional[int] = None,
) -> str:
    """Integrate from the ring plus a mode-k (or seeded random) perturbation.

    Returns:
        JSON with conserved-quantity drift, minimum distance, collision (if any)
        and the dominant frequency of the perturbation. Samples are omitted.
    """
    if t_end > MAX_SIMULATION_TIME:
        return json.dumps({"error": f"t_end must be <= {MAX_SIMULATION_TIME:g}"})
    return _run(
        run_simulation,
        kind=kind,
        n=n,
        mu=mu,
        gamma=gamma,
        perturb=perturb,
        k=k,
        t_end=t_end,
        method=method,
        seed=seed,
        include_samples=False,
    )


# --- Resources ---


@mcp.resource("reference://model")
def model_reference() -> str:
    """Potential, equations of motion and the periodic problem."""
    return get_resource("model")


@mcp.resource("reference://blocks")
def blocks_reference() -> str:
    """Closed-form Hessian blocks and frequency blocks."""
    return get_resource("blocks")


@mcp.resource("reference://bifurcations")
def bifurcations_reference() -> str:
    """Bifurcation closed forms, index jumps and degeneracies."""
    return get_resource("bifurcations")


@mcp.resource("reference://regions")
def regions_reference() -> str:
    """Morse regions of the k = 1 vortex block."""
    return get_resource("regions")


@mcp.resource("reference://conventions")
def conventions_reference() -> str:
    """Coordinates, group action, tolerances and output formats."""
    return get_resource("conventions")


@mcp.resource("server://version")
def server_version() -> str:
    """Server version and status information."""
    return json.dumps({
        "name": "ringbif",
        "version": __version__,
        "tools": TOOLS,
        "resources": [r["uri"] for r in list_resources()],
    }, indent=2)


def main():
    """Entry point for the MCP server."""
    transport = os.getenv("MCP_TRANSPORT", "stdio")
    if transport == "streamable-http":
        host = os.getenv("MCP_HOST", "0.0.0.0")
        port = int(os.getenv("MCP_PORT", os.getenv("PORT", "8000")))
        mcp.run(transport="streamable-http", host=host, port=port)
    else:
        mcp.run()


if __name__ == "__main__":
    main()
