"""
Spectral Analysis

Frequency blocks m_k(nu) of the linearized periodic problem, their Morse
indices and index jumps, closed-form and scanned bifurcation frequencies,
Morse-region classification and the spectral-stability window.

    vortex:    m_k(nu) = -nu G_k + B_k
    filament:  m_k(nu) = nu^2 K_k - 2 gamma nu G_k + B_k

G_k is the gyroscopic form i J restricted to W_k (mu on the central
coordinate of W_1, -mu on W_{n-1}) and K_k the squared circulations.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Union

import numpy as np
import scipy.linalg as spl
from numpy.typing import NDArray
from scipy.optimize import brentq

from ringbif.core.errors import (
    BoundaryError,
    DegenerateParameterError,
    ProbeWidthError,
    UnsupportedParameterError,
)
from ringbif.core.model import Kind, ProblemParams, vortex_linearization
from ringbif.core.symmetry import analytic_Bk, central_columns

logger = logging.getLogger(__name__)

TOL_ZERO = 1e-9
DEFAULT_GRID = 2000
ROOT_TOL = 1e-10
MIN_PROBE = 1e-10
REAL_ROOT_TOL = 1e-6
STABILITY_TOL = 1e-8
BOUNDARY_DISTANCE = 1e-6

_IJ = np.array([[0.0, -1.0j], [1.0j, 0.0]])
_SUBDIVISION = 32
_MAX_DEPTH = 2


class Provenance(str, Enum):
    CLOSED_FORM = "closed-form"
    SCAN = "scan"


@dataclass(frozen=True, eq=False)
class SpectralBlock:
    k: int
    nu: float
    matrix: NDArray[np.complex128]

    @property
    def eigenvalues(self) -> NDArray[np.float64]:
        return np.linalg.eigvalsh(self.matrix)

    @property
    def det(self) -> float:
        return float(np.real(np.linalg.det(self.matrix)))


@dataclass(frozen=True)
class BifurcationPoint:
    k: int
    nu0: float
    eta: int
    symmetry: str
    provenance: Provenance
    label: str
    det_residual: float = 0.0

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "nu": self.nu0,
            "eta": self.eta,
            "symmetry": self.symmetry,
            "provenance": self.provenance.value,
            "label": self.label,
            "det_residual": self.det_residual,
        }


@dataclass(frozen=True)
class StabilityReport:
    n: int
    mu_window: tuple[float, float]
    mu: Optional[float] = None
    inside_window: Optional[bool] = None
    spectral_ok: Optional[bool] = None
    max_real_part: Optional[float] = None
    kernel_modulus: Optional[float] = None
    root_count: Optional[int] = None
    real_root_count: Optional[int] = None


@dataclass(frozen=True)
class RegionReport:
    n: int
    mu: float
    nu: float
    region: str
    morse_number: int
    numeric_morse_index: int

    @property
    def consistent(self) -> bool:
        return self.morse_number == self.numeric_morse_index


def symmetry_label(n: int, k: int) -> str:
    return f"Z{n}({k})"


# --- Blocks ---


def _check_k(params: ProblemParams, k: int) -> None:
    if not 1 <= k <= params.n:
        raise ValueError(f"k must be in 1..{params.n}, got {k}")


def _gyroscopic(params: ProblemParams, k: int) -> NDArray[np.complex128]:
    n, mu = params.n, params.mu
    if n == 2 and k == 1:
        return spl.block_diag(mu * _IJ, _IJ)
    if k == 1:
        return spl.block_diag([[mu]], _IJ).astype(complex)
    if k == n - 1:
        return spl.block_diag([[-mu]], _IJ).astype(complex)
    return _IJ.copy()


def _inertia(params: ProblemParams, k: int) -> NDArray[np.complex128]:
    n, mu = params.n, params.mu
    if n == 2 and k == 1:
        return np.diag([mu**2, mu**2, 1.0, 1.0]).astype(complex)
    if k in (1, n - 1):
        return np.diag([mu**2, 1.0, 1.0]).astype(complex)
    return np.eye(2, dtype=complex)


def block_coefficients(k: int, params: ProblemParams):
    """(A2, A1, A0) with m_k(nu) = nu^2 A2 + nu A1 + A0.

    For mu = 0 the central coordinates are a zero row and column and are dropped.
    """
    _check_k(params, k)
    B = analytic_Bk(params, k)
    G = _gyroscopic(params, k)
    if params.kind is Kind.VORTEX:
        A2 = np.zeros_like(B)
        A1 = -G
    else:
        A2 = _inertia(params, k)
        A1 = -2.0 * params.gamma * G

    central = central_columns(params.n, k)
    if params.mu == 0.0 and central:
        keep = [i for i in range(B.shape[0]) if i not in central]
        A2, A1, B = (A[np.ix_(keep, keep)] for A in (A2, A1, B))
    return A2, A1, B


def block_m(k: int, nu: float, params: ProblemParams) -> SpectralBlock:
    A2, A1, A0 = block_coefficients(k, params)
    return SpectralBlock(k=k, nu=float(nu), matrix=nu**2 * A2 + nu * A1 + A0)


def block_family(k: int, params: ProblemParams) -> Callable[[NDArray], NDArray]:
    """Vectorized nu -> m_k(nu) for arrays of frequencies."""
    A2, A1, A0 = block_coefficients(k, params)

    def evaluate(nus):
        nus = np.asarray(nus, dtype=float)[..., None, None]
        return nus**2 * A2 + nus * A1 + A0

    return evaluate


def block_roots(k: int, params: ProblemParams) -> NDArray[np.complex128]:
    """All finite complex roots of det m_k(nu), from the (companion) pencil."""
    A2, A1, A0 = block_coefficients(k, params)
    d = A0.shape[0]
    if params.kind is Kind.VORTEX:
        roots = spl.eigvals(A0, -A1)
    else:
        zero, eye = np.zeros((d, d)), np.eye(d)
        lhs = np.block([[zero, eye], [-A0, -A1]])
        rhs = np.block([[eye, zero], [zero, A2]])
        roots = spl.eigvals(lhs, rhs)
    roots = roots[np.isfinite(roots)]
    return roots[np.argsort(roots.real)]


def real_roots(k: int, params: ProblemParams) -> NDArray[np.float64]:
    roots = block_roots(k, params)
    mask = np.abs(roots.imag) <= REAL_ROOT_TOL * (1.0 + np.abs(roots.real))
    return np.sort(roots[mask].real)


def _as_matrix(block: Union[SpectralBlock, NDArray]) -> NDArray:
    return block.matrix if isinstance(block, SpectralBlock) else np.asarray(block)


def morse_index(block: Union[SpectralBlock, NDArray]) -> int:
    """Number of eigenvalues below -TOL_ZERO."""
    return int(np.sum(np.linalg.eigvalsh(_as_matrix(block)) < -TOL_ZERO))


def kernel_dimension(block: Union[SpectralBlock, NDArray]) -> int:
    return int(np.sum(np.abs(np.linalg.eigvalsh(_as_matrix(block))) <= TOL_ZERO))


# --- Sign, degeneracies and index jumps ---


def critical_mu(n: int, k: int) -> float:
    """mu_1 = s_1^2; mu_k = s_k/2 - s_1 for k >= 2."""
    s1 = (n - 1) / 2.0
    if k == 1:
        return s1**2
    return k * (n - k) / 4.0 - s1


def degeneracies(n: int) -> list[tuple[str, float]]:
    """Named values of mu where the bifurcation analysis breaks down."""
    s1 = (n - 1) / 2.0
    found = [("omega = 0", -s1)]
    if n == 2:
        found += [("mu = -5/4 (nu1 leaves zero)", -1.25), ("mu = -2 (nu0 and nu1 coincide)", -2.0)]
        return found
    found.append((f"mu = mu_1 = s_1^2 = {s1**2:g}", s1**2))
    for k in range(2, n // 2 + 1):
        value = critical_mu(n, k)
        found.append((f"mu = mu_{k} = s_{k}/2 - s_1 = {value:g}", value))
    return found


def check_degeneracy(params: ProblemParams) -> None:
    for name, value in degeneracies(params.n):
        if abs(params.mu - value) <= 1e-10 * (1.0 + abs(value)):
            raise DegenerateParameterError(name, f"n={params.n}, mu={params.mu:g}")


def sigma(params: ProblemParams) -> int:
    """Sign of e_1^T B_n e_1, i.e. of omega."""
    if abs(params.omega) < 1e-12:
        raise DegenerateParameterError("omega = 0", f"n={params.n}, mu={params.mu:g}")
    return 1 if params.omega > 0 else -1


def eta(k: int, nu0: float, params: ProblemParams, rho: Optional[float] = None) -> int:
    """Index jump sigma * (n_k(nu0 - rho) - n_k(nu0 + rho)).

    rho starts at 1e-4 (1 + |nu0|) unless given and is halved while a probe
    lands on a singular block.
    """
    s = sigma(params)
    evaluate = block_family(k, params)
    rho = 1e-4 * (1.0 + abs(nu0)) if rho is None else float(rho)
    while rho >= MIN_PROBE:
        eigs = np.linalg.eigvalsh(evaluate(np.array([nu0 - rho, nu0 + rho])))
        if np.all(np.abs(eigs) > TOL_ZERO):
            below, above = np.sum(eigs < -TOL_ZERO, axis=1)
            return int(s * (below - above))
        rho /= 2.0
    raise ProbeWidthError(f"m_{k} stays singular at every probe width around nu={nu0:g}")


def _probe_width(nu: float, others: NDArray) -> float:
    rho = 1e-4 * (1.0 + abs(nu))
    others = np.asarray(others, dtype=float)
    others = others[np.abs(others - nu) > ROOT_TOL * (1.0 + abs(nu))]
    if others.size:
        rho = min(rho, 0.25 * float(np.min(np.abs(others - nu))))
    return rho


def _finalize(
    k: int,
    candidates: list[tuple[str, float]],
    params: ProblemParams,
    provenance: Provenance,
) -> list[BifurcationPoint]:
    """Attach eta and det residual, reject coincident roots, sort by nu."""
    candidates = sorted(candidates, key=lambda c: c[1])
    for (la, a), (lb, b) in zip(candidates, candidates[1:]):
        if abs(a - b) <= 1e-8 * (1.0 + abs(a)):
            raise DegenerateParameterError(
                f"coincident roots {la} and {lb} of det m_{k}", f"nu={a:g}"
            )

    all_roots = real_roots(k, params)
    points = []
    for label, nu in candidates:
        others = np.concatenate([all_roots, [c for _, c in candidates]])
        jump = eta(k, nu, params, rho=_probe_width(nu, others))
        if jump == 0:
            logger.debug("k=%d nu=%.10g (%s): zero index jump, skipped", k, nu, label)
            continue
        points.append(
            BifurcationPoint(
                k=k,
                nu0=float(nu),
                eta=jump,
                symmetry=symmetry_label(params.n, k),
                provenance=provenance,
                label=label,
                det_residual=abs(block_m(k, nu, params).det),
            )
        )
    return points


# --- Closed forms ---


def vortex_bif_points(k: int, params: ProblemParams) -> list[BifurcationPoint]:
    """Positive bifurcation frequencies of the vortex ring for the k-th block."""
    if params.kind is not Kind.VORTEX:
        params = ProblemParams(params.n, params.mu, params.gamma, Kind.VORTEX)
    _check_k(params, k)
    check_degeneracy(params)
    n, mu, omega, s1 = params.n, params.mu, params.omega, params.s1
    candidates: list[tuple[str, float]] = []

    if n == 2:
        if k == 1:
            candidates.append(("nu0", abs(mu + 0.5)))
            if mu < -1.25:
                candidates.append(("nu1", math.sqrt(3.0) * math.sqrt(-mu - 1.25)))
    elif k == n:
        pass
    elif k in (1, n - 1):
        if mu == 0.0:
            candidates.append(("nu_s1", s1))
        else:
            nu0 = omega if k == 1 else -omega
            if nu0 > 0:
                candidates.append(("nu0", nu0))
            if mu < s1**2:
                candidates.append(("nu_plus", math.sqrt(s1**2 - mu)))
    else:
        wk = params.omega_k(k)
        if omega > wk:
            candidates.append(("nu_k", math.sqrt(4.0 * wk * (omega - wk))))

    return _finalize(k, candidates, params, Provenance.CLOSED_FORM)


def _quartic_pair(base: float, c: float) -> list[tuple[str, float]]:
    """Positive nu with nu^4 - 2 base nu^2 + c = 0."""
    disc = base**2 - c
    if disc < 0:
        return []
    root = math.sqrt(disc)
    found = []
    for label, nu2 in (("nu_minus", base - root), ("nu_plus", base + root)):
        if nu2 > 1e-14:
            found.append((label, math.sqrt(nu2)))
    return found


def filament_bif_points(k: int, params: ProblemParams) -> list[BifurcationPoint]:
    """Traveling-wave bifurcation frequencies; falls back to a scan where no closed form exists."""
    if params.kind is not Kind.FILAMENT:
        params = ProblemParams(params.n, params.mu, params.gamma, Kind.FILAMENT)
    _check_k(params, k)
    check_degeneracy(params)
    n, mu, gamma, omega, s1 = params.n, params.mu, params.gamma, params.omega, params.s1

    if n == 2 and k == 1:
        return scan_bif_points(k, params)

    if k in (1, n - 1) and n >= 3:
        if mu == 0.0:
            candidates = _quartic_pair(2.0 * gamma**2 - s1, s1**2)
        elif mu == 1.0:
            b = omega - 2.0 * gamma**2
            candidates = _quartic_pair(-b, omega**2 - 2.0 * omega)
            sign = 1.0 if k == 1 else -1.0
            if gamma**2 >= omega:
                root = math.sqrt(gamma**2 - omega)
                for label, nu in (
                    ("nu_bar_minus", sign * gamma - root),
                    ("nu_bar_plus", sign * gamma + root),
                ):
                    if nu > 0:
                        candidates.append((label, nu))
        else:
            return scan_bif_points(k, params)
    else:
        wk = params.omega_k(k)
        candidates = _quartic_pair(2.0 * gamma**2 - omega, 4.0 * wk * (omega - wk))

    return _finalize(k, candidates, params, Provenance.CLOSED_FORM)


def bif_points(k: int, params: ProblemParams) -> list[BifurcationPoint]:
    if params.kind is Kind.VORTEX:
        return vortex_bif_points(k, params)
    return filament_bif_points(k, params)


# --- Scanning ---


def _hidden_pairs(gap: NDArray, counts: NDArray) -> NDArray:
    """Interior nodes where an eigenvalue dips toward zero without an index change."""
    mid, left, right = gap[1:-1], gap[:-2], gap[2:]
    dip = (mid < left) & (mid < right) & (mid < left + right - 2.0 * mid)
    flat = (counts[:-2] == counts[1:-1]) & (counts[1:-1] == counts[2:])
    return np.flatnonzero(dip & flat) + 1


def _brackets(evaluate: Callable, nus: NDArray, depth: int) -> list[tuple[float, float]]:
    eigs = np.linalg.eigvalsh(evaluate(nus))
    counts = np.sum(eigs < -TOL_ZERO, axis=-1)
    cells = [(float(nus[i]), float(nus[i + 1])) for i in np.flatnonzero(np.diff(counts))]
    if depth > 0 and nus.size > 2:
        gap = np.min(np.abs(eigs), axis=-1)
        for i in _hidden_pairs(gap, counts):
            fine = np.linspace(nus[i - 1], nus[i + 1], _SUBDIVISION + 1)
            cells.extend(_brackets(evaluate, fine, depth - 1))
    return cells


def _locate(evaluate: Callable, a: float, b: float) -> float:
    """Root of det in [a, b] where the Morse index differs at the ends."""

    def det(nu: float) -> float:
        return float(np.real(np.linalg.det(evaluate(np.array(nu)))))

    def count(nu: float) -> int:
        return int(np.sum(np.linalg.eigvalsh(evaluate(np.array(nu))) < -TOL_ZERO))

    fa, fb = det(a), det(b)
    if fa * fb < 0:
        return brentq(det, a, b, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    # Even index change: bisect on the index itself.
    ca = count(a)
    while b - a > ROOT_TOL:
        m = 0.5 * (a + b)
        if count(m) == ca:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def scan_matrix_family(
    evaluate: Callable[[NDArray], NDArray],
    nu_min: float,
    nu_max: float,
    grid: int = DEFAULT_GRID,
) -> list[float]:
    """Frequencies in [nu_min, nu_max] where the Morse index of a Hermitian family changes."""
    if not nu_min < nu_max:
        raise ValueError(f"nu_min must be < nu_max, got [{nu_min}, {nu_max}]")
    if grid < 100:
        raise ValueError(f"grid must be >= 100, got {grid}")

    nus = np.linspace(nu_min, nu_max, grid + 1)
    edge = np.min(np.abs(np.linalg.eigvalsh(evaluate(nus[[0, -1]]))), axis=-1)
    if edge[0] <= TOL_ZERO:
        if nu_min == 0.0:
            logger.debug("kernel at nu = 0 excluded from the scan")
        else:
            logger.warning("root at the lower scan edge nu = %g", nu_min)
        nus = nus[1:]
    if edge[1] <= TOL_ZERO:
        logger.warning("root at the upper scan edge nu = %g", nu_max)
        nus = nus[:-1]

    roots = sorted(_locate(evaluate, a, b) for a, b in _brackets(evaluate, nus, _MAX_DEPTH))
    unique: list[float] = []
    for r in roots:
        if not unique or r - unique[-1] > ROOT_TOL * (1.0 + abs(r)):
            unique.append(r)
    logger.debug("scan over [%g, %g] with %d nodes: %d roots", nu_min, nu_max, grid, len(unique))
    return unique


def default_nu_max(k: int, params: ProblemParams) -> float:
    roots = real_roots(k, params)
    peak = float(np.max(np.abs(roots))) if roots.size else 0.0
    return 1.25 * peak + 1.0


def scan_bif_points(
    k: int,
    params: ProblemParams,
    nu_min: float = 0.0,
    nu_max: Optional[float] = None,
    grid: int = DEFAULT_GRID,
) -> list[BifurcationPoint]:
    """Bifurcation points found by sampling the Morse index of m_k on a grid."""
    _check_k(params, k)
    check_degeneracy(params)
    if nu_max is None:
        nu_max = default_nu_max(k, params)
    roots = scan_matrix_family(block_family(k, params), nu_min, nu_max, grid)
    if any(abs(r - nu_max) <= ROOT_TOL * (1.0 + nu_max) for r in roots):
        logger.warning("k=%d: root at the upper scan edge nu = %g", k, nu_max)

    roots = [r for r in roots if r > 0]
    s = sigma(params)
    evaluate = block_family(k, params)
    points = []
    for i, nu in enumerate(roots):
        rho = _probe_width(nu, np.array(roots))
        jump = eta(k, nu, params, rho=rho)
        if jump == 0:
            continue
        points.append(
            BifurcationPoint(
                k=k,
                nu0=float(nu),
                eta=jump,
                symmetry=symmetry_label(params.n, k),
                provenance=Provenance.SCAN,
                label=f"scan:{len(points)}",
                det_residual=abs(float(np.real(np.linalg.det(evaluate(np.array(nu)))))),
            )
        )
    logger.debug("k=%d sigma=%d: %d scanned points", k, s, len(points))
    return points


# --- Regions ---


def _classify_ring(mu: float, nu: float, n: int) -> str:
    s1 = (n - 1) / 2.0
    nu0 = mu + s1
    near = [abs(mu), abs(nu - nu0)]
    inside = False
    if mu <= s1**2:
        half_width = math.sqrt(s1**2 - mu)
        near += [abs(nu - half_width), abs(nu + half_width)]
        inside = abs(nu) < half_width
    if min(near) <= BOUNDARY_DISTANCE:
        raise BoundaryError(f"(mu={mu:g}, nu={nu:g}) lies on a region boundary for n={n}")

    if mu > 0:
        if nu > nu0:
            return "2b"
        return "0a" if inside else "1a"
    if inside:
        return "2c" if nu > nu0 else "1c"
    if nu > 0:
        return "1b"
    return "1d" if nu > nu0 else "2a"


def _classify_pair(mu: float, nu: float) -> str:
    a = abs(nu)
    nu0 = abs(mu + 0.5)
    near = [abs(mu), abs(mu + 0.5), abs(mu + 1.25), abs(mu + 2.0), abs(a - nu0)]
    nu1 = None
    if mu < -1.25:
        nu1 = math.sqrt(-3.0 * (mu + 1.25))
        near.append(abs(a - nu1))
    if min(near) <= BOUNDARY_DISTANCE:
        raise BoundaryError(f"(mu={mu:g}, nu={nu:g}) lies on a region boundary for n=2")

    if mu > 0:
        return "1a" if a < nu0 else "2a"
    if mu > -0.5:
        return "1b" if a < nu0 else "2b"
    if a > nu0:
        return "2b"
    if nu1 is None:
        return "3a"
    if a < nu1:
        return "2c"
    return "3a" if mu > -2.0 else "1c"


def morse_region_classify(mu: float, nu: float, n: int) -> RegionReport:
    """Region of the (mu, nu) plane for the vortex k=1 block and its Morse number."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    region = _classify_pair(mu, nu) if n == 2 else _classify_ring(mu, nu, n)
    numeric = morse_index(block_m(1, nu, ProblemParams(n, mu)))
    return RegionReport(
        n=n,
        mu=mu,
        nu=nu,
        region=region,
        morse_number=int(region[0]),
        numeric_morse_index=numeric,
    )


# --- Stability ---


def stability_window(n: int, mu: Optional[float] = None) -> StabilityReport:
    """Interval of mu where the ring can be spectrally stable; checks mu numerically if given."""
    if n < 3:
        raise ValueError(f"the stability window needs n >= 3, got {n}")
    lower = critical_mu(n, n // 2) if n >= 4 else -math.inf
    upper = critical_mu(n, 1)
    window = (lower, upper)
    if mu is None:
        return StabilityReport(n=n, mu_window=window)

    params = ProblemParams(n, mu)
    if params.mu == 0.0:
        raise UnsupportedParameterError("mu = 0: the linearized vortex flow is undefined")

    roots = np.concatenate([block_roots(k, params) for k in range(1, n + 1)])
    real = np.abs(roots.imag) <= REAL_ROOT_TOL * (1.0 + np.abs(roots.real))

    eigs = np.linalg.eigvals(vortex_linearization(params))
    eigs = eigs[np.argsort(np.abs(eigs))]
    kernel, rest = eigs[:2], eigs[2:]
    max_real = float(np.max(rest.real)) if rest.size else 0.0

    ok = bool(int(real.sum()) == 2 * (n + 1) and max_real <= STABILITY_TOL)
    logger.debug("n=%d mu=%g: %d/%d real roots, max Re %.3e", n, mu, real.sum(), roots.size, max_real)
    return StabilityReport(
        n=n,
        mu_window=window,
        mu=float(mu),
        inside_window=lower < mu < upper,
        spectral_ok=ok,
        max_real_part=max_real,
        kernel_modulus=float(np.max(np.abs(kernel))),
        root_count=int(roots.size),
        real_root_count=int(real.sum()),
    )
