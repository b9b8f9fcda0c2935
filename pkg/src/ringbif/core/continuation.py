"""
Periodic-Orbit Continuation

Fourier-Galerkin discretization of the periodic problem

    vortex:    -nu K J x' + grad V(x) = 0
    filament:  -nu^2 K^2 x'' - 2 gamma nu K J x' + grad V(x) = 0

on 2 pi-periodic loops, a predictor built from the kernel of m_k(nu_0),
Gauss-Newton correction in the subspace fixed by the isotropy group of
the k-th family, and secant pseudo-arclength branch following.

Packed coefficients are real (2p+1, 2(n+1)) arrays with rows
[Re x_0, Re x_1 .. Re x_p, Im x_1 .. Im x_p]; the loop is
x(t) = x_0 + sum_l 2 Re(x_l e^{ilt}).
"""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Optional

import numpy as np
import scipy.linalg as spl
from numpy.typing import ArrayLike, NDArray

from ringbif.core.errors import (
    CollisionError,
    ConvergenceError,
    DegenerateBifurcationError,
    NearDegeneracyError,
)
from ringbif.core.model import (
    J,
    WAVE_COUPLING,
    CirculationStructure,
    Configuration,
    GroupElement,
    Kind,
    ProblemParams,
    act_group,
    act_on_positions,
    gradient_array,
    hessian_array,
    min_distance,
    potential,
    ring_equilibrium,
    rotation,
)
from ringbif.core.spectral import BifurcationPoint, block_m
from ringbif.core.symmetry import central_columns, irrep_basis

logger = logging.getLogger(__name__)

DEFAULT_TRUNCATION = 16
NEWTON_TOL = 1e-10
MAX_ITERATIONS = 20
MAX_CONDITION = 1e12
KERNEL_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class FourierLoop:
    """Truncated Fourier loop; modes[l] is the complex coefficient x_l, l = 0..p."""

    nu: float
    modes: NDArray[np.complex128]

    def __post_init__(self):
        modes = np.array(self.modes, dtype=complex)
        if modes.ndim != 3 or modes.shape[2] != 2 or modes.shape[0] < 2:
            raise ValueError(f"modes must have shape (p+1, n+1, 2) with p >= 1, got {modes.shape}")
        if not (math.isfinite(self.nu) and self.nu > 0):
            raise ValueError(f"nu must be positive, got {self.nu}")
        modes[0] = modes[0].real
        modes.setflags(write=False)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "nu", float(self.nu))

    @classmethod
    def constant(cls, cfg: Configuration, nu: float, p: int = DEFAULT_TRUNCATION) -> FourierLoop:
        modes = np.zeros((p + 1,) + cfg.positions.shape, dtype=complex)
        modes[0] = cfg.positions
        return cls(nu, modes)

    @classmethod
    def from_packed(cls, X: NDArray, nu: float, n: int) -> FourierLoop:
        p = (X.shape[0] - 1) // 2
        X = X.reshape(2 * p + 1, n + 1, 2)
        modes = np.zeros((p + 1, n + 1, 2), dtype=complex)
        modes[0] = X[0]
        modes[1:] = X[1 : p + 1] + 1j * X[p + 1 :]
        return cls(nu, modes)

    @property
    def p(self) -> int:
        return self.modes.shape[0] - 1

    @property
    def n(self) -> int:
        return self.modes.shape[1] - 1

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.nu

    @property
    def amplitude(self) -> float:
        """2 |x_1|, the peak deviation of the first harmonic."""
        return 2.0 * float(np.linalg.norm(self.modes[1]))

    def packed(self) -> NDArray[np.float64]:
        d = 2 * (self.n + 1)
        X = np.empty((2 * self.p + 1, d))
        X[0] = self.modes[0].real.reshape(-1)
        X[1 : self.p + 1] = self.modes[1:].real.reshape(self.p, d)
        X[self.p + 1 :] = self.modes[1:].imag.reshape(self.p, d)
        return X

    def evaluate(self, times: ArrayLike) -> NDArray[np.float64]:
        """Positions at the given times, shape (len(times), n+1, 2)."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        harmonics = np.exp(1j * np.outer(times, np.arange(1, self.p + 1)))
        oscillating = np.einsum("tl,lab->tab", harmonics, self.modes[1:])
        return self.modes[0].real + 2.0 * oscillating.real

    def nodes(self) -> NDArray[np.float64]:
        return self.evaluate(quadrature_times(self.p))

    def with_truncation(self, p: int) -> FourierLoop:
        modes = np.zeros((p + 1,) + self.modes.shape[1:], dtype=complex)
        keep = min(p, self.p) + 1
        modes[:keep] = self.modes[:keep]
        return FourierLoop(self.nu, modes)

    def with_nu(self, nu: float) -> FourierLoop:
        return FourierLoop(nu, self.modes)


@act_group.register(FourierLoop)
def _act_loop(target: FourierLoop, element: GroupElement) -> FourierLoop:
    modes = act_on_positions(target.modes, element)
    modes = modes * np.exp(1j * np.arange(target.p + 1) * element.phase)[:, None, None]
    return FourierLoop(target.nu, modes)


# --- Galerkin operators ---


def quadrature_times(p: int) -> NDArray[np.float64]:
    count = 4 * p + 2
    return 2.0 * math.pi * np.arange(count) / count


@lru_cache(maxsize=16)
def _operators(p: int) -> tuple[NDArray, NDArray, NDArray]:
    """Evaluation E (nodes x coefficients), trapezoidal projection P with P E = I, derivative D."""
    t = quadrature_times(p)
    count = t.size
    l = np.arange(1, p + 1)
    lt = np.outer(t, l)
    E = np.hstack([np.ones((count, 1)), 2.0 * np.cos(lt), -2.0 * np.sin(lt)])
    P = np.vstack([np.ones((1, count)), np.cos(lt).T, -np.sin(lt).T]) / count
    D = np.zeros((2 * p + 1, 2 * p + 1))
    D[l, p + l] = -l
    D[p + l, l] = l
    for A in (E, P, D):
        A.setflags(write=False)
    return E, P, D


def _structure(params: ProblemParams) -> tuple[NDArray, NDArray]:
    circ = CirculationStructure.for_params(params)
    K = circ.matrix
    return K @ circ.symplectic, K @ K


def _assemble(X: NDArray, nu: float, params: ProblemParams, jacobian: bool):
    """Packed residual, its nu-derivative and (optionally) its X-Jacobian."""
    p = (X.shape[0] - 1) // 2
    m = params.n + 1
    E, P, D = _operators(p)
    KJ, K2 = _structure(params)
    nodes = (E @ X).reshape(-1, m, 2)
    grad = gradient_array(nodes, params).reshape(nodes.shape[0], -1)
    DX = D @ X

    if params.kind is Kind.VORTEX:
        R = -nu * DX @ KJ.T + P @ grad
        dR_dnu = -DX @ KJ.T
    else:
        c = WAVE_COUPLING * params.gamma
        D2X = D @ DX
        R = -(nu**2) * D2X @ K2.T - c * nu * DX @ KJ.T + P @ grad
        dR_dnu = -2.0 * nu * D2X @ K2.T - c * DX @ KJ.T

    if not jacobian:
        return R, dR_dnu, None

    H = hessian_array(nodes, params)
    size = X.size
    jac = np.einsum("sq,qab,qr->sarb", P, H, E, optimize=True).reshape(size, size)
    if params.kind is Kind.VORTEX:
        jac -= nu * np.kron(D, KJ)
    else:
        jac -= nu**2 * np.kron(D @ D, K2) + c * nu * np.kron(D, KJ)
    return R, dR_dnu, jac


def _unpack_residual(R: NDArray, n: int) -> NDArray[np.complex128]:
    p = (R.shape[0] - 1) // 2
    R = R.reshape(2 * p + 1, n + 1, 2)
    modes = np.zeros((p + 1, n + 1, 2), dtype=complex)
    modes[0] = R[0]
    modes[1:] = R[1 : p + 1] + 1j * R[p + 1 :]
    return modes


def galerkin_residual(loop: FourierLoop, params: ProblemParams) -> NDArray[np.complex128]:
    """Residual modes l = 0..p, shape (p+1, n+1, 2); raises CollisionError with the node index."""
    R, _, _ = _assemble(loop.packed(), loop.nu, params, jacobian=False)
    return _unpack_residual(R, params.n)


def galerkin_jacobian(loop: FourierLoop, params: ProblemParams) -> tuple[NDArray, NDArray]:
    """(dR/dX, dR/dnu) in packed, row-major flattened coordinates."""
    R, dR_dnu, jac = _assemble(loop.packed(), loop.nu, params, jacobian=True)
    return jac, dR_dnu.reshape(-1)


def linearized_residual(
    perturbation: FourierLoop, params: ProblemParams, base: Optional[FourierLoop] = None
) -> NDArray[np.complex128]:
    """Jacobian at base (default: the equilibrium) applied to the perturbation's modes."""
    if base is None:
        base = FourierLoop.constant(ring_equilibrium(params), perturbation.nu, perturbation.p)
    jac, _ = galerkin_jacobian(base.with_nu(perturbation.nu), params)
    delta = jac @ perturbation.packed().reshape(-1)
    return _unpack_residual(delta.reshape(2 * perturbation.p + 1, -1), params.n)


# --- Predictor ---


def _kernel_vector(k: int, nu: float, params: ProblemParams) -> NDArray[np.complex128]:
    evals, evecs = np.linalg.eigh(block_m(k, nu, params).matrix)
    scale = 1.0 + float(np.max(np.abs(evals)))
    small = np.flatnonzero(np.abs(evals) <= KERNEL_TOL * scale)
    if small.size != 1:
        raise DegenerateBifurcationError(
            f"m_{k}({nu:g}) has a kernel of dimension {small.size}, expected 1"
        )
    w = evecs[:, small[0]]
    # Fix the arbitrary phase: largest entry real and positive.
    w = w * np.exp(-1j * np.angle(w[np.argmax(np.abs(w))]))

    central = central_columns(params.n, k)
    if params.mu == 0.0 and central:
        full = np.zeros(irrep_basis(params.n, k).dim, dtype=complex)
        full[[i for i in range(full.size) if i not in central]] = w
        w = full
    return w


def predictor(
    k: int,
    bif_point: BifurcationPoint,
    amplitude: float,
    params: ProblemParams,
    truncation: int = DEFAULT_TRUNCATION,
) -> FourierLoop:
    """a-bar + amplitude Re(T_k(w_0) e^{it}) at the bifurcation frequency."""
    nu = bif_point.nu0 if isinstance(bif_point, BifurcationPoint) else float(bif_point)
    loop = FourierLoop.constant(ring_equilibrium(params), nu, truncation)
    if amplitude == 0.0:
        return loop
    w0 = _kernel_vector(k, nu, params)
    x1 = 0.5 * amplitude * irrep_basis(params.n, k).embed(w0)
    modes = np.array(loop.modes)
    modes[1] = x1.reshape(params.n + 1, 2)
    return FourierLoop(nu, modes)


# --- Symmetry ---


def symmetry_residual(loop: FourierLoop, k: int, n: int, samples: int = 64) -> float:
    """Largest defect of x_{j+1}(t) = R(j zeta) x_1(t + j k zeta) and of the central-element rule."""
    if loop.n != n:
        raise ValueError(f"loop has n={loop.n}, expected {n}")
    zeta = 2.0 * math.pi / n
    t = 2.0 * math.pi * np.arange(samples) / samples
    x = loop.evaluate(t)

    defect = 0.0
    for j in range(1, n):
        shifted = loop.evaluate(t + j * k * zeta)[:, 1, :] @ rotation(j * zeta).T
        defect = max(defect, float(np.max(np.abs(x[:, j + 1, :] - shifted))))

    if math.gcd(k, n) > 1:
        central = float(np.max(np.abs(x[:, 0, :])))
    else:
        k_inv = pow(k, -1, n)
        ahead = loop.evaluate(t + zeta)[:, 0, :] @ rotation(k_inv * zeta).T
        central = float(np.max(np.abs(x[:, 0, :] - ahead)))
    return max(defect, central)


def _spatial_matrix(n: int, element: GroupElement) -> NDArray[np.float64]:
    d = 2 * (n + 1)
    return act_on_positions(np.eye(d).reshape(d, n + 1, 2), element).reshape(d, d).T


def _phase_matrix(p: int, phase: float) -> NDArray[np.float64]:
    T = np.zeros((2 * p + 1, 2 * p + 1))
    T[0, 0] = 1.0
    for l in range(1, p + 1):
        c, s = math.cos(l * phase), math.sin(l * phase)
        T[l, l], T[l, p + l] = c, -s
        T[p + l, l], T[p + l, p + l] = s, c
    return T


@lru_cache(maxsize=32)
def _reduction_basis(n: int, p: int, k: Optional[int], freeze_central: bool) -> Optional[NDArray]:
    """Orthonormal basis of the admissible packed coefficients; None means unrestricted."""
    d = 2 * (n + 1)
    size = (2 * p + 1) * d
    rows = []
    if k is not None:
        g = GroupElement.isotropy_generator(n, k)
        G = np.kron(_phase_matrix(p, g.phase), _spatial_matrix(n, g))
        rows.append(G - np.eye(size))
    if freeze_central:
        frozen = [r * d + c for r in range(2 * p + 1) for c in (0, 1)]
        rows.append(np.eye(size)[frozen])
    if not rows:
        return None
    S = spl.null_space(np.vstack(rows))
    S.setflags(write=False)
    return S


# --- Newton ---


@dataclass(frozen=True, eq=False)
class Constraints:
    """Amplitude pin 2|x_1| = amplitude, or pseudo-arclength pin <Z - anchor, tangent> = step."""

    amplitude: Optional[float] = None
    anchor: Optional[NDArray] = None
    tangent: Optional[NDArray] = None
    step: float = 0.0
    reference: Optional[FourierLoop] = None

    def __post_init__(self):
        arclength = self.anchor is not None and self.tangent is not None
        if (self.amplitude is not None) == arclength:
            raise ValueError("give either an amplitude pin or an arclength anchor and tangent")


@dataclass(frozen=True, eq=False)
class BranchState:
    loop: FourierLoop
    amplitude: float
    arclength: float
    residual_norm: float
    iterations: int = 0

    @property
    def nu(self) -> float:
        return self.loop.nu


def _augmented(Z: NDArray, shape, params, constraints, phase_dir, rotation_dir, a_bar):
    """Residual vector and Jacobian of the Galerkin system plus the three scalar pins."""
    X, nu = Z[:-1].reshape(shape), Z[-1]
    R, dR_dnu, jac = _assemble(X, nu, params, jacobian=True)
    p = (shape[0] - 1) // 2
    dev = X.reshape(-1) - a_bar

    values = [phase_dir @ dev, rotation_dir @ dev]
    grads = [np.append(phase_dir, 0.0), np.append(rotation_dir, 0.0)]
    if constraints.amplitude is not None:
        x1 = np.concatenate([X[1], X[p + 1]])
        norm = float(np.linalg.norm(x1))
        values.append(2.0 * norm - constraints.amplitude)
        g = np.zeros_like(X)
        if norm > 0:
            g[1] = 2.0 * X[1] / norm
            g[p + 1] = 2.0 * X[p + 1] / norm
        grads.append(np.append(g.reshape(-1), 0.0))
    else:
        values.append(constraints.tangent @ (Z - constraints.anchor) - constraints.step)
        grads.append(constraints.tangent)

    F = np.concatenate([R.reshape(-1), values])
    A = np.vstack([np.hstack([jac, dR_dnu.reshape(-1, 1)]), np.array(grads)])
    return F, A


def newton_correct(
    loop: FourierLoop,
    params: ProblemParams,
    constraints: Constraints,
    k: Optional[int] = None,
    tol: float = NEWTON_TOL,
    max_iterations: int = MAX_ITERATIONS,
) -> BranchState:
    """Gauss-Newton on the Galerkin system with phase, rotation and amplitude/arclength pins.

    With k given the unknowns are restricted to coefficients fixed by the
    isotropy generator of the k-th family.
    """
    n, p = params.n, loop.p
    shape = (2 * p + 1, 2 * (n + 1))
    S = _reduction_basis(n, p, k, params.mu == 0.0)

    a_bar = FourierLoop.constant(ring_equilibrium(params), loop.nu, p).packed().reshape(-1)
    reference = constraints.reference or loop
    _, _, D = _operators(p)
    phase_dir = (D @ reference.packed()).reshape(-1)
    if np.linalg.norm(phase_dir) > 0:
        phase_dir = phase_dir / np.linalg.norm(phase_dir)
    rotation_dir = np.zeros(shape)
    rotation_dir[0] = (ring_equilibrium(params).positions @ J.T).reshape(-1)
    rotation_dir = rotation_dir.reshape(-1) / np.linalg.norm(rotation_dir)

    Z = np.append(loop.packed().reshape(-1), loop.nu)
    residual = math.inf
    for iteration in range(max_iterations + 1):
        F, A = _augmented(Z, shape, params, constraints, phase_dir, rotation_dir, a_bar)
        residual = float(np.max(np.abs(F)))
        logger.debug("newton iteration %d: residual %.3e, nu %.12g", iteration, residual, Z[-1])
        if residual < tol:
            out = FourierLoop.from_packed(Z[:-1].reshape(shape), Z[-1], n)
            return BranchState(out, out.amplitude, 0.0, residual, iteration)
        if iteration == max_iterations:
            break

        if S is not None:
            A = np.hstack([A[:, :-1] @ S, A[:, -1:]])
        step, _, _, sv = spl.lstsq(A, -F)
        condition = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
        if condition > MAX_CONDITION:
            raise NearDegeneracyError(condition, iteration, residual)
        if S is not None:
            step = np.append(S @ step[:-1], step[-1])
        Z = Z + step

    raise ConvergenceError(
        f"Newton did not converge in {max_iterations} iterations (residual {residual:.3e})",
        iterations=max_iterations,
        residual_norm=residual,
    )


# --- Branch following ---


class Termination(str, Enum):
    MAX_STEPS = "max_steps"
    NORM_CAP = "norm_cap"
    PERIOD_CAP = "period_cap"
    NEAR_COLLISION = "near_collision"
    RETURNED_TO_EQUILIBRIUM = "returned_to_equilibrium"
    NEWTON_FAILURE = "newton_failure"


@dataclass(frozen=True)
class ContinuationSettings:
    step: float = 1e-3
    norm_cap: float = 10.0
    period_cap: float = 200.0
    collision_eps: float = 1e-6
    tol: float = NEWTON_TOL
    max_iterations: int = MAX_ITERATIONS

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError(f"step must be positive, got {self.step}")
        if not (self.norm_cap > 0 and self.period_cap > 0 and self.collision_eps > 0):
            raise ValueError("caps and collision_eps must be positive")


@dataclass(eq=False)
class Branch:
    states: list[BranchState]
    termination: Termination
    k: Optional[int] = None
    nu_onset: Optional[float] = None
    failure: Optional[str] = None
    symmetry_residuals: list[float] = field(default_factory=list)

    @property
    def direction(self) -> int:
        """Sign of nu - nu_onset at the last state (0 when unchanged)."""
        onset = self.nu_onset if self.nu_onset is not None else self.states[0].nu
        delta = self.states[-1].nu - onset
        if abs(delta) <= 1e-12 * (1.0 + abs(onset)):
            return 0
        return 1 if delta > 0 else -1

    def records(self) -> list[dict]:
        rows = []
        for i, state in enumerate(self.states):
            rows.append(
                {
                    "step": i,
                    "k": self.k,
                    "nu": state.nu,
                    "period": state.loop.period,
                    "amplitude": state.amplitude,
                    "arclength": state.arclength,
                    "residual_norm": state.residual_norm,
                    "symmetry_residual": self.symmetry_residuals[i]
                    if i < len(self.symmetry_residuals)
                    else None,
                    "termination": self.termination.value,
                }
            )
        return rows


def _check_state(state: BranchState, start: BranchState, settings: ContinuationSettings):
    nodes = state.loop.nodes()
    if float(np.max(np.abs(nodes))) > settings.norm_cap:
        return Termination.NORM_CAP
    if state.loop.period > settings.period_cap:
        return Termination.PERIOD_CAP
    if float(np.min(min_distance(nodes))) < 10.0 * settings.collision_eps:
        return Termination.NEAR_COLLISION
    if state.amplitude < start.amplitude / 10.0 and abs(state.nu - start.nu) > 1e-6 * (1.0 + start.nu):
        return Termination.RETURNED_TO_EQUILIBRIUM
    return None


def continue_branch(
    start: BranchState,
    step_count: int,
    params: ProblemParams,
    settings: Optional[ContinuationSettings] = None,
    k: Optional[int] = None,
    nu_onset: Optional[float] = None,
) -> Branch:
    """Follow the branch through start for up to step_count steps."""
    settings = settings or ContinuationSettings()
    if step_count < 0:
        raise ValueError(f"step_count must be >= 0, got {step_count}")
    if not start.amplitude > 0:
        raise ValueError("the starting loop must have a nonzero first harmonic")

    def symmetry_of(state):
        return symmetry_residual(state.loop, k, params.n) if k is not None else math.nan

    states = [start]
    sym = [symmetry_of(start)]
    termination = Termination.MAX_STEPS
    failure = None
    newton = dict(k=k, tol=settings.tol, max_iterations=settings.max_iterations)
    ds = None

    for _ in range(step_count):
        current = states[-1]
        try:
            if len(states) == 1:
                target = current.amplitude + settings.step
                a_bar = FourierLoop.constant(ring_equilibrium(params), current.nu, current.loop.p)
                scale = target / current.amplitude
                guess = FourierLoop(current.nu, a_bar.modes + scale * (current.loop.modes - a_bar.modes))
                state = newton_correct(guess, params, Constraints(amplitude=target), **newton)
            else:
                z_prev = np.append(states[-2].loop.packed().reshape(-1), states[-2].nu)
                z_cur = np.append(current.loop.packed().reshape(-1), current.nu)
                secant = z_cur - z_prev
                if ds is None:
                    ds = float(np.linalg.norm(secant))
                tangent = secant / np.linalg.norm(secant)
                z_pred = z_cur + ds * tangent
                shape = (2 * current.loop.p + 1, -1)
                guess = FourierLoop.from_packed(z_pred[:-1].reshape(shape), z_pred[-1], params.n)
                constraints = Constraints(anchor=z_cur, tangent=tangent, step=ds, reference=guess)
                state = newton_correct(guess, params, constraints, **newton)
        except (ConvergenceError, CollisionError) as e:
            termination = Termination.NEWTON_FAILURE
            failure = str(e)
            logger.info("branch stopped after %d states: %s", len(states), failure)
            break

        z_old = np.append(current.loop.packed().reshape(-1), current.nu)
        z_new = np.append(state.loop.packed().reshape(-1), state.nu)
        state = dataclasses.replace(state, arclength=current.arclength + float(np.linalg.norm(z_new - z_old)))
        states.append(state)
        sym.append(symmetry_of(state))

        reason = _check_state(state, start, settings)
        if reason is not None:
            termination = reason
            break

    logger.info("branch terminated: %s after %d states", termination.value, len(states))
    return Branch(states, termination, k, nu_onset, failure, sym)


def loop_potential_drift(loop: FourierLoop, params: ProblemParams, samples: int = 128) -> float:
    """max_t |V(x(t)) - V(x(0))| along the loop."""
    t = 2.0 * math.pi * np.arange(samples) / samples
    V = potential(loop.evaluate(t), params)
    return float(np.max(np.abs(V - V[0])))
