"""
Ring Model

Potential, gradient, Hessian, equilibrium and equations of motion for the
(n+1)-element ring: n unit-circulation elements on the unit circle around
a central element of circulation mu, written in the frame rotating with
the polygonal relative equilibrium.

Positions are real (n+1, 2) arrays; index 0 is the central element. The
array kernels accept stacked configurations of shape (..., n+1, 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import singledispatch
from typing import Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ringbif.core.errors import CollisionError, UnsupportedParameterError

# Counterclockwise generator; exp(J theta) is rotation by +theta.
J = np.array([[0.0, -1.0], [1.0, 0.0]])

COLLISION_DISTANCE = 1e-9

# Gyroscopic factor of the traveling-wave equation K^2 u'' + 2 gamma K J u' = grad V.
WAVE_COUPLING = 2.0


class Kind(str, Enum):
    VORTEX = "vortex"
    FILAMENT = "filament"


@dataclass(frozen=True)
class ProblemParams:
    """Ring size n, central circulation mu, wave speed gamma, problem kind."""

    n: int
    mu: float = 0.0
    gamma: float = 0.0
    kind: Kind = Kind.VORTEX

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)):
            raise ValueError(f"n must be an integer, got {self.n!r}")
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if not (math.isfinite(self.mu) and math.isfinite(self.gamma)):
            raise ValueError("mu and gamma must be finite")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "kind", Kind(self.kind))

    @property
    def s1(self) -> float:
        return (self.n - 1) / 2.0

    @property
    def omega(self) -> float:
        return self.s1 + self.mu

    @property
    def zeta(self) -> float:
        return 2.0 * math.pi / self.n

    @property
    def size(self) -> int:
        """Number of real coordinates, 2(n+1)."""
        return 2 * (self.n + 1)

    @property
    def is_vortex(self) -> bool:
        return self.kind is Kind.VORTEX

    def s(self, k: int) -> float:
        return k * (self.n - k) / 2.0

    def omega_k(self, k: int) -> float:
        return self.s(k) / 2.0


@dataclass(frozen=True, eq=False)
class CirculationStructure:
    """Circulations kappa = (mu, 1, ..., 1) and the block matrices K and J."""

    kappa: NDArray[np.float64]

    @classmethod
    def for_params(cls, params: ProblemParams) -> CirculationStructure:
        kappa = np.ones(params.n + 1)
        kappa[0] = params.mu
        return cls(kappa)

    @property
    def matrix(self) -> NDArray[np.float64]:
        """K = diag(mu I, I, ..., I)."""
        return np.kron(np.diag(self.kappa), np.eye(2))

    @property
    def symplectic(self) -> NDArray[np.float64]:
        """Block-diagonal J acting on every element."""
        return np.kron(np.eye(self.kappa.size), J)


@dataclass(frozen=True, eq=False)
class Configuration:
    """Positions of the n+1 elements; row 0 is the central element."""

    positions: NDArray[np.float64]

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float)
        if pos.ndim == 1:
            if pos.size % 2:
                raise ValueError("flat coordinates must have even length")
            pos = pos.reshape(-1, 2)
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise ValueError(f"positions must have shape (n+1, 2), got {pos.shape}")
        if pos.shape[0] < 3:
            raise ValueError("a configuration needs a central element and at least two ring elements")
        if not np.all(np.isfinite(pos)):
            raise ValueError("positions must be finite")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @classmethod
    def from_complex(cls, z: ArrayLike) -> Configuration:
        z = np.asarray(z, dtype=complex)
        return cls(np.column_stack([z.real, z.imag]))

    @property
    def n(self) -> int:
        return self.positions.shape[0] - 1

    def as_complex(self) -> NDArray[np.complex128]:
        return self.positions[:, 0] + 1j * self.positions[:, 1]

    def flat(self) -> NDArray[np.float64]:
        return self.positions.reshape(-1).copy()

    def min_distance(self) -> float:
        return float(min_distance(self.positions))


ConfigLike = Union[Configuration, NDArray[np.float64]]


def _positions(cfg: ConfigLike) -> NDArray[np.float64]:
    if isinstance(cfg, Configuration):
        return cfg.positions
    arr = np.asarray(cfg, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 2)
    return arr


def circulations(params: ProblemParams) -> NDArray[np.float64]:
    return CirculationStructure.for_params(params).kappa


def _check_size(positions: NDArray, params: ProblemParams) -> None:
    if positions.shape[-2] != params.n + 1:
        raise ValueError(
            f"configuration has {positions.shape[-2]} elements, params expect {params.n + 1}"
        )


# --- Pair geometry ---


def _squared_distances(positions: NDArray) -> NDArray:
    d = positions[..., None, :, :] - positions[..., :, None, :]
    r2 = np.einsum("...i,...i->...", d, d)
    m = positions.shape[-2]
    r2[..., np.arange(m), np.arange(m)] = np.inf
    return r2


def min_distance(positions: ArrayLike) -> Union[float, NDArray[np.float64]]:
    """Smallest pairwise distance, per configuration for stacked input."""
    positions = np.asarray(positions, dtype=float)
    r2 = _squared_distances(positions)
    return np.sqrt(r2.min(axis=(-2, -1)))


def check_collision_free(positions: ArrayLike, threshold: float = COLLISION_DISTANCE) -> None:
    """Raise CollisionError naming the closest pair if any pair is below threshold."""
    positions = np.asarray(positions, dtype=float)
    m = positions.shape[-2]
    flat = _squared_distances(positions).reshape(-1, m * m)
    worst = flat.min(axis=1)
    bad = np.flatnonzero(worst < threshold**2)
    if bad.size == 0:
        return
    node = int(bad[0])
    i, j = divmod(int(np.argmin(flat[node])), m)
    raise CollisionError(
        min(i, j),
        max(i, j),
        math.sqrt(worst[node]),
        node=node if positions.ndim == 3 else None,
    )


def _pair_terms(positions: NDArray, kappa: NDArray):
    """d[i, j] = u_j - u_i, squared distances (1 on the diagonal), pair weights."""
    d = positions[..., None, :, :] - positions[..., :, None, :]
    m = positions.shape[-2]
    off = ~np.eye(m, dtype=bool)
    r2 = np.where(off, np.einsum("...i,...i->...", d, d), 1.0)
    weights = np.outer(kappa, kappa) * off
    return d, r2, weights


# --- Potential and derivatives ---


def ring_equilibrium(params: ProblemParams) -> Configuration:
    """Central element at the origin, element j at exp(i j zeta)."""
    angles = params.zeta * np.arange(1, params.n + 1)
    positions = np.zeros((params.n + 1, 2))
    positions[1:, 0] = np.cos(angles)
    positions[1:, 1] = np.sin(angles)
    return Configuration(positions)


def potential(cfg: ConfigLike, params: ProblemParams) -> float:
    """V(u) = omega/2 sum kappa_j |u_j|^2 - sum_{i<j} kappa_i kappa_j ln|u_j - u_i|."""
    positions = _positions(cfg)
    _check_size(positions, params)
    check_collision_free(positions)
    kappa = circulations(params)
    _, r2, weights = _pair_terms(positions, kappa)
    rotation_term = 0.5 * params.omega * np.sum(kappa * np.sum(positions**2, axis=-1), axis=-1)
    # ln r = ln(r^2)/2 and the i != j sum counts each pair twice.
    return rotation_term - 0.25 * np.sum(weights * np.log(r2), axis=(-2, -1))


def gradient_array(positions: ArrayLike, params: ProblemParams) -> NDArray[np.float64]:
    """Gradient of V for stacked configurations, shape (..., n+1, 2)."""
    positions = np.asarray(positions, dtype=float)
    _check_size(positions, params)
    check_collision_free(positions)
    kappa = circulations(params)
    d, r2, weights = _pair_terms(positions, kappa)
    pair = np.sum((weights / r2)[..., None] * d, axis=-2)
    return params.omega * kappa[:, None] * positions + pair


def hessian_array(positions: ArrayLike, params: ProblemParams) -> NDArray[np.float64]:
    """Hessian of V for stacked configurations, shape (..., 2(n+1), 2(n+1))."""
    positions = np.asarray(positions, dtype=float)
    _check_size(positions, params)
    check_collision_free(positions)
    kappa = circulations(params)
    m = positions.shape[-2]
    d, r2, weights = _pair_terms(positions, kappa)

    # H_ij = kappa_i kappa_j (2 d d^T - |d|^2 I) / |d|^4
    outer = d[..., :, None] * d[..., None, :]
    pair = (weights / r2**2)[..., None, None] * (2.0 * outer - r2[..., None, None] * np.eye(2))

    blocks = -pair
    idx = np.arange(m)
    blocks[..., idx, idx, :, :] = (
        params.omega * kappa[:, None, None] * np.eye(2) + pair.sum(axis=-3)
    )
    shape = positions.shape[:-2] + (2 * m, 2 * m)
    return np.swapaxes(blocks, -3, -2).reshape(shape)


def grad_potential(cfg: ConfigLike, params: ProblemParams) -> NDArray[np.float64]:
    """Gradient of V in the 2(n+1) real coordinates."""
    return gradient_array(_positions(cfg), params).reshape(-1)


def hess_potential(cfg: ConfigLike, params: ProblemParams) -> NDArray[np.float64]:
    """Symmetric 2(n+1) x 2(n+1) Hessian of V."""
    return hessian_array(_positions(cfg), params)


def angular_impulse(cfg: ConfigLike, params: ProblemParams) -> Union[float, NDArray[np.float64]]:
    """Sum of kappa_j |u_j|^2."""
    positions = _positions(cfg)
    return np.sum(circulations(params) * np.sum(positions**2, axis=-1), axis=-1)


# --- Equations of motion ---


def _require_central_circulation(params: ProblemParams) -> None:
    if params.mu == 0.0:
        raise UnsupportedParameterError(
            "mu = 0: the central element carries no circulation and its equation of motion degenerates"
        )


def vortex_field(cfg: ConfigLike, params: ProblemParams) -> NDArray[np.float64]:
    """u' = -J K^{-1} grad V(u), the rotating-frame vortex flow."""
    _require_central_circulation(params)
    g = gradient_array(_positions(cfg), params)
    kappa = circulations(params)
    return (-(g / kappa[:, None]) @ J.T).reshape(-1)


def filament_tw_field(state: ArrayLike, params: ProblemParams) -> NDArray[np.float64]:
    """First-order form of K^2 u'' + 2 gamma K J u' = grad V(u) on (u, u')."""
    _require_central_circulation(params)
    state = np.asarray(state, dtype=float)
    m = params.n + 1
    if state.shape != (4 * m,):
        raise ValueError(f"state must have length {4 * m}, got {state.shape}")
    u = state[: 2 * m].reshape(m, 2)
    v = state[2 * m :].reshape(m, 2)
    kappa = circulations(params)[:, None]
    g = gradient_array(u, params)
    acc = (g - WAVE_COUPLING * params.gamma * kappa * (v @ J.T)) / kappa**2
    return np.concatenate([v.reshape(-1), acc.reshape(-1)])


def vortex_linearization(params: ProblemParams) -> NDArray[np.float64]:
    """-J K^{-1} D^2V at the ring equilibrium."""
    _require_central_circulation(params)
    circ = CirculationStructure.for_params(params)
    H = hess_potential(ring_equilibrium(params), params)
    return -circ.symplectic @ np.linalg.solve(circ.matrix, H)


def filament_linearization(params: ProblemParams) -> NDArray[np.float64]:
    """Linearized traveling-wave system at (ring equilibrium, 0) on (u, u')."""
    _require_central_circulation(params)
    circ = CirculationStructure.for_params(params)
    H = hess_potential(ring_equilibrium(params), params)
    k_inv = np.kron(np.diag(1.0 / circ.kappa), np.eye(2))
    size = params.size
    A = np.zeros((2 * size, 2 * size))
    A[:size, size:] = np.eye(size)
    A[size:, :size] = k_inv @ k_inv @ H
    A[size:, size:] = -WAVE_COUPLING * params.gamma * k_inv @ circ.symplectic
    return A


# --- Group action ---


@dataclass(frozen=True)
class GroupElement:
    """Cyclic shift of the ring, planar rotation angle and time phase."""

    shift: int = 0
    angle: float = 0.0
    phase: float = 0.0

    @classmethod
    def isotropy_generator(cls, n: int, k: int) -> GroupElement:
        """Generator of the isotropy group of the k-th bifurcating family."""
        zeta = 2.0 * math.pi / n
        return cls(shift=1, angle=zeta, phase=-k * zeta)


def rotation(theta: float) -> NDArray[np.float64]:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def shift_indices(n: int, shift: int) -> NDArray[np.int64]:
    """Source row for each element after a cyclic shift; row 0 stays put."""
    src = np.zeros(n + 1, dtype=int)
    src[1:] = (np.arange(n) + shift) % n + 1
    return src


def act_on_positions(positions: NDArray, element: GroupElement) -> NDArray:
    """y_j = R(-angle) x_{j+shift} on arrays of shape (..., n+1, 2)."""
    src = shift_indices(positions.shape[-2] - 1, element.shift)
    return positions[..., src, :] @ rotation(-element.angle).T


@singledispatch
def act_group(target, element: GroupElement):
    """Apply a group element to a configuration, coordinate array or loop."""
    raise TypeError(f"no group action defined for {type(target).__name__}")


@act_group.register(Configuration)
def _act_configuration(target: Configuration, element: GroupElement) -> Configuration:
    return Configuration(act_on_positions(target.positions, element))


@act_group.register(np.ndarray)
def _act_array(target: np.ndarray, element: GroupElement) -> np.ndarray:
    if target.ndim == 1:
        return act_on_positions(target.reshape(-1, 2), element).reshape(-1)
    return act_on_positions(target, element)
