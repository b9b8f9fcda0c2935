"""
Time Integration

Integrates the rotating-frame vortex flow and the traveling-wave filament
system, monitoring the conserved quantities and stopping at the first
close approach of two elements.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np
import scipy.fft
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import solve_ivp
from scipy.signal.windows import hann

from ringbif.core.errors import CollisionError, UnsupportedParameterError
from ringbif.core.model import (
    Configuration,
    ConfigLike,
    Kind,
    ProblemParams,
    angular_impulse,
    circulations,
    filament_tw_field,
    min_distance,
    potential,
    vortex_field,
)
from ringbif.core.symmetry import irrep_basis

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_COLLISION_EPS = 1e-6
ZERO_PAD = 8


class Method(str, Enum):
    RK4 = "rk4"
    DP54 = "dp54"
    DOP853 = "dop853"


_SOLVE_IVP_METHOD = {Method.DP54: "RK45", Method.DOP853: "DOP853"}


@dataclass(frozen=True)
class IntegratorConfig:
    """Integrator choice and run length; dt is used by rk4 only, tol by the adaptive pairs."""

    method: Method = Method.DP54
    t_end: float = 10.0
    dt: float = 1e-3
    tol: float = DEFAULT_TOL
    sample_dt: float = 1e-2
    collision_eps: float = DEFAULT_COLLISION_EPS

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if not (math.isfinite(self.t_end) and self.t_end > 0):
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not 1e-14 < self.tol < 1e-3:
            raise ValueError(f"tol must lie in (1e-14, 1e-3), got {self.tol}")
        if not self.sample_dt > 0:
            raise ValueError(f"sample_dt must be positive, got {self.sample_dt}")
        if not self.collision_eps > 0:
            raise ValueError(f"collision_eps must be positive, got {self.collision_eps}")


@dataclass(frozen=True)
class CollisionEvent:
    time: float
    pair: tuple[int, int]
    distance: float


@dataclass(eq=False)
class Trajectory:
    """Sampled solution; velocities are present for the filament system only."""

    params: ProblemParams
    times: NDArray[np.float64]
    positions: NDArray[np.float64]
    velocities: Optional[NDArray[np.float64]] = None
    drift: dict[str, float] = field(default_factory=dict)
    collision: Optional[CollisionEvent] = None

    @property
    def collided(self) -> bool:
        return self.collision is not None

    @property
    def final(self) -> Configuration:
        return Configuration(self.positions[-1])

    @property
    def samples(self) -> list[tuple]:
        if self.velocities is None:
            return [(float(t), Configuration(p)) for t, p in zip(self.times, self.positions)]
        return [
            (float(t), Configuration(p), v.reshape(-1))
            for t, p, v in zip(self.times, self.positions, self.velocities)
        ]

    def project(self, direction: ArrayLike) -> NDArray[np.float64]:
        """Signal <u(t), direction> in flat coordinates."""
        direction = np.asarray(direction, dtype=float).reshape(-1)
        return self.positions.reshape(len(self.times), -1) @ direction

    def summary(self) -> dict:
        return {
            "kind": self.params.kind.value,
            "n": self.params.n,
            "mu": self.params.mu,
            "gamma": self.params.gamma,
            "t_final": float(self.times[-1]),
            "samples": int(len(self.times)),
            "drift": dict(self.drift),
            "min_distance": float(np.min(min_distance(self.positions))),
            "collision": None
            if self.collision is None
            else {
                "time": self.collision.time,
                "pair": list(self.collision.pair),
                "distance": self.collision.distance,
            },
        }


def _closest_pair(positions: NDArray) -> tuple[tuple[int, int], float]:
    m = positions.shape[0]
    d = positions[None, :, :] - positions[:, None, :]
    r = np.sqrt(np.einsum("ijk,ijk->ij", d, d))
    r[np.arange(m), np.arange(m)] = np.inf
    i, j = divmod(int(np.argmin(r)), m)
    return (min(i, j), max(i, j)), float(r[i, j])


def _guarded(fun: Callable) -> Callable:
    """NaN inside the collision core so adaptive steps are rejected instead of raising."""

    def wrapped(t, y):
        try:
            return fun(t, y)
        except CollisionError:
            return np.full_like(y, np.nan)

    return wrapped


def _run(
    fun: Callable,
    y0: NDArray,
    m: int,
    icfg: IntegratorConfig,
) -> tuple[NDArray, NDArray, Optional[CollisionEvent]]:
    pair, dist = _closest_pair(y0[: 2 * m].reshape(m, 2))
    if dist <= icfg.collision_eps:
        # the separation event only fires on a descending crossing
        logger.warning("initial separation %g is below collision_eps %g", dist, icfg.collision_eps)
        return np.array([0.0]), y0[None, :].copy(), CollisionEvent(0.0, pair, dist)
    if icfg.method is Method.RK4:
        return _run_rk4(fun, y0, m, icfg)

    def separation(t, y):
        return float(min_distance(y[: 2 * m].reshape(m, 2))) - icfg.collision_eps

    separation.terminal = True
    separation.direction = -1

    count = max(1, int(math.ceil(icfg.t_end / icfg.sample_dt - 1e-9)))
    t_eval = np.linspace(0.0, icfg.t_end, count + 1)
    sol = solve_ivp(
        _guarded(fun),
        (0.0, icfg.t_end),
        y0,
        method=_SOLVE_IVP_METHOD[icfg.method],
        t_eval=t_eval,
        events=separation,
        rtol=icfg.tol,
        atol=icfg.tol,
    )
    times, states = sol.t, sol.y.T
    collision = None
    if sol.t_events[0].size:
        te, ye = float(sol.t_events[0][0]), sol.y_events[0][0]
        if te > times[-1]:
            times = np.append(times, te)
            states = np.vstack([states, ye])
        pair, dist = _closest_pair(ye[: 2 * m].reshape(m, 2))
        collision = CollisionEvent(te, pair, dist)
    elif sol.status == -1:
        pair, dist = _closest_pair(states[-1, : 2 * m].reshape(m, 2))
        collision = CollisionEvent(float(times[-1]), pair, dist)
        logger.warning("integration stopped at t=%g: %s", times[-1], sol.message)
    return times, states, collision


def _run_rk4(fun: Callable, y0: NDArray, m: int, icfg: IntegratorConfig):
    steps = max(1, int(round(icfg.t_end / icfg.dt)))
    h = icfg.t_end / steps
    stride = max(1, int(round(icfg.sample_dt / h)))
    times, states = [0.0], [y0.copy()]
    y, collision = y0.copy(), None
    for i in range(1, steps + 1):
        t = (i - 1) * h
        try:
            k1 = fun(t, y)
            k2 = fun(t + 0.5 * h, y + 0.5 * h * k1)
            k3 = fun(t + 0.5 * h, y + 0.5 * h * k2)
            k4 = fun(t + h, y + h * k3)
        except CollisionError:
            pair, dist = _closest_pair(y[: 2 * m].reshape(m, 2))
            collision = CollisionEvent(t, pair, dist)
            break
        y_next = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        pair, dist = _closest_pair(y_next[: 2 * m].reshape(m, 2))
        if dist < icfg.collision_eps or not np.all(np.isfinite(y_next)):
            collision = CollisionEvent(t, pair, dist)
            break
        y = y_next
        if i % stride == 0 or i == steps:
            times.append(i * h)
            states.append(y.copy())
    if collision is not None and times[-1] < collision.time:
        times.append(collision.time)
        states.append(y.copy())
    return np.array(times), np.array(states), collision


def _initial_positions(cfg0: ConfigLike, params: ProblemParams) -> NDArray:
    cfg = cfg0 if isinstance(cfg0, Configuration) else Configuration(cfg0)
    if cfg.n != params.n:
        raise ValueError(f"initial configuration has n={cfg.n}, params expect n={params.n}")
    return cfg.flat()


def _require_dynamics(params: ProblemParams) -> None:
    if params.mu == 0.0:
        raise UnsupportedParameterError("mu = 0: the dynamics of the central element degenerate")


def integrate_vortex(
    cfg0: ConfigLike, params: ProblemParams, icfg: Optional[IntegratorConfig] = None
) -> Trajectory:
    """Integrate u' = -J K^{-1} grad V(u) and record the drift of V and of sum kappa |u|^2."""
    _require_dynamics(params)
    icfg = icfg or IntegratorConfig()
    y0 = _initial_positions(cfg0, params)
    m = params.n + 1

    times, states, collision = _run(lambda t, y: vortex_field(y, params), y0, m, icfg)
    positions = states.reshape(len(times), m, 2)
    V = potential(positions, params)
    I = angular_impulse(positions, params)
    drift = {
        "potential": float(np.max(np.abs(V - V[0]))),
        "angular_impulse": float(np.max(np.abs(I - I[0]))),
    }
    if collision:
        logger.info("vortex run stopped by collision at t=%g, pair %s", collision.time, collision.pair)
    return Trajectory(params, times, positions, None, drift, collision)


def integrate_filament_tw(
    cfg0: ConfigLike,
    vel0: Optional[ArrayLike],
    params: ProblemParams,
    icfg: Optional[IntegratorConfig] = None,
) -> Trajectory:
    """Integrate K^2 u'' + 2 gamma K J u' = grad V(u); the energy monitor is recorded, not enforced."""
    _require_dynamics(params)
    icfg = icfg or IntegratorConfig()
    u0 = _initial_positions(cfg0, params)
    m = params.n + 1
    v0 = np.zeros(2 * m) if vel0 is None else np.asarray(vel0, dtype=float).reshape(-1)
    if v0.shape != (2 * m,):
        raise ValueError(f"initial velocity must have length {2 * m}, got {v0.shape}")

    times, states, collision = _run(
        lambda t, y: filament_tw_field(y, params), np.concatenate([u0, v0]), m, icfg
    )
    positions = states[:, : 2 * m].reshape(len(times), m, 2)
    velocities = states[:, 2 * m :].reshape(len(times), m, 2)
    kappa = circulations(params)
    kinetic = 0.5 * np.sum(kappa**2 * np.sum(velocities**2, axis=-1), axis=-1)
    E = kinetic - potential(positions, params)
    I = angular_impulse(positions, params)
    drift = {
        "angular_impulse": float(np.max(np.abs(I - I[0]))),
        "energy": float(np.max(np.abs(E - E[0]))),
    }
    if collision:
        logger.info("filament run stopped by collision at t=%g, pair %s", collision.time, collision.pair)
    return Trajectory(params, times, positions, velocities, drift, collision)


def integrate(
    cfg0: ConfigLike, params: ProblemParams, icfg: Optional[IntegratorConfig] = None, vel0=None
) -> Trajectory:
    if params.kind is Kind.VORTEX:
        return integrate_vortex(cfg0, params, icfg)
    return integrate_filament_tw(cfg0, vel0, params, icfg)


def mode_direction(n: int, k: int, component: int = 0) -> NDArray[np.float64]:
    """Unit real direction Re T_k(e_component) in flat coordinates."""
    basis = irrep_basis(n, k)
    if not 0 <= component < basis.dim:
        raise ValueError(f"component must be in 0..{basis.dim - 1}, got {component}")
    w = np.zeros(basis.dim)
    w[component] = 1.0
    v = basis.embed(w).real
    norm = np.linalg.norm(v)
    if norm == 0.0:
        v = basis.embed(w).imag
        norm = np.linalg.norm(v)
    return v / norm


def reflect(positions: ArrayLike) -> NDArray[np.float64]:
    """Mirror y -> -y of every element; reverses the direction of time for both flows."""
    out = np.array(positions, dtype=float)
    out[..., 1::2] *= -1.0
    return out


def dominant_frequency(signal: ArrayLike, dt: float, zero_pad: int = ZERO_PAD) -> float:
    """Angular frequency of the largest spectral peak of a uniformly sampled signal."""
    x = np.asarray(signal, dtype=float)
    if x.size < 8:
        raise ValueError("signal too short for a frequency estimate")
    x = (x - x.mean()) * hann(x.size, sym=False)
    n_fft = zero_pad * x.size
    mag = np.abs(scipy.fft.rfft(x, n=n_fft))
    i = int(np.argmax(mag[1:])) + 1
    shift = 0.0
    if 0 < i < mag.size - 1:
        a, b, c = mag[i - 1], mag[i], mag[i + 1]
        denom = a - 2.0 * b + c
        if denom != 0.0:
            shift = 0.5 * (a - c) / denom
    return 2.0 * math.pi * (i + shift) / (n_fft * dt)
