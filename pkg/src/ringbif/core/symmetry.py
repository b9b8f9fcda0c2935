"""
Symmetry-Adapted Coordinates

Builds the isotypic bases W_k of the cyclic ring symmetry, the unitary
change of variables P whose column groups are those bases, and the
diagonal blocks B_k of the equilibrium Hessian, both extracted
numerically and in closed form.

Column layout of W_k (flat coordinates (x0, y0, x1, y1, ...)):
    peripheral e_a:  element j carries n^{-1/2} e^{ikj zeta} R(j zeta) e_a
    k = 1, n >= 3:   central (1, i)/sqrt(2) first
    k = n-1, n >= 3: central (1, -i)/sqrt(2) first
    n = 2, k = 1:    central e_1, central e_2, then the peripheral pair
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ringbif.core.model import ProblemParams, rotation

_SQRT_HALF = 1.0 / math.sqrt(2.0)


def _check_k(n: int, k: int) -> None:
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}, got {k}")


def has_central_mode(n: int, k: int) -> bool:
    """Whether the central element contributes to W_k."""
    return k == 1 or k == n - 1


def central_columns(n: int, k: int) -> list[int]:
    """Positions of the central-element columns inside the W_k block."""
    _check_k(n, k)
    if n == 2 and k == 1:
        return [0, 1]
    if has_central_mode(n, k):
        return [0]
    return []


@dataclass(frozen=True, eq=False)
class IrrepBasis:
    """Orthonormal basis of W_k, one complex column per block coordinate."""

    n: int
    k: int
    columns: NDArray[np.complex128]

    @property
    def dim(self) -> int:
        return self.columns.shape[1]

    def embed(self, w: ArrayLike) -> NDArray[np.complex128]:
        """T_k(w): block coordinates to complexified configuration space."""
        w = np.asarray(w, dtype=complex)
        if w.shape[0] != self.dim:
            raise ValueError(f"W_{self.k} has dimension {self.dim}, got a vector of length {w.shape[0]}")
        return self.columns @ w

    def coordinates(self, z: ArrayLike) -> NDArray[np.complex128]:
        """Orthogonal projection coefficients of z onto W_k."""
        return self.columns.conj().T @ np.asarray(z, dtype=complex)


@dataclass(frozen=True, eq=False)
class BlockDecomposition:
    """Blocks B_k of P* H P keyed by k, plus the Frobenius norm left off the blocks."""

    n: int
    blocks: dict[int, NDArray[np.complex128]] = field(default_factory=dict)
    residual: float = 0.0


def _peripheral_columns(n: int, k: int) -> NDArray[np.complex128]:
    zeta = 2.0 * math.pi / n
    cols = np.zeros((2 * (n + 1), 2), dtype=complex)
    for j in range(1, n + 1):
        phase = np.exp(1j * k * j * zeta) / math.sqrt(n)
        cols[2 * j : 2 * j + 2, :] = phase * rotation(j * zeta)
    return cols


def irrep_basis(n: int, k: int) -> IrrepBasis:
    """Orthonormal basis of the k-th isotypic component W_k."""
    _check_k(n, k)
    size = 2 * (n + 1)
    peripheral = _peripheral_columns(n, k)

    if n == 2 and k == 1:
        central = np.zeros((size, 2), dtype=complex)
        central[0, 0] = 1.0
        central[1, 1] = 1.0
        columns = np.hstack([central, peripheral])
    elif has_central_mode(n, k):
        central = np.zeros((size, 1), dtype=complex)
        sign = 1.0 if k == 1 else -1.0
        central[0, 0] = _SQRT_HALF
        central[1, 0] = sign * 1j * _SQRT_HALF
        columns = np.hstack([central, peripheral])
    else:
        columns = peripheral
    return IrrepBasis(n=n, k=k, columns=columns)


def block_layout(n: int) -> dict[int, slice]:
    """Column slice of P belonging to each k."""
    layout = {}
    start = 0
    for k in range(1, n + 1):
        dim = irrep_basis(n, k).dim
        layout[k] = slice(start, start + dim)
        start += dim
    return layout


def assemble_P(n: int) -> NDArray[np.complex128]:
    """Unitary 2(n+1) square matrix with the W_1, ..., W_n bases side by side."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    return np.hstack([irrep_basis(n, k).columns for k in range(1, n + 1)])


def decompose_hessian(H: ArrayLike, n: int) -> BlockDecomposition:
    """Project H onto the W_k column groups and measure the off-block leakage."""
    H = np.asarray(H)
    size = 2 * (n + 1)
    if H.shape != (size, size):
        raise ValueError(f"expected a {size}x{size} matrix for n={n}, got {H.shape}")

    P = assemble_P(n)
    M = P.conj().T @ H @ P
    leak = M.copy()
    blocks = {}
    for k, cols in block_layout(n).items():
        blocks[k] = M[cols, cols].copy()
        leak[cols, cols] = 0.0
    return BlockDecomposition(n=n, blocks=blocks, residual=float(np.linalg.norm(leak)))


def analytic_Bk(params: ProblemParams, k: int) -> NDArray[np.complex128]:
    """Closed-form block B_k of the equilibrium Hessian."""
    n = params.n
    _check_k(n, k)
    mu, omega = params.mu, params.omega

    if n == 2 and k == 1:
        C = np.diag([1.0, -1.0])
        I = np.eye(2)
        cross = -math.sqrt(2.0) * mu * C
        return np.block(
            [
                [omega * mu * I + 2.0 * mu * C, cross],
                [cross, omega * I + mu * C],
            ]
        ).astype(complex)

    if has_central_mode(n, k):
        a = math.sqrt(n / 2.0)
        s1 = params.s1
        B1 = np.array(
            [
                [mu * omega, -a * mu, -1j * a * mu],
                [-a * mu, s1 + 2.0 * mu, 0.0],
                [1j * a * mu, 0.0, s1],
            ],
            dtype=complex,
        )
        return B1 if k == 1 else B1.conj()

    s_k = params.s(k)
    return np.diag([2.0 * omega - s_k, s_k]).astype(complex)
