"""Finite-difference Schrodinger eigenvalues -h*Lap + W on a truncated box.

Five-point Laplacian with zero values on the box edge; the box must be wide
enough that the potential dominates the computed levels on the boundary,
which is checked after each solve.  Potentials are rotationally symmetric
families, optionally pushed forward through a linear map (W composed with
the inverse map).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sparse
import scipy.sparse.linalg as splinalg

from .exact import Spectrum
from .fem import SolverFailure
from .geometry import INFINITE_ORDER, LinearMap2

__all__ = [
    "PotentialSpec",
    "GridSpec",
    "WidenGridError",
    "harmonic",
    "power_radial",
    "trisym",
    "schrodinger_spectrum",
    "transformed_problem",
]

DEFAULT_TRISYM_BETA = 0.2


class WidenGridError(RuntimeError):
    """Box too small: potential does not dominate the requested levels on the edge."""

    def __init__(self, message: str, suggested_half_width: float):
        super().__init__(message)
        self.suggested_half_width = suggested_half_width


@dataclass(frozen=True)
class PotentialSpec:
    """Coercive potential with rotational symmetry of order >= 3.

    kind: "harmonic" (|x|^2), "power" (|x|^q, even q >= 2), or "trisym"
    (|x|^4 + beta * Re((x1 + i x2)^3), three-fold symmetric for beta != 0).
    A pushforward map T evaluates W o T^-1 instead of W.
    """

    kind: str
    q: int = 2
    beta: float = 0.0
    pushforward: LinearMap2 | None = None

    def __post_init__(self):
        if self.kind not in ("harmonic", "power", "trisym"):
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if self.kind == "power" and (self.q < 2 or self.q % 2 != 0):
            raise ValueError("power potential needs an even exponent >= 2")
        if self.kind == "trisym" and abs(self.beta) >= 1.0:
            raise ValueError("trisym envelope needs |beta| < 1 to stay coercive")

    def symmetry_order(self) -> int:
        """Rotation order of the base potential (before any pushforward)."""
        return 3 if self.kind == "trisym" and self.beta != 0.0 else INFINITE_ORDER

    def base_values(self, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
        r2 = x1 * x1 + x2 * x2
        if self.kind == "harmonic":
            return r2
        if self.kind == "power":
            return r2 ** (self.q / 2.0)
        return r2 * r2 + self.beta * (x1**3 - 3.0 * x1 * x2 * x2)

    def values(self, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
        if self.pushforward is None:
            return self.base_values(x1, x2)
        inv = self.pushforward.inverse().as_array()
        y1 = inv[0, 0] * x1 + inv[0, 1] * x2
        y2 = inv[1, 0] * x1 + inv[1, 1] * x2
        return self.base_values(y1, y2)


def harmonic() -> PotentialSpec:
    return PotentialSpec("harmonic")


def power_radial(q: int) -> PotentialSpec:
    return PotentialSpec("power", q=q)


def trisym(beta: float = DEFAULT_TRISYM_BETA) -> PotentialSpec:
    return PotentialSpec("trisym", beta=beta)


@dataclass(frozen=True)
class GridSpec:
    """Square box [-L, L]^2 sampled with an odd number of points per side."""

    half_width: float = 8.0
    points_per_side: int = 201

    def __post_init__(self):
        if self.half_width <= 0:
            raise ValueError("half width must be positive")
        if self.points_per_side < 51 or self.points_per_side % 2 == 0:
            raise ValueError("points_per_side must be an odd integer >= 51")


def _fd_eigs(W: PotentialSpec, h: float, n: int, L: float, points: int) -> np.ndarray:
    x = np.linspace(-L, L, points)
    dx = x[1] - x[0]
    xi = x[1:-1]
    m = points - 2
    one = np.ones(m)
    T1 = sparse.diags([-one[:-1], 2.0 * one, -one[:-1]], [-1, 0, 1]) / dx**2
    eye = sparse.identity(m)
    lap = sparse.kron(T1, eye) + sparse.kron(eye, T1)
    X1, X2 = np.meshgrid(xi, xi, indexing="ij")
    K = (h * lap + sparse.diags(W.values(X1, X2).ravel())).tocsc()
    try:
        vals = splinalg.eigsh(K, k=n, sigma=0.0, which="LM", return_eigenvectors=False)
    except (splinalg.ArpackNoConvergence, RuntimeError) as exc:
        raise SolverFailure(f"grid eigensolve failed ({points} points): {exc}") from exc
    return np.sort(vals)


def schrodinger_spectrum(W: PotentialSpec, h: float, n: int, grid: GridSpec = GridSpec()) -> Spectrum:
    """First n eigenvalues of -h*Lap + W, with a grid-doubling error estimate.

    The coarse companion solve uses every other grid point; the reported
    estimate |fine - coarse| / 3 is the usual O(dx^2) Richardson bound.
    Raises WidenGridError when min W on the box edge fails to dominate the
    computed top level, since box truncation is then not negligible.
    """
    if h <= 0:
        raise ValueError("need h > 0")
    if n < 1:
        raise ValueError("need n >= 1")
    L, points = grid.half_width, grid.points_per_side
    fine = _fd_eigs(W, h, n, L, points)
    coarse = _fd_eigs(W, h, n, L, (points + 1) // 2)
    err = np.abs(fine - coarse) / 3.0

    # truncation check: W on the box edge must dominate the highest level
    edge = np.linspace(-L, L, points)
    sides = [
        W.values(edge, np.full_like(edge, -L)),
        W.values(edge, np.full_like(edge, L)),
        W.values(np.full_like(edge, -L), edge),
        W.values(np.full_like(edge, L), edge),
    ]
    wmin = float(min(s.min() for s in sides))
    top = float(fine[-1])
    if wmin < top:
        # suggest scaling the box so the boundary potential clears 3x the level
        grow = (3.0 * max(top, 1e-300) / max(wmin, 1e-300)) ** 0.5
        raise WidenGridError(
            f"min W on the box edge is {wmin:.4g} < top level {top:.4g}; "
            f"use half_width >= {grow * L:.3g}",
            suggested_half_width=grow * L,
        )
    return Spectrum(fine, "fd", err)


def transformed_problem(W: PotentialSpec, h: float, T: LinearMap2) -> tuple[PotentialSpec, float]:
    """Pushforward problem (W o T^-1, 2h / ||T^-1||_HS^2) appearing in the bound."""
    if T.is_singular():
        raise ValueError("map is singular")
    combined = T if W.pushforward is None else T @ W.pushforward
    wt = PotentialSpec(W.kind, q=W.q, beta=W.beta, pushforward=combined)
    hp = 2.0 * h / T.inverse().hs_norm_sq()
    return wt, hp
