"""Closed-form spectra of model shapes, Bessel zeros, and 1D Robin eigenvalues.

Dirichlet/Neumann eigenvalues of equilateral triangles and rectangles come
from lattice enumeration of their classical formulas; disk eigenvalues from
Bessel zeros; rectangle Robin eigenvalues from tensor sums of the 1D Robin
problem.  Every enumeration uses a provable cutoff, so the first n values are
guaranteed complete.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import jv, jvp

__all__ = [
    "BoundarySpec",
    "DIRICHLET",
    "NEUMANN",
    "robin",
    "Spectrum",
    "BesselZeroRequest",
    "bessel_zero",
    "equilateral_spectrum",
    "rectangle_spectrum",
    "disk_spectrum",
    "robin_interval_eigs",
]


@dataclass(frozen=True)
class BoundarySpec:
    """Boundary condition selector: dirichlet, neumann, or robin(sigma >= 0)."""

    kind: str
    sigma: float = 0.0

    def __post_init__(self):
        if self.kind not in ("dirichlet", "neumann", "robin"):
            raise ValueError(f"unknown boundary kind {self.kind!r}")
        if self.kind == "robin" and not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ValueError("robin parameter must be finite and >= 0")
        if self.kind != "robin" and self.sigma != 0.0:
            raise ValueError("sigma only applies to robin boundaries")

    @property
    def is_dirichlet(self) -> bool:
        return self.kind == "dirichlet"

    @property
    def is_neumann_like(self) -> bool:
        # robin with sigma=0 is the same eigenproblem as neumann
        return self.kind == "neumann" or (self.kind == "robin" and self.sigma == 0.0)


DIRICHLET = BoundarySpec("dirichlet")
NEUMANN = BoundarySpec("neumann")


def robin(sigma: float) -> BoundarySpec:
    return BoundarySpec("robin", float(sigma))


@dataclass(eq=False)
class Spectrum:
    """Sorted eigenvalue list with per-value absolute error estimates."""

    values: np.ndarray
    method: str  # exact | fem | fd
    error_estimates: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.error_estimates is None:
            self.error_estimates = np.zeros_like(self.values)
        else:
            self.error_estimates = np.asarray(self.error_estimates, dtype=float)
        if self.values.shape != self.error_estimates.shape:
            raise ValueError("values and error_estimates must have equal length")
        if np.any(np.diff(self.values) < 0):
            raise ValueError("eigenvalues must be sorted nondecreasing")
        if np.any(self.error_estimates < 0):
            raise ValueError("error estimates must be nonnegative")
        if self.method not in ("exact", "fem", "fd"):
            raise ValueError(f"unknown method tag {self.method!r}")

    @property
    def n(self) -> int:
        return len(self.values)

    def sum_first(self, k: int) -> float:
        if k > self.n:
            raise ValueError(f"spectrum holds {self.n} values, asked for {k}")
        return float(np.sum(self.values[:k]))

    def error_sum(self, k: int) -> float:
        return float(np.sum(self.error_estimates[:k]))


@dataclass(frozen=True)
class BesselZeroRequest:
    """p-th positive zero of J_m (or of J_m' when derivative is set)."""

    m: int
    p: int
    derivative: bool = False

    def __post_init__(self):
        if self.m < 0 or self.p < 1:
            raise ValueError("need order m >= 0 and index p >= 1")


# ---------------------------------------------------------------------------
# Bessel zeros
# ---------------------------------------------------------------------------

_BRENTQ_KW = dict(xtol=1e-13, rtol=8.9e-16, maxiter=200)


def _round8(count: int) -> int:
    # quantize cache keys so interlacing recursion reuses lower orders
    return ((count + 7) // 8) * 8


@lru_cache(maxsize=None)
def _jn_zeros_cached(m: int, count: int) -> tuple[float, ...]:
    if m == 0:
        zeros = []
        x, fx = 2.0, jv(0, 2.0)
        while len(zeros) < count:
            x2 = x + 1.0
            fx2 = jv(0, x2)
            if fx == 0.0:
                zeros.append(x)
            elif fx * fx2 < 0:
                zeros.append(brentq(lambda t: jv(0, t), x, x2, **_BRENTQ_KW))
            x, fx = x2, fx2
        return tuple(zeros[:count])
    prev = _jn_zeros_cached(m - 1, _round8(count + 1))
    return tuple(
        brentq(lambda t: jv(m, t), prev[p], prev[p + 1], **_BRENTQ_KW) for p in range(count)
    )


def _jn_zeros(m: int, count: int) -> tuple[float, ...]:
    """First `count` positive zeros of J_m, by interlacing recursion over m.

    Zeros of consecutive orders strictly interlace
    (j_{m-1,p} < j_{m,p} < j_{m-1,p+1}), so each bracket from order m-1
    contains exactly one zero of order m.  The base order m=0 is bracketed by
    a unit-step sign scan, safe because J_0's zero spacing exceeds 2.9.
    """
    return _jn_zeros_cached(m, _round8(count))[:count]


@lru_cache(maxsize=None)
def _jnp_zeros_cached(m: int, count: int) -> tuple[float, ...]:
    if m == 0:
        return _jn_zeros(1, count)
    jz = _jn_zeros(m, count)
    out = [brentq(lambda t: jvp(m, t), max(float(m), 1e-3), jz[0], **_BRENTQ_KW)]
    for p in range(1, count):
        out.append(brentq(lambda t: jvp(m, t), jz[p - 1], jz[p], **_BRENTQ_KW))
    return tuple(out)


def _jnp_zeros(m: int, count: int) -> tuple[float, ...]:
    """First `count` positive zeros of J_m'.

    For m >= 1 they interlace with the zeros of J_m:
    m < j'_{m,1} < j_{m,1} < j'_{m,2} < j_{m,2} < ...; J_m' changes sign
    across each bracket.  J_0' = -J_1, so its positive zeros are J_1's.
    """
    return _jnp_zeros_cached(m, _round8(count))[:count]


def bessel_zero(req: BesselZeroRequest) -> float:
    """Positive zero j_{m,p} of J_m, or j'_{m,p} of J_m', to ~1e-12 absolute."""
    table = _jnp_zeros(req.m, req.p) if req.derivative else _jn_zeros(req.m, req.p)
    return table[req.p - 1]


# ---------------------------------------------------------------------------
# lattice spectra
# ---------------------------------------------------------------------------

def _first_n_sorted(candidates: list[float], n: int) -> np.ndarray:
    arr = np.sort(np.asarray(candidates, dtype=float))
    return arr[:n]


def equilateral_spectrum(side: float, bc: BoundarySpec, n: int) -> Spectrum:
    """First n Laplace eigenvalues of an equilateral triangle of the given side.

    Values are (16 pi^2 / 9)(j1^2 + j1 j2 + j2^2) / side^2 over integer pairs,
    j1, j2 >= 1 for Dirichlet and >= 0 for Neumann; ordered-pair counting gives
    the physical multiplicities.
    """
    if side <= 0:
        raise ValueError("side must be positive")
    if n < 1:
        raise ValueError("need n >= 1")
    if bc.kind == "robin" and bc.sigma != 0.0:
        raise ValueError("no closed-form Robin spectrum for triangles")
    start = 1 if bc.is_dirichlet else 0
    scale = 16.0 * math.pi**2 / (9.0 * side * side)
    # Q(j1,j2) >= max(j1,j2)^2 for j >= 0, so enumerating j <= sqrt(B) is complete up to B
    bound = float(3 * n + 9)
    while True:
        jmax = int(math.isqrt(int(bound))) + 1
        forms = [
            float(j1 * j1 + j1 * j2 + j2 * j2)
            for j1 in range(start, jmax + 1)
            for j2 in range(start, jmax + 1)
            if j1 * j1 + j1 * j2 + j2 * j2 <= bound
        ]
        if len(forms) >= n:
            vals = scale * _first_n_sorted(forms, n)
            return Spectrum(vals, "exact", 1e-14 * vals)
        bound *= 2.0


def rectangle_spectrum(l1: float, l2: float, bc: BoundarySpec, n: int) -> Spectrum:
    """First n eigenvalues of an l1 x l2 rectangle, any boundary condition.

    Dirichlet/Neumann: pi^2 ((j1/l1)^2 + (j2/l2)^2) with j >= 1 / j >= 0.
    Robin: tensor sums of 1D Robin eigenvalues in each direction.
    """
    if l1 <= 0 or l2 <= 0:
        raise ValueError("side lengths must be positive")
    if n < 1:
        raise ValueError("need n >= 1")
    if bc.kind == "robin" and bc.sigma > 0:
        return _rectangle_robin(l1, l2, bc.sigma, n)
    start = 1 if bc.is_dirichlet else 0
    bound = math.pi**2 * (n + 4) * (1.0 / l1**2 + 1.0 / l2**2)
    while True:
        m1 = int(math.sqrt(bound) * l1 / math.pi) + 1
        m2 = int(math.sqrt(bound) * l2 / math.pi) + 1
        vals = [
            math.pi**2 * ((j1 / l1) ** 2 + (j2 / l2) ** 2)
            for j1 in range(start, m1 + 1)
            for j2 in range(start, m2 + 1)
            if math.pi**2 * ((j1 / l1) ** 2 + (j2 / l2) ** 2) <= bound
        ]
        if len(vals) >= n:
            out = _first_n_sorted(vals, n)
            return Spectrum(out, "exact", 1e-14 * np.maximum(out, 1.0))
        bound *= 2.0


def _rectangle_robin(l1: float, l2: float, sigma: float, n: int) -> Spectrum:
    count = max(4, int(math.isqrt(n)) + 3)
    while True:
        r1 = robin_interval_eigs(l1, sigma, count)
        r2 = robin_interval_eigs(l2, sigma, count)
        sums = np.sort((r1[:, None] + r2[None, :]).ravel())
        if len(sums) >= n:
            nth = sums[n - 1]
            # any omitted pair has an index beyond `count` in some direction
            if r1[-1] + r2[0] > nth and r1[0] + r2[-1] > nth:
                vals = sums[:n]
                return Spectrum(vals, "exact", 1e-11 * np.maximum(vals, 1.0))
        count *= 2


def disk_spectrum(radius: float, bc: BoundarySpec, n: int) -> Spectrum:
    """First n eigenvalues of a disk from Bessel zeros.

    Dirichlet values are (j_{m,p}/radius)^2; Neumann are (j'_{m,p}/radius)^2
    over positive zeros, with the zero eigenvalue of the constant mode added
    explicitly.  Angular orders m >= 1 carry multiplicity two.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    if n < 1:
        raise ValueError("need n >= 1")
    if bc.kind == "robin" and bc.sigma != 0.0:
        raise ValueError("no closed-form Robin spectrum for disks")
    zeros_of = _jn_zeros if bc.is_dirichlet else _jnp_zeros
    bound = math.sqrt(4.0 * n + 40.0)  # zero magnitude cutoff, grown until complete
    while True:
        vals: list[float] = [] if bc.is_dirichlet else [0.0]
        m = 0
        while True:
            # zeros increase with both order and index, so stop at the first
            # order whose smallest zero clears the cutoff
            zs = zeros_of(m, 8)
            if zs[0] > bound:
                break
            while zs[-1] <= bound:
                zs = zeros_of(m, 2 * len(zs))
            for z in zs:
                if z <= bound:
                    vals.extend([z * z] if m == 0 else [z * z, z * z])
            m += 1
        if len(vals) >= n:
            out = _first_n_sorted(vals, n) / radius**2
            err = 2.0 * np.sqrt(np.maximum(out, 0.0)) * 1e-12 / radius
            return Spectrum(out, "exact", err)
        bound *= 1.5


# ---------------------------------------------------------------------------
# 1D Robin eigenvalues
# ---------------------------------------------------------------------------

def robin_interval_eigs(l: float, sigma: float, count: int) -> np.ndarray:
    """First `count` eigenvalues of -u'' = rho u on (0, l) with du/dn + sigma u = 0.

    sigma = 0 gives the Neumann values (pi k / l)^2; for sigma > 0 the k-th
    root satisfies tan(w l) = 2 sigma w / (w^2 - sigma^2) with
    w = sqrt(rho) in ((k-1) pi / l, k pi / l), found by bracketed root solving.
    """
    if l <= 0:
        raise ValueError("interval length must be positive")
    if sigma < 0:
        raise ValueError("robin parameter must be >= 0")
    if count < 1:
        raise ValueError("need count >= 1")
    if sigma == 0.0:
        return (math.pi * np.arange(count) / l) ** 2

    def f(w: float) -> float:
        return (w * w - sigma * sigma) * math.sin(w * l) - 2.0 * sigma * w * math.cos(w * l)

    out = []
    for k in range(count):
        lo = k * math.pi / l + 1e-13
        hi = (k + 1) * math.pi / l - 1e-13
        w = brentq(f, lo, hi, **_BRENTQ_KW)
        out.append(w * w)
    return np.asarray(out)
