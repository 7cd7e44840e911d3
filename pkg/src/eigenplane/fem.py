"""P1 finite elements for Laplace eigenvalues on polygons and ellipses.

Conforming piecewise-linear elements on uniformly refined triangulations.
All local integrals (stiffness, mass, boundary mass) are exact, Dirichlet
conditions are imposed by eliminating boundary nodes, and eigenvalues are
extracted densely below a size threshold or by shift-invert Lanczos above it.
Conforming spaces on nested meshes make every Dirichlet eigenvalue a
decreasing-in-refinement upper bound on the true one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sparse
import scipy.sparse.linalg as splinalg

from .exact import BoundarySpec, Spectrum
from .geometry import DomainSpec, Ellipse, Polygon

__all__ = [
    "Mesh",
    "FemOptions",
    "SolverFailure",
    "mesh_domain",
    "assemble",
    "solve_eigs",
    "spectrum_fem",
    "mesh_to_text",
]

ELLIPSE_BASE_SEGMENTS = 64


class SolverFailure(RuntimeError):
    """Eigenvalue iteration failed to converge; message carries diagnostics."""


@dataclass(eq=False)
class Mesh:
    """Conforming triangle mesh.

    vertices : (nv, 2) float array
    triangles : (nt, 3) int array, positively oriented
    boundary_edges : (nb, 2) int array, directed so the domain lies on the left
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    refinement_level: int = 0

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_triangles(self) -> int:
        return len(self.triangles)

    def boundary_vertices(self) -> np.ndarray:
        return np.unique(self.boundary_edges)

    def interior_vertices(self) -> np.ndarray:
        mask = np.ones(self.num_vertices, dtype=bool)
        mask[self.boundary_vertices()] = False
        return np.nonzero(mask)[0]


def _triangle_areas(verts: np.ndarray, tris: np.ndarray) -> np.ndarray:
    a = verts[tris[:, 0]]
    b = verts[tris[:, 1]]
    c = verts[tris[:, 2]]
    return 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))


def _boundary_edges_from_triangles(tris: np.ndarray) -> np.ndarray:
    """Directed edges owned by exactly one triangle, in that triangle's (CCW) order."""
    count: dict[tuple[int, int], int] = {}
    directed: dict[tuple[int, int], tuple[int, int]] = {}
    for t in tris:
        for i in range(3):
            a, b = int(t[i]), int(t[(i + 1) % 3])
            key = (min(a, b), max(a, b))
            count[key] = count.get(key, 0) + 1
            directed[key] = (a, b)
    edges = [directed[k] for k, c in count.items() if c == 1]
    return np.asarray(edges, dtype=int).reshape(-1, 2)


def _is_convex(verts: np.ndarray) -> bool:
    n = len(verts)
    for i in range(n):
        a, b, c = verts[i], verts[(i + 1) % n], verts[(i + 2) % n]
        if (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]) < 0:
            return False
    return True


def _point_in_triangle(p, a, b, c) -> bool:
    def orient(u, v, w):
        return (v[0] - u[0]) * (w[1] - u[1]) - (v[1] - u[1]) * (w[0] - u[0])

    eps = -1e-14
    return orient(a, b, p) >= eps and orient(b, c, p) >= eps and orient(c, a, p) >= eps


def _triangulate_polygon(verts: np.ndarray) -> np.ndarray:
    """Fan a convex polygon, ear-clip otherwise."""
    n = len(verts)
    if _is_convex(verts):
        return np.array([[0, i, i + 1] for i in range(1, n - 1)], dtype=int)
    idx = list(range(n))
    tris = []
    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 10 * n * n:
            raise ValueError("ear clipping failed; polygon may be degenerate")
        m = len(idx)
        for k in range(m):
            i0, i1, i2 = idx[(k - 1) % m], idx[k], idx[(k + 1) % m]
            a, b, c = verts[i0], verts[i1], verts[i2]
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if cross <= 1e-14 * (1 + np.abs(verts).max()) ** 2:
                continue  # reflex or collinear corner
            if any(
                _point_in_triangle(verts[j], a, b, c)
                for j in idx
                if j not in (i0, i1, i2)
            ):
                continue
            tris.append([i0, i1, i2])
            idx.pop(k)
            break
        else:
            raise ValueError("ear clipping found no ear; polygon may be degenerate")
    tris.append(idx)
    return np.asarray(tris, dtype=int)


def _refine_once(verts, tris, boundary_project=None, boundary_params=None):
    """Split every triangle into 4 congruent children via shared edge midpoints.

    boundary_project(phi) with boundary_params (vertex -> parameter) projects
    new midpoints of boundary edges onto a curved boundary; both None keeps
    straight (nested) refinement.
    """
    verts = list(map(np.asarray, verts))
    boundary = {tuple(sorted(e)) for e in _boundary_edges_from_triangles(tris)}
    midpoint: dict[tuple[int, int], int] = {}
    new_params = dict(boundary_params) if boundary_params else {}

    def mid(a: int, b: int) -> int:
        key = (min(a, b), max(a, b))
        if key in midpoint:
            return midpoint[key]
        if boundary_project is not None and key in boundary:
            pa, pb = new_params[key[0]], new_params[key[1]]
            # circular midpoint of the two parameter angles
            diff = (pb - pa + math.pi) % (2 * math.pi) - math.pi
            phi = pa + diff / 2.0
            p = boundary_project(phi)
            new_params[len(verts)] = phi % (2 * math.pi)
        else:
            p = 0.5 * (verts[a] + verts[b])
        midpoint[key] = len(verts)
        verts.append(p)
        return midpoint[key]

    out = []
    for t in tris:
        i0, i1, i2 = map(int, t)
        m01, m12, m20 = mid(i0, i1), mid(i1, i2), mid(i2, i0)
        out.extend([[i0, m01, m20], [m01, i1, m12], [m20, m12, i2], [m01, m12, m20]])
    return np.array(verts), np.asarray(out, dtype=int), new_params


def mesh_domain(d: DomainSpec, level: int = 0) -> Mesh:
    """Triangulate a domain and refine uniformly `level` times.

    Polygons are fan/ear triangulated; refinements are nested.  Ellipses start
    from the inscribed regular 64-gon fanned around the center, and each
    refinement re-projects new boundary midpoints onto the true ellipse.
    """
    if level < 0:
        raise ValueError("refinement level must be >= 0")
    if isinstance(d, Polygon):
        verts = d.vertices.copy()
        tris = _triangulate_polygon(verts)
        project, params = None, None
    elif isinstance(d, Ellipse):
        k = ELLIPSE_BASE_SEGMENTS
        phis = 2 * math.pi * np.arange(k) / k
        ring = np.array([d.boundary_point(p) for p in phis])
        verts = np.vstack([d.center[None, :], ring])
        tris = np.array([[0, 1 + i, 1 + (i + 1) % k] for i in range(k)], dtype=int)
        project = d.boundary_point
        params = {1 + i: float(phis[i]) for i in range(k)}
    else:
        raise TypeError(f"not a domain: {type(d).__name__}")

    for _ in range(level):
        verts, tris, params = _refine_once(verts, tris, project, params)

    areas = _triangle_areas(verts, tris)
    if np.any(areas <= 0):
        raise ValueError("triangulation produced a non-positively-oriented triangle")
    return Mesh(verts, tris, _boundary_edges_from_triangles(tris), refinement_level=level)


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

def assemble(mesh: Mesh, bc: BoundarySpec):
    """Stiffness K, mass M and Robin boundary matrix B for the P1 space.

    All three are exact elementwise: constant gradients for K, the analytic
    3x3 local mass for M, and exact edge integrals of products of linear
    functions for B (already scaled by sigma).  Dirichlet boundary nodes are
    eliminated, so K and M shrink to the interior degrees of freedom and B is
    empty; Neumann/Robin keep every node.
    """
    verts, tris = mesh.vertices, mesh.triangles
    nv = len(verts)

    a = verts[tris[:, 0]]
    b = verts[tris[:, 1]]
    c = verts[tris[:, 2]]
    area = _triangle_areas(verts, tris)
    # gradients of barycentric coordinates: rotate opposite edges
    g0 = np.stack([b[:, 1] - c[:, 1], c[:, 0] - b[:, 0]], axis=1)
    g1 = np.stack([c[:, 1] - a[:, 1], a[:, 0] - c[:, 0]], axis=1)
    g2 = np.stack([a[:, 1] - b[:, 1], b[:, 0] - a[:, 0]], axis=1)
    grads = np.stack([g0, g1, g2], axis=1) / (2.0 * area)[:, None, None]

    rows, cols, kv, mv = [], [], [], []
    local_mass = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0
    for i in range(3):
        for j in range(3):
            rows.append(tris[:, i])
            cols.append(tris[:, j])
            kv.append(area * np.einsum("td,td->t", grads[:, i], grads[:, j]))
            mv.append(area * local_mass[i, j])
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    K = sparse.coo_matrix((np.concatenate(kv), (rows, cols)), shape=(nv, nv)).tocsr()
    M = sparse.coo_matrix((np.concatenate(mv), (rows, cols)), shape=(nv, nv)).tocsr()

    if bc.is_dirichlet:
        keep = mesh.interior_vertices()
        if len(keep) == 0:
            raise ValueError("no interior degrees of freedom; refine the mesh")
        K = K[np.ix_(keep, keep)].tocsr()
        M = M[np.ix_(keep, keep)].tocsr()
        B = sparse.csr_matrix(K.shape)
        return K, M, B

    if bc.kind == "robin" and bc.sigma > 0:
        e = mesh.boundary_edges
        h = np.linalg.norm(verts[e[:, 1]] - verts[e[:, 0]], axis=1)
        br, bcn, bv = [], [], []
        edge_mass = np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0
        for i in range(2):
            for j in range(2):
                br.append(e[:, i])
                bcn.append(e[:, j])
                bv.append(bc.sigma * h * edge_mass[i, j])
        B = sparse.coo_matrix(
            (np.concatenate(bv), (np.concatenate(br), np.concatenate(bcn))), shape=(nv, nv)
        ).tocsr()
    else:
        B = sparse.csr_matrix((nv, nv))
    return K, M, B


# ---------------------------------------------------------------------------
# eigenvalue extraction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FemOptions:
    """Refinement and solver knobs for spectrum_fem."""

    max_refinement: int = 5
    dense_threshold: int = 1500
    eig_tolerance: float = 1e-8
    extrapolate: bool = True

    def __post_init__(self):
        if self.max_refinement < 1 or self.eig_tolerance <= 0:
            raise ValueError("options must be positive")
        if self.dense_threshold < 100:
            raise ValueError("dense_threshold must be >= 100")


def solve_eigs(
    K,
    M,
    n: int,
    tol: float = 1e-8,
    dense_threshold: int = 1500,
    neumann_like: bool = False,
) -> np.ndarray:
    """n smallest eigenvalues of K u = lambda M u, residual-checked.

    Dense reduction below `dense_threshold` unknowns, shift-invert Lanczos
    above it: shift 0 for positive-definite K, a small positive shift when a
    zero mode is expected (neumann_like) so the kernel is resolved cleanly.
    """
    dim = K.shape[0]
    if n < 1 or n > dim:
        raise ValueError(f"need 1 <= n <= {dim}, got {n}")
    if dim <= dense_threshold:
        vals, vecs = scipy.linalg.eigh(_dense(K), _dense(M))
        vals, vecs = vals[:n], vecs[:, :n]
    else:
        sigma = 1e-8 * _dense_trace(K) / dim if neumann_like else 0.0
        try:
            vals, vecs = splinalg.eigsh(
                sparse.csc_matrix(K), k=n, M=sparse.csc_matrix(M), sigma=sigma, which="LM"
            )
        except (splinalg.ArpackNoConvergence, RuntimeError) as exc:
            raise SolverFailure(f"shift-invert iteration failed at dim={dim}, n={n}: {exc}") from exc
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    _check_residuals(K, M, vals, vecs, tol)
    return np.asarray(vals, dtype=float)


def _dense(A):
    return A.toarray() if sparse.issparse(A) else np.asarray(A, dtype=float)


def _dense_trace(A) -> float:
    return float(A.diagonal().sum())


def _check_residuals(K, M, vals, vecs, tol):
    for lam, u in zip(vals, vecs.T):
        res = np.linalg.norm(K @ u - lam * (M @ u))
        bound = tol * np.linalg.norm(M @ u) * (1.0 + abs(lam))
        # absolute floor guards tiny Neumann kernel values, where |lam| ~ 0
        if res > max(bound, tol):
            raise SolverFailure(
                f"residual {res:.3e} exceeds {bound:.3e} for eigenvalue {lam:.6e}"
            )


def spectrum_fem(d: DomainSpec, bc: BoundarySpec, n: int, opts: FemOptions = FemOptions()) -> Spectrum:
    """FEM spectrum with two-level Richardson extrapolation and error estimates.

    Solves on levels (max_refinement - 1, max_refinement); assuming the P1
    O(h^2) rate, the extrapolated value is (4 x fine - coarse)/3 and the
    reported per-eigenvalue error estimate |fine - coarse|/3.
    """
    level = opts.max_refinement
    coarse = _solve_level(d, bc, n, level - 1, opts)
    fine = _solve_level(d, bc, n, level, opts)
    err = np.abs(fine - coarse) / 3.0
    vals = (4.0 * fine - coarse) / 3.0 if opts.extrapolate else fine
    order = np.argsort(vals)
    vals, err = vals[order], err[order]
    if bc.is_neumann_like:
        # the discrete kernel value is pure solver noise; its honest error
        # estimate is its own magnitude
        err[0] = max(err[0], abs(vals[0]))
    return Spectrum(vals, "fem", err)


def _solve_level(d, bc, n, level, opts):
    mesh = mesh_domain(d, level)
    K, M, B = assemble(mesh, bc)
    if K.shape[0] < n:
        raise ValueError(
            f"level {level} mesh has only {K.shape[0]} degrees of freedom, need {n}"
        )
    A = K + B if B.nnz else K
    return solve_eigs(
        A, M, n, opts.eig_tolerance, opts.dense_threshold, neumann_like=bc.is_neumann_like
    )


def mesh_to_text(mesh: Mesh) -> str:
    """Plain-text dump: "v x y" vertices, "t i j k" triangles, "b i j" boundary edges."""
    lines = [f"v {x:.17g} {y:.17g}" for x, y in mesh.vertices]
    lines += [f"t {i} {j} {k}" for i, j, k in mesh.triangles]
    lines += [f"b {i} {j}" for i, j in mesh.boundary_edges]
    return "\n".join(lines) + "\n"
