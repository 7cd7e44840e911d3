import math

import numpy as np
import pytest
import scipy.sparse as sparse

from eigenplane import exact as ex
from eigenplane import fem
from eigenplane import geometry as g

PI2 = math.pi**2


# ---------------------------------------------------------------------------
# meshing
# ---------------------------------------------------------------------------

def test_square_base_mesh():
    mesh = fem.mesh_domain(g.square(1.0), 0)
    assert mesh.num_triangles == 2
    assert mesh.num_vertices == 4
    assert len(mesh.boundary_edges) == 4


def test_square_level2_count():
    mesh = fem.mesh_domain(g.square(1.0), 2)
    assert mesh.num_triangles == 32


def test_refinement_scaling_counts():
    for lev in range(4):
        mesh = fem.mesh_domain(g.equilateral_triangle(), lev)
        assert mesh.num_triangles == 4**lev


def test_triangle_orientation_positive():
    mesh = fem.mesh_domain(g.regular_polygon(7), 2)
    a = mesh.vertices[mesh.triangles[:, 0]]
    b = mesh.vertices[mesh.triangles[:, 1]]
    c = mesh.vertices[mesh.triangles[:, 2]]
    areas = 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))
    assert np.all(areas > 0)


def test_nonconvex_polygon_meshes():
    p = g.Polygon([[0, 0], [2, 0], [2, 2], [1, 0.5], [0, 2]])
    mesh = fem.mesh_domain(p, 1)
    u = mesh.vertices[mesh.triangles[:, 1]] - mesh.vertices[mesh.triangles[:, 0]]
    v = mesh.vertices[mesh.triangles[:, 2]] - mesh.vertices[mesh.triangles[:, 0]]
    total = np.sum(0.5 * (u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]))
    assert total == pytest.approx(g.moments(p).area, rel=1e-12)


def test_disk_boundary_vertices_on_circle():
    mesh = fem.mesh_domain(g.Ellipse((0, 0), (1, 1)), 1)
    radii = np.linalg.norm(mesh.vertices[mesh.boundary_vertices()], axis=1)
    np.testing.assert_allclose(radii, 1.0, atol=1e-12)
    assert len(mesh.boundary_vertices()) == 128  # 64-gon doubled once


def test_mesh_nesting_for_polygons():
    coarse = fem.mesh_domain(g.square(1.0), 1)
    fine = fem.mesh_domain(g.square(1.0), 2)
    # every coarse vertex appears among the fine vertices
    for v in coarse.vertices:
        assert np.min(np.linalg.norm(fine.vertices - v, axis=1)) < 1e-14


def test_boundary_edges_form_closed_loop():
    mesh = fem.mesh_domain(g.equilateral_triangle(), 2)
    e = mesh.boundary_edges
    starts = sorted(e[:, 0].tolist())
    ends = sorted(e[:, 1].tolist())
    assert starts == ends  # each boundary vertex has one outgoing, one incoming


def test_mesh_export_format():
    mesh = fem.mesh_domain(g.square(1.0), 0)
    text = fem.mesh_to_text(mesh)
    lines = text.strip().splitlines()
    assert sum(ln.startswith("v ") for ln in lines) == 4
    assert sum(ln.startswith("t ") for ln in lines) == 2
    assert sum(ln.startswith("b ") for ln in lines) == 4


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

def test_stiffness_kernel_contains_constants():
    mesh = fem.Mesh(
        np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]),
        np.array([[0, 1, 2]]),
        np.array([[0, 1], [1, 2], [2, 0]]),
    )
    K, M, B = fem.assemble(mesh, ex.NEUMANN)
    np.testing.assert_allclose(np.asarray(K.sum(axis=1)).ravel(), 0.0, atol=1e-14)


def test_mass_total_is_area():
    mesh = fem.mesh_domain(g.Polygon([[0, 0], [1, 0], [0, 1]]), 2)
    K, M, B = fem.assemble(mesh, ex.NEUMANN)
    assert M.sum() == pytest.approx(0.5, rel=1e-13)


def test_robin_boundary_mass_total_is_sigma_perimeter():
    mesh = fem.mesh_domain(g.square(1.0), 3)
    K, M, B = fem.assemble(mesh, ex.robin(1.0))
    assert B.sum() == pytest.approx(4.0, abs=1e-12)
    K2, M2, B2 = fem.assemble(mesh, ex.robin(2.5))
    assert B2.sum() == pytest.approx(10.0, abs=1e-12)


def test_assembled_matrices_symmetric():
    mesh = fem.mesh_domain(g.regular_polygon(5), 2)
    for bc in (ex.DIRICHLET, ex.NEUMANN, ex.robin(1.0)):
        K, M, B = fem.assemble(mesh, bc)
        for A in (K, M, B):
            gap = abs(A - A.T)
            assert gap.max() if gap.nnz else 0.0 <= 1e-14 * max(1.0, abs(A).max())


def test_dirichlet_elimination_reduces_dimension():
    mesh = fem.mesh_domain(g.square(1.0), 2)
    K, M, B = fem.assemble(mesh, ex.DIRICHLET)
    assert K.shape[0] == len(mesh.interior_vertices())
    # mass stays positive definite after elimination
    vals = np.linalg.eigvalsh(M.toarray())
    assert vals.min() > 0


# ---------------------------------------------------------------------------
# eigenvalue extraction
# ---------------------------------------------------------------------------

def test_solve_eigs_identity_pair():
    K = sparse.identity(5, format="csr")
    vals = fem.solve_eigs(K, K, 3)
    np.testing.assert_allclose(vals, 1.0, atol=1e-12)


def test_solve_eigs_rejects_bad_n():
    K = sparse.identity(5, format="csr")
    with pytest.raises(ValueError):
        fem.solve_eigs(K, K, 6)


def test_square_dirichlet_upper_bound_within_one_percent():
    mesh = fem.mesh_domain(g.square(1.0), 4)
    K, M, _ = fem.assemble(mesh, ex.DIRICHLET)
    lam = fem.solve_eigs(K, M, 1)[0]
    assert 2 * PI2 <= lam <= 2 * PI2 * 1.01


def test_square_neumann_kernel_mode():
    mesh = fem.mesh_domain(g.square(1.0), 4)
    K, M, _ = fem.assemble(mesh, ex.NEUMANN)
    mu = fem.solve_eigs(K, M, 2, neumann_like=True)
    assert abs(mu[0]) <= 1e-9
    assert abs(mu[0]) <= 1e-9 * mu[1]


def test_sparse_path_matches_dense_path():
    mesh = fem.mesh_domain(g.square(1.0), 4)
    K, M, _ = fem.assemble(mesh, ex.DIRICHLET)
    dense = fem.solve_eigs(K, M, 4, dense_threshold=5000)
    it = fem.solve_eigs(K, M, 4, dense_threshold=100)
    np.testing.assert_allclose(it, dense, rtol=1e-9)


def test_sparse_path_neumann_zero_mode():
    mesh = fem.mesh_domain(g.square(1.0), 4)
    K, M, _ = fem.assemble(mesh, ex.NEUMANN)
    mu = fem.solve_eigs(K, M, 3, dense_threshold=100, neumann_like=True)
    dense = fem.solve_eigs(K, M, 3, dense_threshold=5000)
    assert abs(mu[0]) <= 1e-9
    np.testing.assert_allclose(mu[1:], dense[1:], rtol=1e-9)


# ---------------------------------------------------------------------------
# spectrum_fem
# ---------------------------------------------------------------------------

def test_equilateral_dirichlet_extrapolated():
    spec = fem.spectrum_fem(g.equilateral_triangle(), ex.DIRICHLET, 1, fem.FemOptions(max_refinement=5))
    assert spec.method == "fem"
    assert spec.values[0] == pytest.approx(16 * PI2 / 3, rel=1e-4)


def test_disk_neumann_two_modes():
    spec = fem.spectrum_fem(g.Ellipse((0, 0), (1, 1)), ex.NEUMANN, 2, fem.FemOptions(max_refinement=2))
    mu2 = ex.bessel_zero(ex.BesselZeroRequest(1, 1, derivative=True)) ** 2
    assert abs(spec.values[0]) < 1e-9
    assert spec.values[1] == pytest.approx(mu2, rel=5e-3)


def test_rectangle_robin_matches_tensor_oracle():
    spec = fem.spectrum_fem(g.rectangle(2, 1), ex.robin(1.0), 2, fem.FemOptions(max_refinement=5))
    oracle = ex.rectangle_spectrum(2, 1, ex.robin(1.0), 2).values
    np.testing.assert_allclose(spec.values, oracle, rtol=1e-3)


def test_error_estimates_cover_true_error():
    spec = fem.spectrum_fem(g.square(1.0), ex.DIRICHLET, 3, fem.FemOptions(max_refinement=4))
    exact = ex.rectangle_spectrum(1, 1, ex.DIRICHLET, 3).values
    assert np.all(np.abs(spec.values - exact) <= spec.error_estimates)


def test_conforming_upper_bounds_decrease_with_refinement():
    exact1 = 16 * PI2 / 3
    prev = None
    for lev in (2, 3, 4):
        mesh = fem.mesh_domain(g.equilateral_triangle(), lev)
        K, M, _ = fem.assemble(mesh, ex.DIRICHLET)
        lam = fem.solve_eigs(K, M, 1)[0]
        assert lam >= exact1
        if prev is not None:
            assert lam <= prev
        prev = lam


def test_scaling_invariance():
    r = 3.0
    base = fem.spectrum_fem(g.equilateral_triangle(1.0), ex.DIRICHLET, 3, fem.FemOptions(max_refinement=3))
    scaled = fem.spectrum_fem(g.equilateral_triangle(r), ex.DIRICHLET, 3, fem.FemOptions(max_refinement=3))
    np.testing.assert_allclose(scaled.values, base.values / r**2, rtol=1e-10)


def test_rigid_motion_invariance():
    tri = g.Polygon([[0, 0], [2, 0], [0.3, 1.1]])
    R = g.rotation(12, 1).as_array()
    moved = g.Polygon(tri.vertices @ R.T + np.array([4.0, -1.0]))
    a = fem.spectrum_fem(tri, ex.DIRICHLET, 3, fem.FemOptions(max_refinement=3))
    b = fem.spectrum_fem(moved, ex.DIRICHLET, 3, fem.FemOptions(max_refinement=3))
    np.testing.assert_allclose(a.values, b.values, rtol=1e-10)


def test_neumann_first_mode_small_everywhere():
    for d in (g.square(1.0), g.equilateral_triangle(), g.regular_polygon(6)):
        spec = fem.spectrum_fem(d, ex.NEUMANN, 2, fem.FemOptions(max_refinement=3))
        assert abs(spec.values[0]) <= 1e-9 * spec.values[1]


def test_robin_monotone_in_sigma_fixed_mesh():
    mesh = fem.mesh_domain(g.square(1.0), 3)
    prev = None
    for sigma in (0.0, 0.5, 1.0, 2.0, 8.0):
        bc = ex.robin(sigma) if sigma else ex.NEUMANN
        K, M, B = fem.assemble(mesh, bc)
        A = K + B if B.nnz else K
        vals = fem.solve_eigs(A, M, 4, neumann_like=(sigma == 0.0))
        if prev is not None:
            assert np.all(vals >= prev - 1e-11)
        prev = vals


def test_convergence_ratio_is_second_order():
    vals = {}
    for lev in (3, 4, 5):
        mesh = fem.mesh_domain(g.square(1.0), lev)
        K, M, _ = fem.assemble(mesh, ex.DIRICHLET)
        vals[lev] = fem.solve_eigs(K, M, 1)[0]
    ratio = (vals[3] - vals[4]) / (vals[4] - vals[5])
    assert 3.5 <= ratio <= 4.5


def test_spectrum_fem_needs_enough_dofs():
    with pytest.raises(ValueError):
        fem.spectrum_fem(g.square(1.0), ex.DIRICHLET, 5, fem.FemOptions(max_refinement=1))


def test_fem_options_validation():
    with pytest.raises(ValueError):
        fem.FemOptions(dense_threshold=10)
    with pytest.raises(ValueError):
        fem.FemOptions(max_refinement=0)
