"""Galerkin solver: Newton behavior, accuracy, coefficient families."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from critcount.boundary import BoundaryProfile
from critcount.errors import ConvergenceFailureError, EllipticityFailureError
from critcount.mesh import build_disk_mesh
from critcount.oracle import disk_harmonic, eval_harmonic
from critcount.solver import (
    boundary_values_from_profile,
    custom_flux_family,
    family_by_name,
    laplace_family,
    minimal_surface_family,
    solve_dirichlet,
)


def test_laplace_converges_in_one_step(disk_coarse):
    prof = BoundaryProfile((0.0, 0.0, 1.0), (0.0, 0.0, 0.0))
    bv = boundary_values_from_profile(disk_coarse, prof)
    res = solve_dirichlet(disk_coarse, bv, laplace_family())
    assert res.newton.converged
    assert res.newton.iterations == 1


def test_affine_data_reproduced_exactly(disk_coarse):
    # u = x is in the P1 space because boundary vertices sit on the circle
    prof = BoundaryProfile((0.0, 1.0), (0.0, 0.0))
    bv = boundary_values_from_profile(disk_coarse, prof)
    for family in (laplace_family(), minimal_surface_family()):
        res = solve_dirichlet(disk_coarse, bv, family)
        err = np.max(np.abs(res.values - disk_coarse.vertices[:, 0]))
        assert err < 1e-9


def test_laplace_matches_oracle(disk_coarse):
    prof = BoundaryProfile((0.0, 0.0, 1.0), (0.0, 0.0, 0.0))
    rep = disk_harmonic(prof, 1.0)
    want, _ = eval_harmonic(rep, disk_coarse.vertices)
    bv = boundary_values_from_profile(disk_coarse, prof)
    res = solve_dirichlet(disk_coarse, bv, laplace_family())
    assert np.max(np.abs(res.values - want)) < 0.004


def test_order_two_convergence():
    prof = BoundaryProfile((0.0, 0.0, 1.0), (0.0, 0.0, 0.0))
    errors = []
    for h in (0.1, 0.05):
        mesh = build_disk_mesh(1.0, h)
        rep = disk_harmonic(prof, 1.0)
        want, _ = eval_harmonic(rep, mesh.vertices)
        res = solve_dirichlet(mesh, boundary_values_from_profile(mesh, prof), laplace_family())
        errors.append(float(np.max(np.abs(res.values - want))))
    assert errors[0] / errors[1] >= 3.0


def test_minimal_surface_converges(disk_coarse):
    prof = BoundaryProfile((0.0, 0.0, 1.0), (0.0, 0.0, 0.0))
    bv = boundary_values_from_profile(disk_coarse, prof)
    res = solve_dirichlet(disk_coarse, bv, minimal_surface_family())
    assert res.newton.converged
    assert res.newton.residual_norms[-1] < 1e-9
    # bounded by its boundary data
    assert res.values.max() <= bv.max() + 1e-9
    assert res.values.min() >= bv.min() - 1e-9


def test_gradient_shape(saddle_solve):
    g = saddle_solve.gradient()
    assert g.shape == (saddle_solve.mesh.num_triangles, 2)


def test_family_by_name():
    assert family_by_name("LAPLACE").name == "LAPLACE"
    assert family_by_name("MINIMAL_SURFACE").name == "MINIMAL_SURFACE"
    with pytest.raises(ValueError):
        family_by_name("BIHARMONIC")


def test_custom_flux_anisotropic(disk_coarse):
    # constant SPD coefficient: affine boundary data still gives u = x
    A = np.array([[2.0, 0.3], [0.3, 1.0]])

    def flux(p):
        return p @ A.T

    def flux_jacobian(p):
        return np.broadcast_to(A, (p.shape[0], 2, 2))

    fam = custom_flux_family(flux, flux_jacobian)
    prof = BoundaryProfile((0.0, 1.0), (0.0, 0.0))
    bv = boundary_values_from_profile(disk_coarse, prof)
    res = solve_dirichlet(disk_coarse, bv, fam)
    assert np.max(np.abs(res.values - disk_coarse.vertices[:, 0])) < 1e-9


def test_ellipticity_guard(disk_coarse):
    def flux(p):
        return -p

    def flux_jacobian(p):
        return np.broadcast_to(-np.eye(2), (p.shape[0], 2, 2))

    fam = custom_flux_family(flux, flux_jacobian)
    prof = BoundaryProfile((0.0, 1.0), (0.0, 0.0))
    bv = boundary_values_from_profile(disk_coarse, prof)
    with pytest.raises(EllipticityFailureError):
        solve_dirichlet(disk_coarse, bv, fam)


def test_max_iter_exhaustion(disk_coarse):
    prof = BoundaryProfile((0.0, 0.0, 0.0, 2.0), (0.0, 0.0, 0.0, 0.0))
    bv = boundary_values_from_profile(disk_coarse, prof)
    with pytest.raises(ConvergenceFailureError):
        solve_dirichlet(disk_coarse, bv, minimal_surface_family(), max_iter=1)


def test_annulus_boundary_values(annulus_coarse):
    prof = BoundaryProfile((2.0, 0.0, 1.0), (0.0, 0.0, 0.0))
    bv = boundary_values_from_profile(annulus_coarse, prof, inner_value=0.5)
    inner = annulus_coarse.loop("INNER").vertices
    outer = annulus_coarse.loop("OUTER").vertices
    assert np.allclose(bv[inner], 0.5, atol=1e-12)
    theta = annulus_coarse.boundary_param[outer]
    want = 2.0 + np.cos(2.0 * theta)
    assert np.allclose(bv[outer], want, atol=1e-12)


def test_annulus_requires_inner_value(annulus_coarse):
    prof = BoundaryProfile((2.0, 0.0, 1.0), (0.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        boundary_values_from_profile(annulus_coarse, prof)


coeff = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)


@settings(max_examples=10, deadline=None)
@given(
    cos_c=st.lists(coeff, min_size=2, max_size=4),
    sin_c=st.lists(coeff, min_size=0, max_size=3).map(lambda xs: [0.0] + xs),
)
def test_converged_residual_below_tolerance(disk_coarse, cos_c, sin_c):
    prof = BoundaryProfile(tuple(cos_c), tuple(sin_c))
    bv = boundary_values_from_profile(disk_coarse, prof)
    res = solve_dirichlet(disk_coarse, bv, laplace_family())
    assert res.newton.converged
    assert res.newton.residual_norms[-1] <= 1e-10 * max(1.0, res.newton.residual_norms[0])


@settings(max_examples=10, deadline=None)
@given(cos_c=st.lists(coeff, min_size=2, max_size=4))
def test_mirror_symmetric_data_gives_symmetric_solution(disk_coarse, cos_c):
    # pure cosine data is even in theta and the mesh is mirror symmetric,
    # so the discrete solution must be exactly even in y
    prof = BoundaryProfile(tuple(cos_c), (0.0,) * len(cos_c))
    bv = boundary_values_from_profile(disk_coarse, prof)
    res = solve_dirichlet(disk_coarse, bv, laplace_family())
    v = disk_coarse.vertices
    key = {(round(x, 12), round(y, 12)): val for (x, y), val in zip(v, res.values)}
    for (x, y), val in zip(v, res.values):
        mirror = key[(round(x, 12), round(-y, 12))]
        assert math.isclose(val, mirror, rel_tol=0.0, abs_tol=1e-11)
