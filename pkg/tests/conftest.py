"""Shared fixtures: coarse meshes and solved fields reused across tests.

Everything here is session scoped; tests must not mutate fixture arrays.
"""

import numpy as np
import pytest

from critcount.boundary import BoundaryProfile
from critcount.mesh import build_annulus_mesh, build_disk_mesh
from critcount.solver import (
    NewtonReport,
    SolveResult,
    boundary_values_from_profile,
    laplace_family,
    solve_dirichlet,
)


@pytest.fixture(scope="session")
def disk_coarse():
    return build_disk_mesh(1.0, 0.1)


@pytest.fixture(scope="session")
def disk_mid():
    return build_disk_mesh(1.0, 0.05)


@pytest.fixture(scope="session")
def annulus_coarse():
    return build_annulus_mesh(1.0, 2.0, 0.1)


@pytest.fixture(scope="session")
def saddle_solve(disk_mid):
    """Laplace solve of psi = cos 2theta: one saddle at the origin."""
    prof = BoundaryProfile((0.0, 0.0, 1.0), (0.0, 0.0, 0.0))
    bv = boundary_values_from_profile(disk_mid, prof)
    return solve_dirichlet(disk_mid, bv, laplace_family())


def interpolant_result(mesh, fn) -> SolveResult:
    """Wrap exact nodal values of fn(x, y) as a solved field."""
    values = fn(mesh.vertices[:, 0], mesh.vertices[:, 1])
    report = NewtonReport(True, 0, (0.0,), ())
    return SolveResult(mesh, laplace_family(), np.asarray(values, dtype=float), report)
