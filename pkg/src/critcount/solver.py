"""Finite element solver for quasilinear Dirichlet problems.

The equation is posed in divergence form: find u matching the boundary
data with div F(grad u) = 0, where the flux F has a positive definite
derivative on the gradient range of interest.  Piecewise linear elements
on the triangulation give one constant gradient per triangle, so both
the residual and its Jacobian assemble from per-triangle evaluations of
F and dF/dp.  Newton's method with step halving drives the residual to
a relative tolerance.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .boundary import BoundaryProfile
from .errors import ConvergenceFailureError, EllipticityFailureError
from .mesh import INNER, OUTER, MeshedDomain

LAPLACE = "LAPLACE"
MINIMAL_SURFACE = "MINIMAL_SURFACE"
CUSTOM_FLUX = "CUSTOM_FLUX"


@dataclass(frozen=True)
class FluxFamily:
    """A coefficient family given by its flux p -> F(p) and derivative.

    flux maps an (n, 2) array of gradients to (n, 2) flux vectors.
    flux_jacobian maps the same input to (n, 2, 2) derivative matrices
    dF_i/dp_j, which must stay positive definite (symmetric part) on the
    gradients the solve visits.
    """

    name: str
    flux: Callable[[np.ndarray], np.ndarray]
    flux_jacobian: Callable[[np.ndarray], np.ndarray]


def _laplace_flux(p: np.ndarray) -> np.ndarray:
    return p


def _laplace_jacobian(p: np.ndarray) -> np.ndarray:
    n = p.shape[0]
    out = np.zeros((n, 2, 2))
    out[:, 0, 0] = 1.0
    out[:, 1, 1] = 1.0
    return out


def _minimal_surface_flux(p: np.ndarray) -> np.ndarray:
    w = np.sqrt(1.0 + np.sum(p * p, axis=1))
    return p / w[:, None]


def _minimal_surface_jacobian(p: np.ndarray) -> np.ndarray:
    q = np.sum(p * p, axis=1)
    w = np.sqrt(1.0 + q)
    out = np.zeros((p.shape[0], 2, 2))
    out[:, 0, 0] = 1.0
    out[:, 1, 1] = 1.0
    out -= p[:, :, None] * p[:, None, :] / (1.0 + q)[:, None, None]
    out /= w[:, None, None]
    return out


def laplace_family() -> FluxFamily:
    return FluxFamily(LAPLACE, _laplace_flux, _laplace_jacobian)


def minimal_surface_family() -> FluxFamily:
    return FluxFamily(MINIMAL_SURFACE, _minimal_surface_flux, _minimal_surface_jacobian)


def custom_flux_family(
    flux: Callable[[np.ndarray], np.ndarray],
    flux_jacobian: Callable[[np.ndarray], np.ndarray],
) -> FluxFamily:
    return FluxFamily(CUSTOM_FLUX, flux, flux_jacobian)


def family_by_name(name: str) -> FluxFamily:
    if name == LAPLACE:
        return laplace_family()
    if name == MINIMAL_SURFACE:
        return minimal_surface_family()
    raise ValueError(f"unknown coefficient family {name!r}")


@dataclass(frozen=True)
class NewtonReport:
    converged: bool
    iterations: int
    residual_norms: tuple[float, ...]
    step_sizes: tuple[float, ...]


@dataclass(frozen=True)
class SolveResult:
    mesh: MeshedDomain
    family: str
    values: np.ndarray
    newton: NewtonReport

    def gradient(self) -> np.ndarray:
        return self.mesh.triangle_gradients(self.values)


def boundary_values_from_profile(
    mesh: MeshedDomain,
    profile: BoundaryProfile,
    inner_value: float | None = None,
) -> np.ndarray:
    """Nodal array holding the Dirichlet data on boundary vertices (zero
    elsewhere): the profile on the outer circle, a constant inside."""
    values = np.zeros(mesh.num_vertices)
    outer = mesh.loop(OUTER).vertices
    values[outer] = profile.value(mesh.boundary_param[outer])
    if mesh.kind == "annulus":
        if inner_value is None:
            raise ValueError("an annulus needs a value for the inner circle")
        values[mesh.loop(INNER).vertices] = inner_value
    elif inner_value is not None:
        raise ValueError("inner_value only applies to an annulus")
    return values


def _check_ellipticity(a: np.ndarray) -> None:
    # positive definiteness of the symmetric part, triangle by triangle
    sym_off = 0.5 * (a[:, 0, 1] + a[:, 1, 0])
    trace = a[:, 0, 0] + a[:, 1, 1]
    det = a[:, 0, 0] * a[:, 1, 1] - sym_off * sym_off
    bad = (trace <= 0.0) | (det <= 0.0)
    if np.any(bad):
        t = int(np.argmax(bad))
        raise EllipticityFailureError(
            f"coefficient matrix is not positive definite on triangle {t} "
            f"(trace {trace[t]:.3e}, det {det[t]:.3e})"
        )


class _Assembler:
    def __init__(self, mesh: MeshedDomain, family: FluxFamily):
        self.mesh = mesh
        self.family = family
        self.fixed = np.zeros(mesh.num_vertices, dtype=bool)
        for loop in mesh.boundary_loops:
            self.fixed[loop.vertices] = True
        tris = mesh.triangles
        self._rows = np.repeat(tris, 3, axis=1).ravel()
        self._cols = np.tile(tris, (1, 3)).ravel()

    def residual(self, u: np.ndarray) -> np.ndarray:
        mesh = self.mesh
        grads = mesh.triangle_gradients(u)
        flux = self.family.flux(grads)
        contrib = mesh.tri_areas[:, None] * np.einsum("tkd,td->tk", mesh.tri_basis_grads, flux)
        r = np.zeros(mesh.num_vertices)
        np.add.at(r, mesh.triangles, contrib)
        r[self.fixed] = 0.0
        return r

    def jacobian(self, u: np.ndarray) -> sp.csr_matrix:
        mesh = self.mesh
        grads = mesh.triangle_gradients(u)
        a = self.family.flux_jacobian(grads)
        _check_ellipticity(a)
        local = np.einsum(
            "t,tid,tde,tje->tij", mesh.tri_areas, mesh.tri_basis_grads, a, mesh.tri_basis_grads
        )
        data = local.reshape(mesh.num_triangles, 9).ravel()
        keep = ~self.fixed[self._rows]
        mat = sp.coo_matrix(
            (data[keep], (self._rows[keep], self._cols[keep])),
            shape=(mesh.num_vertices, mesh.num_vertices),
        )
        n_fixed = int(np.sum(self.fixed))
        eye = sp.coo_matrix(
            (np.ones(n_fixed), (np.flatnonzero(self.fixed), np.flatnonzero(self.fixed))),
            shape=mat.shape,
        )
        return (mat + eye).tocsr()


def solve_dirichlet(
    mesh: MeshedDomain,
    boundary_values: np.ndarray,
    family: FluxFamily,
    tol: float = 1e-10,
    max_iter: int = 50,
) -> SolveResult:
    """Solve the Dirichlet problem for the given flux family.

    boundary_values is a nodal array; only its entries on boundary
    vertices are used.  Newton stops when the residual norm falls below
    tol relative to the initial residual (or below tol absolutely when
    the initial iterate is already nearly a solution).
    """
    asm = _Assembler(mesh, family)
    u = np.zeros(mesh.num_vertices)
    u[asm.fixed] = boundary_values[asm.fixed]

    r = asm.residual(u)
    norm0 = float(np.linalg.norm(r))
    target = tol * max(1.0, norm0)
    residual_norms = [norm0]
    step_sizes: list[float] = []

    for _ in range(max_iter):
        if residual_norms[-1] <= target:
            return SolveResult(
                mesh,
                family.name,
                u,
                NewtonReport(True, len(step_sizes), tuple(residual_norms), tuple(step_sizes)),
            )
        jac = asm.jacobian(u)
        delta = spla.spsolve(jac, -r)
        if not np.all(np.isfinite(delta)):
            raise ConvergenceFailureError("linear solve produced non-finite update")
        t = 1.0
        while True:
            u_try = u + t * delta
            r_try = asm.residual(u_try)
            norm_try = float(np.linalg.norm(r_try))
            if norm_try < residual_norms[-1] or norm_try <= target:
                break
            t *= 0.5
            if t < 2.0**-20:
                raise ConvergenceFailureError(
                    f"line search stalled at residual {residual_norms[-1]:.3e}"
                )
        u, r = u_try, r_try
        residual_norms.append(norm_try)
        step_sizes.append(t)

    if residual_norms[-1] <= target:
        return SolveResult(
            mesh,
            family.name,
            u,
            NewtonReport(True, len(step_sizes), tuple(residual_norms), tuple(step_sizes)),
        )
    raise ConvergenceFailureError(
        f"no convergence in {max_iter} iterations; residual history "
        + ", ".join(f"{x:.3e}" for x in residual_norms)
    )
