"""Interior critical point extraction with winding number multiplicities.

A saddle of the solution shows up in the discrete gradient field as a
small neighbourhood where the field norm dips and the field direction
winds around the point.  The pipeline is: collect low-gradient candidate
triangles, sharpen each location with a local quadratic fit, merge
candidates that describe the same point, then measure the topological
degree of the gradient along a probe circle.  Degree -m identifies a
saddle of multiplicity m; degree 0 identifies a spurious candidate.

Probe circles that would cross the boundary, loops where the field
nearly vanishes, and windings that fail to land on an integer all leave
flags on the record instead of silently guessing.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .mesh import MeshedDomain
from .solver import SolveResult

NEAR_OTHER_CP = "NEAR_OTHER_CP"
NEAR_BOUNDARY = "NEAR_BOUNDARY"
WINDING_UNCERTAIN = "WINDING_UNCERTAIN"
INTERIOR_EXTREMUM = "INTERIOR_EXTREMUM"

_MAX_ANGLE_JUMP = 2.5
_MAX_RESIDUE = 0.15
_PROBE_SAMPLES = 256


@dataclass(frozen=True)
class CriticalPointRecord:
    x: float
    y: float
    multiplicity: int
    degree: int
    value: float
    grad_norm: float
    probe_radius: float
    radial_sign_changes: int
    cluster_size: int
    flags: tuple[str, ...]

    @property
    def is_interior(self) -> bool:
        return NEAR_BOUNDARY not in self.flags

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "y": self.y,
            "multiplicity": self.multiplicity,
            "degree": self.degree,
            "value": self.value,
            "grad_norm": self.grad_norm,
            "probe_radius": self.probe_radius,
            "radial_sign_changes": self.radial_sign_changes,
            "cluster_size": self.cluster_size,
            "flags": list(self.flags),
        }


@dataclass(frozen=True)
class CriticalPointReport:
    records: tuple[CriticalPointRecord, ...]
    dropped: tuple[tuple[float, float], ...]
    grad_tol: float
    merge_radius: float

    @property
    def sum_multiplicity(self) -> int:
        """Total multiplicity over interior records only."""
        return sum(r.multiplicity for r in self.records if r.is_interior)

    @property
    def flags(self) -> tuple[str, ...]:
        seen: set[str] = set()
        for r in self.records:
            seen.update(r.flags)
        return tuple(sorted(seen))

    def to_json(self) -> str:
        payload = {
            "grad_tol": self.grad_tol,
            "merge_radius": self.merge_radius,
            "sum_multiplicity": self.sum_multiplicity,
            "records": [r.to_dict() for r in self.records],
            "dropped": [{"x": p[0], "y": p[1]} for p in self.dropped],
        }
        return json.dumps(payload, indent=2)


def recovered_gradient(mesh: MeshedDomain, values: np.ndarray) -> np.ndarray:
    """Area-weighted average of adjacent triangle gradients per vertex.

    Unlike the raw piecewise constant gradient this field is continuous,
    which the winding probe needs.
    """
    tri_grads = mesh.triangle_gradients(values)
    num = np.zeros((mesh.num_vertices, 2))
    den = np.zeros(mesh.num_vertices)
    w = mesh.tri_areas[:, None] * tri_grads
    for k in range(3):
        np.add.at(num, mesh.triangles[:, k], w)
        np.add.at(den, mesh.triangles[:, k], mesh.tri_areas)
    return num / den[:, None]


def default_grad_tol(mesh: MeshedDomain, values: np.ndarray) -> float:
    """Gradient threshold below which a triangle can be a candidate.

    The piecewise linear gradient of a smooth field cannot dip below
    roughly h times the curvature scale even at an exact critical point,
    so the threshold grows with h; spurious captures are cheap because a
    zero winding number discards them.
    """
    value_range = float(np.max(values) - np.min(values))
    diam = mesh.diameter
    return max(1e-3, 20.0 * mesh.h / diam) * value_range / diam


def _candidate_triangles(mesh: MeshedDomain, grad_norms: np.ndarray, grad_tol: float) -> np.ndarray:
    neigh = mesh.tri_neighbors
    is_min = grad_norms <= grad_tol
    for k in range(3):
        has = neigh[:, k] >= 0
        other = np.where(has, grad_norms[neigh[:, k]], np.inf)
        is_min &= grad_norms <= other
    return np.flatnonzero(is_min)


def _refine_location(mesh: MeshedDomain, nodal_grad: np.ndarray, tri: int) -> np.ndarray:
    """Sharpen a candidate location by a shrinking grid search for the
    minimum of the recovered gradient norm.

    A direct search stays reliable at any multiplicity, where a Newton
    step on a fitted quadratic degenerates as soon as the second
    derivative vanishes at the point.
    """
    center = mesh.vertices[mesh.triangles[tri]].mean(axis=0)
    radius = 1.5 * mesh.h
    axis = np.linspace(-1.0, 1.0, 7)
    dx, dy = np.meshgrid(axis, axis)
    offsets = np.column_stack([dx.ravel(), dy.ravel()])
    for _ in range(3):
        pts = center[None, :] + radius * offsets
        tri_ids = mesh.locate(pts)
        inside = tri_ids >= 0
        if not np.any(inside):
            break
        g = mesh.interpolate(nodal_grad, pts[inside])
        norms = np.hypot(g[:, 0], g[:, 1])
        center = pts[inside][int(np.argmin(norms))]
        radius /= 3.0
    return center


def _single_linkage(points: np.ndarray, tol: float) -> list[list[int]]:
    n = points.shape[0]
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if np.hypot(*(points[i] - points[j])) <= tol:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [groups[k] for k in sorted(groups)]


@dataclass(frozen=True)
class _Probe:
    degree: int
    residue: float
    max_jump: float
    min_norm: float
    radial_sign_changes: int
    clean: bool


def _probe_winding(
    mesh: MeshedDomain, nodal_grad: np.ndarray, center: np.ndarray, rho: float
) -> _Probe:
    theta = 2.0 * math.pi * np.arange(_PROBE_SAMPLES) / _PROBE_SAMPLES
    ring = np.column_stack([np.cos(theta), np.sin(theta)])
    pts = center[None, :] + rho * ring
    g = mesh.interpolate(nodal_grad, pts)
    norms = np.hypot(g[:, 0], g[:, 1])
    min_norm = float(np.min(norms))
    if min_norm == 0.0:
        return _Probe(0, 1.0, math.pi, 0.0, 0, False)
    ang = np.arctan2(g[:, 1], g[:, 0])
    d = np.diff(np.concatenate([ang, ang[:1]]))
    d = (d + math.pi) % (2.0 * math.pi) - math.pi
    total = float(np.sum(d) / (2.0 * math.pi))
    degree = int(round(total))
    residue = abs(total - degree)
    max_jump = float(np.max(np.abs(d)))
    radial = np.einsum("nd,nd->n", g, ring)
    signs = np.sign(radial[np.abs(radial) > 1e-14 * (1.0 + np.max(np.abs(radial)))])
    changes = int(np.sum(signs[1:] != signs[:-1]))
    if signs.size > 1 and signs[0] != signs[-1]:
        changes += 1
    # a degree-d reading is consistent only with 2(1-d) radial sign flips;
    # a noise-dominated loop fails this even when the winding lands on an
    # integer by luck
    clean = (
        residue <= _MAX_RESIDUE
        and max_jump <= _MAX_ANGLE_JUMP
        and changes == 2 * (1 - degree)
        and min_norm >= 0.02 * float(np.max(norms))
    )
    return _Probe(degree, residue, max_jump, min_norm, changes, clean)


def _measure_group(
    mesh: MeshedDomain,
    nodal_grad: np.ndarray,
    center: np.ndarray,
    rho0: float,
    neighbor_cap: float = np.inf,
) -> tuple[_Probe | None, float, list[str]]:
    """Winding probe with radius escalation.

    A single loop can lie, because the discrete gradient near a flat
    zero has its own self-consistent small-scale zeros.  A degree is
    therefore accepted only when two successive radii give the same
    clean reading.  The radius never exceeds the distance to the
    boundary minus one mesh width, nor the clearance to the next group;
    when even the base radius does not fit inside the domain, the record
    is marked as boundary-adjacent and gets the single reading that
    fits.
    """
    flags: list[str] = []
    boundary_cap = float(mesh.distance_to_boundary(center[None, :])[0]) - mesh.h
    rho_cap = min(boundary_cap, neighbor_cap)
    if boundary_cap < rho0:
        flags.append(NEAR_BOUNDARY)
        if boundary_cap < 0.25 * mesh.h:
            flags.append(WINDING_UNCERTAIN)
            return None, 0.0, flags
        probe = _probe_winding(mesh, nodal_grad, center, boundary_cap)
        if not probe.clean:
            flags.append(WINDING_UNCERTAIN)
        return probe, boundary_cap, flags

    radii: list[float] = []
    for k in range(6):
        r = min(rho0 * 2.0**k, rho_cap)
        if not radii or r > radii[-1] * 1.0625:
            radii.append(r)
    prev: _Probe | None = None
    prev_r = 0.0
    last = None
    for r in radii:
        probe = _probe_winding(mesh, nodal_grad, center, r)
        last = (probe, r)
        if probe.clean and prev is not None and prev.clean and probe.degree == prev.degree:
            return prev, prev_r, flags
        prev, prev_r = probe, r
    flags.append(WINDING_UNCERTAIN)
    probe, r = last
    return probe, r, flags


def extract_critical_points(
    result: SolveResult,
    grad_tol: float | None = None,
    merge_radius: float | None = None,
) -> CriticalPointReport:
    """Locate interior critical points of a solved field and measure the
    multiplicity of each via the winding number of the gradient."""
    mesh = result.mesh
    values = result.values
    if grad_tol is None:
        grad_tol = default_grad_tol(mesh, values)
    if merge_radius is None:
        merge_radius = 3.0 * mesh.h

    tri_grads = mesh.triangle_gradients(values)
    grad_norms = np.hypot(tri_grads[:, 0], tri_grads[:, 1])
    cand = _candidate_triangles(mesh, grad_norms, grad_tol)
    if cand.size == 0:
        return CriticalPointReport((), (), grad_tol, merge_radius)

    nodal_grad = recovered_gradient(mesh, values)
    positions = np.array([_refine_location(mesh, nodal_grad, t) for t in cand])

    clusters = _single_linkage(positions, merge_radius)
    rep_pts = np.array(
        [positions[min(m, key=lambda i: (grad_norms[cand[i]], cand[i]))] for m in clusters]
    )
    # candidate index sets, one per group of clusters
    cluster_groups = _single_linkage(rep_pts, 2.0 * merge_radius)
    groups = [[i for ci in g for i in clusters[ci]] for g in cluster_groups]
    n_clusters = [len(g) for g in cluster_groups]

    def _geometry(ids: list[int]) -> tuple[np.ndarray, float, float]:
        pts = positions[ids]
        center = pts.mean(axis=0)
        if mesh.locate(center[None, :])[0] < 0:
            best = min(ids, key=lambda i: (grad_norms[cand[i]], cand[i]))
            center = positions[best]
        spread = float(np.max(np.hypot(pts[:, 0] - center[0], pts[:, 1] - center[1])))
        rho0 = max(3.0 * mesh.h, merge_radius, spread + 2.0 * mesh.h)
        return center, spread, rho0

    merged_flag = [n > 1 for n in n_clusters]
    geo = [_geometry(g) for g in groups]
    # merge any groups whose probe circles would overlap, so each degree
    # reading counts one group's zeros and no other's
    changed = True
    while changed and len(groups) > 1:
        changed = False
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                ci, _, ri = geo[i]
                cj, _, rj = geo[j]
                if float(np.hypot(*(ci - cj))) < ri + rj + mesh.h:
                    groups[i] = groups[i] + groups.pop(j)
                    merged_flag[i] = True
                    merged_flag.pop(j)
                    geo[i] = _geometry(groups[i])
                    geo.pop(j)
                    changed = True
                    break
            if changed:
                break

    records: list[CriticalPointRecord] = []
    dropped: list[tuple[float, float]] = []
    for gi, ids in enumerate(groups):
        center, spread, rho0 = geo[gi]
        size = len(ids)
        flags: list[str] = []
        if merged_flag[gi]:
            flags.append(NEAR_OTHER_CP)
        neighbor_cap = np.inf
        for gj in range(len(groups)):
            if gj == gi:
                continue
            cj, _, rj = geo[gj]
            neighbor_cap = min(neighbor_cap, float(np.hypot(*(center - cj))) - rj)

        probe, rho, probe_flags = _measure_group(
            mesh, nodal_grad, center, rho0, neighbor_cap
        )
        flags.extend(probe_flags)

        if probe is None:
            degree, sign_changes = 0, 0
        else:
            degree, sign_changes = probe.degree, probe.radial_sign_changes

        uncertain = WINDING_UNCERTAIN in flags
        boundary_adjacent = NEAR_BOUNDARY in flags
        if degree == 0 and not uncertain:
            # a clean zero reading encircles nothing, wherever the loop sits
            dropped.append((float(center[0]), float(center[1])))
            continue
        if degree > 0:
            flags.append(INTERIOR_EXTREMUM)
            mult = 0
        elif boundary_adjacent and uncertain:
            mult = max(1, -degree)
        else:
            mult = max(0, -degree)

        value = float(mesh.interpolate(values, center[None, :])[0])
        gnorm = float(np.hypot(*mesh.interpolate(nodal_grad, center[None, :])[0]))
        records.append(
            CriticalPointRecord(
                x=float(center[0]),
                y=float(center[1]),
                multiplicity=mult,
                degree=degree,
                value=value,
                grad_norm=gnorm,
                probe_radius=float(rho),
                radial_sign_changes=sign_changes,
                cluster_size=size,
                flags=tuple(sorted(set(flags))),
            )
        )

    records.sort(key=lambda r: (round(r.x, 12), round(r.y, 12)))
    dropped.sort()
    return CriticalPointReport(tuple(records), tuple(dropped), grad_tol, merge_radius)


def boundary_degree_total(result: SolveResult, offset: float | None = None) -> int:
    """Winding of the gradient along circles just inside the boundary.

    For a field with no critical points within the offset band this
    equals minus the total multiplicity of the interior critical points,
    which makes it an independent cross-check on the extraction.
    """
    mesh = result.mesh
    if offset is None:
        offset = 2.0 * mesh.h
    nodal_grad = recovered_gradient(mesh, result.values)

    def winding(radius: float) -> float:
        theta = 2.0 * math.pi * np.arange(4 * _PROBE_SAMPLES) / (4 * _PROBE_SAMPLES)
        pts = radius * np.column_stack([np.cos(theta), np.sin(theta)])
        g = mesh.interpolate(nodal_grad, pts)
        ang = np.arctan2(g[:, 1], g[:, 0])
        d = np.diff(np.concatenate([ang, ang[:1]]))
        d = (d + math.pi) % (2.0 * math.pi) - math.pi
        return float(np.sum(d) / (2.0 * math.pi))

    if mesh.kind == "disk":
        total = winding(mesh.radii[0] - offset)
    else:
        a, b = mesh.radii
        total = winding(b - offset) - winding(a + offset)
    degree = int(round(total))
    if abs(total - degree) > 0.25:
        raise ValueError(f"boundary winding {total} is not close to an integer")
    return degree
