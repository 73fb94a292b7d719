"""Deterministic polar-ring triangulations of disks and annuli.

Meshes are built from concentric rings of vertices (spacing ~h radially,
~h along each ring) joined by a zipper triangulation.  The construction is
mirror symmetric under theta -> -theta, which keeps symmetric boundary data
producing exactly symmetric discrete solutions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SizingError

OUTER = "OUTER"
INNER = "INNER"


@dataclass(frozen=True)
class BoundaryLoop:
    tag: str  # OUTER or INNER
    vertices: np.ndarray  # vertex ids in counterclockwise cycle order


@dataclass
class MeshedDomain:
    """Planar triangulation of a disk or annulus.

    vertices       : (nv, 2) float coordinates
    triangles      : (nt, 3) vertex ids, counterclockwise
    boundary_loops : loops of boundary vertex ids, each a CCW cycle
    boundary_param : (nv,) polar angle for boundary vertices, nan elsewhere
    """

    kind: str  # "disk" or "annulus"
    radii: tuple[float, ...]  # (R,) or (a, b)
    h: float
    vertices: np.ndarray
    triangles: np.ndarray
    boundary_loops: tuple[BoundaryLoop, ...]
    boundary_param: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    # -- basic sizes ---------------------------------------------------

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def num_triangles(self) -> int:
        return self.triangles.shape[0]

    @property
    def diameter(self) -> float:
        return 2.0 * self.radii[-1]

    # -- derived combinatorics (built lazily, cached) -------------------

    @property
    def edges(self) -> np.ndarray:
        """(ne, 2) sorted vertex pairs, lexicographically ordered."""
        self._build_edges()
        return self._cache["edges"]

    @property
    def tri_edges(self) -> np.ndarray:
        """(nt, 3) edge id of each triangle side; side k joins local
        vertices k and (k+1) % 3."""
        self._build_edges()
        return self._cache["tri_edges"]

    @property
    def edge_tris(self) -> np.ndarray:
        """(ne, 2) triangle ids flanking each edge, -1 for none."""
        self._build_edges()
        return self._cache["edge_tris"]

    @property
    def tri_neighbors(self) -> np.ndarray:
        """(nt, 3) neighbor triangle across each side, -1 at the boundary."""
        self._build_edges()
        return self._cache["tri_neighbors"]

    @property
    def boundary_edge_mask(self) -> np.ndarray:
        self._build_edges()
        return self._cache["boundary_edge_mask"]

    def _build_edges(self) -> None:
        if "edges" in self._cache:
            return
        t = self.triangles
        raw = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        raw_sorted = np.sort(raw, axis=1)
        edges, inverse = np.unique(raw_sorted, axis=0, return_inverse=True)
        ne = edges.shape[0]
        nt = t.shape[0]
        tri_edges = inverse.reshape(3, nt).T
        edge_tris = np.full((ne, 2), -1, dtype=np.int64)
        for side in range(3):
            for tri_id, e in enumerate(tri_edges[:, side]):
                if edge_tris[e, 0] < 0:
                    edge_tris[e, 0] = tri_id
                else:
                    edge_tris[e, 1] = tri_id
        neighbors = np.full((nt, 3), -1, dtype=np.int64)
        for side in range(3):
            e = tri_edges[:, side]
            both = edge_tris[e]
            mine = np.arange(nt)
            other = np.where(both[:, 0] == mine, both[:, 1], both[:, 0])
            neighbors[:, side] = other
        self._cache["edges"] = edges
        self._cache["tri_edges"] = tri_edges
        self._cache["edge_tris"] = edge_tris
        self._cache["tri_neighbors"] = neighbors
        self._cache["boundary_edge_mask"] = edge_tris[:, 1] < 0

    @property
    def vertex_tris(self) -> list[np.ndarray]:
        """Triangle ids incident to each vertex."""
        if "vertex_tris" not in self._cache:
            flat = self.triangles.ravel()
            order = np.argsort(flat, kind="stable")
            tri_of = order // 3
            counts = np.bincount(flat, minlength=self.num_vertices)
            splits = np.cumsum(counts)[:-1]
            self._cache["vertex_tris"] = np.split(tri_of, splits)
        return self._cache["vertex_tris"]

    @property
    def tri_areas(self) -> np.ndarray:
        self._build_geometry()
        return self._cache["tri_areas"]

    @property
    def tri_basis_grads(self) -> np.ndarray:
        """(nt, 3, 2) gradients of the three P1 basis functions."""
        self._build_geometry()
        return self._cache["tri_basis_grads"]

    def _build_geometry(self) -> None:
        if "tri_areas" in self._cache:
            return
        p = self.vertices[self.triangles]  # (nt, 3, 2)
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        det = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
        areas = 0.5 * det
        # rotated opposite edges over 2*area give the basis gradients
        grads = np.empty((p.shape[0], 3, 2))
        for k in range(3):
            a = p[:, (k + 1) % 3]
            b = p[:, (k + 2) % 3]
            grads[:, k, 0] = a[:, 1] - b[:, 1]
            grads[:, k, 1] = b[:, 0] - a[:, 0]
        grads /= det[:, None, None]
        self._cache["tri_areas"] = areas
        self._cache["tri_basis_grads"] = grads

    def triangle_gradients(self, values: np.ndarray) -> np.ndarray:
        """Per-triangle gradient of a piecewise linear field given by nodal values."""
        return np.einsum("tk,tkd->td", values[self.triangles], self.tri_basis_grads)

    # -- point location -------------------------------------------------

    def _grid(self):
        if "grid" not in self._cache:
            cell = 2.0 * self.h
            mins = self.vertices.min(axis=0)
            p = self.vertices[self.triangles]
            lo = np.floor((p.min(axis=1) - mins) / cell).astype(np.int64)
            hi = np.floor((p.max(axis=1) - mins) / cell).astype(np.int64)
            buckets: dict[tuple[int, int], list[int]] = {}
            for tri_id in range(p.shape[0]):
                for ix in range(lo[tri_id, 0], hi[tri_id, 0] + 1):
                    for iy in range(lo[tri_id, 1], hi[tri_id, 1] + 1):
                        buckets.setdefault((ix, iy), []).append(tri_id)
            self._cache["grid"] = (cell, mins, buckets)
        return self._cache["grid"]

    def locate(self, points: np.ndarray) -> np.ndarray:
        """Containing triangle of each point, -1 if outside the mesh."""
        cell, mins, buckets = self._grid()
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.full(pts.shape[0], -1, dtype=np.int64)
        verts = self.vertices
        tris = self.triangles
        eps = 1e-12 * self.diameter
        for i, (x, y) in enumerate(pts):
            key = (int(math.floor((x - mins[0]) / cell)), int(math.floor((y - mins[1]) / cell)))
            for tri_id in buckets.get(key, ()):
                a, b, c = verts[tris[tri_id]]
                d1 = (b[0] - a[0]) * (y - a[1]) - (x - a[0]) * (b[1] - a[1])
                d2 = (c[0] - b[0]) * (y - b[1]) - (x - b[0]) * (c[1] - b[1])
                d3 = (a[0] - c[0]) * (y - c[1]) - (x - c[0]) * (a[1] - c[1])
                if d1 >= -eps and d2 >= -eps and d3 >= -eps:
                    out[i] = tri_id
                    break
        return out

    def interpolate(self, values: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Evaluate the P1 field at points; raises if a point is outside."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        tri_ids = self.locate(pts)
        if np.any(tri_ids < 0):
            raise ValueError("point outside the meshed domain")
        p = self.vertices[self.triangles[tri_ids]]
        v0, v1, v2 = p[:, 0], p[:, 1], p[:, 2]
        det = (v1[:, 0] - v0[:, 0]) * (v2[:, 1] - v0[:, 1]) - (v2[:, 0] - v0[:, 0]) * (v1[:, 1] - v0[:, 1])
        w1 = ((pts[:, 0] - v0[:, 0]) * (v2[:, 1] - v0[:, 1]) - (v2[:, 0] - v0[:, 0]) * (pts[:, 1] - v0[:, 1])) / det
        w2 = ((v1[:, 0] - v0[:, 0]) * (pts[:, 1] - v0[:, 1]) - (pts[:, 0] - v0[:, 0]) * (v1[:, 1] - v0[:, 1])) / det
        w0 = 1.0 - w1 - w2
        vals = values[self.triangles[tri_ids]]
        w = np.stack([w0, w1, w2], axis=1)
        if vals.ndim == 3:
            return np.einsum("nk,nkd->nd", w, vals)
        return np.einsum("nk,nk->n", w, vals)

    # -- boundary helpers ------------------------------------------------

    def loop(self, tag: str) -> BoundaryLoop:
        for lp in self.boundary_loops:
            if lp.tag == tag:
                return lp
        raise KeyError(tag)

    def distance_to_boundary(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        r = np.hypot(pts[:, 0], pts[:, 1])
        if self.kind == "disk":
            return self.radii[0] - r
        a, b = self.radii
        return np.minimum(r - a, b - r)


def _ring_count(radius: float, h: float, minimum: int) -> int:
    # even count so both theta = 0 and theta = pi carry a vertex
    return max(minimum, 2 * int(round(math.pi * radius / h)))


def _ring_points(radius: float, count: int) -> np.ndarray:
    theta = 2.0 * math.pi * np.arange(count) / count
    return np.column_stack([radius * np.cos(theta), radius * np.sin(theta)])


def _zip_half_strip(na: int, nb: int) -> list[tuple[int, int, bool]]:
    """March over theta in [0, pi] between rings with na and nb vertices.

    Yields (i, j, advance_outer) steps; both counts must be even.
    """
    steps = []
    i, j = 0, 0
    ha, hb = na // 2, nb // 2
    while i < ha or j < hb:
        next_a = 2.0 * math.pi * (i + 1) / na if i < ha else math.inf
        next_b = 2.0 * math.pi * (j + 1) / nb if j < hb else math.inf
        if next_b <= next_a:
            steps.append((i, j, True))
            j += 1
        else:
            steps.append((i, j, False))
            i += 1
    return steps


def _strip_triangles(base_a: int, na: int, base_b: int, nb: int) -> list[list[int]]:
    """Mirror-symmetric triangulation of the ring strip between two rings."""

    def a_idx(i: int) -> int:
        return base_a + (i % na)

    def b_idx(j: int) -> int:
        return base_b + (j % nb)

    upper = []
    for i, j, advance_outer in _zip_half_strip(na, nb):
        if advance_outer:
            upper.append([a_idx(i), b_idx(j), b_idx(j + 1)])
        else:
            upper.append([a_idx(i), b_idx(j), a_idx(i + 1)])

    tris = list(upper)
    for p, q, r in upper:
        # reflect theta -> -theta and reverse the order to stay CCW
        def mirror(v: int) -> int:
            if v >= base_b:
                return base_b + ((nb - (v - base_b)) % nb)
            return base_a + ((na - (v - base_a)) % na)

        tris.append([mirror(p), mirror(r), mirror(q)])
    return tris


def build_disk_mesh(radius: float, h: float) -> MeshedDomain:
    """Polar-ring triangulation of the disk of the given radius."""
    if radius <= 0.0 or not math.isfinite(radius):
        raise SizingError(f"disk radius must be positive, got {radius}")
    if not (1e-4 * radius <= h <= 0.2 * radius):
        raise SizingError(f"h={h} outside [1e-4, 0.2] * radius for radius {radius}")

    n_rings = int(math.ceil(radius / h))
    ring_radii = [radius * i / n_rings for i in range(n_rings + 1)]
    counts = [1] + [_ring_count(r, h, 6) for r in ring_radii[1:]]

    bases = np.cumsum([0] + counts[:-1])
    points = [np.zeros((1, 2))]
    for r, n in zip(ring_radii[1:], counts[1:]):
        points.append(_ring_points(r, n))
    vertices = np.vstack(points)

    tris: list[list[int]] = []
    # central fan
    n1, b1 = counts[1], bases[1]
    for j in range(n1):
        tris.append([0, b1 + j, b1 + (j + 1) % n1])
    for i in range(1, n_rings):
        tris.extend(_strip_triangles(bases[i], counts[i], bases[i + 1], counts[i + 1]))

    triangles = np.asarray(tris, dtype=np.int64)
    outer_ids = np.arange(bases[-1], bases[-1] + counts[-1])
    boundary_param = np.full(vertices.shape[0], np.nan)
    boundary_param[outer_ids] = 2.0 * math.pi * np.arange(counts[-1]) / counts[-1]
    mesh = MeshedDomain(
        kind="disk",
        radii=(float(radius),),
        h=float(h),
        vertices=vertices,
        triangles=triangles,
        boundary_loops=(BoundaryLoop(OUTER, outer_ids),),
        boundary_param=boundary_param,
    )
    _check_orientation(mesh)
    return mesh


def build_annulus_mesh(inner_radius: float, outer_radius: float, h: float) -> MeshedDomain:
    """Polar-ring triangulation of the annulus a < |x| < b."""
    a, b = inner_radius, outer_radius
    if not (0.0 < a < b) or not (math.isfinite(a) and math.isfinite(b)):
        raise SizingError(f"annulus radii must satisfy 0 < a < b, got a={a}, b={b}")
    if not (1e-4 * b <= h <= 0.2 * (b - a)):
        raise SizingError(f"h={h} outside [1e-4*b, 0.2*(b-a)] for a={a}, b={b}")

    n_rings = int(math.ceil((b - a) / h))
    ring_radii = [a + (b - a) * i / n_rings for i in range(n_rings + 1)]
    counts = [_ring_count(r, h, 8) for r in ring_radii]

    bases = np.cumsum([0] + counts[:-1])
    vertices = np.vstack([_ring_points(r, n) for r, n in zip(ring_radii, counts)])

    tris: list[list[int]] = []
    for i in range(n_rings):
        tris.extend(_strip_triangles(bases[i], counts[i], bases[i + 1], counts[i + 1]))
    triangles = np.asarray(tris, dtype=np.int64)

    inner_ids = np.arange(0, counts[0])
    outer_ids = np.arange(bases[-1], bases[-1] + counts[-1])
    boundary_param = np.full(vertices.shape[0], np.nan)
    boundary_param[inner_ids] = 2.0 * math.pi * np.arange(counts[0]) / counts[0]
    boundary_param[outer_ids] = 2.0 * math.pi * np.arange(counts[-1]) / counts[-1]
    mesh = MeshedDomain(
        kind="annulus",
        radii=(float(a), float(b)),
        h=float(h),
        vertices=vertices,
        triangles=triangles,
        boundary_loops=(BoundaryLoop(OUTER, outer_ids), BoundaryLoop(INNER, inner_ids)),
        boundary_param=boundary_param,
    )
    _check_orientation(mesh)
    return mesh


def _check_orientation(mesh: MeshedDomain) -> None:
    if np.any(mesh.tri_areas <= 0.0):
        bad = int(np.argmin(mesh.tri_areas))
        raise SizingError(f"triangle {bad} is not counterclockwise (area {mesh.tri_areas[bad]})")


def euler_characteristic(mesh: MeshedDomain, tri_subset: np.ndarray | None = None) -> int:
    """V - E + F of the whole mesh or of an induced triangle subcomplex."""
    if tri_subset is None:
        tris = mesh.triangles
    else:
        tris = mesh.triangles[np.asarray(tri_subset, dtype=np.int64)]
    if tris.shape[0] == 0:
        return 0
    verts = np.unique(tris)
    raw = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    edges = np.unique(np.sort(raw, axis=1), axis=0)
    return int(verts.shape[0] - edges.shape[0] + tris.shape[0])


def mesh_to_json(mesh: MeshedDomain) -> str:
    payload = {
        "kind": mesh.kind,
        "radii": list(mesh.radii),
        "h": mesh.h,
        "vertices": mesh.vertices.tolist(),
        "triangles": mesh.triangles.tolist(),
        "boundary_loops": [
            {"tag": lp.tag, "vertices": lp.vertices.tolist()} for lp in mesh.boundary_loops
        ],
        "boundary_param": {
            str(v): mesh.boundary_param[v]
            for lp in mesh.boundary_loops
            for v in lp.vertices.tolist()
        },
    }
    return json.dumps(payload, indent=2)
