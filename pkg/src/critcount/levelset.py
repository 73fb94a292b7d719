"""Topology of superlevel and sublevel sets of a piecewise linear field.

Vertices are classed against a level t with a small guard band delta:
above t + delta, below t - delta, or in the band (treated as sitting
exactly at the level).  The open region {u > t} within a triangle that
has at least one above vertex is a single contractible polygon, so the
region decomposes into one polygonal cell per such triangle, glued
across interior edges that carry points above the level (edges with at
least one above endpoint).

Connected components come from a union--find over that gluing.  The
Euler characteristic of each component comes from a cell count in a
corner-truncated model: corners of a cell that sit at a band vertex are
blunted by a short cut, so a band vertex whose surrounding cells form
k separate fans contributes k separate corner arcs rather than one
pinch point, and a full cycle of cells around a band vertex correctly
yields an annulus.  This matches the homotopy type of the open set,
where the level point itself is missing.

Cell side and corner counts per triangle, by vertex classes (above,
band, below) with at least one above vertex:

    sides = 3 + band_count, except (2 above, 1 below) which has 4
    private corners = sum over band corners of (2 - above neighbours)

Shared corners, counted once per component: above vertices, one
crossing point per (above, below) edge, one truncation point per
(above, band) edge.  Edges are glued when interior with at least one
above endpoint.  Then chi = V - E + F with E = sum(sides) - glued.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import SplitLevelsError
from .mesh import INNER, OUTER, MeshedDomain

SUPER = "super"
SUB = "sub"


def default_band_delta(values: np.ndarray) -> float:
    span = float(np.max(values) - np.min(values))
    return 1e-6 * span if span > 0.0 else 1e-15


class _UnionFind:
    def __init__(self, n: int):
        self.parent = np.arange(n, dtype=np.int64)

    def find(self, i: int) -> int:
        p = self.parent
        root = i
        while p[root] != root:
            root = p[root]
        while p[i] != root:
            p[i], i = root, p[i]
        return root

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)


@dataclass(frozen=True)
class LevelComponent:
    triangles: np.ndarray
    euler_characteristic: int
    touches_outer: bool
    touches_inner: bool
    outer_contact_arcs: int
    inner_contact_arcs: int
    n_above_vertices: int

    @property
    def simply_connected(self) -> bool:
        return self.euler_characteristic == 1

    def to_dict(self) -> dict:
        return {
            "n_triangles": int(self.triangles.size),
            "euler_characteristic": self.euler_characteristic,
            "simply_connected": self.simply_connected,
            "touches_outer": self.touches_outer,
            "touches_inner": self.touches_inner,
            "outer_contact_arcs": self.outer_contact_arcs,
            "inner_contact_arcs": self.inner_contact_arcs,
        }


@dataclass(frozen=True)
class LevelSetAnalysis:
    level: float
    side: str
    band_delta: float
    components: tuple[LevelComponent, ...]

    @property
    def n_components(self) -> int:
        return len(self.components)

    def count(self, simply_connected: bool | None = None, touches_outer: bool | None = None) -> int:
        n = 0
        for c in self.components:
            if simply_connected is not None and c.simply_connected != simply_connected:
                continue
            if touches_outer is not None and c.touches_outer != touches_outer:
                continue
            n += 1
        return n

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "side": self.side,
            "band_delta": self.band_delta,
            "n_components": self.n_components,
            "components": [c.to_dict() for c in self.components],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _classify(values: np.ndarray, level: float, delta: float, side: str) -> tuple[np.ndarray, np.ndarray]:
    if side == SUPER:
        above = values > level + delta
        below = values < level - delta
    elif side == SUB:
        above = values < level - delta
        below = values > level + delta
    else:
        raise ValueError(f"side must be {SUPER!r} or {SUB!r}")
    return above, below


def _contact_arcs(mesh: MeshedDomain, tag: str, edge_in_comp: dict[tuple[int, int], bool]) -> int:
    ring = mesh.loop(tag).vertices
    n = ring.size
    marked = np.zeros(n, dtype=bool)
    for i in range(n):
        a, b = int(ring[i]), int(ring[(i + 1) % n])
        key = (min(a, b), max(a, b))
        marked[i] = edge_in_comp.get(key, False)
    if not np.any(marked):
        return 0
    if np.all(marked):
        return 1
    return int(np.sum(marked & ~np.roll(marked, 1)))


def level_components(
    mesh: MeshedDomain,
    values: np.ndarray,
    level: float,
    side: str = SUPER,
    band_delta: float | None = None,
) -> LevelSetAnalysis:
    """Connected components of the open superlevel (or sublevel) region,
    with the Euler characteristic and boundary contact of each."""
    if band_delta is None:
        band_delta = default_band_delta(values)
    above, below = _classify(values, level, band_delta, side)
    band = ~above & ~below

    tris = mesh.triangles
    tri_above = above[tris]
    in_comp = np.any(tri_above, axis=1)
    comp_tris = np.flatnonzero(in_comp)
    if comp_tris.size == 0:
        return LevelSetAnalysis(level, side, band_delta, ())

    edges = mesh.edges
    edge_tris = mesh.edge_tris
    edge_hi = above[edges[:, 0]] | above[edges[:, 1]]
    interior = edge_tris[:, 1] >= 0
    glue = edge_hi & interior

    uf = _UnionFind(mesh.num_triangles)
    for e in np.flatnonzero(glue):
        uf.union(int(edge_tris[e, 0]), int(edge_tris[e, 1]))

    label = np.full(mesh.num_triangles, -1, dtype=np.int64)
    for t in comp_tris:
        label[t] = uf.find(int(t))

    # cell side counts and private truncation corners, per triangle
    n_hi = tri_above.sum(axis=1)
    tri_band = band[tris]
    n_band = tri_band.sum(axis=1)
    n_lo = 3 - n_hi - n_band
    sides = np.where(n_band > 0, 3 + n_band, 3 + ((n_hi == 2) & (n_lo == 1)).astype(np.int64))
    private = np.zeros(mesh.num_triangles, dtype=np.int64)
    for k in range(3):
        others = tri_above[:, (k + 1) % 3].astype(np.int64) + tri_above[:, (k + 2) % 3]
        private += np.where(tri_band[:, k], 2 - others, 0)

    comp_ids = np.unique(label[comp_tris])
    sums: dict[int, dict[str, int]] = {
        int(c): {"sides": 0, "private": 0, "glued": 0, "hi_v": 0, "cross": 0, "trunc": 0, "f": 0}
        for c in comp_ids
    }
    for t in comp_tris:
        s = sums[int(label[t])]
        s["sides"] += int(sides[t])
        s["private"] += int(private[t])
        s["f"] += 1

    # shared corners live on edges; attribute each to its component
    edge_label = np.where(edge_tris[:, 0] >= 0, label[edge_tris[:, 0]], -1)
    second = np.where(edge_tris[:, 1] >= 0, label[edge_tris[:, 1]], -1)
    edge_label = np.where(edge_label >= 0, edge_label, second)

    e0, e1 = edges[:, 0], edges[:, 1]
    crossing = (above[e0] & below[e1]) | (below[e0] & above[e1])
    truncation = (above[e0] & band[e1]) | (band[e0] & above[e1])
    for e in np.flatnonzero(crossing):
        sums[int(edge_label[e])]["cross"] += 1
    for e in np.flatnonzero(truncation):
        sums[int(edge_label[e])]["trunc"] += 1
    for e in np.flatnonzero(glue):
        sums[int(edge_label[e])]["glued"] += 1

    vert_label = np.full(mesh.num_vertices, -1, dtype=np.int64)
    for t in comp_tris:
        vert_label[tris[t]] = label[t]
    for v in np.flatnonzero(above):
        if vert_label[v] >= 0:
            sums[int(vert_label[v])]["hi_v"] += 1

    # boundary contact per component
    boundary_edges = np.flatnonzero(mesh.boundary_edge_mask & edge_hi)
    contact: dict[int, dict[tuple[int, int], bool]] = {int(c): {} for c in comp_ids}
    for e in boundary_edges:
        c = int(edge_label[e])
        key = (int(min(edges[e])), int(max(edges[e])))
        contact[c][key] = True

    outer_ring = set(mesh.loop(OUTER).vertices.tolist())
    components = []
    for c in sorted(sums):
        s = sums[c]
        v_count = s["hi_v"] + s["cross"] + s["trunc"] + s["private"]
        e_count = s["sides"] - s["glued"]
        chi = v_count - e_count + s["f"]
        keys = contact[c]
        touches_outer = any(k[0] in outer_ring for k in keys)
        touches_inner = any(k[0] not in outer_ring for k in keys)
        arcs_outer = _contact_arcs(mesh, OUTER, keys) if touches_outer else 0
        arcs_inner = 0
        if mesh.kind == "annulus" and touches_inner:
            arcs_inner = _contact_arcs(mesh, INNER, keys)
        members = np.array(sorted(int(t) for t in comp_tris if label[t] == c), dtype=np.int64)
        components.append(
            LevelComponent(
                triangles=members,
                euler_characteristic=int(chi),
                touches_outer=touches_outer,
                touches_inner=touches_inner,
                outer_contact_arcs=arcs_outer,
                inner_contact_arcs=arcs_inner,
                n_above_vertices=s["hi_v"],
            )
        )
    components.sort(key=lambda comp: int(comp.triangles[0]))
    return LevelSetAnalysis(level, side, band_delta, tuple(components))


@dataclass(frozen=True)
class ClusterResult:
    level: float
    q: int
    assignments: tuple[int, ...]  # cluster index per input point
    n_band_components: int


def critical_clusters(
    mesh: MeshedDomain,
    values: np.ndarray,
    level: float,
    points: np.ndarray,
    band_delta: float | None = None,
    bridge_radius: float | None = None,
) -> ClusterResult:
    """Number of connected pieces of the level set that carry the given
    points (q in the counting identity).

    All points must sit at the level within ten band widths; otherwise
    they belong to distinct levels and a SplitLevelsError reports how
    they group.

    A piecewise linear level curve cannot cross itself, so at a saddle
    the discrete curve resolves into two branches that pass within one
    triangle of each other without touching.  The exact curve through
    the critical point is connected there, so band triangles within
    bridge_radius (default three mesh widths) of a given point are
    joined before components are counted.
    """
    if band_delta is None:
        band_delta = default_band_delta(values)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] == 0:
        return ClusterResult(level, 0, (), 0)
    pvals = mesh.interpolate(values, pts)
    tol = 10.0 * band_delta
    off = np.abs(pvals - level)
    if np.any(off > tol):
        order = np.argsort(pvals, kind="stable")
        groups: list[list[int]] = [[int(order[0])]]
        for i in order[1:]:
            if pvals[i] - pvals[groups[-1][-1]] <= tol:
                groups[-1].append(int(i))
            else:
                groups.append([int(i)])
        raise SplitLevelsError(
            f"points span multiple levels near {level!r}", partition=groups
        )

    half = max(band_delta, float(np.max(off)) + band_delta)
    tris = mesh.triangles
    tvals = values[tris]
    tmin, tmax = tvals.min(axis=1), tvals.max(axis=1)
    in_band = (tmin <= level + half) & (tmax >= level - half)

    edges = mesh.edges
    edge_tris = mesh.edge_tris
    ev = values[edges]
    emin, emax = ev.min(axis=1), ev.max(axis=1)
    edge_band = (emin <= level + half) & (emax >= level - half) & (edge_tris[:, 1] >= 0)

    uf = _UnionFind(mesh.num_triangles)
    for e in np.flatnonzero(edge_band):
        t0, t1 = int(edge_tris[e, 0]), int(edge_tris[e, 1])
        if in_band[t0] and in_band[t1]:
            uf.union(t0, t1)

    homes = mesh.locate(pts)
    if np.any(homes < 0):
        raise ValueError("point outside the meshed domain")

    if bridge_radius is None:
        bridge_radius = 3.0 * mesh.h
    band_ids = np.flatnonzero(in_band)
    cent = mesh.vertices[mesh.triangles[band_ids]].mean(axis=1)
    for p, home in zip(pts, homes):
        near = band_ids[
            np.hypot(cent[:, 0] - p[0], cent[:, 1] - p[1]) <= bridge_radius
        ]
        for t in near:
            uf.union(int(home), int(t))

    roots = [uf.find(int(t)) for t in homes]
    order = sorted(set(roots))
    index = {r: i for i, r in enumerate(order)}
    assignments = tuple(index[r] for r in roots)

    all_roots = {uf.find(int(t)) for t in np.flatnonzero(in_band)}
    return ClusterResult(level, len(order), assignments, len(all_roots))


@dataclass(frozen=True)
class IdentityCheck:
    m1: int
    m2: int
    sum_m: int
    q: int
    lower_bound_super: bool
    lower_bound_sub: bool
    identity: bool

    @property
    def holds(self) -> bool:
        return self.lower_bound_super and self.lower_bound_sub and self.identity

    def to_dict(self) -> dict:
        return {
            "m1": self.m1,
            "m2": self.m2,
            "sum_m": self.sum_m,
            "q": self.q,
            "lower_bound_super": self.lower_bound_super,
            "lower_bound_sub": self.lower_bound_sub,
            "identity": self.identity,
            "holds": self.holds,
        }


def check_counting_identity(m1: int, m2: int, sum_m: int, q: int) -> IdentityCheck:
    """Component counts of the two open sides of a critical level against
    the total multiplicity at that level."""
    return IdentityCheck(
        m1=m1,
        m2=m2,
        sum_m=sum_m,
        q=q,
        lower_bound_super=m1 >= sum_m + 1,
        lower_bound_sub=m2 >= sum_m + 1,
        identity=m1 + m2 == 2 * sum_m + q + 1,
    )
