"""Mesh construction, topology, point location, interpolation."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from critcount.errors import SizingError
from critcount.mesh import (
    INNER,
    OUTER,
    build_annulus_mesh,
    build_disk_mesh,
    euler_characteristic,
    mesh_to_json,
)


def test_disk_euler_characteristic(disk_coarse):
    assert euler_characteristic(disk_coarse) == 1


def test_annulus_euler_characteristic(annulus_coarse):
    assert euler_characteristic(annulus_coarse) == 0


def test_disk_has_single_outer_loop(disk_coarse):
    tags = [lp.tag for lp in disk_coarse.boundary_loops]
    assert tags == [OUTER]


def test_annulus_has_both_loops(annulus_coarse):
    tags = sorted(lp.tag for lp in annulus_coarse.boundary_loops)
    assert tags == [INNER, OUTER]


def test_triangles_positively_oriented(disk_coarse, annulus_coarse):
    for mesh in (disk_coarse, annulus_coarse):
        p = mesh.vertices[mesh.triangles]
        cross = (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1]) - (
            p[:, 2, 0] - p[:, 0, 0]
        ) * (p[:, 1, 1] - p[:, 0, 1])
        assert np.all(cross > 0)


def test_boundary_vertices_on_circles(annulus_coarse):
    for lp in annulus_coarse.boundary_loops:
        r = np.hypot(*annulus_coarse.vertices[lp.vertices].T)
        target = 1.0 if lp.tag == INNER else 2.0
        assert np.allclose(r, target, atol=1e-12)


def test_boundary_param_is_polar_angle(disk_coarse):
    lp = disk_coarse.loop(OUTER)
    ang = np.arctan2(*disk_coarse.vertices[lp.vertices][:, ::-1].T) % (2 * math.pi)
    got = disk_coarse.boundary_param[lp.vertices] % (2 * math.pi)
    assert np.allclose(np.sort(ang), np.sort(got), atol=1e-12)


def test_mirror_symmetry(disk_coarse):
    # theta -> -theta must map the vertex set onto itself exactly
    v = disk_coarse.vertices
    mirrored = np.column_stack([v[:, 0], -v[:, 1]])
    a = {(round(x, 12), round(y, 12)) for x, y in v}
    b = {(round(x, 12), round(y, 12)) for x, y in mirrored}
    assert a == b


def test_edge_lengths_near_h(disk_coarse):
    e = disk_coarse.edges
    lengths = np.hypot(*(disk_coarse.vertices[e[:, 0]] - disk_coarse.vertices[e[:, 1]]).T)
    assert lengths.min() > 0.3 * disk_coarse.h
    assert lengths.max() < 2.0 * disk_coarse.h


def test_locate_centroids(disk_coarse):
    cent = disk_coarse.vertices[disk_coarse.triangles].mean(axis=1)
    found = disk_coarse.locate(cent)
    assert np.all(found >= 0)
    # each centroid must land in its own triangle
    assert np.array_equal(found, np.arange(disk_coarse.num_triangles))


def test_locate_outside(disk_coarse):
    assert disk_coarse.locate(np.array([[2.0, 0.0]]))[0] == -1


def test_interpolate_reproduces_affine(disk_coarse):
    v = disk_coarse.vertices
    values = 2.0 * v[:, 0] - 3.0 * v[:, 1] + 0.5
    pts = np.array([[0.21, -0.37], [0.0, 0.0], [-0.55, 0.4]])
    got = disk_coarse.interpolate(values, pts)
    want = 2.0 * pts[:, 0] - 3.0 * pts[:, 1] + 0.5
    assert np.allclose(got, want, atol=1e-12)


def test_interpolate_vector_field(disk_coarse):
    v = disk_coarse.vertices
    field = np.column_stack([v[:, 0], 2.0 * v[:, 1]])
    pts = np.array([[0.1, 0.2]])
    got = disk_coarse.interpolate(field, pts)
    assert np.allclose(got, [[0.1, 0.4]], atol=1e-12)


def test_interpolate_outside_raises(disk_coarse):
    with pytest.raises(ValueError):
        disk_coarse.interpolate(np.zeros(disk_coarse.num_vertices), np.array([[3.0, 0.0]]))


def test_distance_to_boundary(annulus_coarse):
    pts = np.array([[1.5, 0.0], [0.0, 1.2]])
    d = annulus_coarse.distance_to_boundary(pts)
    assert np.allclose(d, [0.5, 0.2], atol=1e-12)


def test_sizing_guards():
    with pytest.raises(SizingError):
        build_disk_mesh(1.0, 0.9)
    with pytest.raises(SizingError):
        build_annulus_mesh(1.0, 1.05, 0.5)
    with pytest.raises(SizingError):
        build_disk_mesh(-1.0, 0.1)


def test_mesh_json_round_trip(disk_coarse):
    data = json.loads(mesh_to_json(disk_coarse))
    assert data["kind"] == "disk"
    assert len(data["vertices"]) == disk_coarse.num_vertices
    assert len(data["triangles"]) == disk_coarse.num_triangles


@settings(max_examples=15, deadline=None)
@given(h=st.floats(min_value=0.06, max_value=0.2))
def test_disk_topology_any_h(h):
    mesh = build_disk_mesh(1.0, h)
    assert euler_characteristic(mesh) == 1
    lp = mesh.loop(OUTER)
    assert np.all(mesh.boundary_edge_mask.sum() == len(lp.vertices))


@settings(max_examples=10, deadline=None)
@given(h=st.floats(min_value=0.06, max_value=0.18))
def test_annulus_topology_any_h(h):
    mesh = build_annulus_mesh(1.0, 2.0, h)
    assert euler_characteristic(mesh) == 0
    n_boundary = sum(len(lp.vertices) for lp in mesh.boundary_loops)
    assert mesh.boundary_edge_mask.sum() == n_boundary
