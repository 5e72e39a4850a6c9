import json

import numpy as np
import pytest

from helpers import OCTAHEDRON, OCTAHEDRON_Z, SCALED, sampled
from reebtorus.surface import (
    Disconnected,
    FlatTriangle,
    IncompatibleResolution,
    IndexOutOfRange,
    Mesh,
    MeshError,
    NonManifold,
    NonOrientable,
    ResolutionTooSmall,
    UnknownFunction,
    build_mesh,
    grid_torus_triangles,
    load_mesh,
    mesh_from_json,
    mesh_to_json,
    random_torus_field,
    random_tree_field,
    sample_torus,
    save_mesh,
    stats,
)


def test_octahedron_is_a_sphere():
    m = build_mesh(OCTAHEDRON, OCTAHEDRON_Z)
    assert m.triangle_count == 8
    s = stats(m)
    assert (s.euler_characteristic, s.genus, s.is_torus) == (2, 0, False)


def test_two_tetrahedra_disconnected():
    tet = [(0, 1, 2), (0, 3, 1), (0, 2, 3), (1, 3, 2)]
    tris = tet + [tuple(x + 4 for x in t) for t in tet]
    with pytest.raises(Disconnected):
        build_mesh(tris, np.arange(8.0))


def test_index_out_of_range():
    with pytest.raises(IndexOutOfRange):
        build_mesh([(0, 1, 7)], [0.0, 1.0, 2.0])


def test_edge_in_three_triangles():
    with pytest.raises(NonManifold):
        build_mesh([(0, 1, 2), (0, 1, 3), (0, 1, 4)], np.arange(5.0))


def test_open_surface_rejected():
    # a lone triangle has boundary edges
    with pytest.raises(NonManifold):
        build_mesh([(0, 1, 2)], [0.0, 1.0, 2.0])


def test_pinched_vertex_rejected():
    # two octahedra sharing vertex 0: its link is two cycles
    other = [tuple(0 if x == 0 else x + 5 for x in t) for t in OCTAHEDRON]
    with pytest.raises(MeshError):
        build_mesh(OCTAHEDRON + other, np.arange(11.0))


def test_flat_triangle_rejected():
    with pytest.raises(FlatTriangle):
        build_mesh(OCTAHEDRON, [0.0, -1.0, 0.0, 0.0, 0.5, 0.5])


def test_non_orientable_rejected():
    # 6-vertex projective plane (hemi-icosahedron)
    rp2 = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
           (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3)]
    with pytest.raises(NonOrientable):
        build_mesh(rp2, np.arange(6.0))


def test_non_finite_values_rejected():
    with pytest.raises(MeshError):
        build_mesh(OCTAHEDRON, [1.0, -1.0, 0.1, 0.2, float("nan"), 0.4])


def test_grid_torus_counts_and_chi():
    m = sampled("sinsin", 8)
    assert (m.vertex_count, m.triangle_count) == (64, 128)
    assert stats(m).euler_characteristic == 0
    assert stats(m).is_torus


@pytest.mark.parametrize("n", [8, 12, 16])
def test_euler_formula(n):
    m = sampled("sinsin", n) if n % 4 == 0 else sample_torus("twosaddle", n)
    assert m.vertex_count - m.edge_count + m.triangle_count == 0


def test_genus_two_connected_sum():
    # remove one triangle from each of two tori and glue along the holes
    n = 8
    t1 = grid_torus_triangles(n).tolist()
    t2 = (grid_torus_triangles(n) + n * n).tolist()
    a, b, c = t1.pop(0)
    a2, b2, c2 = t2.pop(0)
    glue = {a2: a, b2: c, c2: b}  # opposite boundary orientation
    t2 = [[glue.get(x, x) for x in t] for t in t2]
    used = sorted({x for t in t1 + t2 for x in t})
    relabel = {x: i for i, x in enumerate(used)}
    tris = [[relabel[x] for x in t] for t in t1 + t2]
    rng = np.random.default_rng(0)
    m = build_mesh(tris, rng.standard_normal(len(used)))
    v, e, f = m.vertex_count, m.edge_count, m.triangle_count
    assert (v, e, f) == (2 * n * n - 3, 2 * 3 * n * n - 3, 2 * 2 * n * n - 2)
    assert stats(m).euler_characteristic == v - e + f == -2
    assert stats(m).genus == 2


def test_round_trip_through_build_mesh(tmp_path):
    m = sampled("sinsin", 8)
    assert build_mesh(m.triangles, m.values) == m
    assert mesh_from_json(json.loads(json.dumps(mesh_to_json(m)))) == m
    save_mesh(m, tmp_path / "m.json")
    assert load_mesh(tmp_path / "m.json") == m


def test_load_invalid_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(MeshError):
        load_mesh(p)
    with pytest.raises(MeshError):
        mesh_from_json({"triangles": []})


def test_mesh_is_immutable():
    m = sampled("sinsin", 8)
    with pytest.raises(ValueError):
        m.values[0] = 3.0


def test_height_constant_along_columns():
    m = sample_torus("height", 16)
    grid = m.values.reshape(16, 16)  # row j, column i
    assert np.all(grid == grid[0][None, :])
    assert np.allclose(grid[0], np.cos(2 * np.pi * np.arange(16) / 16))


def test_scaled_extremum_values():
    n = 32
    m = sampled(SCALED, n)
    q, h = n // 4, 3 * n // 4
    at = lambda x, y: m.values[x + n * y]
    assert at(q, q) == pytest.approx(1.0, abs=1e-2)
    assert at(h, q) == pytest.approx(-0.8, abs=1e-2)
    assert at(h, h) == pytest.approx(0.6, abs=1e-2)
    assert at(q, h) == pytest.approx(-0.4, abs=1e-2)


@pytest.mark.parametrize("n", [8, 16, 32])
def test_sinsin_has_four_extrema(n):
    # independent check on the value grid: strict max/min among 8 grid neighbours
    g = sampled("sinsin", n).values.reshape(n, n)
    shifts = [(dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1) if (dx, dy) != (0, 0)]
    nb = np.stack([np.roll(np.roll(g, dx, 0), dy, 1) for dx, dy in shifts])
    assert int(np.sum(np.all(nb < g, axis=0)) + np.sum(np.all(nb > g, axis=0))) == 4


def test_sinsin_matches_formula():
    n = 16
    m = sampled("sinsin", n)
    x, y = m.positions[:, 0], m.positions[:, 1]
    assert np.allclose(m.values, np.sin(2 * np.pi * x) * np.sin(2 * np.pi * y), atol=1e-12)


def test_sampler_errors():
    with pytest.raises(UnknownFunction):
        sample_torus("cosh", 16)
    with pytest.raises(UnknownFunction):
        sample_torus("sinsin_scaled[1,2,3]", 16)
    with pytest.raises(UnknownFunction):
        sample_torus("sinsin_scaled[1,2,3,-4]", 16)
    with pytest.raises(ResolutionTooSmall):
        sample_torus("sinsin", 4)
    with pytest.raises(IncompatibleResolution):
        sample_torus("sinsin", 10)
    with pytest.raises(IncompatibleResolution):
        sample_torus("height", 9)


@pytest.mark.parametrize("fid", ["sinsin", SCALED, "height", "twosaddle"])
@pytest.mark.parametrize("n", [8, 16, 24])
def test_builtins_are_valid_tori(fid, n):
    m = sample_torus(fid, n)
    assert isinstance(m, Mesh) and stats(m).is_torus


def test_random_fields_deterministic():
    assert random_torus_field(16, seed=3) == random_torus_field(16, seed=3)
    assert random_tree_field(16, seed=3) == random_tree_field(16, seed=3)
    assert random_tree_field(16, seed=3) != random_tree_field(16, seed=4)
