from types import SimpleNamespace

import networkx as nx
import numpy as np
import pytest

from helpers import OCTAHEDRON, OCTAHEDRON_Z, SCALED, leaf_at, reeb_of, sampled
from reebtorus.contour import level_components
from reebtorus.reeb import (
    PropertyLViolated,
    ReebError,
    UnknownCell,
    build_reeb,
    is_tree,
    project,
    to_dot,
)
from reebtorus.surface import build_mesh, random_torus_field, random_tree_field


def shape(graph):
    """Labelled shape: sorted (level, degree) plus sorted edge level pairs."""
    verts = sorted((v.level, graph.degree(v.id)) for v in graph.vertices)
    edges = sorted((graph.vertices[e.lower].level, graph.vertices[e.upper].level) for e in graph.edges)
    return verts, edges


def test_sinsin_is_k14(sinsin16):
    _, g = sinsin16
    assert (g.vertex_count, g.edge_count) == (5, 4)
    assert is_tree(g)
    assert shape(g) == (
        [(-1.0, 1), (-1.0, 1), (0.0, 4), (1.0, 1), (1.0, 1)],
        [(-1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, 1.0)],
    )
    center = leaf_at(g, 0.0)
    assert g.vertices[center].component.euler_characteristic == -4


def test_twosaddle_has_a_cycle():
    g = reeb_of("twosaddle", 16)
    assert (g.vertex_count, g.edge_count, g.betti_1()) == (4, 4, 1)
    assert not is_tree(g)
    assert [v.level for v in g.vertices] == [-1.5, -0.5, 0.5, 1.5]


def test_octahedron_generic_heights_give_a_path():
    m = build_mesh(OCTAHEDRON, [1.0, -1.0, 0.1, 0.2, 0.3, 0.4])
    g = build_reeb(m)
    assert (g.vertex_count, g.edge_count) == (2, 1)
    assert is_tree(g)


def test_octahedron_flat_equator_is_a_vertex():
    # z-height: the equator is a flat circle and becomes its own vertex
    g = build_reeb(build_mesh(OCTAHEDRON, OCTAHEDRON_Z))
    assert [v.level for v in g.vertices] == [-1.0, 0.0, 1.0]
    assert g.edge_count == 2


def test_property_l_required():
    with pytest.raises(PropertyLViolated) as info:
        build_reeb(sampled("height", 16))
    assert len(info.value.offending_vertices) == 32


def test_is_tree_single_vertex():
    assert is_tree(SimpleNamespace(vertex_count=1, edge_count=0))


def test_levels_are_exact_stored_values(scaled32):
    _, g = scaled32
    assert sorted(v.level for v in g.vertices) == [-0.8, -0.4, 0.0, 0.6, 1.0]


def test_edges_monotone_and_intervals(sinsin16):
    _, g = sinsin16
    for e in g.edges:
        lo, hi = g.vertices[e.lower].level, g.vertices[e.upper].level
        assert lo < hi and e.interval == (lo, hi)


def test_projection_of_high_triangle(sinsin16):
    m, g = sinsin16
    top = next(v.id for v in g.vertices if v.level == 1.0 and 4 + 16 * 4 in v.component.vertices)
    (edge_to_top,) = g.incident_edges(top)
    q = 16 // 4
    # a triangle of the star of the (1/4,1/4) maximum
    t = next(t for t, tri in enumerate(m.triangles.tolist()) if q + 16 * q in tri)
    vals = m.values[m.triangles[t]]
    assert vals.min() > 0.8
    p = project(g, ("triangle", t))
    assert p.kind == "edge" and p.id == edge_to_top
    assert vals.min() <= g.phi(p) <= vals.max()


def test_projection_of_grid_vertex(sinsin16):
    _, g = sinsin16
    center = leaf_at(g, 0.0)
    assert project(g, ("vertex", 0)) == ("vertex", center, None)
    assert project(g, ("vertex", 5)) == ("vertex", center, None)


@pytest.mark.parametrize("seed", [0, 1])
def test_projection_containment(seed):
    m = random_tree_field(16, seed)
    g = build_reeb(m)
    for t in range(m.triangle_count):
        vals = m.values[m.triangles[t]]
        p = project(g, ("triangle", t))
        assert vals.min() - 1e-12 <= g.phi(p) <= vals.max() + 1e-12
        if p.kind == "edge":
            assert 0 < p.param < 1


def test_phi_of_projection_is_f():
    m = random_torus_field(12, seed=2)
    g = build_reeb(m)
    for v in range(m.vertex_count):
        p = project(g, ("vertex", v))
        assert g.phi(p) == pytest.approx(m.values[v], abs=1e-12)


def test_unknown_cells(sinsin16):
    _, g = sinsin16
    for cell in [("vertex", -1), ("triangle", 10**6), ("edge", 0), "junk"]:
        with pytest.raises(UnknownCell):
            project(g, cell)


def _degree_oracle(mesh, graph):
    """Edges below/above each vertex, recounted from regular components at
    midpoint levels and their contact with the critical component."""
    lv = mesh.levels
    lh = mesh.edge_low_high
    out = []
    for v in graph.vertices:
        k = int(np.searchsorted(lv, v.level))
        comp = v.component
        crossed = {p.edge for p in comp.crossings}
        verts = set(comp.vertices)
        counts = []
        for side, mid_k in (("below", k - 1), ("above", k)):
            if not 0 <= mid_k < len(lv) - 1:
                counts.append(0)
                continue
            t = float((lv[mid_k] + lv[mid_k + 1]) / 2)
            end = 1 if side == "below" else 0
            touching = crossed | {e for e in range(mesh.edge_count) if lh[e, end] in verts}
            counts.append(sum(1 for c in level_components(mesh, t) if {p.edge for p in c.crossings} & touching))
        out.append(tuple(counts))
    return out


def _degrees(graph):
    out = []
    for v in graph.vertices:
        below = sum(1 for e in graph.incident_edges(v.id) if graph.vertices[graph.edges[e].other(v.id)].level < v.level)
        out.append((below, graph.degree(v.id) - below))
    return out


@pytest.mark.parametrize("fid", ["sinsin", SCALED, "twosaddle"])
def test_degree_consistency_builtins(fid):
    m, g = sampled(fid, 16), reeb_of(fid, 16)
    assert _degrees(g) == _degree_oracle(m, g)


@pytest.mark.parametrize("seed", [3, 4])
def test_degree_consistency_random(seed):
    for m in (random_torus_field(12, seed=seed), random_tree_field(12, seed=seed)):
        g = build_reeb(m)
        assert _degrees(g) == _degree_oracle(m, g)


@pytest.mark.parametrize("seed", range(6))
def test_betti_at_most_genus(seed):
    g = build_reeb(random_torus_field(12, seed=seed))
    assert 0 <= g.betti_1() <= 1
    assert nx.is_connected(nx.MultiGraph([(e.lower, e.upper) for e in g.edges]))


def test_stability_across_resolutions():
    base = shape(reeb_of("sinsin", 8))
    for n in (16, 32, 64):
        assert shape(reeb_of("sinsin", n)) == base


def test_edge_curves_are_disjoint_and_ordered(sinsin16):
    _, g = sinsin16
    for e in g.edges:
        curves = g.edge_curves(e.id)
        slabs = [c.slab for c in curves]
        assert slabs == sorted(slabs) and len(set(slabs)) == len(slabs)
        assert g.end_curve(e.id, e.lower) == curves[0]
        assert g.end_curve(e.id, e.upper) == curves[-1]


def test_level_tol_collapsing_an_edge_raises():
    with pytest.raises(ReebError):
        build_reeb(sampled(SCALED, 16), level_tol=0.5)
    with pytest.raises(ValueError):
        build_reeb(sampled(SCALED, 16), level_tol=-1)


def test_dot_export(sinsin16):
    _, g = sinsin16
    dot = to_dot(g)
    assert dot.startswith("graph reeb {")
    assert dot.count(" -- ") == 4
    assert 'v0 [label="-1"]' in dot and 'v2 [label="0"]' in dot
    assert to_dot(g) == dot
    directed = to_dot(g, {e.id: (e.lower, e.upper) for e in g.edges}, sink=2)
    assert directed.startswith("digraph") and "peripheries=2" in directed and directed.count("->") == 4
