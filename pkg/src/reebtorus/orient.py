"""Disk-side orientation of a Reeb tree on the torus.

Every edge of a tree Reeb graph is cut at a regular level curve ``C``; one
of the two closed sides is a disk and the edge is directed away from it.
Sides are computed by clipping the triangulation combinatorially along
``C``: crossing points become vertices, the pieces of ``C`` inside crossed
triangles become edges (one copy per side), and each crossed triangle splits
into polygons.  No coordinates are involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .reeb import Curve, ReebGraph, is_tree, to_dot
from .surface import Mesh, stats


class OrientError(Exception):
    pass


class NotATree(OrientError):
    pass


class NotATorus(OrientError):
    pass


class LemmaViolation(OrientError):
    """A computed structure contradicts a theorem; signals a bug or bad input."""


class DiskSideViolation(LemmaViolation):
    pass


class OutDegreeViolation(LemmaViolation):
    pass


class NoSink(LemmaViolation):
    pass


class MultipleSinks(LemmaViolation):
    pass


@dataclass(frozen=True)
class SideSurface:
    """A connected piece of the surface cut along level curves."""

    vertices: FrozenSet[int]
    triangles: FrozenSet[int]
    connected: bool
    euler_characteristic: int
    boundary_circles: int
    # (curve index, "low" | "high") for every curve side bounding the piece
    sides: FrozenSet[Tuple[int, str]] = field(default=frozenset())

    @property
    def is_disk(self) -> bool:
        return self.connected and self.euler_characteristic == 1 and self.boundary_circles == 1


def cut_surface(mesh: Mesh, curves: Sequence[Curve]) -> List[SideSurface]:
    """Clip ``mesh`` along disjoint regular level curves and return the pieces.

    Pieces are ordered by their smallest mesh vertex (pieces without a vertex
    last).  Each piece's Euler characteristic counts the clipped cell
    complex: mesh vertices and crossing-point copies, minus edge pieces and
    curve-arc copies, plus face pieces.
    """
    nv = mesh.vertex_count
    lidx = mesh.level_index
    lh = mesh.edge_low_high

    edge_cuts: Dict[int, List[int]] = {}
    curve_of: Dict[Tuple[int, int], int] = {}
    for ci, curve in enumerate(curves):
        for e in curve.edges:
            if not lidx[lh[e, 0]] <= curve.slab < lidx[lh[e, 1]]:
                raise ValueError(f"edge {e} does not span slab {curve.slab}")
            edge_cuts.setdefault(e, []).append(curve.slab)
            if (e, curve.slab) in curve_of:
                raise ValueError("curves overlap")
            curve_of[(e, curve.slab)] = ci
    for cuts in edge_cuts.values():
        cuts.sort()

    cut_mask = np.zeros(mesh.edge_count, dtype=bool)
    cut_mask[list(edge_cuts)] = True
    uncut = np.flatnonzero(~cut_mask)
    a, b = mesh.edges[uncut, 0], mesh.edges[uncut, 1]
    graph = csr_matrix((np.ones(len(uncut), dtype=np.int8), (a, b)), shape=(nv, nv))
    nbase, base = connected_components(graph, directed=False)

    crossed_tris = np.unique(mesh.edge_triangles[list(edge_cuts)].reshape(-1)) if edge_cuts else np.empty(0, int)
    tri_cut_mask = np.zeros(mesh.triangle_count, dtype=bool)
    tri_cut_mask[crossed_tris] = True

    # integer union-find: ids [0, nbase) are base vertex classes, then
    # interior sub-edge nodes and face pieces are appended
    parent = list(range(nbase))
    chi_of = [0] * nbase

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        x, y = find(x), find(y)
        if x != y:
            if x > y:
                x, y = y, x
            parent[y] = x

    def new_node(c: int) -> int:
        parent.append(len(parent))
        chi_of.append(c)
        return len(parent) - 1

    sub_nodes: Dict[int, List[int]] = {}
    for e, cuts in edge_cuts.items():
        m = len(cuts)
        nodes = [int(base[lh[e, 0]])]
        nodes += [new_node(0) for _ in range(m - 1)]
        nodes.append(int(base[lh[e, 1]]))
        for j, node in enumerate(nodes):
            # the sub-edge itself, plus the crossing copies at its ends
            chi_of[node] += -1 + (j > 0) + (j < m)
        sub_nodes[e] = nodes

    # crossing copies (edge, slab, side) joined by arcs give boundary circles
    bparent: List[int] = []
    bid: Dict[Tuple[int, int, str], int] = {}

    def bnode(key: Tuple[int, int, str]) -> int:
        i = bid.get(key)
        if i is None:
            i = bid[key] = len(bparent)
            bparent.append(i)
        return i

    def bfind(x: int) -> int:
        while bparent[x] != x:
            bparent[x] = bparent[bparent[x]]
            x = bparent[x]
        return x

    arc_piece: List[Tuple[int, int]] = []  # (boundary node, piece)
    side_piece: Dict[Tuple[int, str], int] = {}
    face_pieces: List[Tuple[int, int]] = []  # (triangle, piece)
    tri_list = mesh.triangles[crossed_tris].tolist()
    tedge_list = mesh.triangle_edges[crossed_tris].tolist()
    lidx_list = lidx.tolist()
    lh_lo = lh[:, 0].tolist()
    base_list = base.tolist()
    for t, corners, tedges in zip(crossed_tris.tolist(), tri_list, tedge_list):
        clev = [lidx_list[c] for c in corners]
        lo_t, hi_t = min(clev), max(clev)
        # the cuts crossing t, with their two crossed edges
        tcuts: Dict[int, List[int]] = {}
        for e in tedges:
            for sl in edge_cuts.get(e, ()):
                tcuts.setdefault(sl, []).append(e)
        slabs = sorted(tcuts)
        for sl in slabs:
            if len(tcuts[sl]) != 2 or not lo_t <= sl < hi_t:
                raise ValueError(f"curve at slab {sl} does not cross triangle {t} cleanly")
        m = len(slabs)
        pieces = [new_node(1 - (j > 0) - (j < m)) for j in range(m + 1)]
        face_pieces.extend((t, pc) for pc in pieces)
        for c, lc in zip(corners, clev):
            union(pieces[sum(1 for sl in slabs if sl < lc)], base_list[c])
        for e in tedges:
            below = sum(1 for sl in slabs if sl < lidx_list[lh_lo[e]])
            for j, node in enumerate(sub_nodes.get(e, (base_list[lh_lo[e]],))):
                union(pieces[below + j], node)
        for i, sl in enumerate(slabs):
            e1, e2 = tcuts[sl]
            ci = curve_of[(e1, sl)]
            for side, piece in (("low", pieces[i]), ("high", pieces[i + 1])):
                x, y = bfind(bnode((e1, sl, side))), bfind(bnode((e2, sl, side)))
                if x != y:
                    bparent[y] = x
                arc_piece.append((x, piece))
                side_piece[(ci, side)] = piece

    # per-component bookkeeping; the uncut bulk is counted per base class
    base_chi = np.bincount(base, minlength=nbase)
    base_chi -= np.bincount(base[lh[uncut, 0]], minlength=nbase)
    uncut_tris = np.flatnonzero(~tri_cut_mask)
    tri_base = base[mesh.triangles[uncut_tris, 0]]
    base_chi += np.bincount(tri_base, minlength=nbase)
    for i in range(nbase):
        chi_of[i] += int(base_chi[i])
    roots = np.array([find(i) for i in range(len(parent))], dtype=np.int64)
    chi: Dict[int, int] = {}
    for r, c in zip(roots.tolist(), chi_of):
        chi[r] = chi.get(r, 0) + c
    vroot = roots[base]
    troot = roots[tri_base]
    tris: Dict[int, List[int]] = {}
    for t, pc in face_pieces:
        tris.setdefault(int(roots[pc]), []).append(t)
    circles: Dict[int, set] = {}
    for b, pc in arc_piece:
        circles.setdefault(int(roots[pc]), set()).add(bfind(b))
    sides: Dict[int, set] = {}
    for key, pc in side_piece.items():
        sides.setdefault(int(roots[pc]), set()).add(key)

    out = []
    for r in chi:
        verts = np.flatnonzero(vroot == r)
        out.append(
            (
                int(verts[0]) if verts.size else nv,
                SideSurface(
                    vertices=frozenset(verts.tolist()),
                    triangles=frozenset(uncut_tris[troot == r].tolist() + tris.get(r, [])),
                    connected=True,
                    euler_characteristic=chi[r],
                    boundary_circles=len(circles.get(r, ())),
                    sides=frozenset(sides.get(r, ())),
                ),
            )
        )
    out.sort(key=lambda item: item[0])
    return [piece for _, piece in out]


def _require_tree_on_torus(mesh: Mesh, graph: ReebGraph) -> None:
    if not stats(mesh).is_torus:
        raise NotATorus(f"surface has genus {stats(mesh).genus}, need 1")
    if not is_tree(graph):
        raise NotATree(f"Reeb graph has first Betti number {graph.betti_1()}")


def _split_at(mesh: Mesh, curve: Curve) -> Tuple[SideSurface, SideSurface]:
    pieces = cut_surface(mesh, [curve])
    if len(pieces) != 2:
        raise DiskSideViolation(f"level curve in slab {curve.slab} does not separate the surface")
    low = next(p for p in pieces if (0, "low") in p.sides)
    high = next(p for p in pieces if (0, "high") in p.sides)
    return low, high


def split_sides(mesh: Mesh, graph: ReebGraph, edge: int, curve: Optional[Curve] = None):
    """Cut along a regular curve of ``edge`` and return ``(X0, X1)``.

    ``X0`` is the side holding the lower endpoint of the edge, ``X1`` the side
    holding the upper one.  By default the curve in the middle slab of the
    edge is used.
    """
    _require_tree_on_torus(mesh, graph)
    return _split_at(mesh, curve if curve is not None else graph.edge_curve(edge))


def subtree_euler(graph: ReebGraph, edge: int, endpoint: int) -> int:
    """Sum of the Euler characteristics of the critical components on the
    ``endpoint`` side of ``edge`` in a tree."""
    seen = {endpoint}
    stack = [endpoint]
    total = 0
    while stack:
        v = stack.pop()
        total += graph.vertices[v].component.euler_characteristic
        for e in graph.incident_edges(v):
            if e == edge:
                continue
            w = graph.edges[e].other(v)
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return total


@dataclass
class OrientedReebTree:
    """A Reeb tree with each edge directed ``tail -> head``.

    ``graph`` may be ``None`` for purely combinatorial trees.
    """

    graph: Optional[ReebGraph]
    vertex_count: int
    directions: Dict[int, Tuple[int, int]]
    side_euler: Dict[int, Tuple[int, int]] = field(default_factory=dict)

    def out_degree(self, v: int) -> int:
        return sum(1 for tail, _ in self.directions.values() if tail == v)

    def in_degree(self, v: int) -> int:
        return sum(1 for _, head in self.directions.values() if head == v)

    def sinks(self) -> List[int]:
        tails = {tail for tail, _ in self.directions.values()}
        return [v for v in range(self.vertex_count) if v not in tails]

    def to_dot(self) -> str:
        if self.graph is None:
            raise ValueError("no Reeb graph attached")
        return to_dot(self.graph, self.directions, find_sink(self))


def orient_tree(mesh: Mesh, graph: ReebGraph) -> OrientedReebTree:
    """Direct every edge away from its disk side and verify the sink structure."""
    _require_tree_on_torus(mesh, graph)
    directions: Dict[int, Tuple[int, int]] = {}
    side_euler: Dict[int, Tuple[int, int]] = {}
    for e in graph.edges:
        x0, x1 = _split_at(mesh, graph.edge_curve(e.id))
        if x0.is_disk == x1.is_disk:
            raise DiskSideViolation(
                f"edge {e.id}: sides have chi {x0.euler_characteristic}, {x1.euler_characteristic}; "
                "expected exactly one disk"
            )
        directions[e.id] = (e.lower, e.upper) if x0.is_disk else (e.upper, e.lower)
        side_euler[e.id] = (x0.euler_characteristic, x1.euler_characteristic)
    tree = OrientedReebTree(graph, graph.vertex_count, directions, side_euler)
    for v in range(graph.vertex_count):
        if tree.out_degree(v) > 1:
            raise OutDegreeViolation(f"vertex {v} has {tree.out_degree(v)} outgoing edges")
    sinks = tree.sinks()
    if not sinks:
        raise NoSink("oriented tree has no sink")
    if len(sinks) > 1:
        raise MultipleSinks(f"oriented tree has sinks {sinks}")
    return tree


def find_sink(tree: OrientedReebTree) -> int:
    sinks = tree.sinks()
    if len(sinks) != 1:
        raise MultipleSinks(f"expected one sink, found {sinks}") if sinks else NoSink("no sink")
    return sinks[0]


def complement_pieces(mesh: Mesh, graph: ReebGraph, v: int) -> List[SideSurface]:
    """Pieces of the surface beyond level curves taken next to vertex ``v``
    on each incident edge; their interiors are the components of the
    complement of ``v``'s critical component."""
    curves = [graph.end_curve(e, v) for e in graph.incident_edges(v)]
    pieces = cut_surface(mesh, curves)
    anchor = graph.vertices[v].component.vertices[0]
    return [p for p in pieces if anchor not in p.vertices]


def check_sink_complement(mesh: Mesh, graph: ReebGraph, v: int) -> bool:
    """True iff every component of the surface minus ``v``'s critical
    component is an open disk."""
    return all(p.is_disk for p in complement_pieces(mesh, graph, v))
