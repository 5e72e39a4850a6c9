"""Level sets of a PL field: vertex classification and connected components.

Vertices are classified from the cyclic sign pattern of ``f(link) - f(v)``.
Maximal flat arcs of the link (neighbours at the same value) are contracted
to a single zero symbol first; a zero flanked by equal signs marks the vertex
``Degenerate``, the PL counterpart of a critical germ with a repeated factor.

Level components are computed on an abstract graph whose nodes are the
vertices lying on the level and the interior crossing points of edges that
span it, joined by flat edges and by the segments the level cuts out of
triangles.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .surface import Mesh

REGULAR = "Regular"
MIN = "Min"
MAX = "Max"
SADDLE = "Saddle"
DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class VertexClass:
    kind: str
    k: Optional[int] = None  # saddles only: half the number of sign changes

    def __str__(self) -> str:
        return f"Saddle({self.k})" if self.kind == SADDLE else self.kind

    @property
    def is_regular(self) -> bool:
        return self.kind == REGULAR

    @property
    def satisfies_property_l(self) -> bool:
        return self.kind != DEGENERATE


def _classify_signs(signs: Sequence[int]) -> VertexClass:
    start = next((i for i, s in enumerate(signs) if s), None)
    if start is None:
        return VertexClass(DEGENERATE)
    seq: List[int] = []
    for s in list(signs[start:]) + list(signs[:start]):
        if s == 0 and seq and seq[-1] == 0:
            continue
        seq.append(s)
    # seq[0] != 0, so a trailing zero is flanked by seq[-2] and seq[0]
    m = len(seq)
    for i, s in enumerate(seq):
        if s == 0 and seq[i - 1] == seq[(i + 1) % m]:
            return VertexClass(DEGENERATE)
    nonzero = [s for s in seq if s]
    changes = sum(1 for i in range(len(nonzero)) if nonzero[i] != nonzero[i - 1])
    if changes == 0:
        return VertexClass(MAX if nonzero[0] < 0 else MIN)
    if changes == 2:
        return VertexClass(REGULAR)
    return VertexClass(SADDLE, changes // 2)


def classify_vertex(mesh: Mesh, v: int) -> VertexClass:
    fv = mesh.values[v]
    link = mesh.links[v]
    signs = np.sign(mesh.values[list(link)] - fv).astype(int).tolist()
    return _classify_signs(signs)


_CLASS_CACHE: "weakref.WeakKeyDictionary[Mesh, Tuple[VertexClass, ...]]" = weakref.WeakKeyDictionary()


def vertex_classes(mesh: Mesh) -> Tuple[VertexClass, ...]:
    """Classes of all vertices, memoised per mesh."""
    try:
        return _CLASS_CACHE[mesh]
    except KeyError:
        pass
    out = tuple(classify_vertex(mesh, v) for v in range(mesh.vertex_count))
    _CLASS_CACHE[mesh] = out
    return out


@dataclass(frozen=True)
class PropertyLReport:
    ok: bool
    offending_vertices: Tuple[int, ...]


def check_property_l(mesh: Mesh) -> PropertyLReport:
    """PL surrogate of the "no multiple factors" germ condition.

    Holds when every vertex is Regular, Min, Max or a k-saddle.  The
    surrogate is a combinatorial stand-in, not a proof of smooth
    equivalence.
    """
    bad = tuple(v for v, c in enumerate(vertex_classes(mesh)) if not c.satisfies_property_l)
    return PropertyLReport(not bad, bad)


# -- level graphs --------------------------------------------------------------


class CrossingPoint(NamedTuple):
    """Point in the interior of mesh edge ``edge``.

    ``param`` runs from 0 at the lower-valued endpoint to 1 at the other.
    """

    edge: int
    param: float


LevelPoint = Union[int, CrossingPoint]


@dataclass(frozen=True)
class LevelComponent:
    """A connected component of a level set ``f^-1(level)``.

    ``vertices`` are the mesh vertices on the level, ``crossings`` the edges
    crossed in their interior, ``flat_edges`` the mesh edges contained in the
    level and ``segments`` the triangles the level passes through.  For a
    regular component ``cycle`` lists its points in traversal order.
    """

    level: float
    kind: str
    vertices: Tuple[int, ...]
    crossings: Tuple[CrossingPoint, ...]
    flat_edges: Tuple[int, ...]
    segments: Tuple[int, ...]
    cycle: Optional[Tuple[LevelPoint, ...]] = field(default=None, compare=False)

    @property
    def is_critical(self) -> bool:
        return self.kind == "critical"

    @property
    def euler_characteristic(self) -> int:
        """Graph Euler characteristic: points minus arcs."""
        return len(self.vertices) + len(self.crossings) - len(self.flat_edges) - len(self.segments)


@dataclass
class LevelLabels:
    """Raw labelling of one level graph.

    Node ids are vertex indices ``v`` for vertices on the level and
    ``V + e`` for the crossing point on edge ``e``; ``nodes`` is sorted.
    """

    nodes: np.ndarray
    labels: np.ndarray
    count: int
    flat_edges: np.ndarray
    segment_triangles: np.ndarray
    segment_pairs: np.ndarray

    def label_of(self, node: int) -> int:
        i = int(np.searchsorted(self.nodes, node))
        if i >= len(self.nodes) or self.nodes[i] != node:
            raise KeyError(node)
        return int(self.labels[i])


def label_level(mesh: Mesh, rel: np.ndarray) -> LevelLabels:
    """Connected components of the level described by ``rel``.

    ``rel[v]`` is the sign of ``f(v) - t`` (or of the level-index difference)
    for the level ``t`` being cut; only the signs are used, so the routine
    works equally on exact vertex levels and on open slabs.
    """
    nv = mesh.vertex_count
    lh = mesh.edge_low_high
    rlo, rhi = rel[lh[:, 0]], rel[lh[:, 1]]
    crossing = (rlo < 0) & (rhi > 0)
    flat = (rlo == 0) & (rhi == 0)
    on_level = np.flatnonzero(rel == 0)
    cross_ids = np.flatnonzero(crossing)
    nodes = np.concatenate([on_level, nv + cross_ids])

    tris = mesh.triangles
    trel = rel[tris]
    active = np.flatnonzero((trel.min(axis=1) < 0) & (trel.max(axis=1) > 0))
    if active.size:
        te = mesh.triangle_edges[active]
        cand = np.concatenate([tris[active], nv + te], axis=1)
        mask = np.concatenate([trel[active] == 0, crossing[te]], axis=1)
        pairs = cand[mask].reshape(-1, 2)
    else:
        pairs = np.empty((0, 2), dtype=np.int64)
    flat_ids = np.flatnonzero(flat)
    flat_pairs = lh[flat_ids]
    all_pairs = np.concatenate([pairs, flat_pairs], axis=0) if flat_ids.size else pairs

    n = len(nodes)
    if n == 0:
        return LevelLabels(nodes, np.empty(0, dtype=np.int64), 0, flat_ids, active, pairs)
    # nodes is sorted: vertex ids < nv <= edge node ids
    ia = np.searchsorted(nodes, all_pairs[:, 0]).tolist()
    ib = np.searchsorted(nodes, all_pairs[:, 1]).tolist()
    # inlined union-find, hot path; the root of a class is its smallest index
    parent = list(range(n))
    for a, b in zip(ia, ib):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a != b:
            if a < b:
                parent[b] = a
            else:
                parent[a] = b
    # numbering roots in index order numbers components by smallest node
    labels = [0] * n
    root_label = {}
    for i in range(n):
        r = i
        while parent[r] != r:
            r = parent[r]
        if r not in root_label:
            root_label[r] = len(root_label)
        labels[i] = root_label[r]
    return LevelLabels(nodes, np.array(labels, dtype=np.int64), len(root_label), flat_ids, active, pairs)


def _order_cycle(pairs: List[Tuple[int, int]]) -> Optional[List[int]]:
    adj: Dict[int, List[int]] = {}
    for a, b in pairs:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    if any(len(x) != 2 for x in adj.values()):
        return None
    start = min(adj)
    out, prev, cur = [start], None, start
    while True:
        a, b = adj[cur]
        nxt = b if a == prev else a
        if nxt == start:
            break
        out.append(nxt)
        prev, cur = cur, nxt
    return out if len(out) == len(adj) else None


def components_from_labels(
    mesh: Mesh, lab: LevelLabels, t: float, classes: Sequence[VertexClass]
) -> List[LevelComponent]:
    """Materialise :class:`LevelComponent` objects from a labelling at level ``t``."""
    nv = mesh.vertex_count
    lh = mesh.edge_low_high
    members: List[List[int]] = [[] for _ in range(lab.count)]
    for node, c in zip(lab.nodes.tolist(), lab.labels.tolist()):
        members[c].append(node)
    flats: List[List[int]] = [[] for _ in range(lab.count)]
    flat_lab = lab.labels[np.searchsorted(lab.nodes, lh[lab.flat_edges, 0])]
    for e, c in zip(lab.flat_edges.tolist(), flat_lab.tolist()):
        flats[c].append(e)
    segs: List[List[int]] = [[] for _ in range(lab.count)]
    seg_pairs: List[List[Tuple[int, int]]] = [[] for _ in range(lab.count)]
    seg_lab = lab.labels[np.searchsorted(lab.nodes, lab.segment_pairs[:, 0])]
    for tri, pair, c in zip(lab.segment_triangles.tolist(), lab.segment_pairs.tolist(), seg_lab.tolist()):
        segs[c].append(tri)
        seg_pairs[c].append(tuple(pair))
    # crossing parameters for every crossed edge at once
    cross_edges = lab.nodes[lab.nodes >= nv] - nv
    lo_vals = mesh.values[lh[cross_edges, 0]]
    params = ((t - lo_vals) / (mesh.values[lh[cross_edges, 1]] - lo_vals)).tolist()
    crossing_of = {e + nv: CrossingPoint(e, p) for e, p in zip(cross_edges.tolist(), params)}

    out = []
    for c in range(lab.count):
        verts = tuple(x for x in members[c] if x < nv)
        crossings = tuple(crossing_of[x] for x in members[c] if x >= nv)
        critical = bool(flats[c]) or any(not classes[v].is_regular for v in verts)
        cycle = None
        if not critical:
            order = _order_cycle(seg_pairs[c])
            if order is not None:
                cycle = tuple(x if x < nv else crossing_of[x] for x in order)
        out.append(
            LevelComponent(
                level=float(t),
                kind="critical" if critical else "regular",
                vertices=verts,
                crossings=crossings,
                flat_edges=tuple(flats[c]),
                segments=tuple(segs[c]),
                cycle=cycle,
            )
        )
    return out


def level_components(mesh: Mesh, t: float) -> List[LevelComponent]:
    """Connected components of ``f^-1(t)``; empty when ``t`` misses the range of f.

    A component is critical when it contains a non-Regular vertex or a flat
    edge, regular otherwise.
    """
    rel = np.sign(mesh.values - t).astype(np.int8)
    lab = label_level(mesh, rel)
    return components_from_labels(mesh, lab, t, vertex_classes(mesh))
