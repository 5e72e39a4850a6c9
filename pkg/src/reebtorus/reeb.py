"""Kronrod-Reeb graph of a PL field on a closed surface.

The field is swept through its distinct vertex values ``c_0 < ... < c_{L-1}``.
Every value ``c_k`` contributes the components of ``f^-1(c_k)`` and every open
slab ``(c_k, c_{k+1})`` the components of a level inside it; no vertex lies in
an open slab, so each slab component is a product ``circle x interval``.
Union-find glues slab components through the regular components at the
values in between; the resulting classes are the Reeb edges and the critical
components are the Reeb vertices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .contour import (
    LevelComponent,
    LevelLabels,
    check_property_l,
    components_from_labels,
    label_level,
    vertex_classes,
)
from .surface import Mesh
from .unionfind import UnionFind


class ReebError(Exception):
    pass


class PropertyLViolated(ReebError):
    def __init__(self, offending: Sequence[int]):
        self.offending_vertices = tuple(offending)
        head = ", ".join(map(str, self.offending_vertices[:8]))
        more = "..." if len(self.offending_vertices) > 8 else ""
        super().__init__(f"degenerate critical vertices: {head}{more}")


class UnknownCell(ReebError, KeyError):
    pass


@dataclass(frozen=True)
class ReebVertex:
    id: int
    level: float
    canonical_level: float
    component: LevelComponent


@dataclass(frozen=True)
class ReebEdge:
    id: int
    lower: int
    upper: int
    interval: Tuple[float, float]

    @property
    def endpoints(self) -> Tuple[int, int]:
        return (self.lower, self.upper)

    def other(self, v: int) -> int:
        return self.upper if v == self.lower else self.lower


class ReebPoint(NamedTuple):
    """A point of the graph: a vertex, or an edge with a parameter in (0, 1)."""

    kind: str
    id: int
    param: Optional[float] = None


@dataclass(frozen=True)
class Curve:
    """A regular level curve inside slab ``slab``, given by the mesh edges it crosses."""

    slab: int
    edges: FrozenSet[int]


class ReebGraph:
    """Vertices, edges and the per-triangle projection of a Reeb graph.

    Vertices are numbered by increasing ``(level, smallest mesh vertex of the
    component)``.  ``projection[t]`` is the image of the centroid of mesh
    triangle ``t``.
    """

    def __init__(
        self,
        mesh: Mesh,
        vertices: List[ReebVertex],
        edges: List[ReebEdge],
        level_labels: List[LevelLabels],
        level_assign: List[np.ndarray],
        slab_labels: List[LevelLabels],
        edge_slabs: Dict[int, List[Tuple[int, int]]],
        level_tol: float,
    ):
        self.mesh = mesh
        self.vertices = tuple(vertices)
        self.edges = tuple(edges)
        self.level_tol = level_tol
        self._level_labels = level_labels
        self._level_assign = level_assign
        self._slab_labels = slab_labels
        self._edge_slabs = edge_slabs
        self._slab_edge = {(k, c): e for e, ks in edge_slabs.items() for k, c in ks}
        self._incident: List[List[int]] = [[] for _ in vertices]
        for e in edges:
            self._incident[e.lower].append(e.id)
            self._incident[e.upper].append(e.id)
        self.projection: Tuple[ReebPoint, ...] = tuple(
            self._project_triangle(t) for t in range(mesh.triangle_count)
        )

    # -- structure ---------------------------------------------------------

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def incident_edges(self, v: int) -> Tuple[int, ...]:
        return tuple(self._incident[v])

    def degree(self, v: int) -> int:
        return len(self._incident[v])

    def betti_1(self) -> int:
        return self.edge_count - self.vertex_count + 1

    def phi(self, point: ReebPoint) -> float:
        """The induced function on the graph, linear along edges."""
        if point.kind == "vertex":
            return self.vertices[point.id].level
        lo, hi = self.edges[point.id].interval
        return lo + point.param * (hi - lo)

    def edge_curves(self, e: int) -> List[Curve]:
        """The regular curves of edge ``e``, one per slab it crosses, bottom to top."""
        nv = self.mesh.vertex_count
        out = []
        for k, c in self._edge_slabs[e]:
            lab = self._slab_labels[k]
            nodes = lab.nodes[lab.labels == c]
            out.append(Curve(k, frozenset((nodes - nv).tolist())))
        return out

    def edge_curve(self, e: int) -> Curve:
        """A representative curve of edge ``e`` (its middle slab)."""
        ks = self._edge_slabs[e]
        return self.edge_curves(e)[len(ks) // 2]

    def end_curve(self, e: int, v: int) -> Curve:
        """The curve of edge ``e`` in the slab adjacent to its endpoint ``v``."""
        curves = self.edge_curves(e)
        return curves[0] if v == self.edges[e].lower else curves[-1]

    # -- projection --------------------------------------------------------

    def _resolve(self, where: str, k: int, node: int, value: float) -> ReebPoint:
        if where == "slab":
            c = self._slab_labels[k].label_of(node)
            e = self._slab_edge[(k, c)]
        else:
            c = self._level_labels[k].label_of(node)
            a = int(self._level_assign[k][c])
            if a >= 0:
                return ReebPoint("vertex", a)
            e = -a - 1
        lo, hi = self.edges[e].interval
        return ReebPoint("edge", e, float((value - lo) / (hi - lo)))

    def _project_triangle(self, t: int) -> ReebPoint:
        mesh = self.mesh
        nv = mesh.vertex_count
        corners = mesh.triangles[t]
        vals = mesh.values[corners]
        tau = float(min(max(vals.sum() / 3.0, vals.min()), vals.max()))
        levels = mesh.levels
        lidx = mesh.level_index
        lh = mesh.edge_low_high
        k = int(np.searchsorted(levels, tau))
        if k < len(levels) and levels[k] == tau:
            for v in corners.tolist():
                if lidx[v] == k:
                    return self._resolve("level", k, v, tau)
            for e in mesh.triangle_edges[t].tolist():
                if lidx[lh[e, 0]] < k < lidx[lh[e, 1]]:
                    return self._resolve("level", k, nv + e, tau)
        s = k - 1
        for e in mesh.triangle_edges[t].tolist():
            if lidx[lh[e, 0]] <= s < lidx[lh[e, 1]]:
                return self._resolve("slab", s, nv + e, tau)
        raise ReebError(f"triangle {t} could not be projected")  # pragma: no cover

    def project_vertex(self, v: int) -> ReebPoint:
        k = int(self.mesh.level_index[v])
        return self._resolve("level", k, v, float(self.mesh.values[v]))


def project(graph: ReebGraph, cell: Tuple[str, int]) -> ReebPoint:
    """Image of a mesh cell, ``("vertex", i)`` or ``("triangle", i)``, in the graph."""
    try:
        kind, idx = cell
        idx = int(idx)
    except (TypeError, ValueError):
        raise UnknownCell(f"malformed cell {cell!r}") from None
    if kind == "vertex" and 0 <= idx < graph.mesh.vertex_count:
        return graph.project_vertex(idx)
    if kind == "triangle" and 0 <= idx < graph.mesh.triangle_count:
        return graph.projection[idx]
    raise UnknownCell(f"no such cell {cell!r}")


def _snap(levels: Sequence[float], tol: float) -> Dict[float, float]:
    """Map each level to the smallest member of its tolerance chain."""
    out: Dict[float, float] = {}
    rep = None
    prev = None
    for x in sorted(set(levels)):
        if prev is None or x - prev > tol:
            rep = x
        out[x] = rep
        prev = x
    return out


def build_reeb(mesh: Mesh, level_tol: float = 0.0, *, require_property_l: bool = True) -> ReebGraph:
    """Sweep the field and return its Reeb graph.

    ``level_tol`` snaps vertex levels closer than the tolerance onto one
    canonical value; the snapped values only feed level comparisons between
    vertices (see :mod:`reebtorus.symmetry`).
    """
    if level_tol < 0:
        raise ValueError("level_tol must be nonnegative")
    if require_property_l:
        report = check_property_l(mesh)
        if not report.ok:
            raise PropertyLViolated(report.offending_vertices)

    nv = mesh.vertex_count
    classes = vertex_classes(mesh)
    nonregular = np.array([not c.is_regular for c in classes])
    levels = mesh.levels
    lidx = mesh.level_index
    lh = mesh.edge_low_high
    nlev = len(levels)

    uf = UnionFind()
    level_labels: List[LevelLabels] = []
    level_critical: List[np.ndarray] = []
    critical_components: List[Tuple[int, int, LevelComponent]] = []
    for k in range(nlev):
        lab = label_level(mesh, np.sign(lidx - k).astype(np.int8))
        crit = np.zeros(lab.count, dtype=bool)
        is_vertex = lab.nodes < nv
        crit[lab.labels[is_vertex][nonregular[lab.nodes[is_vertex]]]] = True
        for e in lab.flat_edges.tolist():
            crit[lab.label_of(int(lh[e, 0]))] = True
        if crit.any():
            comps = components_from_labels(mesh, lab, float(levels[k]), classes)
            for c in np.flatnonzero(crit).tolist():
                critical_components.append((k, c, comps[c]))
        level_labels.append(lab)
        level_critical.append(crit)

    slab_labels: List[LevelLabels] = []
    slab_ends: Dict[Tuple[int, int], Tuple[Tuple[int, int], Tuple[int, int]]] = {}
    for k in range(nlev - 1):
        lab = label_level(mesh, np.where(lidx <= k, -1, 1).astype(np.int8))
        slab_labels.append(lab)
        rep = np.full(lab.count, np.iinfo(np.int64).max, dtype=np.int64)
        np.minimum.at(rep, lab.labels, lab.nodes)
        for c, node in enumerate(rep.tolist()):
            e = node - nv
            lo, hi = int(lh[e, 0]), int(lh[e, 1])
            bottom = lo if lidx[lo] == k else node
            top = hi if lidx[hi] == k + 1 else node
            b = (k, level_labels[k].label_of(bottom))
            t = (k + 1, level_labels[k + 1].label_of(top))
            slab_ends[(k, c)] = (b, t)
            uf.add(("S", k, c))
            if not level_critical[b[0]][b[1]]:
                uf.union(("S", k, c), ("L",) + b)
            if not level_critical[t[0]][t[1]]:
                uf.union(("S", k, c), ("L",) + t)

    # vertices, ordered by (level, smallest mesh vertex)
    critical_components.sort(key=lambda item: (item[0], min(item[2].vertices)))
    snapped = _snap([float(levels[k]) for k, _, _ in critical_components], level_tol)
    vertex_of: Dict[Tuple[int, int], int] = {}
    vertices: List[ReebVertex] = []
    for vid, (k, c, comp) in enumerate(critical_components):
        vertex_of[(k, c)] = vid
        lvl = float(levels[k])
        vertices.append(ReebVertex(vid, lvl, snapped[lvl], comp))

    # edges: union-find classes that contain slab components
    classes_by_root: Dict[object, List[Tuple[int, int]]] = {}
    regular_by_root: Dict[object, List[Tuple[int, int]]] = {}
    for item in uf:
        root = uf.find(item)
        if item[0] == "S":
            classes_by_root.setdefault(root, []).append((item[1], item[2]))
        else:
            regular_by_root.setdefault(root, []).append((item[1], item[2]))
    raw_edges = []
    for root, slabs in classes_by_root.items():
        slabs.sort()
        lower = vertex_of[slab_ends[slabs[0]][0]]
        upper = vertex_of[slab_ends[slabs[-1]][1]]
        first_node = int(slab_labels[slabs[0][0]].nodes[slab_labels[slabs[0][0]].labels == slabs[0][1]][0])
        raw_edges.append(((lower, upper, slabs[0][0], first_node), slabs, regular_by_root.get(root, [])))
    raw_edges.sort(key=lambda item: item[0])

    level_assign = [np.full(lab.count, 0, dtype=np.int64) for lab in level_labels]
    for (k, c), vid in vertex_of.items():
        level_assign[k][c] = vid
    edges: List[ReebEdge] = []
    edge_slabs: Dict[int, List[Tuple[int, int]]] = {}
    for eid, ((lower, upper, _, _), slabs, regulars) in enumerate(raw_edges):
        lo, hi = vertices[lower].level, vertices[upper].level
        if not lo < hi:
            raise ReebError(f"edge {eid} is not monotone")  # pragma: no cover
        if not vertices[lower].canonical_level < vertices[upper].canonical_level:
            raise ReebError(f"level tolerance {level_tol} collapses edge {eid}")
        edges.append(ReebEdge(eid, lower, upper, (lo, hi)))
        edge_slabs[eid] = slabs
        for k, c in regulars:
            level_assign[k][c] = -eid - 1

    conn = UnionFind(range(len(vertices)))
    for e in edges:
        conn.union(e.lower, e.upper)
    if len({conn.find(v) for v in range(len(vertices))}) != 1:
        raise ReebError("Reeb graph is disconnected")  # pragma: no cover

    return ReebGraph(mesh, vertices, edges, level_labels, level_assign, slab_labels, edge_slabs, level_tol)


def is_tree(graph: ReebGraph) -> bool:
    return graph.edge_count == graph.vertex_count - 1


def _fmt_level(x: float) -> str:
    return format(x, ".6g")


def to_dot(
    graph: ReebGraph,
    directions: Optional[Dict[int, Tuple[int, int]]] = None,
    sink: Optional[int] = None,
) -> str:
    """Graphviz text; ``directions`` maps edge id to ``(tail, head)``.

    Vertices appear in id order, i.e. by (level, component).  The sink, if
    given, gets a doubled border.
    """
    directed = directions is not None
    lines = ["digraph reeb {" if directed else "graph reeb {", "  node [shape=circle];"]
    for v in graph.vertices:
        attrs = [f'label="{_fmt_level(v.level)}"']
        if sink is not None and v.id == sink:
            attrs.append("peripheries=2")
        lines.append(f"  v{v.id} [{', '.join(attrs)}];")
    for e in graph.edges:
        if directed:
            tail, head = directions[e.id]
            lines.append(f"  v{tail} -> v{head};")
        else:
            lines.append(f"  v{e.lower} -- v{e.upper};")
    lines.append("}")
    return "\n".join(lines) + "\n"
