"""Level-preserving automorphisms of a Reeb graph and local stabilizers.

The group computed here is Aut_φ(Γ): every graph automorphism that fixes
the (snapped) level of each vertex.  It contains the group induced by
field-preserving diffeomorphisms isotopic to the identity, so a trivial
local stabilizer in Aut_φ is a sound certificate, while a non-trivial one
is inconclusive.

Vertex matchings are enumerated by networkx's VF2 matcher with a level
constraint; parallel edges are then permuted in every admissible way.
:func:`aut_phi_bruteforce` is an independent factorial oracle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple, Union

import networkx as nx
from networkx.algorithms.isomorphism import MultiGraphMatcher

from .reeb import ReebGraph

BRUTE_FORCE_MAX_VERTICES = 10


@dataclass(frozen=True)
class LevelGraph:
    """Bare multigraph with a level per vertex; edge ``i`` joins ``pairs[i]``."""

    levels: Tuple[float, ...]
    pairs: Tuple[Tuple[int, int], ...]

    @property
    def vertex_count(self) -> int:
        return len(self.levels)

    @property
    def edge_count(self) -> int:
        return len(self.pairs)

    def incident_edges(self, v: int) -> List[int]:
        return [i for i, (a, b) in enumerate(self.pairs) if v in (a, b)]

    @classmethod
    def from_reeb(cls, graph: ReebGraph) -> "LevelGraph":
        return cls(
            tuple(v.canonical_level for v in graph.vertices),
            tuple((e.lower, e.upper) for e in graph.edges),
        )


AnyGraph = Union[ReebGraph, LevelGraph]


def _as_level_graph(graph: AnyGraph) -> LevelGraph:
    return graph if isinstance(graph, LevelGraph) else LevelGraph.from_reeb(graph)


@dataclass(frozen=True)
class PhiAutomorphism:
    """``vertices[v]`` is the image of vertex ``v``; likewise for edges."""

    vertices: Tuple[int, ...]
    edges: Tuple[int, ...]

    def compose(self, other: "PhiAutomorphism") -> "PhiAutomorphism":
        """``self ∘ other``: apply ``other`` first."""
        return PhiAutomorphism(
            tuple(self.vertices[x] for x in other.vertices),
            tuple(self.edges[x] for x in other.edges),
        )

    def inverse(self) -> "PhiAutomorphism":
        vs = [0] * len(self.vertices)
        for i, x in enumerate(self.vertices):
            vs[x] = i
        es = [0] * len(self.edges)
        for i, x in enumerate(self.edges):
            es[x] = i
        return PhiAutomorphism(tuple(vs), tuple(es))

    @property
    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self.vertices)) and all(i == x for i, x in enumerate(self.edges))

    @classmethod
    def identity(cls, nv: int, ne: int) -> "PhiAutomorphism":
        return cls(tuple(range(nv)), tuple(range(ne)))


@dataclass(frozen=True)
class AutGroup:
    elements: Tuple[PhiAutomorphism, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def is_trivial(self) -> bool:
        return self.order == 1

    def is_closed(self) -> bool:
        s = set(self.elements)
        return all(a.compose(b) in s for a in s for b in s) and all(a.inverse() in s for a in s)


@dataclass(frozen=True)
class Star:
    """Half-edges at ``center``: ``(edge id, "above" | "below")`` by the far
    endpoint's level relative to the center."""

    center: int
    half_edges: Tuple[Tuple[int, str], ...]


def _check_vertex(graph: LevelGraph, v: int) -> None:
    if not 0 <= v < graph.vertex_count:
        raise KeyError(f"no vertex {v}")


def _parallel_classes(graph: LevelGraph) -> Dict[Tuple[int, int], List[int]]:
    out: Dict[Tuple[int, int], List[int]] = {}
    for i, (a, b) in enumerate(graph.pairs):
        out.setdefault((min(a, b), max(a, b)), []).append(i)
    return out


def _extend_to_edges(graph: LevelGraph, vmap: Sequence[int]) -> Iterator[PhiAutomorphism]:
    """Every edge bijection compatible with the vertex map."""
    classes = _parallel_classes(graph)
    keys = sorted(classes)
    choices = []
    for a, b in keys:
        src = classes[(a, b)]
        ia, ib = vmap[a], vmap[b]
        dst = classes.get((min(ia, ib), max(ia, ib)), [])
        if len(dst) != len(src):
            return
        choices.append([(src, perm) for perm in itertools.permutations(dst)])
    ne = graph.edge_count
    for combo in itertools.product(*choices):
        emap = [0] * ne
        for src, perm in combo:
            for s, d in zip(src, perm):
                emap[s] = d
        yield PhiAutomorphism(tuple(vmap), tuple(emap))


def _nx_graph(graph: LevelGraph) -> nx.MultiGraph:
    g = nx.MultiGraph()
    for v, level in enumerate(graph.levels):
        g.add_node(v, level=level)
    g.add_edges_from(graph.pairs)
    return g


def _sorted_group(elements: Iterable[PhiAutomorphism]) -> AutGroup:
    return AutGroup(tuple(sorted(set(elements), key=lambda g: (g.vertices, g.edges))))


def aut_phi(graph: AnyGraph) -> AutGroup:
    """All level-preserving automorphisms, vertices matched by backtracking.

    Levels are compared exactly; for a Reeb graph the snapped canonical
    levels are used.
    """
    graph = _as_level_graph(graph)
    g = _nx_graph(graph)
    matcher = MultiGraphMatcher(g, g, node_match=lambda a, b: a["level"] == b["level"])
    out = []
    for mapping in matcher.isomorphisms_iter():
        vmap = [mapping[v] for v in range(graph.vertex_count)]
        out.extend(_extend_to_edges(graph, vmap))
    return _sorted_group(out)


def aut_phi_bruteforce(graph: AnyGraph) -> AutGroup:
    """Oracle: try every level-preserving vertex bijection (factorial)."""
    graph = _as_level_graph(graph)
    nv = graph.vertex_count
    if nv > BRUTE_FORCE_MAX_VERTICES:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_MAX_VERTICES} vertices")
    by_level: Dict[float, List[int]] = {}
    for v in range(nv):
        by_level.setdefault(graph.levels[v], []).append(v)
    groups = list(by_level.values())
    classes = _parallel_classes(graph)
    counts = {k: len(x) for k, x in classes.items()}
    out = []
    for perms in itertools.product(*(itertools.permutations(grp) for grp in groups)):
        vmap = [0] * nv
        for grp, perm in zip(groups, perms):
            for s, d in zip(grp, perm):
                vmap[s] = d
        image = {}
        for (a, b), c in counts.items():
            ia, ib = vmap[a], vmap[b]
            image[(min(ia, ib), max(ia, ib))] = c
        if image == counts:
            out.extend(_extend_to_edges(graph, vmap))
    return _sorted_group(out)


def vertex_stabilizer(group: AutGroup, v: int) -> AutGroup:
    return AutGroup(tuple(g for g in group.elements if g.vertices[v] == v))


def star(graph: AnyGraph, v: int) -> Star:
    graph = _as_level_graph(graph)
    _check_vertex(graph, v)
    half = []
    for e in graph.incident_edges(v):
        a, b = graph.pairs[e]
        far = b if a == v else a
        half.append((e, "above" if graph.levels[far] > graph.levels[v] else "below"))
    return Star(v, tuple(half))


def restrict_to_star(g: PhiAutomorphism, st: Star) -> Tuple[int, ...]:
    """Permutation of the star's half-edges, as indices into ``st.half_edges``."""
    pos = {e: i for i, (e, _) in enumerate(st.half_edges)}
    return tuple(pos[g.edges[e]] for e, _ in st.half_edges)


@dataclass(frozen=True)
class LocalStabilizer:
    star: Star
    permutations: Tuple[Tuple[int, ...], ...]

    @property
    def order(self) -> int:
        return len(self.permutations)

    @property
    def is_trivial(self) -> bool:
        return self.order == 1


def local_stabilizer(graph: AnyGraph, v: int, group: AutGroup | None = None) -> LocalStabilizer:
    """Image of the stabilizer of ``v`` acting on the half-edges at ``v``."""
    st = star(graph, v)
    if group is None:
        group = aut_phi(graph)
    perms = {restrict_to_star(g, st) for g in vertex_stabilizer(group, v).elements}
    return LocalStabilizer(st, tuple(sorted(perms)))


@dataclass(frozen=True)
class HypothesisResult:
    trivial: bool
    caveat: bool  # set when the over-approximation leaves the question open
    local_order: int
    group_order: int


def is_hypothesis_satisfied(graph: AnyGraph, sink: int) -> HypothesisResult:
    group = aut_phi(graph)
    loc = local_stabilizer(graph, sink, group)
    return HypothesisResult(loc.is_trivial, not loc.is_trivial, loc.order, group.order)
