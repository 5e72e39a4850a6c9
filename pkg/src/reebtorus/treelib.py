"""Oriented-tree combinatorics: sinks, the out-degree-one uniqueness lemma,
and exhaustive enumeration over labeled trees.

Labeled trees come from Prüfer sequences (decoded by networkx); each tree is
paired with every assignment of edge directions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

import networkx as nx
import numpy as np

MAX_ENUMERATION_N = 9


class TreeError(ValueError):
    pass


class InvalidTree(TreeError):
    pass


class BoundExceeded(TreeError):
    pass


class OutDegreePreconditionViolated(TreeError):
    pass


@dataclass(frozen=True)
class OrientedTree:
    """``n`` vertices ``0..n-1`` and directed edges ``(tail, head)``."""

    n: int
    edges: Tuple[Tuple[int, int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", tuple((int(a), int(b)) for a, b in self.edges))
        if self.n < 1:
            raise InvalidTree("a tree needs at least one vertex")
        if len(self.edges) != self.n - 1:
            raise InvalidTree(f"{self.n} vertices need {self.n - 1} edges, got {len(self.edges)}")
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        for a, b in self.edges:
            if not (0 <= a < self.n and 0 <= b < self.n) or a == b:
                raise InvalidTree(f"bad edge ({a}, {b})")
            g.add_edge(a, b)
        if not nx.is_tree(g):
            raise InvalidTree("edges do not form a tree")

    def out_degrees(self) -> List[int]:
        out = [0] * self.n
        for a, _ in self.edges:
            out[a] += 1
        return out

    @classmethod
    def path(cls, n: int) -> "OrientedTree":
        """``0 -> 1 -> ... -> n-1``."""
        return cls(n, tuple((i, i + 1) for i in range(n - 1)))

    @classmethod
    def star(cls, leaves: int, inward: bool = True) -> "OrientedTree":
        """Center 0 with leaves ``1..leaves``."""
        pairs = [(i, 0) if inward else (0, i) for i in range(1, leaves + 1)]
        return cls(leaves + 1, tuple(pairs))


def sinks(tree: OrientedTree) -> frozenset:
    """Vertices with no outgoing edge."""
    return frozenset(v for v, d in enumerate(tree.out_degrees()) if d == 0)


def has_unique_sink_under_outdeg1(tree: OrientedTree) -> bool:
    """Executable form of the lemma: out-degree at most one everywhere
    forces exactly one sink.  ``False`` would be a counterexample."""
    bad = [v for v, d in enumerate(tree.out_degrees()) if d > 1]
    if bad:
        raise OutDegreePreconditionViolated(f"vertices {bad} have out-degree > 1")
    return len(sinks(tree)) == 1


def labeled_trees(n: int) -> Iterator[Tuple[Tuple[int, int], ...]]:
    """Every labeled tree on ``0..n-1`` as a sorted edge tuple, once each."""
    if n == 1:
        yield ()
        return
    if n == 2:
        yield ((0, 1),)
        return
    for seq in itertools.product(range(n), repeat=n - 2):
        g = nx.from_prufer_sequence(list(seq))
        yield tuple(sorted((min(a, b), max(a, b)) for a, b in g.edges()))


def enumerate_oriented_trees(n: int) -> Iterator[OrientedTree]:
    """All labeled trees on ``n`` vertices with all ``2^(n-1)`` orientations.

    >>> sum(1 for _ in enumerate_oriented_trees(3))
    12
    """
    if not 1 <= n <= MAX_ENUMERATION_N:
        raise BoundExceeded(f"n must be in 1..{MAX_ENUMERATION_N}, got {n}")
    for edges in labeled_trees(n):
        for flips in itertools.product((False, True), repeat=n - 1):
            yield OrientedTree(n, tuple((b, a) if f else (a, b) for (a, b), f in zip(edges, flips)))


def two_sink_witness(tree: OrientedTree) -> Optional[Tuple[List[int], int]]:
    """For a tree with two or more sinks, return the path between two of
    them and a vertex on it with two outgoing path edges.  ``None`` if the
    tree has at most one sink."""
    s = sorted(sinks(tree))
    if len(s) < 2:
        return None
    g = nx.Graph(list(tree.edges))
    g.add_nodes_from(range(tree.n))
    path = nx.shortest_path(g, s[0], s[1])
    directed = set(tree.edges)
    out_on_path = [0] * len(path)
    for i in range(len(path) - 1):
        a, b = path[i], path[i + 1]
        out_on_path[i if (a, b) in directed else i + 1] += 1
    for i, c in enumerate(out_on_path):
        if c >= 2:
            return path, path[i]
    raise AssertionError("two sinks without a branching vertex on their path")  # pragma: no cover


@dataclass(frozen=True)
class ExhaustiveReport:
    n: int
    trees: int
    oriented: int
    outdeg1: int
    min_sinks: int  # over all oriented trees
    outdeg1_sink_counts: Tuple[int, ...]  # distinct sink counts seen under out-degree <= 1

    @property
    def ok(self) -> bool:
        return self.min_sinks >= 1 and self.outdeg1_sink_counts == (1,)


def _orientation_masks(m: int) -> np.ndarray:
    return ((np.arange(2**m)[:, None] >> np.arange(m)[None, :]) & 1).astype(bool)


def exhaustive_check(n: int, batch: int = 4096) -> ExhaustiveReport:
    """Check both sink statements over every oriented labeled tree on ``n``
    vertices, vectorized over orientations and batches of trees."""
    if not 1 <= n <= MAX_ENUMERATION_N:
        raise BoundExceeded(f"n must be in 1..{MAX_ENUMERATION_N}, got {n}")
    if n == 1:
        return ExhaustiveReport(1, 1, 1, 1, 1, (1,))
    masks = _orientation_masks(n - 1)  # (M, n-1)
    trees = 0
    outdeg1 = 0
    min_sinks = n
    counts: set = set()
    it = labeled_trees(n)
    while True:
        chunk = list(itertools.islice(it, batch))
        if not chunk:
            break
        trees += len(chunk)
        e = np.array(chunk, dtype=np.int64)  # (T, n-1, 2)
        tails = np.where(masks[None, :, :], e[:, None, :, 1], e[:, None, :, 0])  # (T, M, n-1)
        outdeg = np.zeros(tails.shape[:2] + (n,), dtype=np.int64)
        for j in range(n - 1):
            outdeg += tails[:, :, j : j + 1] == np.arange(n)
        nsinks = (outdeg == 0).sum(axis=2)
        min_sinks = min(min_sinks, int(nsinks.min()))
        sel = outdeg.max(axis=2) <= 1
        outdeg1 += int(sel.sum())
        counts.update(np.unique(nsinks[sel]).tolist())
    return ExhaustiveReport(n, trees, trees * masks.shape[0], outdeg1, min_sinks, tuple(sorted(counts)))


def random_oriented_tree(n: int, rng: np.random.Generator, outdeg1: bool = False) -> OrientedTree:
    """Uniform labeled tree with random directions; with ``outdeg1`` the
    edges point toward a random root, so every out-degree is at most one."""
    if n == 1:
        return OrientedTree(1, ())
    seq = rng.integers(0, n, size=n - 2).tolist() if n > 2 else []
    g = nx.from_prufer_sequence(seq) if n > 2 else nx.path_graph(2)
    if outdeg1:
        root = int(rng.integers(n))
        edges = tuple((child, parent) for parent, child in nx.bfs_edges(g, root))
    else:
        edges = tuple((a, b) if rng.random() < 0.5 else (b, a) for a, b in g.edges())
    return OrientedTree(n, edges)

