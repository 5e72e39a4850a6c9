"""Closed triangulated surfaces carrying a piecewise-linear scalar field.

A :class:`Mesh` is validated on construction (closed, connected, manifold,
orientable, no flat triangles) and is immutable afterwards.  The module also
provides the built-in analytic fields on the flat torus used throughout the
package and a seeded generator of random smooth fields.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .unionfind import UnionFind


class MeshError(ValueError):
    """Base class for invalid mesh input."""


class IndexOutOfRange(MeshError):
    pass


class NonManifold(MeshError):
    pass


class Disconnected(MeshError):
    pass


class NonOrientable(MeshError):
    pass


class FlatTriangle(MeshError):
    pass


class SamplerError(ValueError):
    pass


class UnknownFunction(SamplerError):
    pass


class ResolutionTooSmall(SamplerError):
    pass


class IncompatibleResolution(SamplerError):
    pass


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class Mesh:
    """Combinatorial closed surface with one scalar value per vertex.

    Parameters
    ----------
    triangles : array-like, shape (F, 3)
        Vertex index triples.
    values : array-like, shape (V,)
        The field value at every vertex; ``V`` is the vertex count.
    positions : array-like, shape (V, 2), optional
        Planar coordinates, only set by the samplers.

    Raises
    ------
    MeshError
        One of its subclasses, naming the first violated invariant.
    """

    def __init__(self, triangles, values, positions=None):
        # adding +0.0 turns -0.0 into 0.0 and leaves every other value unchanged
        values = np.array(values, dtype=np.float64).reshape(-1) + 0.0
        tris = np.array(triangles, dtype=np.int64)
        if tris.size == 0:
            tris = tris.reshape(0, 3)
        if tris.ndim != 2 or tris.shape[1] != 3:
            raise MeshError("triangles must be a list of index triples")
        if not np.all(np.isfinite(values)):
            raise MeshError("values must be finite")
        nv = values.shape[0]
        if tris.size and (tris.min() < 0 or tris.max() >= nv):
            raise IndexOutOfRange(f"triangle index outside [0, {nv})")
        if len(tris) == 0:
            raise NonManifold("a closed surface needs at least one triangle")

        self.values = _frozen(values)
        self.triangles = _frozen(tris)
        self.positions = None if positions is None else _frozen(np.array(positions, dtype=np.float64))
        self._build_edges()
        self._build_links()
        self._check_connected()
        self._check_orientable()
        self._check_flat()

    # -- construction helpers -------------------------------------------------

    def _build_edges(self) -> None:
        tris = self.triangles
        if np.any((tris[:, 0] == tris[:, 1]) | (tris[:, 1] == tris[:, 2]) | (tris[:, 0] == tris[:, 2])):
            raise NonManifold("triangle with a repeated vertex")
        if len(np.unique(np.sort(tris, axis=1), axis=0)) != len(tris):
            raise NonManifold("duplicate triangle")
        half = np.stack([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]], axis=1).reshape(-1, 2)
        und = np.sort(half, axis=1)
        edges, inverse, counts = np.unique(und, axis=0, return_inverse=True, return_counts=True)
        bad = np.flatnonzero(counts != 2)
        if bad.size:
            a, b = edges[bad[0]]
            raise NonManifold(f"edge ({a}, {b}) lies in {counts[bad[0]]} triangles")
        inverse = inverse.reshape(-1)
        self.edges = _frozen(edges.astype(np.int64))
        self.triangle_edges = _frozen(inverse.reshape(-1, 3).astype(np.int64))
        order = np.argsort(inverse, kind="stable")
        self.edge_triangles = _frozen((order // 3).reshape(-1, 2).astype(np.int64))
        self.edge_index: Dict[Tuple[int, int], int] = {
            (int(a), int(b)): i for i, (a, b) in enumerate(self.edges)
        }

    def _build_links(self) -> None:
        nv = self.vertex_count
        adj: List[Dict[int, List[int]]] = [dict() for _ in range(nv)]
        for a, b, c in self.triangles.tolist():
            for v, p, q in ((a, b, c), (b, c, a), (c, a, b)):
                d = adj[v]
                d.setdefault(p, []).append(q)
                d.setdefault(q, []).append(p)
        links: List[Tuple[int, ...]] = []
        for v, d in enumerate(adj):
            if not d:
                raise NonManifold(f"vertex {v} belongs to no triangle")
            if any(len(nb) != 2 for nb in d.values()):
                raise NonManifold(f"link of vertex {v} is not a cycle")
            start = min(d)
            cycle = [start]
            prev, cur = None, start
            while True:
                a, b = d[cur]
                nxt = a if a != prev else b
                if nxt == start:
                    break
                cycle.append(nxt)
                prev, cur = cur, nxt
            if len(cycle) != len(d):
                raise NonManifold(f"link of vertex {v} has more than one cycle")
            if len(cycle) < 3:
                raise NonManifold(f"link of vertex {v} has fewer than three vertices")
            links.append(tuple(cycle))
        self.links: Tuple[Tuple[int, ...], ...] = tuple(links)

    def _check_connected(self) -> None:
        uf = UnionFind(range(self.triangle_count))
        for t0, t1 in self.edge_triangles.tolist():
            uf.union(t0, t1)
        if len({uf.find(t) for t in range(self.triangle_count)}) != 1:
            raise Disconnected("triangle adjacency graph is disconnected")

    def _check_orientable(self) -> None:
        # flip[t] = +1 keeps the stored winding, -1 reverses it
        tris = self.triangles
        flip = np.zeros(self.triangle_count, dtype=np.int8)
        flip[0] = 1
        stack = [0]
        while stack:
            t = stack.pop()
            for k in range(3):
                e = self.triangle_edges[t, k]
                a, b = tris[t, k], tris[t, (k + 1) % 3]
                t0, t1 = self.edge_triangles[e]
                other = t1 if t0 == t else t0
                # winding of (a, b) inside the neighbour
                row = tris[other].tolist()
                i = row.index(a)
                same = row[(i + 1) % 3] == b
                want = -flip[t] if same else flip[t]
                if flip[other] == 0:
                    flip[other] = want
                    stack.append(int(other))
                elif flip[other] != want:
                    raise NonOrientable("surface admits no coherent orientation")
        self._orientation = _frozen(flip)

    def _check_flat(self) -> None:
        tv = self.values[self.triangles]
        flat = np.flatnonzero((tv[:, 0] == tv[:, 1]) & (tv[:, 1] == tv[:, 2]))
        if flat.size:
            raise FlatTriangle(f"triangle {int(flat[0])} has three equal values")

    # -- queries ---------------------------------------------------------------

    @property
    def vertex_count(self) -> int:
        return int(self.values.shape[0])

    @property
    def triangle_count(self) -> int:
        return int(self.triangles.shape[0])

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    @cached_property
    def edge_low_high(self) -> np.ndarray:
        """Edges with endpoints ordered so that ``values[lo] <= values[hi]``."""
        e = self.edges
        swap = self.values[e[:, 0]] > self.values[e[:, 1]]
        out = np.where(swap[:, None], e[:, ::-1], e)
        return _frozen(out.copy())

    @cached_property
    def levels(self) -> np.ndarray:
        """Sorted distinct vertex values."""
        return _frozen(np.unique(self.values))

    @cached_property
    def level_index(self) -> np.ndarray:
        """Position of each vertex value in :attr:`levels`."""
        return _frozen(np.searchsorted(self.levels, self.values).astype(np.int64))

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self.links[v]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Mesh):
            return NotImplemented
        return np.array_equal(self.triangles, other.triangles) and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return self._hash

    @cached_property
    def _hash(self) -> int:
        return hash((self.triangles.tobytes(), self.values.tobytes()))

    def __repr__(self) -> str:
        return f"Mesh(V={self.vertex_count}, E={self.edge_count}, F={self.triangle_count})"


def build_mesh(triangles, values, positions=None) -> Mesh:
    """Validate ``triangles``/``values`` and return an immutable :class:`Mesh`."""
    return Mesh(triangles, values, positions)


@dataclass(frozen=True)
class SurfaceStats:
    euler_characteristic: int
    genus: int
    is_torus: bool


def stats(mesh: Mesh) -> SurfaceStats:
    chi = mesh.vertex_count - mesh.edge_count + mesh.triangle_count
    genus = (2 - chi) // 2
    return SurfaceStats(chi, genus, genus == 1)


# -- serialization -------------------------------------------------------------


def mesh_to_json(mesh: Mesh) -> dict:
    return {"triangles": mesh.triangles.tolist(), "values": mesh.values.tolist()}


def mesh_from_json(payload: dict) -> Mesh:
    try:
        triangles = payload["triangles"]
        values = payload["values"]
    except (KeyError, TypeError) as exc:
        raise MeshError("mesh JSON needs 'triangles' and 'values'") from exc
    return build_mesh(triangles, values)


def load_mesh(path: Union[str, Path]) -> Mesh:
    with open(path, encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MeshError(f"{path}: not valid JSON ({exc})") from exc
    return mesh_from_json(payload)


def save_mesh(mesh: Mesh, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(mesh_to_json(mesh)), encoding="utf-8")


# -- torus samplers ------------------------------------------------------------


def grid_torus_triangles(n: int) -> np.ndarray:
    """Triangles of the n-by-n grid torus, vertex ``i + n*j`` at ``(i/n, j/n)``.

    Each square is split along the diagonal through its corner with even
    ``i + j``, so diagonals radiate from every even vertex.  ``n`` must be
    even for the pattern to close up across the seams.
    """
    if n < 3 or n % 2:
        raise IncompatibleResolution(f"grid torus needs an even n >= 4, got {n}")
    tris = []
    for j in range(n):
        for i in range(n):
            p00 = i + n * j
            p10 = (i + 1) % n + n * j
            p11 = (i + 1) % n + n * ((j + 1) % n)
            p01 = i + n * ((j + 1) % n)
            if (i + j) % 2 == 0:
                tris.append((p00, p10, p11))
                tris.append((p00, p11, p01))
            else:
                tris.append((p00, p10, p01))
                tris.append((p10, p11, p01))
    return np.array(tris, dtype=np.int64)


def _sin_turn(k: int, n: int) -> float:
    """sin(2*pi*k/n), exact at multiples of a quarter turn and symmetric in k."""
    k %= n
    if k == 0 or 2 * k == n:
        return 0.0
    if 4 * k == n:
        return 1.0
    if 4 * k == 3 * n:
        return -1.0
    if 2 * k > n:
        return -_sin_turn(n - k, n)
    m = 2 * k if 4 * k < n else n - 2 * k
    return math.sin(math.pi * m / n)


def _cos_turn(k: int, n: int) -> float:
    """cos(2*pi*k/n), exact at multiples of a quarter turn and symmetric in k."""
    k %= n
    if 2 * k > n:
        k = n - k
    if k == 0:
        return 1.0
    if 2 * k == n:
        return -1.0
    if 4 * k == n:
        return 0.0
    if 4 * k > n:
        return -math.cos(math.pi * (n - 2 * k) / n)
    return math.cos(math.pi * 2 * k / n)


_SCALED = re.compile(r"^sinsin_scaled\[([^\]]*)\]$")


def parse_function_id(function_id: str) -> Tuple[str, Tuple[float, ...]]:
    """Split a built-in id into its name and parameters.

    >>> parse_function_id("sinsin_scaled[1,0.8,0.6,0.4]")
    ('sinsin_scaled', (1.0, 0.8, 0.6, 0.4))
    """
    fid = function_id.strip().replace(" ", "")
    if fid in ("sinsin", "height", "twosaddle"):
        return fid, ()
    m = _SCALED.match(fid)
    if m:
        try:
            params = tuple(float(p) for p in m.group(1).split(","))
        except ValueError:
            raise UnknownFunction(f"bad parameters in {function_id!r}") from None
        if len(params) != 4 or not all(p > 0 and math.isfinite(p) for p in params):
            raise UnknownFunction(f"sinsin_scaled needs four positive factors, got {function_id!r}")
        return "sinsin_scaled", params
    raise UnknownFunction(f"unknown built-in function {function_id!r}")


BUILTIN_NAMES = ("sinsin", "sinsin_scaled[a,b,c,d]", "height", "twosaddle")


def _field_values(name: str, params: Sequence[float], n: int) -> np.ndarray:
    vals = np.empty(n * n)
    for j in range(n):
        for i in range(n):
            if name == "height":
                v = _cos_turn(i, n)
            elif name == "twosaddle":
                v = _cos_turn(i, n) + 0.5 * _cos_turn(j, n)
            else:
                v = _sin_turn(i, n) * _sin_turn(j, n)
                if name == "sinsin_scaled" and v != 0.0:
                    left, bottom = 2 * i < n, 2 * j < n
                    if left and bottom:
                        v *= params[0]
                    elif bottom:
                        v *= params[1]
                    elif not left:
                        v *= params[2]
                    else:
                        v *= params[3]
            vals[i + n * j] = v
    return vals


def sample_torus(function_id: str, n: int) -> Mesh:
    """Sample a built-in function on the n-by-n grid torus.

    Built-ins: ``sinsin`` = sin(2 pi x) sin(2 pi y); ``sinsin_scaled[a,b,c,d]``
    scales sinsin by a positive constant on each of the four open squares of
    side 1/2 (counter-clockwise from the origin); ``height`` = cos(2 pi x);
    ``twosaddle`` = cos(2 pi x) + 0.5 cos(2 pi y).

    The sinsin family needs ``n % 4 == 0`` so that the extrema and the zero
    grid sit on grid points; every built-in needs an even ``n >= 8``.
    """
    name, params = parse_function_id(function_id)
    if n < 8:
        raise ResolutionTooSmall(f"n must be at least 8, got {n}")
    if n % 2:
        raise IncompatibleResolution(f"n must be even, got {n}")
    if name.startswith("sinsin") and n % 4:
        raise IncompatibleResolution(f"{name} needs n divisible by 4, got {n}")
    ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="xy")
    positions = np.stack([ii.reshape(-1) / n, jj.reshape(-1) / n], axis=1)
    return Mesh(grid_torus_triangles(n), _field_values(name, params, n), positions)


def random_torus_field(n: int = 16, seed: Optional[int] = None, sweeps: int = 4) -> Mesh:
    """Random PL field on the grid torus: Gaussian noise smoothed ``sweeps`` times.

    Each sweep replaces every value by the mean of itself and its four grid
    neighbours.  Values are distinct with probability one.
    """
    rng = np.random.default_rng(seed)
    f = rng.standard_normal((n, n))
    for _ in range(sweeps):
        f = (f + np.roll(f, 1, 0) + np.roll(f, -1, 0) + np.roll(f, 1, 1) + np.roll(f, -1, 1)) / 5.0
    ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="xy")
    positions = np.stack([ii.reshape(-1) / n, jj.reshape(-1) / n], axis=1)
    # row j of f holds y = j/n, matching vertex index i + n*j
    return Mesh(grid_torus_triangles(n), f.reshape(-1), positions)


def random_tree_field(n: int = 16, seed: Optional[int] = None, sweeps: int = 2) -> Mesh:
    """Random PL field on the grid torus whose zero set is a grid of lines.

    Smoothed Gaussian noise, exponentiated to a positive amplitude, is
    multiplied by a checkerboard sign pattern that vanishes exactly on 2 or 4
    random grid columns and 2 or 4 random grid rows.  The zero set is then a
    connected critical level carrying both generators of the torus, and the
    open rectangles it bounds are disks, so the Reeb graph is a tree.  Line
    indices are even and pairwise at least 2 apart, which keeps every square
    next to a crossing split through it and rules out flat triangles.
    """
    if n < 8 or n % 4:
        raise IncompatibleResolution(f"n must be a multiple of 4 and at least 8, got {n}")
    rng = np.random.default_rng(seed)

    def envelope() -> np.ndarray:
        count = int(rng.choice([2, 4]))
        zeros = np.sort(rng.choice(np.arange(0, n, 2), size=count, replace=False))
        sign = np.zeros(n)
        s = 1.0 if rng.random() < 0.5 else -1.0
        for a, b in zip(zeros, np.roll(zeros, -1)):
            span = range(a + 1, b) if b > a else list(range(a + 1, n)) + list(range(0, b))
            for i in span:
                sign[i] = s
            s = -s
        return sign

    cols, rows = envelope(), envelope()
    noise = rng.standard_normal((n, n))
    for _ in range(sweeps):
        noise = (noise + np.roll(noise, 1, 0) + np.roll(noise, -1, 0) + np.roll(noise, 1, 1) + np.roll(noise, -1, 1)) / 5.0
    amplitude = np.exp(noise / max(noise.std(), 1e-12) * 0.5)
    f = amplitude * rows[:, None] * cols[None, :]
    ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="xy")
    positions = np.stack([ii.reshape(-1) / n, jj.reshape(-1) / n], axis=1)
    return Mesh(grid_torus_triangles(n), f.reshape(-1), positions)
