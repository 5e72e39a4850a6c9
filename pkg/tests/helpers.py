import functools
import math

import numpy as np

from reebtorus.reeb import build_reeb
from reebtorus.surface import build_mesh, grid_torus_triangles, sample_torus

SCALED = "sinsin_scaled[1,0.8,0.6,0.4]"

OCTAHEDRON = [(0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 2), (1, 3, 2), (1, 4, 3), (1, 5, 4), (1, 2, 5)]
OCTAHEDRON_Z = [1.0, -1.0, 0.0, 0.0, 0.0, 0.0]


@functools.lru_cache(maxsize=None)
def sampled(fid, n):
    return sample_torus(fid, n)


@functools.lru_cache(maxsize=None)
def reeb_of(fid, n):
    return build_reeb(sampled(fid, n))


def max_grid_field(n=16):
    """-sin^2(pi x) sin^2(pi y): a flat maximal grid of two circles and one
    minimum.  Degenerate along the grid, Reeb graph a single edge."""
    s = [math.sin(math.pi * i / n) ** 2 if i else 0.0 for i in range(n)]
    vals = np.array([-s[i] * s[j] for j in range(n) for i in range(n)])
    return build_mesh(grid_torus_triangles(n), vals)


def leaf_at(graph, level):
    return next(v.id for v in graph.vertices if v.level == level)
