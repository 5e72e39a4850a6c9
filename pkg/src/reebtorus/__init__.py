"""Reeb graphs of PL functions on triangulated closed surfaces, with checks
of the hypotheses of the torus splitting theorem for orbit fundamental
groups."""

from .surface import Mesh, build_mesh, load_mesh, sample_torus, save_mesh, stats
from .contour import check_property_l, classify_vertex, level_components
from .reeb import ReebGraph, build_reeb, is_tree, project, to_dot
from .orient import check_sink_complement, find_sink, orient_tree, split_sides
from .symmetry import aut_phi, is_hypothesis_satisfied, local_stabilizer, vertex_stabilizer
from .verdict import Verdict, analyze

__all__ = [
    "Mesh",
    "ReebGraph",
    "Verdict",
    "analyze",
    "aut_phi",
    "build_mesh",
    "build_reeb",
    "check_property_l",
    "check_sink_complement",
    "classify_vertex",
    "find_sink",
    "is_hypothesis_satisfied",
    "is_tree",
    "level_components",
    "load_mesh",
    "local_stabilizer",
    "orient_tree",
    "project",
    "sample_torus",
    "save_mesh",
    "split_sides",
    "stats",
    "to_dot",
    "vertex_stabilizer",
]

__version__ = "0.1.0"
