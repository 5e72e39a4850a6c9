"""End-to-end decision: does the torus splitting theorem apply to a field?

The pipeline stops at the first failing stage and names it.  A trivial
local stabilizer in the level-preserving automorphism group certifies the
hypothesis; a non-trivial one only says the over-approximation is too
coarse to decide.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from .contour import check_property_l
from .orient import LemmaViolation, OrientedReebTree, check_sink_complement, find_sink, orient_tree
from .reeb import ReebError, ReebGraph, build_reeb, is_tree
from .surface import Mesh, MeshError, mesh_from_json, stats
from .symmetry import is_hypothesis_satisfied

FORMULA = "π₁O(f)_f ≅ π₁D_id(T²) × π₀S′(f) ≅ ℤ² × π₀S′(f)"

SPLITS = "Splits"
INCONCLUSIVE = "HypothesisFailsInconclusive"
NOT_A_TORUS = "NotApplicable(NotATorus)"
PROPERTY_L_VIOLATED = "NotApplicable(PropertyLViolated)"
GRAPH_NOT_TREE = "NotApplicable(GraphNotTree)"


def invalid_input(detail: str) -> str:
    return f"NotApplicable(InvalidInput: {detail})"


@dataclass
class Verdict:
    chi: Optional[int]
    genus: Optional[int]
    property_L: bool
    tree: bool
    sink: Optional[int]
    local_stabilizer_order: int  # 0 when the stage was not reached
    caveat_overapprox: bool
    conclusion: str
    # pipeline artefacts kept for DOT export; not part of the report
    graph: Optional[ReebGraph] = field(default=None, repr=False, compare=False)
    oriented: Optional[OrientedReebTree] = field(default=None, repr=False, compare=False)

    @property
    def surface_ok(self) -> bool:
        return self.genus == 1

    @property
    def formula(self) -> Optional[str]:
        return FORMULA if self.conclusion == SPLITS else None

    @property
    def is_invalid_input(self) -> bool:
        return self.conclusion.startswith("NotApplicable(InvalidInput")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "surface": {"chi": self.chi, "genus": self.genus},
            "property_L": self.property_L,
            "tree": self.tree,
            "sink": self.sink,
            "local_stabilizer_order": self.local_stabilizer_order,
            "caveat_overapprox": self.caveat_overapprox,
            "conclusion": self.conclusion,
            "formula": self.formula,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2) + "\n"

    def dot(self) -> Optional[str]:
        """DOT of the oriented tree if one was built, else of the plain graph."""
        if self.oriented is not None:
            return self.oriented.to_dot()
        if self.graph is not None:
            from .reeb import to_dot

            return to_dot(self.graph)
        return None


def _failed(conclusion: str, **kw) -> Verdict:
    base = dict(
        chi=None,
        genus=None,
        property_L=False,
        tree=False,
        sink=None,
        local_stabilizer_order=0,
        caveat_overapprox=False,
    )
    base.update(kw)
    return Verdict(conclusion=conclusion, **base)


def analyze(mesh: Mesh, level_tol: float = 0.0) -> Verdict:
    """Run stats, Property (L), Reeb graph, tree test, orientation, sink and
    the local-stabilizer test, in that order."""
    st = stats(mesh)
    surf = dict(chi=st.euler_characteristic, genus=st.genus)
    pl = check_property_l(mesh).ok
    if not st.is_torus:
        return _failed(NOT_A_TORUS, property_L=pl, **surf)
    if not pl:
        return _failed(PROPERTY_L_VIOLATED, **surf)
    try:
        graph = build_reeb(mesh, level_tol)
    except ReebError as exc:
        return _failed(invalid_input(str(exc)), property_L=True, **surf)
    if not is_tree(graph):
        return _failed(GRAPH_NOT_TREE, property_L=True, graph=graph, **surf)
    try:
        oriented = orient_tree(mesh, graph)
        sink = find_sink(oriented)
    except LemmaViolation as exc:
        return _failed(invalid_input(str(exc)), property_L=True, tree=True, graph=graph, **surf)
    hyp = is_hypothesis_satisfied(graph, sink)
    conclusion = SPLITS if hyp.trivial else INCONCLUSIVE
    if conclusion == SPLITS and not check_sink_complement(mesh, graph, sink):
        conclusion = invalid_input(f"complement of sink {sink} is not a union of disks")
    return Verdict(
        property_L=True,
        tree=True,
        sink=sink,
        local_stabilizer_order=hyp.local_order,
        caveat_overapprox=hyp.caveat,
        conclusion=conclusion,
        graph=graph,
        oriented=oriented,
        **surf,
    )


def analyze_payload(payload: Dict[str, Any], level_tol: float = 0.0) -> Verdict:
    """Like :func:`analyze` on mesh JSON; construction errors become
    ``NotApplicable(InvalidInput: ...)``."""
    try:
        mesh = mesh_from_json(payload)
    except (MeshError, KeyError, TypeError, ValueError) as exc:
        return _failed(invalid_input(_describe(exc)))
    return analyze(mesh, level_tol)


def _describe(exc: Exception) -> str:
    return f"{type(exc).__name__}: {exc}"
