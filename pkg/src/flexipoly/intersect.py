"""Face-edge self-intersection test by exact oriented-volume signs.

Every (face, edge) pair of a mesh is classified with five signed
tetrahedron volumes at most.  Degenerate sign patterns are never
resolved: they are reported as needing further study, which keeps the
classification logic transparent.  There is no epsilon anywhere; all
zero tests are exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

from . import exactnum as en
from . import geometry as geo
from .geometry import Point3
from .mesh import Mesh


class Outcome(Enum):
    DISJOINT = "disjoint"
    INTERSECTS = "intersects"
    NEEDS_STUDY = "needs_study"
    SKIPPED_INCIDENT_SIDE = "skipped_incident_side"


class StudyReason(Enum):
    ZERO_PLANE_DET = "zero_plane_det"
    ZERO_LINK_DET = "zero_link_det"
    COPLANAR_INCIDENT = "coplanar_incident"


@dataclass(frozen=True)
class PairVerdict:
    """Classification of one (face, edge) pair."""
    face: tuple
    edge: tuple
    outcome: Outcome
    reason: StudyReason | None = None

    def __post_init__(self):
        if (self.outcome is Outcome.NEEDS_STUDY) != (self.reason is not None):
            raise ValueError("reason is carried exactly by needs-study")


@dataclass(frozen=True)
class IntersectionReport:
    """Aggregated verdicts; only non-disjoint pairs are retained."""
    total_pairs: int
    counts: dict
    pairs: tuple

    @property
    def clean(self) -> bool:
        """No intersections and no unresolved cases."""
        return (self.counts[Outcome.INTERSECTS] == 0
                and self.counts[Outcome.NEEDS_STUDY] == 0)

    def to_json_dict(self) -> dict:
        return {
            "total_pairs": self.total_pairs,
            "counts": {o.value: c for o, c in self.counts.items()},
            "clean": self.clean,
            "pairs": [
                {
                    "face": list(v.face),
                    "edge": list(v.edge),
                    "outcome": v.outcome.value,
                    **({"reason": v.reason.value} if v.reason else {}),
                }
                for v in self.pairs
            ],
        }

    def to_json(self, indent=None) -> str:
        return json.dumps(self.to_json_dict(), indent=indent)


def segment_triangle_verdict(triangle, segment, shared: int):
    """Outcome for one closed triangle against one closed segment.

    `shared` is the number of vertices the pair has in common in the
    mesh combinatorics (never inferred geometrically).  When shared is
    1, the shared endpoint must come first in `segment`; its plane
    determinant is zero structurally and is not evaluated.

    Returns (Outcome, StudyReason | None).
    """
    y1, y2, y3 = triangle
    z1, z2 = segment
    if shared >= 2:
        return Outcome.SKIPPED_INCIDENT_SIDE, None

    if shared == 1:
        s2 = en.sign(geo.oriented_volume6(y1, y2, y3, z2))
        if s2 != 0:
            return Outcome.DISJOINT, None
        return Outcome.NEEDS_STUDY, StudyReason.COPLANAR_INCIDENT

    d1 = en.sign(geo.oriented_volume6(y1, y2, y3, z1))
    d2 = en.sign(geo.oriented_volume6(y1, y2, y3, z2))
    if d1 == 0 or d2 == 0:
        return Outcome.NEEDS_STUDY, StudyReason.ZERO_PLANE_DET
    if d1 == d2:
        return Outcome.DISJOINT, None
    e1 = en.sign(geo.oriented_volume6(z1, z2, y1, y2))
    e2 = en.sign(geo.oriented_volume6(z1, z2, y2, y3))
    e3 = en.sign(geo.oriented_volume6(z1, z2, y3, y1))
    if e1 == 0 or e2 == 0 or e3 == 0:
        return Outcome.NEEDS_STUDY, StudyReason.ZERO_LINK_DET
    if e1 == e2 == e3:
        return Outcome.INTERSECTS, None
    return Outcome.DISJOINT, None


def _interval_box(points, bits=64):
    los, his = [], []
    for axis in ("x", "y", "z"):
        ivs = [getattr(p, axis).interval(bits) for p in points]
        los.append(min(iv.lower for iv in ivs))
        his.append(max(iv.upper for iv in ivs))
    return los, his


def _boxes_disjoint(a, b) -> bool:
    (alo, ahi), (blo, bhi) = a, b
    return any(ahi[i] < blo[i] or bhi[i] < alo[i] for i in range(3))


def self_intersection_report(m: Mesh, prefilter: bool = False,
                             pair_order=None) -> IntersectionReport:
    """Classify every (face, edge) pair of the mesh.

    Pairs are enumerated lexicographically by (face index, edge index)
    unless an explicit `pair_order` of index pairs is given; the verdict
    set does not depend on the order.  `prefilter` skips pairs whose
    interval bounding boxes are certifiably separated (the verdict for
    such pairs is disjoint by a sound but different route, so it is off
    by default to keep verdict provenance uniform).
    """
    faces = m.faces
    edges = m.edges
    positions = [pos for _, pos in m.vertices]
    if pair_order is None:
        pair_order = ((fi, ei) for fi in range(len(faces))
                      for ei in range(len(edges)))

    face_boxes = edge_boxes = None
    if prefilter:
        face_boxes = [_interval_box([positions[v] for v in f]) for f in faces]
        edge_boxes = [_interval_box([positions[v] for v in e]) for e in edges]

    counts = {o: 0 for o in Outcome}
    kept = []
    total = 0
    for fi, ei in pair_order:
        total += 1
        face = faces[fi]
        edge = edges[ei]
        shared = len(set(face) & set(edge))
        if shared == 0 and prefilter and \
                _boxes_disjoint(face_boxes[fi], edge_boxes[ei]):
            counts[Outcome.DISJOINT] += 1
            continue
        seg = edge if shared != 1 else (
            edge if edge[0] in face else (edge[1], edge[0]))
        outcome, reason = segment_triangle_verdict(
            [positions[v] for v in face], [positions[v] for v in seg],
            shared)
        counts[outcome] += 1
        if outcome is not Outcome.DISJOINT:
            kept.append(PairVerdict(m.face_names(face), m.edge_names(edge),
                                    outcome, reason))
    return IntersectionReport(total_pairs=total, counts=counts,
                              pairs=tuple(kept))
