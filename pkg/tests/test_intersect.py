import random
from fractions import Fraction

import pytest

from flexipoly.constructions import (
    build_bricard_from_steffen,
    build_modified_steffen,
    build_steffen,
)
from flexipoly.geometry import point
from flexipoly.intersect import (
    Outcome,
    StudyReason,
    segment_triangle_verdict,
    self_intersection_report,
)


# -- rational brute-force oracle ----------------------------------------------

def _sub(p, q):
    return tuple(a - b for a, b in zip(p, q))


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0])


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def _orient2d(a, b, c):
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _project(p, axis):
    return tuple(c for i, c in enumerate(p) if i != axis)


def _point_in_triangle_2d(p, tri):
    s1 = _orient2d(tri[0], tri[1], p)
    s2 = _orient2d(tri[1], tri[2], p)
    s3 = _orient2d(tri[2], tri[0], p)
    has_neg = any(s < 0 for s in (s1, s2, s3))
    has_pos = any(s > 0 for s in (s1, s2, s3))
    return not (has_neg and has_pos)


def _on_segment_2d(p, a, b):
    if _orient2d(a, b, p) != 0:
        return False
    return (min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))


def _segments_intersect_2d(p1, p2, q1, q2):
    d1 = _orient2d(q1, q2, p1)
    d2 = _orient2d(q1, q2, p2)
    d3 = _orient2d(p1, p2, q1)
    d4 = _orient2d(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0) and d1 != 0 and d2 != 0
            and (d3 > 0) != (d4 > 0) and d3 != 0 and d4 != 0):
        return True
    return (_on_segment_2d(p1, q1, q2) or _on_segment_2d(p2, q1, q2)
            or _on_segment_2d(q1, p1, p2) or _on_segment_2d(q2, p1, p2))


def segment_triangle_oracle(tri, seg):
    """Closed segment vs closed triangle, exact Fraction arithmetic."""
    a, b, c = tri
    z1, z2 = seg
    n = _cross(_sub(b, a), _sub(c, a))
    assert any(n), "degenerate triangle handed to the oracle"
    axis = max(range(3), key=lambda i: abs(n[i]))
    tri2 = [_project(p, axis) for p in tri]

    def in_triangle_3d(p):
        if _dot(n, _sub(p, a)) != 0:
            return False
        return _point_in_triangle_2d(_project(p, axis), tri2)

    d1 = _dot(n, _sub(z1, a))
    d2 = _dot(n, _sub(z2, a))
    if d1 == 0 and d2 == 0:
        # coplanar: endpoint inside, or the segment crosses a side
        p1, p2 = _project(z1, axis), _project(z2, axis)
        if _point_in_triangle_2d(p1, tri2) or _point_in_triangle_2d(p2, tri2):
            return True
        return any(_segments_intersect_2d(p1, p2, tri2[i], tri2[(i + 1) % 3])
                   for i in range(3))
    if d1 == 0:
        return in_triangle_3d(z1)
    if d2 == 0:
        return in_triangle_3d(z2)
    if (d1 > 0) == (d2 > 0):
        return False
    t = d1 / (d1 - d2)
    hit = tuple(z1[i] + t * (z2[i] - z1[i]) for i in range(3))
    return _point_in_triangle_2d(_project(hit, axis), tri2)


def fr_point(p):
    return point(*p)


TRI = [(Fraction(0), Fraction(0), Fraction(0)),
       (Fraction(4), Fraction(0), Fraction(0)),
       (Fraction(0), Fraction(4), Fraction(0))]


def verdict(tri, seg, shared):
    return segment_triangle_verdict([fr_point(p) for p in tri],
                                    [fr_point(p) for p in seg], shared)


def test_interior_crossing_detected():
    seg = [(1, 1, -1), (1, 1, 1)]
    assert verdict(TRI, seg, 0) == (Outcome.INTERSECTS, None)
    assert segment_triangle_oracle(TRI, [tuple(map(Fraction, p))
                                         for p in seg])


def test_same_side_disjoint():
    seg = [(10, 10, 1), (10, 10, 2)]
    assert verdict(TRI, seg, 0) == (Outcome.DISJOINT, None)


def test_opposite_sides_but_unlinked_disjoint():
    seg = [(10, 10, -1), (10, 10, 1)]
    assert verdict(TRI, seg, 0) == (Outcome.DISJOINT, None)


def test_shared_vertex_out_of_plane_disjoint():
    seg = [(0, 0, 0), (1, 1, 5)]
    assert verdict(TRI, seg, 1) == (Outcome.DISJOINT, None)


def test_shared_vertex_coplanar_needs_study():
    seg = [(0, 0, 0), (-3, -5, 0)]
    assert verdict(TRI, seg, 1) == (Outcome.NEEDS_STUDY,
                                    StudyReason.COPLANAR_INCIDENT)


def test_zero_plane_det_needs_study():
    seg = [(1, 1, 0), (1, 1, 3)]
    assert verdict(TRI, seg, 0) == (Outcome.NEEDS_STUDY,
                                    StudyReason.ZERO_PLANE_DET)


def test_zero_link_det_needs_study():
    seg = [(0, 0, -1), (0, 0, 1)]
    assert verdict(TRI, seg, 0) == (Outcome.NEEDS_STUDY,
                                    StudyReason.ZERO_LINK_DET)


def test_incident_side_skipped():
    seg = [(0, 0, 0), (4, 0, 0)]
    assert verdict(TRI, seg, 2) == (Outcome.SKIPPED_INCIDENT_SIDE, None)


def rand_frac(rng, span=8, den=4):
    return Fraction(rng.randint(-span * den, span * den), den)


def test_verdicts_match_oracle_on_random_pairs():
    rng = random.Random(2718281828)
    disagreements = 0
    studied = 0
    checked = 0
    for _ in range(1000):
        tri = [tuple(rand_frac(rng) for _ in range(3)) for _ in range(3)]
        n = _cross(_sub(tri[1], tri[0]), _sub(tri[2], tri[0]))
        if not any(n):
            continue
        seg = [tuple(rand_frac(rng) for _ in range(3)) for _ in range(2)]
        if seg[0] == seg[1]:
            continue
        outcome, _ = verdict(tri, seg, 0)
        if outcome is Outcome.NEEDS_STUDY:
            studied += 1
            continue
        checked += 1
        want = segment_triangle_oracle(tri, seg)
        got = outcome is Outcome.INTERSECTS
        if got != want:
            disagreements += 1
    assert disagreements == 0
    assert checked >= 900
    assert studied < 100


def test_modified_steffen_clean():
    report = self_intersection_report(build_modified_steffen())
    assert report.total_pairs == 14 * 21
    assert report.counts[Outcome.INTERSECTS] == 0
    assert report.counts[Outcome.NEEDS_STUDY] == 0
    assert report.clean


def test_steffen_clean():
    report = self_intersection_report(build_steffen())
    assert report.total_pairs == 294
    assert report.clean


def test_bricard_octahedron_self_intersects():
    report = self_intersection_report(build_bricard_from_steffen())
    assert report.total_pairs == 8 * 12
    assert report.counts[Outcome.INTERSECTS] >= 1
    assert not report.clean


def test_bricard_intersections_respect_half_turn_symmetry():
    # the octahedron is invariant under its axial half turn, which swaps
    # A1/A2, B1/B2 and C1/C2; the intersecting pairs must map to each other
    swap = {"A1": "A2", "A2": "A1", "B1": "B2", "B2": "B1",
            "C1": "C2", "C2": "C1"}
    report = self_intersection_report(build_bricard_from_steffen())
    hits = {(frozenset(v.face), frozenset(v.edge)) for v in report.pairs
            if v.outcome is Outcome.INTERSECTS}
    mapped = {(frozenset(swap[n] for n in f), frozenset(swap[n] for n in e))
              for f, e in hits}
    assert mapped == hits


def test_report_order_independence():
    m = build_bricard_from_steffen()
    base = self_intersection_report(m)
    order = [(fi, ei) for fi in range(len(m.faces))
             for ei in range(len(m.edges))]
    rng = random.Random(5)
    rng.shuffle(order)
    shuffled = self_intersection_report(m, pair_order=order)
    assert shuffled.total_pairs == base.total_pairs
    assert shuffled.counts == base.counts
    assert set(shuffled.pairs) == set(base.pairs)


def test_prefilter_preserves_counts():
    m = build_modified_steffen()
    base = self_intersection_report(m)
    fast = self_intersection_report(m, prefilter=True)
    assert fast.counts[Outcome.INTERSECTS] == base.counts[Outcome.INTERSECTS]
    assert fast.counts[Outcome.NEEDS_STUDY] == base.counts[Outcome.NEEDS_STUDY]
    assert fast.total_pairs == base.total_pairs


def test_report_json_shape():
    report = self_intersection_report(build_bricard_from_steffen())
    data = report.to_json_dict()
    assert data["total_pairs"] == 96
    assert data["counts"]["intersects"] >= 1
    assert any(rec["outcome"] == "intersects" for rec in data["pairs"])
