import pytest

from flexipoly import mesh as meshmod
from flexipoly.exactnum import rational, sign
from flexipoly.geometry import point
from flexipoly.mesh import (
    Mesh,
    MeshError,
    NonOrthogonalMatrix,
    NoSharedFace,
    PositionMismatch,
    from_json,
    glue,
    glue_self,
)


def unit_tetra():
    return Mesh(
        [("a", point(0, 0, 0)), ("b", point(1, 0, 0)),
         ("c", point(0, 1, 0)), ("d", point(0, 0, 1))],
        [("a", "b"), ("a", "c"), ("a", "d"),
         ("b", "c"), ("b", "d"), ("c", "d")],
        [("a", "b", "c"), ("a", "b", "d"), ("a", "c", "d"), ("b", "c", "d")],
    )


def test_invariants_enforced():
    with pytest.raises(MeshError):
        Mesh([("a", point(0, 0, 0)), ("a", point(1, 0, 0))], [], [])
    with pytest.raises(MeshError):
        Mesh([("a", point(0, 0, 0))], [("a", "a")], [])
    with pytest.raises(MeshError):
        # face side missing from the edge list
        Mesh([("a", point(0, 0, 0)), ("b", point(1, 0, 0)),
              ("c", point(0, 1, 0))],
             [("a", "b")], [("a", "b", "c")])


def test_validate_tetrahedron():
    report = unit_tetra().validate()
    assert (report.vertex_count, report.edge_count,
            report.face_count) == (4, 6, 4)
    assert report.euler_characteristic == 2
    assert report.closed
    assert report.orientable
    assert report.nonmanifold_edges == ()


def test_validate_single_triangle():
    m = Mesh([("a", point(0, 0, 0)), ("b", point(1, 0, 0)),
              ("c", point(0, 1, 0))],
             [("a", "b"), ("a", "c"), ("b", "c")],
             [("a", "b", "c")])
    report = m.validate()
    assert report.euler_characteristic == 1
    assert not report.closed
    assert len(report.nonmanifold_edges) == 3


def test_edge_lengths_deterministic_order():
    m = unit_tetra()
    lengths = m.edge_lengths()
    assert list(lengths) == [("a", "b"), ("a", "c"), ("a", "d"),
                             ("b", "c"), ("b", "d"), ("c", "d")]
    assert sign(lengths[("a", "b")] - 1) == 0
    assert sign(lengths[("b", "c")] - 2) == 0


def test_apply_isometry_identity_and_lengths():
    m = unit_tetra()
    ident = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    same = m.apply_isometry(ident)
    for name in m.vertex_names:
        assert meshmod.positions_equal(same.position(name), m.position(name))
    rot = ((0, -1, 0), (1, 0, 0), (0, 0, 1))
    turned = m.apply_isometry(rot)
    before = m.edge_lengths()
    after = turned.edge_lengths()
    for key in before:
        assert sign(before[key] - after[key]) == 0


def test_apply_isometry_rejects_nonorthogonal():
    with pytest.raises(NonOrthogonalMatrix):
        unit_tetra().apply_isometry(((1, 0, 0), (0, 2, 0), (0, 0, 1)))


def test_glue_two_tetrahedra():
    a = unit_tetra()
    b = Mesh(
        [("p", point(1, 0, 0)), ("q", point(0, 1, 0)),
         ("r", point(0, 0, 1)), ("s", point(1, 1, 1))],
        [("p", "q"), ("p", "r"), ("p", "s"),
         ("q", "r"), ("q", "s"), ("r", "s")],
        [("p", "q", "r"), ("p", "q", "s"), ("p", "r", "s"), ("q", "r", "s")],
    )
    # b's face (p, q, r) coincides with a's (b, c, d)
    g = glue(a, b, {"p": "b", "q": "c", "r": "d"})
    rep = g.validate()
    assert (rep.vertex_count, rep.edge_count, rep.face_count) == (5, 9, 6)
    assert rep.closed
    assert rep.euler_characteristic == 2


def test_glue_position_mismatch():
    a = unit_tetra()
    b = unit_tetra().renamed(lambda n: n + "2")
    shifted = b.apply_isometry(((1, 0, 0), (0, 1, 0), (0, 0, 1)),
                               translation=__import__(
                                   "flexipoly.geometry",
                                   fromlist=["vector"]).vector(1, 0, 0))
    with pytest.raises(PositionMismatch):
        glue(a, shifted, {"a2": "a", "b2": "b", "c2": "c"})


def test_glue_requires_shared_face():
    a = unit_tetra()
    b = unit_tetra().renamed(lambda n: n + "2")
    with pytest.raises(NoSharedFace):
        glue(a, b, {"a2": "a"})


def test_glue_copy_along_all_faces_empties():
    a = unit_tetra()
    b = unit_tetra().renamed(lambda n: n + "2")
    g = glue(a, b, {"a2": "a", "b2": "b", "c2": "c", "d2": "d"})
    assert g.faces == ()
    assert g.edges == ()
    assert g.validate().vertex_count == 4


def test_glue_self_merges_and_deletes():
    # two tetrahedra sharing positions of a face, built as one mesh with
    # duplicate vertices, then self-glued
    a = unit_tetra()
    verts = list(a.vertices) + [
        ("b2", point(1, 0, 0)), ("c2", point(0, 1, 0)),
        ("d2", point(0, 0, 1)), ("s", point(1, 1, 1))]
    edges = list(a.edges) + [("b2", "c2"), ("b2", "d2"), ("b2", "s"),
                             ("c2", "d2"), ("c2", "s"), ("d2", "s")]
    faces = list(a.faces) + [("b2", "c2", "d2"), ("b2", "c2", "s"),
                             ("b2", "d2", "s"), ("c2", "d2", "s")]
    m = Mesh(verts, edges, faces)
    g = glue_self(m, {"b2": "b", "c2": "c", "d2": "d"})
    rep = g.validate()
    assert (rep.vertex_count, rep.edge_count, rep.face_count) == (5, 9, 6)
    assert rep.closed


def test_json_round_trip():
    m = unit_tetra()
    again = from_json(m.to_json())
    assert again.vertex_names == m.vertex_names
    assert again.edges == m.edges
    assert again.faces == m.faces
    for name in m.vertex_names:
        assert meshmod.positions_equal(again.position(name),
                                       m.position(name))


def test_obj_export():
    text = unit_tetra().to_obj(digits=6)
    lines = text.strip().splitlines()
    assert lines[0].startswith("#") and "6 digits" in lines[0]
    assert sum(1 for ln in lines if ln.startswith("v ")) == 4
    faces = [ln for ln in lines if ln.startswith("f ")]
    assert len(faces) == 4
    # consistent winding: each undirected edge appears once per direction
    directed = []
    for ln in faces:
        a, b, c = (int(t) for t in ln.split()[1:])
        directed += [(a, b), (b, c), (c, a)]
    assert len(set(directed)) == len(directed)
    for (a, b) in directed:
        assert (b, a) in directed
