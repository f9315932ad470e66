"""Triangle meshes with explicit vertex, edge and face lists.

Edges are stored explicitly rather than derived from faces: the gluing
pipeline deletes face-interior segments that would otherwise be inferred
as edges, so the edge list is part of the data, not a view.  Meshes are
immutable after construction; all queries are pure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import exactnum as en
from . import geometry as geo
from .exactnum import parse_expr, sign, to_decimal, to_expr_string
from .geometry import Point3, Vec3


class MeshError(ValueError):
    """Structural invariant violated while building a mesh."""


class PositionMismatch(MeshError):
    """Vertices to be identified do not coincide exactly."""


class NoSharedFace(MeshError):
    """A gluing identification produced no coincident faces."""


class NonOrthogonalMatrix(ValueError):
    """Rotation matrix failed the exact orthogonality check."""


@dataclass(frozen=True)
class ValidationReport:
    vertex_count: int
    edge_count: int
    face_count: int
    euler_characteristic: int
    nonmanifold_edges: tuple
    closed: bool
    orientable: bool | None


class Mesh:
    """Vertex positions plus explicit edge and face combinatorics.

    Vertices are (name, Point3) pairs in a fixed order; edges and faces
    are unordered index pairs/triples.  Every side of every face must be
    listed as an edge; an edge need not bound a face only transiently
    inside the gluing machinery.
    """

    __slots__ = ("_vertices", "_index", "_edges", "_faces",
                 "_edge_set", "_face_set")

    def __init__(self, vertices, edges, faces):
        self._vertices = tuple((str(name), pos) for name, pos in vertices)
        self._index = {}
        for i, (name, pos) in enumerate(self._vertices):
            if name in self._index:
                raise MeshError(f"duplicate vertex name {name!r}")
            if not isinstance(pos, Point3):
                raise MeshError(f"vertex {name!r} position is not a Point3")
            self._index[name] = i
        n = len(self._vertices)

        norm_edges = set()
        for e in edges:
            i, j = (self._as_id(v) for v in e)
            if i == j:
                raise MeshError(f"edge with repeated vertex {e!r}")
            if not (0 <= i < n and 0 <= j < n):
                raise MeshError(f"edge {e!r} references unknown vertex")
            norm_edges.add((min(i, j), max(i, j)))
        self._edges = tuple(sorted(norm_edges))
        self._edge_set = frozenset(self._edges)

        norm_faces = set()
        for f in faces:
            ids = tuple(sorted(self._as_id(v) for v in f))
            if len(set(ids)) != 3:
                raise MeshError(f"face with repeated vertex {f!r}")
            norm_faces.add(ids)
        self._faces = tuple(sorted(norm_faces))
        self._face_set = frozenset(self._faces)

        for f in self._faces:
            for side in _face_sides(f):
                if side not in self._edge_set:
                    raise MeshError(
                        f"face {self.face_names(f)} side not in edge list")

    def _as_id(self, v) -> int:
        if isinstance(v, str):
            try:
                return self._index[v]
            except KeyError:
                raise MeshError(f"unknown vertex name {v!r}") from None
        return int(v)

    # -- queries -----------------------------------------------------------

    @property
    def vertex_names(self):
        return tuple(name for name, _ in self._vertices)

    @property
    def vertices(self):
        return self._vertices

    @property
    def edges(self):
        return self._edges

    @property
    def faces(self):
        return self._faces

    def position(self, name: str) -> Point3:
        return self._vertices[self._index[name]][1]

    def name_of(self, vid: int) -> str:
        return self._vertices[vid][0]

    def edge_names(self, edge) -> tuple:
        return tuple(self.name_of(v) for v in edge)

    def face_names(self, face) -> tuple:
        return tuple(self.name_of(v) for v in face)

    def has_edge(self, a: str, b: str) -> bool:
        i, j = self._index[a], self._index[b]
        return (min(i, j), max(i, j)) in self._edge_set

    def has_face(self, a: str, b: str, c: str) -> bool:
        ids = tuple(sorted(self._index[v] for v in (a, b, c)))
        return ids in self._face_set

    def faces_of_edge(self, edge) -> tuple:
        i, j = edge
        return tuple(f for f in self._faces if i in f and j in f)

    def edge_lengths(self) -> dict:
        """Exact squared edge lengths keyed by name pair, edge order."""
        out = {}
        for i, j in self._edges:
            key = (self.name_of(i), self.name_of(j))
            out[key] = geo.squared_distance(self._vertices[i][1],
                                            self._vertices[j][1])
        return out

    # -- validation ----------------------------------------------------------

    def validate(self) -> ValidationReport:
        """Counts, Euler characteristic, manifoldness and closedness."""
        incidence = {e: [] for e in self._edges}
        for f in self._faces:
            for side in _face_sides(f):
                incidence[side].append(f)
        bad = tuple(self.edge_names(e) for e, fs in incidence.items()
                    if len(fs) != 2)
        closed = not bad and len(self._vertices) > 0
        if closed:
            for vid in range(len(self._vertices)):
                if not self._vertex_link_is_cycle(vid, incidence):
                    closed = False
                    break
        orientable = self._orientable(incidence) if not bad else None
        return ValidationReport(
            vertex_count=len(self._vertices),
            edge_count=len(self._edges),
            face_count=len(self._faces),
            euler_characteristic=(len(self._vertices) - len(self._edges)
                                  + len(self._faces)),
            nonmanifold_edges=bad,
            closed=closed,
            orientable=orientable,
        )

    def _vertex_link_is_cycle(self, vid, incidence) -> bool:
        faces_v = [f for f in self._faces if vid in f]
        if not faces_v:
            return False
        edges_v = [e for e in self._edges if vid in e]
        if len(edges_v) != len(faces_v):
            return False
        # walk the umbrella: faces adjacent when they share an edge at vid
        adj = {id(f): [] for f in faces_v}
        for e in edges_v:
            fs = [f for f in incidence[e] if vid in f]
            if len(fs) != 2:
                return False
            adj[id(fs[0])].append(fs[1])
            adj[id(fs[1])].append(fs[0])
        seen = set()
        stack = [faces_v[0]]
        while stack:
            f = stack.pop()
            if id(f) in seen:
                continue
            seen.add(id(f))
            stack.extend(adj[id(f)])
        return len(seen) == len(faces_v)

    def _orientable(self, incidence) -> bool:
        orientation = {}
        for seed in self._faces:
            if seed in orientation:
                continue
            orientation[seed] = (seed[0], seed[1], seed[2])
            stack = [seed]
            while stack:
                f = stack.pop()
                cyc = orientation[f]
                directed = {(cyc[0], cyc[1]), (cyc[1], cyc[2]),
                            (cyc[2], cyc[0])}
                for side in _face_sides(f):
                    for g in incidence[side]:
                        if g is f:
                            continue
                        want_dir = (side[1], side[0]) \
                            if side in directed else side
                        cand = _orient_face_with(g, want_dir)
                        if g in orientation:
                            if set(_directed_sides(orientation[g])) != \
                                    set(_directed_sides(cand)):
                                return False
                        else:
                            orientation[g] = cand
                            stack.append(g)
        return True

    # -- transforms ----------------------------------------------------------

    def apply_isometry(self, rot, translation: Vec3 | None = None) -> "Mesh":
        """Transform positions by an exact orthogonal matrix plus shift."""
        _check_orthogonal(rot)
        shift = translation if translation is not None else geo.ZERO_VEC
        new_vertices = [
            (name, geo.apply_matrix(rot, pos).translated(shift))
            for name, pos in self._vertices
        ]
        return Mesh(new_vertices, self._edges, self._faces)

    def renamed(self, mapping) -> "Mesh":
        """Rename vertices; mapping may be a dict or a name function."""
        if isinstance(mapping, dict):
            fn = lambda name: mapping.get(name, name)  # noqa: E731
        else:
            fn = mapping
        new_vertices = [(fn(name), pos) for name, pos in self._vertices]
        return Mesh(new_vertices, self._edges, self._faces)

    # -- serialization ---------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "vertices": [
                {"name": name,
                 "x": to_expr_string(pos.x),
                 "y": to_expr_string(pos.y),
                 "z": to_expr_string(pos.z)}
                for name, pos in self._vertices
            ],
            "edges": [list(self.edge_names(e)) for e in self._edges],
            "faces": [list(self.face_names(f)) for f in self._faces],
        }

    def to_json(self, indent=None) -> str:
        return json.dumps(self.to_json_dict(), indent=indent)

    def to_obj(self, digits: int = 12) -> str:
        """OBJ text with truncated decimal positions, consistent winding."""
        lines = [f"# flexipoly mesh export; coordinates truncated "
                 f"to {digits} digits"]
        for name, pos in self._vertices:
            coords = " ".join(to_decimal(c, digits)
                              for c in (pos.x, pos.y, pos.z))
            lines.append(f"v {coords}")
        for f in self._oriented_faces():
            lines.append("f " + " ".join(str(v + 1) for v in f))
        return "\n".join(lines) + "\n"

    def _oriented_faces(self):
        incidence = {e: [] for e in self._edges}
        for f in self._faces:
            for side in _face_sides(f):
                incidence[side].append(f)
        orientation = {}
        for seed in self._faces:
            if seed in orientation:
                continue
            orientation[seed] = (seed[0], seed[1], seed[2])
            stack = [seed]
            while stack:
                f = stack.pop()
                directed = set(_directed_sides(orientation[f]))
                for side in _face_sides(f):
                    for g in incidence[side]:
                        if g is f or g in orientation:
                            continue
                        want_dir = (side[1], side[0]) \
                            if side in directed else side
                        orientation[g] = _orient_face_with(g, want_dir)
                        stack.append(g)
        return [orientation[f] for f in self._faces]


def _face_sides(face):
    i, j, k = face
    return ((i, j), (i, k), (j, k))


def _directed_sides(cycle):
    a, b, c = cycle
    return ((a, b), (b, c), (c, a))


def _orient_face_with(face, directed_edge):
    """Cyclic order of `face` containing the given directed edge."""
    a, b = directed_edge
    (c,) = set(face) - {a, b}
    return (a, b, c)


def _check_orthogonal(rot):
    if len(rot) != 3 or any(len(row) != 3 for row in rot):
        raise NonOrthogonalMatrix("matrix is not 3x3")
    rows = [[en._coerce(entry) for entry in row] for row in rot]
    for i in range(3):
        for j in range(i, 3):
            acc = en.rational(0)
            for k in range(3):
                acc = acc + rows[k][i] * rows[k][j]
            expected = 1 if i == j else 0
            if sign(acc - expected) != 0:
                raise NonOrthogonalMatrix(
                    f"column product ({i},{j}) differs from identity")


def positions_equal(p: Point3, q: Point3) -> bool:
    return all(sign(a - b) == 0 for a, b in
               ((p.x, q.x), (p.y, q.y), (p.z, q.z)))


def _merge(vertices, edges, faces_a, faces_b, rename):
    """Shared gluing core over index-level combinatorics.

    `rename` maps old indices into the merged vertex list; faces present
    in both inputs after renaming are deleted in pairs, and edges left
    without any face are dropped.
    """
    def face_key(f, side):
        return tuple(sorted(rename[side][v] for v in f))

    kept = []
    from_a = {face_key(f, 0) for f in faces_a}
    from_b = {face_key(f, 1) for f in faces_b}
    if len(from_a) != len(faces_a) or len(from_b) != len(faces_b):
        raise MeshError("identification collapses two faces of one input")
    deleted = from_a & from_b
    if not deleted:
        raise NoSharedFace("no coincident faces to glue along")
    kept = sorted((from_a | from_b) - deleted)

    merged_edges = set()
    for side, edge_list in enumerate(edges):
        for i, j in edge_list:
            a, b = rename[side][i], rename[side][j]
            if a == b:
                raise MeshError("identification collapses an edge")
            merged_edges.add((min(a, b), max(a, b)))
    used = set()
    for f in kept:
        used.update(_face_sides(f))
    merged_edges = {e for e in merged_edges if e in used}

    return Mesh(vertices, sorted(merged_edges), kept)


def glue(a: Mesh, b: Mesh, identify: dict) -> Mesh:
    """Glue two meshes, merging `identify`ed b-vertices into a-vertices.

    Identified vertices must coincide exactly (each coordinate difference
    has sign zero).  Faces that coincide after identification are removed
    from both sides, realizing the deletion of glued faces; edges left
    with no incident face disappear with them.
    """
    for b_name, a_name in identify.items():
        if not positions_equal(b.position(b_name), a.position(a_name)):
            raise PositionMismatch(
                f"vertices {b_name!r} and {a_name!r} do not coincide")

    merged = list(a.vertices)
    index = {name: i for i, (name, _) in enumerate(merged)}
    rename_b = {}
    for i, (name, pos) in enumerate(b.vertices):
        if name in identify:
            rename_b[i] = index[identify[name]]
        else:
            if name in index:
                raise MeshError(
                    f"vertex name {name!r} exists in both meshes "
                    f"but is not identified")
            rename_b[i] = len(merged)
            index[name] = len(merged)
            merged.append((name, pos))
    rename_a = {i: i for i in range(len(a.vertices))}
    return _merge(merged, (a.edges, b.edges), a.faces, b.faces,
                  (rename_a, rename_b))


def glue_self(m: Mesh, identify: dict) -> Mesh:
    """Glue a mesh to itself by merging each key vertex into its value."""
    for src, dst in identify.items():
        if dst in identify:
            raise MeshError("chained self-identification")
        if not positions_equal(m.position(src), m.position(dst)):
            raise PositionMismatch(
                f"vertices {src!r} and {dst!r} do not coincide")

    keep = [(name, pos) for name, pos in m.vertices if name not in identify]
    index = {name: i for i, (name, _) in enumerate(keep)}
    rename = {}
    for i, (name, _) in enumerate(m.vertices):
        rename[i] = index[identify.get(name, name)]

    # self-gluing deletes faces that become pairwise identical
    counted = {}
    for f in m.faces:
        key = tuple(sorted(rename[v] for v in f))
        if len(set(key)) != 3:
            raise MeshError("identification collapses a face")
        counted[key] = counted.get(key, 0) + 1
    if any(c > 2 for c in counted.values()):
        raise MeshError("more than two faces coincide under identification")
    kept = sorted(k for k, c in counted.items() if c == 1)
    if len(kept) == len(counted):
        raise NoSharedFace("no coincident faces to glue along")

    merged_edges = set()
    for i, j in m.edges:
        a, b = rename[i], rename[j]
        if a == b:
            raise MeshError("identification collapses an edge")
        merged_edges.add((min(a, b), max(a, b)))
    used = set()
    for f in kept:
        used.update(_face_sides(f))
    merged_edges = {e for e in merged_edges if e in used}
    return Mesh(keep, sorted(merged_edges), kept)


def from_json_dict(data: dict, memo: dict | None = None) -> Mesh:
    """Rebuild a mesh from the JSON format; one shared parse memo."""
    memo = {} if memo is None else memo
    vertices = []
    for rec in data["vertices"]:
        pos = Point3(parse_expr(rec["x"], memo),
                     parse_expr(rec["y"], memo),
                     parse_expr(rec["z"], memo))
        vertices.append((rec["name"], pos))
    return Mesh(vertices, [tuple(e) for e in data["edges"]],
                [tuple(f) for f in data["faces"]])


def from_json(text: str) -> Mesh:
    return from_json_dict(json.loads(text))
