"""Builders for the flexible polyhedra and their exact coordinates.

The pipeline constructs a tetrahedron, glues a Bricard type-1 octahedron
to it, glues a second copy, and closes the surface by a self-gluing; the
same machinery with a long edge of squared length 334 instead of 289
yields the modified polyhedron, four rotated copies of which assemble
into the 26-vertex sphere.  All coordinates are exact; the coordinate
table literals are kept as regression anchors and cross-checked against
the trilateration path, which is authoritative.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import exactnum as en
from . import geometry as geo
from . import mesh as meshmod
from .exactnum import ConstructibleReal, parse_expr, rational, sign, sqrt
from .geometry import Point3, Vec3
from .mesh import Mesh, glue, glue_self


class CollinearBase(ValueError):
    """Trilateration base points are affinely dependent."""


class NegativeDiscriminant(ValueError):
    """Trilateration spheres have no real intersection."""


class ZeroDirection(ValueError):
    """Rotation axis direction is the zero vector."""


class DegenerateAxis(ValueError):
    """Half-turn axis for the octahedron cannot be determined."""


class OppositeSideMismatch(ValueError):
    """Boundary quadrilateral opposite sides differ in length."""


class BranchAmbiguous(ValueError):
    """A branch rule cannot distinguish the two trilateration solutions."""


# -- trilateration -----------------------------------------------------------


@dataclass(frozen=True)
class TrilaterationPair:
    """Both solutions of a three-sphere intersection.

    The two points are mirror images across the base plane; `degenerate`
    marks a doubled point (discriminant exactly zero).
    """
    first: Point3
    second: Point3
    degenerate: bool = False


def _pv(p: Point3) -> Vec3:
    return Vec3(p.x, p.y, p.z)


def trilaterate(p: Point3, q: Point3, r: Point3,
                d1sq, d2sq, d3sq) -> TrilaterationPair:
    """Solve |X-p|^2 = d1sq, |X-q|^2 = d2sq, |X-r|^2 = d3sq exactly.

    Subtracting equations pairwise leaves two linear constraints; the
    solutions are X0 +- sqrt(t2) * n for the plane point X0 satisfying
    n.(X0 - p) = 0, with n normal to the base plane.
    """
    d1sq, d2sq, d3sq = (en._coerce(d) for d in (d1sq, d2sq, d3sq))
    a = geo.sub(q, p)
    b = geo.sub(r, p)
    n = geo.cross(a, b)
    nn = geo.squared_norm(n)
    if sign(nn) == 0:
        raise CollinearBase("trilateration base points are collinear")
    half = rational(1, 2)
    c1 = (geo.dot(_pv(q), _pv(q)) - geo.dot(_pv(p), _pv(p))
          + d1sq - d2sq) * half
    c2 = (geo.dot(_pv(r), _pv(r)) - geo.dot(_pv(p), _pv(p))
          + d1sq - d3sq) * half
    c3 = geo.dot(n, _pv(p))
    x0 = _solve3((a, b, n), (c1, c2, c3), det=nn)
    t2 = (d1sq - geo.squared_distance(x0, p)) / nn
    s = sign(t2)
    if s < 0:
        raise NegativeDiscriminant("spheres do not intersect")
    if s == 0:
        return TrilaterationPair(x0, x0, degenerate=True)
    root = sqrt(t2)
    offset = n.scaled(root)
    return TrilaterationPair(x0.translated(offset),
                             x0.translated(-offset))


def _solve3(rows, rhs, det=None):
    """Cramer solve of a 3x3 system given as Vec3 rows."""
    r0, r1, r2 = rows
    if det is None:
        det = geo.dot(r0, geo.cross(r1, r2))
        if sign(det) == 0:
            raise CollinearBase("singular linear system")

    def det_with(col):
        cols = [
            (r0.x, r1.x, r2.x),
            (r0.y, r1.y, r2.y),
            (r0.z, r1.z, r2.z),
        ]
        cols[col] = rhs
        (a0, a1, a2), (b0, b1, b2), (c0, c1, c2) = cols
        return (a0 * (b1 * c2 - b2 * c1)
                - b0 * (a1 * c2 - a2 * c1)
                + c0 * (a1 * b2 - a2 * b1))

    return Point3(det_with(0) / det, det_with(1) / det, det_with(2) / det)


class BranchRule:
    """Selector between the two solutions of a trilateration."""

    def __init__(self, kind: str, ref: Point3 | None = None):
        self.kind = kind
        self.ref = ref

    @classmethod
    def largest_z(cls) -> "BranchRule":
        return cls("largest_z")

    @classmethod
    def smallest_z(cls) -> "BranchRule":
        return cls("smallest_z")

    @classmethod
    def nearest_to(cls, ref: Point3) -> "BranchRule":
        return cls("nearest_to", ref)

    def choose(self, pair: TrilaterationPair) -> Point3:
        if pair.degenerate:
            return pair.first
        if self.kind in ("largest_z", "smallest_z"):
            s = sign(pair.first.z - pair.second.z)
            if s == 0:
                raise BranchAmbiguous("solutions share the z-coordinate")
            want_first = (s > 0) == (self.kind == "largest_z")
            return pair.first if want_first else pair.second
        s = sign(geo.squared_distance(pair.first, self.ref)
                 - geo.squared_distance(pair.second, self.ref))
        if s == 0:
            raise BranchAmbiguous("solutions equidistant from reference")
        return pair.first if s < 0 else pair.second


def rotate_180_about_line(x: Point3, a: Point3, direction: Vec3) -> Point3:
    """Half-turn of x about the line through a with the given direction."""
    dd = geo.squared_norm(direction)
    if sign(dd) == 0:
        raise ZeroDirection("axis direction is zero")
    w = geo.sub(x, a)
    proj = direction.scaled(geo.dot(w, direction) / dd)
    return a.translated(proj.scaled(2) - w)


# -- rotations ---------------------------------------------------------------


def rotation_K():
    """Quarter turn about the z-axis taking the +x axis to +y."""
    r = rational
    return ((r(0), r(-1), r(0)),
            (r(1), r(0), r(0)),
            (r(0), r(0), r(1)))


def rotation_L():
    """Half turn about the diagonal line x = y, z = 0."""
    r = rational
    return ((r(0), r(1), r(0)),
            (r(1), r(0), r(0)),
            (r(0), r(0), r(-1)))


def apply_L(p: Point3) -> Point3:
    return Point3(p.y, p.x, -p.z)


def apply_K(p: Point3) -> Point3:
    return Point3(-p.y, p.x, p.z)


# -- coordinate table anchors ------------------------------------------------

_RHO = "(167*(1712315512948039256 + 297671463726717927*sqrt(31)))"
_W1 = "(237*(670333576 - 497644539*sqrt(31)))"
_W2 = "(3*(26431711823 - 892912093*sqrt(31)))"
_W3 = "(2798420941 - 176443707*sqrt(31))"

_A2X = f"({_W1}*sqrt(2) - 2*(200 - 33*sqrt(31))*sqrt({_RHO}))/1230304047998"
_A2Y = f"({_W2}*sqrt(2) + 2*sqrt({_RHO}))/15573468962"
_A2Z = f"(167*{_W3}*sqrt(2) + 22*sqrt({_RHO}))/(15573468962*sqrt(167))"
_B1X = f"({_W2}*sqrt(2) - 2*sqrt({_RHO}))/15573468962"
_B1Y = f"({_W1}*sqrt(2) + 2*(200 - 33*sqrt(31))*sqrt({_RHO}))/1230304047998"
_B1Z = f"(167*{_W3}*sqrt(2) - 22*sqrt({_RHO}))/(15573468962*sqrt(167))"

#: Exact closed forms of the 9 vertex coordinates of the modified
#: polyhedron, as expression strings (regression anchors; the
#: trilateration pipeline is the authoritative construction).
TABLE1_EXACT = {
    "T1": ("0", "0", "sqrt(167)/sqrt(2)"),
    "T2": ("0", "11/sqrt(2)", "0"),
    "T3": ("11/sqrt(2)", "0", "0"),
    "T4": ("0", "0", "-(sqrt(167)/sqrt(2))"),
    "C2": ("(11 + 3*sqrt(31))/(2*sqrt(2))",
           "(11 + 3*sqrt(31))/(2*sqrt(2))", "0"),
    "A2": (_A2X, _A2Y, _A2Z),
    "B1": (_B1X, _B1Y, _B1Z),
    "Ab2": (_B1Y, _B1X, f"-({_B1Z})"),
    "Bb1": (_A2Y, _A2X, f"-({_A2Z})"),
}

#: Two-digit truncated decimals from the same table.
TABLE1_APPROX = {
    "T1": ("0.00", "0.00", "9.13"),
    "T2": ("0.00", "7.77", "0.00"),
    "T3": ("7.77", "0.00", "0.00"),
    "T4": ("0.00", "0.00", "-9.13"),
    "C2": ("9.79", "9.79", "0.00"),
    "A2": ("-1.19", "8.89", "4.72"),
    "B1": ("2.79", "0.05", "-0.46"),
    "Ab2": ("0.05", "2.79", "0.46"),
    "Bb1": ("8.89", "-1.19", "-4.72"),
}

#: Approximate coordinates of all 26 vertices of the assembled sphere.
TABLE2_APPROX = {
    "T1": ("0.00", "0.00", "9.13"),
    "T2": ("0.00", "7.77", "0.00"),
    "T3": ("7.77", "0.00", "0.00"),
    "T4": ("0.00", "0.00", "-9.13"),
    "C2": ("9.79", "9.79", "0.00"),
    "A2": ("-1.19", "8.89", "4.72"),
    "B1": ("2.79", "0.05", "-0.46"),
    "Ab2": ("0.05", "2.79", "0.46"),
    "Bb1": ("8.89", "-1.19", "-4.72"),
    "T2'": ("-7.77", "0.00", "0.00"),
    "C2'": ("-9.79", "9.79", "0.00"),
    "A2'": ("-8.89", "-1.19", "4.72"),
    "B1'": ("-0.05", "2.79", "-0.46"),
    "Ab2'": ("-2.79", "0.05", "0.46"),
    "Bb1'": ("1.19", "8.89", "-4.72"),
    "T2''": ("0.00", "-7.77", "0.00"),
    "C2''": ("-9.79", "-9.79", "0.00"),
    "A2''": ("1.19", "-8.89", "4.72"),
    "B1''": ("-2.79", "-0.05", "-0.46"),
    "Ab2''": ("-0.05", "-2.79", "0.46"),
    "Bb1''": ("-8.89", "1.19", "-4.72"),
    "C2'''": ("9.79", "-9.79", "0.00"),
    "A2'''": ("8.89", "1.19", "4.72"),
    "B1'''": ("0.05", "-2.79", "-0.46"),
    "Ab2'''": ("2.79", "-0.05", "0.46"),
    "Bb1'''": ("-1.19", "-8.89", "-4.72"),
}

#: Which rotated copy each assembled vertex belongs to: name -> (base, k)
#: with position = K^k(base position).  T-vertices shared between copies
#: are listed under the smallest k that produces them.
TABLE2_COPIES = {}
for _k, _suffix in enumerate(("", "'", "''", "'''")):
    for _base in ("C2", "A2", "B1", "Ab2", "Bb1"):
        TABLE2_COPIES[_base + _suffix] = (_base, _k)
TABLE2_COPIES.update({
    "T1": ("T1", 0), "T2": ("T2", 0), "T3": ("T3", 0), "T4": ("T4", 0),
    "T2'": ("T2", 1), "T2''": ("T2", 2),
})

#: All 72 edges of the assembled sphere, row by row as printed
#: (four quarter-turn images per row, already-seen cells omitted).
TABLE3_EDGES = (
    ("T1", "T2"), ("T1", "T2'"), ("T1", "T2''"),
    ("T1", "T3"),
    ("T1", "A2"), ("T1", "A2'"), ("T1", "A2''"), ("T1", "A2'''"),
    ("T1", "B1"), ("T1", "B1'"), ("T1", "B1''"), ("T1", "B1'''"),
    ("T2", "T4"), ("T2'", "T4"), ("T2''", "T4"),
    ("T2", "C2"), ("T2'", "C2'"), ("T2''", "C2''"), ("T3", "C2'''"),
    ("T2", "A2"), ("T2'", "A2'"), ("T2''", "A2''"), ("T3", "A2'''"),
    ("T2", "Ab2"), ("T2'", "Ab2'"), ("T2''", "Ab2''"), ("T3", "Ab2'''"),
    ("T3", "T4"),
    ("T3", "C2"), ("T2", "C2'"), ("T2'", "C2''"), ("T2''", "C2'''"),
    ("T3", "B1"), ("T2", "B1'"), ("T2'", "B1''"), ("T2''", "B1'''"),
    ("T3", "Bb1"), ("T2", "Bb1'"), ("T2'", "Bb1''"), ("T2''", "Bb1'''"),
    ("T4", "Ab2"), ("T4", "Ab2'"), ("T4", "Ab2''"), ("T4", "Ab2'''"),
    ("T4", "Bb1"), ("T4", "Bb1'"), ("T4", "Bb1''"), ("T4", "Bb1'''"),
    ("C2", "A2"), ("C2'", "A2'"), ("C2''", "A2''"), ("C2'''", "A2'''"),
    ("C2", "B1"), ("C2'", "B1'"), ("C2''", "B1''"), ("C2'''", "B1'''"),
    ("C2", "Ab2"), ("C2'", "Ab2'"), ("C2''", "Ab2''"), ("C2'''", "Ab2'''"),
    ("C2", "Bb1"), ("C2'", "Bb1'"), ("C2''", "Bb1''"), ("C2'''", "Bb1'''"),
    ("A2", "B1"), ("A2'", "B1'"), ("A2''", "B1''"), ("A2'''", "B1'''"),
    ("Ab2", "Bb1"), ("Ab2'", "Bb1'"), ("Ab2''", "Bb1''"),
    ("Ab2'''", "Bb1'''"),
)

#: All 48 faces of the assembled sphere, row by row as printed.
TABLE4_FACES = (
    ("T1", "T2", "A2"), ("T1", "T2'", "A2'"), ("T1", "T2''", "A2''"),
    ("T1", "T3", "A2'''"),
    ("T1", "T3", "B1"), ("T1", "T2", "B1'"), ("T1", "T2'", "B1''"),
    ("T1", "T2''", "B1'''"),
    ("T1", "A2", "B1"), ("T1", "A2'", "B1'"), ("T1", "A2''", "B1''"),
    ("T1", "A2'''", "B1'''"),
    ("T2", "T4", "Ab2"), ("T2'", "T4", "Ab2'"), ("T2''", "T4", "Ab2''"),
    ("T3", "T4", "Ab2'''"),
    ("T2", "C2", "A2"), ("T2'", "C2'", "A2'"), ("T2''", "C2''", "A2''"),
    ("T3", "C2'''", "A2'''"),
    ("T2", "C2", "Ab2"), ("T2'", "C2'", "Ab2'"), ("T2''", "C2''", "Ab2''"),
    ("T3", "C2'''", "Ab2'''"),
    ("T3", "T4", "Bb1"), ("T2", "T4", "Bb1'"), ("T2'", "T4", "Bb1''"),
    ("T2''", "T4", "Bb1'''"),
    ("T3", "C2", "B1"), ("T2", "C2'", "B1'"), ("T2'", "C2''", "B1''"),
    ("T2''", "C2'''", "B1'''"),
    ("T3", "C2", "Bb1"), ("T2", "C2'", "Bb1'"), ("T2'", "C2''", "Bb1''"),
    ("T2''", "C2'''", "Bb1'''"),
    ("T4", "Ab2", "Bb1"), ("T4", "Ab2'", "Bb1'"), ("T4", "Ab2''", "Bb1''"),
    ("T4", "Ab2'''", "Bb1'''"),
    ("C2", "A2", "B1"), ("C2'", "A2'", "B1'"), ("C2''", "A2''", "B1''"),
    ("C2'''", "A2'''", "B1'''"),
    ("C2", "Ab2", "Bb1"), ("C2'", "Ab2'", "Bb1'"),
    ("C2''", "Ab2''", "Bb1''"), ("C2'''", "Ab2'''", "Bb1'''"),
)

#: Squared edge-length ledger shared by the original and modified builds;
#: the long edge T1T4 is 17^2 = 289 or 334 depending on the build.
EDGE_LENGTH_SQ_LEDGER = {
    ("T1", "T2"): 144, ("T1", "T3"): 144, ("T2", "T4"): 144,
    ("T3", "T4"): 144,
    ("T3", "B1"): 25, ("A2", "T2"): 25, ("T3", "Bb1"): 25, ("Ab2", "T2"): 25,
    ("B1", "T1"): 100, ("A2", "T1"): 100, ("T3", "C2"): 100,
    ("T2", "C2"): 100, ("Bb1", "T4"): 100, ("Ab2", "T4"): 100,
    ("B1", "A2"): 121, ("Bb1", "Ab2"): 121,
    ("B1", "C2"): 144, ("A2", "C2"): 144, ("Bb1", "C2"): 144,
    ("Ab2", "C2"): 144,
}

#: Squared radius of the driver circle.
GAMMA_RADIUS_SQ = Fraction(279, 4)


# -- tetrahedron and octahedron builders --------------------------------------


def _tetra_positions(long_edge_sq) -> dict:
    """Vertices of the tetrahedron in the symmetric frame.

    The long edge lies on the z-axis with midpoint at the origin; the
    two equatorial vertices sit in the z = 0 plane symmetric about the
    diagonal x = y, which carries the driver circle's center.
    """
    lsq = rational(Fraction(long_edge_sq))
    s2 = sqrt(rational(2))
    zc = sqrt(lsq) / 2
    asq = rational(144) - lsq / 4 - rational(121, 4)
    if sign(asq) <= 0:
        raise ValueError("long edge leaves no room for the equator")
    ux = sqrt(asq) / s2
    bx = rational(11, 2) / s2
    return {
        "T1": Point3(rational(0), rational(0), zc),
        "T2": Point3(ux - bx, ux + bx, rational(0)),
        "T3": Point3(ux + bx, ux - bx, rational(0)),
        "T4": Point3(rational(0), rational(0), -zc),
    }


_TETRA_EDGE_SQ = {("T1", "T2"): 144, ("T1", "T3"): 144, ("T2", "T4"): 144,
                  ("T3", "T4"): 144, ("T2", "T3"): 121}


@lru_cache(maxsize=None)
def build_tetrahedron_T(long_edge_sq=289) -> Mesh:
    """The rigid tetrahedron; `long_edge_sq` is |T1T4|^2."""
    pos = _tetra_positions(long_edge_sq)
    m = Mesh(list(pos.items()),
             [("T1", "T2"), ("T1", "T3"), ("T1", "T4"),
              ("T2", "T3"), ("T2", "T4"), ("T3", "T4")],
             [("T1", "T2", "T3"), ("T1", "T2", "T4"),
              ("T1", "T3", "T4"), ("T2", "T3", "T4")])
    ledger = dict(_TETRA_EDGE_SQ)
    ledger[("T1", "T4")] = long_edge_sq
    _assert_edge_lengths(m, ledger)
    return m


_OCTA_FACES = (("A1", "B1", "C1"), ("B1", "A2", "C1"),
               ("A2", "B2", "C1"), ("B2", "A1", "C1"),
               ("A1", "B1", "C2"), ("B1", "A2", "C2"),
               ("A2", "B2", "C2"), ("B2", "A1", "C2"))
_OCTA_EDGES = (("A1", "B1"), ("B1", "A2"), ("A2", "B2"), ("B2", "A1"),
               ("A1", "C1"), ("A1", "C2"), ("A2", "C1"), ("A2", "C2"),
               ("B1", "C1"), ("B1", "C2"), ("B2", "C1"), ("B2", "C2"))


def _midpoint(p: Point3, q: Point3) -> Point3:
    half = rational(1, 2)
    return Point3((p.x + q.x) * half, (p.y + q.y) * half,
                  (p.z + q.z) * half)


def build_bricard_type1(a1: Point3, b1: Point3, a2: Point3, b2: Point3,
                        c2: Point3, names=None) -> Mesh:
    """Octahedron from a symmetric boundary quadrilateral and one apex.

    Requires |a1 b1| = |a2 b2| and |b1 a2| = |b2 a1| exactly; the second
    apex is the half-turn image of c2 about the axis through the
    midpoints of a1 a2 and b1 b2 (or the perpendicular axis when those
    midpoints coincide).
    """
    if sign(geo.squared_distance(a1, b1)
            - geo.squared_distance(a2, b2)) != 0 or \
       sign(geo.squared_distance(b1, a2)
            - geo.squared_distance(b2, a1)) != 0:
        raise OppositeSideMismatch(
            "opposite sides of the boundary quadrilateral differ")
    na = _midpoint(a1, a2)
    nb = _midpoint(b1, b2)
    if meshmod.positions_equal(na, nb):
        axis = geo.cross(geo.sub(a2, a1), geo.sub(b2, b1))
        if sign(geo.squared_norm(axis)) == 0:
            raise DegenerateAxis("midpoints coincide and segments are parallel")
    else:
        axis = geo.sub(nb, na)
    c1 = rotate_180_about_line(c2, na, axis)
    if names is None:
        names = ("A1", "A2", "B1", "B2", "C1", "C2")
    n_a1, n_a2, n_b1, n_b2, n_c1, n_c2 = names
    remap = {"A1": n_a1, "A2": n_a2, "B1": n_b1, "B2": n_b2,
             "C1": n_c1, "C2": n_c2}
    vertices = [(n_a1, a1), (n_a2, a2), (n_b1, b1), (n_b2, b2),
                (n_c1, c1), (n_c2, c2)]
    edges = [tuple(remap[v] for v in e) for e in _OCTA_EDGES]
    faces = [tuple(remap[v] for v in f) for f in _OCTA_FACES]
    return Mesh(vertices, edges, faces)


# -- the glued family ---------------------------------------------------------


@lru_cache(maxsize=None)
def family_positions(long_edge_sq=334) -> dict:
    """Exact positions of the nine vertices, plus the helper points
    X (origin), Y (circle center) and Z (= driver rest position).

    The dependent vertices come from trilateration: the upper one from
    distances (10, 5, 12) to T1, T2 and the driver, taking the larger
    z; the lower one from T1, T3 and the driver, taking the smaller z.
    For the modified build (long edge 334) the barred pair is obtained
    by the half-turn symmetry about x = y; otherwise it is re-derived
    by trilateration seeded with that symmetry image.
    """
    pos = _tetra_positions(long_edge_sq)
    t1, t2, t3, t4 = pos["T1"], pos["T2"], pos["T3"], pos["T4"]
    y = _midpoint(t2, t3)
    s2 = sqrt(rational(2))
    radius = 3 * sqrt(rational(31)) / 2
    # Z = the intersection of the ray from the origin through Y with the
    # driver circle; Y lies on x = y so the offset stays on the diagonal.
    off = radius / s2
    z_point = Point3(y.x + off, y.y + off, rational(0))
    c2 = z_point
    a2 = BranchRule.largest_z().choose(
        trilaterate(t1, t2, c2, 100, 25, 144))
    b1 = BranchRule.smallest_z().choose(
        trilaterate(t1, t3, c2, 100, 25, 144))
    if long_edge_sq == 334:
        ab2 = apply_L(b1)
        bb1 = apply_L(a2)
    else:
        ab2 = BranchRule.nearest_to(apply_L(b1)).choose(
            trilaterate(t4, t2, c2, 100, 25, 144))
        bb1 = BranchRule.nearest_to(apply_L(a2)).choose(
            trilaterate(t4, t3, c2, 100, 25, 144))
    out = dict(pos)
    out.update({"C2": c2, "A2": a2, "B1": b1, "Ab2": ab2, "Bb1": bb1,
                "X": geo.ORIGIN, "Y": y, "Z": z_point})
    return out


def _assert_edge_lengths(m: Mesh, ledger: dict) -> None:
    lengths = m.edge_lengths()
    for pair, want in ledger.items():
        key = pair if pair in lengths else (pair[1], pair[0])
        if sign(lengths[key] - rational(Fraction(want))) != 0:
            raise AssertionError(
                f"edge {pair} squared length differs from {want}")


@lru_cache(maxsize=None)
def _build_family(long_edge_sq) -> Mesh:
    pos = family_positions(long_edge_sq)
    tetra = build_tetrahedron_T(long_edge_sq)
    octa = build_bricard_type1(pos["T3"], pos["B1"], pos["A2"], pos["T2"],
                               pos["C2"])
    joined = glue(tetra, octa, {"A1": "T3", "B2": "T2", "C1": "T1"})
    octa_bar = build_bricard_type1(
        pos["T3"], pos["Bb1"], pos["Ab2"], pos["T2"], pos["C2"],
        names=("Ab1", "Ab2", "Bb1", "Bb2", "Cb1", "Cb2"))
    joined = glue(joined, octa_bar, {"Ab1": "T3", "Bb2": "T2", "Cb1": "T4"})
    closed = glue_self(joined, {"Cb2": "C2"})
    ledger = dict(EDGE_LENGTH_SQ_LEDGER)
    ledger[("T1", "T4")] = long_edge_sq
    _assert_edge_lengths(closed, ledger)
    return closed


def build_steffen() -> Mesh:
    """The embedded flexible sphere with the long edge of length 17."""
    return _build_family(289)


def build_modified_steffen() -> Mesh:
    """The variant with the long edge of length sqrt(334), which makes
    the dihedral angle along it exactly 90 degrees."""
    return _build_family(334)


def build_bricard_from_steffen() -> Mesh:
    """The self-intersecting octahedron in the position it occupies
    inside the length-17 construction."""
    pos = family_positions(289)
    return build_bricard_type1(pos["T3"], pos["B1"], pos["A2"], pos["T2"],
                               pos["C2"])


COPY_SUFFIXES = ("", "'", "''", "'''")

#: Pinned tetrahedral vertices of the assembled sphere, by copy index:
#: copy k uses T1, T4 and the k-th entries of these two tuples.
T2_OF_COPY = ("T2", "T2'", "T2''", "T3")
T3_OF_COPY = ("T3", "T2", "T2'", "T2''")


def vertex_rename_for_copy(name: str, k: int) -> str:
    """Name a vertex of rotated copy k in the assembled sphere."""
    if name in ("T1", "T4"):
        return name
    if name == "T2":
        return T2_OF_COPY[k]
    if name == "T3":
        return T3_OF_COPY[k]
    return name + COPY_SUFFIXES[k]


@lru_cache(maxsize=None)
def build_P() -> Mesh:
    """Assemble four quarter-turn copies of the modified polyhedron.

    Coincident faces disappear in the gluing and the shared long edge
    loses both incident faces in every copy, so it is no longer an edge
    of the result: 26 vertices, 72 edges, 48 faces.
    """
    base = build_modified_steffen()
    k_matrix = rotation_K()
    assembled = base
    copy = base
    for k in range(1, 4):
        copy = copy.apply_isometry(k_matrix)
        rotated = copy.renamed(lambda nm, k=k: nm + COPY_SUFFIXES[k])
        identify = {
            "T1" + COPY_SUFFIXES[k]: "T1",
            "T4" + COPY_SUFFIXES[k]: "T4",
            "T3" + COPY_SUFFIXES[k]: T3_OF_COPY[k],
        }
        if k == 3:
            identify["T2'''"] = "T3"
        assembled = glue(assembled, rotated, identify)
    report = assembled.validate()
    if (report.vertex_count, report.edge_count,
            report.face_count) != (26, 72, 48):
        raise AssertionError("assembled sphere has wrong combinatorics")
    return assembled


def p_vertex_rotation_map() -> dict:
    """The permutation the quarter turn induces on vertex names."""
    out = {}
    for name, (base, k) in TABLE2_COPIES.items():
        out[name] = vertex_rename_for_copy(base, (k + 1) % 4)
    return out


@lru_cache(maxsize=None)
def table2_exact_position(name: str) -> Point3:
    """Closed-form position of an assembled-sphere vertex: the printed
    table entry is the k-th quarter turn of the base closed form."""
    base, k = TABLE2_COPIES[name]
    x, y, z = (parse_expr(t) for t in TABLE1_EXACT[base])
    p = Point3(x, y, z)
    for _ in range(k):
        p = apply_K(p)
    return p
