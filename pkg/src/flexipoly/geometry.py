"""Exact 3D primitives: oriented volume, metric queries, dihedral cosines.

All coordinates are ConstructibleReal, so every predicate built here is
decided exactly by exactnum.sign.  Dihedral angles are reported as
cosines; interior-versus-reflex disambiguation is a separate orientation
sign, because arccos would leave the constructible field.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import exactnum as en
from .exactnum import ConstructibleReal


class DegenerateFace(ValueError):
    """A triangle handed to a dihedral computation is collinear."""


@dataclass(frozen=True)
class Vec3:
    x: ConstructibleReal
    y: ConstructibleReal
    z: ConstructibleReal

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Vec3":
        return Vec3(-self.x, -self.y, -self.z)

    def scaled(self, k) -> "Vec3":
        return Vec3(self.x * k, self.y * k, self.z * k)


@dataclass(frozen=True)
class Point3:
    x: ConstructibleReal
    y: ConstructibleReal
    z: ConstructibleReal

    def translated(self, v: Vec3) -> "Point3":
        return Point3(self.x + v.x, self.y + v.y, self.z + v.z)


def point(x, y, z) -> Point3:
    """Point from anything exactnum coerces (ints, Fractions, values)."""
    coerce = en._coerce
    return Point3(coerce(x), coerce(y), coerce(z))


def vector(x, y, z) -> Vec3:
    coerce = en._coerce
    return Vec3(coerce(x), coerce(y), coerce(z))


ORIGIN = point(0, 0, 0)
ZERO_VEC = vector(0, 0, 0)


def sub(p: Point3, q: Point3) -> Vec3:
    """Difference vector p - q."""
    return Vec3(p.x - q.x, p.y - q.y, p.z - q.z)


def dot(u: Vec3, v: Vec3) -> ConstructibleReal:
    return u.x * v.x + u.y * v.y + u.z * v.z


def cross(u: Vec3, v: Vec3) -> Vec3:
    return Vec3(u.y * v.z - u.z * v.y,
                u.z * v.x - u.x * v.z,
                u.x * v.y - u.y * v.x)


def squared_norm(u: Vec3) -> ConstructibleReal:
    return dot(u, u)


def squared_distance(p: Point3, q: Point3) -> ConstructibleReal:
    return squared_norm(sub(p, q))


def oriented_volume6(x0: Point3, x1: Point3, x2: Point3,
                     x3: Point3) -> ConstructibleReal:
    """Six times the oriented tetrahedron volume.

    Equals the determinant of the three difference vectors x1-x0, x2-x0,
    x3-x0, and is antisymmetric under swapping any two arguments.
    """
    a, b, c = sub(x1, x0), sub(x2, x0), sub(x3, x0)
    return dot(a, cross(b, c))


def dihedral_cos(p1: Point3, p2: Point3, p3: Point3,
                 p4: Point3) -> ConstructibleReal:
    """Cosine of the dihedral angle along edge (p1, p2).

    The angle is measured between the half-plane through p3 and the
    half-plane through p4, i.e. between the components of p3-p1 and
    p4-p1 orthogonal to the edge.  Raises DegenerateFace when either
    triangle (p1, p2, p3) or (p1, p2, p4) is collinear.
    """
    e = sub(p2, p1)
    ee = squared_norm(e)
    if en.sign(ee) == 0:
        raise DegenerateFace("edge endpoints coincide")
    a = sub(p3, p1)
    b = sub(p4, p1)
    a_perp = a - e.scaled(dot(a, e) / ee)
    b_perp = b - e.scaled(dot(b, e) / ee)
    na, nb = squared_norm(a_perp), squared_norm(b_perp)
    if en.sign(na) == 0 or en.sign(nb) == 0:
        raise DegenerateFace("collinear triangle at dihedral edge")
    return dot(a_perp, b_perp) / en.sqrt(na * nb)


def wedge_orientation(p1: Point3, p2: Point3, p3: Point3, p4: Point3) -> int:
    """Sign of oriented_volume6(p1, p2, p3, p4).

    Zero means p4 lies in the plane of the first triangle; the sign is
    the interior-versus-reflex disambiguator that dihedral_cos leaves
    out by design.
    """
    return en.sign(oriented_volume6(p1, p2, p3, p4))


def apply_matrix(rot, p: Point3) -> Point3:
    """Multiply a 3x3 matrix (rows of coercible entries) by a point."""
    cols = (p.x, p.y, p.z)
    out = []
    for row in rot:
        acc = en.rational(0)
        for entry, coord in zip(row, cols):
            acc = acc + en._coerce(entry) * coord
        out.append(acc)
    return Point3(*out)


def apply_matrix_vec(rot, v: Vec3) -> Vec3:
    p = apply_matrix(rot, Point3(v.x, v.y, v.z))
    return Vec3(p.x, p.y, p.z)
