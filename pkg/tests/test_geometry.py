import random
from fractions import Fraction

import pytest

from flexipoly import exactnum as en
from flexipoly import geometry as geo
from flexipoly.exactnum import rational, sign
from flexipoly.geometry import (
    DegenerateFace,
    Point3,
    dihedral_cos,
    dot,
    oriented_volume6,
    point,
    squared_distance,
    sub,
    vector,
)


def rand_point(rng):
    return point(Fraction(rng.randint(-20, 20), rng.randint(1, 9)),
                 Fraction(rng.randint(-20, 20), rng.randint(1, 9)),
                 Fraction(rng.randint(-20, 20), rng.randint(1, 9)))


def frac(x):
    # exact rational value of a purely rational ConstructibleReal
    assert x._op == "rat"
    return Fraction(int(x._q.numerator), int(x._q.denominator))


def vol6_oracle(ps):
    """Cofactor expansion of the 4x4 determinant with unit first column."""
    rows = [[Fraction(1)] + [frac(c) for c in (p.x, p.y, p.z)] for p in ps]

    def det3(m):
        return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))

    total = Fraction(0)
    for i in range(4):
        minor = [rows[j][1:] for j in range(4) if j != i]
        total += (-1) ** i * rows[i][0] * det3(minor)
    return total


def test_unit_tetrahedron():
    v = oriented_volume6(point(0, 0, 0), point(1, 0, 0),
                         point(0, 1, 0), point(0, 0, 1))
    assert sign(v - 1) == 0


def test_coplanar_points():
    v = oriented_volume6(point(0, 0, 0), point(1, 0, 0),
                         point(0, 1, 0), point(3, -2, 0))
    assert sign(v) == 0


def test_volume_matches_cofactor_oracle():
    rng = random.Random(42)
    for _ in range(25):
        ps = [rand_point(rng) for _ in range(4)]
        got = oriented_volume6(*ps)
        want = vol6_oracle(ps)
        assert sign(got - rational(want)) == 0


def test_volume_antisymmetry():
    rng = random.Random(5)
    for _ in range(10):
        ps = [rand_point(rng) for _ in range(4)]
        base = oriented_volume6(*ps)
        for i in range(4):
            for j in range(i + 1, 4):
                swapped = list(ps)
                swapped[i], swapped[j] = swapped[j], swapped[i]
                assert sign(oriented_volume6(*swapped) + base) == 0


def test_dot_positive_definite():
    rng = random.Random(9)
    for _ in range(10):
        p, q = rand_point(rng), rand_point(rng)
        u = sub(p, q)
        s = sign(dot(u, u))
        assert s >= 0
        if s == 0:
            assert all(sign(c) == 0 for c in (u.x, u.y, u.z))
    zero = sub(point(1, 2, 3), point(1, 2, 3))
    assert sign(dot(zero, zero)) == 0


def test_dihedral_cos_planar_same_side():
    c = dihedral_cos(point(0, 0, 0), point(1, 0, 0),
                     point(0, 1, 0), point(2, 3, 0))
    assert sign(c - 1) == 0


def test_dihedral_cos_right_angle_and_opposite():
    c = dihedral_cos(point(0, 0, 0), point(1, 0, 0),
                     point(0, 1, 0), point(0, 0, 1))
    assert sign(c) == 0
    c = dihedral_cos(point(0, 0, 0), point(1, 0, 0),
                     point(0, 1, 0), point(0, -1, 0))
    assert sign(c + 1) == 0


def test_dihedral_cos_symmetries():
    rng = random.Random(31)
    for _ in range(5):
        p1, p2, p3, p4 = (rand_point(rng) for _ in range(4))
        try:
            base = dihedral_cos(p1, p2, p3, p4)
        except DegenerateFace:
            continue
        assert sign(dihedral_cos(p1, p2, p4, p3) - base) == 0
        assert sign(dihedral_cos(p2, p1, p3, p4) - base) == 0


def test_dihedral_degenerate_raises():
    with pytest.raises(DegenerateFace):
        dihedral_cos(point(0, 0, 0), point(1, 0, 0),
                     point(2, 0, 0), point(0, 1, 0))


def rotations():
    from flexipoly.constructions import rotation_K, rotation_L
    return rotation_K(), rotation_L()


def test_isometry_invariance_of_predicates():
    # both quarter turn and half turn are rotations (det +1): they
    # preserve the oriented volume and the dihedral cosine; a genuine
    # reflection flips the volume sign.
    from flexipoly.constructions import rotation_K, rotation_L
    rng = random.Random(17)
    K, L = rotation_K(), rotation_L()
    mirror = ((1, 0, 0), (0, 1, 0), (0, 0, -1))
    for _ in range(5):
        ps = [rand_point(rng) for _ in range(4)]
        vol = oriented_volume6(*ps)
        vol_k = oriented_volume6(*(geo.apply_matrix(K, p) for p in ps))
        vol_l = oriented_volume6(*(geo.apply_matrix(L, p) for p in ps))
        vol_m = oriented_volume6(*(geo.apply_matrix(mirror, p) for p in ps))
        assert sign(vol_k - vol) == 0
        assert sign(vol_l - vol) == 0
        assert sign(vol_m + vol) == 0
        try:
            c = dihedral_cos(*ps)
        except DegenerateFace:
            continue
        c_k = dihedral_cos(*(geo.apply_matrix(K, p) for p in ps))
        c_l = dihedral_cos(*(geo.apply_matrix(L, p) for p in ps))
        assert sign(c_k - c) == 0
        assert sign(c_l - c) == 0


def test_squared_distance_examples():
    assert sign(squared_distance(point(0, 0, 3), point(0, 4, 0)) - 25) == 0
