import random
from fractions import Fraction

import pytest

from weylwalk import exactalg as ea
from weylwalk.enumerate import enum_negdef
from weylwalk.lattice import (Embedding, Isometry, Lattice, discriminant_group, in_O_omega,
                              is_primitive, orthogonal_complement, primitive_in_dual,
                              reflection, root_system_type, signature, sublattice)


def neg_cartan(kind, n):
    """Negative definite Gram matrix of a root lattice (roots of norm -2)."""
    g = [[-2 if i == j else 0 for j in range(n)] for i in range(n)]
    edges = [(i, i + 1) for i in range(n - 1)]
    if kind == "D":
        edges = [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)]
    if kind == "E":
        edges = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)][: n - 1]
    for i, j in edges:
        g[i][j] = g[j][i] = 1
    return Lattice(tuple(map(tuple, g)), name=f"{kind}{n}")


U = Lattice(((0, 1), (1, 0)), name="U")


def test_rejects_bad_gram():
    with pytest.raises(ValueError):
        Lattice(((1, 2), (3, 4)))
    with pytest.raises(ValueError):
        Lattice(((1, 1), (1, 1)))


@pytest.mark.parametrize("kind,n,det,disc", [
    ("A", 2, 3, (3,)), ("A", 3, -4, (4,)), ("D", 4, 4, (2, 2)), ("E", 8, 1, ()),
])
def test_root_lattices(kind, n, det, disc):
    lat = neg_cartan(kind, n)
    assert lat.det == det
    assert lat.even
    assert signature(lat) == (0, n)
    assert discriminant_group(lat).invariants == disc


def test_discriminant_form_a1():
    a1 = Lattice(((-2,),))
    d = discriminant_group(a1)
    assert d.invariants == (2,)
    assert d.q_values == (Fraction(3, 2),)       # -1/2 mod 2


def test_root_counts_and_types():
    assert len(enum_negdef(neg_cartan("E", 8), -2)) == 240
    assert len(enum_negdef(neg_cartan("D", 4), -2)) == 24
    d4 = neg_cartan("D", 4)
    assert root_system_type(d4, enum_negdef(d4, -2)) == "D4"
    a = Lattice(((-2, 0, 0), (0, -2, 1), (0, 1, -2)))
    assert root_system_type(a, enum_negdef(a, -2)) == "A1+A2"


def test_signature_hyperbolic():
    assert signature(U) == (1, 1)
    assert signature(Lattice(((2, 0, 0), (0, -2, 1), (0, 1, -2)))) == (1, 2)


@pytest.mark.parametrize("seed", range(10))
def test_reflections_preserve_gram(seed):
    lat = neg_cartan("E", 8)
    roots = enum_negdef(lat, -2)
    rng = random.Random(seed)
    g = Isometry.identity(lat)
    for _ in range(4):
        g = g * reflection(lat, rng.choice(roots))
    assert g.preserves_form() and g.integral()
    assert (g * g.inverse()).is_identity()
    assert in_O_omega(g)              # unimodular: trivially


def test_reflection_order_two():
    lat = neg_cartan("A", 3)
    r = reflection(lat, (1, 0, 0))
    assert r.order() == 2
    assert r.apply((1, 0, 0)) == (-1, 0, 0)


def test_checked_isometry_rejects():
    with pytest.raises(ValueError):
        Isometry.checked(U, [[2, 0], [0, 1]])


def test_in_O_omega_diagram_automorphisms():
    a2 = neg_cartan("A", 2)
    # the diagram swap acts as -1 on Z/3
    assert in_O_omega(Isometry.checked(a2, [[0, 1], [1, 0]]))
    d4 = neg_cartan("D", 4)
    tri = Isometry.checked(d4, [[0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1], [1, 0, 0, 0]])
    assert tri.order() == 3
    assert not in_O_omega(tri)


def test_complement_in_e8():
    e8 = neg_cartan("E", 8)
    a2 = sublattice(e8, [(1, 0, 0, 0, 0, 0, 0, 0), (0, 0, 1, 0, 0, 0, 0, 0)], name="A2")
    assert a2.source.det == 3 and is_primitive(a2)
    comp = orthogonal_complement(a2, "E6")
    assert comp.source.rank == 6 and abs(comp.source.det) == 3
    assert root_system_type(comp.source, enum_negdef(comp.source, -2)) == "E6"
    assert comp.preserves_form()
    for row in comp.matrix:
        assert all(e8.inner(row, r) == 0 for r in a2.matrix)


def test_imprimitive_embedding():
    a1 = Lattice(((-8,),))
    e = Embedding.checked(a1, neg_cartan("A", 1), [(2,)])
    assert not is_primitive(e)


def test_primitive_in_dual():
    a1 = neg_cartan("A", 1)
    assert primitive_in_dual(a1, (4,)) == (Fraction(1, 2),)


def test_json_round_trip():
    lat = neg_cartan("D", 4)
    assert Lattice.from_json(lat.to_json()).gram == lat.gram
    r = reflection(lat, (1, 0, 0, 0))
    assert Isometry.from_json(lat, r.to_json()) == r
