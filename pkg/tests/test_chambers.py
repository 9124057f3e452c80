import random
from fractions import Fraction

import pytest

from weylwalk.chambers import (adjacent_weyl, chamber_from_json, chamber_to_json, compute_walls,
                               face_is_inner, isometries_between, point_beyond, weyl_walk,
                               _wall_permutation)
from weylwalk.leech import W0, is_weyl, vector_to_ii
from weylwalk.lattice import in_O_omega


def test_wall_count_and_witnesses(d15):
    S = d15.bundle.S
    assert len(d15.walls) == 314
    assert d15.contains_interior(d15.interior)
    for w in d15.walls[::7]:
        assert S.inner(w.v, w.witness) == 0
        assert all(S.inner(u.v, w.witness) > 0 for u in d15.walls if u is not w)


def test_profile(d15):
    prof = d15.profile()
    assert sum(prof.values()) == 314
    assert sum(k for (n, a, outer), k in prof.items() if outer) == 10 + 15 + 15 + 10


def test_json_round_trip(d15):
    data = chamber_to_json(d15)
    back = chamber_from_json(d15.bundle, data)
    assert back.key == d15.key
    assert [w.outer for w in back.walls] == [w.outer for w in d15.walls]


def test_symmetries_preserve_gram_and_walls(p15, d15):
    gens, order, aut = p15.symmetries
    assert order == 720 and len(aut) == 1
    for g in gens:
        assert g.preserves_form() and g.integral()
        perm = _wall_permutation(d15, g)
        assert sorted(perm) == list(range(len(d15.walls)))


def test_isometries_between_same_chamber(p15, d15):
    found = isometries_between(d15, d15, limit=3)
    assert len(found) == 3
    for g in found:
        assert g.preserves_form()
        assert all(d15.bundle.S.inner(w.v, g.apply(d15.interior)) > 0 for w in d15.walls)
    assert not all(in_O_omega(g, d15.bundle.disc) for g in p15.symmetries[0])


def test_weyl_walk_lands_on_weyl_vectors(d15):
    w = weyl_walk(d15.bundle.lift(d15.interior))
    assert is_weyl(vector_to_ii(w))
    assert vector_to_ii(w) == W0


def test_crossing_a_wall_is_involutive(d15):
    """Crossing an inner wall and crossing back returns the same chamber."""
    b = d15.bundle
    S = b.S
    wall = next(w for w in d15.walls if not w.outer)
    weyl, p = adjacent_weyl(d15, wall)
    other = compute_walls(b, weyl, interior=p)
    back = next(u for u in other.walls if u.v == tuple(-x for x in wall.v))
    weyl2, q = adjacent_weyl(other, back)
    assert d15.contains_interior(q)
    assert compute_walls(b, weyl2, interior=q).key == d15.key
    assert S.inner(wall.v, point_beyond(d15, wall)) < 0


def test_face_inner_test(p15, d15):
    faces = p15.faces
    assert len(faces) == 15720
    assert sum(f.inner for f in faces) == 5235
    rng = random.Random(0)
    S = d15.bundle.S
    for f in rng.sample(faces, 20):
        v1, v2 = (d15.walls[i].v for i in f.walls)
        outer = d15.walls[f.walls[0]].outer or d15.walls[f.walls[1]].outer
        assert face_is_inner(S, v1, v2) == f.inner
        if outer:
            assert not f.inner
