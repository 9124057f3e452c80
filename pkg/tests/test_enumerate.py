import random
from fractions import Fraction
from math import isqrt

import pytest

from weylwalk import exactalg as ea
from weylwalk.enumerate import (PlaneSliceEnumerator, SliceEnumerator, brute_force_box,
                                enum_negdef, enum_negdef_upto, enum_separating,
                                short_vectors)
from weylwalk.lattice import Lattice, signature


MAX_BOX = 20000     # points in a brute-force box


def qf(v, g):
    return ea.bilinear(list(v), g, list(v))


def random_definite(rng, n):
    while True:
        b = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)]
        if ea.det(b) != 0:
            g = ea.mat_mul(b, ea.transpose(b))
            t = ea.lll_gram(g)
            return [[int(x) for x in r] for r in ea.mat_mul(ea.mat_mul(t, g), ea.transpose(t))]


def box_fits(r, n):
    return (2 * r + 1) ** n <= MAX_BOX


def random_hyperbolic(rng, n):
    """Integral Gram of signature (1, n-1) built as U + (negative definite)."""
    while True:
        neg = [[-x for x in r] for r in random_definite(rng, n - 1)] if n > 1 else []
        g = [[0] * n for _ in range(n)]
        g[0][0] = 2 * rng.randint(0, 2)
        for i in range(1, n):
            for j in range(1, n):
                g[i][j] = neg[i - 1][j - 1]
        g[0][1] = g[1][0] = rng.randint(1, 3)
        # a random unimodular change of basis hides the block shape
        t = ea.identity(n)
        for _ in range(3):
            i, j = rng.sample(range(n), 2)
            t[i] = [a + rng.choice((-1, 1)) * b for a, b in zip(t[i], t[j])]
        g = ea.mat_mul(ea.mat_mul(t, g), ea.transpose(t))
        lat = Lattice(tuple(tuple(int(x) for x in r) for r in g))
        if signature(lat) == (1, n - 1):
            return lat


def box_radius(g, bound):
    """Largest |x_i| on {x G x <= bound} for G positive definite."""
    gi = ea.inverse(g)
    return max(isqrt(int(bound * gi[i][i]) + 1) + 1 for i in range(len(g)))


@pytest.mark.parametrize("seed", range(40))
def test_short_vectors_match_box(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    while True:
        g = random_definite(rng, n)
        bound = rng.randint(1, 40)
        r = box_radius(g, bound)
        if box_fits(r, n):
            break
    for exact in (False, True):
        got = short_vectors(g, bound, exact=exact)
        want = brute_force_box(g, r, (lambda v, g: qf(v, g) == bound) if exact
                               else (lambda v, g: qf(v, g) <= bound))
        assert got == want


@pytest.mark.parametrize("seed", range(20))
def test_centered_short_vectors_match_box(seed):
    rng = random.Random(1000 + seed)
    n = rng.randint(1, 4)
    while True:
        g = random_definite(rng, n)
        c = [Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(n)]
        bound = Fraction(rng.randint(1, 60), rng.randint(1, 3))
        # the box must be centred, so size it around the nearest integer point
        r = box_radius(g, bound) + max(abs(x) for x in c) + 1
        if box_fits(int(r), n):
            break

    def inside(v, g):
        d = [a - b for a, b in zip(v, c)]
        return qf(d, g) <= bound

    assert short_vectors(g, bound, center=c) == brute_force_box(g, int(r), inside)


def test_enum_negdef_dual():
    a1 = Lattice(((-2,),))
    assert enum_negdef(a1, Fraction(-1, 2), dual=True) == [(Fraction(-1, 2),), (Fraction(1, 2),)]
    assert enum_negdef_upto(a1, -2) == [(-1,), (0,), (1,)]


def _slice_radius(lat, v0, a, b):
    """Box radius for {<v,v>=a, <v,v0>=b} from the definite majorant 2<v,v0>^2/<v0,v0> - <v,v>."""
    g = [list(r) for r in lat.gram]
    pv = lat.pairing_vector(v0)
    n0 = lat.norm(v0)
    maj = [[Fraction(2 * pv[i] * pv[j]) / n0 - g[i][j] for j in range(lat.rank)] for i in range(lat.rank)]
    return box_radius(maj, 2 * Fraction(b) ** 2 / n0 - a)


def _box_by_values(lat, anchors, r):
    """Box points keyed by (norm, pairings with the anchors), in integer arithmetic."""
    g = lat.gram
    n = lat.rank
    cols = [[sum(g[i][j] * a[j] for j in range(n)) for i in range(n)] for a in anchors]
    out = {}

    def key(v, _):
        gv = [sum(g[i][j] * v[j] for j in range(n)) for i in range(n)]
        k = (sum(x * y for x, y in zip(v, gv)),) + tuple(sum(x * y for x, y in zip(v, c))
                                                        for c in cols)
        out.setdefault(k, []).append(tuple(v))
        return False

    brute_force_box(g, r, key)
    return out


def _positive_vector(rng, lat, tries=200):
    for _ in range(tries):
        v = tuple(rng.randint(-3, 3) for _ in range(lat.rank))
        if lat.norm(v) > 0:
            return v
    return None


@pytest.mark.parametrize("seed", range(25))
def test_slices_match_box(seed):
    rng = random.Random(2000 + seed)
    while True:
        lat = random_hyperbolic(rng, rng.randint(2, 4))
        v0 = _positive_vector(rng, lat)
        if v0 is None:
            continue
        r = _slice_radius(lat, v0, -4, 4)      # the largest box below
        if box_fits(r, lat.rank):
            break
    se = SliceEnumerator(lat, v0)
    box = _box_by_values(lat, [v0], r)
    for a in (-2, -4, 0):
        for b in range(0, 5):
            assert se.enumerate(a, b) == sorted(box.get((a, b), [])), (a, b)


@pytest.mark.parametrize("seed", range(15))
def test_plane_slices_match_box(seed):
    rng = random.Random(3000 + seed)
    while True:
        lat = random_hyperbolic(rng, rng.randint(3, 4))
        v0, v1 = _anchors(rng, lat)
        if v0 is None:
            continue
        r = _slice_radius(lat, v0, -2, 2)
        if box_fits(r, lat.rank):
            break
    pe = PlaneSliceEnumerator(lat, v0, v1)
    box = _box_by_values(lat, [v0, v1], r)
    for b0 in range(0, 3):
        for b1 in range(-2, 1):
            assert pe.enumerate(-2, b0, b1) == sorted(box.get((-2, b0, b1), []))


def _anchors(rng, lat):
    """Two independent vectors in the same component of the positive cone, or (None, None)."""
    for _ in range(50):
        v0 = _positive_vector(rng, lat)
        v1 = _positive_vector(rng, lat)
        if v0 is None or v1 is None:
            break
        if lat.inner(v0, v1) < 0:
            v1 = tuple(-x for x in v1)
        if ea.rank([list(v0), list(v1)]) == 2:
            return v0, v1
    return None, None


def _plane_pairs(lat, v0, v1):
    """Pairs (b0, b1), b0 > 0 > b1, that a (-2)-vector can have with v0, v1.

    The projection of such a vector to the plane of v0, v1 has norm >= -2,
    so (b0, b1) G^-1 (b0, b1)^t >= -2 with G the Gram matrix of the anchors.
    In the open quadrant that region is bounded; walk rings until three in a
    row are empty.
    """
    gi = ea.inverse([[lat.norm(v0), lat.inner(v0, v1)], [lat.inner(v0, v1), lat.norm(v1)]])
    out, empty, k = [], 0, 0
    while empty < 3:
        k += 1
        ring = [(b0, -k) for b0 in range(1, k + 1)] + [(k, -b1) for b1 in range(1, k)]
        hits = [b for b in ring if ea.bilinear(list(b), gi, list(b)) >= -2]
        out += hits
        empty = 0 if hits else empty + 1
    return out


@pytest.mark.parametrize("seed", range(15))
def test_separating_roots_match_box(seed):
    rng = random.Random(4000 + seed)
    while True:
        lat = random_hyperbolic(rng, rng.randint(2, 4))
        v0 = _positive_vector(rng, lat)
        if v0 is None or not box_fits(_slice_radius(lat, v0, -2, 3), lat.rank):
            continue
        near = _box_by_values(lat, [v0], _slice_radius(lat, v0, -2, 3))
        roots = [r for b in (1, 2, 3) for r in near.get((-2, b), [])]
        if not roots:
            continue
        # reflecting v0 in a root puts that root between the anchors
        r = rng.choice(roots)
        v1 = tuple(x + lat.inner(v0, r) * y for x, y in zip(v0, r))
        pairs = _plane_pairs(lat, v0, v1)
        radius = max(_slice_radius(lat, v0, -2, b0) for b0, _ in pairs)
        if box_fits(radius, lat.rank):
            break
    box = _box_by_values(lat, [v0, v1], radius)
    want = sorted(v for b0, b1 in pairs for v in box.get((-2, b0, b1), []))
    assert r in want
    assert sorted(enum_separating(lat, v0, v1, -2)) == want


def test_slice_rejects_non_positive_anchor():
    lat = Lattice(((0, 1), (1, 0)))
    with pytest.raises(ValueError):
        SliceEnumerator(lat, (1, -1))
