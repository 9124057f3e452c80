import random
from fractions import Fraction
from itertools import combinations

import pytest

from weylwalk import exactalg as ea


def rand_matrix(rng, r, c, lo=-6, hi=6):
    return [[rng.randint(lo, hi) for _ in range(c)] for _ in range(r)]


def test_det_and_inverse():
    m = [[2, 1, 0], [1, 3, 1], [0, 1, 4]]
    assert ea.det(m) == 18
    inv = ea.inverse(m)
    assert ea.mat_mul(m, inv) == ea.identity(3)
    assert all(isinstance(x, Fraction) or isinstance(x, int) for r in inv for x in r)


def test_singular_inverse_raises():
    with pytest.raises(ZeroDivisionError):
        ea.inverse([[1, 2], [2, 4]])


def test_fraction_to_str_round_trip():
    for x in (Fraction(17, 2), Fraction(-3, 4), Fraction(5)):
        assert ea.to_fraction(ea.fraction_to_str(x)) == x


def test_primitive_vector():
    assert ea.primitive_integer_vector([Fraction(2, 3), Fraction(4, 3), 0]) == [1, 2, 0]


@pytest.mark.parametrize("seed", range(20))
def test_hnf_transform(seed):
    rng = random.Random(seed)
    m = rand_matrix(rng, rng.randint(1, 5), rng.randint(1, 5))
    h, t = ea.hnf_with_transform(m)
    assert ea.mat_mul(t, m) == h
    assert abs(ea.det(t)) == 1


@pytest.mark.parametrize("seed", range(20))
def test_smith_form(seed):
    rng = random.Random(100 + seed)
    r, c = rng.randint(1, 5), rng.randint(1, 5)
    m = rand_matrix(rng, r, c)
    d, u, v = ea.smith_normal_form(m)
    assert ea.mat_mul(ea.mat_mul(u, m), v) == d
    assert abs(ea.det(u)) == 1 and abs(ea.det(v)) == 1
    diag = [d[i][i] for i in range(min(r, c))]
    assert all(d[i][j] == 0 for i in range(r) for j in range(c) if i != j)
    nz = [x for x in diag if x]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))


def test_invariant_factors_known():
    assert ea.invariant_factors([[2, 0], [0, 4]]) == [2, 4]
    assert ea.invariant_factors([[2, 4], [6, 8]]) == [2, 4]


@pytest.mark.parametrize("seed", range(10))
def test_integer_left_kernel(seed):
    rng = random.Random(200 + seed)
    m = rand_matrix(rng, 5, 2)
    ker = ea.integer_left_kernel(m)
    assert len(ker) == 5 - ea.rank(m)
    for row in ker:
        assert ea.vec_mat(row, m) == [0, 0]


def test_solve_integral_left():
    m = [[2, 0], [0, 3]]
    assert ea.solve_integral_left(m, [1, 0]) is None
    x, ker = ea.solve_integral_left(m, [4, 9])
    assert ea.vec_mat(x, m) == [4, 9] and ker == []


@pytest.mark.parametrize("seed", range(10))
def test_lll_is_unimodular_and_reduces(seed):
    rng = random.Random(300 + seed)
    n = rng.randint(2, 5)
    b = rand_matrix(rng, n, n, -9, 9)
    if ea.det(b) == 0:
        pytest.skip("singular sample")
    g = ea.mat_mul(b, ea.transpose(b))
    t = ea.lll_gram(g)
    assert abs(ea.det(t)) == 1
    h = ea.mat_mul(ea.mat_mul(t, g), ea.transpose(t))
    assert h[0][0] <= g[0][0] or h[0][0] <= min(g[i][i] for i in range(n))


# ----------------------------------------------------------------------
# linear programming


def test_farkas_certificates():
    ok, lam = ea.farkas_cone([[1, 0], [0, 1]], [2, 3])
    assert ok and all(x >= 0 for x in lam)
    assert [sum(l * c[i] for l, c in zip(lam, [[1, 0], [0, 1]])) for i in range(2)] == [2, 3]
    ok, x = ea.farkas_cone([[1, 0], [0, 1]], [-1, 3])
    assert not ok
    assert ea.dot(x, [1, 0]) >= 0 and ea.dot(x, [0, 1]) >= 0 and ea.dot(x, [-1, 3]) < 0


def test_lp_infeasible_raises():
    p = ea.LPProblem(1, [1])
    p.add([1], ">=", 1).add([-1], ">=", 0)
    with pytest.raises(ea.InfeasibleError):
        ea.lp_unbounded(p)


def _boxed_minimum(rows, obj, m):
    """Minimum of obj over {rows . x >= rhs} intersected with [-m, m]^2, by vertices."""
    lines = list(rows) + [([1, 0], -m), ([-1, 0], -m), ([0, 1], -m), ([0, -1], -m)]
    best = None
    for (a, r), (b, s) in combinations(lines, 2):
        d = a[0] * b[1] - a[1] * b[0]
        if d == 0:
            continue
        x = Fraction(r * b[1] - s * a[1], d)
        y = Fraction(a[0] * s - b[0] * r, d)
        if all(c[0] * x + c[1] * y >= t for c, t in lines):
            val = obj[0] * x + obj[1] * y
            best = val if best is None else min(best, val)
    return best


@pytest.mark.parametrize("seed", range(300))
def test_lp_unbounded_matches_vertex_enumeration(seed):
    rng = random.Random(seed)
    rows = [([rng.randint(-4, 4), rng.randint(-4, 4)], rng.randint(-5, 0))
            for _ in range(rng.randint(0, 5))]
    obj = [rng.randint(-4, 4), rng.randint(-4, 4)]
    p = ea.LPProblem(2, obj)
    for c, r in rows:
        p.add(c, ">=", r)
    # coordinates of genuine vertices are at most 40 here, so the boxed
    # optimum keeps moving with the box exactly when the LP is unbounded
    grows = _boxed_minimum(rows, obj, 2000) < _boxed_minimum(rows, obj, 1000)
    assert ea.lp_unbounded(p) == grows


def test_lp_with_equality():
    p = ea.LPProblem(3, [0, 0, -1])
    p.add([1, -1, 0], "=", 0).add([0, 0, -1], ">=", -5)
    assert not ea.lp_unbounded(p)
    q = ea.LPProblem(3, [-1, 0, 0])
    q.add([1, -1, 0], "=", 0).add([0, 0, -1], ">=", -5)
    assert ea.lp_unbounded(q)
