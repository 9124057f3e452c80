"""Exact integer/rational linear algebra and exact linear programming.

Matrices are plain lists of rows.  Entries are ``int`` or ``Fraction``;
nothing in here ever touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

Vector = list
Matrix = list


class InfeasibleError(ValueError):
    """The feasible region of an LP problem is empty."""


# ----------------------------------------------------------------------
# rationals


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {x!r} to an exact rational")


def fraction_to_str(x) -> str:
    x = to_fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def common_denominator(values) -> int:
    d = 1
    for v in values:
        if isinstance(v, Fraction):
            d = lcm(d, v.denominator)
    return d


def scale_to_integers(v: Sequence) -> tuple[list[int], int]:
    """Return (w, d) with w integral, d > 0 and v = w / d."""
    d = common_denominator(v)
    return [int(x * d) for x in v], d


def primitive_integer_vector(v: Sequence) -> list[int]:
    """Positive multiple of v that is a primitive integer vector."""
    w, _ = scale_to_integers(v)
    g = 0
    for x in w:
        g = gcd(g, x)
    if g == 0:
        raise ValueError("zero vector has no primitive multiple")
    return [x // g for x in w]


# ----------------------------------------------------------------------
# basic matrix operations


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def zeros(r: int, c: int) -> Matrix:
    return [[0] * c for _ in range(r)]


def transpose(m: Matrix) -> Matrix:
    return [list(col) for col in zip(*m)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def vec_mat(v: Sequence, m: Matrix) -> list:
    """Row vector times matrix."""
    n = len(m[0]) if m else 0
    out = [0] * n
    for x, row in zip(v, m):
        if x:
            for j, y in enumerate(row):
                if y:
                    out[j] += x * y
    return out


def dot(u: Sequence, v: Sequence):
    return sum(x * y for x, y in zip(u, v))


def bilinear(u: Sequence, gram: Matrix, v: Sequence):
    return dot(vec_mat(u, gram), v)


def normalize_fraction_matrix(m: Matrix) -> Matrix:
    """Replace integral Fractions by ints (purely cosmetic, keeps equality)."""
    return [[int(x) if isinstance(x, Fraction) and x.denominator == 1 else x
             for x in row] for row in m]


def det(m: Matrix):
    """Exact determinant (Bareiss for integer input, Gauss otherwise)."""
    n = len(m)
    if n == 0:
        return 1
    if all(isinstance(x, int) for row in m for x in row):
        a = [list(row) for row in m]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            akk = a[k][k]
            for i in range(k + 1, n):
                aik = a[i][k]
                row_i = a[i]
                row_k = a[k]
                for j in range(k + 1, n):
                    row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            prev = akk
        return sign * a[n - 1][n - 1]
    a = [[to_fraction(x) for x in row] for row in m]
    result = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            result = -result
        result *= a[k][k]
        inv = 1 / a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] * inv
            if f:
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
    return result


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form over Q and the pivot columns."""
    a = [[to_fraction(x) for x in row] for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(m: Matrix) -> int:
    if not m:
        return 0
    return len(rref(m)[1])


def inverse(m: Matrix) -> Matrix:
    n = len(m)
    aug = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(m)]
    red, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return normalize_fraction_matrix([row[n:] for row in red])


def solve_linear(a: Matrix, b: Sequence):
    """Solve A x = b over Q.

    Returns ``(x, kernel)`` where x is a particular solution and kernel a
    basis of {y : A y = 0}, or ``None`` if the system is inconsistent.
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    aug = [list(row) + [b[i]] for i, row in enumerate(a)]
    red, piv = rref(aug)
    if cols in piv:
        return None
    x = [Fraction(0)] * cols
    for i, c in enumerate(piv):
        x[c] = red[i][cols]
    free = [c for c in range(cols) if c not in piv]
    kernel = []
    for f in free:
        y = [Fraction(0)] * cols
        y[f] = Fraction(1)
        for i, c in enumerate(piv):
            y[c] = -red[i][f]
        kernel.append(y)
    return x, kernel


def left_kernel_rational(m: Matrix) -> Matrix:
    """Basis of {x : x M = 0} over Q."""
    sol = solve_linear(transpose(m), [0] * len(m[0])) if m and m[0] else None
    if sol is None:
        return identity(len(m))
    return sol[1]


def solve_left(m: Matrix, b: Sequence):
    """A rational x with x M = b, or None."""
    sol = solve_linear(transpose(m), list(b))
    if sol is None:
        return None
    return sol[0]


# ----------------------------------------------------------------------
# Hermite and Smith normal forms


def hnf_with_transform(m: Matrix) -> tuple[Matrix, Matrix]:
    """Row-style Hermite normal form.

    Returns (H, T) with T unimodular and T M = H; H is in echelon form with
    positive pivots and reduced entries above each pivot.  Zero rows are
    kept at the bottom so that T stays square.
    """
    a = [[int(x) for x in row] for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    t = identity(rows)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        # euclid down the column
        while True:
            nz = [i for i in range(r, rows) if a[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(a[i][c]))
            if piv != r:
                a[r], a[piv] = a[piv], a[r]
                t[r], t[piv] = t[piv], t[r]
            done = True
            for i in range(r + 1, rows):
                if a[i][c] != 0:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    t[i] = [x - q * y for x, y in zip(t[i], t[r])]
                    if a[i][c] != 0:
                        done = False
            if done:
                break
        if a[r][c] == 0:
            continue
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
            t[r] = [-x for x in t[r]]
        for i in range(r):
            q = a[i][c] // a[r][c]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                t[i] = [x - q * y for x, y in zip(t[i], t[r])]
        r += 1
    return a, t


def hnf(m: Matrix) -> Matrix:
    """Nonzero rows of the row-style Hermite normal form."""
    h, _ = hnf_with_transform(m)
    return [row for row in h if any(row)]


def integer_left_kernel(m: Matrix) -> Matrix:
    """Z-basis of {x in Z^r : x M = 0} for an integer r x c matrix M."""
    h, t = hnf_with_transform(m)
    return [t[i] for i, row in enumerate(h) if not any(row)]


def smith_normal_form(m: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Return (D, U, V) with U M V = D diagonal, d1 | d2 | ..., U, V unimodular."""
    a = [[int(x) for x in row] for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = identity(rows)
    v = identity(cols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row dst += q * row src
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):
        for row in a:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    for k in range(min(rows, cols)):
        while True:
            entries = [(abs(a[i][j]), i, j) for i in range(k, rows)
                       for j in range(k, cols) if a[i][j] != 0]
            if not entries:
                break
            _, pi, pj = min(entries)
            swap_rows(k, pi)
            swap_cols(k, pj)
            p = a[k][k]
            clean = True
            for i in range(k + 1, rows):
                if a[i][k]:
                    add_row(i, k, -(a[i][k] // p))
                    if a[i][k]:
                        clean = False
            for j in range(k + 1, cols):
                if a[k][j]:
                    add_col(j, k, -(a[k][j] // p))
                    if a[k][j]:
                        clean = False
            if not clean:
                continue
            # divisibility condition
            bad = next(((i, j) for i in range(k + 1, rows) for j in range(k + 1, cols)
                        if a[i][j] % p), None)
            if bad is None:
                break
            add_row(k, bad[0], 1)
        if a[k][k] < 0:
            a[k] = [-x for x in a[k]]
            u[k] = [-x for x in u[k]]
    return a, u, v


def invariant_factors(m: Matrix) -> list[int]:
    d, _, _ = smith_normal_form(m)
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0)) if d[i][i] != 0]


def solve_integral_left(m: Matrix, b: Sequence[int]):
    """Integer x with x M = b (M integer), or None.

    Returns (x, kernel) where kernel is a Z-basis of the integer left kernel.
    """
    rows = len(m)
    h, t = hnf_with_transform(m)
    # walk the echelon form
    x_h = [0] * rows
    rest = list(b)
    r = 0
    for row_idx, row in enumerate(h):
        if not any(row):
            break
        c = next(j for j, val in enumerate(row) if val)
        if rest[c] % row[c]:
            return None
        q = rest[c] // row[c]
        x_h[row_idx] = q
        rest = [x - q * y for x, y in zip(rest, row)]
        r += 1
    if any(rest):
        return None
    x = vec_mat(x_h, t)
    kernel = [t[i] for i in range(r, rows)]
    return x, kernel


# ----------------------------------------------------------------------
# LLL reduction of a positive definite Gram matrix


def lll_gram(gram: Matrix, delta: Fraction = Fraction(99, 100)) -> Matrix:
    """Unimodular T such that T G T^t is LLL-reduced (G positive definite)."""
    n = len(gram)
    g = [[to_fraction(x) for x in row] for row in gram]
    b = identity(n)
    mu = [[Fraction(0)] * n for _ in range(n)]
    bstar = [Fraction(0)] * n
    for i in range(n):
        for j in range(i):
            s = g[i][j]
            for k in range(j):
                s -= mu[j][k] * mu[i][k] * bstar[k]
            mu[i][j] = s / bstar[j]
        s = g[i][i]
        for k in range(i):
            s -= mu[i][k] * mu[i][k] * bstar[k]
        if s <= 0:
            raise ValueError("Gram matrix is not positive definite")
        bstar[i] = s
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                for l in range(j):
                    mu[k][l] -= q * mu[j][l]
                mu[k][j] -= q
        m = mu[k][k - 1]
        if bstar[k] >= (delta - m * m) * bstar[k - 1]:
            k += 1
            continue
        b[k], b[k - 1] = b[k - 1], b[k]
        big = bstar[k] + m * m * bstar[k - 1]
        mu[k][k - 1] = m * bstar[k - 1] / big
        bstar[k] = bstar[k - 1] * bstar[k] / big
        bstar[k - 1] = big
        for j in range(k - 1):
            mu[k][j], mu[k - 1][j] = mu[k - 1][j], mu[k][j]
        nm = mu[k][k - 1]
        for i in range(k + 1, n):
            t = mu[i][k]
            mu[i][k] = mu[i][k - 1] - m * t
            mu[i][k - 1] = t + nm * mu[i][k]
        k = max(k - 1, 1)
    return b


# ----------------------------------------------------------------------
# linear programming


@dataclass
class LPProblem:
    """minimize <objective, x> subject to <a, x> >= rhs (or = rhs)."""

    dim: int
    objective: list
    constraints: list = field(default_factory=list)  # (coeffs, ">=" | "=", rhs)

    def add(self, coeffs, relation=">=", rhs=0):
        if len(coeffs) != self.dim:
            raise ValueError("constraint dimension mismatch")
        if relation not in (">=", "="):
            raise ValueError(f"unknown relation {relation!r}")
        self.constraints.append((list(coeffs), relation, rhs))
        return self


def lp_unbounded(p: LPProblem) -> bool:
    """True iff inf <objective, x> over the feasible region is -infinity.

    Requires 0 to be feasible (every rhs <= 0 for '>=' rows and = 0 for '='
    rows); an empty polyhedron raises InfeasibleError.
    """
    if len(p.objective) != p.dim:
        raise ValueError("objective dimension mismatch")
    for coeffs, rel, rhs in p.constraints:
        rhs = to_fraction(rhs)
        if (rel == ">=" and rhs > 0) or (rel == "=" and rhs != 0):
            # 0 is not feasible; decide feasibility before giving up
            if not _feasible(p):
                raise InfeasibleError("empty feasible region")
            raise ValueError("lp_unbounded requires the origin to be feasible")
    eqs = [c for c, rel, _ in p.constraints if rel == "="]
    if eqs:
        sol = solve_linear(eqs, [0] * len(eqs))
        basis = sol[1]
    else:
        basis = identity(p.dim)
    if not basis:
        return False
    bt = transpose(basis)
    obj = [dot(p.objective, col) for col in bt]
    rows = []
    rhs = []
    for coeffs, rel, r in p.constraints:
        if rel == ">=":
            rows.append([dot(coeffs, col) for col in bt])
            rhs.append(to_fraction(r))
    return _primal_unbounded(rows, rhs, obj)


def _feasible(p: LPProblem) -> bool:
    """Phase-1 style feasibility test by Fourier-free simplex on split variables."""
    # min sum of artificials for A x - s = b, x = x+ - x-, s >= 0
    rows = []
    b = []
    for coeffs, rel, rhs in p.constraints:
        rows.append((list(coeffs), rel))
        b.append(to_fraction(rhs))
    n = p.dim
    cols = []
    for j in range(n):
        cols.append([to_fraction(r[0][j]) for r in rows])
        cols.append([-to_fraction(r[0][j]) for r in rows])
    for i, (_, rel) in enumerate(rows):
        if rel == ">=":
            cols.append([Fraction(-1) if k == i else Fraction(0) for k in range(len(rows))])
    a = transpose(cols) if cols else [[] for _ in rows]
    ok, _ = farkas_cone(transpose(a), b)
    return ok


def _primal_unbounded(rows, rhs, obj) -> bool:
    """Dictionary simplex with Bland's rule on free variables split as y+ - y-.

    Constraints rows . y >= rhs with rhs <= 0, so y = 0 is a feasible start.
    """
    k = len(obj)
    m = len(rows)
    # nonbasic variables 0..2k-1 are y+_j (2j) and y-_j (2j+1); slacks are 2k..2k+m-1
    # dictionary: basic_i = const_i + sum_j coef[i][j] * nonbasic_j
    nonbasic = list(range(2 * k))
    basic = list(range(2 * k, 2 * k + m))
    coef = []
    const = []
    for i in range(m):
        row = []
        for j in range(k):
            a = to_fraction(rows[i][j])
            row.extend([a, -a])
        coef.append(row)
        const.append(-rhs[i])
    zrow = []
    for j in range(k):
        c = to_fraction(obj[j])
        zrow.extend([c, -c])
    while True:
        entering = None
        for pos in sorted(range(len(nonbasic)), key=lambda q: nonbasic[q]):
            if zrow[pos] < 0:
                entering = pos
                break
        if entering is None:
            return False
        best = None
        for i in range(m):
            a = coef[i][entering]
            if a < 0:
                ratio = const[i] / -a
                if best is None or ratio < best[0] or (ratio == best[0] and basic[i] < basic[best[1]]):
                    best = (ratio, i)
        if best is None:
            return True
        r = best[1]
        a = coef[r][entering]
        # express entering variable from row r
        new_row = [-x / a for x in coef[r]]
        new_row[entering] = 1 / a
        new_const = -const[r] / a
        for i in range(m):
            if i == r:
                continue
            f = coef[i][entering]
            if f:
                row = coef[i]
                for j in range(len(row)):
                    row[j] = row[j] + f * new_row[j] if j != entering else f * new_row[j]
                const[i] += f * new_const
        f = zrow[entering]
        for j in range(len(zrow)):
            zrow[j] = zrow[j] + f * new_row[j] if j != entering else f * new_row[j]
        coef[r] = new_row
        const[r] = new_const
        basic[r], nonbasic[entering] = nonbasic[entering], basic[r]


def farkas_cone(columns: Sequence[Sequence], target: Sequence):
    """Decide whether target lies in the cone spanned by ``columns``.

    Returns ``(True, lam)`` with lam >= 0 and sum lam_j columns[j] = target,
    or ``(False, x)`` with <x, column> >= 0 for every column and
    <x, target> < 0.  Phase-1 simplex with Bland's rule on an integer
    (fraction-free) tableau.
    """
    k = len(target)
    m = len(columns)
    # integer rows: scale each column by a positive factor
    col_scale = []
    int_cols = []
    for col in columns:
        w, d = scale_to_integers([to_fraction(x) for x in col])
        int_cols.append(w)
        col_scale.append(d)
    t_int, t_scale = scale_to_integers([to_fraction(x) for x in target])
    sign = [1 if t_int[i] >= 0 else -1 for i in range(k)]
    width = m + k + 1
    tab = []
    for i in range(k):
        s = sign[i]
        row = [s * int_cols[j][i] for j in range(m)]
        row.extend(1 if q == i else 0 for q in range(k))
        row.append(s * t_int[i])
        tab.append(row)
    z = [0] * width
    for i in range(k):
        for j in range(m):
            z[j] -= tab[i][j]
        z[width - 1] -= tab[i][width - 1]
    basis = [m + i for i in range(k)]
    d = 1
    while True:
        s = next((j for j in range(m + k) if z[j] < 0), None)
        if s is None:
            break
        r = None
        for i in range(k):
            a = tab[i][s]
            if a > 0:
                if r is None:
                    r = i
                    continue
                lhs = tab[i][-1] * tab[r][s]
                rhs_ = tab[r][-1] * a
                if lhs < rhs_ or (lhs == rhs_ and basis[i] < basis[r]):
                    r = i
        if r is None:
            # cannot happen in phase 1 (objective bounded below by 0)
            raise RuntimeError("phase-1 simplex unbounded")
        p = tab[r][s]
        prow = tab[r]
        for i in range(k):
            if i == r:
                continue
            row = tab[i]
            f = row[s]
            if f:
                tab[i] = [(x * p - f * y) // d for x, y in zip(row, prow)]
            elif p != d:
                tab[i] = [(x * p) // d for x in row]
        f = z[s]
        z = [(x * p - f * y) // d for x, y in zip(z, prow)]
        d = p
        basis[r] = s
    if z[-1] == 0:
        lam = [Fraction(0)] * m
        for i, bv in enumerate(basis):
            if bv < m:
                lam[bv] = Fraction(tab[i][-1], d) * col_scale[bv] / t_scale
        return True, lam
    # y_i = 1 - z[m+i]/d ; x = -(sign * y)
    x = []
    for i in range(k):
        y = 1 - Fraction(z[m + i], d)
        x.append(-sign[i] * y)
    return False, x
