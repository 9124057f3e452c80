"""Finite vector sets in definite lattices and in slices of hyperbolic ones.

The workhorse is :func:`short_vectors`, a Fincke-Pohst enumeration run in
exact integer arithmetic: the LDL decomposition of the (LLL-reduced)
positive definite form is scaled so that every level bound is an integer
square root.
"""

from __future__ import annotations

import copy
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt
from typing import Iterator

import numpy as np

from . import exactalg as ea
from .lattice import Lattice, as_vector


class _Plan:
    """Precomputed integer data for enumerating one positive definite form."""

    def __init__(self, gram, center=None, reduce=True, transform=None):
        n = len(gram)
        self.n = n
        g = [[ea.to_fraction(x) for x in row] for row in gram]
        if transform is not None:
            self.transform = transform
        else:
            self.transform = ea.lll_gram(g) if (reduce and n > 1) else ea.identity(n)
        t = self.transform
        h = ea.mat_mul(ea.mat_mul(t, g), ea.transpose(t))
        self.t_inv = ea.inverse(t) if n else []
        # H = U^t D U, U unit upper triangular
        d = [Fraction(0)] * n
        u = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            d[i] = h[i][i] - sum(u[k][i] ** 2 * d[k] for k in range(i))
            if d[i] <= 0:
                raise ValueError("form is not positive definite")
            u[i][i] = Fraction(1)
            for j in range(i + 1, n):
                u[i][j] = (h[i][j] - sum(u[k][i] * u[k][j] * d[k] for k in range(i))) / d[i]
        self.d, self.u = d, u
        self._set_center(center)

    def recentered(self, center) -> "_Plan":
        """The same form around another center, reusing the factorisation."""
        other = copy.copy(self)
        other._set_center(center)
        return other

    def _set_center(self, center):
        n, d, u = self.n, self.d, self.u
        if center is not None:
            c = [ea.to_fraction(x) for x in ea.vec_mat(list(center), self.t_inv)]
        else:
            c = [Fraction(0)] * n
        self.dens = []
        self.coef = []     # coef[i][j] integer for j > i
        self.const = []
        for i in range(n):
            ci = sum(u[i][j] * c[j] for j in range(i, n))
            vals = [u[i][j] for j in range(i + 1, n)] + [ci]
            den = ea.common_denominator(vals)
            self.dens.append(den)
            self.coef.append([0] * (i + 1) + [int(u[i][j] * den) for j in range(i + 1, n)])
            self.const.append(int(-ci * den))
        scales = [d[i] / (self.dens[i] ** 2) for i in range(n)]
        self.scale = ea.common_denominator(scales)
        self.weights = [int(s * self.scale) for s in scales]

    def run(self, bound, exact: bool) -> Iterator[list]:
        bound = ea.to_fraction(bound)
        if bound < 0:
            return
        m = self.scale * bound.denominator
        weights = [w * bound.denominator for w in self.weights]
        budget = int(bound * m)
        n = self.n
        dens, coef, const = self.dens, self.coef, self.const
        x = [0] * n
        # columns of coef for incremental partial sums
        cols = [[coef[i][k] for i in range(k)] for k in range(n)]

        def rec(level, partial, rem):
            den = dens[level]
            w = weights[level]
            p = partial[level]
            if level == 0 and exact:
                if rem % w:
                    return
                q = rem // w
                r = isqrt(q)
                if r * r != q:
                    return
                for t in ((r, -r) if r else (0,)):
                    num = t - p
                    if num % den == 0:
                        x[0] = num // den
                        yield list(x)
                return
            tmax = isqrt(rem // w)
            lo = -((tmax + p) // den)       # ceil((-tmax - p)/den)
            hi = (tmax - p) // den
            col = cols[level]
            for xi in range(lo, hi + 1):
                t = den * xi + p
                nr = rem - w * t * t
                if nr < 0:
                    continue
                x[level] = xi
                if level == 0:
                    if not exact or nr == 0:
                        yield list(x)
                    continue
                if xi:
                    newp = [a + b * xi for a, b in zip(partial, col)]
                else:
                    newp = partial[:level]
                yield from rec(level - 1, newp, nr)

        if n == 0:
            if budget == 0 or not exact:
                yield []
            return
        yield from rec(n - 1, list(const), budget)

    def to_original(self, z) -> tuple:
        return tuple(ea.vec_mat(z, self.transform))


def short_vectors(gram, bound, center=None, exact: bool = False) -> list:
    """All integer vectors y with (y - c) G (y - c)^t <= bound (or == bound).

    G must be positive definite with rational entries.  The result is a
    sorted list of integer tuples.
    """
    plan = _Plan(gram, center)
    rows = _native_exact(plan, bound) if exact else None
    if rows is not None:
        return sorted(tuple(int(x) for x in r) for r in rows)
    out = [plan.to_original(z) for z in plan.run(bound, exact)]
    out.sort()
    return out


def _native_exact(plan: _Plan, bound):
    """Exact solutions of plan through the compiled kernel, or None if unavailable."""
    bound = ea.to_fraction(bound)
    if plan.n < 2 or bound < 0 or not _have_numba():
        return None
    weights = [w * bound.denominator for w in plan.weights]
    budget = int(bound * plan.scale * bound.denominator)
    ints = [budget, *weights, *plan.dens, *plan.const] + [x for r in plan.coef for x in r]
    if any(x.denominator != 1 for r in plan.transform for x in map(ea.to_fraction, r)):
        return None
    if max(abs(int(x)) for x in ints) >= 1 << 30:
        return None
    from ._native import filtered_slice
    i64 = lambda xs: np.array([int(x) for x in xs], dtype=np.int64)
    tk = np.array([[int(x) for x in r] for r in plan.transform], dtype=np.int64)
    args = (i64(plan.dens), np.array(plan.coef, dtype=np.int64), i64(plan.const), i64(weights),
            budget, tk, np.zeros(plan.n, dtype=np.int64), np.zeros((plan.n, 0), dtype=np.int64))
    cap = 1024
    while True:
        out = np.zeros((cap, plan.n), dtype=np.int64)
        kept, _ = filtered_slice(*args, out)
        if kept <= cap:
            return out[:kept]
        cap = kept


def iter_short_vectors(gram, bound, center=None, exact: bool = False) -> Iterator[tuple]:
    """Unsorted streaming variant of :func:`short_vectors`."""
    plan = _Plan(gram, center)
    for z in plan.run(bound, exact):
        yield plan.to_original(z)


# ----------------------------------------------------------------------
# definite lattices


def _working_gram(lat: Lattice, dual: bool):
    if dual:
        return [list(r) for r in lat.gram_inverse]
    return [list(r) for r in lat.gram]


def _from_working(lat: Lattice, y, dual: bool) -> tuple:
    if dual:
        return lat.dual_from_pairings(y)
    return as_vector(y)


def enum_negdef(lat: Lattice, a, dual: bool = False) -> list:
    """All vectors of norm exactly a in a negative definite lattice (or its dual)."""
    a = ea.to_fraction(a)
    if a >= 0:
        if a == 0:
            return [tuple([0] * lat.rank)]
        return []
    g = [[-x for x in r] for r in _working_gram(lat, dual)]
    vecs = short_vectors(g, -a, exact=True)
    return sorted(_from_working(lat, y, dual) for y in vecs)


def enum_negdef_upto(lat: Lattice, a, dual: bool = False) -> list:
    """All vectors with a <= norm <= 0 in a negative definite lattice (or its dual)."""
    g = [[-x for x in r] for r in _working_gram(lat, dual)]
    vecs = short_vectors(g, -ea.to_fraction(a))
    return sorted(_from_working(lat, y, dual) for y in vecs)


# ----------------------------------------------------------------------
# hyperbolic slices


class _AffineSlices:
    """Shared part: vectors P + z K of norm a, with z over Z^k and -K G K^t definite."""

    def _setup_kernel(self, kernel):
        self.kernel = kernel
        self.kg = ea.mat_mul(kernel, self.g) if kernel else []
        self.h = [[-x for x in r] for r in ea.mat_mul(self.kg, ea.transpose(kernel))] if kernel else []
        self.h_inv = ea.inverse(self.h) if kernel else []
        self._base_plan = None
        self._lll = None

    def _affine(self, big_p, a) -> list:
        g = self.g
        if not self.kernel:
            val = ea.bilinear(big_p, g, big_p)
            return [_from_working(self.lat, big_p, self.dual)] if val == a else []
        hvec = [ea.dot(row, big_p) for row in self.kg]
        # norm(P + zK) = PGP + 2 z.hvec - z H z = a
        # => (z - c) H (z - c) = PGP - a + c H c with c = H^{-1} hvec
        c = ea.vec_mat(hvec, self.h_inv)
        bound = ea.bilinear(big_p, g, big_p) - a + ea.dot(c, hvec)
        if bound < 0:
            return []
        if self._base_plan is None:
            self._base_plan = _Plan(self.h, transform=self._transform())
        plan = self._base_plan.recentered(c)
        out = []
        kmat = self.kernel
        for z in plan.run(bound, exact=True):
            zz = plan.to_original(z)
            y = [pi + s for pi, s in zip(big_p, ea.vec_mat(list(zz), kmat))]
            out.append(_from_working(self.lat, y, self.dual))
        out.sort()
        return out

    def _affine_batches(self, big_p, a, batch: int):
        """Integral version of _affine that yields int64 arrays of working coordinates."""
        g = self.g
        hvec = [ea.dot(row, big_p) for row in self.kg]
        c = ea.vec_mat(hvec, self.h_inv)
        bound = ea.bilinear(big_p, g, big_p) - a + ea.dot(c, hvec)
        if bound < 0:
            return
        if self._base_plan is None:
            self._base_plan = _Plan(self.h, transform=self._transform())
        plan = self._base_plan.recentered(c)
        tk = np.array(ea.mat_mul(plan.transform, self.kernel), dtype=np.int64)
        p = np.array([int(x) for x in big_p], dtype=np.int64)
        rows = []
        for z in plan.run(bound, exact=True):
            rows.append(z)
            if len(rows) == batch:
                yield p + np.array(rows, dtype=np.int64) @ tk
                rows = []
        if rows:
            yield p + np.array(rows, dtype=np.int64) @ tk

    def _transform(self):
        if self._lll is None:
            self._lll = ea.lll_gram(self.h) if len(self.h) > 1 else ea.identity(len(self.h))
        return self._lll


class SliceEnumerator(_AffineSlices):
    """Enumerate {v : <v,v> = a, <v,v0> = b} for a fixed anchor v0.

    The slice {<v, v0> = b} is an affine lattice on which the form is
    negative definite; it is parametrised as p + z K with K a basis of the
    integral kernel of v -> <v, v0>.
    """

    def __init__(self, lat: Lattice, v0, dual: bool = False):
        self.lat = lat
        self.dual = dual
        self.v0 = as_vector(v0)
        n0 = lat.norm(self.v0)
        if n0 <= 0:
            raise ValueError("anchor is not in the positive cone")
        g = _working_gram(lat, dual)
        self.g = g
        # <v, v0> = y . gv0, where y is the working coordinate vector
        if dual:
            gv0 = list(self.v0)
        else:
            gv0 = lat.pairing_vector(self.v0)
        gv0 = [ea.to_fraction(x) for x in gv0]
        ints, den = ea.scale_to_integers(gv0)
        cg = 0
        for x in ints:
            cg = gcd(cg, x)
        self.step = Fraction(cg, den)            # pairing values lie in step * Z
        self.prim = [x // cg for x in ints]      # <v,v0> = step * (y . prim)
        col = [[x] for x in self.prim]
        sol = ea.solve_integral_left(col, [1])
        self.unit = sol[0]                       # y . prim = 1
        self._setup_kernel(sol[1])

    def values_in_range(self, lo, hi, open_lo=True, open_hi=True) -> list:
        """Attainable pairing values b with lo < b < hi (bounds inclusive when not open)."""
        lo = ea.to_fraction(lo)
        hi = ea.to_fraction(hi)
        kmin = lo / self.step
        kmax = hi / self.step
        a = kmin.numerator // kmin.denominator
        if not open_lo and a * self.step == lo:
            start = a
        else:
            start = a + 1
        b = kmax.numerator // kmax.denominator
        if open_hi and b * self.step == hi:
            b -= 1
        return [k * self.step for k in range(start, b + 1)]

    def enumerate(self, a, b, offset=None) -> list:
        """All vectors v with <v,v>=a, <v,v0>=b.

        With ``offset`` (lattice coordinates, non-dual mode only) the search
        runs over the coset offset + L instead of L.
        """
        a = ea.to_fraction(a)
        b = ea.to_fraction(b)
        g = self.g
        if offset is not None:
            if self.dual:
                raise ValueError("offsets are only supported on the lattice itself")
            off = [ea.to_fraction(x) for x in offset]
            b = b - self.lat.inner(off, self.v0)
        else:
            off = None
        q = b / self.step
        if q.denominator != 1:
            return []
        q = int(q)
        p = [q * x for x in self.unit]
        big_p = p if off is None else [x + y for x, y in zip(p, off)]
        if not self.kernel:
            val = ea.bilinear(big_p, g, big_p)
            return [_from_working(self.lat, big_p, self.dual)] if val == a else []
        return self._affine(big_p, a)


    def iter_batches(self, a, b, batch: int = 1 << 16):
        """Vectors of the lattice itself with <v,v>=a, <v,v0>=b, as int64 arrays."""
        if self.dual:
            raise ValueError("batches are only produced on the lattice itself")
        q = ea.to_fraction(b) / self.step
        if q.denominator != 1:
            return
        big_p = [int(q) * x for x in self.unit]
        if not self.kernel:
            if ea.bilinear(big_p, self.g, big_p) == a:
                yield np.array([big_p], dtype=np.int64)
            return
        yield from self._affine_batches(big_p, ea.to_fraction(a), batch)

    def filtered(self, a, b, pair) -> np.ndarray:
        """Rows of iter_batches(a, b) pairing non-negatively with every column of ``pair``.

        ``pair`` is an int64 matrix (rank x m) applied to working coordinates.
        Uses the compiled kernel when numba is importable and all numbers
        fit, otherwise the streaming path.
        """
        pair = np.ascontiguousarray(pair, dtype=np.int64)
        fast = self._native_args(a, b)
        if fast == ():
            return np.zeros((0, len(self.g)), dtype=np.int64)
        if fast is None:
            kept = [blk[(blk @ pair >= 0).all(axis=1)] for blk in self.iter_batches(a, b, 4096)]
            return np.concatenate(kept) if kept else np.zeros((0, len(self.g)), dtype=np.int64)
        from ._native import filtered_slice
        cap = 1024
        while True:
            out = np.zeros((cap, len(self.g)), dtype=np.int64)
            kept, _ = filtered_slice(*fast, pair, out)
            if kept <= cap:
                return out[:kept]
            cap = kept

    def _native_args(self, a, b):
        if self.dual or len(self.kernel) < 2 or not _have_numba():
            return None
        q = ea.to_fraction(b) / self.step
        if q.denominator != 1:
            return ()
        big_p = [int(q) * x for x in self.unit]
        a = ea.to_fraction(a)
        hvec = [ea.dot(row, big_p) for row in self.kg]
        c = ea.vec_mat(hvec, self.h_inv)
        bound = ea.bilinear(big_p, self.g, big_p) - a + ea.dot(c, hvec)
        if bound < 0:
            return ()
        if self._base_plan is None:
            self._base_plan = _Plan(self.h, transform=self._transform())
        plan = self._base_plan.recentered(c)
        m = plan.scale * bound.denominator
        budget = int(bound * m)
        weights = [w * bound.denominator for w in plan.weights]
        tk = ea.mat_mul(plan.transform, self.kernel)
        ints = [budget, *weights, *plan.dens, *plan.const, *big_p] + \
            [x for r in plan.coef for x in r] + [x for r in tk for x in r]
        # squares of level values stay below the budget; leave room for sums
        if max(abs(int(x)) for x in ints) >= 1 << 30:
            return None
        i64 = lambda xs: np.array([int(x) for x in xs], dtype=np.int64)
        return (i64(plan.dens), np.array(plan.coef, dtype=np.int64), i64(plan.const),
                i64(weights), budget, np.array([[int(x) for x in r] for r in tk], dtype=np.int64),
                i64(big_p))


@lru_cache(maxsize=1)
def _have_numba() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


@lru_cache(maxsize=64)
def slice_enumerator(lat: Lattice, v0, dual: bool = False) -> SliceEnumerator:
    """Shared SliceEnumerator; building one costs a kernel basis and an LLL run."""
    return SliceEnumerator(lat, as_vector(v0), dual)


class PlaneSliceEnumerator(_AffineSlices):
    """Enumerate {v in L : <v,v> = a, <v,v0> = b0, <v,v1> = b1}.

    v0 and v1 span a hyperbolic plane, so each such set is a finite coset of
    a definite lattice of rank n - 2.
    """

    def __init__(self, lat: Lattice, v0, v1):
        self.lat = lat
        self.dual = False
        self.g = _working_gram(lat, False)
        self.v0, self.v1 = as_vector(v0), as_vector(v1)
        plane = [[lat.norm(self.v0), lat.inner(self.v0, self.v1)],
                 [lat.inner(self.v0, self.v1), lat.norm(self.v1)]]
        if ea.det(plane) >= 0:
            raise ValueError("anchors must span a hyperbolic plane")
        self.plane_inv = ea.inverse(plane)
        self.steps, cols = [], []
        for v in (self.v0, self.v1):
            ints, den = ea.scale_to_integers([ea.to_fraction(x) for x in lat.pairing_vector(v)])
            cg = 0
            for x in ints:
                cg = gcd(cg, x)
            self.steps.append(Fraction(cg, den))
            cols.append([x // cg for x in ints])
        h, t = ea.hnf_with_transform(ea.transpose(cols))
        self.image = [h[0], h[1]]                # values y.P of the rows t[0], t[1]
        self.image_inv = ea.inverse(self.image)
        self.units = [t[0], t[1]]
        self._setup_kernel(t[2:])

    def plane_norm(self, b0, b1) -> Fraction:
        """Norm of the component of v in the plane of the anchors."""
        return ea.bilinear([b0, b1], self.plane_inv, [b0, b1])

    def enumerate(self, a, b0, b1) -> list:
        a = ea.to_fraction(a)
        k = [ea.to_fraction(b0) / self.steps[0], ea.to_fraction(b1) / self.steps[1]]
        if any(x.denominator != 1 for x in k):
            return []
        c = ea.vec_mat(k, self.image_inv)
        if any(x.denominator != 1 for x in c):
            return []
        big_p = [int(c[0]) * x + int(c[1]) * y for x, y in zip(*self.units)]
        return self._affine(big_p, a)


def enum_norm_pairing(lat: Lattice, v0, a, b, dual: bool = False) -> list:
    """{v in L (or L dual) : <v,v> = a, <v,v0> = b}, sorted."""
    a = ea.to_fraction(a)
    if lat.even and not dual and a.denominator == 1 and int(a) % 2:
        return []
    return slice_enumerator(lat, v0, dual).enumerate(a, b)


def separating_pairing_bound(lat: Lattice, v0, v1, a) -> Fraction:
    """Upper bound B with b^2 < B for b = <v,v0> of any separating vector."""
    n0 = lat.norm(v0)
    n1 = lat.norm(v1)
    c = lat.inner(v0, v1)
    return -ea.to_fraction(a) * (c * c - n0 * n1) / n1


def enum_separating(lat: Lattice, v0, v1, a, dual: bool = False) -> list:
    """All v with <v,v> = a, <v,v0> > 0 and <v,v1> < 0."""
    a = ea.to_fraction(a)
    if a >= 0:
        raise ValueError("separating enumeration needs a negative norm")
    if lat.norm(v1) <= 0 or lat.norm(v0) <= 0 or lat.inner(v0, v1) <= 0:
        raise ValueError("anchors must lie in the same positive cone")
    v0 = as_vector(v0)
    v1 = as_vector(v1)
    if v0 == v1:
        return []
    bound = separating_pairing_bound(lat, v0, v1, a)
    out = []
    if dual or ea.rank([list(v0), list(v1)]) < 2:
        se = slice_enumerator(lat, v0, dual)
        # b > 0 and b^2 < bound
        for b in se.values_in_range(0, _sqrt_ceil(bound)):
            if b * b >= bound:
                continue
            for v in se.enumerate(a, b):
                if lat.inner(v, v1) < 0:
                    out.append(v)
        out.sort()
        return out
    # split by both pairings; each pair of values leaves a definite coset
    pse = PlaneSliceEnumerator(lat, v0, v1)
    bound1 = separating_pairing_bound(lat, v1, v0, a)
    s0 = _multiples_between(pse.steps[0], 0, _sqrt_ceil(bound))
    s1 = _multiples_between(pse.steps[1], -_sqrt_ceil(bound1), 0)
    for b0 in s0:
        if b0 * b0 >= bound:
            continue
        for b1 in s1:
            if b1 * b1 >= bound1 or pse.plane_norm(b0, b1) < a:
                continue
            out.extend(pse.enumerate(a, b0, b1))
    out.sort()
    return out


def _multiples_between(step, lo, hi) -> list:
    """Multiples of step strictly between lo and hi."""
    k0 = lo / step
    k1 = hi / step
    start = k0.numerator // k0.denominator + 1
    stop = -((-k1.numerator) // k1.denominator)
    return [k * step for k in range(start, stop)]


def _sqrt_ceil(x: Fraction) -> Fraction:
    """A rational >= sqrt(x) for x >= 0."""
    x = ea.to_fraction(x)
    if x <= 0:
        return Fraction(0)
    return Fraction(isqrt(x.numerator // x.denominator + 1) + 1)


def brute_force_box(gram, radius: int, predicate) -> list:
    """All integer vectors in [-radius, radius]^n satisfying predicate(v, gram)."""
    from itertools import product

    n = len(gram)
    out = []
    for v in product(range(-radius, radius + 1), repeat=n):
        if predicate(v, gram):
            out.append(tuple(v))
    return sorted(out)
