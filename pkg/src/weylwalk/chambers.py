"""Chambers induced on S by Conway chambers of II_{1,25}.

A chamber is determined by a Weyl vector w.  Its walls are computed from
the Leech roots r = sigma + rho with sigma = pr_S(r), rho = pr_R(r): rho runs
through the finite set of vectors of the dual of R with norm in (-2, 0],
and for each rho the matching sigma lie on a finite slice of S-dual.
Redundant hyperplanes are removed with exact ray shooting and Farkas tests.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd, isqrt, lcm

import numpy as np

from . import exactalg as ea
from .enumerate import SliceEnumerator, enum_negdef, enum_negdef_upto
from .fixtures import K3Bundle
from .lattice import (Isometry, Lattice, as_vector, discriminant_group,
                      is_integral, primitive_in_dual)
from .leech import (W0, build_leech, ii_inner, ii_reflect, negative_leech_roots)

W0_VEC = (1, 0) + (0,) * 24


class ChamberError(RuntimeError):
    pass


# ----------------------------------------------------------------------
# conversions between 26 coordinates and (a, b, lam) triples


def vec_to_triple(v) -> tuple:
    leech = build_leech()
    lam = ea.vec_mat(list(v[2:]), [list(r) for r in leech.basis])
    return (v[0], v[1], as_vector(lam))


def triple_to_vec(t) -> tuple:
    leech = build_leech()
    c = ea.vec_mat(list(t[2]), [list(r) for r in leech._inverse])
    return as_vector((t[0], t[1], *c))


# ----------------------------------------------------------------------
# glue between S-dual and R-dual


class GlueData:
    """Short vectors of R-dual and the S-dual coset matching each R-dual class."""

    def __init__(self, bundle: K3Bundle):
        self.bundle = bundle
        R = bundle.R
        self.r_disc = discriminant_group(R, with_form=False)
        # coset representatives: project the standard basis of II_{1,25}
        reps = {}
        gens = []
        for i in range(26):
            e = [0] * 26
            e[i] = 1
            rho = bundle.project_R(e)
            sigma = bundle.project(e)
            gens.append((self.r_disc.coordinates(rho), sigma))
        zero = tuple(0 for _ in self.r_disc.invariants)
        reps[zero] = tuple([0] * bundle.S.rank)
        frontier = [zero]
        while frontier:
            nxt = []
            for c in frontier:
                for gc, gs in gens:
                    cc = tuple((x + y) % d for x, y, d in zip(c, gc, self.r_disc.invariants))
                    if cc not in reps:
                        reps[cc] = as_vector(a + b for a, b in zip(reps[c], gs))
                        nxt.append(cc)
            frontier = nxt
        if len(reps) != self.r_disc.order:
            raise ChamberError("projection of II_{1,25} does not cover R-dual / R")
        self.sigma_rep = reps
        rhos = enum_negdef_upto(R, -2, dual=True)
        self.rhos = [r for r in rhos if R.norm(r) > -2]

    def rho_class(self, rho) -> tuple:
        return self.r_disc.coordinates(rho)


@lru_cache(maxsize=8)
def glue_data(bundle: K3Bundle) -> GlueData:
    return GlueData(bundle)


# ----------------------------------------------------------------------
# walls and chambers


@dataclass(frozen=True)
class Wall:
    v: tuple            # primitive defining vector in S-dual
    n: Fraction         # <v, v>
    a: Fraction         # <v, w_S>
    root: tuple         # a Leech root (26 coordinates) projecting onto the ray of v
    outer: bool
    witness: tuple      # a point in the relative interior of the wall


@dataclass(eq=False)
class Chamber:
    bundle: K3Bundle
    weyl: tuple                 # 26 integer coordinates
    w_S: tuple
    walls: list
    interior: tuple

    @cached_property
    def wall_index(self) -> dict:
        return {w.v: i for i, w in enumerate(self.walls)}

    @cached_property
    def key(self) -> tuple:
        return tuple(sorted(w.v for w in self.walls))

    def contains_interior(self, x) -> bool:
        S = self.bundle.S
        return all(S.inner(w.v, x) > 0 for w in self.walls)

    def contains(self, x) -> bool:
        S = self.bundle.S
        return all(S.inner(w.v, x) >= 0 for w in self.walls)

    def profile(self) -> dict:
        """Counter of (n, a, outer) over the walls."""
        out = defaultdict(int)
        for w in self.walls:
            out[(w.n, w.a, w.outer)] += 1
        return dict(out)


def _is_outer(S: Lattice, v) -> bool:
    n = S.norm(v)
    k2 = Fraction(-2) / n
    num, den = k2.numerator, k2.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn != num or rd * rd != den:
        return False
    k = Fraction(rn, rd)
    return is_integral([k * x for x in v])


def classify_wall(bundle: K3Bundle, wall) -> str:
    v = wall.v if isinstance(wall, Wall) else wall
    return "outer" if _is_outer(bundle.S, v) else "inner"


def wall_candidates(bundle: K3Bundle, weyl) -> dict:
    """Primitive S-dual vectors of all Leech roots of w with negative-norm projection.

    Returns a dict v -> one Leech root (26 coordinates) realising it.
    """
    S = bundle.S
    glue = glue_data(bundle)
    w_S = bundle.project(weyl)
    w_R = bundle.project_R(weyl)
    if S.norm(w_S) <= 0:
        raise ChamberError("projection of the Weyl vector is not in the positive cone")
    groups = defaultdict(list)
    for rho in glue.rhos:
        key = (glue.rho_class(rho), bundle.R.norm(rho), bundle.R.inner(rho, w_R))
        groups[key].append(rho)
    se = SliceEnumerator(S, w_S)
    out = {}
    for (cls, rn, rw), rhos in sorted(groups.items()):
        offset = glue.sigma_rep[cls]
        for sigma in se.enumerate(-2 - rn, 1 - rw, offset=offset):
            v = primitive_in_dual(S, sigma)
            if v not in out:
                root = bundle.lift(sigma, rhos[0])
                if not is_integral(root):
                    raise ChamberError("glue condition violated")
                out[v] = root
    return out


class _RayShooter:
    """Exact first-hit computations for the cone {x : <v_i, x> >= 0}."""

    def __init__(self, S: Lattice, vectors, interior):
        self.S = S
        self.vectors = vectors
        rows = [S.pairing_vector(v) for v in vectors]
        if not all(is_integral(r) for r in rows):
            raise ChamberError("wall vectors must lie in the dual lattice")
        self.rows = [[int(x) for x in r] for r in rows]
        self.big = max((abs(x) for r in self.rows for x in r), default=0) > 2 ** 20
        self.A = np.array(self.rows, dtype=object if self.big else np.int64)
        self.interior = as_vector(interior)
        self.da = self._pair(self.interior)
        if any(d <= 0 for d in self.da):
            raise ChamberError("the given point is not interior to the candidate cone")

    def _pair(self, x) -> list:
        xi, den = ea.scale_to_integers([ea.to_fraction(t) for t in x])
        if self.big or max(abs(t) for t in xi) > 2 ** 30:
            vals = [sum(a * b for a, b in zip(r, xi)) for r in self.rows]
        else:
            vals = (self.A @ np.array(xi, dtype=np.int64)).tolist()
        return [Fraction(v, den) for v in vals]

    def first_hits(self, x) -> tuple:
        """(t, indices) of the constraints first met along alpha + t (x - alpha)."""
        dx = self._pair(x)
        best = None
        hits = []
        for i, (a, b) in enumerate(zip(self.da, dx)):
            if b < a:
                t = a / (a - b)
                if best is None or t < best:
                    best = t
                    hits = [i]
                elif t == best:
                    hits.append(i)
        return best, hits

    def point(self, x, t) -> tuple:
        return as_vector(a + t * (b - a) for a, b in zip(self.interior, x))


def irredundant_walls(S: Lattice, candidates: list, interior, rng: random.Random | None = None):
    """Indices of candidates defining facets of the cone, with relative-interior witnesses.

    Facets are certified by a unique first hit of a ray from the interior
    point; redundant candidates are certified by a Farkas combination of
    certified facets.
    """
    rng = rng or random.Random(0)
    shooter = _RayShooter(S, candidates, interior)
    n = len(candidates)
    facets = {}

    def shoot(x):
        t, hits = shooter.first_hits(x)
        if t is None:
            return None
        if len(hits) == 1:
            i = hits[0]
            if i not in facets:
                facets[i] = shooter.point(x, t)
            return i
        return None

    def perturb(x, scale):
        return as_vector(t + Fraction(rng.randint(-1000, 1000), 1000 * scale) for t in x)

    # cheap pass: shoot away from every candidate
    order = sorted(range(n), key=lambda i: shooter.da[i] ** 2 / -S.norm(candidates[i]))
    for i in order:
        v = candidates[i]
        # mirror image of the interior point in the hyperplane of v
        x = as_vector(a - 2 * shooter.da[i] / S.norm(v) * b for a, b in zip(shooter.interior, v))
        for attempt in range(3):
            if shoot(x) is not None:
                break
            x = perturb(x, 10 ** (attempt + 2))
    # exact pass
    for i in order:
        if i in facets:
            continue
        while True:
            cols = [candidates[j] for j in sorted(facets)]
            cols_pair = [S.pairing_vector(c) for c in cols]
            target = S.pairing_vector(candidates[i])
            inside, cert = ea.farkas_cone(cols_pair, target)
            if inside:
                break
            # cert . (v G) < 0 and cert . (f G) >= 0: cert is a point in coordinates
            x = as_vector(cert)
            base = as_vector(a + 0 for a in x)
            found = None
            for attempt in range(12):
                j = shoot(x)
                if j is not None:
                    found = j
                    break
                x = perturb(base, 10 ** (attempt + 3))
            if found is None:
                raise ChamberError("ray shooting failed to isolate a facet")
            if found == i:
                break
    return facets


def compute_walls(bundle: K3Bundle, weyl=W0_VEC, interior=None) -> Chamber:
    """The chamber induced by the Weyl vector ``weyl`` (26 integer coordinates)."""
    S = bundle.S
    weyl = as_vector(weyl)
    cands = wall_candidates(bundle, weyl)
    w_S = bundle.project(weyl)
    if interior is None:
        interior = w_S
    vecs = sorted(cands)
    if any(S.inner(v, interior) <= 0 for v in vecs):
        raise ChamberError("interior hint is not inside the chamber")
    facets = irredundant_walls(S, vecs, interior)
    walls = []
    for i in sorted(facets, key=lambda i: vecs[i]):
        v = vecs[i]
        y = facets[i]
        if S.norm(y) <= 0:
            raise ChamberError("facet witness left the positive cone")
        walls.append(Wall(v, Fraction(S.norm(v)), Fraction(S.inner(v, w_S)), cands[v],
                          _is_outer(S, v), y))
    walls.sort(key=lambda w: (w.outer is False, w.n, w.a, w.v))
    return Chamber(bundle, weyl, w_S, walls, as_vector(interior))


# ----------------------------------------------------------------------
# crossing a wall


def _reflect_down(p, max_steps: int = 10000) -> list:
    """Leech roots of w_0 used to reflect the triple p into the chamber of w_0, in order."""
    used = []
    for _ in range(max_steps):
        neg = negative_leech_roots(p)
        if not neg:
            return used
        r = min(neg, key=lambda r: (ii_inner(r, p), r))
        p = ii_reflect(p, r)
        used.append(r)
    raise ChamberError("Weyl walk did not terminate")


def _weyl_from_reflections(used) -> tuple:
    w = W0
    for r in reversed(used):
        w = ii_reflect(w, r)
    return triple_to_vec(w)


def weyl_walk(point26, max_steps: int = 10000) -> tuple:
    """A Weyl vector w (26 coordinates) whose Conway chamber contains the point.

    The point is reflected into the chamber of w_0 by Leech roots on which it
    is negative; the same reflections applied to w_0 in reverse order give w.
    """
    return _weyl_from_reflections(_reflect_down(vec_to_triple(point26), max_steps))


def _in_conway_chamber(point26, used) -> bool:
    """Whether the point lies in the Conway chamber of the Weyl vector built from ``used``."""
    p = vec_to_triple(point26)
    for r in used:
        p = ii_reflect(p, r)
    if p[1] <= 0:
        return False
    return not negative_leech_roots(p)


def point_beyond(chamber: Chamber, wall: Wall, t=Fraction(1, 8)) -> tuple:
    """A point just across ``wall``, still positive on every other wall."""
    S = chamber.bundle.S
    y = wall.witness
    alpha = chamber.interior
    while True:
        p = as_vector(a + t * (a - b) for a, b in zip(y, alpha))
        ok = S.inner(wall.v, p) < 0 and S.norm(p) > 0
        if ok:
            ok = all(S.inner(u.v, p) > 0 for u in chamber.walls if u.v != wall.v)
        if ok:
            return p
        t /= 2


def adjacent_weyl(chamber: Chamber, wall: Wall, verify: bool = True) -> tuple:
    """Weyl vector of the chamber adjacent across ``wall``.

    Returns (weyl, point) with point interior to the new chamber.  The new
    Conway chamber contains a point strictly beyond the wall; with
    ``verify`` it must also contain the wall's witness point, which lies in
    the relative interior of the wall, so the two induced chambers share it.
    """
    bundle = chamber.bundle
    t = Fraction(1, 8)
    for _ in range(40):
        p = point_beyond(chamber, wall, t)
        used = _reflect_down(vec_to_triple(bundle.lift(p)))
        w = _weyl_from_reflections(used)
        if not verify or _in_conway_chamber(bundle.lift(wall.witness), used):
            return w, p
        t = t / 4
    raise ChamberError("could not cross the wall")


def d_invariant(chamber: Chamber, weyl) -> Fraction:
    """<alpha, w'_S> for the interior point alpha of the chamber."""
    b = chamber.bundle
    return Fraction(b.S.inner(chamber.interior, b.project(weyl)))


# ----------------------------------------------------------------------
# isometries between chambers


def _int_rows(vectors):
    """Scale a list of rational vectors by one common denominator."""
    den = 1
    for v in vectors:
        den = lcm(den, ea.common_denominator(v))
    return [[int(x * den) for x in v] for v in vectors], den


def _pairing_matrix(S: Lattice, walls):
    """Integer matrix den * <v_i, v_j> and the scale den."""
    rows, vden = _int_rows([w.v for w in walls])
    vm = np.array(rows, dtype=object)
    gm = np.array([list(r) for r in S.gram], dtype=object)
    prod = vm.dot(gm).dot(vm.T)
    g = 0
    for x in prod.flat:
        g = gcd(g, int(x))
    g = gcd(g, vden * vden) or 1
    den = Fraction(vden * vden, g)
    return (prod // g).astype(np.int64), den


def _spanning_subset(vectors) -> list:
    chosen, span = [], []
    for i, v in enumerate(vectors):
        trial = span + [list(v)]
        if ea.rank(trial) > len(span):
            chosen.append(i)
            span = trial
    return chosen


class _WallMatcher:
    """Backtracking over wall bijections c1 -> c2 that preserve all pairings.

    The candidate images of every wall are refined after each choice.  A
    complete bijection comes from a unique rational isometry, which is kept
    when it is integral.
    """

    def __init__(self, c1: Chamber, c2: Chamber):
        S = c1.bundle.S
        self.S = S
        self.m = m = len(c1.walls)
        self.ok = m == len(c2.walls)
        if not self.ok:
            return
        self.p1, den1 = _pairing_matrix(S, c1.walls)
        self.p2, den2 = _pairing_matrix(S, c2.walls)
        s1, s2 = np.sort(self.p1, axis=1), np.sort(self.p2, axis=1)
        keys2 = defaultdict(list)
        for j in range(m):
            keys2[(self.p2[j, j], s2[j].tobytes())].append(j)
        cand = np.zeros((m, m), dtype=bool)
        for i in range(m):
            cand[i, keys2.get((self.p1[i, i], s1[i].tobytes()), [])] = True
        self.ok = den1 == den2 and bool(cand.any(axis=1).all())
        self.cand = cand
        basis_idx = _spanning_subset([w.v for w in c1.walls])
        if len(basis_idx) < S.rank:
            raise ChamberError("walls do not span the lattice")
        self.basis_idx = basis_idx
        binv = ea.inverse([list(c1.walls[i].v) for i in basis_idx])
        binv_int, self.binv_den = _int_rows(binv)
        self.binv = np.array(binv_int, dtype=object)
        self.v2 = [list(w.v) for w in c2.walls]

    def fix(self, cand, x, y):
        new = cand & (self.p1[:, x][:, None] == self.p2[:, y][None, :])
        new[:, y] = False
        new[x, :] = False
        new[x, y] = True
        return new

    def isometry(self, perm):
        if len(set(perm)) != self.m:
            return None
        image = np.array([self.v2[perm[i]] for i in self.basis_idx], dtype=object)
        prod = self.binv.dot(image).tolist()
        mat = [[Fraction(x) / self.binv_den for x in row] for row in prod]
        if all(x.denominator == 1 for row in mat for x in row):
            return Isometry(self.S, [[int(x) for x in row] for row in mat])
        return None

    def search(self, cand, limit=None) -> list:
        results = []

        def rec(cand):
            if limit is not None and len(results) >= limit:
                return
            counts = cand.sum(axis=1)
            if counts.min() == 0:
                return
            if counts.max() == 1:
                g = self.isometry(cand.argmax(axis=1).tolist())
                if g is not None:
                    results.append(g)
                return
            x = int(np.where(counts > 1, counts, self.m + 1).argmin())
            for y in np.flatnonzero(cand[x]).tolist():
                rec(self.fix(cand, x, y))

        if self.ok:
            rec(cand)
        return results


def isometries_between(c1: Chamber, c2: Chamber, limit: int | None = None) -> list:
    """Isometries of S mapping chamber c1 onto chamber c2 (all of them, or up to ``limit``)."""
    matcher = _WallMatcher(c1, c2)
    return matcher.search(matcher.cand, limit)


def automorphism_generators(chamber: Chamber) -> tuple[list, int]:
    """Generators of the stabiliser of the chamber in O(S), and its order.

    Walks down a chain of point stabilisers: at each level one isometry is
    searched for every image of the next base wall not yet in its orbit.
    """
    matcher = _WallMatcher(chamber, chamber)
    cand = matcher.cand
    gens = []
    order = 1
    while True:
        counts = cand.sum(axis=1)
        if counts.max() == 1:
            break
        x = int(np.where(counts > 1, counts, matcher.m + 1).argmin())
        level_gens = []
        perms = []
        orbit = {x}
        for y in np.flatnonzero(cand[x]).tolist():
            if y in orbit:
                continue
            found = matcher.search(matcher.fix(cand, x, y), limit=1)
            if not found:
                continue
            g = found[0]
            level_gens.append(g)
            perms.append(_wall_permutation(chamber, g))
            orbit = _orbit(x, perms)
        gens.extend(level_gens)
        order *= len(orbit)
        cand = matcher.fix(cand, x, x)
    return gens, order


def _wall_permutation(chamber: Chamber, g: Isometry) -> list:
    index = chamber.wall_index
    return [index[g.apply(w.v)] for w in chamber.walls]


def _orbit(x, perms) -> set:
    orbit = {x}
    frontier = [x]
    while frontier:
        nxt = []
        for i in frontier:
            for p in perms:
                j = p[i]
                if j not in orbit:
                    orbit.add(j)
                    nxt.append(j)
        frontier = nxt
    return orbit


def group_closure(lattice: Lattice, gens: list, expected: int | None = None) -> list:
    """All elements of the finite group generated by ``gens``."""
    n = lattice.rank
    ident = np.identity(n, dtype=np.int64)
    gmats = [np.array(g.matrix, dtype=np.int64) for g in gens]
    seen = {ident.tobytes(): ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for b in gmats:
                c = a @ b
                key = c.tobytes()
                if key not in seen:
                    seen[key] = c
                    nxt.append(c)
                    if expected is not None and len(seen) > expected:
                        raise ChamberError("group is larger than expected")
        frontier = nxt
    return [Isometry(lattice, [tuple(int(x) for x in row) for row in mat]) for mat in seen.values()]


def automorphisms(chamber: Chamber) -> list:
    gens, order = automorphism_generators(chamber)
    group = group_closure(chamber.bundle.S, gens, order)
    if len(group) != order:
        raise ChamberError("stabiliser chain and closure disagree")
    return group


def omega_part(bundle: K3Bundle, group: list) -> list:
    """Elements acting as +1 or -1 on the discriminant group."""
    gens = bundle.disc.generators
    if not gens:
        return list(group)
    rows, den = _int_rows(gens)
    x = np.array(rows, dtype=np.int64)
    out = []
    for g in group:
        gx = x @ np.array(g.matrix, dtype=np.int64)
        if not ((gx - x) % den).any() or not ((gx + x) % den).any():
            out.append(g)
    return out


def wall_orbits(chamber: Chamber, gens: list) -> list:
    """Orbits of the walls under the group generated by ``gens``.

    Each orbit is a sorted list of wall indices; orbits are ordered with the
    outer ones first, then by (a, n, size).
    """
    perms = [_wall_permutation(chamber, g) for g in gens]
    seen = set()
    orbits = []
    for i in range(len(chamber.walls)):
        if i in seen:
            continue
        orb = _orbit(i, perms)
        seen |= orb
        orbits.append(sorted(orb))

    def key(orb):
        w = chamber.walls[orb[0]]
        return (not w.outer, w.a, w.n, len(orb), orb[0])

    return sorted(orbits, key=key)


# ----------------------------------------------------------------------
# faces of codimension 2


@dataclass(frozen=True)
class Face2:
    walls: tuple        # (i, j) with i < j, indices into chamber.walls
    inner: bool


def _hyperplane_lattice(S: Lattice, v):
    """Basis (rows) of the sublattice of S orthogonal to v, and its Gram matrix."""
    pv, _ = ea.scale_to_integers([ea.to_fraction(x) for x in S.pairing_vector(v)])
    basis = ea.integer_left_kernel([[x] for x in pv])
    gram = ea.mat_mul(ea.mat_mul(basis, [list(r) for r in S.gram]), ea.transpose(basis))
    return basis, Lattice(tuple(tuple(int(x) for x in r) for r in gram))


def faces_on_wall(chamber: Chamber, i: int) -> list:
    """Indices j such that walls i and j meet in a face of codimension 2.

    The other walls are restricted to the hyperplane of wall i; the facets
    of the restricted cone are found with the same ray shooting as the walls
    themselves, starting from the witness point of wall i.
    """
    S = chamber.bundle.S
    wall = chamber.walls[i]
    basis, sub = _hyperplane_lattice(S, wall.v)
    g = [list(r) for r in S.gram]
    bg = ea.mat_mul(basis, g)
    rays = {}
    for j, other in enumerate(chamber.walls):
        if j == i:
            continue
        f = ea.vec_mat(list(other.v), ea.transpose(bg))     # <b_k, v_j> for each basis row
        if not any(f):
            raise ChamberError("two walls share a hyperplane")
        f = tuple(ea.primitive_integer_vector([ea.to_fraction(x) for x in f]))
        u = sub.dual_from_pairings(f)
        if sub.norm(u) >= 0:
            continue
        rays.setdefault(u, []).append(j)
    inside = ea.solve_left([list(r) for r in basis], list(wall.witness))
    if inside is None:
        raise ChamberError("witness point is not on its wall")
    y = as_vector(inside)
    cands = sorted(rays)
    facets = irredundant_walls(sub, cands, y)
    out = []
    for k in facets:
        js = rays[cands[k]]
        if len(js) != 1:
            raise ChamberError("a codimension-2 face lies on more than two walls")
        out.append(js[0])
    return sorted(out)


def face_is_inner(S: Lattice, v1, v2) -> bool:
    """A face is outer iff a (-2)-vector of S lies in the plane spanned by its two walls."""
    rows = [S.pairing_vector(v1), S.pairing_vector(v2)]
    face_space = ea.left_kernel_rational(ea.transpose(rows))     # y with <y, v1> = <y, v2> = 0
    gy = ea.mat_mul(face_space, [list(r) for r in S.gram])
    plane = ea.integer_left_kernel(ea.transpose([ea.primitive_integer_vector(r) for r in gy]))
    gram = ea.mat_mul(ea.mat_mul(plane, [list(r) for r in S.gram]), ea.transpose(plane))
    lat = Lattice(tuple(tuple(int(x) for x in r) for r in gram))
    return not enum_negdef(lat, -2)


def faces_codim2(chamber: Chamber, gens: list | None = None) -> list:
    """All codimension-2 faces, as Face2 records sorted by wall pair.

    With ``gens`` (symmetries of the chamber) faces are computed on one wall
    per orbit and spread by the group; inner/outer is decided per face orbit.
    """
    S = chamber.bundle.S
    m = len(chamber.walls)
    if not gens:
        pairs = set()
        for i in range(m):
            for j in faces_on_wall(chamber, i):
                pairs.add((min(i, j), max(i, j)))
        return [Face2(p, face_is_inner(S, chamber.walls[p[0]].v, chamber.walls[p[1]].v))
                for p in sorted(pairs)]
    perms = [_wall_permutation(chamber, g) for g in gens]
    pairs = set()
    for orb in wall_orbits(chamber, gens):
        i = orb[0]
        for j in faces_on_wall(chamber, i):
            pairs.add((min(i, j), max(i, j)))
    # close under the group
    frontier = list(pairs)
    while frontier:
        nxt = []
        for a, b in frontier:
            for p in perms:
                q = (min(p[a], p[b]), max(p[a], p[b]))
                if q not in pairs:
                    pairs.add(q)
                    nxt.append(q)
        frontier = nxt
    inner = {}
    for orb in face_orbits(sorted(pairs), perms):
        a, b = orb[0]
        flag = face_is_inner(S, chamber.walls[a].v, chamber.walls[b].v)
        for q in orb:
            inner[q] = flag
    return [Face2(p, inner[p]) for p in sorted(pairs)]


def face_orbits(pairs, perms) -> list:
    """Orbits of wall pairs under wall permutations; each orbit sorted, representative first."""
    pairs = sorted(pairs)
    seen = set()
    out = []
    for start in pairs:
        if start in seen:
            continue
        orb = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for a, b in frontier:
                for p in perms:
                    q = (min(p[a], p[b]), max(p[a], p[b]))
                    if q not in orb:
                        orb.add(q)
                        nxt.append(q)
            frontier = nxt
        seen |= orb
        out.append(sorted(orb))
    return out


# ----------------------------------------------------------------------
# serialisation


def chamber_to_json(chamber: Chamber) -> dict:
    fs = ea.fraction_to_str
    return {
        "weyl": [int(x) for x in chamber.weyl],
        "w_S": [fs(x) for x in chamber.w_S],
        "interior": [fs(x) for x in chamber.interior],
        "walls": [{"v": [fs(x) for x in w.v], "n": fs(w.n), "a": fs(w.a),
                   "root": [fs(x) for x in w.root], "outer": w.outer,
                   "witness": [fs(x) for x in w.witness]} for w in chamber.walls],
    }


def chamber_from_json(bundle: K3Bundle, data: dict) -> Chamber:
    fr = ea.to_fraction

    def vec(xs):
        return as_vector(fr(x) for x in xs)

    walls = [Wall(vec(w["v"]), fr(w["n"]), fr(w["a"]), vec(w["root"]), bool(w["outer"]),
                  vec(w["witness"])) for w in data["walls"]]
    return Chamber(bundle, tuple(int(x) for x in data["weyl"]), vec(data["w_S"]), walls,
                   vec(data["interior"]))
