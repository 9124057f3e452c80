"""The binary Golay code, the Leech lattice and II_{1,25} = U + Leech.

Coordinates of Z^Omega are indexed by Omega = P^1(F_23) in the order
inf, 0, 1, ..., 22.  A vector of II_{1,25} is a triple (a, b, lam) with
(a, b) in the hyperbolic plane and lam in Z^Omega lying in the Leech
lattice; its form is a b' + a' b - (lam . lam') / 8.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import gcd

from . import exactalg as ea
from .lattice import Lattice, signature

OMEGA = ("inf",) + tuple(range(23))
INF = 0                      # coordinate index of the point at infinity
QUADRATIC_RESIDUES = tuple(sorted({(x * x) % 23 for x in range(1, 23)}))


def point_index(p) -> int:
    if p in ("inf", "\\infty", "oo", "∞"):
        return INF
    p = int(p)
    if not 0 <= p < 23:
        raise ValueError(f"{p} is not a point of P^1(F_23)")
    return p + 1


def subset_mask(points) -> int:
    m = 0
    for p in points:
        m |= 1 << point_index(p)
    return m


def mask_points(mask: int) -> list:
    return [OMEGA[i] for i in range(24) if mask >> i & 1]


def parse_octad(text: str) -> int:
    """Parse "{inf, 0, 1, 7, 12, 13, 14, 20}" (or with \\infty) into a bitmask."""
    body = text.strip().strip("{}")
    pts = [s.strip() for s in body.split(",") if s.strip()]
    if len(pts) != 8:
        raise ValueError(f"an octad has 8 points, got {len(pts)}")
    return subset_mask(pts)


def format_octad(mask: int) -> str:
    pts = mask_points(mask)
    return "{" + ", ".join("\\infty" if p == "inf" else str(p) for p in pts) + "}"


@dataclass(frozen=True)
class GolayCode:
    basis: tuple           # 12 bitmasks
    words: tuple           # all 4096 codewords
    octads: tuple          # the 759 weight-8 words, sorted

    def __contains__(self, mask: int) -> bool:
        return mask in self._word_set

    @property
    def _word_set(self):
        return _word_set(self.words)

    def weight_enumerator(self) -> dict:
        out = {}
        for w in self.words:
            k = bin(w).count("1")
            out[k] = out.get(k, 0) + 1
        return dict(sorted(out.items()))


@lru_cache(maxsize=4)
def _word_set(words):
    return frozenset(words)


def _reduce_basis(gens):
    basis = []
    for g in gens:
        for b in basis:
            g = min(g, g ^ b)
        if g:
            basis.append(g)
    return basis


@lru_cache(maxsize=1)
def build_golay() -> GolayCode:
    """Extended quadratic-residue code: translates of {0} + squares, made even at infinity."""
    gens = []
    for c in range(23):
        support = {c} | {(c + q) % 23 for q in QUADRATIC_RESIDUES}
        m = subset_mask(support)
        if len(support) % 2:
            m |= 1 << INF
        gens.append(m)
    gens.append((1 << 24) - 1)
    basis = _reduce_basis(gens)
    if len(basis) != 12:
        raise RuntimeError("Golay construction failed: wrong dimension")
    words = [0]
    for b in basis:
        words += [w ^ b for w in words]
    words.sort()
    code = GolayCode(tuple(basis), tuple(words),
                     tuple(sorted(w for w in words if bin(w).count("1") == 8)))
    if code.weight_enumerator() != {0: 1, 8: 759, 12: 2576, 16: 759, 24: 1}:
        raise RuntimeError("Golay construction failed: wrong weight enumerator")
    return code


def steiner_property(code: GolayCode) -> bool:
    """Every 5-subset of Omega lies in exactly one octad."""
    seen = set()
    for o in code.octads:
        pts = [i for i in range(24) if o >> i & 1]
        for five in combinations(pts, 5):
            if five in seen:
                return False
            seen.add(five)
    return len(seen) == 42504


# ----------------------------------------------------------------------
# Leech lattice


def octad_vector(mask: int) -> tuple:
    """2 nu_K in Z^Omega."""
    return tuple(2 if mask >> i & 1 else 0 for i in range(24))


def leech_form(x, y) -> Fraction:
    return Fraction(-sum(a * b for a, b in zip(x, y)), 8)


@dataclass(frozen=True)
class LeechLattice:
    lattice: Lattice               # Gram in the chosen basis
    basis: tuple                   # 24 rows in Z^Omega
    _inverse: tuple                # rational inverse of the basis matrix

    def coordinates(self, lam) -> tuple | None:
        """Basis coordinates of a Z^Omega vector, or None if not in the lattice."""
        c = ea.vec_mat(list(lam), [list(r) for r in self._inverse])
        if any(isinstance(x, Fraction) and x.denominator != 1 for x in c):
            return None
        return tuple(int(x) for x in c)

    def contains(self, lam) -> bool:
        return self.coordinates(lam) is not None

    def to_omega(self, coords) -> tuple:
        return tuple(ea.vec_mat(list(coords), [list(r) for r in self.basis]))


@lru_cache(maxsize=1)
def build_leech() -> LeechLattice:
    code = build_golay()
    gens = [list(octad_vector(o)) for o in code.octads]
    gens.append([-3] + [1] * 23)          # nu_Omega - 4 nu_inf
    basis = ea.hnf(gens)
    if len(basis) != 24:
        raise RuntimeError("Leech generators do not have full rank")
    # LLL so that every later enumeration starts from a reduced basis
    pos = [[-leech_form(u, v) for v in basis] for u in basis]
    basis = ea.mat_mul(ea.lll_gram(pos), basis)
    gram = [[leech_form(u, v) for v in basis] for u in basis]
    if any(x.denominator != 1 for r in gram for x in r):
        raise RuntimeError("Leech form is not integral on the generators")
    lat = Lattice(tuple(tuple(int(x) for x in r) for r in gram), name="Leech")
    if lat.det != 1 or not lat.even:
        raise RuntimeError("Leech lattice must be even unimodular")
    inv = ea.inverse(basis)
    leech = LeechLattice(lat, tuple(tuple(r) for r in basis), tuple(tuple(r) for r in inv))
    return leech


def leech_signature() -> tuple[int, int]:
    return signature(build_leech().lattice)


# ----------------------------------------------------------------------
# II_{1,25}


def ii_inner(u, v):
    """Form on (a, b, lam) triples with lam in Z^Omega."""
    a, b, lam = u
    a2, b2, lam2 = v
    return a * b2 + a2 * b + leech_form(lam, lam2)


def ii_norm(u):
    return ii_inner(u, u)


def ii_add(u, v, k=1):
    return (u[0] + k * v[0], u[1] + k * v[1], tuple(x + k * y for x, y in zip(u[2], v[2])))


def ii_scale(u, k):
    return (k * u[0], k * u[1], tuple(k * x for x in u[2]))


def ii_reflect(x, r):
    """Reflection of x in the (-2)-vector r."""
    return ii_add(x, r, ii_inner(x, r))


W0 = (1, 0, tuple([0] * 24))


def leech_root(lam) -> tuple:
    """r_0(lam) = (-1 - <lam,lam>/2, 1, lam), a Leech root for w_0."""
    n = leech_form(lam, lam)
    a = -1 - n / 2
    if a.denominator != 1:
        raise ValueError("lam is not a Leech vector")
    return (int(a), 1, tuple(lam))


def ii_to_vector(u) -> tuple:
    """Flatten (a, b, lam) into 26 integer coordinates in the basis (U, Leech basis)."""
    c = build_leech().coordinates(u[2])
    if c is None:
        raise ValueError("Leech component is not in the Leech lattice")
    return (u[0], u[1]) + c


def vector_to_ii(v) -> tuple:
    leech = build_leech()
    return (v[0], v[1], leech.to_omega(v[2:]))


@lru_cache(maxsize=1)
def ii_lattice() -> Lattice:
    """II_{1,25} in the basis (U basis, Leech basis)."""
    leech = build_leech().lattice
    n = 26
    g = [[0] * n for _ in range(n)]
    g[0][1] = g[1][0] = 1
    for i in range(24):
        for j in range(24):
            g[i + 2][j + 2] = leech.gram[i][j]
    return Lattice(tuple(tuple(r) for r in g), name="II_1_25")


def in_positive_closure(u) -> bool:
    """Whether u lies in the closure of the positive cone containing (1,1,0)."""
    if ii_norm(u) < 0:
        return False
    return ii_inner(u, (1, 1, tuple([0] * 24))) >= 0


def is_weyl(w) -> bool:
    """Primitive, isotropic, in the closed positive cone, with w-perp / w a Leech lattice."""
    a, b, lam = w
    leech = build_leech()
    if a == 0 and b == 0 and not any(lam):
        return False
    coords = leech.coordinates(lam)
    if coords is None:
        return False
    g = 0
    for x in (a, b) + coords:
        g = gcd(g, x)
    if g != 1:
        return False
    if ii_norm(w) != 0 or not in_positive_closure(w):
        return False
    quotient = isotropic_quotient(w)
    if quotient.rank != 24 or quotient.det != 1 or not quotient.even:
        return False
    if signature(quotient) != (0, 24):
        return False
    from .enumerate import enum_negdef
    return not enum_negdef(quotient, -2)


def isotropic_quotient(w) -> Lattice:
    """The lattice w-perp / Z w for a primitive isotropic w of II_{1,25}."""
    lat = ii_lattice()
    wv = ii_to_vector(w)
    perp = ea.integer_left_kernel([[x] for x in lat.pairing_vector(wv)])
    # w lies in perp; complete w to a basis of perp and drop it
    m = [list(r) for r in perp]
    sol = ea.solve_integral_left(m, list(wv))
    # sol[0] is the primitive coefficient vector of w; extend to unimodular
    coeff = sol[0]
    ext = _complete_basis(coeff)
    rows = ea.mat_mul(ext[1:], m)
    gram = ea.mat_mul(ea.mat_mul(rows, [list(r) for r in lat.gram]), ea.transpose(rows))
    return Lattice(tuple(tuple(r) for r in gram))


def _complete_basis(v) -> list:
    """Unimodular matrix whose first row is the primitive integer vector v."""
    n = len(v)
    h, t = ea.hnf_with_transform([[x] for x in v])
    # t v^T = (1, 0, ..., 0)^T, so v is the first row of t^{-1}^T ... use inverse
    ti = ea.inverse(t)
    # columns of ti: first column is v
    basis = [[int(ti[r][c]) for r in range(n)] for c in range(n)]
    if basis[0] != list(v):
        raise ValueError("vector is not primitive")
    return basis



def negative_leech_roots(p) -> list:
    """Leech roots r_0(lam) for w_0 with <r, p> < 0, as (a, b, lam) triples.

    p = (a, b, mu) must have b = <p, w_0> > 0.  The condition is the ball
    query N(lam - mu/b) < 2 - <p,p>/b^2 with N = -(,), answered by a
    centred short-vector enumeration in the Leech lattice.
    """
    from .enumerate import short_vectors

    a, b, mu = p
    if b <= 0:
        raise ValueError("point must pair positively with w_0")
    leech = build_leech()
    radius = 2 - Fraction(ii_norm(p)) / (b * b)
    if radius <= 0:
        return []
    center = ea.vec_mat([Fraction(x, 1) / b for x in mu], [list(r) for r in leech._inverse])
    gram = [[-x for x in r] for r in leech.lattice.gram]
    out = []
    for y in short_vectors(gram, radius, center=center):
        lam = leech.to_omega(y)
        r = leech_root(lam)
        if ii_inner(r, p) < 0:
            out.append(r)
    return out
