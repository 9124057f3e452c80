"""Integral lattices with a fixed basis, their duals, isometries and embeddings.

Vectors are tuples of rational coordinates with respect to the lattice
basis; dual vectors use the same basis (their coordinates are simply
allowed to be fractional).  Isometries act on row vectors from the right,
so the matrix of ``g * h`` (first g, then h) is ``M_g @ M_h``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import gcd

from . import exactalg as ea


def as_vector(v) -> tuple:
    """Tuple of ints/Fractions, with integral Fractions turned into ints."""
    out = []
    for x in v:
        x = ea.to_fraction(x) if not isinstance(x, int) else x
        if isinstance(x, Fraction) and x.denominator == 1:
            x = x.numerator
        out.append(x)
    return tuple(out)


def is_integral(v) -> bool:
    return all(isinstance(x, int) or x.denominator == 1 for x in v)


@dataclass(frozen=True, eq=False)
class Lattice:
    gram: tuple
    name: str = ""
    labels: tuple | None = None

    def __post_init__(self):
        g = tuple(tuple(int(x) for x in row) for row in self.gram)
        object.__setattr__(self, "gram", g)
        n = len(g)
        if any(len(row) != n for row in g):
            raise ValueError("Gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(i)):
            raise ValueError("Gram matrix must be symmetric")
        if self.labels is not None and len(self.labels) != n:
            raise ValueError("one label per basis vector")
        if n and self.det == 0:
            raise ValueError("Gram matrix is degenerate")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @cached_property
    def det(self) -> int:
        return int(ea.det([list(r) for r in self.gram]))

    @property
    def even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    @cached_property
    def gram_inverse(self) -> tuple:
        return tuple(tuple(r) for r in ea.inverse([list(r) for r in self.gram]))

    def key(self) -> tuple:
        return self.gram

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.gram == other.gram

    def __hash__(self):
        return hash(self.gram)

    def inner(self, u, v):
        g = self.gram
        total = 0
        for i, x in enumerate(u):
            if x:
                row = g[i]
                total += x * sum(row[j] * y for j, y in enumerate(v) if y)
        return total

    def norm(self, v):
        return self.inner(v, v)

    def pairing_vector(self, v) -> list:
        """The row vector v G, so that <v, u> = (v G) . u."""
        return ea.vec_mat(list(v), [list(r) for r in self.gram])

    def in_dual(self, v) -> bool:
        return is_integral(self.pairing_vector(v))

    def dual_from_pairings(self, values) -> tuple:
        """The vector x of L tensor Q with <x, e_i> = values[i]."""
        return as_vector(ea.vec_mat(list(values), [list(r) for r in self.gram_inverse]))

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "gram": [list(r) for r in self.gram],
            "even": self.even,
            "basis_labels": list(self.labels) if self.labels else [f"e{i}" for i in range(self.rank)],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Lattice":
        lat = cls(tuple(tuple(r) for r in data["gram"]),
                  labels=tuple(data["basis_labels"]) if data.get("basis_labels") else None)
        if lat.rank != data.get("rank", lat.rank):
            raise ValueError("rank does not match Gram matrix")
        if "even" in data and bool(data["even"]) != lat.even:
            raise ValueError("evenness flag inconsistent with Gram diagonal")
        return lat


def signature(lat: Lattice) -> tuple[int, int]:
    """(positive, negative) inertia via exact congruence diagonalisation."""
    a = [[Fraction(x) for x in row] for row in lat.gram]
    n = len(a)
    pos = neg = 0
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][i] != 0), None)
        if piv is None:
            pair = next(((i, j) for i in range(k, n) for j in range(i + 1, n) if a[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            a[i] = [x + y for x, y in zip(a[i], a[j])]
            for row in a:
                row[i] += row[j]
            piv = i
        a[k], a[piv] = a[piv], a[k]
        for row in a:
            row[k], row[piv] = row[piv], row[k]
        d = a[k][k]
        if d > 0:
            pos += 1
        else:
            neg += 1
        for i in range(k + 1, n):
            f = a[i][k] / d
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
                for row in a:
                    row[i] -= f * row[k]
    return pos, neg


# ----------------------------------------------------------------------
# discriminant groups


@dataclass(frozen=True)
class DiscriminantGroup:
    lattice: Lattice
    invariants: tuple          # nontrivial invariant factors d_1 | d_2 | ...
    generators: tuple          # dual vectors, one per invariant factor
    q_values: tuple            # q(g_i) in [0, 2); empty for odd lattices
    b_values: tuple            # b(g_i, g_j) in [0, 1)
    _coord_matrix: tuple = field(repr=False, default=())   # G V restricted to generators

    @property
    def order(self) -> int:
        out = 1
        for d in self.invariants:
            out *= d
        return out

    def coordinates(self, x) -> tuple:
        """Coordinates of the class of a dual vector in the generator basis."""
        out = []
        for d, col in zip(self.invariants, self._coord_matrix):
            c = sum(ea.to_fraction(a) * b for a, b in zip(x, col))
            if c.denominator != 1:
                raise ValueError("vector is not in the dual lattice")
            out.append(int(c) % d)
        return tuple(out)

    def structure(self) -> str:
        """e.g. "(Z/2)^4 + Z/4"."""
        parts = []
        for d in sorted(set(self.invariants)):
            k = self.invariants.count(d)
            parts.append(f"(Z/{d})^{k}" if k > 1 else f"Z/{d}")
        return " + ".join(parts) if parts else "0"


def discriminant_group(lat: Lattice, with_form: bool = True) -> DiscriminantGroup:
    g = [list(r) for r in lat.gram]
    d, u, v = ea.smith_normal_form(g)
    n = lat.rank
    gens, inv, cols = [], [], []
    gv = ea.mat_mul(g, v)
    for i in range(n):
        di = abs(d[i][i])
        if di > 1:
            inv.append(di)
            gens.append(as_vector(Fraction(x, di) for x in u[i]))
            cols.append(tuple(gv[r][i] for r in range(n)))
    qs, bs = (), ()
    if with_form:
        if not lat.even:
            raise ValueError("discriminant quadratic form needs an even lattice")
        qs = tuple(lat.norm(x) % 2 for x in gens)
        bs = tuple(tuple(lat.inner(x, y) % 1 for y in gens) for x in gens)
    return DiscriminantGroup(lat, tuple(inv), tuple(gens), qs, bs, tuple(cols))


# ----------------------------------------------------------------------
# isometries


@dataclass(frozen=True, eq=False)
class Isometry:
    lattice: Lattice
    matrix: tuple

    def __post_init__(self):
        m = tuple(as_vector(r) for r in self.matrix)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def checked(cls, lat: Lattice, matrix) -> "Isometry":
        g = cls(lat, matrix)
        if not g.preserves_form():
            raise ValueError("matrix does not preserve the form")
        if not g.integral():
            raise ValueError("not an isometry of L")
        return g

    @classmethod
    def identity(cls, lat: Lattice) -> "Isometry":
        return cls(lat, ea.identity(lat.rank))

    def preserves_form(self) -> bool:
        m = [list(r) for r in self.matrix]
        g = [list(r) for r in self.lattice.gram]
        return ea.mat_mul(ea.mat_mul(m, g), ea.transpose(m)) == g

    def integral(self) -> bool:
        return all(is_integral(r) for r in self.matrix)

    def apply(self, v) -> tuple:
        return as_vector(ea.vec_mat(list(v), [list(r) for r in self.matrix]))

    def __mul__(self, other: "Isometry") -> "Isometry":
        """First self, then other."""
        return Isometry(self.lattice, ea.mat_mul([list(r) for r in self.matrix],
                                                 [list(r) for r in other.matrix]))

    def inverse(self) -> "Isometry":
        # g^{-1} = G M^t G^{-1} for an isometry
        g = [list(r) for r in self.lattice.gram]
        gi = [list(r) for r in self.lattice.gram_inverse]
        return Isometry(self.lattice, ea.mat_mul(ea.mat_mul(g, ea.transpose([list(r) for r in self.matrix])), gi))

    def __eq__(self, other):
        return isinstance(other, Isometry) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def is_identity(self) -> bool:
        n = len(self.matrix)
        return all(self.matrix[i][j] == (1 if i == j else 0) for i in range(n) for j in range(n))

    def power(self, k: int) -> "Isometry":
        base = self if k >= 0 else self.inverse()
        out = Isometry.identity(self.lattice)
        for _ in range(abs(k)):
            out = out * base
        return out

    def order(self, cap: int = 1000) -> int | None:
        g = self
        for k in range(1, cap + 1):
            if g.is_identity():
                return k
            g = g * self
        return None

    def to_json(self, lattice_id: str = "") -> dict:
        return {"lattice": lattice_id,
                "matrix": [[ea.fraction_to_str(x) for x in r] for r in self.matrix]}

    @classmethod
    def from_json(cls, lat: Lattice, data: dict) -> "Isometry":
        return cls.checked(lat, [[ea.to_fraction(x) for x in r] for r in data["matrix"]])


def reflection(lat: Lattice, r) -> Isometry:
    """x -> x - 2<x,r>/<r,r> r, checked to be integral on the lattice."""
    n = lat.norm(r)
    if n == 0:
        raise ValueError("cannot reflect in an isotropic vector")
    pv = lat.pairing_vector(r)
    rows = []
    for i in range(lat.rank):
        c = Fraction(-2 * pv[i]) / n
        rows.append([(1 if i == j else 0) + c * r[j] for j in range(lat.rank)])
    g = Isometry(lat, rows)
    if not g.integral():
        raise ValueError("not an isometry of L")
    return g


def in_O_omega(g: Isometry, disc: DiscriminantGroup | None = None,
               interior=None) -> bool:
    """True iff g acts as +1 or -1 on the discriminant group.

    If ``interior`` is given, also require that g preserves the positive
    cone containing it.
    """
    lat = g.lattice
    if interior is not None and lat.inner(interior, g.apply(interior)) <= 0:
        return False
    if disc is None:
        disc = discriminant_group(lat, with_form=False)
    if not disc.generators:
        return True
    for sign in (1, -1):
        if all(is_integral([a - sign * b for a, b in zip(g.apply(x), x)]) for x in disc.generators):
            return True
    return False


# ----------------------------------------------------------------------
# embeddings


@dataclass(frozen=True, eq=False)
class Embedding:
    source: Lattice
    target: Lattice
    matrix: tuple          # rows: images of the source basis in target coordinates

    def __post_init__(self):
        object.__setattr__(self, "matrix", tuple(as_vector(r) for r in self.matrix))

    @classmethod
    def checked(cls, source: Lattice, target: Lattice, matrix) -> "Embedding":
        e = cls(source, target, matrix)
        if not e.preserves_form():
            raise ValueError("embedding does not preserve the forms")
        return e

    def preserves_form(self) -> bool:
        m = [list(r) for r in self.matrix]
        gt = [list(r) for r in self.target.gram]
        return ea.mat_mul(ea.mat_mul(m, gt), ea.transpose(m)) == [list(r) for r in self.source.gram]

    def image(self, v) -> tuple:
        return as_vector(ea.vec_mat(list(v), [list(r) for r in self.matrix]))

    @cached_property
    def _pair_matrix(self):
        # columns: <x, e(s_j)> for target coordinates x
        gt = [list(r) for r in self.target.gram]
        return ea.mat_mul(gt, ea.transpose([list(r) for r in self.matrix]))

    def project(self, v) -> tuple:
        """Orthogonal projection of a target vector to source tensor Q."""
        pairings = ea.vec_mat(list(v), self._pair_matrix)
        return self.source.dual_from_pairings(pairings)

    def preimage(self, v):
        """Source coordinates of v if v lies in the rational span of the image."""
        x = ea.solve_left([list(r) for r in self.matrix], list(v))
        if x is None:
            return None
        return as_vector(x)


def orthogonal_complement(e: Embedding, name: str = "") -> Embedding:
    gt = [list(r) for r in e.target.gram]
    cols = ea.mat_mul(gt, ea.transpose([list(r) for r in e.matrix]))
    basis = ea.integer_left_kernel(cols)
    basis = ea.hnf(basis)
    lll = ea.lll_gram(_abs_gram(basis, gt)) if basis else []
    if basis:
        basis = ea.mat_mul(lll, basis)
    gram = ea.mat_mul(ea.mat_mul(basis, gt), ea.transpose(basis)) if basis else []
    return Embedding(Lattice(tuple(tuple(r) for r in gram), name=name), e.target, basis)


def _abs_gram(basis, gt):
    """Gram matrix made positive definite when it is definite (for LLL)."""
    gram = ea.mat_mul(ea.mat_mul(basis, gt), ea.transpose(basis))
    if gram[0][0] < 0:
        gram = [[-x for x in r] for r in gram]
    try:
        lat = Lattice(tuple(tuple(r) for r in gram))
    except ValueError:
        return ea.identity(len(basis))
    if signature(lat)[1] != 0:
        return ea.identity(len(basis))
    return gram


def is_primitive(e: Embedding) -> bool:
    m = [list(r) for r in e.matrix]
    if not all(is_integral(r) for r in m):
        return False
    return all(f == 1 for f in ea.invariant_factors(m)) and ea.rank(m) == len(m)


def sublattice(target: Lattice, vectors, name: str = "", labels=None) -> Embedding:
    """Embedding of the lattice spanned by integral vectors (HNF basis)."""
    basis = ea.hnf([list(v) for v in vectors])
    gt = [list(r) for r in target.gram]
    gram = ea.mat_mul(ea.mat_mul(basis, gt), ea.transpose(basis))
    return Embedding(Lattice(tuple(tuple(r) for r in gram), name=name, labels=labels), target, basis)


def saturation(vectors) -> list:
    """Basis of the primitive closure (Q-span intersected with Z^n)."""
    m = [list(v) for v in vectors]
    n = len(m[0])
    # integer vectors orthogonal to the span, then their orthogonal again
    perp = ea.integer_left_kernel(ea.transpose(m)) if ea.rank(m) < n else []
    if not perp:
        return ea.identity(n)
    return ea.hnf(ea.integer_left_kernel(ea.transpose(perp)))


# ----------------------------------------------------------------------
# root systems


def simple_roots(lat: Lattice, roots, functional=None) -> list:
    """Simple roots of a finite root system of (-2)-vectors.

    Positivity is decided by ``functional`` (a vector pairing nonzero with
    every root) or by a generic integer functional if omitted.
    """
    roots = [as_vector(r) for r in roots]
    if not roots:
        return []
    if functional is None:
        n = len(roots[0])
        for scale in range(1, 200):
            f = [scale ** (3 * i) + i for i in range(n)]
            if all(sum(a * b for a, b in zip(r, f)) != 0 for r in roots):
                break
        positive = [r for r in roots if sum(a * b for a, b in zip(r, f)) > 0]
    else:
        vals = [lat.inner(r, functional) for r in roots]
        if any(v == 0 for v in vals):
            raise ValueError("functional vanishes on a root")
        positive = [r for r, v in zip(roots, vals) if v > 0]
    pos_set = set(positive)
    simple = []
    for r in positive:
        decomposable = False
        for s in positive:
            diff = tuple(a - b for a, b in zip(r, s))
            if diff in pos_set:
                decomposable = True
                break
        if not decomposable:
            simple.append(r)
    return sorted(simple)


def dynkin_components(lat: Lattice, simple) -> list:
    """Connected components of the Dynkin graph as lists of indices into simple."""
    n = len(simple)
    adj = [[j for j in range(n) if j != i and lat.inner(simple[i], simple[j]) != 0] for i in range(n)]
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        stack, comp = [s], []
        seen[s] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in adj[i]:
                if not seen[j]:
                    seen[j] = True
                    stack.append(j)
        comps.append(sorted(comp))
    return comps


def component_type(lat: Lattice, simple, comp) -> tuple[str, int]:
    k = len(comp)
    edges = []
    for i, j in combinations(comp, 2):
        v = lat.inner(simple[i], simple[j])
        if v not in (0, 1, -1):
            raise ValueError(f"not a simply-laced ADE configuration: pairing {v}")
        if v:
            edges.append((i, j))
    deg = {i: 0 for i in comp}
    for i, j in edges:
        deg[i] += 1
        deg[j] += 1
    if len(edges) != k - 1:
        raise ValueError("Dynkin graph has a cycle: not of finite type")
    branch = [i for i in comp if deg[i] >= 3]
    if not branch:
        return "A", k
    if len(branch) > 1 or deg[branch[0]] > 3:
        raise ValueError("Dynkin graph is not of ADE type")
    b = branch[0]
    nbrs = {i: [] for i in comp}
    for i, j in edges:
        nbrs[i].append(j)
        nbrs[j].append(i)
    arms = []
    for start in nbrs[b]:
        length, prev, cur = 1, b, start
        while len(nbrs[cur]) == 2:
            nxt = nbrs[cur][0] if nbrs[cur][1] == prev else nbrs[cur][1]
            prev, cur = cur, nxt
            length += 1
        arms.append(length)
    arms.sort()
    if arms[0] == 1 and arms[1] == 1:
        return "D", k
    if arms[0] == 1 and arms[1] == 2 and arms[2] in (2, 3, 4):
        return "E", k
    raise ValueError("Dynkin graph is not of ADE type")


def ade_string(types) -> str:
    """Format a list of (letter, rank) pairs like "6A1+A3"."""
    order = {"A": 0, "D": 1, "E": 2}
    counts = {}
    for t in types:
        counts[t] = counts.get(t, 0) + 1
    parts = []
    for (letter, rk) in sorted(counts, key=lambda t: (order[t[0]], t[1])):
        c = counts[(letter, rk)]
        parts.append(f"{c if c > 1 else ''}{letter}{rk}")
    return "+".join(parts) if parts else "0"


def root_system_type(lat: Lattice, roots, functional=None) -> str:
    simple = simple_roots(lat, roots, functional)
    comps = dynkin_components(lat, simple)
    return ade_string(component_type(lat, simple, c) for c in comps)


def primitive_in_dual(lat: Lattice, v) -> tuple:
    """The primitive vector of the dual lattice on the ray of v (v nonzero)."""
    pv = lat.pairing_vector(v)
    w, _ = ea.scale_to_integers([ea.to_fraction(x) for x in pv])
    g = 0
    for x in w:
        g = gcd(g, x)
    w = [x // g for x in w]
    return lat.dual_from_pairings(w)


def dump_lattice(lat: Lattice) -> str:
    return json.dumps(lat.to_json(), sort_keys=True)
