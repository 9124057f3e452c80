"""Geometry on a K3 Picard lattice and the named involutions of the 15-nodal quartic.

Nodes of the quartic are indexed by duads of {1..6}, trope-conics by double
trios.  Walls of the chamber D15 and the generators attached to its inner
walls are indexed by tags such as g5(1), g6({(123),(124)}), g8((12)),
g9([234156]) and g10([13526]).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations

import numpy as np

from . import exactalg as ea
from .enumerate import enum_separating, slice_enumerator
from .fixtures import K3Bundle, build_s15, duad_label, node, trope
from .lattice import (Isometry, Lattice, ade_string, as_vector, component_type,
                      dynkin_components, in_O_omega, is_integral, simple_roots)

SIX = (1, 2, 3, 4, 5, 6)


class K3Error(RuntimeError):
    pass


class NotNefError(K3Error):
    pass


class FixedComponentError(K3Error):
    pass


class InvolutionError(K3Error):
    pass


# ----------------------------------------------------------------------
# duads, trios, double trios, synthemes


def duads() -> tuple:
    return tuple(combinations(SIX, 2))


def complement(points) -> tuple:
    return tuple(x for x in SIX if x not in points)


def double_trio(trio) -> tuple:
    """Canonical form (trio containing 1, complementary trio)."""
    trio = tuple(sorted(trio))
    other = complement(trio)
    return (trio, other) if 1 in trio else (other, trio)


def double_trios() -> tuple:
    return tuple(sorted({double_trio(t) for t in combinations(SIX, 3)}))


def synthemes() -> tuple:
    out = set()
    for a, b in combinations(duads(), 2):
        if set(a) & set(b):
            continue
        c = complement(a + b)
        out.add(tuple(sorted((a, b, c))))
    return tuple(sorted(out))


def incident(syntheme, theta) -> bool:
    return all(len(set(d) & set(t)) == 1 for d in syntheme for t in theta)


def in_one_trio(duad, theta) -> bool:
    return any(set(duad) <= set(t) for t in theta)


# ----------------------------------------------------------------------
# graphs on six vertices a..f and their indexings

VERTICES = "abcdef"

GRAPH_EDGES = {
    "duad": ["ab"],
    "syntheme": ["ab", "cd", "ef"],
    "double_trio": ["ab", "bc", "ca", "de", "ef", "fd"],
    "tripod": ["be", "ef", "fc", "ed", "fd", "da"],
    "gamma7": ["be", "ef", "fc", "cb", "ed", "fd", "da"],
    "pentagon": ["ab", "bc", "cd", "de", "ea"],
}


def _edge_set(graph: str) -> frozenset:
    return frozenset(frozenset((VERTICES.index(e[0]), VERTICES.index(e[1])))
                     for e in GRAPH_EDGES[graph])


@lru_cache(maxsize=None)
def graph_symmetries(graph: str) -> tuple:
    """Vertex permutations (as index tuples) preserving the edge set."""
    edges = _edge_set(graph)
    out = []
    for p in permutations(range(6)):
        if all(frozenset((p[a], p[b])) in edges for a, b in map(tuple, edges)):
            out.append(p)
    return tuple(out)


def canonical_indexing(graph: str, labels) -> tuple:
    """Lexicographically least labeling (values of a..f) in the symmetry orbit."""
    labels = tuple(labels)
    if sorted(labels) != list(SIX):
        raise ValueError(f"{labels} is not a bijection onto 1..6")
    return min(tuple(labels[p[i]] for i in range(6)) for p in graph_symmetries(graph))


@lru_cache(maxsize=None)
def indexings(graph: str) -> tuple:
    """Indx of the graph, as canonical labelings."""
    return tuple(sorted({canonical_indexing(graph, p) for p in permutations(SIX)}))


def edge_duads(graph: str, labels) -> tuple:
    out = []
    for e in GRAPH_EDGES[graph]:
        a, b = labels[VERTICES.index(e[0])], labels[VERTICES.index(e[1])]
        out.append(tuple(sorted((a, b))))
    return tuple(sorted(out))


def _apply(labels, letters: str) -> tuple:
    return tuple(sorted(labels[VERTICES.index(ch)] for ch in letters))


THETA9 = (("aef", "dbc"), ("bdf", "eac"), ("cde", "fab"))
# the second pair reads {b,d,e},{a,c,f}: the two trios must be complementary
THETA10 = (("acd", "bef"), ("bde", "acf"), ("cea", "bdf"), ("dab", "cef"), ("ebc", "daf"))


def theta9(t) -> tuple:
    return tuple(sorted(double_trio(_apply(t, x)) for x, _ in THETA9))


def theta10(p) -> tuple:
    return tuple(sorted(double_trio(_apply(p, x)) for x, _ in THETA10))


def pentagon_from_five(labels5) -> tuple:
    """Complete [p(a)..p(e)] with p(f) and canonicalise."""
    labels5 = tuple(labels5)
    rest = complement(labels5)
    if len(rest) != 1:
        raise ValueError("a pentagon indexing needs five distinct labels")
    return canonical_indexing("pentagon", labels5 + rest)


# ----------------------------------------------------------------------
# tags of walls and generators


@dataclass(frozen=True, order=True)
class GeneratorTag:
    """family 1..4: outer walls; 5..10: inner walls and their generators."""

    family: int
    index: tuple

    def __str__(self) -> str:
        return self.format("g" if self.family >= 5 else "w")

    def format(self, prefix: str = "g") -> str:
        f, k = self.family, self.index
        if f in (5, 7):
            body = str(k[0])
        elif f == 6:
            body = "{" + ",".join(f"({''.join(map(str, t))})" for t in k) + "}"
        elif f in (2, 8):
            body = f"({duad_label(k)})"
        elif f == 9:
            body = "[" + "".join(map(str, k)) + "]"
        elif f == 10:
            body = "[" + "".join(map(str, k[:5])) + "]"
        elif f in (1, 4):
            body = "".join(f"({''.join(map(str, t))})" for t in k)
        elif f == 3:
            body = "".join(f"({duad_label(d)})" for d in k)
        else:
            raise ValueError(f"unknown family {f}")
        return f"{prefix}{f}({body})"

    @property
    def inner(self) -> bool:
        return self.family >= 5


def parse_tag(text: str) -> GeneratorTag:
    """Parse g8((12)), w9([234156]), \\gamma_{6}(\\{(123), (124)\\}) and the like."""
    text = text.replace("\\{", "{").replace("\\}", "}").replace("\\gamma", "g")
    text = text.replace("\\sb", "_")
    text = re.sub(r"\s+", "", text)
    m = re.match(r"^[gw]_?\{?(\d+)\}?\((.*)\)$", text)
    if not m:
        raise ValueError(f"cannot parse tag {text!r}")
    fam, body = int(m.group(1)), m.group(2)
    digit_groups = [tuple(int(c) for c in g) for g in re.findall(r"(\d+)", body)]
    if fam in (5, 7):
        index = (int(body),)
    elif fam == 6:
        t1, t2 = (double_trio(g)[0] for g in digit_groups)
        if t1 == t2:
            raise ValueError("g6 needs two distinct double trios")
        index = tuple(sorted((t1, t2)))
    elif fam in (2, 8):
        index = tuple(sorted(digit_groups[0]))
    elif fam == 9:
        index = canonical_indexing("tripod", digit_groups[0])
    elif fam == 10:
        index = pentagon_from_five(digit_groups[0])
    elif fam in (1, 4):
        index = double_trio(digit_groups[0])
    elif fam == 3:
        index = tuple(sorted(tuple(sorted(g)) for g in digit_groups))
    else:
        raise ValueError(f"unknown family {fam}")
    tag = GeneratorTag(fam, index)
    if tag not in set(all_tags()):
        raise ValueError(f"{text} does not name a wall")
    return tag


@lru_cache(maxsize=1)
def all_tags() -> tuple:
    tags = []
    tags += [GeneratorTag(1, th) for th in double_trios()]
    tags += [GeneratorTag(2, d) for d in duads()]
    tags += [GeneratorTag(3, s) for s in synthemes()]
    tags += [GeneratorTag(4, th) for th in double_trios()]
    tags += [GeneratorTag(5, (nu,)) for nu in SIX]
    tags += [GeneratorTag(6, (a[0], b[0])) for a, b in combinations(double_trios(), 2)]
    tags += [GeneratorTag(7, (nu,)) for nu in SIX]
    tags += [GeneratorTag(8, d) for d in duads()]
    tags += [GeneratorTag(9, t) for t in indexings("tripod")]
    tags += [GeneratorTag(10, p) for p in indexings("pentagon")]
    return tuple(tags)


def inner_tags() -> tuple:
    return tuple(t for t in all_tags() if t.inner)


def _crossing_duads(th1, th2) -> tuple:
    """The two duads of the form tau1 & tau2 with tau_i a trio of theta_i."""
    out = [tuple(sorted(set(a) & set(b))) for a in th1 for b in th2]
    return tuple(sorted(d for d in out if len(d) == 2))


def fingerprint(tag: GeneratorTag) -> tuple:
    """Pairings of the wall vector with the ten tropes and the fifteen nodes."""
    f, k = tag.family, tag.index
    dts = double_trios()
    ds = duads()
    if f in (1, 2):
        b = build_s15()
        return wall_fingerprint(trope(b, k) if f == 1 else node(b, k), b)
    if f == 3:
        r1 = [1 if incident(k, th) else 0 for th in dts]
        r2 = [1 if d in k else 0 for d in ds]
    elif f == 4:
        r1 = [2 if th == k else 0 for th in dts]
        r2 = [0 if in_one_trio(d, k) else 1 for d in ds]
    elif f == 5:
        r1 = [0] * 10
        r2 = [1 if k[0] in d else 0 for d in ds]
    elif f == 6:
        th1, th2 = double_trio(k[0]), double_trio(k[1])
        (i1, i2), (j1, j2) = _crossing_duads(th1, th2)
        four = {tuple(sorted(p)) for p in ((i1, j1), (i1, j2), (i2, j1), (i2, j2))}
        r1 = [1 if th in (th1, th2) else 0 for th in dts]
        r2 = [1 if d in four else 0 for d in ds]
    elif f == 7:
        r1 = [0] * 10
        r2 = [0 if k[0] in d else 1 for d in ds]
    elif f == 8:
        r1 = [0 if in_one_trio(k, th) else 1 for th in dts]
        r2 = [2 if d == k else 0 for d in ds]
    elif f == 9:
        th, de = theta9(k), edge_duads("tripod", k)
        r1 = [1 if x in th else 0 for x in dts]
        r2 = [1 if d in de else 0 for d in ds]
    elif f == 10:
        th, de = theta10(k), edge_duads("pentagon", k)
        r1 = [1 if x in th else 0 for x in dts]
        r2 = [1 if d in de else 0 for d in ds]
    else:
        raise ValueError(f"unknown family {f}")
    return tuple(r1) + tuple(r2)


def _reference_rows(b: K3Bundle) -> list:
    return [list(trope(b, th)) for th in double_trios()] + [list(node(b, d)) for d in duads()]


def index_wall(tag: GeneratorTag, bundle: K3Bundle | None = None) -> tuple:
    """The primitive defining vector (in S15-dual) of the wall with this tag."""
    b = bundle or build_s15()
    if tag.family == 1:
        return trope(b, tag.index)
    if tag.family == 2:
        return node(b, tag.index)
    S = b.S
    rows = ea.mat_mul(_reference_rows(b), [list(r) for r in S.gram])
    sol = ea.solve_linear(rows, list(fingerprint(tag)))
    if sol is None or sol[1]:
        raise K3Error(f"no unique vector with the fingerprint of {tag}")
    v = as_vector(sol[0])
    if not S.in_dual(v):
        raise K3Error(f"fingerprint of {tag} is not realised in the dual lattice")
    return v


@lru_cache(maxsize=1)
def _fingerprint_table() -> dict:
    return {fingerprint(t): t for t in all_tags()}


def wall_fingerprint(v, bundle: K3Bundle | None = None) -> tuple:
    b = bundle or build_s15()
    return tuple(b.S.inner(r, v) for r in _reference_rows(b))


def wall_index(v, bundle: K3Bundle | None = None) -> GeneratorTag:
    """Tag of the wall of D15 with defining vector v."""
    fp = wall_fingerprint(v, bundle)
    tag = _fingerprint_table().get(fp)
    if tag is None:
        raise K3Error(f"wall fingerprint {fp} matches no tag")
    return tag


# ----------------------------------------------------------------------
# nef classes, curves, double-plane involutions


def is_nef(bundle: K3Bundle, v, alpha=None) -> bool:
    """Whether v (positive norm) lies in the nef cone: no (-2)-class separates alpha from v."""
    S = bundle.S
    alpha = bundle.alpha if alpha is None else alpha
    if S.norm(v) <= 0 or S.inner(v, alpha) <= 0:
        raise K3Error("vector is outside the positive cone")
    return not enum_separating(S, alpha, v, -2)


def fixed_component_free(bundle: K3Bundle, h2) -> bool:
    """For a nef class of norm 2: no isotropic v with <v, h2> = 1."""
    S = bundle.S
    if S.norm(h2) != 2:
        raise K3Error("fixed-component test needs a class of norm 2")
    if not is_nef(bundle, h2):
        raise NotNefError("class is not nef")
    return not slice_enumerator(S, h2).enumerate(0, 1)


def rational_curves_up_to(bundle: K3Bundle, dmax: int, alpha=None) -> dict:
    """Smooth rational curve classes of each degree 1..dmax with respect to alpha.

    A (-2)-class of positive degree is effective; it is irreducible iff it
    pairs non-negatively with every curve of smaller degree.
    """
    S = bundle.S
    alpha = bundle.alpha if alpha is None else alpha
    se = slice_enumerator(S, alpha)
    gram = np.array([list(r) for r in S.gram], dtype=np.int64)
    curves = {}
    found = np.zeros((0, S.rank), dtype=np.int64)      # curves of smaller degree
    for d in range(1, dmax + 1):
        rows = se.filtered(-2, d, gram @ found.T)
        rows = rows[np.lexsort(rows.T[::-1])]
        curves[d] = [tuple(int(x) for x in r) for r in rows]
        found = np.concatenate([found, rows])
    return curves


def contracted_curves(bundle: K3Bundle, h2, alpha=None) -> list:
    """Smooth rational curves C with <C, h2> = 0 (h2 nef): simple roots of h2-perp."""
    S = bundle.S
    alpha = bundle.alpha if alpha is None else alpha
    roots = slice_enumerator(S, h2).enumerate(-2, 0)
    if not roots:
        return []
    return simple_roots(S, roots, functional=alpha)


def _diagram_involution(S: Lattice, simple, comp) -> dict:
    """-w_0 on one ADE component, as a permutation of its simple roots."""
    letter, rank = component_type(S, simple, comp)
    ident = {i: i for i in comp}
    nbrs = {i: [j for j in comp if j != i and S.inner(simple[i], simple[j]) != 0] for i in comp}
    if letter == "A" and rank >= 2:
        end = next(i for i in comp if len(nbrs[i]) == 1)
        chain, prev = [end], None
        while len(chain) < rank:
            nxt = next(j for j in nbrs[chain[-1]] if j != prev)
            prev = chain[-1]
            chain.append(nxt)
        return {a: b for a, b in zip(chain, reversed(chain))}
    if letter == "D" and rank % 2 == 1:
        branch = next(i for i in comp if len(nbrs[i]) == 3)
        tails = [j for j in nbrs[branch] if len(nbrs[j]) == 1]
        out = dict(ident)
        out[tails[0]], out[tails[1]] = tails[1], tails[0]
        return out
    if letter == "E" and rank == 6:
        branch = next(i for i in comp if len(nbrs[i]) == 3)
        arms = []
        for start in nbrs[branch]:
            arm, prev, cur = [start], branch, start
            while len(nbrs[cur]) == 2:
                cur, prev = next(j for j in nbrs[cur] if j != prev), cur
                arm.append(cur)
            arms.append(arm)
        long_arms = [a for a in arms if len(a) == 2]
        out = dict(ident)
        for x, y in zip(*long_arms):
            out[x], out[y] = y, x
        return out
    return ident


def double_plane_involution(bundle: K3Bundle, h2, alpha=None) -> tuple:
    """The deck involution of the double plane given by |h2|.

    Acts as the identity on h2, as -w_0 on the lattice of contracted curves
    and as -1 on the orthogonal complement of both.  Returns the isometry and
    the ADE type of the contracted configuration.
    """
    S = bundle.S
    h2 = as_vector(h2)
    if S.norm(h2) != 2:
        raise K3Error("a double-plane class has norm 2")
    if not is_nef(bundle, h2, alpha):
        raise NotNefError("class is not nef")
    if slice_enumerator(S, h2).enumerate(0, 1):
        raise FixedComponentError("linear system has a fixed component")
    simple = contracted_curves(bundle, h2, alpha)
    comps = dynkin_components(S, simple)
    perm = {}
    for comp in comps:
        perm.update(_diagram_involution(S, simple, comp))
    ade = ade_string(component_type(S, simple, c) for c in comps)
    fixed = [list(h2)] + [list(r) for r in simple]
    rows = ea.mat_mul(fixed, [list(r) for r in S.gram])
    rest = ea.left_kernel_rational(ea.transpose(rows))
    basis = fixed + rest
    images = [list(h2)] + [list(simple[perm[i]]) for i in range(len(simple))]
    images += [[-x for x in r] for r in rest]
    mat = ea.mat_mul(ea.inverse(basis), images)
    if not all(is_integral(r) for r in mat):
        raise InvolutionError("double-plane action is not integral")
    g = Isometry(S, [[int(x) for x in r] for r in mat])
    if not g.preserves_form() or not (g * g).is_identity():
        raise InvolutionError("double-plane action is not an involutive isometry")
    return g, ade


def degree(bundle: K3Bundle, g: Isometry) -> Fraction:
    """alpha-degree <alpha, alpha^g>."""
    a = bundle.alpha
    return Fraction(bundle.S.inner(a, g.apply(a)))


# ----------------------------------------------------------------------
# the generators gamma_5 .. gamma_10 on S15


def _sum(vectors):
    return as_vector(sum(x) for x in zip(*vectors))


def _lin(*terms):
    """Sum of coefficient * vector pairs."""
    n = len(terms[0][1])
    out = [Fraction(0)] * n
    for c, v in terms:
        for i in range(n):
            out[i] += c * v[i]
    return as_vector(out)


def _map_from_images(S: Lattice, sources, targets) -> Isometry:
    """The linear map sending each source vector to its target (sources span)."""
    idx = []
    span = []
    for i, v in enumerate(sources):
        trial = span + [list(v)]
        if ea.rank(trial) > len(span):
            idx.append(i)
            span = trial
    if len(idx) != S.rank:
        raise K3Error("source vectors do not span")
    mat = ea.mat_mul(ea.inverse(span), [list(targets[i]) for i in idx])
    for v, t in zip(sources, targets):
        if as_vector(ea.vec_mat(list(v), mat)) != as_vector(t):
            raise K3Error("images are not consistent with a linear map")
    if not all(is_integral(r) for r in mat):
        raise K3Error("map is not integral")
    return Isometry(S, [[int(x) for x in r] for r in mat])


def _sigma_pairs(nu: int):
    """The ten (N_k, T_k) pairs of nodes and tropes attached to nu."""
    out = []
    for d in duads():
        if nu in d:
            continue
        out.append((d, double_trio((nu,) + d)))
    return out


def gamma5(nu: int, bundle: K3Bundle | None = None) -> Isometry:
    b = bundle or build_s15()
    pairs = _sigma_pairs(nu)
    h4 = b.cls("h4")
    nodes = [node(b, d) for d, _ in pairs]
    tropes = [trope(b, th) for _, th in pairs]
    # coefficient 2 on the five nodes through nu and 1 on the other ten keeps norm 4
    image_h4 = _lin((4, h4), *[(-2, node(b, tuple(sorted((nu, j))))) for j in SIX if j != nu],
                    *[(-1, n) for n in nodes])
    sources = [h4] + nodes + tropes
    targets = [image_h4] + tropes + nodes
    return _map_from_images(b.S, sources, targets)


def gamma7(nu: int, bundle: K3Bundle | None = None) -> Isometry:
    b = bundle or build_s15()
    S = b.S
    r = _lin((2, b.cls("h4")), *[(-1, node(b, d)) for d, _ in _sigma_pairs(nu)])
    if S.norm(r) != -4:
        raise K3Error("Reye vector must have norm -4")
    rows = []
    for i in range(S.rank):
        e = [0] * S.rank
        e[i] = 1
        rows.append(_lin((1, e), (Fraction(S.inner(e, r)) / 2, r)))
    if not all(is_integral(x) for x in rows):
        raise K3Error("Reye reflection is not integral")
    return Isometry(S, [[int(x) for x in row] for row in rows])


def h2_gamma6(th1, th2, bundle: K3Bundle | None = None) -> tuple:
    b = bundle or build_s15()
    return _lin((1, b.cls("h6")), (-1, trope(b, th1)), (-1, trope(b, th2)))


def h2_gamma8(duad, bundle: K3Bundle | None = None) -> tuple:
    b = bundle or build_s15()
    return _lin((1, b.cls("h4")), (-1, node(b, duad)))


def h2_kantor(edges, bundle: K3Bundle | None = None) -> tuple:
    """2 h4 minus seven nodes."""
    b = bundle or build_s15()
    return _lin((2, b.cls("h4")), *[(-1, node(b, d)) for d in edges])


def h2_pentagon(labels, nu_edge: int, bundle: K3Bundle | None = None) -> tuple:
    b = bundle or build_s15()
    edges = edge_duads("pentagon", labels)
    return _lin((3, b.cls("h4")), *[(-2, node(b, d)) for d in edges],
                (1, node(b, edges[nu_edge])))


def gamma9_parts(t, theta_i) -> tuple:
    """(the gamma_6 pair, the seven Kantor edges) for tripod indexing t and theta_i in Theta9(t)."""
    thetas = theta9(t)
    if theta_i not in thetas:
        raise K3Error("theta is not in Theta9(t)")
    others = tuple(th for th in thetas if th != theta_i)
    abc = set(t[:3])
    duad = None
    for trio in theta_i:
        common = tuple(sorted(abc & set(trio)))
        if len(common) == 2:
            duad = common
    if duad is None:
        raise K3Error("no trio of theta_i meets {t(a),t(b),t(c)} in a duad")
    edges = tuple(sorted(set(edge_duads("tripod", t)) | {duad}))
    return others, edges


@lru_cache(maxsize=None)
def gamma(tag: GeneratorTag) -> Isometry:
    """The extra-automorphism attached to an inner wall of D15, acting on S15."""
    b = build_s15()
    f, k = tag.family, tag.index
    try:
        if f == 5:
            return gamma5(k[0], b)
        if f == 7:
            return gamma7(k[0], b)
        if f == 6:
            return double_plane_involution(b, h2_gamma6(double_trio(k[0]), double_trio(k[1]), b))[0]
        if f == 8:
            return double_plane_involution(b, h2_gamma8(k, b))[0]
        if f == 9:
            th = theta9(k)[0]
            pair, edges = gamma9_parts(k, th)
            g6 = gamma(GeneratorTag(6, tuple(sorted(x[0] for x in pair))))
            kantor = double_plane_involution(b, h2_kantor(edges, b))[0]
            return g6 * kantor
        if f == 10:
            return double_plane_involution(b, h2_pentagon(k, 0, b))[0]
    except K3Error as exc:
        raise K3Error(f"{tag}: {exc}") from exc
    raise ValueError(f"{tag} is not the tag of an inner wall")


def in_aut_lattice(g: Isometry, bundle: K3Bundle | None = None) -> bool:
    b = bundle or build_s15()
    return in_O_omega(g, b.disc, interior=b.alpha)
