"""The two K3 Picard lattices: the Kummer lattice S16 and the 15-nodal lattice S15.

S16 is spanned inside II_{1,25} by the Leech roots of 32 octads (16 nodes
N0, Nij and 16 tropes Ti, Tij).  S15 is the orthogonal complement of N0
in S16, with its own named classes h4, E_delta, sigma(E_theta), h6.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from . import exactalg as ea
from .enumerate import enum_negdef
from .lattice import (DiscriminantGroup, Embedding, Lattice, as_vector,
                      discriminant_group, is_primitive, orthogonal_complement,
                      root_system_type, signature, sublattice)
from .leech import (build_golay, ii_lattice, ii_to_vector, leech_root,
                    octad_vector, parse_octad)

# octads attached to the 16 nodes and 16 tropes of the Kummer quartic
KUMMER_OCTADS = {
    "N0": "{inf, 0, 1, 7, 12, 13, 14, 20}",
    "N12": "{inf, 0, 1, 13, 15, 17, 18, 19}",
    "N13": "{inf, 0, 1, 6, 11, 14, 15, 16}",
    "N14": "{inf, 0, 1, 5, 10, 12, 16, 19}",
    "N15": "{inf, 0, 1, 7, 10, 11, 17, 22}",
    "N16": "{inf, 0, 1, 5, 6, 18, 20, 22}",
    "N23": "{inf, 0, 1, 8, 16, 17, 20, 21}",
    "N24": "{inf, 0, 1, 3, 7, 9, 16, 18}",
    "N25": "{inf, 0, 1, 8, 9, 14, 19, 22}",
    "N26": "{inf, 0, 1, 3, 12, 15, 21, 22}",
    "N34": "{inf, 0, 1, 5, 9, 11, 13, 21}",
    "N35": "{inf, 0, 1, 4, 6, 9, 12, 17}",
    "N36": "{inf, 0, 1, 4, 5, 7, 8, 15}",
    "N45": "{inf, 0, 1, 3, 4, 11, 19, 20}",
    "N46": "{inf, 0, 1, 4, 10, 14, 18, 21}",
    "N56": "{inf, 0, 1, 3, 6, 8, 10, 13}",
    "T1": "{inf, 0, 2, 3, 4, 8, 9, 21}",
    "T2": "{inf, 0, 2, 4, 5, 6, 10, 11}",
    "T3": "{inf, 0, 2, 3, 10, 18, 19, 22}",
    "T4": "{inf, 0, 2, 6, 8, 15, 17, 22}",
    "T5": "{inf, 0, 2, 5, 15, 16, 18, 21}",
    "T6": "{inf, 0, 2, 9, 11, 16, 17, 19}",
    "T12": "{inf, 0, 2, 7, 8, 10, 14, 16}",
    "T13": "{inf, 0, 2, 10, 12, 13, 17, 21}",
    "T14": "{inf, 0, 2, 3, 7, 11, 13, 15}",
    "T15": "{inf, 0, 2, 4, 12, 14, 15, 19}",
    "T23": "{inf, 0, 2, 6, 9, 13, 14, 18}",
    "T24": "{inf, 0, 2, 5, 8, 13, 19, 20}",
    "T25": "{inf, 0, 2, 4, 7, 17, 18, 20}",
    "T34": "{inf, 0, 2, 3, 6, 12, 16, 20}",
    "T35": "{inf, 0, 2, 11, 14, 20, 21, 22}",
    "T45": "{inf, 0, 2, 5, 7, 9, 12, 22}",
}

DUADS = tuple(combinations(range(1, 7), 2))


def duad_label(d) -> str:
    i, j = sorted(d)
    return f"{i}{j}"


@dataclass(frozen=True, eq=False)
class K3Bundle:
    """A Picard lattice S with its embedding into II_{1,25} and bookkeeping."""

    name: str
    S: Lattice
    embedding: Embedding            # S -> II_{1,25}
    complement: Embedding           # R -> II_{1,25}
    alpha: tuple                    # interior point of the chamber of w_0
    classes: dict = field(default_factory=dict)
    disc: DiscriminantGroup | None = None

    @property
    def R(self) -> Lattice:
        return self.complement.source

    def cls(self, label: str) -> tuple:
        return self.classes[label]

    def project(self, v26) -> tuple:
        """pr_S of a vector of II_{1,25} (26 integer coordinates)."""
        return self.embedding.project(v26)

    def project_R(self, v26) -> tuple:
        return self.complement.project(v26)

    def lift(self, sigma, rho=None) -> tuple:
        """e_S(sigma) + e_R(rho) in II_{1,25} coordinates (rational in general)."""
        out = self.embedding.image(sigma)
        if rho is not None:
            out = tuple(a + b for a, b in zip(out, self.complement.image(rho)))
        return as_vector(out)


def _check(cond: bool, message: str):
    if not cond:
        raise RuntimeError(f"fixture check failed: {message}")


@lru_cache(maxsize=1)
def build_s16() -> K3Bundle:
    code = build_golay()
    ii = ii_lattice()
    roots = {}
    for label, text in KUMMER_OCTADS.items():
        mask = parse_octad(text)
        _check(mask in code, f"{label} is not an octad")
        roots[label] = ii_to_vector(leech_root(octad_vector(mask)))
    labels = list(KUMMER_OCTADS)
    emb = sublattice(ii, [roots[k] for k in labels], name="S16")
    S = emb.source
    _check(S.rank == 17, "S16 must have rank 17")
    _check(is_primitive(emb), "S16 must be primitive in II_{1,25}")
    classes = {k: emb.preimage(roots[k]) for k in labels}
    classes["h4"] = as_vector(
        2 * a + b + c1 + c2 + c3 + c4 + c5
        for a, b, c1, c2, c3, c4, c5 in zip(
            classes["T1"], classes["N0"], classes["N12"], classes["N13"],
            classes["N14"], classes["N15"], classes["N16"]))
    comp = orthogonal_complement(emb, name="R16")
    w0 = (1, 0) + (0,) * 24
    alpha = emb.project(w0)
    disc = discriminant_group(S)
    bundle = K3Bundle("S16", S, emb, comp, alpha, classes, disc)
    _verify_s16(bundle)
    return bundle


def _verify_s16(b: K3Bundle):
    S = b.S
    h4 = b.cls("h4")
    _check(S.norm(h4) == 4, "h4^2 = 4")
    for k, v in b.classes.items():
        if k == "h4":
            continue
        _check(S.norm(v) == -2, f"{k} is a (-2)-class")
        _check(S.inner(h4, v) == (0 if k.startswith("N") else 2), f"degree of {k}")
    _check(sorted(b.disc.invariants) == [2, 2, 2, 2, 4], "discriminant (Z/2)^4 + Z/4")
    _check(b.R.rank == 9 and signature(b.R) == (0, 9), "R16 negative definite of rank 9")
    _check(S.norm(b.alpha) == 8 and all(isinstance(x, int) for x in b.alpha), "alpha16")


def h4_dual(b: K3Bundle) -> tuple:
    """h4' = 3 h4 - N0 - sum Nij, the plane class of the dual quartic."""
    vec = [3 * x for x in b.cls("h4")]
    for k in b.classes:
        if k.startswith("N"):
            vec = [x - y for x, y in zip(vec, b.cls(k))]
    return as_vector(vec)


@lru_cache(maxsize=1)
def build_s15() -> K3Bundle:
    s16 = build_s16()
    S16 = s16.S
    c = s16.classes
    add = lambda *vs: as_vector(sum(t) for t in zip(*vs))
    images = {"h4": c["h4"]}
    for d in DUADS:
        images[f"E{duad_label(d)}"] = c[f"N{duad_label(d)}"]
    for i, j in combinations(range(1, 6), 2):
        images[f"sE{i}{j}"] = c[f"T{i}{j}"]
    for i in range(1, 6):
        images[f"sE{i}6"] = add(c[f"T{i}"], c["N0"], c["T6"])
    # S15 = (Z N0)^perp inside S16
    n0 = c["N0"]
    perp = ea.integer_left_kernel([[x] for x in S16.pairing_vector(n0)])
    perp = ea.hnf(perp)
    gram = ea.mat_mul(ea.mat_mul(perp, [list(r) for r in S16.gram]), ea.transpose(perp))
    S15 = Lattice(tuple(tuple(r) for r in gram), name="S15")
    inner = Embedding.checked(S15, S16, perp)
    span = ea.hnf([list(v) for v in images.values()])
    _check(span == ea.hnf(perp), "the named classes span (Z N0)^perp")
    classes = {k: inner.preimage(v) for k, v in images.items()}
    # theta-indexed tropes and E_delta aliases
    emb = Embedding.checked(S15, s16.embedding.target,
                            ea.mat_mul(perp, [list(r) for r in s16.embedding.matrix]))
    _check(is_primitive(emb), "S15 primitive in II_{1,25}")
    comp = orthogonal_complement(emb, name="R15")
    w0 = (1, 0) + (0,) * 24
    alpha = emb.project(w0)
    disc = discriminant_group(S15)
    h6 = [3 * x for x in classes["h4"]]
    for d in DUADS:
        h6 = [x - y for x, y in zip(h6, classes[f"E{duad_label(d)}"])]
    classes["h6"] = as_vector(h6)
    bundle = K3Bundle("S15", S15, emb, comp, alpha, classes, disc)
    object.__setattr__(bundle, "_inner", inner)
    _verify_s15(bundle, s16)
    return bundle


def s15_in_s16() -> Embedding:
    b = build_s15()
    return b._inner  # type: ignore[attr-defined]


def _verify_s15(b: K3Bundle, s16: K3Bundle):
    S = b.S
    _check(S.rank == 16 and signature(S) == (1, 15), "S15 hyperbolic of rank 16")
    _check(sorted(b.disc.invariants) == [2, 2, 2, 2, 2, 4], "discriminant (Z/2)^5 + Z/4")
    _check(S.norm(b.alpha) == Fraction(17, 2), "alpha15^2 = 17/2")
    inner = b._inner  # type: ignore[attr-defined]
    a16 = inner.image(b.alpha)
    expect = as_vector(x + Fraction(y, 2) for x, y in zip(s16.alpha, s16.cls("N0")))
    _check(as_vector(a16) == expect, "alpha15 = alpha16 + N0/2")
    h4 = b.cls("h4")
    # h4 = 2 h6 - sum of the ten tropes
    v = [2 * x for x in b.cls("h6")]
    for theta in double_trios():
        v = [x - y for x, y in zip(v, trope(b, theta))]
    _check(as_vector(v) == h4, "h4 = 2 h6 - sum sigma(E_theta)")
    _check(b.R.rank == 10, "R15 has rank 10")


# ----------------------------------------------------------------------
# combinatorial names on S15


def trios():
    return tuple(combinations(range(1, 7), 3))


def double_trios() -> tuple:
    """The 10 double trios as (trio containing 6, complementary trio)."""
    out = []
    for t in trios():
        if 6 in t:
            rest = tuple(x for x in range(1, 7) if x not in t)
            out.append((t, rest))
    return tuple(out)


def trope_label_for(theta) -> str:
    """Label of sigma(E_theta): theta = (ij6)(klm) corresponds to sigma(E_ij)."""
    t = theta[0] if 6 in theta[0] else theta[1]
    i, j = sorted(x for x in t if x != 6)
    return f"sE{i}{j}"


def node(b: K3Bundle, d) -> tuple:
    return b.cls(f"E{duad_label(d)}")


def trope(b: K3Bundle, theta) -> tuple:
    return b.cls(trope_label_for(theta))


def complement_root_type(b: K3Bundle) -> str:
    roots = enum_negdef(b.R, -2)
    return root_system_type(b.R, roots)


def bundle_to_json(b: K3Bundle) -> dict:
    fs = ea.fraction_to_str
    return {
        "name": b.name,
        "lattice": b.S.to_json(),
        "embedding": [[fs(x) for x in r] for r in b.embedding.matrix],
        "alpha": [fs(x) for x in b.alpha],
        "alpha_norm": fs(b.S.norm(b.alpha)),
        "classes": {k: [fs(x) for x in v] for k, v in sorted(b.classes.items())},
        "discriminant": list(b.disc.invariants),
        "complement": {
            "rank": b.R.rank,
            "gram": [list(r) for r in b.R.gram],
            "root_type": complement_root_type(b),
        },
    }
