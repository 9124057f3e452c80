"""Generators and defining relations of Aut(Y) from one induced chamber.

Words follow the convention (g_m, ..., g_1): the chamber reached after i
steps is D0^(g_i ... g_1), and since isometries act on row vectors from the
right, the product g_i ... g_1 applies g_i first.  Evaluating a word is
therefore the plain matrix product in the listed order.
"""

from __future__ import annotations

import random
import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exactalg as ea
from .chambers import (Chamber, automorphism_generators, face_orbits, group_closure,
                       omega_part, _wall_permutation)
from .enumerate import enum_negdef, enum_separating
from .fixtures import K3Bundle
from .k3 import gamma, in_aut_lattice, parse_tag, wall_index
from .lattice import Isometry, as_vector, primitive_in_dual
from .leech import ii_lattice


class AutGroupError(RuntimeError):
    pass


class ConditionError(AutGroupError):
    """A hypothesis of the generator theorem fails."""


class MembershipError(AutGroupError):
    """The isometry is not an automorphism of the surface."""


Letter = tuple      # (GeneratorTag, +1 or -1)


# ----------------------------------------------------------------------
# words


def format_word(word) -> str:
    parts = []
    for tag, e in word:
        parts.append(str(tag) if e == 1 else f"{tag}^-1")
    return "(" + ", ".join(parts) + ")"


def _split_top(text: str) -> list:
    """Split on commas that are not nested in brackets."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip():
        out.append("".join(cur))
    return out


def parse_word(text: str) -> tuple:
    """Parse "(g7(2), g5(1)^-1, ...)"; LaTeX spellings of the tags are accepted."""
    text = text.replace("\\{", "{").replace("\\}", "}")
    text = re.sub(r"\\mystrutd\{[^}]*\}", "", text).strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    word = []
    for part in _split_top(text):
        part = part.strip()
        e = 1
        m = re.match(r"^(.*)\^\{?-1\}?$", part)
        if m:
            part, e = m.group(1), -1
        word.append((parse_tag(part), e))
    return tuple(word)


def evaluate(word, gens: "GeneratorSystem") -> Isometry:
    out = Isometry.identity(gens.lattice)
    for tag, e in word:
        out = out * (gens.maps[tag] if e == 1 else gens.inverse_map(tag))
    return out


def invert_word(word, gens: "GeneratorSystem | None" = None) -> tuple:
    """The inverse word; with ``gens`` the letters are rewritten with positive exponents."""
    out = []
    for tag, e in reversed(word):
        if gens is not None and e == 1:
            out.append((gens.inverse[tag], 1))
        elif gens is not None:
            out.append((tag, 1))
        else:
            out.append((tag, -e))
    return tuple(out)


def positive_word(word, gens: "GeneratorSystem") -> tuple:
    """Rewrite letters g^-1 as the generator equal to the inverse."""
    return tuple((t, 1) if e == 1 else (gens.inverse[t], 1) for t, e in word)


def same_up_to_rotation(w1, w2, gens: "GeneratorSystem") -> bool:
    """Equal as cyclic words, possibly after inverting one of them."""
    a = positive_word(w1, gens)
    if len(a) != len(w2):
        return False
    for b in (positive_word(w2, gens), invert_word(positive_word(w2, gens), gens)):
        for k in range(len(a)):
            if a[k:] + a[:k] == b:
                return True
    return False


# ----------------------------------------------------------------------
# integer matrices with an overflow guard


_LIMIT = 2 ** 62


def _mm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.dtype == object or b.dtype == object:
        return np.dot(a.astype(object), b.astype(object))
    bound = float(np.abs(a).max(initial=0)) * float(np.abs(b).max(initial=0)) * a.shape[1]
    if bound >= _LIMIT:
        return np.dot(a.astype(object), b.astype(object))
    return a @ b


def _as_int_matrix(g: Isometry) -> np.ndarray:
    return np.array([[int(x) for x in r] for r in g.matrix], dtype=np.int64)


# ----------------------------------------------------------------------
# the generator loop


@dataclass
class GeneratorSystem:
    """Generators g_w for the inner walls of a chamber D0 with trivial Aut(Y, D0)."""

    chamber: Chamber
    tags: tuple                 # tag of each wall, in chamber.walls order
    maps: dict                  # inner tag -> Isometry
    inverse: dict = field(default_factory=dict)     # tag -> tag of the inverse
    report: dict = field(default_factory=dict)

    def __post_init__(self):
        self.wall_of = {t: i for i, t in enumerate(self.tags)}
        self._mats = {t: _as_int_matrix(g) for t, g in self.maps.items()}
        if not self.inverse:
            self.inverse = _inverse_tags(self._mats)

    @property
    def lattice(self):
        return self.chamber.bundle.S

    def inverse_map(self, tag) -> Isometry:
        return self.maps[self.inverse[tag]]

    def matrix(self, tag) -> np.ndarray:
        return self._mats[tag]

    def is_outer(self, i: int) -> bool:
        return self.chamber.walls[i].outer

    def inner_tags(self) -> list:
        return sorted(self.maps)


def _inverse_tags(mats: dict) -> dict:
    ident = np.identity(len(next(iter(mats.values()))), dtype=np.int64)
    out = {}
    for t, m in mats.items():
        # M^-1 is found among the generators by testing M @ X = 1
        for u, x in mats.items():
            if (_mm(m, x) == ident).all():
                out[t] = u
                break
    return out


def wall_tags(chamber: Chamber) -> tuple:
    return tuple(wall_index(w.v, chamber.bundle) for w in chamber.walls)


class AdjacencyTest:
    """Whether D0^g is the chamber across wall i.

    -v_i must be a wall of D0^g and the witness point of wall i must be
    strictly positive on all other walls of D0^g; then both chambers
    contain a neighbourhood of that point in the hyperplane, on opposite
    sides.
    """

    def __init__(self, chamber: Chamber):
        self.chamber = chamber
        vs = [ea.to_fraction(x) for w in chamber.walls for x in w.v]
        den = ea.common_denominator(vs)
        self.walls = np.array([[int(x * den) for x in w.v] for w in chamber.walls], dtype=np.int64)
        gram = [list(r) for r in chamber.bundle.S.gram]
        rows = []
        for w in chamber.walls:
            ints, _ = ea.scale_to_integers([ea.to_fraction(x) for x in w.witness])
            rows.append([int(x) for x in ea.vec_mat(ints, gram)])
        self.witness_pairings = np.array(rows, dtype=np.int64).T

    def __call__(self, i: int, g: Isometry) -> bool:
        images = _mm(self.walls, _as_int_matrix(g))
        hit = (images == -self.walls[i]).all(axis=1)
        if hit.sum() != 1:
            return False
        values = _mm(images, self.witness_pairings[:, i:i + 1])[:, 0]
        values[int(hit.argmax())] = 1
        return bool((values > 0).all())


def maps_to_adjacent(chamber: Chamber, i: int, g: Isometry) -> bool:
    return AdjacencyTest(chamber)(i, g)


def check_condition1(bundle: K3Bundle) -> bool:
    """R cannot be embedded in the Leech lattice; a (-2)-vector in R suffices."""
    return bool(enum_negdef(bundle.R, -2))


def chamber_symmetries(chamber: Chamber) -> tuple:
    """(generators of O(S, D0), its order, the elements of Aut(Y, D0))."""
    gens, order = automorphism_generators(chamber)
    group = group_closure(chamber.bundle.S, gens, order)
    return gens, order, omega_part(chamber.bundle, group)


def run_borcherds(chamber: Chamber, generator_map=None, symmetries=None, pmap=None) -> tuple:
    """Verify the hypotheses of the generator theorem and build the g_w.

    ``generator_map`` sends a wall tag to its candidate isometry (the
    default is the explicit K3 construction on S15); ``pmap`` is a
    map-like callable used to build them in parallel.  Returns
    (GeneratorSystem or None, report).  When Aut(Y, D0) is not trivial the
    report says so and no generators are built.
    """
    bundle = chamber.bundle
    report = {"surface": bundle.name, "walls": len(chamber.walls),
              "inner_walls": sum(1 for w in chamber.walls if not w.outer)}
    report["condition1"] = check_condition1(bundle)
    if symmetries is None:
        symmetries = chamber_symmetries(chamber)
    _, order, aut_d0 = symmetries
    report["chamber_symmetries"] = order
    report["aut_d0"] = len(aut_d0)
    report["condition4"] = len(aut_d0) == 1
    if not report["condition1"]:
        raise ConditionError("R embeds in the Leech lattice")
    if not report["condition4"]:
        return None, report
    generator_map = generator_map or gamma
    tags = wall_tags(chamber)
    inner = [(i, t) for i, (w, t) in enumerate(zip(chamber.walls, tags)) if not w.outer]
    try:
        built = list((pmap or map)(generator_map, [t for _, t in inner]))
    except Exception as exc:
        raise ConditionError(f"a generator could not be built: {exc}") from exc
    adjacent = AdjacencyTest(chamber)
    maps = {}
    for (i, t), g in zip(inner, built):
        if not in_aut_lattice(g, bundle):
            raise ConditionError(f"generator for {t} is not in O(S)^omega")
        if not adjacent(i, g):
            raise ConditionError(f"generator for {t} does not reach the adjacent chamber")
        maps[t] = g
    report["condition3"] = True
    report["generators"] = len(maps)
    return GeneratorSystem(chamber, tags, maps, report=report), report


# ----------------------------------------------------------------------
# relations R1


def relations_r1(gens: GeneratorSystem) -> dict:
    """Square relations and inverse pairs among the generators."""
    squares, pairs = [], []
    missing = [t for t in gens.maps if t not in gens.inverse]
    if missing:
        raise AutGroupError(f"generator {missing[0]} has no inverse in the set")
    for t in gens.inner_tags():
        u = gens.inverse[t]
        if u == t:
            squares.append(((t, 1), (t, 1)))
        elif t < u:
            if gens.inverse[u] != t:
                raise AutGroupError(f"inverse pairing is not symmetric at {t}")
            pairs.append(((t, 1), (u, 1)))
    paired = Counter(t for p in pairs for t, _ in p)
    perfect = all(c == 1 for c in paired.values())
    return {"squares": squares, "pairs": pairs, "perfect_matching": perfect}


# ----------------------------------------------------------------------
# chamber loops and relations R2


@dataclass
class ChamberLoop:
    face: tuple                 # the two walls of D0
    word: tuple                 # (g_m, ..., g_1)
    taus: list                  # integer matrices of tau_0 .. tau_m

    @property
    def length(self) -> int:
        return len(self.word)


class _LoopRunner:
    """Shared integer data for walking around faces of D0."""

    def __init__(self, gens: GeneratorSystem):
        self.gens = gens
        rows = []
        for w in gens.chamber.walls:
            ints, _ = ea.scale_to_integers([ea.to_fraction(x) for x in w.v])
            rows.append(ints)
        self.walls = np.array(rows, dtype=np.int64)
        self.n = self.walls.shape[1]
        self.ident = np.identity(self.n, dtype=np.int64)

    def pencil_annihilator(self, i: int, j: int) -> np.ndarray:
        """Integer rows x with x . v_i = x . v_j = 0 (Euclidean dot)."""
        cols = ea.transpose([list(self.walls[i]), list(self.walls[j])])
        k = ea.integer_left_kernel(cols)
        return np.array(k, dtype=np.int64).T

    def face_walls(self, ann: np.ndarray, tau: np.ndarray) -> list:
        """Walls v of D0 with v^tau in the pencil of the face."""
        test = _mm(self.walls, _mm(tau, ann))
        return np.flatnonzero(~(test != 0).any(axis=1)).tolist()

    def run(self, face, max_steps: int = 64):
        gens = self.gens
        tags = gens.tags
        i0, j0 = face
        first, second = sorted(face, key=lambda k: tags[k])
        ann = self.pencil_annihilator(i0, j0)
        tau = self.ident
        prev = None
        word = []
        taus = [tau]
        seen = {tau.tobytes()}
        for step in range(max_steps):
            if step == 0:
                a, b = first, second
            else:
                fw = self.face_walls(ann, tau)
                if len(fw) != 2:
                    raise AutGroupError(f"face meets {len(fw)} walls of a chamber")
                a, b = fw
            if gens.is_outer(a) or gens.is_outer(b):
                return None
            if step == 0:
                pick = a
            else:
                na = _mm(gens.matrix(tags[a]), tau)
                nb = _mm(gens.matrix(tags[b]), tau)
                if (na == prev).all():
                    pick = b
                elif (nb == prev).all():
                    pick = a
                else:
                    raise AutGroupError("neither neighbour is the previous chamber")
            new = _mm(gens.matrix(tags[pick]), tau)
            word.append((tags[pick], 1))
            prev, tau = tau, new
            taus.append(tau)
            if (tau == self.ident).all():
                return ChamberLoop(tuple(sorted(face)), tuple(reversed(word)), taus)
            key = np.asarray(tau, dtype=object).tobytes() if tau.dtype == object else tau.tobytes()
            if key in seen:
                raise AutGroupError("chamber loop is not simple")
            seen.add(key)
        raise AutGroupError("chamber loop did not close")


def chamber_loop(gens: GeneratorSystem, face, max_steps: int = 64):
    """The simple chamber loop around a codimension-2 face, or None if the face is outer.

    The loop first crosses the wall of the face whose tag is smaller.
    """
    return _LoopRunner(gens).run(tuple(face), max_steps)


@dataclass
class Presentation:
    generators: list                        # tags
    r1: dict
    r2: list                                # ChamberLoop per inner face
    orbits: list                            # list of lists of faces (wall pairs)
    representatives: list                   # ChamberLoop per orbit
    outer_faces: int = 0

    def relator_words(self) -> list:
        words = [list(w) for w in self.r1["squares"]] + [list(w) for w in self.r1["pairs"]]
        words += [list(loop.word) for loop in self.r2]
        return words

    def to_text(self) -> str:
        """Generators on one line, then one relator per line."""
        lines = ["generators: " + " ".join(str(t) for t in self.generators)]
        for w in self.relator_words():
            lines.append(" * ".join(str(t) if e == 1 else f"{t}^-1" for t, e in w))
        return "\n".join(lines) + "\n"


def relations_r2(gens: GeneratorSystem, faces, chamber_gens, jobs: int = 1,
                 check_evaluation: bool = True) -> tuple:
    """One chamber loop per inner face, the face orbits, and per-orbit representatives.

    ``faces`` is the list of Face2 records; ``chamber_gens`` generates
    O(S, D0) and is used for the orbits.  Returns (loops, orbits, outer).
    """
    runner = _LoopRunner(gens)
    inner = [f.walls for f in faces if f.inner]
    if jobs > 1:
        loops = _parallel_loops(gens, inner, jobs)
    else:
        loops = [runner.run(f) for f in inner]
    outer = 0
    out = []
    for f, loop in zip(inner, loops):
        if loop is None:
            outer += 1
            continue
        if check_evaluation and not evaluate(loop.word, gens).is_identity():
            raise AutGroupError(f"relation of face {f} does not evaluate to 1")
        out.append(loop)
    perms = [_wall_permutation(gens.chamber, g) for g in chamber_gens]
    orbits = face_orbits([l.face for l in out], perms)
    return out, orbits, outer


_WORKER = {}


def _loop_worker(face):
    return _WORKER["runner"].run(face)


def _init_worker(gens):
    _WORKER["runner"] = _LoopRunner(gens)


def _parallel_loops(gens, faces, jobs):
    from concurrent.futures import ProcessPoolExecutor
    with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker,
                             initargs=(gens,)) as pool:
        return list(pool.map(_loop_worker, faces, chunksize=64))


def presentation(gens: GeneratorSystem, faces, chamber_gens, jobs: int = 1) -> Presentation:
    loops, orbits, outer = relations_r2(gens, faces, chamber_gens, jobs)
    by_face = {l.face: l for l in loops}
    reps = [by_face[orb[0]] for orb in orbits]
    return Presentation(gens.inner_tags(), relations_r1(gens), loops, orbits, reps, outer)


def face_of_tags(gens: GeneratorSystem, t1, t2) -> tuple:
    """The wall pair of D0 for two wall tags."""
    i, j = gens.wall_of[t1], gens.wall_of[t2]
    return (min(i, j), max(i, j))


# ----------------------------------------------------------------------
# writing an automorphism as a word


def _perturbed_interior(chamber: Chamber, rng: random.Random, scale: int = 16) -> tuple:
    S = chamber.bundle.S
    base = chamber.interior
    while True:
        x = as_vector(scale * a + rng.randint(-1, 1) for a in base)
        if chamber.contains_interior(x) and S.norm(x) > 0:
            return x
        scale *= 2


def _walk(gens: GeneratorSystem, start, end, max_steps: int):
    """Chamber walk along the segment [start, end]; None on a tie between walls."""
    S = gens.lattice
    gram = [list(r) for r in S.gram]
    walls = [list(w.v) for w in gens.chamber.walls]
    tags = gens.tags
    tau = Isometry.identity(S)
    ga = ea.mat_mul(gram, [[x] for x in start])
    gb = ea.mat_mul(gram, [[x] for x in end])
    t_cur = Fraction(0)
    word = []
    for _ in range(max_steps):
        m = [list(r) for r in tau.matrix]
        # pairings of the walls v^tau of the current chamber with the two ends
        ma = [r[0] for r in ea.mat_mul(m, ga)]
        mb = [r[0] for r in ea.mat_mul(m, gb)]
        best, hits = None, []
        for k, v in enumerate(walls):
            p0 = ea.dot(v, ma)
            p1 = ea.dot(v, mb)
            if p1 >= p0:
                continue
            t = Fraction(p0) / (p0 - p1)
            if t <= t_cur or t >= 1:
                continue
            if best is None or t < best:
                best, hits = t, [k]
            elif t == best:
                hits.append(k)
        if best is None:
            return tuple(reversed(word)), tau
        if len(hits) > 1:
            return None
        k = hits[0]
        if gens.is_outer(k):
            raise MembershipError(f"segment leaves the nef cone across {tags[k]}")
        word.append((tags[k], 1))
        tau = gens.maps[tags[k]] * tau
        t_cur = best
    raise AutGroupError("chamber walk did not terminate")


def wordify(gens: GeneratorSystem, g: Isometry, seed: int = 0, retries: int = 32,
            max_steps: int = 10000) -> tuple:
    """A word in the generators that evaluates to g."""
    bundle = gens.chamber.bundle
    if not in_aut_lattice(g, bundle):
        raise MembershipError("isometry is not in O(S)^omega")
    rng = random.Random(seed)
    for _ in range(retries):
        start = _perturbed_interior(gens.chamber, rng)
        res = _walk(gens, start, g.apply(start), max_steps)
        if res is None:
            continue
        word, tau = res
        if tau != g:
            raise MembershipError("isometry does not preserve the nef cone")
        return word
    raise AutGroupError("segment kept meeting faces of codimension 2")


def separating_hyperplanes(bundle: K3Bundle, x, y) -> list:
    """Distinct hyperplanes pr_S(r)-perp for (-2)-vectors r of II_{1,25} separating x and y.

    An independent check on chamber walks: their count is the number of
    walls a generic segment crosses.
    """
    ii = ii_lattice()
    ex, ey = bundle.lift(x), bundle.lift(y)
    out = set()
    for r in enum_separating(ii, ex, ey, -2):
        v = primitive_in_dual(bundle.S, bundle.project(r))
        if bundle.S.inner(v, x) < 0:
            v = tuple(-c for c in v)
        out.add(v)
    return sorted(out)


# ----------------------------------------------------------------------
# random products


def random_word(gens: GeneratorSystem, length: int, rng: random.Random) -> tuple:
    tags = gens.inner_tags()
    return tuple((rng.choice(tags), 1) for _ in range(length))


def round_trip(gens: GeneratorSystem, word, seed: int = 0) -> bool:
    g = evaluate(word, gens)
    return evaluate(wordify(gens, g, seed=seed), gens) == g
