"""Command line: run the chamber pipeline and compare against golden values."""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import exactalg as ea
from .autgrp import (AutGroupError, GeneratorSystem, chamber_symmetries, evaluate,
                     face_of_tags, format_word, in_aut_lattice, parse_word, presentation,
                     relations_r1, run_borcherds, same_up_to_rotation, wordify, chamber_loop)
from .chambers import (Face2, adjacent_weyl, chamber_from_json, chamber_to_json, compute_walls,
                       d_invariant, faces_codim2, face_orbits, wall_orbits, _wall_permutation)
from .fixtures import K3Bundle, build_s15, build_s16, complement_root_type
from .k3 import parse_tag, rational_curves_up_to
from .lattice import Isometry, dump_lattice

FORMATS = ("text", "json", "md")


def golden() -> dict:
    with resources.files("weylwalk").joinpath("data/golden.json").open() as fh:
        return json.load(fh)


# ----------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    cache: Path | None = None
    jobs: int = 1
    seed: int = 0
    max_degree: int = 9
    format: str = "text"
    long: bool = False

    def __post_init__(self):
        if self.jobs < 1:
            raise ValueError("worker count must be at least 1")
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")

    @contextmanager
    def pool(self):
        """A map-like callable backed by worker processes when jobs > 1."""
        if self.jobs == 1:
            yield map
            return
        with ProcessPoolExecutor(max_workers=self.jobs) as ex:
            yield lambda f, xs: ex.map(f, xs, chunksize=8)


def _env(name: str, default):
    return os.environ.get("WEYLWALK_" + name.upper(), default)


def config_from_args(ns) -> RunConfig:
    cache = ns.cache if ns.cache is not None else _env("cache", None)
    jobs = ns.jobs if ns.jobs is not None else int(_env("jobs", 1))
    seed = ns.seed if ns.seed is not None else int(_env("seed", 0))
    fmt = ns.format if ns.format is not None else _env("format", "text")
    dmax = ns.max_degree if ns.max_degree is not None else int(_env("max_degree", 9))
    long = ns.long or _env("long", "") not in ("", "0", "false")
    return RunConfig(Path(cache) if cache else None, jobs, seed, dmax, fmt, long)


# ----------------------------------------------------------------------
# cache


class CacheError(RuntimeError):
    pass


class Cache:
    """JSON entries named by SHA-256 keys, each carrying a hash of its payload."""

    def __init__(self, root: Path | None):
        self.root = root
        if root is not None:
            root.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def key(*parts) -> str:
        text = json.dumps(parts, sort_keys=True, default=str)
        return hashlib.sha256(text.encode()).hexdigest()

    @staticmethod
    def _digest(payload) -> str:
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()

    def get(self, key: str):
        if self.root is None:
            return None
        path = self.root / f"{key}.json"
        if not path.exists():
            return None
        try:
            entry = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise CacheError(f"unreadable cache entry {path}") from exc
        if entry.get("sha256") != self._digest(entry.get("payload")):
            raise CacheError(f"cache entry {path} does not match its hash")
        return entry["payload"]

    def put(self, key: str, payload):
        if self.root is None:
            return
        entry = {"sha256": self._digest(payload), "payload": payload}
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            json.dump(entry, fh, sort_keys=True)
        os.replace(tmp, self.root / f"{key}.json")

    def fetch(self, key: str, compute, encode=lambda x: x, decode=lambda x: x):
        data = self.get(key)
        if data is not None:
            return decode(data)
        value = compute()
        self.put(key, encode(value))
        return value


def bundle_key(bundle: K3Bundle, weyl) -> str:
    emb = [[ea.fraction_to_str(x) for x in r] for r in bundle.embedding.matrix]
    return Cache.key("chamber", dump_lattice(bundle.S), emb, [int(x) for x in weyl])


# ----------------------------------------------------------------------
# reports


@dataclass
class Check:
    name: str
    expected: object
    computed: object
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.expected == self.computed


@dataclass
class GoldenReport:
    title: str
    checks: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name, expected, computed, seconds=0.0):
        self.checks.append(Check(name, _plain(expected), _plain(computed), seconds))

    def to_json(self) -> dict:
        # no timings, so equal runs give identical bytes
        return {"title": self.title, "passed": self.passed,
                "checks": [{"name": c.name, "expected": c.expected, "computed": c.computed,
                            "passed": c.passed} for c in self.checks],
                "info": self.info}

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.to_json(), indent=1, sort_keys=True)
        if fmt == "md":
            lines = [f"## {self.title}", "", "| check | expected | computed | status | seconds |",
                     "|---|---|---|---|---|"]
            for c in self.checks:
                lines.append(f"| {c.name} | {c.expected} | {c.computed} | "
                             f"{'pass' if c.passed else 'FAIL'} | {c.seconds:.1f} |")
            lines.append("")
            lines.append(f"overall: {'pass' if self.passed else 'FAIL'}")
            return "\n".join(lines)
        lines = [self.title]
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            lines.append(f"  [{status}] {c.name}: expected {c.expected}, got {c.computed} "
                         f"({c.seconds:.1f}s)")
        lines.append(f"overall: {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _plain(x):
    """JSON-friendly form with fractions as strings."""
    if isinstance(x, Fraction):
        return ea.fraction_to_str(x)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


class _Timer:
    def __init__(self):
        self.t = time.perf_counter()

    def lap(self) -> float:
        now = time.perf_counter()
        out, self.t = now - self.t, now
        return out


# ----------------------------------------------------------------------
# cached pipeline stages


class Pipeline:
    """Lazily computed, cached stages for one surface."""

    def __init__(self, surface: str, cfg: RunConfig):
        if surface not in ("s15", "s16"):
            raise ValueError("surface must be s15 or s16")
        self.surface = surface
        self.cfg = cfg
        self.cache = Cache(cfg.cache)
        self._bundle = None
        self._chamber = None
        self._sym = None
        self._gens = None
        self._faces = None
        self._gen_report = None

    @property
    def bundle(self) -> K3Bundle:
        if self._bundle is None:
            self._bundle = build_s15() if self.surface == "s15" else build_s16()
        return self._bundle

    @property
    def key(self) -> str:
        from .chambers import W0_VEC
        return bundle_key(self.bundle, W0_VEC)

    @property
    def chamber(self):
        if self._chamber is None:
            self._chamber = self.cache.fetch(
                self.key, lambda: compute_walls(self.bundle), chamber_to_json,
                lambda d: chamber_from_json(self.bundle, d))
        return self._chamber

    @property
    def symmetries(self):
        """(generators of O(S, D0), its order, Aut(Y, D0))."""
        if self._sym is None:
            S = self.bundle.S

            def enc(sym):
                gens, order, aut = sym
                return {"gens": [g.to_json() for g in gens], "order": order,
                        "aut": [g.to_json() for g in aut]}

            def dec(d):
                return ([Isometry.from_json(S, g) for g in d["gens"]], d["order"],
                        [Isometry.from_json(S, g) for g in d["aut"]])

            self._sym = self.cache.fetch(Cache.key(self.key, "symmetries"),
                                         lambda: chamber_symmetries(self.chamber), enc, dec)
        return self._sym

    def wall_orbits(self):
        return wall_orbits(self.chamber, self.symmetries[0])

    def orbit_table(self) -> list:
        """(size, n, a, d, outer) per wall orbit, d from the adjacent chamber."""
        def compute():
            rows = []
            for orb in self.wall_orbits():
                w = self.chamber.walls[orb[0]]
                weyl, _ = adjacent_weyl(self.chamber, w)
                d = d_invariant(self.chamber, weyl)
                rows.append([len(orb), ea.fraction_to_str(w.n), ea.fraction_to_str(w.a),
                             ea.fraction_to_str(d), w.outer])
            return rows
        return self.cache.fetch(Cache.key(self.key, "orbit_table"), compute)

    @property
    def faces(self) -> list:
        if self._faces is None:
            self._faces = self.cache.fetch(
                Cache.key(self.key, "faces"),
                lambda: faces_codim2(self.chamber, self.symmetries[0]),
                lambda fs: [[f.walls[0], f.walls[1], f.inner] for f in fs],
                lambda d: [Face2((a, b), bool(c)) for a, b, c in d])
        return self._faces

    def generators(self):
        """(GeneratorSystem or None, Borcherds report)."""
        if self._gen_report is None:
            S = self.bundle.S
            stored = self.cache.get(Cache.key(self.key, "generators"))
            if stored is not None:
                cached = {parse_tag(t): Isometry.from_json(S, m) for t, m in stored.items()}
                gen_map = cached.__getitem__
            else:
                gen_map = None
            with self.cfg.pool() as pmap:
                self._gens, self._gen_report = run_borcherds(
                    self.chamber, generator_map=gen_map, symmetries=self.symmetries, pmap=pmap)
            if self._gens is not None and stored is None:
                self.cache.put(Cache.key(self.key, "generators"),
                               {str(t): g.to_json() for t, g in self._gens.maps.items()})
        return self._gens, self._gen_report


# ----------------------------------------------------------------------
# commands


def _fixture_checks(rep: GoldenReport, p: Pipeline, gold: dict):
    b = p.bundle
    t = _Timer()
    rep.add(f"{p.surface}: rank", gold["rank"], b.S.rank, t.lap())
    rep.add(f"{p.surface}: discriminant", gold["discriminant"], list(b.disc.invariants), t.lap())
    rep.add(f"{p.surface}: roots of R", gold["complement_roots"], complement_root_type(b), t.lap())
    rep.add(f"{p.surface}: <alpha, alpha>", gold["alpha_norm"],
            ea.fraction_to_str(b.S.norm(b.alpha)), t.lap())


def _wall_checks(rep: GoldenReport, p: Pipeline, gold: dict):
    t = _Timer()
    rep.add("walls", gold["walls"], len(p.chamber.walls), t.lap())
    _, order, aut = p.symmetries
    rep.add("|O(S, D0)|", gold["symmetries"], order, t.lap())
    rep.add("|Aut(Y, D0)|", gold["aut_d0"], len(aut), 0.0)
    expected = [[o["size"], o["n"], o["a"], o["d"], o["outer"]] for o in gold["orbits"]]
    rep.add("wall orbits (size, n, a, d, outer)", expected, p.orbit_table(), t.lap())


def cmd_pipeline(target: str, cfg: RunConfig) -> GoldenReport:
    gold = golden()
    if target == "s16-walls":
        p = Pipeline("s16", cfg)
        rep = GoldenReport("pipeline s16-walls")
        _fixture_checks(rep, p, gold["s16"])
        _wall_checks(rep, p, gold["d16"])
        _, report = p.generators()
        rep.add("condition 4 (trivial Aut(Y, D0))", False, report["condition4"])
        return rep
    if target != "s15":
        raise ValueError("target must be s15 or s16-walls")
    p = Pipeline("s15", cfg)
    rep = GoldenReport("pipeline s15")
    _fixture_checks(rep, p, gold["s15"])
    _wall_checks(rep, p, gold["d15"])
    t = _Timer()
    inner = [f for f in p.faces if f.inner]
    rep.add("inner codimension-2 faces", gold["relations"]["inner_faces"], len(inner), t.lap())
    rep.info["codimension-2 faces"] = len(p.faces)
    gens, report = p.generators()
    rep.add("conditions 1, 3, 4", [True, True, True],
            [report["condition1"], report.get("condition3", False), report["condition4"]], t.lap())
    if gens is None:
        return rep
    _generator_checks(rep, gens, gold["generators"])
    _relation_checks(rep, p, gens, gold["relations"], cfg)
    _pentad_checks(rep, gens, gold["pentads"], cfg.seed)
    return rep


def _generator_checks(rep: GoldenReport, gens: GeneratorSystem, gold: dict):
    t = _Timer()
    rep.add("generators", gold["count"], len(gens.maps), t.lap())
    b = gens.chamber.bundle
    degrees = {}
    involutions = set()
    for tag, g in gens.maps.items():
        d = ea.fraction_to_str(b.S.inner(b.alpha, g.apply(b.alpha)))
        degrees.setdefault(str(tag.family), set()).add(d)
        if (g * g).is_identity():
            involutions.add(tag.family)
    rep.add("alpha-degree per family", gold["degrees"],
            {k: sorted(v)[0] if len(v) == 1 else sorted(v) for k, v in sorted(degrees.items())},
            t.lap())
    rep.add("involution families", gold["involution_families"], sorted(involutions), 0.0)
    growing = all(_degrees_increase(b, g, 10) for tag, g in gens.maps.items() if tag.family == 9)
    rep.add("family 9: <alpha, alpha^(g^n)> increases for n <= 10", True, growing, t.lap())


def _degrees_increase(b: K3Bundle, g: Isometry, n: int) -> bool:
    x = b.alpha
    last = b.S.norm(x)
    for _ in range(n):
        x = g.apply(x)
        d = b.S.inner(b.alpha, x)
        if d <= last:
            return False
        last = d
    return True


def _relation_checks(rep: GoldenReport, p: Pipeline, gens: GeneratorSystem, gold: dict,
                     cfg: RunConfig):
    t = _Timer()
    r1 = relations_r1(gens)
    rep.add("R1 squares", gold["squares"], len(r1["squares"]), t.lap())
    rep.add("R1 inverse pairs (perfect matching)", [gold["inverse_pairs"], True],
            [len(r1["pairs"]), r1["perfect_matching"]], 0.0)
    pres = presentation(gens, p.faces, p.symmetries[0], jobs=cfg.jobs)
    rep.add("R2 relations evaluating to 1", gold["inner_faces"], len(pres.r2), t.lap())
    sizes = {}
    for entry in gold["face_orbits"]:
        f1, f2 = (parse_tag(w) for w in entry["walls"])
        face = face_of_tags(gens, f1, f2)
        orbit = next(i for i, orb in enumerate(pres.orbits) if face in orb)
        sizes[entry["orbit"]] = len(pres.orbits[orbit])
    rep.add("face orbit sizes", {e["orbit"]: e["size"] for e in gold["face_orbits"]}, sizes,
            t.lap())
    rep.add("face orbits", len(gold["face_orbits"]), len(pres.orbits), 0.0)
    evaluated, matched = 0, 0
    for entry in gold["face_orbits"]:
        word = parse_word(entry["word"])
        evaluated += evaluate(word, gens).is_identity()
        f1, f2 = (parse_tag(w) for w in entry["walls"])
        loop = chamber_loop(gens, face_of_tags(gens, f1, f2))
        matched += loop is not None and same_up_to_rotation(loop.word, word, gens)
    n = len(gold["face_orbits"])
    rep.add("published relation words evaluating to 1", n, evaluated, t.lap())
    rep.add("computed loops matching published words", n, matched, t.lap())


def _pentad_checks(rep: GoldenReport, gens: GeneratorSystem, gold: dict, seed: int):
    t = _Timer()
    ok = 0
    for row in gold["rows"]:
        g = evaluate(parse_word(row["word"]), gens)
        inv = (g * g).is_identity() and not g.is_identity() and in_aut_lattice(g, gens.chamber.bundle)
        back = evaluate(wordify(gens, g, seed=seed), gens) == g
        ok += inv and back
    rep.add("pentad involutions (in O^omega, wordify round trip)", len(gold["rows"]), ok, t.lap())


def cmd_curves(dmax: int, cfg: RunConfig, surface: str = "s16") -> GoldenReport:
    if dmax < 1:
        raise ValueError("maximal degree must be at least 1")
    bundle = build_s16() if surface == "s16" else build_s15()
    t = _Timer()
    curves = rational_curves_up_to(bundle, dmax)
    secs = t.lap()
    rep = GoldenReport(f"smooth rational curves on {surface.upper()} up to degree {dmax}")
    counts = {str(d): len(v) for d, v in curves.items()}
    if surface == "s16":
        gold = golden()["curves"]["counts"]
        expected = {d: gold[d] for d in counts if d in gold}
        rep.add("curve counts", expected, {d: counts[d] for d in expected}, secs)
    rep.info["counts"] = counts
    return rep


# ----------------------------------------------------------------------
# argument parsing


def _add_common(p: argparse.ArgumentParser, top: bool):
    # on subcommands the defaults are suppressed so they do not mask earlier values
    d = None if top else argparse.SUPPRESS
    p.add_argument("--cache", default=d, help="cache directory")
    p.add_argument("--jobs", type=int, default=d, help="worker processes")
    p.add_argument("--seed", type=int, default=d, help="seed for wordify")
    p.add_argument("--format", choices=FORMATS, default=d)
    p.add_argument("--max-degree", type=int, default=d, dest="max_degree")
    p.add_argument("--long", action="store_true", default=False if top else argparse.SUPPRESS,
                   help="curve counts up to degree 13")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weylwalk", description=__doc__)
    _add_common(parser, True)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("pipeline", help="run all stages and compare with golden values")
    p.add_argument("target", choices=("s15", "s16-walls"))
    p = sub.add_parser("walls", help="walls of the chamber of w0")
    p.add_argument("surface", choices=("s15", "s16"))
    p = sub.add_parser("faces", help="codimension-2 faces")
    p.add_argument("surface", choices=("s15",))
    p = sub.add_parser("generators", help="the extra-automorphisms")
    p.add_argument("surface", choices=("s15",))
    p.add_argument("--json", action="store_true")
    p = sub.add_parser("relations", help="a presentation of Aut(Y15)")
    p.add_argument("surface", choices=("s15",))
    g = p.add_mutually_exclusive_group()
    g.add_argument("--json", action="store_true")
    g.add_argument("--gap", action="store_true", help="plain relator file")
    p = sub.add_parser("wordify", help="write an automorphism as a word")
    p.add_argument("--matrix", required=True, help="isometry JSON file")
    p = sub.add_parser("pentads", help="check the pentad involutions")
    p.add_argument("action", choices=("verify",))
    p = sub.add_parser("curves", help="count smooth rational curves")
    p.add_argument("--surface", choices=("s15", "s16"), default="s16")
    for sp in sub.choices.values():
        _add_common(sp, False)
    return parser


def _emit(text: str):
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    cfg = config_from_args(ns)
    try:
        return _dispatch(ns, cfg)
    except (AutGroupError, CacheError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(ns, cfg: RunConfig) -> int:
    cmd = ns.command
    if cmd == "pipeline":
        rep = cmd_pipeline(ns.target, cfg)
        _emit(rep.render(cfg.format))
        return 0 if rep.passed else 1
    if cmd == "curves":
        dmax = 13 if cfg.long and cfg.max_degree < 13 else cfg.max_degree
        rep = cmd_curves(dmax, cfg, ns.surface)
        _emit(rep.render(cfg.format))
        if cfg.format == "text":
            _emit("  counts: " + ", ".join(f"{d}:{n}" for d, n in rep.info["counts"].items()))
        return 0 if rep.passed else 1
    p = Pipeline(ns.surface if hasattr(ns, "surface") else "s15", cfg)
    if cmd == "walls":
        gold = golden()["d15" if ns.surface == "s15" else "d16"]
        rep = GoldenReport(f"walls of D0 on {ns.surface.upper()}")
        _wall_checks(rep, p, gold)
        _emit(rep.render(cfg.format))
        return 0 if rep.passed else 1
    if cmd == "faces":
        rep = GoldenReport("codimension-2 faces on S15")
        inner = [f for f in p.faces if f.inner]
        rep.add("inner faces", golden()["relations"]["inner_faces"], len(inner))
        perms = [_wall_permutation(p.chamber, g) for g in p.symmetries[0]]
        orbits = face_orbits([f.walls for f in inner], perms)
        rep.info["faces"] = len(p.faces)
        rep.info["inner orbit sizes"] = [len(o) for o in orbits]
        rep.add("inner face orbits", len(golden()["relations"]["face_orbits"]), len(orbits))
        _emit(rep.render(cfg.format))
        return 0 if rep.passed else 1
    gens, report = p.generators()
    if gens is None:
        print("error: Aut(Y, D0) is not trivial", file=sys.stderr)
        return 1
    if cmd == "generators":
        b = p.bundle
        rows = [{"tag": str(t), "degree": ea.fraction_to_str(b.S.inner(b.alpha, g.apply(b.alpha))),
                 "involution": (g * g).is_identity(), "inverse": str(gens.inverse[t]),
                 "matrix": g.to_json("S15")["matrix"]}
                for t, g in sorted(gens.maps.items())]
        if ns.json or cfg.format == "json":
            _emit(json.dumps({"report": report, "generators": rows}, indent=1, sort_keys=True))
        else:
            for r in rows:
                _emit(f"{r['tag']}  degree {r['degree']}  inverse {r['inverse']}")
        return 0
    if cmd == "relations":
        pres = presentation(gens, p.faces, p.symmetries[0], jobs=cfg.jobs)
        if ns.gap:
            _emit(pres.to_text())
        elif ns.json or cfg.format == "json":
            _emit(json.dumps({
                "generators": [str(t) for t in pres.generators],
                "r1": {"squares": [format_word(w) for w in pres.r1["squares"]],
                       "pairs": [format_word(w) for w in pres.r1["pairs"]]},
                "r2": [{"face": [str(gens.tags[i]) for i in loop.face],
                        "word": format_word(loop.word)} for loop in pres.r2],
                "orbits": [{"size": len(orb), "face": [str(gens.tags[i]) for i in orb[0]],
                            "word": format_word(rep_.word)}
                           for orb, rep_ in zip(pres.orbits, pres.representatives)],
            }, indent=1, sort_keys=True))
        else:
            _emit(f"{len(pres.r1['squares'])} squares, {len(pres.r1['pairs'])} inverse pairs, "
                  f"{len(pres.r2)} face relations in {len(pres.orbits)} orbits")
            for orb, loop in zip(pres.orbits, pres.representatives):
                f = " & ".join(str(gens.tags[i]) for i in orb[0])
                _emit(f"  size {len(orb):4d}  {f}: {format_word(loop.word)}")
        return 0
    if cmd == "wordify":
        data = json.loads(Path(ns.matrix).read_text())
        g = Isometry.from_json(p.bundle.S, data)
        word = wordify(gens, g, seed=cfg.seed)
        if cfg.format == "json":
            _emit(json.dumps({"word": format_word(word), "length": len(word)}))
        else:
            _emit(format_word(word))
        return 0
    if cmd == "pentads":
        rep = GoldenReport("pentad involutions")
        _pentad_checks(rep, gens, golden()["pentads"], cfg.seed)
        _emit(rep.render(cfg.format))
        return 0 if rep.passed else 1
    raise ValueError(f"unknown command {cmd}")


if __name__ == "__main__":
    sys.exit(main())
