import random

import pytest

from weylwalk.autgrp import (AdjacencyTest, MembershipError, chamber_loop, evaluate, face_of_tags,
                             format_word, invert_word, parse_word, random_word, relations_r1,
                             round_trip, same_up_to_rotation, wordify)
from weylwalk.chambers import isometries_between
from weylwalk.cli import golden
from weylwalk.k3 import parse_tag
from weylwalk.lattice import Isometry


def test_word_text_round_trip(gens):
    rng = random.Random(1)
    w = random_word(gens, 5, rng)
    w = w[:2] + ((w[2][0], -1),) + w[3:]
    assert parse_word(format_word(w)) == w


def test_latex_word():
    w = parse_word(r"(\gamma_{7}(2), \gamma_{5}(1)^{-1}, \gamma_{8}((12)))")
    assert [str(t) for t, _ in w] == ["g7(2)", "g5(1)", "g8((12))"]
    assert [e for _, e in w] == [1, -1, 1]


def test_evaluate_inverse_word(gens):
    rng = random.Random(2)
    w = random_word(gens, 4, rng)
    assert (evaluate(w, gens) * evaluate(invert_word(w), gens)).is_identity()
    assert evaluate(invert_word(w, gens), gens) == evaluate(invert_word(w), gens)


def test_generators_are_isometries(gens):
    assert len(gens.maps) == 264
    for g in gens.maps.values():
        assert g.preserves_form() and g.integral()


def test_adjacency_is_involutive(gens):
    """If D0^g lies across wall i, then D0^(g^-1) lies across the wall -v_i g^-1 of D0."""
    adj = AdjacencyTest(gens.chamber)
    walls = gens.chamber.walls
    S = gens.lattice
    for tag, g in gens.maps.items():
        i = gens.wall_of[tag]
        assert adj(i, g)
        u = gens.inverse[tag]
        j = gens.wall_of[u]
        assert adj(j, gens.maps[u])
        assert gens.inverse[u] == tag
        back = g.inverse()
        assert back == gens.maps[u]
        assert back.apply(tuple(-x for x in walls[i].v)) == walls[j].v
    assert S is gens.chamber.bundle.S


def test_adjacency_rejects_wrong_wall(gens):
    adj = AdjacencyTest(gens.chamber)
    tag = parse_tag("g8((12))")
    other = gens.wall_of[parse_tag("g8((13))")]
    assert not adj(other, gens.maps[tag])
    assert not adj(gens.wall_of[tag], Isometry.identity(gens.lattice))


def test_r1(gens):
    r1 = relations_r1(gens)
    assert len(r1["squares"]) == 144 and len(r1["pairs"]) == 60
    assert r1["perfect_matching"]
    for w in r1["squares"] + r1["pairs"]:
        assert evaluate(w, gens).is_identity()


def test_published_face_loop(gens):
    entry = golden()["relations"]["face_orbits"][0]
    f1, f2 = (parse_tag(w) for w in entry["walls"])
    loop = chamber_loop(gens, face_of_tags(gens, f1, f2))
    assert loop is not None
    assert evaluate(loop.word, gens).is_identity()
    assert same_up_to_rotation(loop.word, parse_word(entry["word"]), gens)
    assert len(loop.taus) == loop.length + 1


def test_outer_face_has_no_loop(gens, p15):
    face = next(f for f in p15.faces if not f.inner)
    assert chamber_loop(gens, face.walls) is None


def test_rotation_and_inversion(gens):
    rng = random.Random(3)
    w = random_word(gens, 5, rng)
    assert same_up_to_rotation(w, w[2:] + w[:2], gens)
    assert same_up_to_rotation(w, invert_word(w, gens), gens)
    assert not same_up_to_rotation(w, w[:4], gens)


def test_wordify_single_generator(gens):
    tag = parse_tag("g8((12))")
    assert wordify(gens, gens.maps[tag]) == ((tag, 1),)
    assert wordify(gens, Isometry.identity(gens.lattice)) == ()


def test_wordify_rejects_chamber_symmetry(gens, d15):
    # Aut(Y, D0) is trivial, so no nontrivial symmetry of D0 is an automorphism
    g = next(h for h in isometries_between(d15, d15, limit=4) if not h.is_identity())
    with pytest.raises(MembershipError):
        wordify(gens, g)


@pytest.mark.parametrize("seed", range(100))
def test_wordify_round_trip(gens, seed):
    rng = random.Random(seed)
    word = random_word(gens, rng.randint(0, 6), rng)
    assert round_trip(gens, word, seed=seed)
