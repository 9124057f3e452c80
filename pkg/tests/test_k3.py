from collections import Counter
from fractions import Fraction

import pytest

from weylwalk.fixtures import build_s16
from weylwalk.k3 import (K3Error, all_tags, contracted_curves, degree, double_plane_involution,
                         fixed_component_free, gamma, h2_gamma8, in_aut_lattice, index_wall,
                         inner_tags, is_nef, parse_tag, rational_curves_up_to, wall_index)


def test_tag_counts():
    fams = Counter(t.family for t in all_tags())
    assert [fams[f] for f in range(1, 11)] == [10, 15, 15, 10, 6, 45, 6, 15, 120, 72]
    assert len(inner_tags()) == 264


@pytest.mark.parametrize("text", ["g8((12))", "w1((126)(345))", "g9([136425])", "g10([13624])",
                                  "g6({(126),(134)})", "g5(3)", "w3((12)(34)(56))"])
def test_tag_text_round_trip(text):
    tag = parse_tag(text)
    assert parse_tag(str(tag)) == tag


def test_tag_latex_form():
    assert parse_tag(r"\gamma_{8}((12))") == parse_tag("g8((12))")
    with pytest.raises(ValueError):
        parse_tag("g11(1)")


def test_tags_match_walls(d15):
    assert sorted(map(str, (wall_index(w.v) for w in d15.walls))) == sorted(map(str, all_tags()))
    for w in d15.walls[::13]:
        assert index_wall(wall_index(w.v)) == w.v


def test_outer_walls_are_tagged_outer(d15):
    assert all(w.outer == (not wall_index(w.v).inner) for w in d15.walls)


def test_gamma8_is_double_plane(s15):
    tag = parse_tag("g8((12))")
    h2 = h2_gamma8(tag.index, s15)
    assert s15.S.norm(h2) == 2
    assert is_nef(s15, h2) and fixed_component_free(s15, h2)
    g, _ = double_plane_involution(s15, h2)
    assert g == gamma(tag)
    assert (g * g).is_identity()
    assert g.apply(h2) == h2
    curves = contracted_curves(s15, h2)
    assert sorted(g.apply(c) for c in curves) == sorted(curves)


def test_nef_test(s15):
    e = s15.cls("E12")
    v = tuple(3 * a + b for a, b in zip(s15.cls("h4"), e))
    assert s15.S.norm(v) > 0 and s15.S.inner(v, e) < 0
    assert not is_nef(s15, v)
    assert is_nef(s15, s15.cls("h4"))


def test_not_positive_raises(s15):
    with pytest.raises(K3Error):
        is_nef(s15, s15.cls("E12"))


@pytest.mark.parametrize("text,deg,invol", [
    ("g5(1)", Fraction(23, 2), True), ("g6({(126),(134)})", Fraction(33, 2), True),
    ("g7(2)", Fraction(53, 2), True), ("g8((12))", Fraction(53, 2), True),
    ("g9([136425])", Fraction(65, 2), False), ("g10([13624])", Fraction(213, 2), True),
])
def test_generator_degrees(s15, text, deg, invol):
    g = gamma(parse_tag(text))
    assert g.preserves_form() and g.integral()
    assert in_aut_lattice(g, s15)
    assert degree(s15, g) == deg
    assert (g * g).is_identity() == invol


def test_small_degree_curves_y15(s15):
    counts = {d: len(v) for d, v in rational_curves_up_to(s15, 3).items()}
    assert counts == {1: 25, 2: 0, 3: 15}


def test_lines_on_y16():
    b = build_s16()
    curves = rational_curves_up_to(b, 5)
    assert {d: len(v) for d, v in curves.items()} == {1: 32, 2: 0, 3: 0, 4: 0, 5: 480}
    S = b.S
    for c in curves[1]:
        assert S.norm(c) == -2 and S.inner(c, b.alpha) == 1
