import json
from fractions import Fraction

from weylwalk.fixtures import (bundle_to_json, complement_root_type, double_trios, node,
                               s15_in_s16, trope)
from weylwalk.lattice import is_primitive, signature


def test_s16(s16):
    S = s16.S
    assert S.rank == 17 and signature(S) == (1, 16)
    assert list(s16.disc.invariants) == [2, 2, 2, 2, 4]
    assert is_primitive(s16.embedding)
    assert complement_root_type(s16) == "6A1+A3"
    assert S.norm(s16.alpha) == 8


def test_s16_quartic_classes(s16):
    S = s16.S
    h4 = s16.cls("h4")
    nodes = [k for k in s16.classes if k.startswith("N")]
    tropes = [k for k in s16.classes if k.startswith("T")]
    assert len(nodes) == 16 and len(tropes) == 16
    assert all(S.inner(h4, s16.cls(k)) == 0 for k in nodes)
    assert all(S.inner(h4, s16.cls(k)) == 2 for k in tropes)


def test_s15(s15, s16):
    S = s15.S
    assert S.rank == 16 and signature(S) == (1, 15)
    assert list(s15.disc.invariants) == [2, 2, 2, 2, 2, 4]
    assert complement_root_type(s15) == "7A1+A3"
    assert S.norm(s15.alpha) == Fraction(17, 2)
    # S15 is the orthogonal complement of N0 inside S16
    inner = s15_in_s16()
    n0 = s16.cls("N0")
    assert all(s16.S.inner(row, n0) == 0 for row in inner.matrix)
    assert is_primitive(s15.embedding)


def test_s15_nodes_and_tropes(s15):
    S = s15.S
    h4, h6 = s15.cls("h4"), s15.cls("h6")
    assert S.norm(h4) == 4 and S.norm(h6) == 6
    assert len(double_trios()) == 10
    for theta in double_trios():
        assert S.norm(trope(s15, theta)) == -2
        assert S.inner(h4, trope(s15, theta)) == 2
    e = node(s15, (1, 2))
    assert S.norm(e) == -2 and S.inner(h4, e) == 0


def test_bundle_json_is_stable(s15):
    a = json.dumps(bundle_to_json(s15), sort_keys=True)
    b = json.dumps(bundle_to_json(s15), sort_keys=True)
    assert a == b
    assert json.loads(a)["alpha_norm"] == "17/2"
