import pytest

from weylwalk.enumerate import enum_negdef
from weylwalk.leech import (W0, build_golay, build_leech, format_octad, ii_inner, ii_lattice,
                            ii_norm, ii_reflect, ii_to_vector, is_weyl, leech_root,
                            leech_signature, octad_vector, parse_octad, steiner_property,
                            vector_to_ii)
from weylwalk.lattice import signature


@pytest.fixture(scope="module")
def golay():
    return build_golay()


@pytest.fixture(scope="module")
def leech():
    return build_leech()


def test_golay_weights(golay):
    assert len(golay.octads) == 759
    assert golay.weight_enumerator() == {0: 1, 8: 759, 12: 2576, 16: 759, 24: 1}


def test_steiner_system(golay):
    assert steiner_property(golay)


def test_octad_text_round_trip(golay):
    for o in golay.octads[:50]:
        assert parse_octad(format_octad(o)) == o


def test_leech_invariants(leech):
    lat = leech.lattice
    assert lat.rank == 24 and lat.det == 1 and lat.even
    assert leech_signature() == (0, 24)


def test_no_roots_in_leech(leech):
    assert enum_negdef(leech.lattice, -2) == []


def test_octads_are_leech_vectors(golay, leech):
    for o in golay.octads[:20]:
        assert leech.contains(octad_vector(o))
    assert not leech.contains(tuple([1] + [0] * 23))


def test_ii_125(leech):
    lat = ii_lattice()
    assert lat.rank == 26 and abs(lat.det) == 1 and lat.even
    assert signature(lat) == (1, 25)


def test_leech_roots_of_w0(golay):
    lam = octad_vector(golay.octads[0])
    r = leech_root(lam)
    assert ii_norm(r) == -2 and ii_inner(r, W0) == 1
    assert ii_reflect(ii_reflect(W0, r), r) == W0
    assert vector_to_ii(ii_to_vector(r)) == r


def test_w0_is_weyl():
    assert is_weyl(W0)
    assert not is_weyl((1, 1, tuple([0] * 24)))      # not isotropic
