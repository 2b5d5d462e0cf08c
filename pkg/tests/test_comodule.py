import pytest

from hsslice import comodule as C
from hsslice import hsss


@pytest.fixture(scope="module")
def M2():
    return C.extract_weight0_comodule(2)


def test_comodule_laws(M2):
    assert M2.law_failures() == []


def test_json_roundtrip(M2):
    again = C.ComoduleF2.from_json(M2.to_json())
    assert again.to_json() == M2.to_json()


def test_double_dual(M2):
    assert C.double_dual_matches(M2)


def test_M2_stems(M2):
    assert sorted(M2.degrees) == [0, 4, 6, 7, 8, 10, 11, 12, 13, 14]


def test_M2_square_zero():
    assert hsss.m_products(2)["nonzero"] == []


def test_dual_dimensions(M2):
    r = C.n_module_check(M2)
    assert r["dimensions_ok"]
    assert r["adem_failures"] == []


def test_trivial_comodule_laws():
    assert C.trivial_comodule(2).law_failures() == []


def test_quotient_hopf_comodule_laws():
    assert C.quotient_hopf_comodule(1, 12).law_failures() == []


# recomputed values, kept as a regression
M3_DIMENSION = 174


def test_M3_dimension_regression():
    assert sum(hsss.m_dims_by_stem(3).values()) == M3_DIMENSION
