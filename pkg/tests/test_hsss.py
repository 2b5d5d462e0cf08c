import pytest

from hsslice import hsss
from hsslice.f2core import TriDegree, TriDegreeBox


def test_generator_differentials():
    r = hsss.generator_differentials_check(3)
    assert r["all_match"] and not r["negative_rho"]


def test_x_classes_have_their_degrees():
    for n in range(5):
        assert hsss.x_class(n).expansion


def test_small_m1_run():
    run = hsss.run_hsss(1, TriDegreeBox(12, -3, 0))
    assert run.ok
    assert run.einf_page == 4
    assert not run.potential_differentials


def test_m1_unit_only_in_stem0():
    run = hsss.run_hsss(1, TriDegreeBox(0, 0, 0))
    assert run.einf == {TriDegree(0, 0, 0): 1}


@pytest.mark.parametrize("m", [2, 3])
def test_leibniz_lists(m):
    r = hsss.leibniz_products_check(m)
    assert r["all_match"] and r["square_differential_zero"]


@pytest.mark.parametrize("m", [1, 2, 3])
def test_localized_pattern(m):
    run = hsss.localized_run(m, max_stem=24)
    assert run.ok and run.extras["abutment_matches"]
    assert run.extras["pages"] == [2 ** (k + 1) - 1 for k in range(1, m + 1)]


def test_cap_crosscheck():
    for i in (1, 2, 3):
        assert hsss.cap_crosscheck(i, 24)["all_match"]


def test_weight_slice_splitting():
    r = hsss.weight_slice_splitting_check(10, 4)
    assert r["all_match"] and r["tau_relation"]


# recomputed values, kept as regressions
D23_TARGET_DIM = 8
M3_BY_STEM_TOTAL = 174


def test_d23_target_regression():
    r = hsss.d23_check()
    assert r["source_is_cycle"]
    assert r["target_dim_v3_squared"] == D23_TARGET_DIM


def test_M2_basis():
    assert hsss.m_dims_by_stem(2) == {s: 1 for s in (0, 4, 6, 7, 8, 10, 11, 12, 13, 14)}
