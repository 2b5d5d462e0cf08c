from hypothesis import given, settings, strategies as st

from hsslice import arithsq as A
from hsslice import steenrod as S
from hsslice.f2core import TriDegree

N = A.chi_count(24)

xi_polys = st.integers(1, 12).flatmap(
    lambda d: st.lists(st.sampled_from(S.XI.monomials(TriDegree(d, 0, 0))), min_size=1, max_size=3))


@settings(max_examples=50, deadline=None)
@given(xi_polys)
def test_phi_commutes_with_squaring(p):
    p = frozenset(p)
    assert A.phi(S.XI.square(p), N) == A.laurent_square(A.phi(p, N))


@settings(max_examples=50, deadline=None)
@given(xi_polys, xi_polys)
def test_phi_multiplicative(p, q):
    p, q = frozenset(p), frozenset(q)
    assert A.phi(S.XI.mul(p, q), N) == A.laurent_mul(A.phi(p, N), A.phi(q, N))


def test_low_homology():
    assert A.homology_table(2) == {0: 1, 1: 0, 2: 0}


def test_boundary_injective():
    assert A.boundary_injectivity(40)["injective"]


def test_leading_terms():
    assert A.leading_term_injectivity(30)["holds"]


def test_square_agrees_with_height_infinity_run():
    r = A.crosscheck_vs_hsss(20)
    assert r["conditional"] and r["agree"]


def test_weight_bookkeeping():
    r = A.motivic_consistency()
    assert r["ok"]


def test_edge_lifts():
    for m in (1, 2, 3):
        assert A.edge_lift_report(m)["all_members"]
