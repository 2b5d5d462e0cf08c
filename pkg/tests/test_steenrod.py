import itertools

import pytest
from hypothesis import given, settings, strategies as st

from hsslice import steenrod as S
from hsslice.f2core import TriDegree, add


def compositions(n):
    for k in range(1, n + 1):
        for cut in itertools.combinations(range(1, n), k - 1):
            bounds = (0,) + cut + (n,)
            yield [bounds[i + 1] - bounds[i] for i in range(k)]


def conjugate_oracle(n):
    """Sum over compositions (a_1..a_k) of n of prod xi_{a_j}^(2^(a_1 + ... + a_{j-1}))."""
    out = set()
    for comp in compositions(n):
        powers = {}
        shift = 0
        for a in comp:
            powers[f"xi{a}"] = powers.get(f"xi{a}", 0) + 2 ** shift
            shift += a
        out ^= {S.XI.mono(**powers)}
    return frozenset(out)


@pytest.mark.parametrize("n", range(1, 9))
def test_conjugate_matches_composition_formula(n):
    assert S.conjugate_poly(n) == conjugate_oracle(n)


def test_printed_conjugates():
    assert S.conjugate_poly(2) == S.XI.parse("xi2 + xi1^3")
    assert S.conjugate_poly(3) == S.XI.parse("xi3 + xi1*xi2^2 + xi1^4*xi2 + xi1^7")


xi_polys = st.integers(1, 20).flatmap(
    lambda d: st.lists(st.sampled_from(S.XI.monomials(TriDegree(d, 0, 0))), min_size=1, max_size=4))


@settings(max_examples=60, deadline=None)
@given(xi_polys)
def test_coassociativity_property(p):
    assert S.coassociativity_holds(frozenset(p))


@settings(max_examples=60, deadline=None)
@given(xi_polys, xi_polys)
def test_coproduct_multiplicative(p, q):
    p, q = frozenset(p), frozenset(q)
    assert S.coproduct(S.XI.mul(p, q)) == S.tensor_mul(S.coproduct(p), S.coproduct(q))


@settings(max_examples=60, deadline=None)
@given(xi_polys)
def test_conjugation_is_an_involution(p):
    assert S.conjugate(S.conjugate(frozenset(p))) == frozenset(p)


@pytest.mark.parametrize("n", range(1, 9))
def test_antipode(n):
    assert S.antipode_identity_holds(n)


@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_cotensor_basis_is_intrinsic(m):
    for d in range(0, 25):
        want = [S.zeta_poly({x}) for x in S.cotensor_basis(m, d)]
        assert S.same_span(want, S.cotensor_kernel(m, d))


@pytest.mark.parametrize("m", [1, 2, 3])
def test_cap_kernel(m):
    assert all(S.cap_kernel_matches(m, d) for d in range(49))


# generating function of F_2[zeta1^4, zeta2^2, zeta3, zeta4, zeta5] through degree 32, frozen
HKO_DIMS = [1, 0, 0, 0, 1, 0, 1, 1, 1, 0, 1, 1, 2, 1, 2, 2, 2, 1, 3, 3, 3, 3, 4, 3, 4, 4, 5, 5, 6, 5,
            7, 7, 7]


def test_hko_oracle_frozen():
    dims = [0] * 33
    for a, b, c, d, e in itertools.product(range(9), range(6), range(5), range(3), range(2)):
        s = 4 * a + 6 * b + 7 * c + 15 * d + 31 * e
        if s <= 32:
            dims[s] += 1
    assert dims == HKO_DIMS


def test_cotensor_dims_match_hko():
    assert [S.cotensor_dim(1, d) for d in range(33)] == HKO_DIMS
