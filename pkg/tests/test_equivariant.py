import pytest
from hypothesis import assume, given, settings, strategies as st

from hsslice import equivariant as E

BOX = E.ROBox(-3, 6, -4, 5)
DEGREES = [d for d in BOX.degrees() if E.e2_basis(d)]

keys = st.sampled_from(DEGREES).flatmap(lambda d: st.sampled_from(E.e2_basis(d)))


@settings(max_examples=80, deadline=None)
@given(keys, keys)
def test_nc_square_zero(p, q):
    if p[0] == "N" and q[0] == "N":
        assert not E.mul_keys(p, q)


@settings(max_examples=80, deadline=None)
@given(keys, keys)
def test_product_commutative_and_graded(p, q):
    prod = E.mul_keys(p, q)
    assert prod == E.mul_keys(q, p)
    for k in prod:
        assert E.key_degree(k) == E.key_degree(p) + E.key_degree(q)


@settings(max_examples=60, deadline=None)
@given(keys, keys, keys)
def test_product_associative(p, q, r):
    assert E.mul(E.mul([p], [q]), [r]) == E.mul([p], E.mul([q], [r]))


@settings(max_examples=80, deadline=None)
@given(keys)
def test_d3_squares_to_zero(k):
    assert not E.d3(E.d3([k]))


@settings(max_examples=80, deadline=None)
@given(keys, keys)
def test_d3_is_a_derivation(p, q):
    lhs = E.d3(E.mul([p], [q]))
    rhs = E.add(E.mul(E.d3([p]), [q]), E.mul([p], E.d3([q])))
    assert lhs == rhs


def test_total_degree_parity():
    for d in DEGREES:
        assert (d.a + d.b + d.s) % 2 == 0


def test_named_generators_are_cycles():
    assert E.generator_report()["ok"]
    for m in range(5):
        z, corr = E.z_elem(m)
        assert z is not None and E.is_cycle(z)


def test_w_degree():
    assert E.elem_degree(E.w_elem()) == E.RODegree(3, 2, -5)
    assert E.elem_degree(E.w_elem()) + E.D5 == E.RODegree(2, 2, 0)


def test_relations_hold_on_e2():
    assert all(E.relation_report().values())


def test_printed_relation_term_breaks_d3():
    # the extra zeta_1^2 term of the x_1^2 relation is incompatible with d3 for j >= 3
    defect = E.relation_defect()
    assert defect and all(row["j"] >= 3 for row in defect)


def test_forced_d5():
    f = E.forced_d5_search()
    assert f["unique_w"]


def test_v1():
    assert E.v1_report()["ok"]


@pytest.mark.parametrize("d", [E.RODegree(2, 2, 0), E.RODegree(3, 2, -5), E.RODegree(1, 1, 0),
                               E.RODegree(0, 0, 0), E.RODegree(-1, 3, -2)])
def test_slice_checks(d):
    assert E.check_slice(d).failures == []


@pytest.mark.parametrize("m", range(5))
def test_z_gap(m):
    assert E.z_m_degree_gap(m)["ok"]
