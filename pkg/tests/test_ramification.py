from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nbcrit.acceptance import brute_force_breaks
from nbcrit.galois import Subgroup, index_p_subgroups
from nbcrit.ramification import (
    RamificationData,
    StructuralError,
    alternative_uniformizers,
    check_hypothesis,
    compute_filtration,
    group_at,
    largest_break,
    lower_to_upper,
    quotient_breaks,
    sigma_break,
    structural_checks,
    t_sum,
    t_sum_by_intersections,
)

SCENARIOS = ["example1_p2", "example1_p3", "q2_i", "as_1_5", "q2sqrt2_kummer", "q2_i_sqrt2"]

EXPECTED = {
    "example1_p2": ((2,), (2,), (2,), 2),
    "example1_p3": ((3,), (3,), (3,), 6),
    "q2_i": ((1,), (2,), (1,), 1),
    "as_1_5": ((1, 5), (4, 2), (1, 3), 7),
    "q2sqrt2_kummer": ((1, 5), (4, 2), (1, 3), 7),
    "q2_i_sqrt2": ((1, 3), (4, 2), (1, 2), 5),
}


@pytest.mark.parametrize("name", SCENARIOS)
def test_filtration_values(built, name):
    _, N, data = built(name)
    lower, orders, upper, t_G = EXPECTED[name]
    assert data.lower_breaks == lower
    assert data.orders == orders
    assert data.upper_breaks == tuple(Fraction(u) for u in upper)
    assert data.t_G == t_G


@pytest.mark.parametrize("name", SCENARIOS)
def test_breaks_match_uniformizer_free_oracle(built, name):
    _, N, data = built(name)
    assert brute_force_breaks(N, seed=7) == dict(data.sigma_breaks)


def test_example1_break_formula(built):
    # x^p = pi_K: the single break is p e_K / (p - 1)
    for name in ("example1_p2", "example1_p3"):
        _, N, data = built(name)
        K = N.ground
        assert data.lower_breaks == (Fraction(N.p * K.e, N.p - 1),)


def test_gaussian_break_directly(built):
    # sigma(1 + i) - (1 + i) = -2i has valuation 2, so i(sigma) = 1
    _, N, _ = built("q2_i")
    y = N.element([1, 1])
    assert N.valuation(N.act((1,), y) - y) == 2
    assert sigma_break(N, (1,), y) == 1


@pytest.mark.parametrize(
    "lower,orders,degree,upper",
    [
        ((1, 5), (4, 2), 4, (1, 3)),
        ((1, 3), (4, 2), 4, (1, 2)),
        ((2,), (2,), 2, (2,)),
        ((1, 3, 11), (8, 4, 2), 8, (1, 2, 4)),
    ],
)
def test_lower_to_upper(lower, orders, degree, upper):
    assert lower_to_upper(lower, orders, degree) == tuple(Fraction(u) for u in upper)


def test_lower_to_upper_rejects_non_integral():
    with pytest.raises(StructuralError, match="not an integer"):
        lower_to_upper((1, 2), (4, 2), 4)


@pytest.mark.parametrize("name", SCENARIOS)
def test_t_sum_agrees_with_intersections(built, name):
    _, N, data = built(name)
    subgroups = [Subgroup.trivial(N.p, N.n), N.group] + index_p_subgroups(N.p, N.n)
    for H in subgroups:
        assert t_sum(data, H) == t_sum_by_intersections(data, H)
    assert t_sum(data, N.group) == data.t_G
    assert t_sum(data, Subgroup.trivial(N.p, N.n)) == 0


def test_t_G_closed_form(built):
    # t_G = sum_i b_i (g_(b_i) - g_(b_i + 1))
    for name in SCENARIOS:
        _, _, data = built(name)
        nxt = data.orders[1:] + (1,)
        assert data.t_G == sum(b * (g - h) for b, g, h in zip(data.lower_breaks, data.orders, nxt))


@pytest.mark.parametrize("name", ["as_1_5", "q2sqrt2_kummer", "q2_i_sqrt2"])
def test_quotient_breaks_are_upper_breaks(built, name):
    _, N, data = built(name)
    assert set(quotient_breaks(N).values()) == {int(u) for u in data.upper_breaks}


def test_group_at_and_largest_break(built):
    _, N, data = built("as_1_5")
    assert group_at(data, 1) == N.group
    assert group_at(data, 5).order == 2
    assert group_at(data, 6).order == 1
    for H in index_p_subgroups(2, 2):
        assert largest_break(data, H) in data.lower_breaks
    assert largest_break(data, Subgroup.trivial(2, 2)) is None


@pytest.mark.parametrize(
    "name,ok,failing",
    [("as_1_5", True, ()), ("q2_i", True, ()), ("q2_i_sqrt2", False, (2,)), ("example1_p2", False, (2,)),
     ("example1_p3", False, (3,))],
)
def test_check_hypothesis(built, name, ok, failing):
    _, _, data = built(name)
    res = check_hypothesis(data)
    assert res.ok is ok
    assert res.failing == tuple(Fraction(u) for u in failing)


@pytest.mark.parametrize("name", SCENARIOS)
def test_structural_checks_pass(built, name):
    _, N, data = built(name)
    checks = structural_checks(data, N, seed=1)
    assert all(c.ok for c in checks), [c.to_json() for c in checks if not c.ok]


@pytest.mark.parametrize("name", SCENARIOS)
def test_filtration_independent_of_uniformizer(built, name):
    _, N, data = built(name)
    for pi in alternative_uniformizers(N, seed=3):
        assert N.valuation(pi) == 1
        assert compute_filtration(N, pi) == data


def test_filtration_needs_valuation_one(built):
    _, N, _ = built("as_1_5")
    with pytest.raises(StructuralError):
        compute_filtration(N, N.uniformizer ** 2)


def synthetic(p, n, lower, orders):
    upper = lower_to_upper(lower, orders, p ** n)
    return RamificationData(p, n, tuple(lower), tuple(orders), upper, 0, ())


@pytest.mark.parametrize("name", SCENARIOS)
def test_breaks_count_equals_rank_when_hypothesis_holds(built, name):
    # under the hypothesis the number of distinct breaks is n
    _, N, data = built(name)
    if check_hypothesis(data).ok:
        assert data.m == N.n


@given(p=st.sampled_from([2, 3, 5]), n=st.integers(1, 3), b=st.integers(1, 60))
def test_single_break_with_p_dividing_b_is_cyclic(p, n, b):
    # one break b_max = b with p | b is only possible for a cyclic group
    data = synthetic(p, n, (b,), (p ** n,))
    names = {c.name: c for c in structural_checks(data)}
    check = names["b_max_divisible_forces_cyclic"]
    assert check.ok == (b % p != 0 or n == 1)


def test_divisible_b_max_flagged_in_example1(built):
    _, N, data = built("example1_p2")
    names = {c.name: c for c in structural_checks(data, N)}
    assert names["b_max_divisible_forces_cyclic"].ok


@pytest.mark.parametrize(
    "lower,orders,bad",
    [
        ((1, 4), (4, 2), "breaks_congruent_mod_p"),
        ((1, 5), (2, 2), "first_order_full"),
    ],
)
def test_structural_checks_catch_bad_data(lower, orders, bad):
    data = RamificationData(2, 2, lower, orders, (Fraction(1), Fraction(3)), 7, ())
    failed = {c.name for c in structural_checks(data) if not c.ok}
    assert bad in failed


def test_to_json_round_numbers(built):
    _, _, data = built("as_1_5")
    js = data.to_json()
    assert js["lower_breaks"] == [1, 5]
    assert js["order_at_break"] == {"1": 4, "5": 2}
    assert js["upper_breaks"] == ["1", "3"]
    assert js["m"] == 2 and js["b_max"] == 5 and js["hypothesis_ok"] is True
