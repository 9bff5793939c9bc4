import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nbcrit.galois import KUMMER, LayerSpec, Subgroup, build_extension, fixed_field, index_p_subgroups
from nbcrit.normalbasis import (
    GENERATOR,
    NON_GENERATOR,
    PreconditionError,
    construct_rho_v,
    element_of_valuation,
    lemma3_residue,
    nb_test,
    radical_witness,
    random_element,
    sample_class,
    solve_trace,
    solve_trace_detailed,
    sweep_class,
    trace_valuation_forward,
)
from nbcrit.ramification import check_hypothesis, largest_break, t_sum

SCENARIOS = ["example1_p2", "example1_p3", "q2_i", "as_1_5", "q2sqrt2_kummer", "q2_i_sqrt2"]
HYPOTHESIS_OK = ["q2_i", "as_1_5", "q2sqrt2_kummer"]


def fresh_valuation(N, y):
    """Valuation through the norm, ignoring any value cached on y."""
    return N.norm(y).valuation


class TestElements:
    @pytest.mark.parametrize("name", SCENARIOS)
    def test_random_element_valuation_is_genuine(self, built, name):
        _, N, _ = built(name)
        rng = random.Random(0)
        for v in range(-N.degree, 2 * N.degree):
            y = random_element(N, v, rng, 4)
            assert fresh_valuation(N, y) == v
            assert N.valuation(element_of_valuation(N, v)) == v

    def test_sample_class_reproducible(self, built):
        _, N, _ = built("as_1_5")
        assert sample_class(N, 1, 9, 4) == sample_class(N, 1, 9, 4)
        assert sample_class(N, 1, 9, 4) != sample_class(N, 1, 9, 5)
        assert N.valuation(sample_class(N, 3, 9, 4)) % 4 == 3


class TestNBTest:
    def test_radical_is_not_generator(self, Q2):
        N = build_extension(Q2, [LayerSpec(KUMMER, Q2(2))])
        verdict = nb_test(N, N.gen(0))
        assert verdict.status == NON_GENERATOR
        assert verdict.witness["trace_zero"] is True

    def test_one_plus_x(self, Q2):
        # conjugates 1 + x, 1 - x: det [[1, 1], [1, -1]] = -2
        N = build_extension(Q2, [LayerSpec(KUMMER, Q2(2))])
        verdict = nb_test(N, N.element([1, 1]))
        assert verdict.status == GENERATOR
        assert verdict.det_valuation == 1

    def test_zero_rejected(self, built):
        _, N, _ = built("q2_i")
        with pytest.raises(PreconditionError):
            nb_test(N, N.zero)

    @pytest.mark.parametrize("name,trace_zero", [("q2_i", False), ("as_1_5", True)])
    def test_ground_element_is_not_generator(self, built, name, trace_zero):
        # Tr(5) = 5 p^n, which vanishes in characteristic p
        _, N, _ = built(name)
        verdict = nb_test(N, N.from_k(5))
        assert verdict.status == NON_GENERATOR
        assert verdict.witness["trace_zero"] is trace_zero

    @pytest.mark.parametrize("name", SCENARIOS)
    @given(seed=st.integers(0, 10 ** 6))
    def test_invariant_under_scaling_and_galois(self, built, name, seed):
        _, N, _ = built(name)
        rng = random.Random(seed)
        rho = random_element(N, rng.randrange(-4, 5), rng, 4)
        c = N.ground.random_element(rng.randrange(-2, 3), rng, 4)
        s = rng.choice(N.group.elements())
        base = nb_test(N, rho).status
        assert nb_test(N, rho * c).status == base
        assert nb_test(N, N.act(s, rho)).status == base

    @pytest.mark.parametrize("name", HYPOTHESIS_OK)
    def test_b_max_class_always_generates(self, built, name):
        _, N, data = built(name)
        rep = sweep_class(N, data.b_max, 30, 1, data)
        assert rep.tallies[GENERATOR] == 30 and rep.ok


class TestTraceLaw:
    @pytest.mark.parametrize("name", SCENARIOS)
    def test_forward_law_in_b_max_class(self, built, name):
        _, N, data = built(name)
        rng = random.Random(3)
        for i in range(10):
            rho = random_element(N, data.b_max + N.degree * rng.randrange(-2, 3), rng, 4)
            law = trace_valuation_forward(N, rho, data)
            assert law.precondition and law.law_holds

    def test_not_asserted_elsewhere(self, built):
        _, N, data = built("as_1_5")
        law = trace_valuation_forward(N, element_of_valuation(N, 2), data)
        assert not law.precondition and law.law_holds is None

    def test_trace_bound_holds_everywhere(self, built):
        # outside the b_max class the trace can only be more divisible
        _, N, data = built("as_1_5")
        rng = random.Random(4)
        for v in range(-6, 6):
            law = trace_valuation_forward(N, random_element(N, v, rng, 4), data)
            assert law.v_trace >= v + data.t_G


class TestSolveTrace:
    @pytest.mark.parametrize("name", SCENARIOS)
    @given(seed=st.integers(0, 10 ** 6))
    def test_round_trip(self, built, name, seed):
        _, N, data = built(name)
        rng = random.Random(seed)
        alpha = N.from_k(N.ground.random_element(rng.randrange(-2, 3), rng, 6))
        target = N.valuation(alpha) - data.t_G
        rho = solve_trace(N, N.group, alpha, target, data)
        assert N.trace(rho) == alpha
        assert fresh_valuation(N, rho) == target

    def test_q2_i_example(self, built):
        _, N, data = built("q2_i")
        rho = solve_trace(N, N.group, N.from_k(2), 1, data)
        assert N.trace(rho) == N.from_k(2)
        assert N.valuation(rho) == 1

    def test_relative_trace(self, built):
        _, N, data = built("as_1_5")
        rng = random.Random(8)
        for H in index_p_subgroups(2, 2):
            F = fixed_field(N, H)
            l = random_element(F.L, rng.randrange(-3, 4), rng, 4)
            alpha = F.embed(l)
            target = N.valuation(alpha) - t_sum(data, H)
            if (target - largest_break(data, H)) % H.order:
                continue
            rho = solve_trace(N, H, alpha, target, data)
            assert N.trace(rho, H) == alpha and N.valuation(rho) == target

    def test_small_precision_still_exact(self, built):
        _, N, data = built("as_1_5")
        alpha = N.from_k(N.ground.from_digits([1, 1, 0, 1], 0))
        sol = solve_trace_detailed(N, N.group, alpha, -data.t_G, data, precision=1)
        assert N.trace(sol.rho) == alpha

    def test_alpha_zero_rejected(self, built):
        _, N, data = built("q2_i")
        with pytest.raises(PreconditionError, match="alpha = 0"):
            solve_trace(N, N.group, N.zero, 0, data)

    def test_wrong_target_rejected(self, built):
        _, N, data = built("as_1_5")
        with pytest.raises(PreconditionError):
            solve_trace(N, N.group, N.one, 0, data)

    def test_alpha_outside_fixed_field_rejected(self, built):
        _, N, data = built("as_1_5")
        with pytest.raises(PreconditionError, match="not fixed"):
            solve_trace(N, N.group, N.uniformizer, 1 - data.t_G, data)

    def test_trivial_subgroup(self, built):
        _, N, data = built("as_1_5")
        y = N.uniformizer
        assert solve_trace(N, Subgroup.trivial(2, 2), y, 1, data) == y


class TestTraceCongruence:
    def test_congruence_every_subgroup(self, built):
        _, N, data = built("as_1_5")
        rng = random.Random(5)
        for H in index_p_subgroups(2, 2):
            F = fixed_field(N, H)
            for _ in range(5):
                rho = random_element(N, data.b_max + 4 * rng.randrange(-2, 3), rng, 4)
                assert lemma3_residue(N, H, rho, data, F).congruence_holds

    def test_quotient_break_not_the_n_over_l_break(self, built):
        # on Q_2(i, sqrt 2) the congruence uses the break of L/K; the N/L break fails it
        _, N, data = built("q2_i_sqrt2")
        rng = random.Random(6)
        rows = []
        for H in index_p_subgroups(2, 2):
            rho = random_element(N, data.b_max, rng, 4)
            rows.append(lemma3_residue(N, H, rho, data))
        assert all(r.congruence_holds for r in rows)
        assert sum(not r.congruence_N_over_L for r in rows) == 2

    def test_cyclic_rejected(self, built):
        _, N, data = built("q2_i")
        with pytest.raises(PreconditionError, match="cyclic"):
            lemma3_residue(N, N.group, N.uniformizer, data)

    def test_wrong_class_rejected(self, built):
        _, N, data = built("as_1_5")
        H = index_p_subgroups(2, 2)[0]
        with pytest.raises(PreconditionError):
            lemma3_residue(N, H, element_of_valuation(N, 2), data)

    def test_wrong_index_rejected(self, built):
        _, N, data = built("as_1_5")
        with pytest.raises(PreconditionError, match="index p"):
            lemma3_residue(N, Subgroup.trivial(2, 2), element_of_valuation(N, 1), data)


class TestRhoV:
    def test_worked_example_v2(self, built):
        _, N, data = built("as_1_5")
        cert = construct_rho_v(N, 2, data)
        assert (cert.a_v, cert.k, cert.r, cert.b_s) == (2, 0, 1, 5)
        assert cert.H_k.order == 1
        assert cert.H_k1.order == 2 and cert.H_k1 == Subgroup(2, 2, [cert.sigma])
        assert cert.ok

    def test_intermediates_recomputed(self, built):
        _, N, data = built("as_1_5")
        for v in (0, 2, 3, -1, 6):
            cert = construct_rho_v(N, v, data)
            beta = cert.alpha
            for _ in range(cert.r):
                beta = N.act(cert.sigma, beta) - beta
            assert beta == cert.beta
            assert N.trace(cert.rho_v, cert.H_k) == cert.beta
            conj = sum((N.act(s, cert.rho_v) for s in N.group.elements()), N.zero)
            assert conj.is_zero()
            assert N.valuation(cert.rho_v) == v

    @pytest.mark.parametrize("name", HYPOTHESIS_OK)
    def test_every_non_nb_class(self, built, name):
        _, N, data = built(name)
        for v in range(N.degree):
            if (v - data.b_max) % N.degree == 0:
                continue
            cert = construct_rho_v(N, v, data)
            assert cert.ok
            assert nb_test(N, cert.rho_v).status == NON_GENERATOR

    def test_edge_case_a_v_zero(self, built):
        _, N, data = built("q2_i")
        cert = construct_rho_v(N, 0, data)
        assert cert.a_v == 0 and cert.edge_case and cert.ok

    def test_nb_class_rejected(self, built):
        _, N, data = built("as_1_5")
        with pytest.raises(PreconditionError, match="normal basis class"):
            construct_rho_v(N, 1, data)

    @pytest.mark.parametrize("name", ["example1_p2", "example1_p3"])
    def test_radical_witness_outside_hypothesis(self, built, name):
        _, N, data = built(name)
        assert not check_hypothesis(data).ok
        for v in range(-N.p, 2 * N.p):
            cert = construct_rho_v(N, v, data)
            assert cert.method == "radical" and cert.ok
            assert radical_witness(N, v).rho_v == cert.rho_v

    def test_outside_hypothesis_noncyclic_rejected(self, built):
        _, N, data = built("q2_i_sqrt2")
        with pytest.raises(PreconditionError, match="prime to p"):
            construct_rho_v(N, 0, data)


class TestSweep:
    def test_zero_trials(self, built):
        _, N, data = built("q2_i")
        rep = sweep_class(N, 1, 0, 0, data)
        assert rep.trials == 0 and sum(rep.tallies.values()) == 0 and rep.ok

    def test_deterministic(self, built):
        _, N, data = built("as_1_5")
        assert sweep_class(N, 2, 8, 4, data).to_json() == sweep_class(N, 2, 8, 4, data).to_json()

    def test_no_expectation_outside_b_max_class(self, built):
        _, N, data = built("as_1_5")
        rep = sweep_class(N, 2, 5, 0, data)
        assert rep.expected is None and rep.violations == []
