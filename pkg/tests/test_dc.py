import random
from fractions import Fraction

import pytest

from cstndc.cstn import (
    LAMBDA,
    Cstn,
    Label,
    CstnNode,
    LabeledConstraint,
    Scenario,
    enumerate_scenarios,
    expanded_id,
    restrict,
)
from cstndc.dc import (
    Verdict,
    as_epsilon,
    check_dc,
    check_edc,
    construct_h_epsilon,
    dc_epsilon,
    estimate_epsilon_hat,
    expected_h_epsilon_counts,
    is_dynamic_by_history,
    renormalize_fractions,
    round_schedule,
    rounding_context,
    schedule_from_strategy,
    strategy_from_schedule,
    verify_strategy,
)
from cstndc.errors import CapacityError, InputError, ValidationError
from cstndc.generators import gen_gamma_n, gen_random_cstn
from cstndc.hytn import brute_force_hytn, scale_hytn, verify_hytn_schedule
from oracles import scenario_histories_dynamic


def sc(text, props=("p", "q")):
    return Scenario.from_label(props, text)


class TestEpsilon:
    def test_forms(self):
        assert as_epsilon("1/20") == Fraction(1, 20)
        assert as_epsilon(2) == 2
        assert as_epsilon(Fraction(3, 4)) == Fraction(3, 4)

    @pytest.mark.parametrize("bad", [0, "-1/2", "x", 0.5, "1/0"])
    def test_rejects(self, bad):
        with pytest.raises(InputError):
            as_epsilon(bad)

    def test_dc_epsilon(self, running_example):
        assert dc_epsilon(running_example) == Fraction(1, 20)


class TestConstruction:
    def test_running_example_counts_frozen(self, running_example):
        h = construct_h_epsilon(running_example, 1)
        assert len(h.nodes) == 20
        assert len(h.hyperarcs) == 97
        # 37 restriction arcs plus 8 cross arcs whose only distinguishing
        # observation is the tail itself
        assert sum(a.is_standard for a in h.hyperarcs) == 45
        assert h.size == 258

    def test_running_example_counts_closed_form(self, running_example):
        assert expected_h_epsilon_counts(running_example) == {
            "nodes": 20, "hyperarcs": 97, "standard_arcs": 37, "cross_hyperarcs": 60, "size": 258,
        }

    def test_gamma1_counts_frozen(self):
        g = gen_gamma_n(1)
        h = construct_h_epsilon(g, Fraction(1, 2))
        assert (len(h.nodes), len(h.hyperarcs)) == (24, 210)

    def test_cross_hyperarc_shape(self, running_example):
        eps = Fraction(1, 7)
        h = construct_h_epsilon(running_example, eps)
        i1 = enumerate_scenarios(running_example).index(sc("p q"))
        i2 = enumerate_scenarios(running_example).index(sc("-p -q"))
        tail = expanded_id("C", i1)
        arcs = [a for a in h.hyperarcs if a.tail == tail and expanded_id("C", i2) in a.head_map]
        assert len(arcs) == 1
        assert arcs[0].head_map == {
            expanded_id("C", i2): 0,
            expanded_id("Op", i1): -eps,
            expanded_id("Oq", i1): -eps,
        }

    def test_observation_node_not_its_own_head(self, running_example):
        h = construct_h_epsilon(running_example, 1)
        i1 = enumerate_scenarios(running_example).index(sc("p q"))
        i2 = enumerate_scenarios(running_example).index(sc("-p q"))
        (arc,) = [a for a in h.hyperarcs if a.tail == expanded_id("Op", i1) and expanded_id("Op", i2) in a.head_map]
        assert arc.head_map == {expanded_id("Op", i2): 0}

    @pytest.mark.parametrize("seed", range(25))
    def test_random_counts_match_closed_form(self, seed):
        g = gen_random_cstn(6, 2, 0.3, 6, seed)
        h = construct_h_epsilon(g, Fraction(1, 3))
        want = expected_h_epsilon_counts(g)
        assert len(h.nodes) == want["nodes"]
        assert len(h.hyperarcs) == want["hyperarcs"]
        assert h.size == want["size"]

    def test_rejects_ill_defined(self):
        g = Cstn(("p",), (CstnNode("Op", LAMBDA, "p"), CstnNode("B", Label.of("p"))))
        with pytest.raises(ValidationError):
            construct_h_epsilon(g, 1)

    def test_capacity(self, running_example):
        with pytest.raises(CapacityError):
            check_dc(running_example, max_nodes=19)


class TestRunningExample:
    def test_check_dc(self, running_example):
        r = check_dc(running_example)
        assert r.verdict is Verdict.DC
        rep = verify_strategy(running_example, r.strategy, dc_epsilon(running_example))
        assert rep.viable and rep.dynamic and rep.eps_dynamic

    def test_reference_strategy(self, running_example, reference_strategy):
        rep = verify_strategy(running_example, reference_strategy, 1)
        assert rep.viable and rep.dynamic and rep.eps_dynamic
        assert reference_strategy[sc("p -q")]["B"] == 3

    def test_reference_strategy_is_not_2_dynamic(self, running_example, reference_strategy):
        rep = verify_strategy(running_example, reference_strategy, 2)
        assert rep.viable and rep.dynamic and rep.eps_dynamic is False

    def test_broken_strategy_reports(self, running_example, reference_strategy):
        bad = {s: dict(phi) for s, phi in reference_strategy.items()}
        bad[sc("-p -q")]["C"] = Fraction(11)
        bad[sc("p q")]["Oq"] = Fraction(0)
        rep = verify_strategy(running_example, bad)
        assert not rep.viable and not rep.dynamic
        assert rep.viability_failures and rep.dynamic_failures

    def test_edc_at_one(self, running_example):
        r = check_edc(running_example, 1)
        assert r.verdict is Verdict.EPS_DC
        assert verify_strategy(running_example, r.strategy, 1).ok

    def test_strategy_schedule_round_trip(self, running_example, reference_strategy):
        phi = schedule_from_strategy(running_example, reference_strategy)
        assert strategy_from_schedule(running_example, phi) == reference_strategy
        assert verify_hytn_schedule(construct_h_epsilon(running_example, 1), phi)

    def test_domain_mismatch(self, running_example, reference_strategy):
        short = dict(reference_strategy)
        short.pop(sc("p q"))
        with pytest.raises(InputError):
            verify_strategy(running_example, short)


def test_zero_propositions_reduce_to_stn():
    nodes = (CstnNode("A"), CstnNode("B"))
    ok = Cstn((), nodes, (LabeledConstraint("A", "B", 4), LabeledConstraint("B", "A", -1)))
    bad = Cstn((), nodes, (LabeledConstraint("A", "B", 1), LabeledConstraint("B", "A", -2)))
    r = check_dc(ok)
    assert r.verdict is Verdict.DC
    assert r.strategy[enumerate_scenarios(ok)[0]] == {"A": 0, "B": 1}
    assert check_dc(bad).verdict is Verdict.NOT_DC


def test_gamma1_epsilon_hat_is_one_half():
    g = gen_gamma_n(1)
    assert check_edc(g, Fraction(1, 2)).positive
    assert not check_edc(g, Fraction(501, 1000)).positive
    b = estimate_epsilon_hat(g, resolution=8)
    assert b.dc and b.lo <= Fraction(1, 2) < b.hi
    assert b.hi - b.lo <= Fraction(1, 8)


def test_epsilon_hat_of_non_dc_network():
    nodes = (CstnNode("A"), CstnNode("B"))
    bad = Cstn((), nodes, (LabeledConstraint("A", "B", 1), LabeledConstraint("B", "A", -2)))
    assert estimate_epsilon_hat(bad).empty


def test_epsilon_hat_unbounded_when_nothing_is_observed_late():
    g = Cstn((), (CstnNode("A"),))
    b = estimate_epsilon_hat(g)
    assert b.dc and b.lo == 1 and b.hi is None


def test_hytn_oracle_on_tiny_cstns():
    # the game solver and head enumeration agree on H_eps itself
    checked = 0
    for seed in range(200):
        g = gen_random_cstn(3, 1, 0.4, 4, seed)
        h = scale_hytn(construct_h_epsilon(g, Fraction(1, 2)), 2)
        try:
            oracle = brute_force_hytn(h, max_selections=2**12)
        except CapacityError:
            continue
        assert check_edc(g, Fraction(1, 2)).positive == (oracle is not None)
        checked += 1
    assert checked >= 50


class TestDynamicity:
    def test_lemma_matches_history_definition(self, running_example, reference_strategy):
        rng = random.Random(0)
        scenarios = enumerate_scenarios(running_example)
        seen = {True: 0, False: 0}
        for _ in range(300):
            sigma = {s: dict(phi) for s, phi in reference_strategy.items()}
            for _ in range(rng.randint(1, 3)):
                s = rng.choice(scenarios)
                v = rng.choice(list(sigma[s]))
                sigma[s][v] = Fraction(rng.randint(0, 10))
            lemma = verify_strategy(running_example, sigma).dynamic
            assert lemma == is_dynamic_by_history(running_example, sigma) == scenario_histories_dynamic(running_example, sigma)
            seen[lemma] += 1
        assert seen[True] and seen[False]

    @pytest.mark.parametrize("seed", range(20))
    def test_solver_strategies_are_dynamic(self, seed):
        g = gen_random_cstn(5, 2, 0.3, 5, seed)
        r = check_dc(g)
        if r.positive:
            assert is_dynamic_by_history(g, r.strategy)
            assert scenario_histories_dynamic(g, r.strategy)


class TestRounding:
    def test_renormalize_example(self):
        # fractional parts 0 < 3/10 < 7/10 take ranks 1, 2, 3
        phi = {"a": Fraction(3, 10), "b": Fraction(27, 10), "c": Fraction(5)}
        assert renormalize_fractions(phi, 20) == {"a": Fraction(1, 20), "b": Fraction(21, 10), "c": 5}

    def test_renormalize_two_parts(self):
        assert renormalize_fractions({"x": Fraction(3, 10), "y": Fraction(7, 10)}, 20) == {
            "x": 0, "y": Fraction(1, 20),
        }

    def test_renormalize_too_many_parts(self):
        with pytest.raises(InputError):
            renormalize_fractions({str(k): Fraction(k, 7) for k in range(7)}, 5)

    def test_running_example_from_eps_one(self, running_example):
        r = check_edc(running_example, 1)
        phi = schedule_from_strategy(running_example, r.strategy)
        ctx = rounding_context(running_example, 1, phi)
        assert ctx.epsilon == Fraction(1, 20)
        assert verify_hytn_schedule(construct_h_epsilon(running_example, ctx.epsilon), ctx.rounded)
        assert round_schedule(running_example, 1, phi) == ctx.rounded

    def test_reference_schedule_with_fractions(self, running_example, reference_strategy):
        # shift everything by 1/3: still feasible at eps = 1, now fractional
        phi = {v: t + Fraction(1, 3) for v, t in schedule_from_strategy(running_example, reference_strategy).items()}
        rounded = round_schedule(running_example, 1, phi)
        assert all(rounded[v] == int(phi[v]) for v in phi)

    def test_infeasible_input(self, running_example):
        phi = {v: 0 for v in construct_h_epsilon(running_example, 1).nodes}
        with pytest.raises(InputError):
            round_schedule(running_example, 1, phi)


@pytest.mark.parametrize("seed", range(15))
def test_monotone_in_epsilon(seed):
    g = gen_random_cstn(5, 2, 0.35, 4, seed)
    results = [check_edc(g, Fraction(1, d)).positive for d in (1, 2, 3, 5, 20)]
    # once positive, smaller epsilons stay positive
    assert results == sorted(results)


def test_restriction_feasible_under_solver_strategy(running_example):
    r = check_dc(running_example)
    for s in enumerate_scenarios(running_example):
        assert restrict(running_example, s).is_feasible(r.strategy[s])
