from fractions import Fraction

import pytest

from cstndc.cstn import validate_wd
from cstndc.dc import check_dc, verify_strategy
from cstndc.errors import CapacityError, InputError
from cstndc.generators import (
    Cnf,
    GammaNParams,
    gen_from_3cnf,
    gen_gamma_n,
    gen_gamma_n_strategy,
    gen_random_cstn,
    parse_dimacs,
    sat_brute_force,
    sat_witness,
    to_dimacs,
)


class TestDimacs:
    def test_parse_and_pad(self):
        f = parse_dimacs("c demo\np cnf 2 2\n1 -2 0\n2 0\n")
        assert f == Cnf(2, ((1, -2, 1), (2, 2, 2)))

    def test_round_trip(self):
        f = Cnf(3, ((1, -2, 3), (-1, -1, 2)))
        assert parse_dimacs(to_dimacs(f)) == f

    def test_clause_count_mismatch(self):
        with pytest.raises(InputError, match="announces"):
            parse_dimacs("p cnf 2 3\n1 2 0\n")

    def test_missing_header(self):
        with pytest.raises(InputError):
            parse_dimacs("1 2 0\n")

    def test_literal_out_of_range(self):
        with pytest.raises(InputError):
            parse_dimacs("p cnf 1 1\n2 0\n")

    def test_long_clause(self):
        with pytest.raises(InputError):
            parse_dimacs("p cnf 4 1\n1 2 3 4 0\n")


def test_sat_brute_force():
    assert sat_brute_force(Cnf(1, ((1, 1, 1),)))
    assert not sat_brute_force(Cnf(1, ((1, 1, 1), (-1, -1, -1))))
    w = sat_witness(Cnf(2, ((1, 2, 2), (-1, -1, -1))))
    assert w == {1: False, 2: True}
    with pytest.raises(CapacityError):
        sat_brute_force(Cnf(21, ()), max_vars=20)


class TestCnfNetwork:
    @pytest.mark.parametrize("n,clauses", [(1, [(1, 1, 1)]), (2, [(1, -2, 2), (-1, 2, 1)]), (3, [(1, 2, 3)] * 4)])
    def test_sizes(self, n, clauses):
        f = Cnf(n, tuple(clauses))
        g = gen_from_3cnf(f)
        m = len(clauses)
        assert len(g.nodes) == n + m
        assert len(g.constraints) == n * n + n * m + 3 * m
        assert validate_wd(g) == []

    def test_single_literal_formula_is_not_dc(self):
        # satisfiable, so the network is not dynamically consistent
        assert not check_dc(gen_from_3cnf(Cnf(1, ((1, 1, 1),)))).positive

    def test_contradiction_is_dc(self):
        assert check_dc(gen_from_3cnf(Cnf(1, ((1, 1, 1), (-1, -1, -1))))).positive

    def test_variables_observed_by_themselves(self):
        g = gen_from_3cnf(Cnf(2, ((1, 2, 2),)))
        assert g.observer == {"x1": "x1", "x2": "x2"}


class TestGammaN:
    def test_sequences(self):
        small, big = GammaNParams(3).sequences()
        assert small == [Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)]
        assert big == [1, Fraction(1, 2), Fraction(1, 4)]

    def test_custom_rule_must_stay_inside(self):
        with pytest.raises(InputError):
            GammaNParams(2, delta_rule=lambda d: d).sequences()

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_sizes(self, n):
        g = gen_gamma_n(n)
        assert len(g.nodes) == 3 * n
        assert len(g.propositions) == 3 * n
        assert len(g.constraints) == 3 * n + 1 + 4 * n + 8 * (n - 1)
        assert validate_wd(g) == []

    def test_strategy_viable_and_dynamic(self):
        g = gen_gamma_n(1)
        rep = verify_strategy(g, gen_gamma_n_strategy(1), Fraction(1, 2))
        assert rep.viable and rep.dynamic and rep.eps_dynamic

    def test_bad_n(self):
        with pytest.raises(InputError):
            gen_gamma_n(0)


class TestRandom:
    def test_deterministic(self):
        assert gen_random_cstn(6, 2, 0.4, 5, 42) == gen_random_cstn(6, 2, 0.4, 5, 42)
        assert gen_random_cstn(6, 2, 0.4, 5, 42) != gen_random_cstn(6, 2, 0.4, 5, 43)

    @pytest.mark.parametrize("seed", range(60))
    def test_well_defined(self, seed):
        g = gen_random_cstn(7, 3, 0.35, 6, seed)
        assert validate_wd(g) == []
        assert len(g.propositions) == 3

    def test_prop_cap(self):
        with pytest.raises(CapacityError):
            gen_random_cstn(20, 13, 0.1, 3, 0)

    def test_too_few_nodes(self):
        with pytest.raises(InputError):
            gen_random_cstn(2, 3, 0.1, 3, 0)
