import numpy as np
import pytest

from kj_sle.classes.boolean_oracle import BooleanOracle
from kj_sle.errors import InputError
from kj_sle.reductions.boolmean import plan_boolean_mean
from kj_sle.reductions.sat import (CnfFormula, cnf_oracle, parse_dimacs, read_dimacs_file, sat_decide,
                                   sat_search)
from kj_sle.utils.validate import split_confidence
from kj_sle.verify.brute_force import brute_sat
from kj_sle.verify.reference import random_cnf

XOR_DIMACS = """c exclusive or
p cnf 2 2
1 2 0
-1 -2
0
"""


class TestDimacs:

    def test_parse(self, xor_formula):
        F = parse_dimacs(XOR_DIMACS)
        assert F == xor_formula
        assert parse_dimacs(F.to_dimacs()) == F

    def test_percent_trailer_ignored(self):
        F = parse_dimacs("p cnf 1 1\n1 0\n%\n0\n")
        assert F.clauses == ((1,),)

    @pytest.mark.parametrize("text", [
        "1 2 0\n",
        "p cnf 2 1\np cnf 2 1\n1 0\n",
        "p cnf 2 1\n1 3 0\n",
        "p cnf 2 1\n1 x 0\n",
        "p cnf 2 1\n1 2\n",
        "p dnf 2 1\n1 0\n",
        "c only a comment\n",
    ])
    def test_malformed(self, text):
        with pytest.raises(InputError):
            parse_dimacs(text)

    def test_clause_count(self):
        text = "p cnf 2 3\n1 0\n2 0\n"
        with pytest.raises(InputError):
            parse_dimacs(text)
        assert len(parse_dimacs(text, strict=False).clauses) == 2

    def test_read_file(self, tmp_path):
        path = tmp_path / "xor.cnf"
        path.write_text(XOR_DIMACS)
        assert read_dimacs_file(path).num_vars == 2

    def test_empty_clause_rejected(self):
        with pytest.raises(InputError):
            CnfFormula.from_clauses(2, [[1], []])


class TestCnfOracle:

    def test_assignment_bit_order(self):
        B = cnf_oracle(CnfFormula.from_clauses(3, [[1], [-2], [3]]))
        assert [j for j in range(8) if B(j)] == [5]

    def test_xor(self, xor_formula):
        B = cnf_oracle(xor_formula)
        assert [B(j) for j in range(4)] == [0, 1, 1, 0]


class TestSatDecide:

    def test_satisfiable(self, xor_formula):
        decision = sat_decide(cnf_oracle(xor_formula), 0.05, "classical")
        assert decision.answer and decision.verdict == "YES"
        assert decision.ledger.bit_queries == 4
        assert decision.ledger.power_queries == plan_boolean_mean(4, 1 / 12, 0.05).power_queries

    def test_unsatisfiable(self, contradiction):
        assert not sat_decide(cnf_oracle(contradiction), 0.05, "classical").answer

    def test_single_witness(self):
        for j in range(8):
            assert sat_decide(BooleanOracle.indicator(3, [j]), 0.05, "classical").answer


class TestSatSearch:

    def test_smallest_witness(self):
        result = sat_search(BooleanOracle.indicator(3, [2, 5]), 0.05, "classical")
        assert result.index == 2 and result.confirmed
        assert result.ledger.verification_queries == 1

    def test_all_satisfying(self):
        assert sat_search(BooleanOracle.constant(3, 1), 0.05, "classical").index == 0

    def test_no_witness(self):
        result = sat_search(BooleanOracle.constant(2, 0), 0.05, "classical")
        assert result.index is None
        assert not result.confirmed
        assert result.flags == ("no_witness",)

    def test_last_index(self):
        assert sat_search(BooleanOracle.indicator(3, [7]), 0.05, "classical").index == 7

    def test_step_confidence_composes(self):
        delta, n = 0.05, 6
        assert 1 - (1 - split_confidence(delta, n)) ** n == pytest.approx(delta, rel=1e-12)

    @pytest.mark.parametrize("seed", [5, 6])
    def test_random_formulas(self, seed):
        F = random_cnf(np.random.default_rng(seed), 3)
        B = cnf_oracle(F)
        satisfiable, smallest = brute_sat(B, 3)
        assert sat_decide(B, 0.05, "classical").answer == satisfiable
        assert sat_search(B, 0.05, "classical").index == smallest


@pytest.mark.slow
@pytest.mark.parametrize("n", [4, 5, 6, 7, 8])
def test_random_formulas_up_to_eight_variables(n):
    generator = np.random.default_rng(99 + n)
    for _ in range(40):
        B = cnf_oracle(random_cnf(generator, n))
        satisfiable, smallest = brute_sat(B, n)
        assert sat_decide(B, 0.05, "classical").answer == satisfiable
        assert sat_search(B, 0.05, "classical").index == smallest
