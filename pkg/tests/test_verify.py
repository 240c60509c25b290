import numpy as np
import pytest

from kj_sle.classes.potential import Potential
from kj_sle.errors import InputError
from kj_sle.reductions.sat import cnf_oracle
from kj_sle.reductions.tsp import DistanceMatrix
from kj_sle.solvers.eigen import free_smallest_eigenvalue
from kj_sle.verify.brute_force import brute_count, brute_min, brute_sat, brute_tsp
from kj_sle.verify.quadrature import quadrature
from kj_sle.verify.reference import (high_resolution_lambda, random_cnf, random_distance_matrix,
                                     random_smooth_integrand, weighted_integral)


class TestBruteForce:

    def test_sat(self, xor_formula, contradiction):
        assert brute_sat(cnf_oracle(xor_formula), 2) == (True, 1)
        assert brute_sat(cnf_oracle(contradiction), 1) == (False, None)
        assert brute_count(cnf_oracle(xor_formula), 2) == 2
        with pytest.raises(InputError):
            brute_sat(lambda j: 0, 25)

    def test_min(self):
        assert brute_min([3, -1, -1]) == (-1.0, 1)
        with pytest.raises(InputError):
            brute_min([])

    def test_tsp(self):
        assert brute_tsp([[0, 1, 5], [5, 0, 1], [1, 5, 0]]) == (3, (1, 2, 3))
        assert brute_tsp([[0, 2], [3, 0]]) == (5, (1, 2))
        with pytest.raises(InputError):
            brute_tsp(np.ones((10, 10)) - np.eye(10))


class TestQuadrature:

    def test_polynomial(self):
        assert quadrature(lambda x: x ** 2) == pytest.approx(1 / 3, abs=1e-12)

    def test_weighted(self):
        assert weighted_integral(lambda x: 1.0) == pytest.approx(0.5, abs=1e-12)

    def test_breakpoints(self):
        assert quadrature(lambda x: abs(x - 0.5), breakpoints=[0.5]) == pytest.approx(0.25, abs=1e-12)


class TestReference:

    @pytest.mark.parametrize("k", [15, 255])
    def test_free_operator(self, k):
        assert high_resolution_lambda(Potential.constant(0.0), k) == pytest.approx(free_smallest_eigenvalue(k),
                                                                                 rel=1e-12)

    def test_random_integrand_respects_bound(self, rng):
        f = random_smooth_integrand(rng, bound_M=2.0)
        x = np.linspace(0, 1, 20001)
        h = x[1] - x[0]
        values = f(x)
        second = (values[2:] - 2 * values[1:-1] + values[:-2]) / h ** 2
        assert np.max(np.abs(values)) <= 2.0
        assert np.max(np.abs(np.diff(values) / h)) <= 2.0 * (1 + 1e-6)
        assert np.max(np.abs(second)) <= 2.0 * (1 + 1e-4)

    def test_random_cnf(self, rng):
        F = random_cnf(rng, 5)
        assert F.num_vars == 5
        assert len(F.clauses) == 21
        assert all(len({abs(lit) for lit in clause}) == 3 for clause in F.clauses)

    def test_random_distance_matrix(self, rng):
        d = random_distance_matrix(rng, 5, d_max=4)
        D = DistanceMatrix(d)
        assert D.m == 5 and 1 <= D.d_max <= 4
