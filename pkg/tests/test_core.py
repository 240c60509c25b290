import json
import math

import numpy as np
import pandas as pd
import pytest

from kj_sle.classes.boolean_oracle import BooleanOracle
from kj_sle.classes.bounded_vector import BoundedVector
from kj_sle.classes.bump_family import BumpFamily
from kj_sle.classes.estimates import MeanEstimate, round_mean
from kj_sle.classes.phase_estimation_plan import Backend, PhaseEstimationPlan
from kj_sle.classes.potential import Potential, SmoothIntegrand, potential_from_integrand
from kj_sle.classes.query_ledger import QueryLedger
from kj_sle.classes.scaling_fit import ScalingFit
from kj_sle.classes.tridiagonal_system import build_matrix
from kj_sle.core_config import SleConfig
from kj_sle.errors import InputError, SleError
from kj_sle.reductions.boolmean import mean_integrand_bound
from kj_sle.utils.validate import split_confidence, validate_power_of_two, validate_probability
from kj_sle.verify.quadrature import quadrature


class TestSleConfig:

    def test_defaults(self, config):
        assert config.backend == "classical"
        assert config.threads == 1
        assert config.k_cap == 2 ** 24 - 1
        assert config.spectral_k_cap == 2 ** 30 - 1
        assert config.working_directory is None

    def test_unknown_key_rejected(self):
        with pytest.raises(InputError):
            SleConfig(no_such_key=1)

    @pytest.mark.parametrize("key, value", [("backend", "analog"), ("bump_alpha", 2.0), ("threads", 0),
                                            ("log_base", "3")])
    def test_invalid_values_rejected(self, key, value):
        with pytest.raises(InputError):
            SleConfig(**{key: value})

    def test_from_file_and_replace(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"backend": "spectral", "guard_bits": 3}))
        config = SleConfig.from_file(path, working_directory=tmp_path / "work")
        assert config.backend == "spectral"
        assert config.guard_bits == 3
        assert config.report_directory == tmp_path / "work" / "reports"
        changed = config.replace(threads=4)
        assert changed.threads == 4 and changed.backend == "spectral"
        assert config.threads == 1

    def test_from_file_errors(self, tmp_path):
        with pytest.raises(InputError):
            SleConfig.from_file(tmp_path / "missing.json")
        broken = tmp_path / "broken.json"
        broken.write_text("{not json")
        with pytest.raises(InputError):
            SleConfig.from_file(broken)


class TestValidation:

    @pytest.mark.parametrize("delta", [0.0, 1.0, -0.1, float("nan"), True])
    def test_probability_rejects(self, delta):
        with pytest.raises(InputError):
            validate_probability(delta)

    def test_errors_share_a_base(self):
        with pytest.raises(SleError):
            validate_power_of_two(6)
        with pytest.raises(ValueError):
            validate_power_of_two(0)

    @pytest.mark.parametrize("delta, parts", [(0.05, 1), (0.05, 8), (0.25, 3), (1e-9, 40)])
    def test_split_confidence(self, delta, parts):
        step = split_confidence(delta, parts)
        assert (1 - step) ** parts >= 1 - delta - 1e-15
        assert (1 - step) ** parts == pytest.approx(1 - delta, rel=1e-14)
        assert step <= delta


class TestQueryLedger:

    def test_merge(self):
        a = QueryLedger(power_queries=10, bit_queries=2, qubits_peak=7, classical_ops=1)
        b = QueryLedger(power_queries=5, bit_queries=1, qubits_peak=9, verification_queries=1)
        total = a + b
        assert total.power_queries == 15
        assert total.bit_queries == 3
        assert total.qubits_peak == 9
        assert total.verification_queries == 1
        assert QueryLedger.combine([a, b, QueryLedger()]) == total

    def test_merge_order_does_not_matter(self, rng):
        ledgers = [QueryLedger(power_queries=int(p), bit_queries=int(q), qubits_peak=int(w), classical_ops=int(c),
                               verification_queries=int(v))
                   for p, q, w, c, v in rng.integers(0, 50, size=(12, 5))]
        total = QueryLedger.combine(ledgers)
        for _ in range(5):
            shuffled = list(ledgers)
            rng.shuffle(shuffled)
            assert QueryLedger.combine(shuffled) == total
        a, b, c = ledgers[:3]
        assert (a + b) + c == a + (b + c)
        assert a + b == b + a
        assert total.qubits_peak == max(ledger.qubits_peak for ledger in ledgers)
        assert total.power_queries == sum(ledger.power_queries for ledger in ledgers)

    def test_rejects_negative(self):
        with pytest.raises(InputError):
            QueryLedger(power_queries=-1)

    def test_to_frame(self):
        frame = QueryLedger.to_frame([QueryLedger(power_queries=1), QueryLedger(power_queries=4)], index=[1, 2])
        assert list(frame.columns) == ["power_queries", "bit_queries", "qubits_peak", "classical_ops",
                                       "verification_queries"]
        assert frame.loc[2, "power_queries"] == 4


class TestPhaseEstimationPlan:

    def test_counts(self):
        plan = PhaseEstimationPlan(k=15, b=9, r=13, backend=Backend.SPECTRAL, eta=0.2, delta=0.25)
        assert plan.power_queries == 117
        assert plan.target_qubits == 4
        assert plan.qubits_peak == 13

    @pytest.mark.parametrize("k, b, r", [(14, 9, 13), (15, 2, 13), (15, 9, 12)])
    def test_invalid(self, k, b, r):
        with pytest.raises(InputError):
            PhaseEstimationPlan(k=k, b=b, r=r, backend=Backend.DENSE, eta=0.1, delta=0.1)

    def test_backend_parse(self):
        assert Backend.parse(None, "dense") is Backend.DENSE
        assert Backend.parse("Spectral") is Backend.SPECTRAL
        assert not Backend.CLASSICAL.is_quantum
        with pytest.raises(InputError):
            Backend.parse("analog")


class TestPotential:

    def test_constant_deviation(self):
        q = Potential.constant(0.7)
        assert q.deviation(np.array([0.1, 0.9])) == pytest.approx([0.2, 0.2])
        assert q.admissible

    def test_range_check(self):
        with pytest.raises(InputError):
            build_matrix(Potential.linear(0.0, 2.0), 15)
        build_matrix(Potential.linear(0.0, 1.0), 15)

    def test_sine_bounds_hold(self):
        q = Potential.sine(0.01, 1.0)
        assert q.spot_check() == []
        assert q.eval(np.array([0.25]))[0] == pytest.approx(0.51)

    def test_tabulated(self):
        xs = np.linspace(0, 1, 11)
        q = Potential.tabulated(xs, 0.5 + 0.1 * xs ** 2)
        assert q.eval(np.array([0.5]))[0] == pytest.approx(0.525, abs=1e-12)
        with pytest.raises(InputError):
            Potential.tabulated([0.0, 0.5, 1.0], [0.1, 0.2, 0.3])

    def test_from_integrand(self):
        f = SmoothIntegrand(lambda x: np.sin(np.pi * x), 1.0 * np.pi ** 2)
        q = potential_from_integrand(f, 1e-3)
        x = np.array([0.5])
        assert q.deviation(x)[0] == pytest.approx(1e-3)
        assert q.eval(x)[0] == pytest.approx(0.501)
        with pytest.raises(InputError):
            potential_from_integrand(f, 1.0)

    def test_from_integrand_recovers_f(self):
        f = SmoothIntegrand(lambda x: np.sin(2 * np.pi * x) / (4 * np.pi ** 2), 1.0)
        c = 0.1
        x = np.linspace(0, 1, 1001)
        q = potential_from_integrand(f, c)
        assert (q.eval(x) - 0.5) / c == pytest.approx(f.eval(x), abs=1e-15)
        assert np.all((q.eval(x) >= 0.4) & (q.eval(x) <= 0.6))
        zero = potential_from_integrand(SmoothIntegrand(np.zeros_like, 1.0), 0.3)
        assert np.all(zero.eval(x) == 0.5)
        assert potential_from_integrand(SmoothIntegrand(np.ones_like, 1.0), 0.5).eval(x) == pytest.approx(1.0)


class TestTridiagonalSystem:

    @pytest.mark.parametrize("q, k, diag, offdiag", [
        (Potential.constant(0.0), 3, [32.0, 32.0, 32.0], -16.0),
        (Potential.constant(1.0), 1, [9.0], -4.0),
        (Potential.linear(0.0, 1.0), 3, [32.25, 32.5, 32.75], -16.0),
    ])
    def test_small_matrices(self, q, k, diag, offdiag):
        T = build_matrix(q, k)
        assert list(T.diag) == diag
        assert T.offdiag == offdiag

    def test_rejects_empty_grid(self):
        with pytest.raises(InputError):
            build_matrix(Potential.constant(0.0), 0)

    @pytest.mark.parametrize("q", [Potential.constant(0.0), Potential.constant(1.0), Potential.linear(0.0, 1.0),
                                   Potential.sine(0.5, 3.0)])
    @pytest.mark.parametrize("k", [1, 7, 255])
    def test_gershgorin_within_spectrum_bounds(self, q, k):
        lower, upper = build_matrix(q, k).gershgorin_interval()
        assert lower >= 0.0
        assert upper <= 4 * (k + 1) ** 2 + 1

    def test_dense_and_matvec_agree(self):
        T = build_matrix(Potential.sine(0.2, 2.0), 31)
        dense = T.to_dense()
        v = np.random.default_rng(3).normal(size=31)
        assert np.allclose(dense, dense.T)
        assert np.allclose(T.matvec(v), dense @ v)
        assert dense[0, 0] == pytest.approx(2 * 32 ** 2 + T.potential_values[0])
        assert dense[0, 1] == -(32 ** 2)

    def test_large_grid_is_lazy(self):
        T = build_matrix(Potential.constant(0.5), 2 ** 30 - 1)
        assert T.scale == float(2 ** 60)
        assert "diag" not in T.__dict__


class TestBumpFamily:

    def test_cells(self):
        family = BumpFamily(4, int_h=1 / 140)
        assert family.cell_width == 0.125
        assert list(family.cell_index(np.array([0.2, 0.25, 0.3, 0.74, 0.75]))) == [-1, 0, 0, 3, -1]
        assert family.edges[0] == 0.25 and family.edges[-1] == 0.75

    def test_cell_integral(self):
        family = BumpFamily(4, int_h=1 / 140)
        integral = quadrature(lambda x: family.bump(2, x), abs_tol=1e-14, breakpoints=family.edges)
        assert integral == pytest.approx(family.cell_integral, rel=1e-9)
        assert family.cell_integral == pytest.approx(1 / (140 * 8 * 64))

    def test_profile_norms(self):
        family = BumpFamily(1, int_h=1 / 140)
        h0, h1, h2 = family.profile_norms
        assert h0 == pytest.approx(1 / 64)
        assert h2 == pytest.approx(0.375)

    def test_class_constant(self, config):
        family = BumpFamily(8, int_h=1 / 140)
        assert family.m_const == pytest.approx(0.375)
        assert mean_integrand_bound(family, config) == pytest.approx(0.375 * (1 + 50 / 8))

    def test_rejects_non_smooth_profile(self):
        with pytest.raises(InputError):
            BumpFamily(4, int_h=1.0, alpha=2.0)


class TestBooleanOracle:

    def test_counter_and_restrict(self):
        B = BooleanOracle.indicator(3, [2, 5])
        sub = B.restrict(4, 2)
        assert [sub(j) for j in range(4)] == [0, 1, 0, 0]
        assert B.counter == 4
        assert B.complement()(2) == 0
        assert B.counter == 5

    def test_range_errors(self):
        B = BooleanOracle.constant(2, 1)
        with pytest.raises(InputError):
            B(4)
        with pytest.raises(InputError):
            B.restrict(3, 1)
        with pytest.raises(InputError):
            BooleanOracle(1, lambda j: 2)(0)

    def test_from_bits(self):
        B = BooleanOracle.from_bits([0, 1, 1, 0])
        assert B.n == 2 and [B(j) for j in range(4)] == [0, 1, 1, 0]
        with pytest.raises(InputError):
            BooleanOracle.from_bits([0, 1, 1])


class TestBoundedVector:

    def test_padding_keeps_minimum(self):
        x = BoundedVector.from_values([3, -1, 2])
        assert x.N == 4
        assert list(x.entries) == [3, -1, 2, 2]
        assert x.bound_M == 3

    def test_bound_enforced(self):
        with pytest.raises(InputError):
            BoundedVector(1, 1.0, [0.5, 2.0])
        with pytest.raises(InputError):
            BoundedVector.from_values([])


def test_round_mean():
    assert round_mean(0.26, 4) == 0.25
    assert round_mean(-0.1, 4) == 0.0
    assert round_mean(1.2, 4) == 1.0
    estimate = MeanEstimate(value=0.6, eta=0.1, delta=0.1, N=8)
    assert estimate.rounded_count == 5


def test_scaling_fit():
    x = pd.Series([1.0, 2.0, 3.0, 4.0])
    fit = ScalingFit.calc(x, 2 * x + 1)
    assert fit.slope == pytest.approx(2.0)
    assert fit.intercept == pytest.approx(1.0)
    assert fit.r2 == pytest.approx(1.0)
    assert fit.ratio_spread == pytest.approx(3.0 / 2.25)
    assert fit.check_thresholds({"r2": (0.99, None)}) == []
    assert len(fit.check_thresholds({"slope": (None, 1.0)})) == 1
    with pytest.raises(ValueError):
        ScalingFit.calc(x[:2], x[:2])
    assert math.isfinite(fit.p_value)
