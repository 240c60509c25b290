import math

import numpy as np
import pytest

from kj_sle.classes.phase_estimation_plan import Backend, PhaseEstimationPlan
from kj_sle.classes.potential import Potential
from kj_sle.classes.tridiagonal_system import build_matrix
from kj_sle.errors import CapacityError, InputError
from kj_sle.solvers.eigen import LAMBDA_HALF, leading_eigenpairs, smallest_eigenvalue_classical
from kj_sle.solvers.qpe import (dense_distribution, dirichlet_kernel, estimate_lambda, initial_state, make_plan,
                                median_failure_bound, qpe_sample, readout_excess, spectral_distribution)

TEST_POTENTIALS = [Potential.constant(0.0), Potential.sine(0.3, 1.0), Potential.linear(0.2, 0.5)]


class TestPlan:

    def test_reference_plan(self):
        plan = make_plan(0.2, 0.25, "spectral")
        assert (plan.k, plan.b, plan.r) == (15, 9, 13)
        assert plan.power_queries == 117
        assert plan.qubits_peak == 13

    @pytest.mark.parametrize("eta", [0.3, 1e-3, 1e-8])
    def test_discretization_budget(self, eta, config):
        plan = make_plan(eta, 0.1, "classical")
        assert config.c_disc / (plan.k + 1) ** 2 <= eta / 2
        assert config.c_disc / ((plan.k + 1) // 2) ** 2 > eta / 2 or plan.k == 1
        assert 2 ** (plan.b - config.guard_bits) >= 8 * math.pi / eta
        assert plan.r % 2 == 1 and plan.r >= config.chernoff_c * math.log(10) + 1

    def test_capacity_only_for_simulated_backends(self):
        with pytest.raises(CapacityError):
            make_plan(1e-14, 0.1, "dense")
        with pytest.raises(CapacityError):
            make_plan(1e-20, 0.1, "spectral")
        assert make_plan(1e-14, 0.1, "spectral").k == 2 ** 26 - 1
        assert make_plan(1e-14, 0.1, "classical").backend is Backend.CLASSICAL

    @pytest.mark.parametrize("eta, delta", [(0.0, 0.1), (1.0, 0.1), (0.1, 1.0)])
    def test_invalid(self, eta, delta):
        with pytest.raises(InputError):
            make_plan(eta, delta)


class TestInitialState:

    def test_single_point(self):
        assert list(initial_state(1)) == [1.0]

    def test_three_points(self):
        psi = initial_state(3)
        assert psi == pytest.approx([0.5, math.sqrt(2) / 2, 0.5])
        assert float(np.dot(psi, psi)) == pytest.approx(1.0)

    def test_ground_vector_of_free_matrix(self):
        ground = leading_eigenpairs(build_matrix(Potential.constant(0.0), 15), 1)[0].vector
        assert abs(float(np.dot(ground, initial_state(15)))) == pytest.approx(1.0, abs=1e-12)

    def test_rejects_empty_grid(self):
        with pytest.raises(InputError):
            initial_state(0)


class TestPhaseReadout:

    def test_modal_outcome(self):
        T = build_matrix(Potential.constant(0.0), 3)
        assert dense_distribution(T, 6).mode == 48
        assert spectral_distribution(T, 6, delta=0.5).mode == 48

    @pytest.mark.parametrize("backend", [Backend.DENSE, Backend.SPECTRAL])
    def test_qpe_sample(self, backend):
        T = build_matrix(Potential.constant(0.0), 3)
        plan = PhaseEstimationPlan(k=3, b=6, r=1, backend=backend, eta=0.2, delta=0.25)
        rng = np.random.default_rng(5)
        samples = [qpe_sample(T, plan, rng) for _ in range(200)]
        outcomes = [sample.outcome for sample in samples]
        assert all(0 <= m < 64 for m in outcomes)
        assert max(set(outcomes), key=outcomes.count) == 48
        assert samples[0].ledger.power_queries == 6
        assert samples[0].ledger.qubits_peak == 8

    def test_qpe_sample_rejects_mismatched_plan(self):
        T = build_matrix(Potential.constant(0.0), 7)
        plan = PhaseEstimationPlan(k=3, b=6, r=1, backend=Backend.SPECTRAL, eta=0.2, delta=0.25)
        with pytest.raises(InputError):
            qpe_sample(T, plan, np.random.default_rng(0))

    @pytest.mark.parametrize("q", TEST_POTENTIALS + [Potential.constant(1.0)])
    @pytest.mark.parametrize("k", [1, 7, 255])
    def test_phase_does_not_wrap(self, q, k):
        lam = smallest_eigenvalue_classical(build_matrix(q, k))
        assert 0 < lam / (4 * math.pi) < 0.87


class TestKernel:

    def test_kernel_normalization(self):
        b = 6
        offsets = np.arange(-32, 32)
        assert dirichlet_kernel(np.array([0.0]), b)[0] == 1.0
        assert float(np.sum(dirichlet_kernel(0.37 - offsets, b))) == pytest.approx(1.0, abs=1e-12)

    def test_readout_excess(self):
        assert readout_excess(0, 10) == pytest.approx(-LAMBDA_HALF)
        assert readout_excess(2 ** 9, 10) == pytest.approx(2 * math.pi - LAMBDA_HALF)

    def test_median_failure_bound(self):
        assert median_failure_bound(0.9, 1) == pytest.approx(0.1)
        assert median_failure_bound(0.81, 13) < 0.01


class TestBackendAgreement:

    @pytest.mark.parametrize("q", TEST_POTENTIALS)
    def test_dense_and_spectral_distributions(self, q):
        T = build_matrix(q, 7)
        dense = dense_distribution(T, 6)
        spectral = spectral_distribution(T, 6, delta=0.5)
        assert dense.total_variation(spectral) <= 1e-6
        assert spectral.deficit <= 1e-9

    def test_seeded_samples_identical(self):
        T = build_matrix(TEST_POTENTIALS[1], 7)
        dense = dense_distribution(T, 6)
        spectral = spectral_distribution(T, 6, delta=0.5)
        draws_dense = [dense.sample(g).outcome for g in np.random.default_rng(11).spawn(100)]
        draws_spectral = [spectral.sample(g).outcome for g in np.random.default_rng(11).spawn(100)]
        assert draws_dense == draws_spectral

    def test_mode_near_ground_phase(self):
        T = build_matrix(Potential.constant(0.0), 7)
        spectral = spectral_distribution(T, 8, delta=0.5)
        ground = 4 * 64 * math.sin(math.pi / 16) ** 2
        assert abs(spectral.mode - ground / (4 * math.pi) * 2 ** 8) <= 1

    def test_dense_qubit_cap(self, config):
        T = build_matrix(Potential.constant(0.0), 7)
        with pytest.raises(CapacityError):
            dense_distribution(T, 8, config.replace(dense_qubit_cap=10))


class TestEstimateLambda:

    def test_spectral_run(self):
        estimate = estimate_lambda(Potential.constant(0.0), 0.2, 0.25, "spectral", seed=1)
        assert estimate.value == pytest.approx(math.pi ** 2, abs=0.2)
        assert estimate.ledger.power_queries == estimate.plan.r * estimate.plan.b == 117
        assert estimate.ledger.qubits_peak == 13
        assert estimate.backend == "spectral"

    def test_seed_reproducible(self):
        first = estimate_lambda(Potential.sine(0.2, 1.0), 0.1, 0.2, "spectral", seed=5)
        second = estimate_lambda(Potential.sine(0.2, 1.0), 0.1, 0.2, "spectral", seed=5)
        assert first.value == second.value

    def test_dense_run(self):
        estimate = estimate_lambda(Potential.constant(0.5), 0.3, 0.3, "dense", seed=2)
        assert estimate.value == pytest.approx(LAMBDA_HALF, abs=0.3)

    def test_threads_do_not_change_result(self, config):
        single = estimate_lambda(Potential.constant(0.0), 0.2, 0.25, "spectral", seed=3, config=config)
        threaded = estimate_lambda(Potential.constant(0.0), 0.2, 0.25, "spectral", seed=3,
                                   config=config.replace(threads=4))
        assert single.value == threaded.value

    def test_classical_run(self):
        estimate = estimate_lambda(Potential.constant(0.7), 1e-6, 0.1, "classical")
        assert estimate.excess == pytest.approx(0.2, abs=1e-6)
        assert estimate.ledger.power_queries == estimate.plan.power_queries


@pytest.mark.slow
def test_spectral_failure_rate():
    failures = 0
    generator = np.random.default_rng(10)
    for _ in range(500):
        estimate = estimate_lambda(Potential.constant(0.0), 0.2, 0.25, "spectral", rng=generator)
        failures += abs(estimate.value - math.pi ** 2) > 0.2
        assert estimate.ledger.power_queries == 117
    assert failures / 500 <= 0.25
