import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgbounds.circuit import (
    CircuitSpec,
    ParameterSpace,
    encode,
    eta_factor,
    forward_batch,
    forward_noisy,
    model_value,
    model_values_batch,
    predict_label,
    predict_probability,
    pure_states_batch,
    random_parameters,
)
from qgbounds.linalg import hermitian_eig
from qgbounds.sim import measure_probability, measurement_povm


class TestCircuitSpec:
    def test_parameter_dimension(self):
        assert CircuitSpec(n_qubits=2, n_layers=2).d == 12
        assert CircuitSpec(n_qubits=2, n_layers=3).d == 18

    def test_default_barriers_and_k0(self):
        spec = CircuitSpec(n_qubits=2, n_layers=2)
        assert spec.noise_barriers == (0, 2)
        assert spec.k0 == 2

    def test_per_layer_barriers(self):
        spec = CircuitSpec(n_qubits=2, n_layers=3, noise_barriers=(0, 1, 2, 3))
        assert spec.k0 == 4

    def test_rejects_bad_noise_rate(self):
        with pytest.raises(ValueError, match="noise_rate"):
            CircuitSpec(n_qubits=2, n_layers=1, noise_rate=1.5)

    def test_rejects_bad_barrier_slot(self):
        with pytest.raises(ValueError, match="barrier"):
            CircuitSpec(n_qubits=2, n_layers=1, noise_barriers=(0, 5))

    def test_parameter_space_log_volume(self):
        assert ParameterSpace(12).log_volume == pytest.approx(12 * np.log(4 * np.pi))


class TestEncode:
    def test_zero_angles_give_ground_state(self, spec2q):
        psi = encode(np.zeros(4), spec2q)
        np.testing.assert_allclose(psi, [1, 0, 0, 0], atol=1e-15)

    def test_pi_on_first_feature_excites_qubit_zero(self, spec2q):
        # RX(pi)|0> = -i|1>: all weight on basis states with qubit 0 set
        psi = encode(np.array([np.pi, 0.0]), spec2q)
        prob_q0_one = np.sum(np.abs(psi[2:]) ** 2)
        assert prob_q0_one == pytest.approx(1.0, abs=1e-12)

    def test_pi_on_second_feature_excites_qubit_one_only(self, spec2q):
        psi = encode(np.array([0.0, np.pi]), spec2q)
        prob_q1_one = np.abs(psi[1]) ** 2 + np.abs(psi[3]) ** 2
        prob_q0_one = np.sum(np.abs(psi[2:]) ** 2)
        assert prob_q1_one == pytest.approx(1.0, abs=1e-12)
        assert prob_q0_one == pytest.approx(0.0, abs=1e-12)

    def test_rejects_empty_features(self, spec2q):
        with pytest.raises(ValueError, match="empty"):
            encode(np.array([]), spec2q)

    def test_reuploading_composes_same_axis(self, spec2q):
        # features 1 and 3 land on qubit 0 as RX, so angles add
        a = encode(np.array([0.3, 0.0, 0.5, 0.0]), spec2q)
        b = encode(np.array([0.8, 0.0]), spec2q)
        np.testing.assert_allclose(a, b, atol=1e-12)


class TestForwardNoisy:
    def test_noiseless_zero_point(self, spec2q):
        rho = forward_noisy(np.zeros(4), np.zeros(spec2q.d), spec2q)
        np.testing.assert_allclose(rho, np.diag([1.0, 0, 0, 0]), atol=1e-12)

    def test_full_noise_limit_is_maximally_mixed(self, rng):
        spec = CircuitSpec(n_qubits=2, n_layers=2, noise_rate=1.0)
        rho = forward_noisy(rng.uniform(0, np.pi, 4), random_parameters(spec.d, rng), spec)
        np.testing.assert_allclose(rho, np.eye(4) / 4, atol=1e-12)

    def test_random_outputs_are_states(self, rng, spec2q_noisy):
        for _ in range(10):
            rho = forward_noisy(
                rng.uniform(0, np.pi, 4), random_parameters(spec2q_noisy.d, rng), spec2q_noisy
            )
            assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
            w, _ = hermitian_eig(rho)
            assert float(np.min(w)) >= -1e-10

    def test_rejects_wrong_parameter_count(self, spec2q):
        with pytest.raises(ValueError, match="parameters"):
            forward_noisy(np.zeros(4), np.zeros(5), spec2q)


class TestModelValue:
    def test_noiseless_identity(self, rng, spec2q):
        theta = random_parameters(spec2q.d, rng)
        x = rng.uniform(0, np.pi, 4)
        assert eta_factor(0.0, spec2q.k0) == 1.0
        assert model_value(x, theta, spec2q) == pytest.approx(
            float(model_values_batch(x[None], theta, spec2q)[0]), abs=1e-12
        )

    def test_half_noise_quarters_output(self, rng, spec2q):
        spec_p = CircuitSpec(n_qubits=2, n_layers=2, noise_rate=0.5)
        for _ in range(10):
            theta = random_parameters(spec2q.d, rng)
            x = rng.uniform(0, np.pi, 4)
            noiseless = model_value(x, theta, spec2q)
            assert model_value(x, theta, spec_p) == pytest.approx(0.25 * noiseless, abs=1e-10)

    @pytest.mark.parametrize("p", [0.0, 0.3, 0.9])
    def test_zero_point_gives_eta(self, p):
        spec = CircuitSpec(n_qubits=2, n_layers=2, noise_rate=p)
        val = model_value(np.zeros(4), np.zeros(spec.d), spec)
        assert val == pytest.approx((1 - p) ** 2, abs=1e-12)

    def test_factorization_across_rates(self, rng, spec2q):
        for p in (0.05, 0.1, 0.5):
            spec_p = CircuitSpec(n_qubits=2, n_layers=2, noise_rate=p)
            for _ in range(15):
                theta = random_parameters(spec2q.d, rng)
                x = rng.uniform(0, np.pi, 4)
                full_kraus = model_value(x, theta, spec_p)
                scaled = eta_factor(p, spec_p.k0) * model_value(x, theta, spec2q)
                assert abs(full_kraus - scaled) <= 1e-10

    def test_output_within_eta_range(self, rng):
        spec = CircuitSpec(n_qubits=2, n_layers=2, noise_rate=0.3)
        bound = eta_factor(0.3, spec.k0)
        for _ in range(20):
            val = model_value(
                rng.uniform(0, np.pi, 4), random_parameters(spec.d, rng), spec
            )
            assert -bound - 1e-12 <= val <= bound + 1e-12


class TestPredict:
    def test_probability_matches_povm_route(self, rng, spec2q_noisy):
        povm = measurement_povm(2)
        for _ in range(10):
            theta = random_parameters(spec2q_noisy.d, rng)
            x = rng.uniform(0, np.pi, 4)
            via_model = predict_probability(x, theta, spec2q_noisy)
            via_povm = measure_probability(forward_noisy(x, theta, spec2q_noisy), povm, +1)
            assert via_model == pytest.approx(via_povm, abs=1e-10)

    def test_extremes(self):
        assert predict_label(1.0) == 1
        assert predict_label(0.0) == -1

    def test_examples(self):
        assert predict_label(0.7) == 1
        assert predict_label(0.3) == -1
        assert predict_label(0.5) == 1  # boundary inclusive

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            predict_label(1.2)

    @given(p_hat=st.floats(0, 1), scale=st.floats(0.05, 1.0))
    def test_invariant_under_monotone_rescale_fixing_half(self, p_hat, scale):
        rescaled = 0.5 + (p_hat - 0.5) * scale
        assert predict_label(rescaled) == predict_label(p_hat)


class TestBatchedEngine:
    def test_batch_matches_kraus_route(self, rng):
        for p in (0.0, 0.05, 0.5):
            spec = CircuitSpec(n_qubits=2, n_layers=2, noise_rate=p)
            theta = random_parameters(spec.d, rng)
            x = rng.uniform(0, np.pi, (6, 4))
            batched = forward_batch(x, theta, spec)
            for i in range(x.shape[0]):
                single = forward_noisy(x[i], theta, spec)
                assert np.max(np.abs(batched[i] - single)) < 1e-13

    def test_model_values_match_scalar(self, rng, spec2q_noisy):
        theta = random_parameters(spec2q_noisy.d, rng)
        x = rng.uniform(0, np.pi, (5, 4))
        vals = model_values_batch(x, theta, spec2q_noisy)
        for i in range(5):
            assert vals[i] == pytest.approx(model_value(x[i], theta, spec2q_noisy), abs=1e-12)

    def test_pure_states_require_noiseless(self, rng, spec2q_noisy):
        with pytest.raises(ValueError, match="noise_rate"):
            pure_states_batch(
                rng.uniform(0, np.pi, (2, 4)),
                random_parameters(spec2q_noisy.d, rng),
                spec2q_noisy,
            )

    def test_pure_states_match_density_route(self, rng, spec2q):
        theta = random_parameters(spec2q.d, rng)
        x = rng.uniform(0, np.pi, (4, 4))
        psi = pure_states_batch(x, theta, spec2q)
        rho = forward_batch(x, theta, spec2q)
        outer = np.einsum("ni,nj->nij", psi, psi.conj())
        np.testing.assert_allclose(outer, rho, atol=1e-12)

    @settings(max_examples=20, deadline=None)
    @given(n_qubits=st.integers(1, 3), n_layers=st.integers(1, 2), seed=st.integers(0, 999))
    def test_engine_consistency_across_shapes(self, n_qubits, n_layers, seed):
        rng = np.random.default_rng(seed)
        spec = CircuitSpec(n_qubits=n_qubits, n_layers=n_layers, noise_rate=0.1)
        theta = random_parameters(spec.d, rng)
        x = rng.uniform(0, np.pi, (2, 3))
        batched = forward_batch(x, theta, spec)
        for i in range(2):
            single = forward_noisy(x[i], theta, spec)
            assert np.max(np.abs(batched[i] - single)) < 1e-12
