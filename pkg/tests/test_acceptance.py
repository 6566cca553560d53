"""Acceptance suite: one test per release criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s``.  The iris experiment
(criterion 8) runs once as a shared fixture; criterion 10 audits the Fisher
spectra collected during that run.
"""

import math
import time

import numpy as np
import pytest

from qgbounds.bounds import (
    BoundInputs,
    entropy_integral,
    generalization_bound,
    k_complexity,
    local_bound,
    required_samples,
)
from qgbounds.circuit import CircuitSpec, eta_factor, model_value, random_parameters
from qgbounds.experiments import ExperimentConfig, run_experiment
from qgbounds.fisher import SLD_FLOOR, cfim, effective_dim_ipr, qfim_mixed, qfim_pure
from qgbounds.gradients import finite_diff_grad, model_gradient, model_gradients_batch

TABLE_K = {1: 2.72, 10: 3.49, 100: 10.10, 1000: 31.65, 10000: 100.01, 50000: 223.61, 100000: 316.23}
TABLE_N = {1: 8, 10: 13, 100: 102, 1000: 1002, 10000: 10002, 50000: 50002, 100000: 100002}

IRIS_CONFIG = ExperimentConfig(
    dataset="iris",
    layers=(2,),
    noise_rates=(0.05,),
    train_sizes=(20, 40, 60, 80),
    epochs=20,
    n_runs=3,
    base_seed=7,
    out_dir="unused",
)


@pytest.fixture(scope="module")
def iris_experiment():
    sink = []
    start = time.perf_counter()
    rows = run_experiment(IRIS_CONFIG, spectrum_sink=sink)
    elapsed = time.perf_counter() - start
    return rows, sink, elapsed


def random_spec(rng, noise_choices=(0.0, 0.05, 0.1, 0.5)):
    return CircuitSpec(
        n_qubits=int(rng.integers(1, 3)),
        n_layers=int(rng.integers(1, 3)),
        noise_rate=float(rng.choice(noise_choices)),
    )


def test_criterion_01_sample_complexity_table():
    start = time.perf_counter()
    for d, expected_k in TABLE_K.items():
        assert abs(k_complexity(d, 1.0) - expected_k) <= 0.01, d
        assert required_samples(d, 1.0) == TABLE_N[d], d
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    print(f"criterion 1 PASS: scaling table reproduced in {elapsed * 1e3:.1f} ms")


def test_criterion_02_eta_factorization():
    rng = np.random.default_rng(100)
    clean = CircuitSpec(n_qubits=2, n_layers=2, noise_rate=0.0)
    noisy = {p: CircuitSpec(n_qubits=2, n_layers=2, noise_rate=p) for p in (0.05, 0.1, 0.5)}
    worst = 0.0
    for _ in range(200):
        x = rng.uniform(0, np.pi, 4)
        theta = random_parameters(clean.d, rng)
        f0 = model_value(x, theta, clean)
        for p, spec in noisy.items():
            full_kraus = model_value(x, theta, spec)
            deviation = abs(full_kraus - eta_factor(p, spec.k0) * f0)
            worst = max(worst, deviation)
            assert deviation <= 1e-10
    print(f"criterion 2 PASS: 200 points x 3 rates, worst deviation {worst:.2e}")


def test_criterion_03_gradient_oracle():
    rng = np.random.default_rng(101)
    worst = 0.0
    for trial in range(50):
        spec = random_spec(rng, noise_choices=(0.0, 0.05, 0.5) if trial % 2 else (0.0,))
        x = rng.uniform(0, np.pi, int(rng.integers(1, 5)))
        theta = random_parameters(spec.d, rng)
        shift = model_gradient(x, theta, spec)
        fd = finite_diff_grad(lambda t: model_value(x, t, spec), theta, h=1e-5)
        worst = max(worst, float(np.max(np.abs(shift - fd))))
        assert worst <= 1e-6
    print(f"criterion 3 PASS: 50 configs, worst |shift - fd| = {worst:.2e}")


def test_criterion_04_qfi_consistency():
    rng = np.random.default_rng(102)
    worst = 0.0
    for _ in range(50):
        spec = random_spec(rng, noise_choices=(0.0,))
        x = rng.uniform(0, np.pi, int(rng.integers(1, 5)))
        theta = random_parameters(spec.d, rng)
        pure = qfim_pure(x, theta, spec).matrix
        mixed = qfim_mixed(x, theta, spec).matrix
        worst = max(worst, float(np.linalg.norm(pure - mixed)))
        assert worst <= 1e-6
    single = CircuitSpec(n_qubits=1, n_layers=1, noise_rate=0.0)
    for beta in (0.0, 0.9, 2.2):
        qfi = qfim_pure(np.array([0.0]), np.array([0.0, beta, 0.0]), single).matrix[1, 1]
        assert abs(qfi - 1.0) <= 1e-9
    print(f"criterion 4 PASS: 50 configs, worst Frobenius gap {worst:.2e}; unit QFI exact")


def test_criterion_05_information_inequality():
    rng = np.random.default_rng(103)
    worst = 0.0
    for _ in range(100):
        spec = random_spec(rng, noise_choices=(0.0, 0.05, 0.1, 0.5))
        x = rng.uniform(0, np.pi, int(rng.integers(1, 5)))
        theta = random_parameters(spec.d, rng)
        gap = qfim_mixed(x, theta, spec).matrix - cfim(x, theta, spec).matrix
        min_eig = float(np.min(np.linalg.eigvalsh(gap)))
        worst = min(worst, min_eig)
        assert min_eig >= -1e-8
    print(f"criterion 5 PASS: 100 configs, most negative eigenvalue {worst:.2e}")


def test_criterion_06_dudley_oracle():
    for d in (1, 4, 12):
        for c in (0.5, 1.0, 5.0):
            numeric = entropy_integral(d, c)
            closed = math.sqrt(math.pi * d) / 2 * math.exp(c / d)
            assert numeric <= closed + 1e-9, (d, c)
    gaussian = entropy_integral(1, 0.0)
    assert abs(gaussian - math.sqrt(math.pi) / 2) <= 1e-6
    print(f"criterion 6 PASS: integral below closed form on the grid; base case {gaussian:.8f}")


def test_criterion_07_bound_ordering():
    rng = np.random.default_rng(104)
    for _ in range(1000):
        d = int(rng.integers(1, 40))
        n = int(rng.integers(1, 10**5))
        inputs = BoundInputs(
            d=d,
            n_samples=n,
            conf_delta=float(rng.uniform(0.001, 0.5)),
            log_v_theta=float(rng.uniform(-5, 60)),
            log_m=float(rng.uniform(-50, 5)),
            l_f_p=float(rng.uniform(0.01, 5.0)),
            empirical_risk=float(rng.uniform(0, 1)),
        )
        log_v_loc = inputs.log_v_theta - float(rng.uniform(0, 10))
        log_m_loc = inputs.log_m + float(rng.uniform(0, 10))
        l_loc = inputs.l_f_p * float(rng.uniform(0.1, 1.0))
        g = generalization_bound(inputs)
        loc = local_bound(inputs, log_v_loc, log_m_loc, l_loc)
        assert loc.bound <= g.bound + 1e-12
        doubled = BoundInputs(
            d=d,
            n_samples=2 * n,
            conf_delta=inputs.conf_delta,
            log_v_theta=inputs.log_v_theta,
            log_m=inputs.log_m,
            l_f_p=inputs.l_f_p,
            empirical_risk=inputs.empirical_risk,
        )
        assert generalization_bound(doubled).bound < g.bound
        assert local_bound(doubled, log_v_loc, log_m_loc, l_loc).bound < loc.bound
    print("criterion 7 PASS: 1000 nested inputs ordered; bounds strictly shrink as N doubles")


def test_criterion_08_iris_experiment(iris_experiment):
    rows, _, elapsed = iris_experiment
    assert len(rows) == 12
    for row in rows:
        assert math.isfinite(row.gap), "cell failed"
        assert row.global_bound >= row.gap, row
        assert row.local_bound >= row.gap, row
        assert row.local_bound < row.global_bound, row
    gaps_20 = np.median([r.gap for r in rows if r.n_train == 20])
    gaps_80 = np.median([r.gap for r in rows if r.n_train == 80])
    assert gaps_80 <= gaps_20
    assert elapsed < 600.0
    print(
        f"criterion 8 PASS: 12 rows in {elapsed:.1f}s; median gap N=20 {gaps_20:.4f} "
        f"-> N=80 {gaps_80:.4f}; local < global throughout"
    )


def test_criterion_09_noise_smoothing():
    rng = np.random.default_rng(105)
    low = CircuitSpec(n_qubits=2, n_layers=2, noise_rate=0.05)
    high = CircuitSpec(n_qubits=2, n_layers=2, noise_rate=0.5)
    clean = CircuitSpec(n_qubits=2, n_layers=2, noise_rate=0.0)
    x = rng.uniform(0, np.pi, (10, 4))
    for _ in range(10):  # 10 thetas x 10 inputs = 100 fixed pairs
        theta = random_parameters(low.d, rng)
        g_clean = model_gradients_batch(x, theta, clean)
        g_low = model_gradients_batch(x, theta, low)
        g_high = model_gradients_batch(x, theta, high)
        np.testing.assert_allclose(g_low, eta_factor(0.05, low.k0) * g_clean, atol=1e-10)
        np.testing.assert_allclose(g_high, eta_factor(0.5, high.k0) * g_clean, atol=1e-10)
        norms_low = np.linalg.norm(g_low, axis=1)
        norms_high = np.linalg.norm(g_high, axis=1)
        assert np.all(norms_high <= norms_low + 1e-12)
    print("criterion 9 PASS: exact (1-p)^k0 gradient scaling; p=0.5 norms below p=0.05")


def test_criterion_10_effective_dimension_sanity(iris_experiment):
    _, sink, _ = iris_experiment
    assert len(sink) > 100
    d = 12
    for spectrum in sink:
        w = np.maximum(np.asarray(spectrum), 0.0)
        ipr = effective_dim_ipr(w)
        rank = int(np.sum(w > SLD_FLOOR))
        assert 1.0 <= ipr <= d
        assert ipr <= rank + 1e-9
    assert effective_dim_ipr(np.array([2.0, 1.0])) == pytest.approx(1.8, abs=1e-15)
    print(f"criterion 10 PASS: {len(sink)} spectra audited; ipr in [1, d] and below rank")
