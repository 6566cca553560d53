"""Noisy variational circuit simulation, Fisher information geometry, and
data-dependent generalization bounds, with a desk-scale experiment harness."""

from .bounds import (
    BoundInputs,
    BoundReport,
    complexity_constant,
    covering_log_bound,
    dudley_numeric,
    effdim_bound,
    entropy_integral,
    generalization_bound,
    k_complexity,
    local_bound,
    rademacher_bound,
    required_samples,
    unit_ball_volume,
)
from .circuit import (
    CircuitSpec,
    ParameterSpace,
    encode,
    eta_factor,
    forward_noisy,
    model_value,
    predict_label,
    predict_probability,
)
from .datasets import Dataset, load_digits, load_iris, pca_reduce, scale_features
from .errors import DataError, NumericError, UsageError
from .experiments import (
    ExperimentConfig,
    LocalRegion,
    ResultRow,
    config_from_json,
    emit_results,
    local_lipschitz,
    local_region_search,
    run_experiment,
)
from .fisher import (
    FisherMatrix,
    cfim,
    cfim_batch_mean,
    effective_dim_ipr,
    effective_dim_rank,
    effective_dim_threshold,
    noisy_cfim_scaled,
    qfim_batch_mean,
    qfim_mixed,
    qfim_pure,
)
from .gradients import density_derivative, finite_diff_grad, model_gradient, param_shift_grad
from .linalg import hermitian_eig, kron, pseudo_inverse, psd_log_sqrt_det
from .sim import (
    KrausChannel,
    Povm,
    apply_channel,
    apply_unitary,
    depolarizing,
    depolarizing_barrier,
    expectation,
    measure_probability,
    measurement_povm,
)
from .training import (
    DatasetSplit,
    TrainConfig,
    TrainResult,
    bounded_loss,
    loss_gradient,
    mse_loss,
    natural_gradient_step,
    train,
)

__version__ = "0.1.0"
