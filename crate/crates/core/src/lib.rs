//! Exact statevector simulation of rotation-like variational circuits,
//! arbitrary-order parameter-shift derivative rules, shot-noise estimator
//! statistics and first/second-order optimizers.
//!
//! Conventions used throughout the crate:
//! * wire `w` maps to bit `w` of the basis-state index (wire 0 is the least
//!   significant bit);
//! * global phases are whatever the gate products produce; only moduli,
//!   overlaps and expectation values are contractual;
//! * randomness comes from ChaCha8, fully determined by a `(seed, stream)`
//!   pair so that repetitions can run on independent streams.

pub mod circuit;
pub mod deriv;
pub mod error;
pub mod gate;
pub mod observable;
pub mod opt;
pub mod pauli;
pub mod shots;
pub mod state;
pub mod stats;

pub use circuit::Circuit;
pub use error::{Error, Result};
pub use gate::Gate;
pub use observable::Observable;
pub use pauli::{PauliLetter, PauliString};
pub use shots::{sample_expectation, single_shot_variance, ShotModel};
pub use state::{expectation, overlap_probability, run_circuit, StateVector};

pub use deriv::evaluator::Evaluator;
pub use deriv::metric::{metric_tensor, metric_tensor_with, DiagMetricForm, MetricMode};
pub use deriv::shift::{eval_count, shift_set, ShiftSet, ShiftVector};
pub use deriv::surrogate::{trig_reconstruct, TrigSurrogate};
pub use deriv::tensor::{
    fd_tensor, pi_shift_identity_check, ps_gradient, ps_hessian, ps_hessian_diag, ps_tensor,
    DerivativeTensor, DiagVariant, FdScheme,
};

pub use stats::gradient::{estimate_gradient, estimate_hessian};
pub use stats::report::{empirical_report, EstimatorReport};
pub use stats::spec::{EstimatorKind, EstimatorSpec};
pub use stats::theory::{
    assumption1_spread, lambda_star, optimal_step, theory_mse, third_derivative, StepScheme,
    TheoryInputs,
};

pub use opt::optimizer::{
    optimize, step, Derivatives, EvalMode, Method, OptimizerConfig, OptimizerTrace, TraceRecord,
};
pub use opt::regularize::{regularize, Regularizer};
