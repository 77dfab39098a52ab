//! Expectation-value evaluators: exact, finite-shot, and the overlap
//! variants used for the metric tensor.

use crate::circuit::Circuit;
use crate::error::Result;
use crate::observable::Observable;
use crate::shots::ShotModel;
use crate::state::{expectation, run_circuit, StateVector};

/// theta -> f_hat(theta). The exact variants are deterministic; the sampled
/// variants advance their stream id on every call so that repeated calls
/// draw independent noise.
#[derive(Debug, Clone)]
pub enum Evaluator {
    Exact {
        circuit: Circuit,
        observable: Observable,
    },
    Sampled {
        circuit: Circuit,
        observable: Observable,
        shots: ShotModel,
        calls: u64,
    },
    /// f(theta) = |<psi(base)|psi(theta)>|^2, the survival probability used
    /// as the metric-tensor objective.
    ExactOverlap {
        circuit: Circuit,
        base_state: StateVector,
    },
    SampledOverlap {
        circuit: Circuit,
        base_state: StateVector,
        shots: ShotModel,
        calls: u64,
    },
}

impl Evaluator {
    pub fn exact(circuit: Circuit, observable: Observable) -> Self {
        Evaluator::Exact {
            circuit,
            observable,
        }
    }

    pub fn sampled(circuit: Circuit, observable: Observable, shots: ShotModel) -> Self {
        Evaluator::Sampled {
            circuit,
            observable,
            shots,
            calls: 0,
        }
    }

    pub fn exact_overlap(circuit: Circuit, base_params: &[f64]) -> Result<Self> {
        let base_state = run_circuit(&circuit, base_params)?;
        Ok(Evaluator::ExactOverlap {
            circuit,
            base_state,
        })
    }

    pub fn sampled_overlap(circuit: Circuit, base_params: &[f64], shots: ShotModel) -> Result<Self> {
        let base_state = run_circuit(&circuit, base_params)?;
        Ok(Evaluator::SampledOverlap {
            circuit,
            base_state,
            shots,
            calls: 0,
        })
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Evaluator::Exact { .. } | Evaluator::ExactOverlap { .. })
    }

    pub fn n_params(&self) -> usize {
        match self {
            Evaluator::Exact { circuit, .. }
            | Evaluator::Sampled { circuit, .. }
            | Evaluator::ExactOverlap { circuit, .. }
            | Evaluator::SampledOverlap { circuit, .. } => circuit.n_params(),
        }
    }

    pub fn eval(&mut self, params: &[f64]) -> Result<f64> {
        match self {
            Evaluator::Exact {
                circuit,
                observable,
            } => expectation(circuit, params, observable),
            Evaluator::Sampled {
                circuit,
                observable,
                shots,
                calls,
            } => {
                let model = shots.with_stream(shots.stream.wrapping_add(*calls));
                *calls += 1;
                let f = expectation(circuit, params, observable)?;
                model.sample_mean(f, observable)
            }
            Evaluator::ExactOverlap {
                circuit,
                base_state,
            } => Ok(run_circuit(circuit, params)?.overlap_sq(base_state)),
            Evaluator::SampledOverlap {
                circuit,
                base_state,
                shots,
                calls,
            } => {
                let model = shots.with_stream(shots.stream.wrapping_add(*calls));
                *calls += 1;
                let f = run_circuit(circuit, params)?.overlap_sq(base_state);
                model.sample_mean(f, &Observable::ZeroProjector)
            }
        }
    }
}
