//! Sampled gradient and Hessian estimators.

use crate::circuit::Circuit;
use crate::deriv::evaluator::Evaluator;
use crate::deriv::tensor::{fd_tensor, ps_tensor, DerivativeTensor, FdScheme};
use crate::error::{Error, Result};
use crate::observable::Observable;
use crate::shots::ShotModel;
use crate::stats::spec::{EstimatorKind, EstimatorSpec};

/// One realization of the gradient estimator: every shifted expectation is
/// sampled with `shots.shots` shots on its own stream, consumed in a fixed
/// order (parameters ascending, positive shift before negative), so the
/// shift rule at s = h and the central difference at step h see identical
/// sample noise.
pub fn estimate_gradient(
    spec: &EstimatorSpec,
    circuit: &Circuit,
    theta: &[f64],
    obs: &Observable,
    shots: &ShotModel,
) -> Result<Vec<f64>> {
    spec.validate()?;
    if spec.order != 1 {
        return Err(Error::InvalidSpec(format!(
            "gradient estimator requires order 1, got {}",
            spec.order
        )));
    }
    let mut ev = Evaluator::sampled(circuit.clone(), obs.clone(), *shots);
    let m = theta.len();
    let mut g = Vec::with_capacity(m);
    for j in 0..m {
        let value = match spec.kind {
            EstimatorKind::ParamShift { s } => ps_tensor(&mut ev, theta, &[j], s)?,
            EstimatorKind::ScaledParamShift { s, lambda } => {
                lambda * ps_tensor(&mut ev, theta, &[j], s)?
            }
            EstimatorKind::CentralDiff { h } => {
                fd_tensor(&mut ev, theta, &[j], h, FdScheme::Central)?
            }
            EstimatorKind::ForwardDiff { h } => {
                fd_tensor(&mut ev, theta, &[j], h, FdScheme::Forward)?
            }
        };
        g.push(value);
    }
    Ok(g)
}

/// One realization of the Hessian estimator; entries filled in canonical
/// j1 <= j2 order with fresh noise per expectation value.
pub fn estimate_hessian(
    spec: &EstimatorSpec,
    circuit: &Circuit,
    theta: &[f64],
    obs: &Observable,
    shots: &ShotModel,
) -> Result<DerivativeTensor> {
    spec.validate()?;
    if spec.order != 2 {
        return Err(Error::InvalidSpec(format!(
            "Hessian estimator requires order 2, got {}",
            spec.order
        )));
    }
    let mut ev = Evaluator::sampled(circuit.clone(), obs.clone(), *shots);
    let m = theta.len();
    let mut tensor = DerivativeTensor::new(2, m);
    for j1 in 0..m {
        for j2 in j1..m {
            let value = match spec.kind {
                EstimatorKind::ParamShift { s } => ps_tensor(&mut ev, theta, &[j1, j2], s)?,
                EstimatorKind::ScaledParamShift { s, lambda } => {
                    lambda * ps_tensor(&mut ev, theta, &[j1, j2], s)?
                }
                EstimatorKind::CentralDiff { h } => {
                    fd_tensor(&mut ev, theta, &[j1, j2], h, FdScheme::Central)?
                }
                EstimatorKind::ForwardDiff { .. } => unreachable!("rejected by validate"),
            };
            tensor.set(&[j1, j2], value);
        }
    }
    Ok(tensor)
}
