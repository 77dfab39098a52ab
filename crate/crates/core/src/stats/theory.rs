//! Closed-form bias/variance predictions for gradient estimators in the
//! regime where the single-shot variance depends only weakly on the
//! parameter shift.

use std::f64::consts::FRAC_PI_2;

use crate::circuit::Circuit;
use crate::deriv::evaluator::Evaluator;
use crate::deriv::tensor::ps_tensor;
use crate::error::{Error, Result};
use crate::observable::Observable;
use crate::shots::single_shot_variance;
use crate::stats::spec::{EstimatorKind, EstimatorSpec};

/// Exact local quantities entering the closed-form MSE expressions.
#[derive(Debug, Clone, Copy)]
pub struct TheoryInputs {
    /// Single-shot variance sigma_0^2 at (or near) theta.
    pub sigma0_sq: f64,
    /// Shot count per expectation value.
    pub shots: u64,
    /// Exact first derivative g_j.
    pub g: f64,
    /// Exact second derivative g_{j,j}.
    pub f2: f64,
    /// Exact third derivative g_{j,j,j}.
    pub f3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepScheme {
    Central,
    Forward,
    ParamShift,
}

/// Closed-form per-element MSE of a first-order estimator:
///
/// * shift rule: sigma0^2 / (2 N sin^2 s), unbiased;
/// * scaled shift rule: lambda^2 Var + (1 - lambda)^2 g^2;
/// * central difference: sigma0^2 / (2 N h^2) + f3^2 h^4 / 36;
/// * forward difference: sigma0^2 / (2 N h^2) + f2^2 h^2 / 4.
pub fn theory_mse(spec: &EstimatorSpec, inputs: &TheoryInputs) -> f64 {
    let n = inputs.shots as f64;
    let s2 = inputs.sigma0_sq;
    match spec.kind {
        EstimatorKind::ParamShift { s } => s2 / (2.0 * n * s.sin().powi(2)),
        EstimatorKind::ScaledParamShift { s, lambda } => {
            let var = s2 / (2.0 * n * s.sin().powi(2));
            lambda * lambda * var + (1.0 - lambda).powi(2) * inputs.g * inputs.g
        }
        EstimatorKind::CentralDiff { h } => {
            s2 / (2.0 * n * h * h) + inputs.f3 * inputs.f3 * h.powi(4) / 36.0
        }
        EstimatorKind::ForwardDiff { h } => {
            s2 / (2.0 * n * h * h) + inputs.f2 * inputs.f2 * h * h / 4.0
        }
    }
}

/// MSE-minimizing step size: h* = (9 sigma0^2 / (f3^2 N))^(1/6) for the
/// central difference, h* = (2 sigma0^2 / (f2^2 N))^(1/4) for the forward
/// difference, and s* = pi/2 for the shift rule (it maximizes |sin s|).
pub fn optimal_step(scheme: StepScheme, inputs: &TheoryInputs) -> Result<f64> {
    let n = inputs.shots as f64;
    match scheme {
        StepScheme::ParamShift => Ok(FRAC_PI_2),
        StepScheme::Central => {
            if inputs.f3 == 0.0 {
                return Err(Error::ZeroCurvature);
            }
            Ok((9.0 * inputs.sigma0_sq / (inputs.f3 * inputs.f3 * n)).powf(1.0 / 6.0))
        }
        StepScheme::Forward => {
            if inputs.f2 == 0.0 {
                return Err(Error::ZeroCurvature);
            }
            Ok((2.0 * inputs.sigma0_sq / (inputs.f2 * inputs.f2 * n)).powf(0.25))
        }
    }
}

/// MSE-minimizing weight for the scaled shift-rule estimator:
/// lambda* = g^2 / (g^2 + Var). The resulting MSE equals both
/// lambda* Var and (1 - lambda*) g^2.
pub fn lambda_star(g: f64, var_s: f64) -> Result<f64> {
    if g == 0.0 && var_s == 0.0 {
        return Err(Error::UndefinedLambda);
    }
    Ok(g * g / (g * g + var_s))
}

/// Exact third derivative g_{j,j,j}; for rotation-like parameters it equals
/// -g_j.
pub fn third_derivative(
    circuit: &Circuit,
    theta: &[f64],
    obs: &Observable,
    j: usize,
) -> Result<f64> {
    let mut ev = Evaluator::exact(circuit.clone(), obs.clone());
    ps_tensor(&mut ev, theta, &[j, j, j], FRAC_PI_2)
}

/// Relative spread of sigma_0^2(theta + x e_j) + sigma_0^2(theta - x e_j)
/// over the probe offsets `xs`: (max - min) / mean. The closed-form MSE
/// expressions assume this sum is flat; values above ~0.1 flag the regime
/// where they degrade.
pub fn assumption1_spread(
    circuit: &Circuit,
    theta: &[f64],
    obs: &Observable,
    j: usize,
    xs: &[f64],
) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::EmptyIndices);
    }
    let mut values = Vec::with_capacity(xs.len());
    for &x in xs {
        let mut plus = theta.to_vec();
        let mut minus = theta.to_vec();
        plus[j] += x;
        minus[j] -= x;
        values.push(
            single_shot_variance(circuit, &plus, obs)?
                + single_shot_variance(circuit, &minus, obs)?,
        );
    }
    let max = values.iter().cloned().fold(f64::MIN, f64::max);
    let min = values.iter().cloned().fold(f64::MAX, f64::min);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if mean == 0.0 {
        return Ok(0.0);
    }
    Ok((max - min) / mean)
}
