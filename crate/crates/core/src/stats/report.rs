//! Empirical bias/variance/MSE reports for gradient estimators against the
//! exact simulator ground truth.

use std::f64::consts::FRAC_PI_2;

use crate::circuit::Circuit;
use crate::deriv::evaluator::Evaluator;
use crate::deriv::tensor::ps_gradient;
use crate::error::{Error, Result};
use crate::observable::Observable;
use crate::shots::{single_shot_variance, ShotModel};
use crate::state::expectation;
use crate::stats::gradient::estimate_gradient;
use crate::stats::spec::{EstimatorKind, EstimatorSpec};
use crate::stats::theory::assumption1_spread;

/// Empirical statistics of R independent realizations of a gradient
/// estimator, with the exactly computable prediction alongside.
#[derive(Debug, Clone)]
pub struct EstimatorReport {
    pub spec: EstimatorSpec,
    pub shots: u64,
    pub repetitions: u64,
    /// Exact gradient (shift rule on the exact evaluator).
    pub truth: Vec<f64>,
    /// Per-element mean estimate minus truth.
    pub bias: Vec<f64>,
    /// Per-element population variance across repetitions.
    pub variance: Vec<f64>,
    /// Per-element mean squared error against truth.
    pub mse: Vec<f64>,
    pub total_mse: f64,
    /// Standard error of each per-element MSE from batch means (up to 10
    /// batches).
    pub mse_std_err: Vec<f64>,
    /// Standard error of the total MSE from batch means.
    pub total_mse_std_err: f64,
    /// Exactly computed per-element MSE: shot variance propagated through
    /// the estimator coefficients plus the exact squared bias.
    pub theory_mse: Vec<f64>,
    pub theory_total_mse: f64,
    /// Largest per-parameter relative spread of the shifted single-shot
    /// variance sum; the closed-form step-size formulas assume this is
    /// small (flagged above 0.1).
    pub assumption1_spread: f64,
    /// Guaranteed slack of the MSE = variance + bias^2 identity; exact up
    /// to floating-point rounding because the variance is the population
    /// variance over the same realizations.
    pub decomposition_tolerance: f64,
}

/// Run R independent realizations of the estimator (distinct stream-id
/// blocks, deterministic per seed) and report empirical bias, variance and
/// MSE per element against the exact gradient.
pub fn empirical_report(
    spec: &EstimatorSpec,
    circuit: &Circuit,
    theta: &[f64],
    obs: &Observable,
    shots: u64,
    repetitions: u64,
    seed: u64,
) -> Result<EstimatorReport> {
    spec.validate()?;
    if spec.order != 1 {
        return Err(Error::InvalidSpec(
            "empirical reports cover first-order estimators".into(),
        ));
    }
    if repetitions < 2 {
        return Err(Error::TooFewRepetitions);
    }
    let m = theta.len();
    let mut ev = Evaluator::exact(circuit.clone(), obs.clone());
    let truth = ps_gradient(&mut ev, theta, FRAC_PI_2)?;

    // each gradient realization consumes exactly two streams per parameter
    let stride = 2 * m as u64;
    let r = repetitions as usize;
    let mut estimates = Vec::with_capacity(r);
    for rep in 0..repetitions {
        let model = ShotModel::new(shots, seed, rep * stride);
        estimates.push(estimate_gradient(spec, circuit, theta, obs, &model)?);
    }

    let mut bias = vec![0.0; m];
    let mut variance = vec![0.0; m];
    let mut mse = vec![0.0; m];
    for j in 0..m {
        let mean = estimates.iter().map(|e| e[j]).sum::<f64>() / r as f64;
        bias[j] = mean - truth[j];
        variance[j] = estimates
            .iter()
            .map(|e| (e[j] - mean).powi(2))
            .sum::<f64>()
            / r as f64;
        mse[j] = estimates
            .iter()
            .map(|e| (e[j] - truth[j]).powi(2))
            .sum::<f64>()
            / r as f64;
    }
    let total_mse = mse.iter().sum();

    // standard errors from batch means of the squared errors
    let n_batches = 10.min(r);
    let std_err = |err_of: &dyn Fn(&[f64]) -> f64| -> f64 {
        let mut batch_means = Vec::with_capacity(n_batches);
        for b in 0..n_batches {
            let lo = b * r / n_batches;
            let hi = (b + 1) * r / n_batches;
            let mean: f64 =
                estimates[lo..hi].iter().map(|e| err_of(e)).sum::<f64>() / (hi - lo) as f64;
            batch_means.push(mean);
        }
        let mean = batch_means.iter().sum::<f64>() / n_batches as f64;
        let var = batch_means.iter().map(|x| (x - mean).powi(2)).sum::<f64>()
            / (n_batches as f64 - 1.0).max(1.0);
        (var / n_batches as f64).sqrt()
    };
    let mse_std_err: Vec<f64> = (0..m)
        .map(|j| std_err(&|e: &[f64]| (e[j] - truth[j]).powi(2)))
        .collect();
    let total_mse_std_err = std_err(&|e: &[f64]| {
        e.iter()
            .zip(&truth)
            .map(|(x, t)| (x - t).powi(2))
            .sum::<f64>()
    });

    let theory_mse = exact_elementwise_mse(spec, circuit, theta, obs, shots, &truth)?;
    let theory_total_mse = theory_mse.iter().sum();

    let step = spec.step();
    let mut spread: f64 = 0.0;
    for j in 0..m {
        spread = spread.max(assumption1_spread(circuit, theta, obs, j, &[0.0, step])?);
    }

    let scale = 1.0 + truth.iter().map(|t| t * t).sum::<f64>() + total_mse;
    Ok(EstimatorReport {
        spec: *spec,
        shots,
        repetitions,
        truth,
        bias,
        variance,
        mse,
        total_mse,
        mse_std_err,
        total_mse_std_err,
        theory_mse,
        theory_total_mse,
        assumption1_spread: spread,
        decomposition_tolerance: 1e-9 * scale,
    })
}

/// Exact per-element MSE of one estimator realization: binomial shot
/// variance at each evaluation point propagated through the linear
/// combination, plus the exact squared bias of the estimator's mean.
fn exact_elementwise_mse(
    spec: &EstimatorSpec,
    circuit: &Circuit,
    theta: &[f64],
    obs: &Observable,
    shots: u64,
    truth: &[f64],
) -> Result<Vec<f64>> {
    let n = shots as f64;
    let m = theta.len();
    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        let shifted = |dx: f64| -> Vec<f64> {
            let mut p = theta.to_vec();
            p[j] += dx;
            p
        };
        // (offset, coefficient) pairs of the linear combination
        let (points, lambda): (Vec<(f64, f64)>, f64) = match spec.kind {
            EstimatorKind::ParamShift { s } => {
                let c = 1.0 / (2.0 * s.sin());
                (vec![(s, c), (-s, -c)], 1.0)
            }
            EstimatorKind::ScaledParamShift { s, lambda } => {
                let c = 1.0 / (2.0 * s.sin());
                (vec![(s, c), (-s, -c)], lambda)
            }
            EstimatorKind::CentralDiff { h } => {
                let c = 1.0 / (2.0 * h);
                (vec![(h, c), (-h, -c)], 1.0)
            }
            EstimatorKind::ForwardDiff { h } => (vec![(h, 1.0 / h), (0.0, -1.0 / h)], 1.0),
        };
        let mut mean = 0.0;
        let mut var = 0.0;
        for &(dx, c) in &points {
            let p = shifted(dx);
            mean += c * expectation(circuit, &p, obs)?;
            var += c * c * single_shot_variance(circuit, &p, obs)? / n;
        }
        mean *= lambda;
        var *= lambda * lambda;
        out.push(var + (mean - truth[j]).powi(2));
    }
    Ok(out)
}
