//! GD, Newton, diagonal-Newton and natural-gradient optimization loops
//! with per-step circuit-evaluation accounting.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};

use crate::circuit::Circuit;
use crate::deriv::evaluator::Evaluator;
use crate::error::{Error, Result};
use crate::observable::Observable;
use crate::opt::regularize::{regularize, Regularizer};
use crate::shots::ShotModel;
use crate::state::expectation;
use crate::stats::spec::{EstimatorKind, EstimatorSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Gd,
    Newton,
    DiagNewton,
    Qng,
}

/// Whether expectation values are exact or sampled with N shots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Exact,
    Sampled(u64),
}

#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    pub method: Method,
    /// Learning rate eta >= 0 (0 freezes the parameters).
    pub learning_rate: f64,
    pub regularizer: Regularizer,
    /// Rule used for the gradient; the curvature always uses the pi/2
    /// shift forms so its evaluations can be shared with a pi/2 gradient.
    pub gradient: EstimatorSpec,
    /// Applies to every expectation in the loop (gradient and curvature).
    pub eval_mode: EvalMode,
    pub max_iterations: usize,
    /// Mask of optimized parameters; `None` trains all of them.
    pub trainable: Option<Vec<bool>>,
    pub seed: u64,
}

impl OptimizerConfig {
    pub fn new(method: Method, learning_rate: f64) -> Self {
        Self {
            method,
            learning_rate,
            regularizer: Regularizer::Clamp(1e-3),
            gradient: EstimatorSpec::gradient(EstimatorKind::ParamShift { s: FRAC_PI_2 }),
            eval_mode: EvalMode::Exact,
            max_iterations: 100,
            trainable: None,
            seed: 0,
        }
    }

    fn trainable_indices(&self, m: usize) -> Result<Vec<usize>> {
        match &self.trainable {
            None => Ok((0..m).collect()),
            Some(mask) => {
                if mask.len() != m {
                    return Err(Error::ParamCount {
                        expected: m,
                        got: mask.len(),
                    });
                }
                Ok(mask
                    .iter()
                    .enumerate()
                    .filter_map(|(j, &t)| t.then_some(j))
                    .collect())
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.learning_rate.is_finite() || self.learning_rate < 0.0 {
            return Err(Error::InvalidSpec(format!(
                "learning rate must be finite and >= 0, got {}",
                self.learning_rate
            )));
        }
        self.gradient.validate()?;
        if self.gradient.order != 1 {
            return Err(Error::InvalidSpec(
                "optimizer gradient spec must have order 1".into(),
            ));
        }
        Ok(())
    }
}

/// Derivative estimates for one step, indexed over the trainable
/// parameters in ascending order. Matrices are the regularized versions.
#[derive(Debug, Clone)]
pub struct Derivatives {
    pub gradient: Vec<f64>,
    /// Regularized Hessian (Newton).
    pub hessian: Option<DMatrix<f64>>,
    /// Regularized Hessian diagonal (diagonal Newton).
    pub diag: Option<Vec<f64>>,
    /// Regularized metric tensor (natural gradient).
    pub metric: Option<DMatrix<f64>>,
}

/// One parameter update. Untrained parameters are left unchanged.
pub fn step(config: &OptimizerConfig, theta: &[f64], derivs: &Derivatives) -> Result<Vec<f64>> {
    config.validate()?;
    let idx = config.trainable_indices(theta.len())?;
    if derivs.gradient.len() != idx.len() {
        return Err(Error::ParamCount {
            expected: idx.len(),
            got: derivs.gradient.len(),
        });
    }
    let eta = config.learning_rate;
    let g = DVector::from_column_slice(&derivs.gradient);
    let direction: DVector<f64> = match config.method {
        Method::Gd => g,
        Method::DiagNewton => {
            let diag = derivs
                .diag
                .as_ref()
                .ok_or_else(|| Error::InvalidSpec("diagonal Newton needs diag".into()))?;
            DVector::from_iterator(idx.len(), g.iter().zip(diag).map(|(gj, d)| gj / d))
        }
        Method::Newton | Method::Qng => {
            let a = match config.method {
                Method::Newton => derivs.hessian.as_ref(),
                _ => derivs.metric.as_ref(),
            }
            .ok_or_else(|| Error::InvalidSpec("matrix method needs its matrix".into()))?;
            a.clone().lu().solve(&g).ok_or(Error::SingularMatrix)?
        }
    };
    let mut out = theta.to_vec();
    for (t, &j) in idx.iter().enumerate() {
        out[j] -= eta * direction[t];
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct TraceRecord {
    pub iteration: usize,
    /// Parameters at the start of the iteration.
    pub theta: Vec<f64>,
    /// Exact-simulator cost at theta (reporting only, never counted).
    pub exact_cost: f64,
    /// Device-estimate of the cost at theta: the step's own sample when the
    /// center point was already evaluated, otherwise a reporting-only
    /// sample; equals `exact_cost` in exact mode.
    pub est_cost: f64,
    /// Estimated gradient, expanded to full parameter length.
    pub gradient: Vec<f64>,
    /// Regularized curvature matrix used by the update, if any.
    pub matrix: Option<DMatrix<f64>>,
    /// Circuit evaluations consumed by this step's derivative estimates.
    pub evals: u64,
    pub cumulative_evals: u64,
}

#[derive(Debug, Clone)]
pub struct OptimizerTrace {
    pub records: Vec<TraceRecord>,
    pub final_theta: Vec<f64>,
    pub total_evals: u64,
}

/// Per-step evaluation bank: distinct points are evaluated once and shared
/// between the gradient and curvature estimates, which is what makes the
/// pi/2 shift forms cost 4 (GD), 5 (diagonal Newton) and 9 (Newton)
/// evaluations per step for two trainable parameters.
struct Bank {
    cache: HashMap<Vec<u64>, f64>,
    evals: u64,
}

impl Bank {
    fn new() -> Self {
        Self {
            cache: HashMap::new(),
            evals: 0,
        }
    }

    fn value(&mut self, ev: &mut Evaluator, point: &[f64]) -> Result<f64> {
        let key: Vec<u64> = point.iter().map(|x| x.to_bits()).collect();
        if let Some(&v) = self.cache.get(&key) {
            return Ok(v);
        }
        let v = ev.eval(point)?;
        self.cache.insert(key, v);
        self.evals += 1;
        Ok(v)
    }

    fn peek(&self, point: &[f64]) -> Option<f64> {
        let key: Vec<u64> = point.iter().map(|x| x.to_bits()).collect();
        self.cache.get(&key).copied()
    }
}

fn shifted(theta: &[f64], j: usize, dx: f64) -> Vec<f64> {
    let mut p = theta.to_vec();
    p[j] += dx;
    p
}

/// Run the optimization loop for `config.max_iterations` steps.
pub fn optimize(
    circuit: &Circuit,
    obs: &Observable,
    theta0: &[f64],
    config: &OptimizerConfig,
) -> Result<OptimizerTrace> {
    config.validate()?;
    let m = theta0.len();
    let idx = config.trainable_indices(m)?;
    let mut ev = match config.eval_mode {
        EvalMode::Exact => Evaluator::exact(circuit.clone(), obs.clone()),
        EvalMode::Sampled(n) => Evaluator::sampled(
            circuit.clone(),
            obs.clone(),
            ShotModel::new(n, config.seed, 0),
        ),
    };
    // stream cursor for the per-iteration overlap evaluators (natural
    // gradient only); kept disjoint from the expectation streams
    let mut overlap_cursor: u64 = 1 << 32;

    let mut theta = theta0.to_vec();
    let mut records = Vec::with_capacity(config.max_iterations);
    let mut cumulative = 0u64;

    for iteration in 0..config.max_iterations {
        let mut bank = Bank::new();

        // gradient over trainable indices
        let mut gradient = Vec::with_capacity(idx.len());
        for &j in &idx {
            let gj = match config.gradient.kind {
                EstimatorKind::ParamShift { s } => {
                    let fp = bank.value(&mut ev, &shifted(&theta, j, s))?;
                    let fm = bank.value(&mut ev, &shifted(&theta, j, -s))?;
                    (fp - fm) / (2.0 * s.sin())
                }
                EstimatorKind::ScaledParamShift { s, lambda } => {
                    let fp = bank.value(&mut ev, &shifted(&theta, j, s))?;
                    let fm = bank.value(&mut ev, &shifted(&theta, j, -s))?;
                    lambda * (fp - fm) / (2.0 * s.sin())
                }
                EstimatorKind::CentralDiff { h } => {
                    let fp = bank.value(&mut ev, &shifted(&theta, j, h))?;
                    let fm = bank.value(&mut ev, &shifted(&theta, j, -h))?;
                    (fp - fm) / (2.0 * h)
                }
                EstimatorKind::ForwardDiff { h } => {
                    let fp = bank.value(&mut ev, &shifted(&theta, j, h))?;
                    let f0 = bank.value(&mut ev, &theta)?;
                    (fp - f0) / h
                }
            };
            gradient.push(gj);
        }

        // curvature
        let mut derivs = Derivatives {
            gradient: gradient.clone(),
            hessian: None,
            diag: None,
            metric: None,
        };
        let mut matrix_used: Option<DMatrix<f64>> = None;
        match config.method {
            Method::Gd => {}
            Method::DiagNewton => {
                let diag = hessian_diag(&mut bank, &mut ev, &theta, &idx)?;
                let a = regularize(
                    &DMatrix::from_diagonal(&DVector::from_vec(diag)),
                    config.regularizer,
                )?;
                matrix_used = Some(a.clone());
                derivs.diag = Some((0..idx.len()).map(|t| a[(t, t)]).collect());
            }
            Method::Newton => {
                let k = idx.len();
                let diag = hessian_diag(&mut bank, &mut ev, &theta, &idx)?;
                let mut h = DMatrix::from_diagonal(&DVector::from_vec(diag));
                for t1 in 0..k {
                    for t2 in (t1 + 1)..k {
                        let (j1, j2) = (idx[t1], idx[t2]);
                        let mut probe = |a: f64, b: f64| -> Result<f64> {
                            let mut p = theta.clone();
                            p[j1] += a * FRAC_PI_2;
                            p[j2] += b * FRAC_PI_2;
                            bank.value(&mut ev, &p)
                        };
                        let v = (probe(1.0, 1.0)? - probe(1.0, -1.0)? - probe(-1.0, 1.0)?
                            + probe(-1.0, -1.0)?)
                            / 4.0;
                        h[(t1, t2)] = v;
                        h[(t2, t1)] = v;
                    }
                }
                let a = regularize(&h, config.regularizer)?;
                matrix_used = Some(a.clone());
                derivs.hessian = Some(a);
            }
            Method::Qng => {
                let (f_matrix, used) =
                    metric_block(circuit, &theta, &idx, config, overlap_cursor)?;
                overlap_cursor += used;
                bank.evals += used;
                let a = regularize(&f_matrix, config.regularizer)?;
                matrix_used = Some(a.clone());
                derivs.metric = Some(a);
            }
        }

        let exact_cost = expectation(circuit, &theta, obs)?;
        let est_cost = match config.eval_mode {
            EvalMode::Exact => exact_cost,
            EvalMode::Sampled(_) => match bank.peek(&theta) {
                Some(v) => v,
                None => ev.eval(&theta)?, // reporting only, not counted
            },
        };

        let mut full_gradient = vec![0.0; m];
        for (t, &j) in idx.iter().enumerate() {
            full_gradient[j] = gradient[t];
        }

        let evals = bank.evals;
        cumulative += evals;
        records.push(TraceRecord {
            iteration,
            theta: theta.clone(),
            exact_cost,
            est_cost,
            gradient: full_gradient,
            matrix: matrix_used,
            evals,
            cumulative_evals: cumulative,
        });

        theta = step(config, &theta, &derivs)?;
    }

    Ok(OptimizerTrace {
        records,
        final_theta: theta,
        total_evals: cumulative,
    })
}

/// Hessian diagonal over the trainable indices via the three-evaluation
/// form [f(+pi/2) - 2 f(theta) + f(-pi/2)] / 2, sharing the bank with the
/// gradient.
fn hessian_diag(
    bank: &mut Bank,
    ev: &mut Evaluator,
    theta: &[f64],
    idx: &[usize],
) -> Result<Vec<f64>> {
    let f0 = bank.value(ev, theta)?;
    idx.iter()
        .map(|&j| {
            let fp = bank.value(ev, &shifted(theta, j, FRAC_PI_2))?;
            let fm = bank.value(ev, &shifted(theta, j, -FRAC_PI_2))?;
            Ok((fp - 2.0 * f0 + fm) / 2.0)
        })
        .collect()
}

/// Metric tensor restricted to the trainable indices, from overlap
/// probabilities against the current state; returns the matrix and the
/// number of circuit evaluations consumed.
fn metric_block(
    circuit: &Circuit,
    theta: &[f64],
    idx: &[usize],
    config: &OptimizerConfig,
    stream_base: u64,
) -> Result<(DMatrix<f64>, u64)> {
    let mut ev = match config.eval_mode {
        EvalMode::Exact => Evaluator::exact_overlap(circuit.clone(), theta)?,
        EvalMode::Sampled(n) => Evaluator::sampled_overlap(
            circuit.clone(),
            theta,
            ShotModel::new(n, config.seed, stream_base),
        )?,
    };
    let mut used = 0u64;
    let mut prob = |offsets: &[(usize, f64)]| -> Result<f64> {
        let mut p = theta.to_vec();
        for &(j, x) in offsets {
            p[j] += x;
        }
        used += 1;
        ev.eval(&p)
    };
    let k = idx.len();
    let mut f_matrix = DMatrix::zeros(k, k);
    for t in 0..k {
        f_matrix[(t, t)] = (1.0 - prob(&[(idx[t], std::f64::consts::PI)])?) / 4.0;
    }
    for t1 in 0..k {
        for t2 in (t1 + 1)..k {
            let pp = prob(&[(idx[t1], FRAC_PI_2), (idx[t2], FRAC_PI_2)])?;
            let pm = prob(&[(idx[t1], FRAC_PI_2), (idx[t2], -FRAC_PI_2)])?;
            let mp = prob(&[(idx[t1], -FRAC_PI_2), (idx[t2], FRAC_PI_2)])?;
            let mm = prob(&[(idx[t1], -FRAC_PI_2), (idx[t2], -FRAC_PI_2)])?;
            let v = -(pp - pm - mp + mm) / 8.0;
            f_matrix[(t1, t2)] = v;
            f_matrix[(t2, t1)] = v;
        }
    }
    Ok((f_matrix, used))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::Gate;
    use crate::pauli::{PauliLetter, PauliString};
    use approx::assert_abs_diff_eq;

    fn two_param() -> (Circuit, Observable) {
        let c = Circuit::new(
            2,
            vec![
                Gate::Rotation {
                    generator: "XI".parse().unwrap(),
                    param_index: 0,
                },
                Gate::Cnot { control: 0, target: 1 },
                Gate::Rotation {
                    generator: "IX".parse().unwrap(),
                    param_index: 1,
                },
            ],
        )
        .unwrap();
        let z = Observable::SinglePauli(PauliString::single(PauliLetter::Z, 1, 2).unwrap());
        (c, z)
    }

    #[test]
    fn gd_step_is_linear() {
        let config = OptimizerConfig::new(Method::Gd, 0.4);
        let derivs = Derivatives {
            gradient: vec![1.0, 0.0],
            hessian: None,
            diag: None,
            metric: None,
        };
        let out = step(&config, &[0.5, 0.5], &derivs).unwrap();
        assert_abs_diff_eq!(out[0], 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(out[1], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn newton_with_identity_matches_gd() {
        let mut config = OptimizerConfig::new(Method::Newton, 0.4);
        config.regularizer = Regularizer::Clamp(1e-6);
        let derivs = Derivatives {
            gradient: vec![0.3, -0.2],
            hessian: Some(DMatrix::identity(2, 2)),
            diag: None,
            metric: None,
        };
        let out = step(&config, &[1.0, 1.0], &derivs).unwrap();
        assert_abs_diff_eq!(out[0], 1.0 - 0.4 * 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(out[1], 1.0 + 0.4 * 0.2, epsilon = 1e-12);
    }

    #[test]
    fn diag_newton_arithmetic() {
        let config = OptimizerConfig::new(Method::DiagNewton, 0.4);
        let derivs = Derivatives {
            gradient: vec![-0.338],
            hessian: None,
            diag: Some(vec![0.794]),
            metric: None,
        };
        let out = step(&config, &[2.739], &derivs).unwrap();
        assert_abs_diff_eq!(out[0] - 2.739, 0.4 * 0.338 / 0.794, epsilon = 1e-12);
    }

    #[test]
    fn newton_solves_quadratic_in_one_step() {
        // classical oracle: for f(x) = x^T P x, gradient 2 P x, Hessian 2 P
        let p = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let x = vec![3.0, -1.5];
        let xv = DVector::from_column_slice(&x);
        let g: DVector<f64> = 2.0 * &p * &xv;
        let mut config = OptimizerConfig::new(Method::Newton, 1.0);
        config.regularizer = Regularizer::Clamp(1e-9);
        let hess = regularize(&(2.0 * &p), config.regularizer).unwrap();
        let derivs = Derivatives {
            gradient: g.iter().cloned().collect(),
            hessian: Some(hess),
            diag: None,
            metric: None,
        };
        let out = step(&config, &x, &derivs).unwrap();
        assert_abs_diff_eq!(out[0], 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(out[1], 0.0, epsilon = 1e-8);
    }

    #[test]
    fn eval_counts_4_5_9() {
        let (c, z) = two_param();
        let theta0 = [0.3, 0.8];
        for (method, expected) in [
            (Method::Gd, 4),
            (Method::DiagNewton, 5),
            (Method::Newton, 9),
        ] {
            let mut config = OptimizerConfig::new(method, 0.1);
            config.max_iterations = 3;
            let trace = optimize(&c, &z, &theta0, &config).unwrap();
            for rec in &trace.records {
                assert_eq!(rec.evals, expected, "{method:?}");
            }
        }
    }

    #[test]
    fn zero_learning_rate_freezes() {
        let (c, z) = two_param();
        let mut config = OptimizerConfig::new(Method::Gd, 0.0);
        config.max_iterations = 5;
        let trace = optimize(&c, &z, &[0.3, 0.8], &config).unwrap();
        let first = trace.records.first().unwrap().exact_cost;
        for rec in &trace.records {
            assert_eq!(rec.exact_cost, first);
            assert_eq!(rec.theta, vec![0.3, 0.8]);
        }
    }

    #[test]
    fn gd_descends_product_of_cosines() {
        let (c, z) = two_param();
        // f = cos(theta0) cos(theta1); minimum -1
        let mut config = OptimizerConfig::new(Method::Gd, 0.4);
        config.max_iterations = 100;
        let trace = optimize(&c, &z, &[0.4, 0.3], &config).unwrap();
        let last = trace.records.last().unwrap();
        assert!(last.exact_cost < -0.99, "cost {}", last.exact_cost);
    }

    #[test]
    fn observable_scale_invariance_of_newton_direction() {
        // scaling gradient and Hessian by c leaves the Newton step fixed
        let g = vec![0.3, -0.1];
        let h = DMatrix::from_row_slice(2, 2, &[1.2, 0.2, 0.2, 0.9]);
        let mut config = OptimizerConfig::new(Method::Newton, 0.7);
        config.regularizer = Regularizer::Clamp(1e-9);
        let c_scale = 3.7;
        let base = step(
            &config,
            &[0.0, 0.0],
            &Derivatives {
                gradient: g.clone(),
                hessian: Some(h.clone()),
                diag: None,
                metric: None,
            },
        )
        .unwrap();
        let scaled = step(
            &config,
            &[0.0, 0.0],
            &Derivatives {
                gradient: g.iter().map(|x| c_scale * x).collect(),
                hessian: Some(c_scale * h),
                diag: None,
                metric: None,
            },
        )
        .unwrap();
        for j in 0..2 {
            assert_abs_diff_eq!(base[j], scaled[j], epsilon = 1e-9);
        }
    }

    #[test]
    fn qng_matches_newton_on_matched_curvature() {
        // single RX measured in Z at theta = pi: Hessian = cos(pi) ... the
        // metric is constant 1/4 while the Hessian is -cos(theta); at
        // theta with cos(theta) = -1/4 both matrices coincide.
        let c = Circuit::new(
            1,
            vec![Gate::Rotation {
                generator: "X".parse().unwrap(),
                param_index: 0,
            }],
        )
        .unwrap();
        let z = Observable::SinglePauli(PauliString::single(PauliLetter::Z, 0, 1).unwrap());
        let theta0 = [(-0.25f64).acos()];
        let mut cfg_n = OptimizerConfig::new(Method::Newton, 0.2);
        cfg_n.max_iterations = 1;
        cfg_n.regularizer = Regularizer::Clamp(1e-9);
        let mut cfg_q = cfg_n.clone();
        cfg_q.method = Method::Qng;
        let tn = optimize(&c, &z, &theta0, &cfg_n).unwrap();
        let tq = optimize(&c, &z, &theta0, &cfg_q).unwrap();
        assert_abs_diff_eq!(tn.final_theta[0], tq.final_theta[0], epsilon = 1e-9);
    }

    #[test]
    fn sampled_run_is_deterministic() {
        let (c, z) = two_param();
        let mut config = OptimizerConfig::new(Method::Gd, 0.2);
        config.eval_mode = EvalMode::Sampled(200);
        config.max_iterations = 10;
        config.seed = 9;
        let a = optimize(&c, &z, &[0.3, 0.8], &config).unwrap();
        let b = optimize(&c, &z, &[0.3, 0.8], &config).unwrap();
        for (ra, rb) in a.records.iter().zip(&b.records) {
            assert_eq!(ra.est_cost.to_bits(), rb.est_cost.to_bits());
            assert_eq!(ra.theta, rb.theta);
        }
    }

    #[test]
    fn trainable_mask_freezes_parameters() {
        let (c, z) = two_param();
        let mut config = OptimizerConfig::new(Method::Gd, 0.4);
        config.trainable = Some(vec![true, false]);
        config.max_iterations = 20;
        let trace = optimize(&c, &z, &[0.4, 0.3], &config).unwrap();
        assert_abs_diff_eq!(trace.final_theta[1], 0.3, epsilon = 0.0);
        // per-step cost for one trainable parameter: 2 evaluations
        assert_eq!(trace.records[0].evals, 2);
    }
}
