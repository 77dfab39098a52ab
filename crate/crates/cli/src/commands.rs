//! Subcommand implementations. Every command reads one TOML config, runs
//! deterministically from (config, seed) and writes one CSV file.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qderiv::{
    estimate_gradient, estimate_hessian, lambda_star, metric_tensor_with, ps_gradient, ps_hessian,
    single_shot_variance, trig_reconstruct, Circuit, DerivativeTensor, DiagMetricForm,
    EstimatorKind, EstimatorSpec, EvalMode, Evaluator, Method, MetricMode, Observable,
    OptimizerConfig, PauliString, Regularizer, ShotModel,
};

use crate::config::{
    config_hash, default_shot_grid, default_step_grid, EstimatorConfig, ExperimentConfig,
};
use crate::csvio::{fmt_float, fmt_int, CsvWriter};
use crate::error::{CliError, Result};
use crate::fit::power_law_fit;
use crate::reference::{reference_circuit, reference_observable, REFERENCE_THETA};

pub struct RunContext {
    pub config: ExperimentConfig,
    pub seed: u64,
    pub out: PathBuf,
    pub hash: String,
}

impl RunContext {
    pub fn prepare(command: &str, config_path: &PathBuf, seed: Option<u64>, out: PathBuf) -> Result<Self> {
        let (config, bytes) = ExperimentConfig::load(config_path)?;
        config.check_experiment(command)?;
        let seed = seed
            .or(config.seed)
            .ok_or_else(|| CliError::Config("a seed is required (--seed or config)".into()))?;
        let hash = config_hash(&bytes, seed);
        Ok(Self {
            config,
            seed,
            out,
            hash,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Outcome {
    pub calibration_met: bool,
}

/// splitmix64-style mixing of the master seed with cell coordinates, used
/// to derive independent per-cell seeds.
fn mix(seed: u64, salts: &[u64]) -> u64 {
    let mut z = seed;
    for &s in salts {
        z = z.wrapping_add(0x9e3779b97f4a7c15).wrapping_add(s);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^= z >> 31;
    }
    z
}

struct Problem {
    circuit: Circuit,
    observable: Observable,
    theta: Vec<f64>,
    calibration_met: bool,
}

fn resolve_problem(config: &ExperimentConfig) -> Result<Problem> {
    let selector = config.circuit.as_deref().unwrap_or("reference");
    if selector == "reference" {
        let report = reference_circuit();
        let observable = match &config.observable {
            None => reference_observable(),
            Some(s) => parse_observable(s, 5)?,
        };
        return Ok(Problem {
            circuit: report.circuit,
            observable,
            theta: config
                .theta
                .clone()
                .unwrap_or_else(|| REFERENCE_THETA.to_vec()),
            calibration_met: report.met,
        });
    }
    let path = PathBuf::from(selector);
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let circuit = Circuit::from_text(&text)?;
    let observable = match &config.observable {
        Some(s) => parse_observable(s, circuit.n_wires())?,
        None => {
            return Err(CliError::Config(
                "custom circuits require an observable".into(),
            ))
        }
    };
    let theta = config
        .theta
        .clone()
        .ok_or_else(|| CliError::Config("custom circuits require theta".into()))?;
    Ok(Problem {
        circuit,
        observable,
        theta,
        calibration_met: true,
    })
}

fn parse_observable(s: &str, n_wires: usize) -> Result<Observable> {
    if s == "zero-projector" {
        return Ok(Observable::ZeroProjector);
    }
    let pauli: PauliString = s
        .parse()
        .map_err(|e: qderiv::Error| CliError::Config(e.to_string()))?;
    if pauli.n_wires() != n_wires {
        return Err(CliError::Config(format!(
            "observable acts on {} wires but the circuit has {n_wires}",
            pauli.n_wires()
        )));
    }
    Ok(Observable::SinglePauli(pauli))
}

fn parse_kind(kind: &str, step: f64, lambda: f64) -> Result<EstimatorKind> {
    Ok(match kind {
        "param-shift" => EstimatorKind::ParamShift { s: step },
        "scaled-param-shift" => EstimatorKind::ScaledParamShift { s: step, lambda },
        "central" => EstimatorKind::CentralDiff { h: step },
        "forward" => EstimatorKind::ForwardDiff { h: step },
        other => {
            return Err(CliError::Config(format!(
                "unknown estimator kind '{other}'"
            )))
        }
    })
}

/// Exact per-element variance of the shift-rule estimator at shift s,
/// used to compute optimal scaling weights.
fn exact_ps_variance(problem: &Problem, s: f64, shots: u64, j: usize) -> Result<f64> {
    let mut plus = problem.theta.clone();
    let mut minus = problem.theta.clone();
    plus[j] += s;
    minus[j] -= s;
    let v = single_shot_variance(&problem.circuit, &plus, &problem.observable)?
        + single_shot_variance(&problem.circuit, &minus, &problem.observable)?;
    Ok(v / (4.0 * shots as f64 * s.sin().powi(2)))
}

fn exact_gradient(problem: &Problem) -> Result<Vec<f64>> {
    let mut ev = Evaluator::exact(problem.circuit.clone(), problem.observable.clone());
    Ok(ps_gradient(&mut ev, &problem.theta, FRAC_PI_2)?)
}

// ---------------------------------------------------------------------------
// mse-sweep
// ---------------------------------------------------------------------------

pub fn cmd_mse_sweep(ctx: &RunContext) -> Result<Outcome> {
    let problem = resolve_problem(&ctx.config)?;
    let shots = ctx.config.shots.unwrap_or(1000);
    let reps = ctx.config.repetitions.unwrap_or(1000);
    let estimators = ctx.config.estimators.clone().unwrap_or_else(|| {
        vec![
            EstimatorConfig {
                kind: "central".into(),
                steps: None,
                lambda: None,
            },
            EstimatorConfig {
                kind: "param-shift".into(),
                steps: None,
                lambda: None,
            },
        ]
    });
    let m = problem.theta.len();
    let g_exact = exact_gradient(&problem)?;

    let mut w = CsvWriter::new(&[
        "estimator",
        "step",
        "lambda",
        "shots",
        "repetitions",
        "element",
        "bias",
        "variance",
        "mse",
        "std_err",
        "theory_mse",
        "seed",
        "stream_id",
        "config_hash",
    ]);

    for (ei, est) in estimators.iter().enumerate() {
        let steps = est
            .steps
            .clone()
            .unwrap_or_else(|| default_step_grid(&est.kind));
        for (si, &step) in steps.iter().enumerate() {
            let cell_seed = mix(ctx.seed, &[1, ei as u64, si as u64]);
            let star_mode = est.kind == "scaled-param-shift" && est.lambda.is_none();
            // per-element statistics; in star mode each element gets its
            // own optimal weight and therefore its own report
            let mut element_rows: Vec<(f64, f64, f64, f64, f64, f64)> = Vec::new();
            let mut totals = (0.0f64, 0.0f64, 0.0f64); // mse, se^2, theory
            if star_mode {
                for j in 0..m {
                    let var = exact_ps_variance(&problem, step, shots, j)?;
                    let lam = lambda_star(g_exact[j], var)?;
                    let spec = EstimatorSpec::gradient(parse_kind(&est.kind, step, lam)?);
                    let report = qderiv::empirical_report(
                        &spec,
                        &problem.circuit,
                        &problem.theta,
                        &problem.observable,
                        shots,
                        reps,
                        mix(cell_seed, &[j as u64]),
                    )?;
                    element_rows.push((
                        lam,
                        report.bias[j],
                        report.variance[j],
                        report.mse[j],
                        report.mse_std_err[j],
                        report.theory_mse[j],
                    ));
                    totals.0 += report.mse[j];
                    totals.1 += report.mse_std_err[j].powi(2);
                    totals.2 += report.theory_mse[j];
                }
            } else {
                let lam = est.lambda.unwrap_or(1.0);
                let spec = EstimatorSpec::gradient(parse_kind(&est.kind, step, lam)?);
                let report = qderiv::empirical_report(
                    &spec,
                    &problem.circuit,
                    &problem.theta,
                    &problem.observable,
                    shots,
                    reps,
                    cell_seed,
                )?;
                for j in 0..m {
                    element_rows.push((
                        lam,
                        report.bias[j],
                        report.variance[j],
                        report.mse[j],
                        report.mse_std_err[j],
                        report.theory_mse[j],
                    ));
                }
                totals = (
                    report.total_mse,
                    report.total_mse_std_err.powi(2),
                    report.theory_total_mse,
                );
            }
            for (j, (lam, bias, var, mse, se, theory)) in element_rows.iter().enumerate() {
                w.row(&[
                    est.kind.clone(),
                    fmt_float(step),
                    fmt_float(*lam),
                    fmt_int(shots),
                    fmt_int(reps),
                    j.to_string(),
                    fmt_float(*bias),
                    fmt_float(*var),
                    fmt_float(*mse),
                    fmt_float(*se),
                    fmt_float(*theory),
                    fmt_int(ctx.seed),
                    fmt_int(cell_seed),
                    ctx.hash.clone(),
                ]);
            }
            w.row(&[
                est.kind.clone(),
                fmt_float(step),
                String::new(),
                fmt_int(shots),
                fmt_int(reps),
                "total".into(),
                String::new(),
                String::new(),
                fmt_float(totals.0),
                fmt_float(totals.1.sqrt()),
                fmt_float(totals.2),
                fmt_int(ctx.seed),
                fmt_int(cell_seed),
                ctx.hash.clone(),
            ]);
        }
    }
    w.write(&ctx.out)?;
    Ok(Outcome {
        calibration_met: problem.calibration_met,
    })
}

// ---------------------------------------------------------------------------
// scaling-sweep
// ---------------------------------------------------------------------------

/// Total MSE of one sampled estimate: per-cell total squared error averaged
/// over repetitions, with a batched standard error.
fn mse_over_reps(errors: &[f64]) -> (f64, f64) {
    let r = errors.len();
    let mean = errors.iter().sum::<f64>() / r as f64;
    let n_batches = 10.min(r);
    let mut batch_means = Vec::with_capacity(n_batches);
    for b in 0..n_batches {
        let lo = b * r / n_batches;
        let hi = (b + 1) * r / n_batches;
        batch_means.push(errors[lo..hi].iter().sum::<f64>() / (hi - lo) as f64);
    }
    let bm = batch_means.iter().sum::<f64>() / n_batches as f64;
    let bv = batch_means.iter().map(|x| (x - bm).powi(2)).sum::<f64>()
        / (n_batches as f64 - 1.0).max(1.0);
    (mean, (bv / n_batches as f64).sqrt())
}

fn hessian_total_sq_error(est: &DerivativeTensor, exact: &DerivativeTensor, m: usize) -> f64 {
    let mut total = 0.0;
    for j1 in 0..m {
        for j2 in 0..m {
            let d = est.get(&[j1, j2]).unwrap() - exact.get(&[j1, j2]).unwrap();
            total += d * d;
        }
    }
    total
}

/// Median (in log space) of the steps whose MSE is within 20% of the
/// minimum; quantization-robust estimate of the optimal step.
fn optimal_step_from_grid(cells: &[(f64, f64)]) -> (f64, f64) {
    let min_mse = cells.iter().map(|&(_, v)| v).fold(f64::MAX, f64::min);
    let mut logs: Vec<f64> = cells
        .iter()
        .filter(|&&(_, v)| v <= 1.2 * min_mse)
        .map(|&(s, _)| s.ln())
        .collect();
    logs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = logs.len();
    let median = if k % 2 == 1 {
        logs[k / 2]
    } else {
        (logs[k / 2 - 1] + logs[k / 2]) / 2.0
    };
    (median.exp(), min_mse)
}

pub fn cmd_scaling_sweep(ctx: &RunContext) -> Result<Outcome> {
    let problem = resolve_problem(&ctx.config)?;
    let order = ctx.config.order.unwrap_or(1);
    let shot_grid = ctx
        .config
        .shot_grid
        .clone()
        .unwrap_or_else(default_shot_grid);
    if shot_grid.len() < 3 {
        return Err(CliError::Config(
            "shot grid must contain at least 3 values".into(),
        ));
    }
    let reps = ctx
        .config
        .repetitions
        .unwrap_or(if order == 1 { 1000 } else { 100 });
    let estimators = ctx.config.estimators.clone().unwrap_or_else(|| {
        let kinds: &[&str] = if order == 1 {
            &["central", "forward", "param-shift"]
        } else {
            &["central", "param-shift"]
        };
        kinds
            .iter()
            .map(|k| EstimatorConfig {
                kind: (*k).into(),
                steps: None,
                lambda: None,
            })
            .collect()
    });
    let m = problem.theta.len();

    let mut w = CsvWriter::new(&[
        "row_type",
        "estimator",
        "order",
        "shots",
        "step",
        "mse",
        "std_err",
        "exponent",
        "prefactor",
        "r_squared",
        "seed",
        "stream_id",
        "config_hash",
    ]);
    let blank = String::new;

    let mut exact_hessian = None;
    if order == 2 {
        let mut ev = Evaluator::exact(problem.circuit.clone(), problem.observable.clone());
        exact_hessian = Some(ps_hessian(&mut ev, &problem.theta, FRAC_PI_2)?);
    }

    // per-estimator curves over N: (N, optimal step, mse at optimum)
    let mut optima: Vec<(String, Vec<(f64, f64, f64)>)> = Vec::new();

    for (ei, est) in estimators.iter().enumerate() {
        let steps = est
            .steps
            .clone()
            .unwrap_or_else(|| default_step_grid(&est.kind));
        let mut curve = Vec::new();
        for (ni, &n) in shot_grid.iter().enumerate() {
            let mut cells = Vec::new();
            for (si, &step) in steps.iter().enumerate() {
                let cell_seed = mix(ctx.seed, &[2, ei as u64, ni as u64, si as u64]);
                let lam = est.lambda.unwrap_or(1.0);
                let kind = parse_kind(&est.kind, step, lam)?;
                let (mse, se) = if order == 1 {
                    let spec = EstimatorSpec::gradient(kind);
                    let report = qderiv::empirical_report(
                        &spec,
                        &problem.circuit,
                        &problem.theta,
                        &problem.observable,
                        n,
                        reps,
                        cell_seed,
                    )?;
                    (report.total_mse, report.total_mse_std_err)
                } else {
                    let spec = EstimatorSpec::hessian(kind);
                    spec.validate().map_err(CliError::Core)?;
                    let exact = exact_hessian.as_ref().unwrap();
                    let stride = 4 * (m * m) as u64;
                    let errors: Vec<f64> = (0..reps)
                        .map(|rep| {
                            let model = ShotModel::new(n, cell_seed, rep * stride);
                            let est_tensor = estimate_hessian(
                                &spec,
                                &problem.circuit,
                                &problem.theta,
                                &problem.observable,
                                &model,
                            )?;
                            Ok(hessian_total_sq_error(&est_tensor, exact, m))
                        })
                        .collect::<Result<_>>()?;
                    mse_over_reps(&errors)
                };
                cells.push((step, mse));
                w.row(&[
                    "cell".into(),
                    est.kind.clone(),
                    order.to_string(),
                    fmt_int(n),
                    fmt_float(step),
                    fmt_float(mse),
                    fmt_float(se),
                    blank(),
                    blank(),
                    blank(),
                    fmt_int(ctx.seed),
                    fmt_int(cell_seed),
                    ctx.hash.clone(),
                ]);
            }
            let (opt_step, min_mse) = optimal_step_from_grid(&cells);
            curve.push((n as f64, opt_step, min_mse));
            w.row(&[
                "optimal".into(),
                est.kind.clone(),
                order.to_string(),
                fmt_int(n),
                fmt_float(opt_step),
                fmt_float(min_mse),
                blank(),
                blank(),
                blank(),
                blank(),
                fmt_int(ctx.seed),
                fmt_int(mix(ctx.seed, &[2, ei as u64, ni as u64])),
                ctx.hash.clone(),
            ]);
        }
        optima.push((est.kind.clone(), curve));
    }

    // power-law fits of the MSE-at-optimum and of the optimal step
    let mut fitted: Vec<(String, crate::fit::PowerLawFit)> = Vec::new();
    for (kind, curve) in &optima {
        let mse_points: Vec<(f64, f64)> = curve.iter().map(|&(n, _, v)| (n, v)).collect();
        let step_points: Vec<(f64, f64)> = curve.iter().map(|&(n, s, _)| (n, s)).collect();
        for (row_type, points) in [("fit-mse", mse_points), ("fit-step", step_points)] {
            let fit = power_law_fit(&points)?;
            if row_type == "fit-mse" {
                fitted.push((kind.clone(), fit));
            }
            w.row(&[
                row_type.into(),
                kind.clone(),
                order.to_string(),
                blank(),
                blank(),
                blank(),
                blank(),
                fmt_float(fit.exponent),
                fmt_float(fit.prefactor),
                fmt_float(fit.r_squared),
                fmt_int(ctx.seed),
                blank(),
                ctx.hash.clone(),
            ]);
        }
    }

    // crossover shot count between the central-difference and shift-rule
    // MSE power laws (the grids need not bracket it)
    let central = fitted.iter().find(|(k, _)| k == "central");
    let ps = fitted.iter().find(|(k, _)| k == "param-shift");
    if let (Some((_, fc)), Some((_, fp))) = (central, ps) {
        if (fc.exponent - fp.exponent).abs() > 1e-12 {
            let n_star =
                (fp.prefactor / fc.prefactor).powf(1.0 / (fc.exponent - fp.exponent));
            w.row(&[
                "crossover".into(),
                "central/param-shift".into(),
                order.to_string(),
                blank(),
                fmt_float(n_star),
                blank(),
                blank(),
                blank(),
                blank(),
                blank(),
                fmt_int(ctx.seed),
                blank(),
                ctx.hash.clone(),
            ]);
        }
    }

    w.write(&ctx.out)?;
    Ok(Outcome {
        calibration_met: problem.calibration_met,
    })
}

// ---------------------------------------------------------------------------
// hessian / metric
// ---------------------------------------------------------------------------

pub fn cmd_hessian(ctx: &RunContext) -> Result<Outcome> {
    let problem = resolve_problem(&ctx.config)?;
    let m = problem.theta.len();
    let mut w = CsvWriter::new(&[
        "quantity", "j1", "j2", "value", "seed", "stream_id", "config_hash",
    ]);
    let sampled = matches!(ctx.config.eval.as_deref(), Some("sampled"));
    let (value, gradient, hessian) = if sampled {
        let shots = ctx
            .config
            .shots
            .ok_or_else(|| CliError::Config("sampled evaluation requires shots".into()))?;
        let value = ShotModel::new(shots, mix(ctx.seed, &[3, 0]), 0).sample_mean(
            qderiv::expectation(&problem.circuit, &problem.theta, &problem.observable)?,
            &problem.observable,
        )?;
        let spec = EstimatorSpec::gradient(EstimatorKind::ParamShift { s: FRAC_PI_2 });
        let gradient = estimate_gradient(
            &spec,
            &problem.circuit,
            &problem.theta,
            &problem.observable,
            &ShotModel::new(shots, mix(ctx.seed, &[3, 1]), 0),
        )?;
        let hspec = EstimatorSpec::hessian(EstimatorKind::ParamShift { s: FRAC_PI_2 });
        let hessian = estimate_hessian(
            &hspec,
            &problem.circuit,
            &problem.theta,
            &problem.observable,
            &ShotModel::new(shots, mix(ctx.seed, &[3, 2]), 0),
        )?;
        (value, gradient, hessian)
    } else {
        let mut ev = Evaluator::exact(problem.circuit.clone(), problem.observable.clone());
        let value = ev.eval(&problem.theta)?;
        let gradient = ps_gradient(&mut ev, &problem.theta, FRAC_PI_2)?;
        let hessian = ps_hessian(&mut ev, &problem.theta, FRAC_PI_2)?;
        (value, gradient, hessian)
    };
    w.row(&[
        "value".into(),
        String::new(),
        String::new(),
        fmt_float(value),
        fmt_int(ctx.seed),
        "0".into(),
        ctx.hash.clone(),
    ]);
    for (j, g) in gradient.iter().enumerate() {
        w.row(&[
            "gradient".into(),
            j.to_string(),
            String::new(),
            fmt_float(*g),
            fmt_int(ctx.seed),
            "0".into(),
            ctx.hash.clone(),
        ]);
    }
    for j1 in 0..m {
        for j2 in 0..m {
            w.row(&[
                "hessian".into(),
                j1.to_string(),
                j2.to_string(),
                fmt_float(hessian.get(&[j1, j2]).unwrap()),
                fmt_int(ctx.seed),
                "0".into(),
                ctx.hash.clone(),
            ]);
        }
    }
    w.write(&ctx.out)?;
    Ok(Outcome {
        calibration_met: problem.calibration_met,
    })
}

pub fn cmd_metric(ctx: &RunContext) -> Result<Outcome> {
    let problem = resolve_problem(&ctx.config)?;
    let m = problem.theta.len();
    let mode = if matches!(ctx.config.eval.as_deref(), Some("sampled")) {
        let shots = ctx
            .config
            .shots
            .ok_or_else(|| CliError::Config("sampled evaluation requires shots".into()))?;
        MetricMode::Sampled(ShotModel::new(shots, mix(ctx.seed, &[4]), 0))
    } else {
        MetricMode::Exact
    };
    let diag = match ctx.config.diag_form.as_deref() {
        None | Some("pi") => DiagMetricForm::PiShift,
        Some("half") => DiagMetricForm::HalfShift,
        Some(other) => {
            return Err(CliError::Config(format!("unknown diag_form '{other}'")))
        }
    };
    let f = metric_tensor_with(&problem.circuit, &problem.theta, mode, diag)?;
    let mut w = CsvWriter::new(&["j1", "j2", "value", "seed", "stream_id", "config_hash"]);
    for j1 in 0..m {
        for j2 in 0..m {
            w.row(&[
                j1.to_string(),
                j2.to_string(),
                fmt_float(f.get(&[j1, j2]).unwrap()),
                fmt_int(ctx.seed),
                "0".into(),
                ctx.hash.clone(),
            ]);
        }
    }
    w.write(&ctx.out)?;
    Ok(Outcome {
        calibration_met: problem.calibration_met,
    })
}

// ---------------------------------------------------------------------------
// optimize
// ---------------------------------------------------------------------------

fn parse_method(name: &str) -> Result<Method> {
    Ok(match name {
        "gd" => Method::Gd,
        "newton" => Method::Newton,
        "diag-newton" => Method::DiagNewton,
        "qng" => Method::Qng,
        other => return Err(CliError::Config(format!("unknown method '{other}'"))),
    })
}

pub fn cmd_optimize(ctx: &RunContext) -> Result<Outcome> {
    let problem = resolve_problem(&ctx.config)?;
    let section = ctx
        .config
        .optimizer
        .as_ref()
        .ok_or_else(|| CliError::Config("optimize requires an [optimizer] section".into()))?;
    let regularizer = match section.regularizer.as_deref() {
        None | Some("clamp") => Regularizer::Clamp(section.epsilon.unwrap_or(1e-3)),
        Some("shift") => Regularizer::Shift(section.epsilon.unwrap_or(1.0)),
        Some("max-eig") => Regularizer::MaxEig,
        Some(other) => {
            return Err(CliError::Config(format!("unknown regularizer '{other}'")))
        }
    };
    let mut w = CsvWriter::new(&[
        "method",
        "iteration",
        "theta",
        "exact_cost",
        "est_cost",
        "grad_norm",
        "evals",
        "cumulative_evals",
        "seed",
        "stream_id",
        "config_hash",
    ]);
    for (mi, name) in section.methods.iter().enumerate() {
        let method_seed = mix(ctx.seed, &[5, mi as u64]);
        let mut config = OptimizerConfig::new(parse_method(name)?, section.learning_rate);
        config.regularizer = regularizer;
        config.max_iterations = section.max_iterations;
        config.trainable = section.trainable.clone();
        config.seed = method_seed;
        config.eval_mode = match section.shots {
            None => EvalMode::Exact,
            Some(n) => EvalMode::Sampled(n),
        };
        let trace = qderiv::optimize(&problem.circuit, &problem.observable, &section.theta0, &config)?;
        for rec in &trace.records {
            let theta = rec
                .theta
                .iter()
                .map(|&t| fmt_float(t))
                .collect::<Vec<_>>()
                .join(";");
            let grad_norm = rec.gradient.iter().map(|g| g * g).sum::<f64>().sqrt();
            w.row(&[
                name.clone(),
                rec.iteration.to_string(),
                theta,
                fmt_float(rec.exact_cost),
                fmt_float(rec.est_cost),
                fmt_float(grad_norm),
                fmt_int(rec.evals),
                fmt_int(rec.cumulative_evals),
                fmt_int(ctx.seed),
                fmt_int(method_seed),
                ctx.hash.clone(),
            ]);
        }
    }
    w.write(&ctx.out)?;
    Ok(Outcome {
        calibration_met: problem.calibration_met,
    })
}

// ---------------------------------------------------------------------------
// reconstruct
// ---------------------------------------------------------------------------

pub fn cmd_reconstruct(ctx: &RunContext) -> Result<Outcome> {
    let problem = resolve_problem(&ctx.config)?;
    let mut ev = Evaluator::exact(problem.circuit.clone(), problem.observable.clone());
    let surrogate = trig_reconstruct(&mut ev)?;
    let m = surrogate.n_params();
    let mut w = CsvWriter::new(&[
        "row_type",
        "index",
        "basis",
        "coefficient",
        "max_error",
        "seed",
        "stream_id",
        "config_hash",
    ]);
    for (k, &c) in surrogate.coefficients().iter().enumerate() {
        let mut digits = String::with_capacity(m);
        let mut rem = k;
        for _ in 0..m {
            digits.push(char::from(b'0' + (rem % 3) as u8));
            rem /= 3;
        }
        w.row(&[
            "coeff".into(),
            k.to_string(),
            digits,
            fmt_float(c),
            String::new(),
            fmt_int(ctx.seed),
            "0".into(),
            ctx.hash.clone(),
        ]);
    }
    // verification at random points
    let checks = ctx.config.checks.unwrap_or(100);
    let mut rng = ChaCha8Rng::seed_from_u64(mix(ctx.seed, &[6]));
    let mut max_error: f64 = 0.0;
    for _ in 0..checks {
        let theta: Vec<f64> = (0..m).map(|_| rng.gen_range(-PI..PI)).collect();
        let err = (surrogate.eval(&theta)? - ev.eval(&theta)?).abs();
        max_error = max_error.max(err);
    }
    w.row(&[
        "check".into(),
        checks.to_string(),
        String::new(),
        String::new(),
        fmt_float(max_error),
        fmt_int(ctx.seed),
        "0".into(),
        ctx.hash.clone(),
    ]);
    w.write(&ctx.out)?;
    Ok(Outcome {
        calibration_met: problem.calibration_met,
    })
}

pub fn run(command: &str, ctx: &RunContext) -> Result<Outcome> {
    match command {
        "mse-sweep" => cmd_mse_sweep(ctx),
        "scaling-sweep" => cmd_scaling_sweep(ctx),
        "hessian" => cmd_hessian(ctx),
        "metric" => cmd_metric(ctx),
        "optimize" => cmd_optimize(ctx),
        "reconstruct" => cmd_reconstruct(ctx),
        other => Err(CliError::Config(format!("unknown command '{other}'"))),
    }
}
