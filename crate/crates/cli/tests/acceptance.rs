//! End-to-end acceptance gate. Each numbered check prints one PASS/FAIL
//! line; the single test fails if any check fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::PathBuf;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qderiv::{
    empirical_report, fd_tensor, optimize, pi_shift_identity_check, ps_gradient, ps_hessian,
    ps_tensor, trig_reconstruct, Circuit, EstimatorKind, EstimatorSpec, EvalMode, Evaluator,
    FdScheme, Gate, Method, Observable, OptimizerConfig, OptimizerTrace, PauliLetter, PauliString,
    Regularizer,
};
use qderiv_cli::commands::{run, RunContext};
use qderiv_cli::csvio::read_csv;
use qderiv_cli::reference::{
    reference_circuit, reference_observable, CALIBRATION_TOL, GOLDEN_F, GOLDEN_GRADIENT,
    GOLDEN_HESSIAN, REFERENCE_THETA,
};

type CheckResult = Result<(), String>;

fn fail(msg: String) -> CheckResult {
    Err(msg)
}

// ---------------------------------------------------------------------------
// random circuit corpus shared by checks 1 and 2
// ---------------------------------------------------------------------------

struct RandomCase {
    circuit: Circuit,
    observable: Observable,
    theta: Vec<f64>,
}

fn random_case(rng: &mut ChaCha8Rng) -> RandomCase {
    let n = rng.gen_range(2..=5usize);
    let m = rng.gen_range(1..=6usize);
    let letters = [PauliLetter::X, PauliLetter::Y, PauliLetter::Z];
    let mut gates = Vec::new();
    for j in 0..m {
        let wire = rng.gen_range(0..n);
        let letter = letters[rng.gen_range(0..3)];
        gates.push(Gate::Rotation {
            generator: PauliString::single(letter, wire, n).unwrap(),
            param_index: j,
        });
        // interleave some fixed entangling/mixing gates
        match rng.gen_range(0..3) {
            0 => {
                let a = rng.gen_range(0..n);
                let mut b = rng.gen_range(0..n);
                while b == a {
                    b = rng.gen_range(0..n);
                }
                gates.push(Gate::Cnot {
                    control: a,
                    target: b,
                });
            }
            1 => gates.push(Gate::Hadamard {
                wire: rng.gen_range(0..n),
            }),
            _ => {}
        }
    }
    let circuit = Circuit::new(n, gates).unwrap();
    let wire = rng.gen_range(0..n);
    let letter = letters[rng.gen_range(0..3)];
    let observable = Observable::SinglePauli(PauliString::single(letter, wire, n).unwrap());
    let theta: Vec<f64> = (0..m).map(|_| rng.gen_range(-PI..PI)).collect();
    RandomCase {
        circuit,
        observable,
        theta,
    }
}

fn check_01_shift_rule_exactness() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let shifts = [0.3, 1.0, FRAC_PI_2];
    for case in 0..50 {
        let rc = random_case(&mut rng);
        let m = rc.theta.len();
        let mut ev = Evaluator::exact(rc.circuit.clone(), rc.observable.clone());
        let mut index_sets: Vec<Vec<usize>> = (0..m).map(|j| vec![j]).collect();
        let j1 = rng.gen_range(0..m);
        let j2 = rng.gen_range(0..m);
        index_sets.push(vec![j1, j1]);
        index_sets.push(vec![j1, j2]);
        for idx in &index_sets {
            let values: Vec<f64> = shifts
                .iter()
                .map(|&s| ps_tensor(&mut ev, &rc.theta, idx, s))
                .collect::<qderiv::Result<_>>()
                .map_err(|e| format!("case {case}: {e}"))?;
            for v in &values[1..] {
                if (v - values[0]).abs() > 1e-9 {
                    return fail(format!(
                        "case {case} {idx:?}: shift-rule values differ across s: {values:?}"
                    ));
                }
            }
            let oracle = fd_tensor(&mut ev, &rc.theta, idx, 1e-5, FdScheme::Central)
                .map_err(|e| format!("case {case}: {e}"))?;
            if (values[0] - oracle).abs() > 1e-5 {
                return fail(format!(
                    "case {case} {idx:?}: shift rule {} vs finite-difference oracle {}",
                    values[0], oracle
                ));
            }
        }
    }
    Ok(())
}

fn check_02_pi_shift_identity() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for case in 0..50 {
        let rc = random_case(&mut rng);
        let mut ev = Evaluator::exact(rc.circuit.clone(), rc.observable.clone());
        for j in 0..rc.theta.len() {
            let (lhs, rhs) = pi_shift_identity_check(&mut ev, &rc.theta, j)
                .map_err(|e| format!("case {case}: {e}"))?;
            if (lhs - rhs).abs() > 1e-10 {
                return fail(format!(
                    "case {case} parameter {j}: pi-shift identity violated by {}",
                    (lhs - rhs).abs()
                ));
            }
        }
    }
    Ok(())
}

fn check_03_trig_reconstruction() -> CheckResult {
    let report = reference_circuit();
    let mut ev = Evaluator::exact(report.circuit.clone(), reference_observable());
    let surrogate = trig_reconstruct(&mut ev).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let theta: Vec<f64> = (0..5).map(|_| rng.gen_range(-PI..PI)).collect();
        let exact = ev.eval(&theta).map_err(|e| e.to_string())?;
        let approx = surrogate.eval(&theta).map_err(|e| e.to_string())?;
        if (exact - approx).abs() > 1e-9 {
            return fail(format!(
                "surrogate error {} at {theta:?}",
                (exact - approx).abs()
            ));
        }
    }
    Ok(())
}

fn check_04_reference_goldens() -> CheckResult {
    let report = reference_circuit();
    let mut ev = Evaluator::exact(report.circuit.clone(), reference_observable());
    let f = ev.eval(&REFERENCE_THETA).map_err(|e| e.to_string())?;
    let g = ps_gradient(&mut ev, &REFERENCE_THETA, FRAC_PI_2).map_err(|e| e.to_string())?;
    let h = ps_hessian(&mut ev, &REFERENCE_THETA, FRAC_PI_2).map_err(|e| e.to_string())?;
    if report.met {
        if (f - GOLDEN_F).abs() > CALIBRATION_TOL {
            return fail(format!("value {f} vs pinned {GOLDEN_F}"));
        }
        for j in 0..5 {
            if (g[j] - GOLDEN_GRADIENT[j]).abs() > CALIBRATION_TOL {
                return fail(format!("gradient[{j}] = {} vs pinned", g[j]));
            }
        }
        for j1 in 0..5 {
            for j2 in 0..5 {
                if (h.get(&[j1, j2]).unwrap() - GOLDEN_HESSIAN[j1][j2]).abs() > CALIBRATION_TOL {
                    return fail(format!("hessian[{j1},{j2}] vs pinned"));
                }
            }
        }
        Ok(())
    } else {
        // calibration unmet: fall back to internally derived values on the
        // pinned circuit, cross-checked against an independent oracle
        for j in 0..5 {
            let oracle = fd_tensor(&mut ev, &REFERENCE_THETA, &[j], 1e-6, FdScheme::Central)
                .map_err(|e| e.to_string())?;
            if (g[j] - oracle).abs() > 1e-5 {
                return fail(format!("derived gradient[{j}] fails cross-check"));
            }
        }
        fail("calibration flag unmet (surfaced); derived values verified".into())
    }
}

// ---------------------------------------------------------------------------
// CLI-driven checks
// ---------------------------------------------------------------------------

fn run_command(command: &str, config_text: &str, seed: u64) -> Result<PathBuf, String> {
    let dir = std::env::temp_dir().join(format!("qderiv-acc-{command}-{seed}"));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let config_path = dir.join("config.toml");
    let out_path = dir.join("out.csv");
    std::fs::write(&config_path, config_text).map_err(|e| e.to_string())?;
    let ctx = RunContext::prepare(command, &config_path, Some(seed), out_path.clone())
        .map_err(|e| e.to_string())?;
    let outcome = run(command, &ctx).map_err(|e| e.to_string())?;
    if !outcome.calibration_met {
        return Err("reference calibration unmet".into());
    }
    Ok(out_path)
}

fn load_csv(path: &PathBuf) -> Result<(Vec<String>, Vec<Vec<String>>), String> {
    read_csv(path).map_err(|e| e.to_string())
}

fn fit_exponent(rows: &[Vec<String>], header: &[String], kind: &str, row_type: &str) -> Result<f64, String> {
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    rows.iter()
        .find(|r| r[col("row_type")] == row_type && r[col("estimator")] == kind)
        .map(|r| r[col("exponent")].parse::<f64>().unwrap())
        .ok_or_else(|| format!("missing {row_type} row for {kind}"))
}

fn check_05_gradient_scaling() -> CheckResult {
    let out = run_command("scaling-sweep", "order = 1\n", 42)?;
    let (header, rows) = load_csv(&out)?;
    let checks = [
        ("central", "fit-mse", -2.0 / 3.0, 0.07),
        ("forward", "fit-mse", -0.5, 0.07),
        ("param-shift", "fit-mse", -1.0, 0.05),
        ("central", "fit-step", -1.0 / 6.0, 0.05),
    ];
    for (kind, row_type, expected, tol) in checks {
        let got = fit_exponent(&rows, &header, kind, row_type)?;
        if (got - expected).abs() > tol {
            return fail(format!(
                "{kind} {row_type} exponent {got:.4} not within {expected:.4} +- {tol}"
            ));
        }
    }
    Ok(())
}

fn check_06_hessian_scaling() -> CheckResult {
    let out = run_command(
        "scaling-sweep",
        "order = 2\nshot_grid = [100, 1000, 10000, 100000]\nrepetitions = 100\n",
        42,
    )?;
    let (header, rows) = load_csv(&out)?;
    for (kind, expected, tol) in [("central", -0.5, 0.05), ("param-shift", -1.0, 0.05)] {
        let got = fit_exponent(&rows, &header, kind, "fit-mse")?;
        if (got - expected).abs() > tol {
            return fail(format!(
                "{kind} order-2 exponent {got:.4} not within {expected} +- {tol}"
            ));
        }
    }
    Ok(())
}

/// Total-MSE rows (step, mse, std_err) for one estimator, in step order.
fn total_curve(
    header: &[String],
    rows: &[Vec<String>],
    kind: &str,
) -> Vec<(f64, f64, f64)> {
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let mut curve: Vec<(f64, f64, f64)> = rows
        .iter()
        .filter(|r| r[col("estimator")] == kind && r[col("element")] == "total")
        .map(|r| {
            (
                r[col("step")].parse().unwrap(),
                r[col("mse")].parse().unwrap(),
                r[col("std_err")].parse().unwrap(),
            )
        })
        .collect();
    curve.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    curve
}

fn check_07_mse_curve_shape() -> CheckResult {
    let config = r#"
shots = 1000
repetitions = 1000
[[estimators]]
kind = "central"
[[estimators]]
kind = "param-shift"
"#;
    let out = run_command("mse-sweep", config, 42)?;
    let (header, rows) = load_csv(&out)?;

    let central = total_curve(&header, &rows, "central");
    let (argmin, _) = central
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).unwrap())
        .unwrap();
    if argmin == 0 || argmin == central.len() - 1 {
        return fail("central-difference minimum sits on the grid boundary".into());
    }
    let h_opt = central[argmin].0;
    if !(0.4..=0.9).contains(&h_opt) {
        return fail(format!(
            "central-difference optimal step {h_opt:.4} outside [0.4, 0.9]"
        ));
    }

    let ps = total_curve(&header, &rows, "param-shift");
    for w in ps.windows(2) {
        let (_, m0, e0) = w[0];
        let (s1, m1, e1) = w[1];
        if m1 > m0 + 2.0 * (e0 * e0 + e1 * e1).sqrt() {
            return fail(format!(
                "shift-rule MSE increases at s = {s1:.4} beyond error bars"
            ));
        }
    }
    Ok(())
}

fn check_08_scaled_dominance() -> CheckResult {
    for n in [100u64, 1000, 10000] {
        let config = format!(
            r#"
shots = {n}
repetitions = 1000
[[estimators]]
kind = "central"
[[estimators]]
kind = "param-shift"
[[estimators]]
kind = "scaled-param-shift"
steps = [1.5707963267948966]
"#
        );
        let out = run_command("mse-sweep", &config, 42 + n)?;
        let (header, rows) = load_csv(&out)?;
        let scaled = total_curve(&header, &rows, "scaled-param-shift");
        let (_, scaled_mse, scaled_se) = scaled[0];
        for kind in ["central", "param-shift"] {
            for (step, mse, se) in total_curve(&header, &rows, kind) {
                let slack = 2.0 * (scaled_se * scaled_se + se * se).sqrt();
                if scaled_mse > mse + slack {
                    return fail(format!(
                        "N = {n}: scaled estimator MSE {scaled_mse:.3e} exceeds {kind} \
                         at step {step:.4} ({mse:.3e}) beyond 2 standard errors"
                    ));
                }
            }
        }
    }
    Ok(())
}

fn check_09_bias_variance_decomposition() -> CheckResult {
    let report = reference_circuit();
    let problem_theta = REFERENCE_THETA.to_vec();
    let kinds = [
        EstimatorKind::ParamShift { s: FRAC_PI_2 },
        EstimatorKind::ScaledParamShift {
            s: FRAC_PI_2,
            lambda: 0.7,
        },
        EstimatorKind::CentralDiff { h: 0.6 },
        EstimatorKind::ForwardDiff { h: 0.3 },
    ];
    for kind in kinds {
        let spec = EstimatorSpec::gradient(kind);
        let rep = empirical_report(
            &spec,
            &report.circuit,
            &problem_theta,
            &reference_observable(),
            1000,
            500,
            99,
        )
        .map_err(|e| e.to_string())?;
        for j in 0..5 {
            let slack = (rep.mse[j] - rep.variance[j] - rep.bias[j].powi(2)).abs();
            if slack > rep.decomposition_tolerance {
                return fail(format!(
                    "{kind:?} element {j}: decomposition residual {slack:.3e} above \
                     tolerance {:.3e}",
                    rep.decomposition_tolerance
                ));
            }
        }
    }
    Ok(())
}

fn mod_2pi_distance(a: f64, b: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let d = (a - b).rem_euclid(two_pi);
    d.min(two_pi - d)
}

fn race_trace(method: Method) -> Result<OptimizerTrace, String> {
    let report = reference_circuit();
    let mut config = OptimizerConfig::new(method, 0.4);
    config.regularizer = Regularizer::Clamp(1e-3);
    config.eval_mode = EvalMode::Exact;
    config.max_iterations = 100;
    config.trainable = Some(vec![true, true, false, false, false]);
    let theta0 = [0.1, 0.15, 3.454, 2.735, 2.641];
    optimize(&report.circuit, &reference_observable(), &theta0, &config)
        .map_err(|e| e.to_string())
}

fn check_10_optimizer_race() -> CheckResult {
    let target = -0.874;
    let mut evals_to_target = Vec::new();
    for (method, per_step) in [
        (Method::Gd, 4u64),
        (Method::DiagNewton, 5),
        (Method::Newton, 9),
    ] {
        let trace = race_trace(method)?;
        for rec in &trace.records {
            if rec.evals != per_step {
                return fail(format!(
                    "{method:?} iteration {} used {} evaluations, expected {per_step}",
                    rec.iteration, rec.evals
                ));
            }
        }
        let final_cost = trace.records.last().unwrap().exact_cost;
        if (final_cost - target).abs() > 1e-2 {
            return fail(format!(
                "{method:?} final cost {final_cost:.4} not within 1e-2 of {target}"
            ));
        }
        let limit = &trace.final_theta;
        let d_limit = match method {
            Method::Gd => {
                mod_2pi_distance(limit[0], 0.0).max(mod_2pi_distance(limit[1], PI))
            }
            _ => {
                let a = mod_2pi_distance(limit[0], 0.0).max(mod_2pi_distance(limit[1], PI));
                let b = mod_2pi_distance(limit[0], PI).max(mod_2pi_distance(limit[1], 0.0));
                a.min(b)
            }
        };
        if d_limit > 1e-2 {
            return fail(format!(
                "{method:?} limit point {:?} not at the expected minimizer",
                &limit[..2]
            ));
        }
        let reached = trace
            .records
            .iter()
            .find(|r| (r.exact_cost - target).abs() <= 1e-2 || r.exact_cost < target)
            .map(|r| r.cumulative_evals)
            .ok_or_else(|| format!("{method:?} never reached the target cost"))?;
        evals_to_target.push((method, reached));
    }
    let gd = evals_to_target[0].1;
    for &(method, e) in &evals_to_target[1..] {
        if e >= gd {
            return fail(format!(
                "{method:?} used {e} cumulative evaluations, not fewer than GD's {gd}"
            ));
        }
    }
    Ok(())
}

fn check_11_determinism() -> CheckResult {
    let bin = env!("CARGO_BIN_EXE_qderiv-cli");
    let dir = std::env::temp_dir().join("qderiv-acc-determinism");
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let cases: [(&str, &str); 3] = [
        ("hessian", "eval = \"sampled\"\nshots = 1000\n"),
        (
            "mse-sweep",
            "shots = 200\nrepetitions = 50\n[[estimators]]\nkind = \"param-shift\"\nsteps = [0.8, 1.2]\n",
        ),
        (
            "optimize",
            "[optimizer]\nmethods = [\"gd\", \"qng\"]\nlearning_rate = 0.4\nmax_iterations = 5\nshots = 500\ntheta0 = [0.1, 0.15, 3.454, 2.735, 2.641]\ntrainable = [true, true, false, false, false]\n",
        ),
    ];
    for (command, config_text) in cases {
        let config_path = dir.join(format!("{command}.toml"));
        std::fs::write(&config_path, config_text).map_err(|e| e.to_string())?;
        let mut outputs = Vec::new();
        for run_idx in 0..2 {
            let out_path = dir.join(format!("{command}-{run_idx}.csv"));
            let status = Command::new(bin)
                .args([
                    command,
                    "--config",
                    config_path.to_str().unwrap(),
                    "--seed",
                    "7",
                    "--out",
                    out_path.to_str().unwrap(),
                ])
                .status()
                .map_err(|e| e.to_string())?;
            if !status.success() {
                return fail(format!("{command} run {run_idx} exited with {status}"));
            }
            outputs.push(std::fs::read(&out_path).map_err(|e| e.to_string())?);
        }
        if outputs[0] != outputs[1] {
            return fail(format!("{command}: repeated runs differ"));
        }
    }
    Ok(())
}

#[test]
fn acceptance() {
    let checks: Vec<(&str, fn() -> CheckResult)> = vec![
        ("01 shift-rule exactness and s-independence", check_01_shift_rule_exactness),
        ("02 pi-shift identity", check_02_pi_shift_identity),
        ("03 trigonometric reconstruction", check_03_trig_reconstruction),
        ("04 reference-point pinned values", check_04_reference_goldens),
        ("05 gradient MSE scaling exponents", check_05_gradient_scaling),
        ("06 Hessian MSE scaling exponents", check_06_hessian_scaling),
        ("07 MSE-vs-step curve shape", check_07_mse_curve_shape),
        ("08 scaled-estimator dominance", check_08_scaled_dominance),
        ("09 bias-variance decomposition", check_09_bias_variance_decomposition),
        ("10 optimizer race", check_10_optimizer_race),
        ("11 CLI determinism", check_11_determinism),
    ];
    let mut failures = Vec::new();
    for (name, check) in checks {
        match check() {
            Ok(()) => println!("ACCEPTANCE {name}: PASS"),
            Err(msg) => {
                println!("ACCEPTANCE {name}: FAIL ({msg})");
                failures.push(format!("{name}: {msg}"));
            }
        }
    }
    assert!(failures.is_empty(), "failed checks:\n{}", failures.join("\n"));
}
