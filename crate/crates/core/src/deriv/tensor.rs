//! Exact and sampled derivative tensors via parameter-shift rules and
//! finite-difference stencils.

use std::collections::BTreeMap;
use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::deriv::evaluator::Evaluator;
use crate::deriv::shift::shift_set;
use crate::error::{Error, Result};

const SIN_TOL: f64 = 1e-12;

/// Symmetric order-d tensor of real derivatives, keyed by the sorted index
/// multiset.
#[derive(Debug, Clone)]
pub struct DerivativeTensor {
    order: usize,
    m: usize,
    entries: BTreeMap<Vec<usize>, f64>,
}

impl DerivativeTensor {
    pub fn new(order: usize, m: usize) -> Self {
        Self {
            order,
            m,
            entries: BTreeMap::new(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n_params(&self) -> usize {
        self.m
    }

    pub fn set(&mut self, indices: &[usize], value: f64) {
        let mut key = indices.to_vec();
        key.sort_unstable();
        self.entries.insert(key, value);
    }

    /// Symmetric lookup: any permutation of the indices hits the same entry.
    pub fn get(&self, indices: &[usize]) -> Option<f64> {
        let mut key = indices.to_vec();
        key.sort_unstable();
        self.entries.get(&key).copied()
    }

    /// Entries in canonical (lexicographic sorted-multiset) order.
    pub fn iter(&self) -> impl Iterator<Item = (&Vec<usize>, f64)> {
        self.entries.iter().map(|(k, &v)| (k, v))
    }

    /// Dense symmetric matrix view for order-2 tensors.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        assert_eq!(self.order, 2);
        DMatrix::from_fn(self.m, self.m, |i, j| self.get(&[i, j]).unwrap_or(0.0))
    }
}

/// One evaluation point: a linear-combination term of shifted expectation
/// values. Identical points are merged so a repeated shift inside one
/// estimator reuses its sample.
struct TermAccumulator {
    order: Vec<(Vec<f64>, f64)>,
    seen: HashMap<Vec<u64>, usize>,
}

impl TermAccumulator {
    fn new() -> Self {
        Self {
            order: Vec::new(),
            seen: HashMap::new(),
        }
    }

    fn push(&mut self, point: Vec<f64>, coeff: f64) {
        let key: Vec<u64> = point.iter().map(|x| x.to_bits()).collect();
        match self.seen.get(&key) {
            Some(&idx) => self.order[idx].1 += coeff,
            None => {
                self.seen.insert(key, self.order.len());
                self.order.push((point, coeff));
            }
        }
    }

    fn evaluate(&self, ev: &mut Evaluator) -> Result<f64> {
        let mut acc = 0.0;
        for (point, coeff) in &self.order {
            if *coeff == 0.0 {
                continue;
            }
            acc += coeff * ev.eval(point)?;
        }
        Ok(acc)
    }
}

fn is_pi_half(s: f64) -> bool {
    (s - std::f64::consts::FRAC_PI_2).abs() < SIN_TOL
}

/// Generalized parameter-shift rule for the derivative
/// d^d f / d theta_{j1} ... d theta_{jd}:
///
/// g = sum_k P(k) f_hat(theta + k * 2s/pi) / (2 sin s)^d.
///
/// With an exact evaluator the result equals the true derivative to machine
/// precision for any s not a multiple of pi; orders above 2 are fixed at
/// s = pi/2. At s = pi/2, accumulated +-pi shifts are rewritten through the
/// pi-shift identity f(theta +- pi e_j) = f(+pi/2) + f(-pi/2) - f(theta),
/// so every tensor is assembled from the {0, +-pi/2} grid.
pub fn ps_tensor(ev: &mut Evaluator, theta: &[f64], indices: &[usize], s: f64) -> Result<f64> {
    let d = indices.len();
    if s.sin().abs() < SIN_TOL {
        return Err(Error::SingularShift(s));
    }
    if d > 2 && !is_pi_half(s) {
        return Err(Error::UnsupportedShift { order: d });
    }
    let set = shift_set(indices, theta.len())?;
    let mut acc = TermAccumulator::new();
    if is_pi_half(s) {
        for vector in &set.vectors {
            expand_pi_half_term(&mut acc, theta, &vector.units, f64::from(vector.parity), 0);
        }
    } else {
        for vector in &set.vectors {
            let point: Vec<f64> = theta
                .iter()
                .zip(&vector.units)
                .map(|(&t, &u)| t + f64::from(u) * s)
                .collect();
            acc.push(point, f64::from(vector.parity));
        }
    }
    let denom = (2.0 * s.sin()).powi(d as i32);
    Ok(acc.evaluate(ev)? / denom)
}

/// Recursively reduce pi/2-unit offsets into the {0, +-pi/2} grid: units
/// are first wrapped by 2pi periodicity into {-1, 0, 1, 2} and a 2-unit
/// (pi) offset is expanded through the pi-shift identity.
fn expand_pi_half_term(
    acc: &mut TermAccumulator,
    theta: &[f64],
    units: &[i32],
    coeff: f64,
    from: usize,
) {
    for j in from..units.len() {
        let wrapped = units[j].rem_euclid(4); // in {0,1,2,3}; 3 means -1
        let u = if wrapped == 3 { -1 } else { wrapped };
        if u == 2 {
            for (sub, c) in [(1, coeff), (-1, coeff), (0, -coeff)] {
                let mut next = units.to_vec();
                next[j] = sub;
                expand_pi_half_term(acc, theta, &next, c, j + 1);
            }
            return;
        }
        if u != units[j] {
            let mut next = units.to_vec();
            next[j] = u;
            expand_pi_half_term(acc, theta, &next, coeff, j);
            return;
        }
    }
    let point: Vec<f64> = theta
        .iter()
        .zip(units)
        .map(|(&t, &u)| t + f64::from(u) * std::f64::consts::FRAC_PI_2)
        .collect();
    acc.push(point, coeff);
}

/// Full gradient via the shift rule, one pair of evaluations per parameter.
pub fn ps_gradient(ev: &mut Evaluator, theta: &[f64], s: f64) -> Result<Vec<f64>> {
    (0..theta.len())
        .map(|j| ps_tensor(ev, theta, &[j], s))
        .collect()
}

/// Full Hessian via the shift rule; entries are computed in canonical
/// (j1 <= j2) order so sampled evaluators consume streams deterministically.
pub fn ps_hessian(ev: &mut Evaluator, theta: &[f64], s: f64) -> Result<DerivativeTensor> {
    let m = theta.len();
    let mut tensor = DerivativeTensor::new(2, m);
    for j1 in 0..m {
        for j2 in j1..m {
            let value = ps_tensor(ev, theta, &[j1, j2], s)?;
            tensor.set(&[j1, j2], value);
        }
    }
    Ok(tensor)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagVariant {
    /// [f(theta + pi e_j) - f(theta)] / 2.
    TwoEval,
    /// [f(theta + pi/2 e_j) - 2 f(theta) + f(theta - pi/2 e_j)] / 2.
    ThreeEval,
}

/// Diagonal Hessian element g_{j,j} by either specialized rule.
pub fn ps_hessian_diag(
    ev: &mut Evaluator,
    theta: &[f64],
    j: usize,
    variant: DiagVariant,
) -> Result<f64> {
    if j >= theta.len() {
        return Err(Error::ParamCount {
            expected: theta.len(),
            got: j + 1,
        });
    }
    let shifted = |delta: f64| {
        let mut p = theta.to_vec();
        p[j] += delta;
        p
    };
    match variant {
        DiagVariant::TwoEval => {
            let plus = ev.eval(&shifted(std::f64::consts::PI))?;
            let center = ev.eval(theta)?;
            Ok((plus - center) / 2.0)
        }
        DiagVariant::ThreeEval => {
            let plus = ev.eval(&shifted(std::f64::consts::FRAC_PI_2))?;
            let center = ev.eval(theta)?;
            let minus = ev.eval(&shifted(-std::f64::consts::FRAC_PI_2))?;
            Ok((plus - 2.0 * center + minus) / 2.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdScheme {
    Central,
    Forward,
}

/// Finite-difference stencils: central for orders 1 and 2, forward for
/// order 1.
pub fn fd_tensor(
    ev: &mut Evaluator,
    theta: &[f64],
    indices: &[usize],
    h: f64,
    scheme: FdScheme,
) -> Result<f64> {
    if h <= 0.0 {
        return Err(Error::NonPositiveStep(h));
    }
    let d = indices.len();
    if d == 0 {
        return Err(Error::EmptyIndices);
    }
    match (scheme, d) {
        (FdScheme::Forward, 1) => {
            let j = indices[0];
            if j >= theta.len() {
                return Err(Error::ParamCount {
                    expected: theta.len(),
                    got: j + 1,
                });
            }
            let mut plus = theta.to_vec();
            plus[j] += h;
            let fp = ev.eval(&plus)?;
            let f0 = ev.eval(theta)?;
            Ok((fp - f0) / h)
        }
        (FdScheme::Central, 1) | (FdScheme::Central, 2) => {
            let set = shift_set(indices, theta.len())?;
            let mut acc = TermAccumulator::new();
            for vector in &set.vectors {
                let point: Vec<f64> = theta
                    .iter()
                    .zip(&vector.units)
                    .map(|(&t, &u)| t + f64::from(u) * h)
                    .collect();
                acc.push(point, f64::from(vector.parity));
            }
            Ok(acc.evaluate(ev)? / (2.0 * h).powi(d as i32))
        }
        _ => Err(Error::UnsupportedScheme { order: d }),
    }
}

/// Both sides of the pi-shift identity
/// f(theta + pi e_j) = f(theta + pi/2 e_j) + f(theta - pi/2 e_j) - f(theta);
/// equal to 1e-10 for any rotation-like circuit.
pub fn pi_shift_identity_check(ev: &mut Evaluator, theta: &[f64], j: usize) -> Result<(f64, f64)> {
    let shifted = |delta: f64| {
        let mut p = theta.to_vec();
        p[j] += delta;
        p
    };
    let lhs = ev.eval(&shifted(std::f64::consts::PI))?;
    let rhs = ev.eval(&shifted(std::f64::consts::FRAC_PI_2))?
        + ev.eval(&shifted(-std::f64::consts::FRAC_PI_2))?
        - ev.eval(theta)?;
    Ok((lhs, rhs))
}
