//! Trigonometric surrogate: an m-parameter rotation-like expectation value
//! is a linear combination of the 3^m product-basis functions
//! prod_j {1, cos theta_j, sin theta_j}, so its values on the grid
//! {0, +pi/2, -pi/2}^m determine it everywhere.

use std::f64::consts::FRAC_PI_2;

use crate::deriv::evaluator::Evaluator;
use crate::error::{Error, Result};

pub const MAX_SURROGATE_PARAMS: usize = 8;

/// Coefficients indexed base-3: digit 0 of index k selects the factor for
/// parameter 0, and digit value 0/1/2 selects 1/cos/sin.
#[derive(Debug, Clone)]
pub struct TrigSurrogate {
    m: usize,
    coeffs: Vec<f64>,
}

impl TrigSurrogate {
    pub fn n_params(&self) -> usize {
        self.m
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Surrogate value; equals the circuit expectation for every theta.
    pub fn eval(&self, theta: &[f64]) -> Result<f64> {
        self.contract(theta, None)
    }

    /// Analytic partial derivative with respect to theta_j.
    pub fn partial(&self, theta: &[f64], j: usize) -> Result<f64> {
        if j >= self.m {
            return Err(Error::ParamCount {
                expected: self.m,
                got: j + 1,
            });
        }
        self.contract(theta, Some(j))
    }

    fn contract(&self, theta: &[f64], diff: Option<usize>) -> Result<f64> {
        if theta.len() != self.m {
            return Err(Error::ParamCount {
                expected: self.m,
                got: theta.len(),
            });
        }
        // basis[j] = values of the three factors (or their derivatives on
        // the differentiated axis) at theta_j
        let basis: Vec<[f64; 3]> = theta
            .iter()
            .enumerate()
            .map(|(j, &t)| {
                if diff == Some(j) {
                    [0.0, -t.sin(), t.cos()]
                } else {
                    [1.0, t.cos(), t.sin()]
                }
            })
            .collect();
        let mut acc = 0.0;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let mut term = c;
            let mut rem = k;
            for b in &basis {
                term *= b[rem % 3];
                rem /= 3;
            }
            acc += term;
        }
        Ok(acc)
    }
}

/// Reconstruct the full trigonometric expansion of the evaluator's function
/// from 3^m evaluations on the grid {0, +pi/2, -pi/2}^m. Per parameter the
/// grid values (v0, v+, v-) invert exactly to (c_const, c_cos, c_sin) =
/// ((v+ + v-)/2 ... as below), so no global linear solve is needed.
pub fn trig_reconstruct(ev: &mut Evaluator) -> Result<TrigSurrogate> {
    let m = ev.n_params();
    if m > MAX_SURROGATE_PARAMS {
        return Err(Error::SurrogateTooLarge(m));
    }
    let size = 3usize.pow(m as u32);
    // grid values, digit value 0/1/2 meaning offset 0/+pi/2/-pi/2
    let offsets = [0.0, FRAC_PI_2, -FRAC_PI_2];
    let mut values = Vec::with_capacity(size);
    let mut point = vec![0.0; m];
    for k in 0..size {
        let mut rem = k;
        for p in point.iter_mut() {
            *p = offsets[rem % 3];
            rem /= 3;
        }
        values.push(ev.eval(&point)?);
    }
    // Invert one axis at a time: with (v0, v+, v-) the values at
    // theta_j = 0, +pi/2, -pi/2 and everything else fixed,
    //   c_const = (v+ + v-)/2, c_cos = v0 - c_const, c_sin = (v+ - v-)/2.
    let mut stride = 1;
    for _ in 0..m {
        let block = stride * 3;
        for base in (0..size).step_by(block) {
            for off in 0..stride {
                let i0 = base + off;
                let i1 = i0 + stride;
                let i2 = i1 + stride;
                let (v0, v1, v2) = (values[i0], values[i1], values[i2]);
                let c0 = (v1 + v2) / 2.0;
                values[i0] = c0;
                values[i1] = v0 - c0;
                values[i2] = (v1 - v2) / 2.0;
            }
        }
        stride = block;
    }
    Ok(TrigSurrogate { m, coeffs: values })
}
