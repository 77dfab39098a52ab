//! Estimator specifications.

use crate::error::{Error, Result};

const SIN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimatorKind {
    /// Shift-rule estimator with shift s.
    ParamShift { s: f64 },
    /// Shift-rule estimate multiplied by a deterministic weight in [0, 1].
    ScaledParamShift { s: f64, lambda: f64 },
    /// Symmetric finite difference with step h.
    CentralDiff { h: f64 },
    /// One-sided finite difference with step h (first order only).
    ForwardDiff { h: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorSpec {
    pub kind: EstimatorKind,
    /// Derivative order, 1 (gradient) or 2 (Hessian).
    pub order: usize,
}

impl EstimatorSpec {
    pub fn gradient(kind: EstimatorKind) -> Self {
        Self { kind, order: 1 }
    }

    pub fn hessian(kind: EstimatorKind) -> Self {
        Self { kind, order: 2 }
    }

    /// Step or shift magnitude of the underlying rule.
    pub fn step(&self) -> f64 {
        match self.kind {
            EstimatorKind::ParamShift { s } | EstimatorKind::ScaledParamShift { s, .. } => s,
            EstimatorKind::CentralDiff { h } | EstimatorKind::ForwardDiff { h } => h,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.order) {
            return Err(Error::InvalidSpec(format!(
                "derivative order must be 1 or 2, got {}",
                self.order
            )));
        }
        match self.kind {
            EstimatorKind::ParamShift { s } => check_shift(s),
            EstimatorKind::ScaledParamShift { s, lambda } => {
                check_shift(s)?;
                if !(0.0..=1.0).contains(&lambda) {
                    return Err(Error::InvalidSpec(format!(
                        "lambda must lie in [0, 1], got {lambda}"
                    )));
                }
                Ok(())
            }
            EstimatorKind::CentralDiff { h } => check_step(h),
            EstimatorKind::ForwardDiff { h } => {
                check_step(h)?;
                if self.order != 1 {
                    return Err(Error::UnsupportedScheme { order: self.order });
                }
                Ok(())
            }
        }
    }
}

fn check_shift(s: f64) -> Result<()> {
    if !s.is_finite() || s.sin().abs() < SIN_TOL {
        return Err(Error::SingularShift(s));
    }
    Ok(())
}

fn check_step(h: f64) -> Result<()> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::NonPositiveStep(h));
    }
    Ok(())
}
