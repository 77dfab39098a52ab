//! First- and second-order optimizers with pluggable curvature
//! regularization.

pub mod optimizer;
pub mod regularize;
