//! Parameter-shift and finite-difference derivative machinery.

pub mod evaluator;
pub mod metric;
pub mod shift;
pub mod surrogate;
pub mod tensor;
