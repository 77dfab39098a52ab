//! Statistical characterization of derivative estimators under the
//! finite-shot model.

pub mod gradient;
pub mod report;
pub mod spec;
pub mod theory;
