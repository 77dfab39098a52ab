//! Fubini-Study metric tensor from shifted overlap probabilities.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::circuit::Circuit;
use crate::deriv::evaluator::Evaluator;
use crate::deriv::tensor::DerivativeTensor;
use crate::error::Result;
use crate::shots::ShotModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricMode {
    Exact,
    Sampled(ShotModel),
}

/// Formula for the diagonal entries. Both are exact; the pi-shift form needs
/// one overlap evaluation per parameter, the half-shift form trades the
/// factor for a smaller offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DiagMetricForm {
    /// F_jj = [1 - P(theta + pi e_j)] / 4.
    #[default]
    PiShift,
    /// F_jj = [1 - P(theta + pi/2 e_j)] / 2.
    HalfShift,
}

/// Metric tensor F at `theta`:
///
/// * off-diagonals F_{j1,j2} = -1/8 [P(+,+) - P(+,-) - P(-,+) + P(-,-)]
///   over pi/2 offsets of the two parameters,
/// * diagonals per `DiagMetricForm`,
///
/// where P(x) = |<psi(theta)|psi(theta + x)>|^2 is the survival probability
/// of the shifted state. Entries are filled in canonical order (diagonal j,
/// then off-diagonals with j1 < j2), which fixes the stream consumption of
/// sampled overlap estimates.
pub fn metric_tensor(circuit: &Circuit, theta: &[f64], mode: MetricMode) -> Result<DerivativeTensor> {
    metric_tensor_with(circuit, theta, mode, DiagMetricForm::default())
}

pub fn metric_tensor_with(
    circuit: &Circuit,
    theta: &[f64],
    mode: MetricMode,
    diag: DiagMetricForm,
) -> Result<DerivativeTensor> {
    let mut ev = match mode {
        MetricMode::Exact => Evaluator::exact_overlap(circuit.clone(), theta)?,
        MetricMode::Sampled(shots) => Evaluator::sampled_overlap(circuit.clone(), theta, shots)?,
    };
    let m = theta.len();
    let mut prob = |offsets: &[(usize, f64)]| -> Result<f64> {
        let mut point = theta.to_vec();
        for &(j, x) in offsets {
            point[j] += x;
        }
        ev.eval(&point)
    };
    let mut tensor = DerivativeTensor::new(2, m);
    for j in 0..m {
        let value = match diag {
            DiagMetricForm::PiShift => (1.0 - prob(&[(j, PI)])?) / 4.0,
            DiagMetricForm::HalfShift => (1.0 - prob(&[(j, FRAC_PI_2)])?) / 2.0,
        };
        tensor.set(&[j, j], value);
    }
    for j1 in 0..m {
        for j2 in (j1 + 1)..m {
            let pp = prob(&[(j1, FRAC_PI_2), (j2, FRAC_PI_2)])?;
            let pm = prob(&[(j1, FRAC_PI_2), (j2, -FRAC_PI_2)])?;
            let mp = prob(&[(j1, -FRAC_PI_2), (j2, FRAC_PI_2)])?;
            let mm = prob(&[(j1, -FRAC_PI_2), (j2, -FRAC_PI_2)])?;
            tensor.set(&[j1, j2], -(pp - pm - mp + mm) / 8.0);
        }
    }
    Ok(tensor)
}
