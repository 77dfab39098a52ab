//! The 5-qubit reference circuit and its calibration against pinned
//! goldens.
//!
//! The circuit is an X rotation on every wire followed by an entangling
//! block of CNOTs over the T-shaped coupling edges
//! (0,1), (1,2), (1,3), (3,4), measuring Z on wire 1. The pinned constants
//! fix f, the gradient and the Hessian at one parameter point, but not the
//! CNOT directions or their order, so the
//! builder scans a small documented candidate set (both orientations per
//! edge, both edge orders) and selects the first candidate matching every
//! golden to three decimals.

use qderiv::{
    ps_gradient, ps_hessian, Circuit, Evaluator, Gate, Observable, PauliLetter, PauliString,
};
use std::f64::consts::FRAC_PI_2;

pub const REFERENCE_THETA: [f64; 5] = [2.739, 0.163, 3.454, 2.735, 2.641];

pub const GOLDEN_F: f64 = -0.794;
pub const GOLDEN_GRADIENT: [f64; 5] = [-0.338, 0.130, 0.256, -0.342, 0.0];
pub const GOLDEN_HESSIAN: [[f64; 5]; 5] = [
    [0.794, 0.055, 0.109, -0.145, 0.0],
    [0.055, 0.794, -0.042, 0.056, 0.0],
    [0.109, -0.042, 0.794, 0.110, 0.0],
    [-0.145, 0.056, 0.110, 0.794, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0],
];

/// Values printed to three decimals carry up to 5e-4 of rounding, and the
/// pinned parameter point is itself rounded, so candidates are accepted
/// within 1e-3.
pub const CALIBRATION_TOL: f64 = 1e-3;

const EDGES: [(usize, usize); 4] = [(0, 1), (1, 2), (1, 3), (3, 4)];

#[derive(Debug, Clone)]
pub struct CalibrationReport {
    pub met: bool,
    pub circuit: Circuit,
    /// Human-readable description of the selected entangler candidate.
    pub candidate: String,
}

pub fn reference_observable() -> Observable {
    Observable::SinglePauli(PauliString::single(PauliLetter::Z, 1, 5).unwrap())
}

fn build_candidate(orientation: u8, reversed: bool) -> (Circuit, String) {
    let mut gates: Vec<Gate> = (0..5)
        .map(|j| Gate::Rotation {
            generator: PauliString::single(PauliLetter::X, j, 5).unwrap(),
            param_index: j,
        })
        .collect();
    let mut cnots = Vec::new();
    for (i, &(a, b)) in EDGES.iter().enumerate() {
        let (control, target) = if orientation >> i & 1 == 0 {
            (a, b)
        } else {
            (b, a)
        };
        cnots.push(Gate::Cnot { control, target });
    }
    if reversed {
        cnots.reverse();
    }
    let description = cnots
        .iter()
        .map(|g| match g {
            Gate::Cnot { control, target } => format!("cnot {control} {target}"),
            _ => unreachable!(),
        })
        .collect::<Vec<_>>()
        .join(", ");
    gates.extend(cnots);
    (Circuit::new(5, gates).unwrap(), description)
}

fn matches_goldens(circuit: &Circuit) -> bool {
    let mut ev = Evaluator::exact(circuit.clone(), reference_observable());
    let f = match ev.eval(&REFERENCE_THETA) {
        Ok(v) => v,
        Err(_) => return false,
    };
    if (f - GOLDEN_F).abs() > CALIBRATION_TOL {
        return false;
    }
    let g = ps_gradient(&mut ev, &REFERENCE_THETA, FRAC_PI_2).unwrap();
    for j in 0..5 {
        if (g[j] - GOLDEN_GRADIENT[j]).abs() > CALIBRATION_TOL {
            return false;
        }
    }
    let h = ps_hessian(&mut ev, &REFERENCE_THETA, FRAC_PI_2).unwrap();
    for j1 in 0..5 {
        for j2 in 0..5 {
            if (h.get(&[j1, j2]).unwrap() - GOLDEN_HESSIAN[j1][j2]).abs() > CALIBRATION_TOL {
                return false;
            }
        }
    }
    true
}

/// Scan the candidate set (16 orientations x 2 orders) and return the first
/// calibrated circuit; falls back to the default candidate with
/// `met = false` when none matches.
pub fn reference_circuit() -> CalibrationReport {
    for reversed in [false, true] {
        for orientation in 0u8..16 {
            let (circuit, candidate) = build_candidate(orientation, reversed);
            if matches_goldens(&circuit) {
                return CalibrationReport {
                    met: true,
                    circuit,
                    candidate,
                };
            }
        }
    }
    let (circuit, candidate) = build_candidate(0, false);
    CalibrationReport {
        met: false,
        circuit,
        candidate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn calibration_finds_a_match() {
        let report = reference_circuit();
        assert!(report.met, "no candidate matched the goldens");
        let mut ev = Evaluator::exact(report.circuit.clone(), reference_observable());
        assert_abs_diff_eq!(
            ev.eval(&REFERENCE_THETA).unwrap(),
            GOLDEN_F,
            epsilon = CALIBRATION_TOL
        );
    }

    #[test]
    fn last_parameter_is_inert() {
        let report = reference_circuit();
        let mut ev = Evaluator::exact(report.circuit.clone(), reference_observable());
        let f0 = ev.eval(&REFERENCE_THETA).unwrap();
        let mut shifted = REFERENCE_THETA;
        shifted[4] += 1.234;
        assert_abs_diff_eq!(ev.eval(&shifted).unwrap(), f0, epsilon = 1e-12);
    }
}
