//! Shared fixtures for the criterion benchmarks.

use qderiv::{Circuit, Gate, Observable, PauliLetter, PauliString};

/// Layered rotation circuit: `layers` rounds of single-wire X/Y/Z rotations
/// followed by a CNOT ladder, one parameter per rotation.
pub fn layered_circuit(n_wires: usize, layers: usize) -> (Circuit, Observable, Vec<f64>) {
    let letters = [PauliLetter::X, PauliLetter::Y, PauliLetter::Z];
    let mut gates = Vec::new();
    let mut param = 0;
    for layer in 0..layers {
        for w in 0..n_wires {
            gates.push(Gate::Rotation {
                generator: PauliString::single(letters[layer % 3], w, n_wires).unwrap(),
                param_index: param,
            });
            param += 1;
        }
        for w in 0..n_wires - 1 {
            gates.push(Gate::Cnot {
                control: w,
                target: w + 1,
            });
        }
    }
    let circuit = Circuit::new(n_wires, gates).unwrap();
    let observable =
        Observable::SinglePauli(PauliString::single(PauliLetter::Z, 0, n_wires).unwrap());
    let theta: Vec<f64> = (0..param).map(|j| 0.1 + 0.37 * j as f64).collect();
    (circuit, observable, theta)
}
