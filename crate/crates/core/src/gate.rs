//! Circuit gates: single-parameter rotation-like gates and fixed gates.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// A gate of the variational circuit. `Rotation` implements
/// `exp(-i theta H / 2) = cos(theta/2) I - i sin(theta/2) H` for an
/// involutory Pauli-string generator `H`.
#[derive(Debug, Clone)]
pub enum Gate {
    Rotation {
        generator: PauliString,
        param_index: usize,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    Hadamard {
        wire: usize,
    },
    /// Dense unitary on an ordered list of wires; local bit `i` of the
    /// matrix index corresponds to `wires[i]`.
    Unitary {
        matrix: Vec<Complex64>,
        wires: Vec<usize>,
    },
}

impl Gate {
    /// Dense unitary gate; rejects matrices that are not unitary within 1e-10.
    pub fn unitary(matrix: Vec<Complex64>, wires: Vec<usize>) -> Result<Self> {
        let dim = 1usize << wires.len();
        if matrix.len() != dim * dim {
            return Err(Error::NonUnitaryMatrix);
        }
        // U U^dag = I
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..dim {
                    acc += matrix[i * dim + k] * matrix[j * dim + k].conj();
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                if (acc - Complex64::new(expect, 0.0)).norm() > 1e-10 {
                    return Err(Error::NonUnitaryMatrix);
                }
            }
        }
        Ok(Gate::Unitary { matrix, wires })
    }

    pub fn wires(&self) -> Vec<usize> {
        match self {
            Gate::Rotation { generator, .. } => (0..generator.n_wires()).collect(),
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Hadamard { wire } => vec![*wire],
            Gate::Unitary { wires, .. } => wires.clone(),
        }
    }
}
