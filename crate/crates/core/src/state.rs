//! Dense statevector simulation: gate application, expectation values and
//! overlap probabilities.

use num_complex::Complex64;

use crate::circuit::Circuit;
use crate::error::Result;
use crate::gate::Gate;
use crate::observable::Observable;
use crate::pauli::PauliString;

#[derive(Debug, Clone)]
pub struct StateVector {
    n_wires: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0...0> on `n_wires` wires.
    pub fn zero(n_wires: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_wires];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { n_wires, amps }
    }

    pub fn n_wires(&self) -> usize {
        self.n_wires
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply(&mut self, gate: &Gate, params: &[f64]) {
        match gate {
            Gate::Rotation {
                generator,
                param_index,
            } => self.apply_rotation(generator, params[*param_index]),
            Gate::Cnot { control, target } => self.apply_cnot(*control, *target),
            Gate::Hadamard { wire } => self.apply_hadamard(*wire),
            Gate::Unitary { matrix, wires } => self.apply_unitary(matrix, wires),
        }
    }

    /// exp(-i theta H / 2) = cos(theta/2) I - i sin(theta/2) H.
    fn apply_rotation(&mut self, generator: &PauliString, theta: f64) {
        let c = (theta / 2.0).cos();
        let ms = Complex64::new(0.0, -(theta / 2.0).sin());
        let mask = generator.flip_mask();
        if mask == 0 {
            // diagonal generator: amplitude-wise phase
            for (basis, amp) in self.amps.iter_mut().enumerate() {
                *amp *= Complex64::new(c, 0.0) + ms * generator.phase(basis);
            }
            return;
        }
        for y in 0..self.amps.len() {
            let partner = y ^ mask;
            if partner < y {
                continue;
            }
            let ay = self.amps[y];
            let ap = self.amps[partner];
            self.amps[y] = c * ay + ms * generator.phase(partner) * ap;
            self.amps[partner] = c * ap + ms * generator.phase(y) * ay;
        }
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let cbit = 1usize << control;
        let tbit = 1usize << target;
        for y in 0..self.amps.len() {
            if y & cbit != 0 && y & tbit == 0 {
                self.amps.swap(y, y | tbit);
            }
        }
    }

    fn apply_hadamard(&mut self, wire: usize) {
        let bit = 1usize << wire;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for y in 0..self.amps.len() {
            if y & bit == 0 {
                let a0 = self.amps[y];
                let a1 = self.amps[y | bit];
                self.amps[y] = s * (a0 + a1);
                self.amps[y | bit] = s * (a0 - a1);
            }
        }
    }

    fn apply_unitary(&mut self, matrix: &[Complex64], wires: &[usize]) {
        let k = wires.len();
        let dim = 1usize << k;
        let mut idx = vec![0usize; dim];
        let mut buf = vec![Complex64::new(0.0, 0.0); dim];
        let gate_mask: usize = wires.iter().map(|w| 1usize << w).sum();
        for base in 0..self.amps.len() {
            if base & gate_mask != 0 {
                continue;
            }
            for (local, slot) in idx.iter_mut().enumerate() {
                let mut g = base;
                for (i, &w) in wires.iter().enumerate() {
                    if (local >> i) & 1 == 1 {
                        g |= 1 << w;
                    }
                }
                *slot = g;
            }
            for row in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for col in 0..dim {
                    acc += matrix[row * dim + col] * self.amps[idx[col]];
                }
                buf[row] = acc;
            }
            for row in 0..dim {
                self.amps[idx[row]] = buf[row];
            }
        }
    }

    /// <psi| M |psi>, exact.
    pub fn expectation(&self, obs: &Observable) -> f64 {
        match obs {
            Observable::ZeroProjector => self.amps[0].norm_sqr(),
            Observable::SinglePauli(p) => {
                let mask = p.flip_mask();
                let mut acc = Complex64::new(0.0, 0.0);
                for y in 0..self.amps.len() {
                    let partner = y ^ mask;
                    acc += self.amps[y].conj() * p.phase(partner) * self.amps[partner];
                }
                acc.re
            }
        }
    }

    /// |<other|self>|^2.
    pub fn overlap_sq(&self, other: &StateVector) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in self.amps.iter().zip(&other.amps) {
            acc += b.conj() * a;
        }
        acc.norm_sqr()
    }
}

/// U(theta)|0...0>.
pub fn run_circuit(circuit: &Circuit, params: &[f64]) -> Result<StateVector> {
    circuit.check_params(params)?;
    let mut state = StateVector::zero(circuit.n_wires());
    for gate in circuit.gates() {
        state.apply(gate, params);
    }
    Ok(state)
}

/// <psi(theta)| M |psi(theta)>, exact to machine precision.
pub fn expectation(circuit: &Circuit, params: &[f64], obs: &Observable) -> Result<f64> {
    Ok(run_circuit(circuit, params)?.expectation(obs))
}

/// |<psi(theta2)|psi(theta)>|^2, the survival probability of |0...0> under
/// the composite circuit U(theta2)^dag U(theta).
pub fn overlap_probability(circuit: &Circuit, params: &[f64], params2: &[f64]) -> Result<f64> {
    let a = run_circuit(circuit, params)?;
    let b = run_circuit(circuit, params2)?;
    Ok(a.overlap_sq(&b))
}
