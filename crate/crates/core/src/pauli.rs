//! Dense Pauli strings, the involutory generators of rotation-like gates.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

/// One letter per wire. Acts on a basis state as a bit-flip mask (X and Y
/// positions) together with a diagonal phase, which keeps the statevector
/// application linear in the state size.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    letters: Vec<PauliLetter>,
}

impl PauliString {
    pub fn new(letters: Vec<PauliLetter>) -> Self {
        Self { letters }
    }

    /// Single non-identity letter on `wire` of an `n_wires` register.
    pub fn single(letter: PauliLetter, wire: usize, n_wires: usize) -> Result<Self> {
        if wire >= n_wires {
            return Err(Error::WireOutOfRange { wire, n_wires });
        }
        let mut letters = vec![PauliLetter::I; n_wires];
        letters[wire] = letter;
        Ok(Self { letters })
    }

    pub fn n_wires(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[PauliLetter] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&l| l == PauliLetter::I)
    }

    /// Bit mask of wires flipped by this string (X and Y positions).
    pub fn flip_mask(&self) -> usize {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &l)| matches!(l, PauliLetter::X | PauliLetter::Y))
            .fold(0, |m, (w, _)| m | (1 << w))
    }

    /// Phase picked up when acting on basis state `basis`:
    /// `P |basis> = phase(basis) |basis ^ flip_mask>`.
    pub fn phase(&self, basis: usize) -> Complex64 {
        let mut phase = Complex64::new(1.0, 0.0);
        for (w, &l) in self.letters.iter().enumerate() {
            let bit = (basis >> w) & 1;
            match l {
                PauliLetter::I | PauliLetter::X => {}
                PauliLetter::Y => {
                    phase *= if bit == 0 {
                        Complex64::new(0.0, 1.0)
                    } else {
                        Complex64::new(0.0, -1.0)
                    };
                }
                PauliLetter::Z => {
                    if bit == 1 {
                        phase = -phase;
                    }
                }
            }
        }
        phase
    }

    /// Dense matrix, for small-register checks.
    pub fn dense(&self) -> Vec<Vec<Complex64>> {
        let dim = 1 << self.n_wires();
        let mask = self.flip_mask();
        let mut mat = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for col in 0..dim {
            mat[col ^ mask][col] = self.phase(col);
        }
        mat
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            let c = match l {
                PauliLetter::I => 'I',
                PauliLetter::X => 'X',
                PauliLetter::Y => 'Y',
                PauliLetter::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| match c {
                'I' | 'i' => Ok(PauliLetter::I),
                'X' | 'x' => Ok(PauliLetter::X),
                'Y' | 'y' => Ok(PauliLetter::Y),
                'Z' | 'z' => Ok(PauliLetter::Z),
                other => Err(Error::Parse {
                    line: 0,
                    msg: format!("invalid pauli letter '{other}'"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { letters })
    }
}
