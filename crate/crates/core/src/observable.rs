//! Measured observables: a single Pauli string or the |0...0> projector.

use crate::pauli::PauliString;

/// Observables are restricted to the two cases with an exact Bernoulli shot
/// model: a +-1-valued Pauli string and the {0,1}-valued projector onto the
/// all-zeros state.
#[derive(Debug, Clone)]
pub enum Observable {
    SinglePauli(PauliString),
    ZeroProjector,
}
