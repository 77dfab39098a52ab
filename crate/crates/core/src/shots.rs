//! Finite-shot sampling model.
//!
//! Outcomes are Bernoulli: a single Pauli string yields +-1 with
//! p(+1) = (1 + f)/2 and the zero projector yields 1 with p = f. The sample
//! mean over N shots is drawn as a single binomial variate, which is
//! distributionally identical to averaging N independent outcomes. The RNG
//! is ChaCha8 keyed by `seed` with the word position set by `stream`, so a
//! (seed, stream, shots) triple reproduces bit-identical samples and
//! distinct streams are independent.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::observable::Observable;
use crate::state::expectation;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotModel {
    pub shots: u64,
    pub seed: u64,
    pub stream: u64,
}

impl ShotModel {
    pub fn new(shots: u64, seed: u64, stream: u64) -> Self {
        Self { shots, seed, stream }
    }

    pub fn with_stream(&self, stream: u64) -> Self {
        Self { stream, ..*self }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Sample mean of `shots` Bernoulli outcomes for an observable with
    /// exact expectation `f`.
    pub fn sample_mean(&self, f: f64, obs: &Observable) -> Result<f64> {
        if self.shots == 0 {
            return Err(Error::InvalidShotCount);
        }
        let mut rng = self.rng();
        let n = self.shots;
        match obs {
            Observable::SinglePauli(_) => {
                let p = ((1.0 + f) / 2.0).clamp(0.0, 1.0);
                let k = draw_binomial(&mut rng, n, p);
                Ok((2.0 * k as f64 - n as f64) / n as f64)
            }
            Observable::ZeroProjector => {
                let p = f.clamp(0.0, 1.0);
                let k = draw_binomial(&mut rng, n, p);
                Ok(k as f64 / n as f64)
            }
        }
    }
}

fn draw_binomial(rng: &mut ChaCha8Rng, n: u64, p: f64) -> u64 {
    if p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p).expect("valid p").sample(rng)
}

/// Sample mean of N projective measurements of `obs` on U(theta)|0>.
pub fn sample_expectation(
    circuit: &Circuit,
    params: &[f64],
    obs: &Observable,
    shots: &ShotModel,
) -> Result<f64> {
    let f = expectation(circuit, params, obs)?;
    shots.sample_mean(f, obs)
}

/// Single-shot variance sigma_0^2 = <M^2> - <M>^2: 1 - f^2 for a Pauli
/// string, f(1 - f) for the zero projector.
pub fn single_shot_variance(circuit: &Circuit, params: &[f64], obs: &Observable) -> Result<f64> {
    let f = expectation(circuit, params, obs)?;
    Ok(match obs {
        Observable::SinglePauli(_) => 1.0 - f * f,
        Observable::ZeroProjector => f * (1.0 - f),
    })
}
