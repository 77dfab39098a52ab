//! Multi-parameter shift vectors and evaluation-count bounds.

use crate::error::{Error, Result};

/// One shift of the parameter vector together with its parity weight,
/// (-1)^(number of negative basis shifts). Offsets are stored in units of
/// pi/2; repeated derivative indices accumulate, so a doubly-shifted
/// parameter holds +-2 units (+-pi) or 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftVector {
    /// Per-parameter offset in units of pi/2.
    pub units: Vec<i32>,
    pub parity: i8,
}

impl ShiftVector {
    /// Offsets in radians for the canonical s = pi/2 rule.
    pub fn offsets(&self) -> Vec<f64> {
        self.units
            .iter()
            .map(|&u| f64::from(u) * std::f64::consts::FRAC_PI_2)
            .collect()
    }
}

/// All 2^d sign choices for a derivative of order d.
#[derive(Debug, Clone)]
pub struct ShiftSet {
    pub indices: Vec<usize>,
    pub vectors: Vec<ShiftVector>,
}

/// Enumerate the 2^d multi-parameter shift vectors for the derivative
/// indices `indices` of an m-parameter circuit.
pub fn shift_set(indices: &[usize], m: usize) -> Result<ShiftSet> {
    if indices.is_empty() {
        return Err(Error::EmptyIndices);
    }
    for &j in indices {
        if j >= m {
            return Err(Error::ParamCount {
                expected: m,
                got: j + 1,
            });
        }
    }
    let d = indices.len();
    let mut vectors = Vec::with_capacity(1 << d);
    for signs in 0..(1u32 << d) {
        let mut units = vec![0i32; m];
        let mut negatives = 0u32;
        for (pos, &j) in indices.iter().enumerate() {
            if (signs >> pos) & 1 == 0 {
                units[j] += 1;
            } else {
                units[j] -= 1;
                negatives += 1;
            }
        }
        let parity = if negatives % 2 == 0 { 1 } else { -1 };
        vectors.push(ShiftVector { units, parity });
    }
    Ok(ShiftSet {
        indices: indices.to_vec(),
        vectors,
    })
}

/// Number of expectation values needed for an order-d derivative tensor of
/// an m-parameter circuit: min(2^d * C(m+d-1, d), 3^m). Saturates at
/// `u64::MAX` for inputs beyond any practical size.
pub fn eval_count(m: u64, d: u64) -> u64 {
    let per_tensor = 2u128
        .checked_pow(d.min(u32::MAX as u64) as u32)
        .and_then(|p| p.checked_mul(multiset_coefficient(m, d)))
        .unwrap_or(u128::MAX);
    let grid = 3u128
        .checked_pow(m.min(u32::MAX as u64) as u32)
        .unwrap_or(u128::MAX);
    per_tensor.min(grid).min(u64::MAX as u128) as u64
}

fn multiset_coefficient(m: u64, d: u64) -> u128 {
    // C(m + d - 1, d)
    let mut acc: u128 = 1;
    for i in 0..d {
        acc = match acc.checked_mul((m + i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_index_pair() {
        let set = shift_set(&[0], 2).unwrap();
        assert_eq!(set.vectors.len(), 2);
        assert_eq!(set.vectors[0].units, vec![1, 0]);
        assert_eq!(set.vectors[0].parity, 1);
        assert_eq!(set.vectors[1].units, vec![-1, 0]);
        assert_eq!(set.vectors[1].parity, -1);
    }

    #[test]
    fn hessian_sign_pattern() {
        let set = shift_set(&[0, 1], 2).unwrap();
        let parities: Vec<i8> = set.vectors.iter().map(|v| v.parity).collect();
        assert_eq!(parities, vec![1, -1, -1, 1]);
    }

    #[test]
    fn repeated_index_accumulates() {
        let set = shift_set(&[0, 0], 1).unwrap();
        let units: Vec<i32> = set.vectors.iter().map(|v| v.units[0]).collect();
        assert_eq!(units, vec![2, 0, 0, -2]);
        let parities: Vec<i8> = set.vectors.iter().map(|v| v.parity).collect();
        assert_eq!(parities, vec![1, -1, -1, 1]);
    }

    #[test]
    fn empty_indices_rejected() {
        assert!(matches!(shift_set(&[], 3), Err(Error::EmptyIndices)));
    }

    #[test]
    fn eval_counts() {
        assert_eq!(eval_count(5, 1), 10);
        assert_eq!(eval_count(5, 2), 60);
        assert_eq!(eval_count(2, 6), 9); // 2^6 C(7,6) = 448 > 3^2
    }
}
