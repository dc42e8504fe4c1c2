//! Exhaustive minimum-weight decoding.
//!
//! The error patterns whose weight-4 syndrome equals that of `x` are exactly
//! `x ∘ z` for the `2^(K-1)` codewords `z`, so the search walks the codewords
//! instead of all `2^(N_v)` patterns. This is the infinite-multiplier limit
//! of the constrained minimum-weight Hamiltonian.

use crate::code::{LogicalState, ParityCode};
use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;
use crate::spin::SpinMatrix;

/// Largest `K` accepted by [`mwd_bruteforce`].
pub const MWD_MAX_K: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MwdResult {
    /// Minimum-weight error pattern `e*`.
    pub error: SpinMatrix,
    /// `z* = x ∘ e*`, a codeword.
    pub decoded: SpinMatrix,
    /// Number of `-1` entries in `e*`.
    pub weight: usize,
}

/// Nearest codeword to `x` in Hamming distance. Ties go to the pattern whose
/// sorted list of flipped variable nodes is lexicographically smallest.
///
/// `lambda` must be positive; the search enforces the constraints exactly, so
/// its value does not otherwise matter.
pub fn mwd_bruteforce<T: Scalar>(
    code: &ParityCode,
    x: &SpinMatrix,
    lambda: T,
) -> Result<MwdResult> {
    if !(lambda > T::zero() && lambda.is_finite()) {
        return Err(invalid("lambda must be positive"));
    }
    let k = code.k();
    if k > MWD_MAX_K {
        return Err(Error::CapacityExceeded(format!(
            "minimum-weight search supports K <= {MWD_MAX_K}, got {k}"
        )));
    }
    if x.k() != k {
        return Err(invalid("matrix dimension does not match code"));
    }
    let xv = x.edge_values();
    let mut best: Option<(usize, Vec<usize>, SpinMatrix)> = None;
    for bits in 0u32..(1 << (k - 1)) {
        let spins: Vec<i8> = std::iter::once(1)
            .chain((0..k - 1).map(|b| if bits >> b & 1 == 1 { -1 } else { 1 }))
            .collect();
        let z = code.encode(&LogicalState::new(spins)?)?;
        let flips: Vec<usize> = z
            .edge_values()
            .iter()
            .zip(&xv)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(v, _)| v)
            .collect();
        let better = match &best {
            None => true,
            Some((w, f, _)) => flips.len() < *w || (flips.len() == *w && flips < *f),
        };
        if better {
            best = Some((flips.len(), flips, z));
        }
    }
    let (weight, _, decoded) = best.expect("at least one codeword");
    Ok(MwdResult {
        error: x.hadamard(&decoded)?,
        decoded,
        weight,
    })
}
