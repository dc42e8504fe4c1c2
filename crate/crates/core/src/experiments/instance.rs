//! Random logical problem instances with brute-force ground states.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::code::{LogicalState, ParityCode};
use crate::error::{invalid, Error, Result};
use crate::rng::trial_rng;
use crate::scalar::Scalar;
use crate::spin::{n_pairs, pair_index, SpinMatrix};

/// Largest `K` whose ground state is found by enumeration.
pub const GROUND_STATE_MAX_K: usize = 24;

/// Logical couplings on the complete graph `K_K` with zero local fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance<T> {
    pub k: usize,
    /// `J_ij` per pair, lexicographic order.
    pub couplings: Vec<T>,
    /// Minimizer of `-Σ J_ij Z_i Z_j` with `Z_1 = +1`.
    pub ground_state: LogicalState,
    pub ground_energy: T,
    pub seed: u64,
}

/// `-Σ_{i<j} J_ij Z_i Z_j`.
pub fn logical_energy<T: Scalar>(k: usize, couplings: &[T], z: &LogicalState) -> Result<T> {
    if couplings.len() != n_pairs(k) || z.len() != k {
        return Err(invalid("couplings or logical state do not match k"));
    }
    let s = z.spins();
    let mut e = 0.0;
    for i in 0..k {
        for j in (i + 1)..k {
            e -= couplings[pair_index(k, i, j)].to_f64_lossy() * f64::from(s[i] * s[j]);
        }
    }
    Ok(T::lit(e))
}

/// Instance with `J_ij` drawn uniformly from `[-1/4, 1/4]`.
pub fn gen_instance<T: Scalar>(k: usize, seed: u64) -> Result<ProblemInstance<T>> {
    check_k(k)?;
    let mut rng = trial_rng(seed, 0);
    let couplings = (0..n_pairs(k))
        .map(|_| T::lit(rng.random_range(-0.25..=0.25)))
        .collect();
    ProblemInstance::with_couplings(k, couplings, seed)
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(invalid(format!("need at least 2 logical spins, got {k}")));
    }
    if k > GROUND_STATE_MAX_K {
        return Err(Error::CapacityExceeded(format!(
            "ground-state enumeration supports K <= {GROUND_STATE_MAX_K}, got {k}"
        )));
    }
    Ok(())
}

impl<T: Scalar> ProblemInstance<T> {
    /// Instance with given couplings; the ground state is found by enumeration.
    pub fn with_couplings(k: usize, couplings: Vec<T>, seed: u64) -> Result<Self> {
        check_k(k)?;
        if couplings.len() != n_pairs(k) {
            return Err(invalid(format!(
                "expected {} couplings, got {}",
                n_pairs(k),
                couplings.len()
            )));
        }
        if couplings.iter().any(|j| !j.is_finite()) {
            return Err(invalid("couplings must be finite"));
        }
        let ground_state = ground_state(k, &couplings);
        let ground_energy = logical_energy(k, &couplings, &ground_state)?;
        Ok(Self {
            k,
            couplings,
            ground_state,
            ground_energy,
            seed,
        })
    }

    /// Codeword of the ground state, `ẑ = Zᵀ Z`.
    pub fn target(&self, code: &ParityCode) -> Result<SpinMatrix> {
        code.encode(&self.ground_state)
    }
}

/// Gray-code walk over the `2^(K-1)` assignments with `Z_1 = +1`.
fn ground_state<T: Scalar>(k: usize, couplings: &[T]) -> LogicalState {
    let mut j = vec![0.0f64; k * k];
    for a in 0..k {
        for b in (a + 1)..k {
            let v = couplings[pair_index(k, a, b)].to_f64_lossy();
            j[a * k + b] = v;
            j[b * k + a] = v;
        }
    }
    let mut z = vec![1i8; k];
    // Local field h_m = Σ_l J_ml Z_l.
    let mut h: Vec<f64> = (0..k).map(|m| j[m * k..(m + 1) * k].iter().sum()).collect();
    let mut e: f64 = -(0..k).map(|m| h[m]).sum::<f64>() / 2.0;
    let mut best_e = e;
    let mut best = z.clone();
    for n in 1u64..(1u64 << (k - 1)) {
        let m = n.trailing_zeros() as usize + 1;
        e += 2.0 * f64::from(z[m]) * h[m];
        z[m] = -z[m];
        let d = 2.0 * f64::from(z[m]);
        for l in 0..k {
            h[l] += d * j[l * k + m];
        }
        if e < best_e {
            best_e = e;
            best.copy_from_slice(&z);
        }
    }
    LogicalState::new(best).expect("entries are ±1")
}
