//! Inversion functions of the bit-flipping family and their Hamiltonians.
//!
//! A negative inversion function `Δ_k(x)` means flipping spin `k` lowers the
//! matching Hamiltonian; the energy increase of the flip is exactly `2 Δ_k(x)`.
//!
//! | kind | `Δ_k(x)`                              | Hamiltonian `H(w; r)`                         |
//! |------|---------------------------------------|-----------------------------------------------|
//! | BF   | `1 + Σ_{c∈M(k)} s_c(x)`               | `-Σ r_i w_i - Σ_c s_c(w)`                     |
//! | WBF  | `β|J_k| + Σ_{c∈M(k)} w_c s_c(x)`      | `-β Σ |J_i| r_i w_i - Σ_c w_c s_c(w)`         |
//! | GDBF | `J_k x_k + Σ_{c∈M(k)} s_c(x)`         | `-Σ J_i w_i - Σ_c s_c(w)`                     |
//! | MCMC | `β J_k x_k + γ/2 Σ_{c∈M(k)} s_c(x)`   | `-β Σ J_i w_i + γ Σ_c (1 - s_c(w)) / 2`       |
//!
//! BF and WBF score flips against the readout being decoded: their linear
//! term rewards agreement with the reference `r`, and `Δ_k(x)` is the flip cost
//! at `w = r = x`. BF always uses the weight-3 checks.

use serde::{Deserialize, Serialize};

use crate::code::{ParityCode, SyndromeFamily};
use crate::error::{invalid, Result};
use crate::scalar::Scalar;
use crate::spin::SpinMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InversionKind {
    Bf,
    Wbf,
    Gdbf,
    Mcmc,
}

impl InversionKind {
    pub const ALL: [InversionKind; 4] = [
        InversionKind::Bf,
        InversionKind::Wbf,
        InversionKind::Gdbf,
        InversionKind::Mcmc,
    ];

    fn needs_couplings(self) -> bool {
        !matches!(self, InversionKind::Bf)
    }
}

/// Weights and annealing parameters used by the inversion functions.
#[derive(Clone, Debug, PartialEq)]
pub struct InversionWeights<T> {
    /// Reliability weight of the current decision in the weighted vote.
    pub w0: T,
    /// Per-check reliability weights (WBF and the weighted vote); one per
    /// check of the family in use.
    pub wk: Vec<T>,
    /// Correlation strength β.
    pub beta: T,
    /// Penalty strength γ (MCMC kind).
    pub gamma: T,
    /// Constraint multiplier λ of minimum-weight decoding.
    pub lambda: T,
}

impl<T: Scalar> InversionWeights<T> {
    /// Unit weights for `n_checks` checks, `β = γ = λ = 1`.
    pub fn unit(n_checks: usize) -> Self {
        Self {
            w0: T::one(),
            wk: vec![T::one(); n_checks],
            beta: T::one(),
            gamma: T::one(),
            lambda: T::one(),
        }
    }

    fn validate(&self) -> Result<()> {
        let finite_nonneg = |v: T| v.is_finite() && v >= T::zero();
        if !finite_nonneg(self.w0) || !self.wk.iter().all(|&w| finite_nonneg(w)) {
            return Err(invalid("vote weights must be finite and non-negative"));
        }
        if !finite_nonneg(self.beta) || !finite_nonneg(self.gamma) {
            return Err(invalid("beta and gamma must be finite and non-negative"));
        }
        if !(self.lambda > T::zero() && self.lambda.is_finite()) {
            return Err(invalid("lambda must be positive"));
        }
        Ok(())
    }
}

fn family_for(kind: InversionKind, family: SyndromeFamily) -> SyndromeFamily {
    match kind {
        InversionKind::Bf => SyndromeFamily::Weight3,
        _ => family,
    }
}

struct Prepared<'a, T> {
    x: Vec<i8>,
    couplings: &'a [T],
    family: SyndromeFamily,
}

fn prepare<'a, T: Scalar>(
    kind: InversionKind,
    code: &ParityCode,
    x: &SpinMatrix,
    couplings: Option<&'a [T]>,
    weights: &InversionWeights<T>,
    family: SyndromeFamily,
) -> Result<Prepared<'a, T>> {
    if x.k() != code.k() {
        return Err(invalid("matrix dimension does not match code"));
    }
    weights.validate()?;
    let couplings = match couplings {
        Some(j) if j.len() != code.n_v() => {
            return Err(invalid(format!(
                "expected {} couplings, got {}",
                code.n_v(),
                j.len()
            )))
        }
        Some(j) => j,
        None if kind.needs_couplings() => {
            return Err(invalid(format!(
                "{kind:?} inversion function needs couplings"
            )))
        }
        None => &[],
    };
    let family = family_for(kind, family);
    if kind == InversionKind::Wbf && weights.wk.len() != code.checks(family).len() {
        return Err(invalid(format!(
            "WBF needs one weight per check ({}), got {}",
            code.checks(family).len(),
            weights.wk.len()
        )));
    }
    Ok(Prepared {
        x: x.edge_values(),
        couplings,
        family,
    })
}

#[inline]
fn spin<T: Scalar>(s: i8) -> T {
    if s > 0 {
        T::one()
    } else {
        -T::one()
    }
}

/// `Δ_k(x)` for variable node `k`.
pub fn inversion_function<T: Scalar>(
    kind: InversionKind,
    code: &ParityCode,
    x: &SpinMatrix,
    couplings: Option<&[T]>,
    weights: &InversionWeights<T>,
    family: SyndromeFamily,
    k: usize,
) -> Result<T> {
    if k >= code.n_v() {
        return Err(invalid(format!("variable node {k} out of range")));
    }
    let p = prepare(kind, code, x, couplings, weights, family)?;
    let checks = code.checks(p.family);
    let adjacent = checks.adjacent(k);
    let sum_s: T = adjacent
        .iter()
        .map(|&c| spin::<T>(checks.evaluate(c, &p.x)))
        .sum();
    let xk = spin::<T>(p.x[k]);
    Ok(match kind {
        InversionKind::Bf => T::one() + sum_s,
        InversionKind::Wbf => {
            let weighted: T = adjacent
                .iter()
                .map(|&c| weights.wk[c] * spin::<T>(checks.evaluate(c, &p.x)))
                .sum();
            weights.beta * p.couplings[k].abs() + weighted
        }
        InversionKind::Gdbf => p.couplings[k] * xk + sum_s,
        InversionKind::Mcmc => {
            weights.beta * p.couplings[k] * xk + weights.gamma / T::lit(2.0) * sum_s
        }
    })
}

/// Hamiltonian of `kind` at state `w`, with `reference` the readout that BF
/// and WBF measure agreement against (ignored by GDBF and MCMC).
pub fn hamiltonian<T: Scalar>(
    kind: InversionKind,
    code: &ParityCode,
    w: &SpinMatrix,
    reference: &SpinMatrix,
    couplings: Option<&[T]>,
    weights: &InversionWeights<T>,
    family: SyndromeFamily,
) -> Result<T> {
    w.check_same_dim(reference)?;
    let p = prepare(kind, code, w, couplings, weights, family)?;
    let r = reference.edge_values();
    let checks = code.checks(p.family);
    let s: Vec<T> = (0..checks.len())
        .map(|c| spin::<T>(checks.evaluate(c, &p.x)))
        .collect();
    let sum_s: T = s.iter().copied().sum();
    let wv: Vec<T> = p.x.iter().map(|&v| spin::<T>(v)).collect();
    Ok(match kind {
        InversionKind::Bf => {
            let agree: T = wv.iter().zip(&r).map(|(&wi, &ri)| wi * spin::<T>(ri)).sum();
            -agree - sum_s
        }
        InversionKind::Wbf => {
            let agree: T = wv
                .iter()
                .zip(&r)
                .zip(p.couplings)
                .map(|((&wi, &ri), &j)| j.abs() * spin::<T>(ri) * wi)
                .sum();
            let checks_term: T = s.iter().zip(&weights.wk).map(|(&sc, &wc)| wc * sc).sum();
            -weights.beta * agree - checks_term
        }
        InversionKind::Gdbf => {
            let corr: T = wv.iter().zip(p.couplings).map(|(&wi, &j)| j * wi).sum();
            -corr - sum_s
        }
        InversionKind::Mcmc => {
            let corr: T = wv.iter().zip(p.couplings).map(|(&wi, &j)| j * wi).sum();
            let two = T::lit(2.0);
            let penalty: T = s.iter().map(|&sc| (T::one() - sc) / two).sum();
            -weights.beta * corr + weights.gamma * penalty
        }
    })
}

/// Weighted majority vote for variable node `v` over its weight-3 checks:
/// `w_0 + Σ_{c∈M(v)} w_c s_c(x)`. With unit weights this is the BF vote.
pub fn weighted_vote<T: Scalar>(
    code: &ParityCode,
    x: &SpinMatrix,
    weights: &InversionWeights<T>,
    v: usize,
) -> Result<T> {
    let checks = code.checks(SyndromeFamily::Weight3);
    if weights.wk.len() != checks.len() {
        return Err(invalid("one weight per weight-3 check required"));
    }
    if x.k() != code.k() || v >= code.n_v() {
        return Err(invalid("state or node index does not match code"));
    }
    let xv = x.edge_values();
    Ok(weights.w0
        + checks
            .adjacent(v)
            .iter()
            .map(|&c| weights.wk[c] * spin::<T>(checks.evaluate(c, &xv)))
            .sum::<T>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::LogicalState;
    use crate::decoders::bf::majority_vote;
    use crate::rng::trial_rng;
    use rand::Rng;

    fn random_state(k: usize, rng: &mut impl Rng) -> SpinMatrix {
        let vals: Vec<i8> = (0..crate::spin::n_pairs(k))
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect();
        SpinMatrix::from_edge_values(k, &vals).unwrap()
    }

    #[test]
    fn bf_on_codeword_is_k_minus_one() {
        let code = ParityCode::new(7).unwrap();
        let z = code
            .encode(&LogicalState::new(vec![1, -1, 1, 1, -1, -1, 1]).unwrap())
            .unwrap();
        let w = InversionWeights::<f64>::unit(0);
        for k in 0..code.n_v() {
            let d = inversion_function(
                InversionKind::Bf,
                &code,
                &z,
                None,
                &w,
                SyndromeFamily::Weight3,
                k,
            )
            .unwrap();
            assert_eq!(d, 6.0);
        }
    }

    #[test]
    fn gdbf_with_zero_couplings_is_bf_minus_one() {
        let code = ParityCode::new(6).unwrap();
        let mut rng = trial_rng(5, 0);
        let w = InversionWeights::<f64>::unit(0);
        let zero = vec![0.0; code.n_v()];
        for _ in 0..50 {
            let x = random_state(6, &mut rng);
            let k = rng.random_range(0..code.n_v());
            let f = SyndromeFamily::Weight3;
            let bf = inversion_function(InversionKind::Bf, &code, &x, None, &w, f, k).unwrap();
            let gd =
                inversion_function(InversionKind::Gdbf, &code, &x, Some(&zero), &w, f, k).unwrap();
            assert_eq!(gd, bf - 1.0);
        }
    }

    #[test]
    fn missing_couplings_rejected() {
        let code = ParityCode::new(4).unwrap();
        let w = InversionWeights::<f64>::unit(4);
        let x = SpinMatrix::ones(4);
        for kind in [InversionKind::Wbf, InversionKind::Gdbf, InversionKind::Mcmc] {
            assert!(inversion_function::<f64>(
                kind,
                &code,
                &x,
                None,
                &w,
                SyndromeFamily::Weight3,
                0
            )
            .is_err());
        }
    }

    #[test]
    fn unit_weighted_vote_is_bf_vote() {
        let code = ParityCode::new(8).unwrap();
        let w = InversionWeights::<f64>::unit(code.checks(SyndromeFamily::Weight3).len());
        let mut rng = trial_rng(2, 0);
        let x = random_state(8, &mut rng);
        for (v, &(i, j)) in code.edges().iter().enumerate() {
            let vote = weighted_vote(&code, &x, &w, v).unwrap();
            assert_eq!(
                vote,
                f64::from(majority_vote(&x, i, j) * i32::from(x.get(i, j)))
            );
        }
    }
}
