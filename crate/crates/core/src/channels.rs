//! Readout noise models.
//!
//! Two channels are provided: i.i.d. symmetric spin flips applied directly to
//! a [`SpinMatrix`], and the AWGN observation model `y = |v| z + n` with its
//! log-likelihood ratios. The crosstalk helpers at the bottom give the vote
//! weights of the weighted majority rule in terms of error probabilities.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::code::ParityCode;
use crate::error::{invalid, Result};
use crate::scalar::Scalar;
use crate::spin::{pairs, SpinMatrix};

/// Error pattern with each pair independently `-1` with probability `epsilon`.
pub fn sample_iid_errors<R: Rng + ?Sized>(
    code: &ParityCode,
    epsilon: f64,
    rng: &mut R,
) -> Result<SpinMatrix> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(invalid(format!(
            "flip probability {epsilon} outside [0, 1)"
        )));
    }
    let k = code.k();
    let mut e = SpinMatrix::ones(k);
    for (i, j) in pairs(k) {
        if rng.random::<f64>() < epsilon {
            e.set(i, j, -1);
        }
    }
    Ok(e)
}

/// AWGN channel parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AwgnParams<T> {
    amplitude: T,
    sigma: T,
}

impl<T: Scalar> AwgnParams<T> {
    pub fn new(amplitude: T, sigma: T) -> Result<Self> {
        if !(amplitude > T::zero() && amplitude.is_finite()) {
            return Err(invalid(format!(
                "amplitude must be positive, got {amplitude}"
            )));
        }
        if !(sigma > T::zero() && sigma.is_finite()) {
            return Err(invalid(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self { amplitude, sigma })
    }

    pub fn amplitude(&self) -> T {
        self.amplitude
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    /// Channel reliability factor `β = 2|v| / σ²`.
    pub fn beta(&self) -> T {
        T::lit(2.0) * self.amplitude / (self.sigma * self.sigma)
    }
}

/// Real-valued channel output, one value per pair (lexicographic order).
#[derive(Clone, Debug, PartialEq)]
pub struct Observation<T> {
    k: usize,
    values: Vec<T>,
}

impl<T: Scalar> Observation<T> {
    pub fn new(k: usize, values: Vec<T>) -> Result<Self> {
        if values.len() != crate::spin::n_pairs(k) {
            return Err(invalid(format!(
                "observation has {} values, expected {}",
                values.len(),
                crate::spin::n_pairs(k)
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("observation contains non-finite values"));
        }
        Ok(Self { k, values })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Symmetric-matrix view; the diagonal is reported as zero.
    pub fn get(&self, i: usize, j: usize) -> T {
        if i == j {
            T::zero()
        } else {
            self.values[crate::spin::pair_index(self.k, i, j)]
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            k: self.k,
            values: self.values.iter().map(|&v| -v).collect(),
        }
    }
}

/// `y_ij = |v| z_ij + n_ij` with one Gaussian draw per pair.
pub fn awgn_observe<T: Scalar, R: Rng + ?Sized>(
    z: &SpinMatrix,
    params: &AwgnParams<T>,
    rng: &mut R,
) -> Observation<T> {
    let values = pairs(z.k())
        .map(|(i, j)| {
            let n: f64 = StandardNormal.sample(rng);
            params.amplitude * T::lit(f64::from(z.get(i, j))) + params.sigma * T::lit(n)
        })
        .collect();
    Observation { k: z.k(), values }
}

/// Channel LLRs `θ_i = β y_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct LlrVector<T> {
    k: usize,
    theta: Vec<T>,
}

impl<T: Scalar> LlrVector<T> {
    pub fn new(k: usize, theta: Vec<T>) -> Result<Self> {
        if theta.len() != crate::spin::n_pairs(k) {
            return Err(invalid("LLR vector length does not match k"));
        }
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(invalid("LLR vector contains non-finite values"));
        }
        Ok(Self { k, theta })
    }

    /// LLRs of a hard readout under uniform flip probability `epsilon`:
    /// `log((1 - ε) / ε) · x_i`.
    pub fn uniform(x: &SpinMatrix, epsilon: T) -> Result<Self> {
        if !(epsilon > T::zero() && epsilon < T::lit(0.5)) {
            return Err(invalid(format!("epsilon {epsilon} outside (0, 1/2)")));
        }
        let w = reliability_weight(epsilon);
        Ok(Self {
            k: x.k(),
            theta: x
                .edge_values()
                .into_iter()
                .map(|s| w * T::lit(f64::from(s)))
                .collect(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn values(&self) -> &[T] {
        &self.theta
    }

    /// Soft information `|θ_i|`.
    pub fn reliabilities(&self) -> Vec<T> {
        self.theta.iter().map(|t| t.abs()).collect()
    }

    /// Probability that each hard decision is wrong, `γ_i = 1 / (1 + e^{|θ_i|})`.
    pub fn error_probabilities(&self) -> Vec<T> {
        self.theta
            .iter()
            .map(|&t| hard_decision_error_probability(t))
            .collect()
    }

    pub fn hard_decision(&self) -> SpinMatrix {
        let spins: Vec<i8> = self.theta.iter().map(|&t| sign(t)).collect();
        SpinMatrix::from_edge_values(self.k, &spins).expect("length checked at construction")
    }
}

pub fn llr<T: Scalar>(y: &Observation<T>, params: &AwgnParams<T>) -> LlrVector<T> {
    let beta = params.beta();
    LlrVector {
        k: y.k,
        theta: y.values.iter().map(|&v| beta * v).collect(),
    }
}

/// Componentwise sign of the observation; `sign(0) = +1`.
pub fn hard_decide<T: Scalar>(y: &Observation<T>) -> SpinMatrix {
    let spins: Vec<i8> = y.values.iter().map(|&v| sign(v)).collect();
    SpinMatrix::from_edge_values(y.k, &spins).expect("observation length is C(k,2)")
}

/// `+1` for non-negative values, `-1` otherwise.
#[inline]
pub fn sign<T: Scalar>(v: T) -> i8 {
    if v < T::zero() {
        -1
    } else {
        1
    }
}

/// `1 / (1 + e^{|θ|})`.
pub fn hard_decision_error_probability<T: Scalar>(theta: T) -> T {
    T::one() / (T::one() + theta.abs().exp())
}

/// Log-odds weight `log((1 - p) / p)` of a decision that is wrong with
/// probability `p`. Gives `w_0` from `γ_ij` and `w_k` from `p_k`.
pub fn reliability_weight<T: Scalar>(p: T) -> T {
    ((T::one() - p) / p).ln()
}

/// Probability that the check `s_ijk` votes against `e_ij`: an odd number of
/// errors among the two other pairs of the triangle.
pub fn check_error_probability<T: Scalar>(gamma_jk: T, gamma_ik: T) -> T {
    let two = T::lit(2.0);
    (T::one() - (T::one() - two * gamma_jk) * (T::one() - two * gamma_ik)) / two
}

/// Vote weights `(w_0, w_k)` when every pair has the same error probability
/// `γ_0`, `0 < γ_0 < 1/2`.
pub fn uniform_vote_weights<T: Scalar>(gamma0: T) -> Result<(T, T)> {
    if !(gamma0 > T::zero() && gamma0 < T::lit(0.5)) {
        return Err(invalid(format!(
            "error probability {gamma0} outside (0, 1/2)"
        )));
    }
    let pk = check_error_probability(gamma0, gamma0);
    Ok((reliability_weight(gamma0), reliability_weight(pk)))
}
