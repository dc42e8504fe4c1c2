//! Parallel bit-flip decoding.
//!
//! One step replaces every pair spin by the majority of itself and the
//! `K - 2` two-paths through the other logical spins:
//!
//! ```text
//! x'_ij = sign( x_ij + Σ_{l ≠ i,j} x_il x_lj ) = sign[ x̂ (x̂ - I) ]_ij
//! ```
//!
//! which is the same as flipping `x_ij` when `1 + Σ_l s_ijl < 0`. All pairs
//! update simultaneously from the previous state.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::DecodeResult;
use crate::code::ParityCode;
use crate::error::{invalid, Result};
use crate::rng::{trial_rng, TrialRng};
use crate::spin::SpinMatrix;

/// What to do when a majority vote sums to zero (only possible for odd `K`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TiePolicy {
    /// Keep the current spin and count the tie.
    #[default]
    Keep,
    /// Flip with probability 1/2, drawing from a stream seeded by `seed`.
    CoinToss { seed: u64 },
}

/// Tie resolution state carried across the steps of one decode.
#[derive(Clone, Debug)]
pub struct TieBreaker {
    rng: Option<TrialRng>,
}

impl TieBreaker {
    pub fn new(policy: TiePolicy) -> Self {
        Self {
            rng: match policy {
                TiePolicy::Keep => None,
                TiePolicy::CoinToss { seed } => Some(trial_rng(seed, 0)),
            },
        }
    }

    #[inline]
    fn flip_on_tie(&mut self) -> bool {
        match &mut self.rng {
            None => false,
            Some(rng) => rng.random::<bool>(),
        }
    }
}

/// Result of one parallel step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BfStep {
    pub state: SpinMatrix,
    pub flips: usize,
    pub ties: usize,
}

#[inline]
fn row_dot(a: &[i8], b: &[i8]) -> i32 {
    a.iter().zip(b).map(|(&p, &q)| i32::from(p * q)).sum()
}

/// Majority vote `x_ij + Σ_{l ≠ i,j} x_il x_lj` for the pair `{i, j}`.
#[inline]
pub fn majority_vote(x: &SpinMatrix, i: usize, j: usize) -> i32 {
    // The full row product counts l = i and l = j, each contributing x_ij.
    row_dot(x.row(i), x.row(j)) - i32::from(x.get(i, j))
}

pub fn bf_step(code: &ParityCode, x: &SpinMatrix, ties: &mut TieBreaker) -> Result<BfStep> {
    if x.k() != code.k() {
        return Err(invalid(format!(
            "matrix dimension {} does not match code with K = {}",
            x.k(),
            code.k()
        )));
    }
    let mut next = x.clone();
    let mut flips = 0;
    let mut n_ties = 0;
    for &(i, j) in code.edges() {
        let vote = majority_vote(x, i, j);
        let cur = x.get(i, j);
        let new = match vote.signum() {
            1 => 1,
            -1 => -1,
            _ => {
                n_ties += 1;
                if ties.flip_on_tie() {
                    -cur
                } else {
                    cur
                }
            }
        };
        if new != cur {
            next.set(i, j, new);
            flips += 1;
        }
    }
    Ok(BfStep {
        state: next,
        flips,
        ties: n_ties,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BfConfig {
    pub max_iters: usize,
    pub tie_policy: TiePolicy,
    pub record_trajectory: bool,
}

impl Default for BfConfig {
    fn default() -> Self {
        Self {
            max_iters: 5,
            tie_policy: TiePolicy::Keep,
            record_trajectory: false,
        }
    }
}

impl BfConfig {
    pub fn with_iters(max_iters: usize) -> Self {
        Self {
            max_iters,
            ..Self::default()
        }
    }
}

/// Iterates [`bf_step`] until a codeword or another fixed point is reached,
/// the target is hit, or `max_iters` steps have been applied.
///
/// `iterations` counts the steps that changed the state.
pub fn bf_decode(
    code: &ParityCode,
    x: &SpinMatrix,
    config: &BfConfig,
    target: Option<&SpinMatrix>,
) -> Result<DecodeResult> {
    if config.max_iters == 0 {
        return Err(invalid("max_iters must be at least 1"));
    }
    if let Some(t) = target {
        x.check_same_dim(t)?;
    }
    if x.k() != code.k() {
        return Err(invalid("matrix dimension does not match code"));
    }
    let mut ties = TieBreaker::new(config.tie_policy);
    let mut cur = x.clone();
    let mut trajectory = config.record_trajectory.then(|| vec![cur.clone()]);
    let mut iterations = 0;
    let mut n_ties = 0;
    let mut converged = false;

    loop {
        // Codewords satisfy every check, so each vote is +(K - 1) and nothing moves.
        if target.is_some_and(|t| *t == cur) || code.logical_of(&cur).is_some() {
            converged = true;
            break;
        }
        if iterations == config.max_iters {
            break;
        }
        let step = bf_step(code, &cur, &mut ties)?;
        n_ties += step.ties;
        if step.flips == 0 {
            converged = step.ties == 0 || config.tie_policy == TiePolicy::Keep;
            break;
        }
        cur = step.state;
        iterations += 1;
        if let Some(t) = trajectory.as_mut() {
            t.push(cur.clone());
        }
    }

    let success = match target {
        Some(t) => *t == cur,
        None => code.logical_of(&cur).is_some(),
    };
    Ok(DecodeResult {
        final_state: cur,
        converged,
        success,
        iterations,
        ties: n_ties,
        trajectory,
    })
}
