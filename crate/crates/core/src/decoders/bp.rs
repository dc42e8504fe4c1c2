//! Flooding sum-product decoding on the weight-3 factor graph.
//!
//! Every check has degree 3, so the tanh rule reduces to
//! `m_{c→a} = 2 atanh( tanh(q_b / 2) · tanh(q_d / 2) )` where `b, d` are the
//! other two members of `c`. One iteration updates all check-to-variable
//! messages and then all variable-to-check messages. Messages are clipped to
//! `±clip`.

use serde::{Deserialize, Serialize};

use super::DecodeResult;
use crate::channels::{sign, LlrVector};
use crate::code::{ParityCode, SyndromeFamily};
use crate::error::{invalid, Result};
use crate::scalar::Scalar;
use crate::spin::SpinMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BpConfig {
    pub max_iters: usize,
    /// Magnitude bound on every message and posterior.
    pub clip: f64,
    pub record_trajectory: bool,
    /// Stop once the hard decision is a codeword (or the target). When
    /// false, exactly `max_iters` iterations run.
    pub early_stop: bool,
}

impl Default for BpConfig {
    fn default() -> Self {
        Self {
            max_iters: 5,
            clip: 30.0,
            record_trajectory: false,
            early_stop: true,
        }
    }
}

impl BpConfig {
    pub fn with_iters(max_iters: usize) -> Self {
        Self {
            max_iters,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BpOutcome<T> {
    pub result: DecodeResult,
    /// Posterior LLRs after the last iteration (channel LLRs if none ran).
    pub posterior: Vec<T>,
    /// `min_v |posterior_v|`, entry 0 for the channel LLRs and one per iteration.
    pub min_reliability: Vec<T>,
}

fn min_abs<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::infinity(), |m, &p| m.min(p.abs()))
}

/// Sum-product decoding from channel LLRs. With `early_stop` it returns as
/// soon as the hard decision is a codeword (or the target, when given).
pub fn bp_decode<T: Scalar>(
    code: &ParityCode,
    channel: &LlrVector<T>,
    config: &BpConfig,
    target: Option<&SpinMatrix>,
) -> Result<BpOutcome<T>> {
    if config.max_iters == 0 {
        return Err(invalid("max_iters must be at least 1"));
    }
    if !(config.clip > 0.0 && config.clip.is_finite()) {
        return Err(invalid("clip must be positive and finite"));
    }
    if channel.k() != code.k() {
        return Err(invalid("LLR vector does not match code"));
    }
    if let Some(t) = target {
        if t.k() != code.k() {
            return Err(invalid("target does not match code"));
        }
    }
    let k = code.k();
    let clip = T::lit(config.clip);
    let clamp = |v: T| v.max(-clip).min(clip);
    let half = T::lit(0.5);
    let two = T::lit(2.0);

    let theta: Vec<T> = channel.values().iter().map(|&t| clamp(t)).collect();
    let checks = code.checks(SyndromeFamily::Weight3);
    let n_c = checks.len();
    // Messages are stored per (check, slot); slot order follows `members(c)`.
    let mut c2v = vec![T::zero(); 3 * n_c];
    let mut v2c = vec![T::zero(); 3 * n_c];
    for c in 0..n_c {
        for (s, &v) in checks.members(c).iter().enumerate() {
            v2c[3 * c + s] = theta[v];
        }
    }
    // Slot of each (variable, adjacent check) pair, aligned with `adjacent(v)`.
    let slots: Vec<Vec<usize>> = (0..code.n_v())
        .map(|v| {
            checks
                .adjacent(v)
                .iter()
                .map(|&c| {
                    let s = checks.members(c).iter().position(|&m| m == v).unwrap();
                    3 * c + s
                })
                .collect()
        })
        .collect();

    let mut posterior = theta.clone();
    let mut min_rel = vec![min_abs(&posterior)];
    let to_state = |post: &[T]| {
        let s: Vec<i8> = post.iter().map(|&p| sign(p)).collect();
        SpinMatrix::from_edge_values(k, &s).expect("length is N_v")
    };
    let done = |x: &SpinMatrix| match target {
        Some(t) => t == x || code.logical_of(x).is_some(),
        None => code.logical_of(x).is_some(),
    };

    let mut state = to_state(&posterior);
    let mut trajectory = config.record_trajectory.then(|| vec![state.clone()]);
    let mut iterations = 0;
    let mut converged = done(&state);

    while !(converged && config.early_stop) && iterations < config.max_iters {
        for c in 0..n_c {
            let t: [T; 3] = [0, 1, 2].map(|s| (v2c[3 * c + s] * half).tanh());
            for s in 0..3 {
                let p = t[(s + 1) % 3] * t[(s + 2) % 3];
                c2v[3 * c + s] = clamp(two * p.atanh());
            }
        }
        for v in 0..code.n_v() {
            let total = theta[v] + slots[v].iter().map(|&e| c2v[e]).sum::<T>();
            posterior[v] = clamp(total);
            for &e in &slots[v] {
                v2c[e] = clamp(total - c2v[e]);
            }
        }
        iterations += 1;
        min_rel.push(min_abs(&posterior));
        state = to_state(&posterior);
        if let Some(tr) = trajectory.as_mut() {
            tr.push(state.clone());
        }
        converged = done(&state);
    }

    let success = match target {
        Some(t) => *t == state,
        None => code.logical_of(&state).is_some(),
    };
    Ok(BpOutcome {
        result: DecodeResult {
            final_state: state,
            converged,
            success,
            iterations,
            ties: 0,
            trajectory,
        },
        posterior,
        min_reliability: min_rel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::LogicalState;
    use crate::decoders::bf::{bf_decode, BfConfig};

    #[test]
    fn noiseless_codeword_returned_at_iteration_zero() {
        let code = ParityCode::new(6).unwrap();
        let z = code
            .encode(&LogicalState::new(vec![1, -1, 1, -1, -1, 1]).unwrap())
            .unwrap();
        let llr = LlrVector::uniform(&z, 1e-6f64).unwrap();
        let out = bp_decode(&code, &llr, &BpConfig::default(), Some(&z)).unwrap();
        assert!(out.result.success);
        assert_eq!(out.result.iterations, 0);
    }

    #[test]
    fn k4_single_error_matches_bf() {
        let code = ParityCode::new(4).unwrap();
        let target = SpinMatrix::ones(4);
        for v in 0..code.n_v() {
            let (i, j) = code.edge(v);
            let mut x = target.clone();
            x.flip(i, j);
            let llr = LlrVector::uniform(&x, 0.25f64).unwrap();
            let bp = bp_decode(&code, &llr, &BpConfig::default(), Some(&target)).unwrap();
            let bf = bf_decode(&code, &x, &BfConfig::default(), Some(&target)).unwrap();
            assert!(bp.result.success, "edge {v}");
            assert!(bp.result.iterations <= 5);
            assert_eq!(bp.result.final_state, bf.final_state);
        }
    }

    #[test]
    fn f32_agrees_with_f64_on_hard_decision() {
        let code = ParityCode::new(7).unwrap();
        let mut x = SpinMatrix::ones(7);
        x.flip(0, 3);
        x.flip(2, 5);
        let a = bp_decode(
            &code,
            &LlrVector::uniform(&x, 0.1f64).unwrap(),
            &BpConfig::default(),
            None,
        )
        .unwrap();
        let b = bp_decode(
            &code,
            &LlrVector::uniform(&x, 0.1f32).unwrap(),
            &BpConfig::default(),
            None,
        )
        .unwrap();
        assert_eq!(a.result.final_state, b.result.final_state);
    }

    #[test]
    fn without_early_stop_all_iterations_run() {
        let code = ParityCode::new(6).unwrap();
        let x = SpinMatrix::ones(6);
        let llr = LlrVector::uniform(&x, 0.1f64).unwrap();
        let cfg = BpConfig {
            early_stop: false,
            ..BpConfig::with_iters(4)
        };
        let out = bp_decode(&code, &llr, &cfg, Some(&x)).unwrap();
        assert_eq!(out.result.iterations, 4);
        assert_eq!(out.min_reliability.len(), 5);
        assert!(out.result.success);
    }

    #[test]
    fn zero_iterations_rejected() {
        let code = ParityCode::new(4).unwrap();
        let llr = LlrVector::uniform(&SpinMatrix::ones(4), 0.1f64).unwrap();
        assert!(bp_decode(&code, &llr, &BpConfig::with_iters(0), None).is_err());
    }
}
