//! I.i.d. flip-noise benchmark.
//!
//! Each trial draws an error pattern `e`, hands the decoder the readout
//! `z ∘ e` (with `z` the all-one codeword unless `random_codeword` is set),
//! and counts a success when the decoder returns `z`. BF ties count as
//! failures.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{BenchmarkReport, ReportRow};
use crate::channels::{sample_iid_errors, LlrVector};
use crate::code::{ParityCode, SyndromeFamily};
use crate::decoders::{bf_decode, bp_decode, BfConfig, BpConfig, DecoderKind};
use crate::error::{invalid, Result};
use crate::mcmc::{search, SlhzParams};
use crate::rng::{derive_seed, trial_rng};
use crate::spin::{n_pairs, SpinMatrix};

/// Smallest flip probability used to initialize BP LLRs.
pub const BP_EPSILON_FLOOR: f64 = 1e-6;

const CODEWORD_STREAM: u64 = 0xc0de;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IidBenchConfig {
    pub decoder: DecoderKind,
    pub ks: Vec<usize>,
    pub epsilons: Vec<f64>,
    pub trials: usize,
    /// BF/BP iteration cap.
    pub iters: usize,
    /// MCMC sample budget; `C(K,2)` when absent.
    pub mcmc_budget: Option<usize>,
    /// Penalty strength for the MCMC decoder.
    pub mcmc_gamma: f64,
    pub mcmc_family: SyndromeFamily,
    /// Transmit a random codeword per trial instead of the all-one codeword.
    pub random_codeword: bool,
    pub seed: u64,
}

impl IidBenchConfig {
    pub fn new(
        decoder: DecoderKind,
        ks: Vec<usize>,
        epsilons: Vec<f64>,
        trials: usize,
        seed: u64,
    ) -> Self {
        Self {
            decoder,
            ks,
            epsilons,
            trials,
            iters: 5,
            mcmc_budget: None,
            mcmc_gamma: 1.0,
            mcmc_family: SyndromeFamily::Weight3,
            random_codeword: false,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.ks.iter().any(|&k| k < 2) {
            return Err(invalid("every K must be at least 2"));
        }
        let upper = if self.decoder == DecoderKind::Bp {
            0.5
        } else {
            1.0
        };
        if self.epsilons.iter().any(|&e| !(0.0..upper).contains(&e)) {
            return Err(invalid(format!(
                "flip probabilities must lie in [0, {upper})"
            )));
        }
        if self.iters == 0 {
            return Err(invalid("iters must be at least 1"));
        }
        if self.mcmc_budget == Some(0) {
            return Err(invalid("MCMC budget must be at least 1"));
        }
        if !(self.mcmc_gamma.is_finite() && self.mcmc_gamma >= 0.0) {
            return Err(invalid("gamma must be finite and >= 0"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct TrialOutcome {
    success: bool,
    tie: bool,
    iterations: usize,
}

fn run_trial(
    code: &ParityCode,
    cfg: &IidBenchConfig,
    epsilon: f64,
    seed: u64,
    trial: u64,
) -> Result<TrialOutcome> {
    let k = code.k();
    let mut rng = trial_rng(seed, trial);
    let e = sample_iid_errors(code, epsilon, &mut rng)?;
    let z = if cfg.random_codeword {
        // Separate stream so the error pattern and chain do not depend on z.
        let mut zrng = trial_rng(derive_seed(seed, &[CODEWORD_STREAM]), trial);
        let spins: Vec<i8> = (0..k)
            .map(|_| if zrng.random::<bool>() { -1 } else { 1 })
            .collect();
        code.encode(&crate::code::LogicalState::new(spins)?)?
    } else {
        SpinMatrix::ones(k)
    };
    let x = z.hadamard(&e)?;
    Ok(match cfg.decoder {
        DecoderKind::Bf => {
            let r = bf_decode(code, &x, &BfConfig::with_iters(cfg.iters), Some(&z))?;
            TrialOutcome {
                success: r.success_without_ties(),
                tie: r.ties > 0,
                iterations: r.iterations,
            }
        }
        DecoderKind::Bp => {
            let llr = LlrVector::uniform(&x, epsilon.max(BP_EPSILON_FLOOR))?;
            let r = bp_decode(code, &llr, &BpConfig::with_iters(cfg.iters), Some(&z))?.result;
            TrialOutcome {
                success: r.success,
                tie: false,
                iterations: r.iterations,
            }
        }
        DecoderKind::Mcmc => {
            let params = SlhzParams::penalty_only(cfg.mcmc_gamma, cfg.mcmc_family)?;
            let budget = cfg.mcmc_budget.unwrap_or(n_pairs(k).max(1));
            let out = search(code, &params, &x, budget, &z, None, &mut rng)?;
            TrialOutcome {
                success: out.mcmc_target.is_some(),
                tie: false,
                iterations: out.mcmc_target.map_or(budget, |n| n + 1),
            }
        }
    })
}

/// Failure statistics per `(K, ε)`; rows follow `ks × epsilons` order.
pub fn bench_iid(cfg: &IidBenchConfig) -> Result<BenchmarkReport> {
    cfg.validate()?;
    let mut rows = Vec::new();
    if cfg.trials > 0 {
        for &k in &cfg.ks {
            let code = ParityCode::new(k)?;
            for &epsilon in &cfg.epsilons {
                let seed = derive_seed(cfg.seed, &[k as u64, epsilon.to_bits()]);
                let outcomes = (0..cfg.trials as u64)
                    .into_par_iter()
                    .map(|t| run_trial(&code, cfg, epsilon, seed, t))
                    .collect::<Result<Vec<_>>>()?;
                let successes = outcomes.iter().filter(|o| o.success).count() as u64;
                let mut row =
                    ReportRow::new(&cfg.decoder.to_string(), k, cfg.trials as u64, successes);
                row.epsilon = Some(epsilon);
                row.ties = outcomes.iter().filter(|o| o.tie).count() as u64;
                row.mean_iterations = outcomes.iter().map(|o| o.iterations as u64).sum::<u64>()
                    as f64
                    / cfg.trials as f64;
                rows.push(row);
            }
        }
    }
    Ok(BenchmarkReport {
        config: serde_json::to_value(cfg)?,
        seed: cfg.seed,
        rows,
    })
}
