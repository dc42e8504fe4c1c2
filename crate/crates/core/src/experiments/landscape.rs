//! `(β, γ)` success landscapes and the MCMC-vs-hybrid efficiency ratio.
//!
//! Trial seeds depend only on `(cell, instance, trial)`, never on the
//! strategy, so an MCMC run and a hybrid run with the same seed walk the same
//! chain. Both strategies are evaluated from one chain per trial.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::instance::ProblemInstance;
use super::report::{BenchmarkReport, ReportRow};
use crate::code::{ParityCode, SyndromeFamily};
use crate::decoders::BfConfig;
use crate::error::{invalid, Result};
use crate::mcmc::{random_state, search, SearchOutcome, SlhzParams};
use crate::rng::{derive_seed, trial_rng};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Mcmc,
    Hybrid,
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Strategy::Mcmc => "mcmc",
            Strategy::Hybrid => "hybrid",
        })
    }
}

impl std::str::FromStr for Strategy {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mcmc" => Ok(Strategy::Mcmc),
            "hybrid" => Ok(Strategy::Hybrid),
            _ => Err(invalid(format!("unknown strategy {s:?}"))),
        }
    }
}

/// `0, 0.25, …, 3.0`.
pub fn default_betas() -> Vec<f64> {
    (0..=12).map(|i| f64::from(i) / 4.0).collect()
}

/// `0, 0.1, …, 1.5`.
pub fn default_gammas() -> Vec<f64> {
    (0..=15).map(|i| f64::from(i) / 10.0).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandscapeConfig {
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
    /// Samples per trial.
    pub budget: usize,
    /// Trials per cell and instance.
    pub trials_per_cell: usize,
    pub family: SyndromeFamily,
    pub bf_iters: usize,
    pub seed: u64,
}

impl LandscapeConfig {
    /// Default grids, 100 trials, weight-4 penalty, 5 BF iterations.
    pub fn new(budget: usize, seed: u64) -> Self {
        Self {
            betas: default_betas(),
            gammas: default_gammas(),
            budget,
            trials_per_cell: 100,
            family: SyndromeFamily::Weight4,
            bf_iters: 5,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.betas.is_empty() || self.gammas.is_empty() {
            return Err(invalid("beta and gamma grids must be nonempty"));
        }
        if self.budget == 0 || self.bf_iters == 0 {
            return Err(invalid("budget and bf_iters must be at least 1"));
        }
        Ok(())
    }
}

/// Aggregate over instances and trials of one `(β, γ)` cell.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub beta: f64,
    pub gamma: f64,
    pub trials: u64,
    pub mcmc_target: u64,
    pub mcmc_codeword: u64,
    pub hybrid_target: u64,
    pub hybrid_codeword: u64,
    /// Σ samples until the MCMC target hit (budget on failure).
    pub mcmc_samples: u64,
    pub hybrid_samples: u64,
    /// Target successes per instance, in instance order.
    pub mcmc_target_by_instance: Vec<u64>,
    pub hybrid_target_by_instance: Vec<u64>,
}

impl CellResult {
    pub fn target_successes(&self, strategy: Strategy) -> u64 {
        match strategy {
            Strategy::Mcmc => self.mcmc_target,
            Strategy::Hybrid => self.hybrid_target,
        }
    }

    pub fn target_rate(&self, strategy: Strategy) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.target_successes(strategy) as f64 / self.trials as f64
        }
    }
}

fn consumed(hit: Option<usize>, budget: usize) -> u64 {
    hit.map_or(budget, |n| n + 1) as u64
}

/// Seed of one trial; independent of the strategy.
pub fn trial_seed(master: u64, beta: f64, gamma: f64, instance: u64) -> u64 {
    derive_seed(master, &[beta.to_bits(), gamma.to_bits(), instance])
}

struct Prepared<T> {
    code: ParityCode,
    couplings: Vec<T>,
    target: crate::spin::SpinMatrix,
    seed: u64,
}

fn prepare<T: Scalar>(instances: &[ProblemInstance<T>]) -> Result<Vec<Prepared<T>>> {
    instances
        .iter()
        .map(|inst| {
            let code = ParityCode::new(inst.k)?;
            let target = inst.target(&code)?;
            Ok(Prepared {
                code,
                couplings: inst.couplings.clone(),
                target,
                seed: inst.seed,
            })
        })
        .collect()
}

fn run_one<T: Scalar>(
    p: &Prepared<T>,
    params: &SlhzParams<T>,
    budget: usize,
    bf: &BfConfig,
    seed: u64,
    trial: u64,
) -> Result<SearchOutcome> {
    let initial = random_state(p.code.k(), &mut trial_rng(seed, 2 * trial));
    let mut rng = trial_rng(seed, 2 * trial + 1);
    search(
        &p.code,
        params,
        &initial,
        budget,
        &p.target,
        Some(bf),
        &mut rng,
    )
}

/// Runs every `(β, γ, instance, trial)` once and scores both strategies
/// from the same chain. Cells are returned in `betas × gammas` order.
pub fn landscape_cells<T: Scalar>(
    instances: &[ProblemInstance<T>],
    config: &LandscapeConfig,
) -> Result<Vec<CellResult>> {
    config.validate()?;
    let prepared = prepare(instances)?;
    let bf = BfConfig::with_iters(config.bf_iters);
    let cells: Vec<(f64, f64)> = config
        .betas
        .iter()
        .flat_map(|&b| config.gammas.iter().map(move |&g| (b, g)))
        .collect();
    let n_inst = prepared.len();
    let tpc = config.trials_per_cell;
    cells
        .par_iter()
        .map(|&(beta, gamma)| {
            let outcomes = (0..n_inst * tpc)
                .into_par_iter()
                .map(|n| {
                    let (i, t) = (n / tpc.max(1), n % tpc.max(1));
                    let p = &prepared[i];
                    let seed = trial_seed(config.seed, beta, gamma, p.seed);
                    let params = SlhzParams::new(
                        T::lit(beta),
                        T::lit(gamma),
                        Some(p.couplings.clone()),
                        config.family,
                    )?;
                    run_one(p, &params, config.budget, &bf, seed, t as u64).map(|o| (i, o))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut cell = CellResult {
                beta,
                gamma,
                mcmc_target_by_instance: vec![0; n_inst],
                hybrid_target_by_instance: vec![0; n_inst],
                ..CellResult::default()
            };
            for (i, o) in outcomes {
                cell.trials += 1;
                cell.mcmc_target += o.mcmc_target.is_some() as u64;
                cell.mcmc_codeword += o.mcmc_codeword.is_some() as u64;
                cell.hybrid_target += o.hybrid_target.is_some() as u64;
                cell.hybrid_codeword += o.hybrid_codeword.is_some() as u64;
                cell.mcmc_target_by_instance[i] += o.mcmc_target.is_some() as u64;
                cell.hybrid_target_by_instance[i] += o.hybrid_target.is_some() as u64;
                cell.mcmc_samples += consumed(o.mcmc_target, config.budget);
                cell.hybrid_samples += consumed(o.hybrid_target, config.budget);
            }
            Ok(cell)
        })
        .collect()
}

/// Converts cells into report rows for one strategy.
pub fn cells_to_report(
    cells: &[CellResult],
    k: usize,
    strategy: Strategy,
    config: &LandscapeConfig,
) -> Result<BenchmarkReport> {
    let rows = cells
        .iter()
        .map(|c| {
            let (target, codeword, samples) = match strategy {
                Strategy::Mcmc => (c.mcmc_target, c.mcmc_codeword, c.mcmc_samples),
                Strategy::Hybrid => (c.hybrid_target, c.hybrid_codeword, c.hybrid_samples),
            };
            let mut row = ReportRow::new(&strategy.to_string(), k, c.trials, target);
            row.beta = Some(c.beta);
            row.gamma = Some(c.gamma);
            row.any_codeword = Some(codeword);
            row.mean_iterations = if c.trials == 0 {
                0.0
            } else {
                samples as f64 / c.trials as f64
            };
            row
        })
        .collect();
    Ok(BenchmarkReport {
        config: serde_json::json!({ "strategy": strategy, "landscape": config }),
        seed: config.seed,
        rows,
    })
}

/// Landscape of target and any-codeword success for one strategy.
pub fn landscape<T: Scalar>(
    instances: &[ProblemInstance<T>],
    config: &LandscapeConfig,
    strategy: Strategy,
) -> Result<BenchmarkReport> {
    let k = instances.first().map_or(0, |i| i.k);
    if instances.iter().any(|i| i.k != k) {
        return Err(invalid("all instances must share K"));
    }
    let cells = landscape_cells(instances, config)?;
    cells_to_report(&cells, k, strategy, config)
}

/// One arm of an efficiency comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arm {
    pub strategy: Strategy,
    pub beta: f64,
    pub gamma: f64,
    pub budget: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmEstimate {
    pub trials: u64,
    pub successes: u64,
    /// Σ samples consumed: first-hit index + 1, or the budget on failure.
    pub samples: u64,
}

impl ArmEstimate {
    /// Expected samples per success under restarts; `None` without successes.
    pub fn samples_per_success(&self) -> Option<f64> {
        (self.successes > 0).then(|| self.samples as f64 / self.successes as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyEstimate {
    pub a: ArmEstimate,
    pub b: ArmEstimate,
    /// `samples per success (a) / samples per success (b)`; `None` when
    /// either arm never succeeded.
    pub ratio: Option<f64>,
}

fn estimate_arm<T: Scalar>(
    p: &Prepared<T>,
    arm: &Arm,
    family: SyndromeFamily,
    bf_iters: usize,
    trials: usize,
    seed: u64,
) -> Result<ArmEstimate> {
    let bf = BfConfig::with_iters(bf_iters);
    let hybrid = (arm.strategy == Strategy::Hybrid).then_some(&bf);
    let outs = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let params = SlhzParams::new(
                T::lit(arm.beta),
                T::lit(arm.gamma),
                Some(p.couplings.clone()),
                family,
            )?;
            let initial = random_state(p.code.k(), &mut trial_rng(seed, 2 * t));
            let mut rng = trial_rng(seed, 2 * t + 1);
            let o = crate::mcmc::search_until_target(
                &p.code, &params, &initial, arm.budget, &p.target, hybrid, &mut rng,
            )?;
            Ok(o)
        })
        .collect::<Result<Vec<Option<usize>>>>()?;
    Ok(ArmEstimate {
        trials: trials as u64,
        successes: outs.iter().filter(|o| o.is_some()).count() as u64,
        samples: outs.iter().map(|&o| consumed(o, arm.budget)).sum(),
    })
}

/// Ratio of samples needed per target success, arm `a` over arm `b`, from
/// `trials` independent restarts per arm. Both arms use the same trial seeds.
pub fn efficiency_ratio<T: Scalar>(
    instance: &ProblemInstance<T>,
    a: &Arm,
    b: &Arm,
    family: SyndromeFamily,
    bf_iters: usize,
    trials: usize,
    seed: u64,
) -> Result<EfficiencyEstimate> {
    if a.budget == 0 || b.budget == 0 || bf_iters == 0 {
        return Err(invalid("budgets and bf_iters must be at least 1"));
    }
    let prepared = prepare(std::slice::from_ref(instance))?;
    let p = &prepared[0];
    let s = derive_seed(seed, &[instance.seed]);
    let ea = estimate_arm(p, a, family, bf_iters, trials, s)?;
    let eb = estimate_arm(p, b, family, bf_iters, trials, s)?;
    let ratio = match (ea.samples_per_success(), eb.samples_per_success()) {
        (Some(x), Some(y)) => Some(x / y),
        _ => None,
    };
    Ok(EfficiencyEstimate {
        a: ea,
        b: eb,
        ratio,
    })
}
