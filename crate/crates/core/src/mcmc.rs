//! Rejection-free sampling of the penalized parity Hamiltonian
//!
//! ```text
//! H(x) = -β Σ_i J_i x_i + γ Σ_c (1 - s_c(x)) / 2
//! ```
//!
//! and the two decoders built on it: plain MCMC (did any sample hit the
//! target?) and the MCMC-BF hybrid (did BF map any sample onto the target?).
//!
//! Every step flips exactly one pair, chosen with probability proportional to
//! `min(1, e^{-ΔH_k})`, `ΔH_k = 2 β J_k x_k + γ Σ_{c∈M(k)} s_c(x)`. The jump
//! chain of this process is stationary under `e^{-H(x)} W(x)` where `W` is the
//! escape rate returned by [`Chain::step`]; weighting each visit by `1 / W`
//! recovers the Boltzmann distribution.

use std::io::{Read, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::code::{ParityCode, SyndromeFamily};
use crate::decoders::{bf_decode, BfConfig, TiePolicy};
use crate::error::{invalid, Error, Result};
use crate::rng::trial_rng;
use crate::scalar::Scalar;
use crate::spin::{n_pairs, SpinMatrix};

/// Steps between full energy recomputations.
pub const DRIFT_CHECK_INTERVAL: usize = 10_000;
/// Largest tolerated gap between incremental and recomputed energy.
pub const DRIFT_TOLERANCE: f64 = 1e-9;

/// `1200 · C(K,2)`: MCMC-only sample budget.
pub fn default_mcmc_budget(k: usize) -> usize {
    1200 * n_pairs(k)
}

/// `4 · C(K,2)`: hybrid sample budget.
pub fn default_hybrid_budget(k: usize) -> usize {
    4 * n_pairs(k)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlhzParams<T> {
    beta: T,
    gamma: T,
    couplings: Option<Vec<T>>,
    family: SyndromeFamily,
}

impl<T: Scalar> SlhzParams<T> {
    pub fn new(
        beta: T,
        gamma: T,
        couplings: Option<Vec<T>>,
        family: SyndromeFamily,
    ) -> Result<Self> {
        if !(beta.is_finite() && beta >= T::zero()) {
            return Err(invalid(format!("beta must be finite and >= 0, got {beta}")));
        }
        if !(gamma.is_finite() && gamma >= T::zero()) {
            return Err(invalid(format!(
                "gamma must be finite and >= 0, got {gamma}"
            )));
        }
        if let Some(j) = &couplings {
            if j.iter().any(|v| !v.is_finite()) {
                return Err(invalid("couplings must be finite"));
            }
        }
        Ok(Self {
            beta,
            gamma,
            couplings,
            family,
        })
    }

    /// Penalty-only form: no correlation term.
    pub fn penalty_only(gamma: T, family: SyndromeFamily) -> Result<Self> {
        Self::new(T::zero(), gamma, None, family)
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn couplings(&self) -> Option<&[T]> {
        self.couplings.as_deref()
    }

    pub fn family(&self) -> SyndromeFamily {
        self.family
    }

    fn validate_for(&self, code: &ParityCode) -> Result<()> {
        match &self.couplings {
            Some(j) if j.len() != code.n_v() => Err(invalid(format!(
                "expected {} couplings, got {}",
                code.n_v(),
                j.len()
            ))),
            None if self.beta > T::zero() => Err(invalid("beta > 0 requires couplings")),
            _ => Ok(()),
        }
    }

    #[inline]
    fn coupling(&self, v: usize) -> T {
        self.couplings.as_ref().map_or(T::zero(), |j| j[v])
    }
}

/// `H(x)`; the penalty term is zero exactly on codewords.
pub fn energy<T: Scalar>(code: &ParityCode, params: &SlhzParams<T>, x: &SpinMatrix) -> Result<T> {
    if x.k() != code.k() {
        return Err(invalid("matrix dimension does not match code"));
    }
    params.validate_for(code)?;
    let xv = x.edge_values();
    Ok(T::lit(energy_f64(code, params, &xv)))
}

fn energy_f64<T: Scalar>(code: &ParityCode, params: &SlhzParams<T>, xv: &[i8]) -> f64 {
    let corr: f64 = match &params.couplings {
        Some(j) => j
            .iter()
            .zip(xv)
            .map(|(&jv, &s)| jv.to_f64_lossy() * f64::from(s))
            .sum(),
        None => 0.0,
    };
    let checks = code.checks(params.family);
    let violated = (0..checks.len())
        .filter(|&c| checks.evaluate(c, xv) < 0)
        .count();
    -params.beta.to_f64_lossy() * corr + params.gamma.to_f64_lossy() * violated as f64
}

/// Uniformly random symmetric `±1` matrix.
pub fn random_state<R: Rng + ?Sized>(k: usize, rng: &mut R) -> SpinMatrix {
    let vals: Vec<i8> = (0..n_pairs(k))
        .map(|_| if rng.random::<bool>() { -1 } else { 1 })
        .collect();
    SpinMatrix::from_edge_values(k, &vals).expect("length is C(k,2)")
}

/// Result of one rejection-free step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepInfo<T> {
    /// Variable node that was flipped.
    pub flipped: usize,
    /// Escape rate `W(x) = Σ_k min(1, e^{-ΔH_k(x)})` of the state that was left.
    pub escape_rate: T,
}

/// A rejection-free chain with incrementally maintained syndromes, move
/// weights and energy.
#[derive(Clone, Debug)]
pub struct Chain<'a, T> {
    code: &'a ParityCode,
    params: SlhzParams<T>,
    matrix: SpinMatrix,
    x: Vec<i8>,
    s: Vec<i8>,
    /// Per variable node, `Σ_{c∈M(v)} s_c`.
    sums: Vec<i32>,
    violated: usize,
    violated3: usize,
    weights: Vec<T>,
    energy: f64,
    since_check: usize,
}

impl<'a, T: Scalar> Chain<'a, T> {
    pub fn new(code: &'a ParityCode, params: &SlhzParams<T>, initial: &SpinMatrix) -> Result<Self> {
        if initial.k() != code.k() {
            return Err(invalid("initial state does not match code"));
        }
        params.validate_for(code)?;
        let x = initial.edge_values();
        let checks = code.checks(params.family);
        let s: Vec<i8> = (0..checks.len()).map(|c| checks.evaluate(c, &x)).collect();
        let sums = code.syndrome_sums(&x, params.family);
        let violated = s.iter().filter(|&&v| v < 0).count();
        let violated3 = code
            .syndrome_of_vector(&x, SyndromeFamily::Weight3)
            .violated();
        let mut chain = Self {
            code,
            params: params.clone(),
            matrix: initial.clone(),
            energy: energy_f64(code, params, &x),
            x,
            s,
            sums,
            violated,
            violated3,
            weights: Vec::new(),
            since_check: 0,
        };
        chain.weights = (0..code.n_v()).map(|v| chain.weight(v)).collect();
        Ok(chain)
    }

    /// Energy increase of flipping `v`.
    #[inline]
    pub fn flip_cost(&self, v: usize) -> T {
        let xv = if self.x[v] > 0 { T::one() } else { -T::one() };
        T::lit(2.0) * self.params.beta * self.params.coupling(v) * xv
            + self.params.gamma * T::lit(f64::from(self.sums[v]))
    }

    #[inline]
    fn weight(&self, v: usize) -> T {
        (-self.flip_cost(v)).exp().min(T::one())
    }

    pub fn state(&self) -> &SpinMatrix {
        &self.matrix
    }

    pub fn spins(&self) -> &[i8] {
        &self.x
    }

    pub fn energy(&self) -> T {
        T::lit(self.energy)
    }

    /// Violated checks of the sampled family.
    pub fn violated(&self) -> usize {
        self.violated
    }

    pub fn is_codeword(&self) -> bool {
        self.violated3 == 0
    }

    /// Changes `β` and `γ` mid-run (annealing schedules).
    pub fn set_strengths(&mut self, beta: T, gamma: T) -> Result<()> {
        let p = SlhzParams::new(
            beta,
            gamma,
            self.params.couplings.clone(),
            self.params.family,
        )?;
        p.validate_for(self.code)?;
        self.params = p;
        self.energy = energy_f64(self.code, &self.params, &self.x);
        for v in 0..self.x.len() {
            self.weights[v] = self.weight(v);
        }
        Ok(())
    }

    /// Flips one pair chosen proportionally to its Metropolis weight.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<StepInfo<T>> {
        let n = self.x.len();
        if n == 0 {
            return Err(invalid("no physical spins to flip"));
        }
        let total: T = self.weights.iter().copied().sum();
        let chosen = if total > T::min_positive_value() {
            pick(&self.weights, total, rng)
        } else {
            // Every weight underflowed: select with weights rescaled by the
            // cheapest move, which leaves the proportions unchanged.
            let costs: Vec<T> = (0..n).map(|v| self.flip_cost(v)).collect();
            let min = costs.iter().copied().fold(T::infinity(), T::min);
            let scaled: Vec<T> = costs.iter().map(|&c| (min - c).exp()).collect();
            let sum = scaled.iter().copied().sum();
            pick(&scaled, sum, rng)
        };
        self.flip(chosen)?;
        Ok(StepInfo {
            flipped: chosen,
            escape_rate: total,
        })
    }

    fn flip(&mut self, v: usize) -> Result<()> {
        self.energy += self.flip_cost(v).to_f64_lossy();
        self.x[v] = -self.x[v];
        let (i, j) = self.code.edge(v);
        self.matrix.flip(i, j);

        let checks = self.code.checks(self.params.family);
        for &c in checks.adjacent(v) {
            self.s[c] = -self.s[c];
            if self.s[c] < 0 {
                self.violated += 1;
            } else {
                self.violated -= 1;
            }
            let d = 2 * i32::from(self.s[c]);
            for &u in checks.members(c) {
                self.sums[u] += d;
            }
        }
        let checks3 = self.code.checks(SyndromeFamily::Weight3);
        for &c in checks3.adjacent(v) {
            // Post-flip value of the triangle check.
            if checks3.evaluate(c, &self.x) < 0 {
                self.violated3 += 1;
            } else {
                self.violated3 -= 1;
            }
        }
        self.weights[v] = self.weight(v);
        for &c in checks.adjacent(v) {
            for &u in checks.members(c) {
                self.weights[u] = self.weight(u);
            }
        }

        self.since_check += 1;
        if self.since_check >= DRIFT_CHECK_INTERVAL {
            self.since_check = 0;
            let exact = energy_f64(self.code, &self.params, &self.x);
            if (exact - self.energy).abs() > DRIFT_TOLERANCE {
                return Err(Error::Numerical(format!(
                    "incremental energy {} drifted from {exact}",
                    self.energy
                )));
            }
            self.energy = exact;
        }
        Ok(())
    }
}

fn pick<T: Scalar, R: Rng + ?Sized>(weights: &[T], total: T, rng: &mut R) -> usize {
    let mut u = T::lit(rng.random::<f64>()) * total;
    for (v, &w) in weights.iter().enumerate() {
        if u < w {
            return v;
        }
        u = u - w;
    }
    // Rounding left `u` past the end: take the last move with positive weight.
    weights
        .iter()
        .rposition(|&w| w > T::zero())
        .unwrap_or(weights.len() - 1)
}

/// Recorded chain: sample 0 is the initial state and each later sample follows
/// one rejection-free step.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleRun<T> {
    pub samples: Vec<SpinMatrix>,
    pub energies: Vec<T>,
    pub seed: u64,
    pub params: SlhzParams<T>,
    pub budget: usize,
}

#[derive(Serialize, Deserialize)]
struct SampleRecord {
    index: usize,
    energy: f64,
    state: String,
}

impl<T: Scalar> SampleRun<T> {
    /// Writes `index,energy,state` rows, the state as packed hex.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for (index, (x, e)) in self.samples.iter().zip(&self.energies).enumerate() {
            out.serialize(SampleRecord {
                index,
                energy: e.to_f64_lossy(),
                state: x.packed_hex(),
            })?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads rows written by [`SampleRun::write_csv`] back into states and energies.
    pub fn read_csv<R: Read>(k: usize, r: R) -> Result<(Vec<SpinMatrix>, Vec<T>)> {
        let mut rd = csv::Reader::from_reader(r);
        let mut samples = Vec::new();
        let mut energies = Vec::new();
        for (n, rec) in rd.deserialize::<SampleRecord>().enumerate() {
            let rec = rec?;
            if rec.index != n {
                return Err(invalid(format!("sample index {} out of order", rec.index)));
            }
            samples.push(SpinMatrix::from_packed_hex(k, &rec.state)?);
            energies.push(T::lit(rec.energy));
        }
        Ok((samples, energies))
    }
}

fn record_run<T: Scalar>(
    code: &ParityCode,
    params: &SlhzParams<T>,
    initial: &SpinMatrix,
    budget: usize,
    seed: u64,
) -> Result<SampleRun<T>> {
    if budget == 0 {
        return Err(invalid("budget must be at least 1"));
    }
    let mut rng = trial_rng(seed, 1);
    let mut chain = Chain::new(code, params, initial)?;
    let mut samples = Vec::with_capacity(budget);
    let mut energies = Vec::with_capacity(budget);
    samples.push(chain.state().clone());
    energies.push(chain.energy());
    for _ in 1..budget {
        chain.step(&mut rng)?;
        samples.push(chain.state().clone());
        energies.push(chain.energy());
    }
    Ok(SampleRun {
        samples,
        energies,
        seed,
        params: params.clone(),
        budget,
    })
}

/// Initial state of the seeded chain: uniformly random.
pub fn seeded_initial_state(k: usize, seed: u64) -> SpinMatrix {
    random_state(k, &mut trial_rng(seed, 0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct McmcOutcome<T> {
    /// Some sample equals the target.
    pub success: bool,
    /// Some sample is a codeword.
    pub any_codeword: bool,
    /// Index of the first sample equal to the target.
    pub first_hit: Option<usize>,
    pub run: SampleRun<T>,
}

/// Samples `budget` states from a seeded random start and checks them
/// against `target`.
pub fn mcmc_decode<T: Scalar>(
    code: &ParityCode,
    params: &SlhzParams<T>,
    budget: usize,
    target: &SpinMatrix,
    seed: u64,
) -> Result<McmcOutcome<T>> {
    let initial = seeded_initial_state(code.k(), seed);
    mcmc_decode_from(code, params, &initial, budget, target, seed)
}

/// As [`mcmc_decode`], starting from a given state.
pub fn mcmc_decode_from<T: Scalar>(
    code: &ParityCode,
    params: &SlhzParams<T>,
    initial: &SpinMatrix,
    budget: usize,
    target: &SpinMatrix,
    seed: u64,
) -> Result<McmcOutcome<T>> {
    initial.check_same_dim(target)?;
    let run = record_run(code, params, initial, budget, seed)?;
    let first_hit = run.samples.iter().position(|x| x == target);
    let any_codeword = run.samples.iter().any(|x| code.logical_of(x).is_some());
    Ok(McmcOutcome {
        success: first_hit.is_some(),
        any_codeword,
        first_hit,
        run,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HybridOutcome<T> {
    /// BF mapped some sample onto the target.
    pub success: bool,
    /// BF mapped some sample onto a codeword.
    pub any_codeword: bool,
    pub first_hit: Option<usize>,
    pub run: SampleRun<T>,
    /// BF output for each sample.
    pub decoded: Vec<SpinMatrix>,
}

/// Samples as in [`mcmc_decode`], then runs BF on every sample.
pub fn hybrid_decode<T: Scalar>(
    code: &ParityCode,
    params: &SlhzParams<T>,
    budget: usize,
    target: &SpinMatrix,
    seed: u64,
    bf_max_iters: usize,
    tie_policy: TiePolicy,
) -> Result<HybridOutcome<T>> {
    let initial = seeded_initial_state(code.k(), seed);
    initial.check_same_dim(target)?;
    let run = record_run(code, params, &initial, budget, seed)?;
    let cfg = BfConfig {
        max_iters: bf_max_iters,
        tie_policy,
        record_trajectory: false,
    };
    let decoded = run
        .samples
        .iter()
        .map(|x| bf_decode(code, x, &cfg, Some(target)).map(|r| r.final_state))
        .collect::<Result<Vec<_>>>()?;
    let first_hit = decoded.iter().position(|w| w == target);
    let any_codeword = decoded.iter().any(|w| code.logical_of(w).is_some());
    Ok(HybridOutcome {
        success: first_hit.is_some(),
        any_codeword,
        first_hit,
        run,
        decoded,
    })
}

/// First-hit indices of a non-recording search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchOutcome {
    pub mcmc_target: Option<usize>,
    pub mcmc_codeword: Option<usize>,
    /// Hybrid hits; `None` when BF was not requested.
    pub hybrid_target: Option<usize>,
    pub hybrid_codeword: Option<usize>,
    /// Samples drawn before stopping.
    pub samples: usize,
}

/// Runs one chain for up to `budget` samples without storing them, recording
/// the first sample index at which each success condition is met. With
/// `hybrid = Some(cfg)` every sample is also BF-decoded. Stops once every
/// tracked condition has been met.
pub fn search<T: Scalar, R: Rng + ?Sized>(
    code: &ParityCode,
    params: &SlhzParams<T>,
    initial: &SpinMatrix,
    budget: usize,
    target: &SpinMatrix,
    hybrid: Option<&BfConfig>,
    rng: &mut R,
) -> Result<SearchOutcome> {
    if budget == 0 {
        return Err(invalid("budget must be at least 1"));
    }
    initial.check_same_dim(target)?;
    let tv = target.edge_values();
    let mut chain = Chain::new(code, params, initial)?;
    let mut dist = chain
        .spins()
        .iter()
        .zip(&tv)
        .filter(|(a, b)| a != b)
        .count();
    let mut out = SearchOutcome::default();
    for n in 0..budget {
        if n > 0 {
            let info = chain.step(rng)?;
            let v = info.flipped;
            if chain.spins()[v] == tv[v] {
                dist -= 1;
            } else {
                dist += 1;
            }
        }
        out.samples = n + 1;
        let codeword = chain.is_codeword();
        if dist == 0 && out.mcmc_target.is_none() {
            out.mcmc_target = Some(n);
        }
        if codeword && out.mcmc_codeword.is_none() {
            out.mcmc_codeword = Some(n);
        }
        if let Some(cfg) = hybrid {
            if out.hybrid_target.is_none() || out.hybrid_codeword.is_none() {
                let (hit_t, hit_c) = if codeword {
                    (dist == 0, true)
                } else {
                    let r = bf_decode(code, chain.state(), cfg, Some(target))?;
                    let c = code.logical_of(&r.final_state).is_some();
                    (r.final_state == *target, c)
                };
                if hit_t && out.hybrid_target.is_none() {
                    out.hybrid_target = Some(n);
                }
                if hit_c && out.hybrid_codeword.is_none() {
                    out.hybrid_codeword = Some(n);
                }
            }
        }
        let mcmc_done = out.mcmc_target.is_some() && out.mcmc_codeword.is_some();
        let hybrid_done =
            hybrid.is_none() || (out.hybrid_target.is_some() && out.hybrid_codeword.is_some());
        if mcmc_done && hybrid_done {
            break;
        }
    }
    Ok(out)
}

/// Index of the first sample that hits the target (after BF when `hybrid` is
/// given), stopping there.
pub fn search_until_target<T: Scalar, R: Rng + ?Sized>(
    code: &ParityCode,
    params: &SlhzParams<T>,
    initial: &SpinMatrix,
    budget: usize,
    target: &SpinMatrix,
    hybrid: Option<&BfConfig>,
    rng: &mut R,
) -> Result<Option<usize>> {
    if budget == 0 {
        return Err(invalid("budget must be at least 1"));
    }
    initial.check_same_dim(target)?;
    let tv = target.edge_values();
    let mut chain = Chain::new(code, params, initial)?;
    let mut dist = chain
        .spins()
        .iter()
        .zip(&tv)
        .filter(|(a, b)| a != b)
        .count();
    for n in 0..budget {
        if n > 0 {
            let v = chain.step(rng)?.flipped;
            if chain.spins()[v] == tv[v] {
                dist -= 1;
            } else {
                dist += 1;
            }
        }
        let hit = match hybrid {
            _ if dist == 0 => true,
            Some(cfg) if !chain.is_codeword() => {
                bf_decode(code, chain.state(), cfg, Some(target))?.final_state == *target
            }
            _ => false,
        };
        if hit {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Componentwise mean of `x̂ ∘ ẑ` over the run, as a `K × K` matrix.
pub fn average_error_matrix<T: Scalar>(run: &SampleRun<T>, z: &SpinMatrix) -> Result<Vec<Vec<T>>> {
    if run.samples.is_empty() {
        return Err(invalid("empty sample run"));
    }
    let k = z.k();
    let mut acc = vec![vec![0i64; k]; k];
    for x in &run.samples {
        x.check_same_dim(z)?;
        for (i, row) in acc.iter_mut().enumerate() {
            for (j, a) in row.iter_mut().enumerate() {
                *a += i64::from(x.get(i, j) * z.get(i, j));
            }
        }
    }
    let n = T::lit(run.samples.len() as f64);
    Ok(acc
        .into_iter()
        .map(|row| row.into_iter().map(|a| T::lit(a as f64) / n).collect())
        .collect())
}
