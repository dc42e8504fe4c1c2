//! Per-iteration decode snapshots and single-decode CSV rows.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::instance::ProblemInstance;
use crate::channels::{sample_iid_errors, LlrVector};
use crate::code::{ParityCode, SyndromeFamily};
use crate::decoders::{bf_decode, bp_decode, BfConfig, BpConfig, DecodeResult, DecoderKind};
use crate::error::{invalid, Result};
use crate::mcmc::{random_state, Chain, SlhzParams};
use crate::rng::trial_rng;
use crate::scalar::Scalar;
use crate::spin::SpinMatrix;

/// Flip probability assumed when BP decodes a sampled readout.
pub const SAMPLED_READOUT_EPSILON: f64 = 0.25;

/// Where the readout comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum TrajectorySource<T> {
    /// All-one codeword with i.i.d. flips.
    Iid { k: usize, epsilon: f64 },
    /// Last state of a rejection-free chain of `steps` steps on the instance's
    /// Hamiltonian; the target is the instance ground state.
    McmcSample {
        instance: ProblemInstance<T>,
        beta: T,
        gamma: T,
        steps: usize,
        family: SyndromeFamily,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub target: SpinMatrix,
    /// Readout followed by one snapshot per iteration.
    pub snapshots: Vec<SpinMatrix>,
    /// Pairs differing from the target, per snapshot.
    pub errors: Vec<usize>,
    pub success: bool,
}

impl Trajectory {
    /// One block per snapshot: a `# iteration=n errors=m` line then `K` CSV rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (n, (x, e)) in self.snapshots.iter().zip(&self.errors).enumerate() {
            writeln!(w, "# iteration={n} errors={e}")?;
            x.write_csv(&mut w)?;
        }
        Ok(())
    }

    /// Parses blocks written by [`Trajectory::write_csv`] into `(errors, matrix)` pairs.
    pub fn parse_csv(text: &str) -> Result<Vec<(usize, SpinMatrix)>> {
        let mut out = Vec::new();
        let mut header: Option<usize> = None;
        let mut body = String::new();
        let mut flush = |header: Option<usize>, body: &mut String| -> Result<()> {
            if let Some(e) = header {
                out.push((e, SpinMatrix::parse_csv(body)?));
            }
            body.clear();
            Ok(())
        };
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix("# ") {
                flush(header, &mut body)?;
                let errors = rest
                    .split_whitespace()
                    .find_map(|t| t.strip_prefix("errors="))
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| invalid(format!("bad block header {line:?}")))?;
                header = Some(errors);
            } else {
                body.push_str(line);
                body.push('\n');
            }
        }
        flush(header, &mut body)?;
        Ok(out)
    }
}

/// Decodes one readout with snapshots recorded.
pub fn trajectory_demo<T: Scalar>(
    source: &TrajectorySource<T>,
    decoder: DecoderKind,
    iters: usize,
    seed: u64,
) -> Result<Trajectory> {
    let mut rng = trial_rng(seed, 0);
    let (code, x, target) = match source {
        TrajectorySource::Iid { k, epsilon } => {
            let code = ParityCode::new(*k)?;
            let e = sample_iid_errors(&code, *epsilon, &mut rng)?;
            (code, e, SpinMatrix::ones(*k))
        }
        TrajectorySource::McmcSample {
            instance,
            beta,
            gamma,
            steps,
            family,
        } => {
            let code = ParityCode::new(instance.k)?;
            let params = SlhzParams::new(*beta, *gamma, Some(instance.couplings.clone()), *family)?;
            let start = random_state(instance.k, &mut rng);
            let mut chain = Chain::new(&code, &params, &start)?;
            for _ in 0..*steps {
                chain.step(&mut rng)?;
            }
            let x = chain.state().clone();
            let target = instance.target(&code)?;
            (code, x, target)
        }
    };
    let epsilon = match source {
        TrajectorySource::Iid { epsilon, .. } => {
            epsilon.clamp(super::bench::BP_EPSILON_FLOOR, 0.499)
        }
        TrajectorySource::McmcSample { .. } => SAMPLED_READOUT_EPSILON,
    };
    let result = decode_recorded(&code, &x, decoder, iters, epsilon, &target)?;
    let snapshots = result.trajectory.expect("recording requested");
    let errors = snapshots
        .iter()
        .map(|s| s.hamming(&target))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        target,
        snapshots,
        errors,
        success: result.success,
    })
}

fn decode_recorded(
    code: &ParityCode,
    x: &SpinMatrix,
    decoder: DecoderKind,
    iters: usize,
    epsilon: f64,
    target: &SpinMatrix,
) -> Result<DecodeResult> {
    match decoder {
        DecoderKind::Bf => {
            let cfg = BfConfig {
                record_trajectory: true,
                ..BfConfig::with_iters(iters)
            };
            bf_decode(code, x, &cfg, Some(target))
        }
        DecoderKind::Bp => {
            let cfg = BpConfig {
                record_trajectory: true,
                ..BpConfig::with_iters(iters)
            };
            let llr = LlrVector::uniform(x, epsilon)?;
            Ok(bp_decode(code, &llr, &cfg, Some(target))?.result)
        }
        DecoderKind::Mcmc => Err(invalid("trajectories are recorded for BF and BP only")),
    }
}

/// Summary of one decode as a CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodeRow {
    pub trial: u64,
    pub decoder: String,
    pub k: usize,
    pub epsilon: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub iterations: usize,
    pub success: bool,
    pub ties: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::instance::gen_instance;

    #[test]
    fn noiseless_iid_has_single_clean_snapshot() {
        let t = trajectory_demo::<f64>(
            &TrajectorySource::Iid {
                k: 10,
                epsilon: 0.0,
            },
            DecoderKind::Bf,
            5,
            1,
        )
        .unwrap();
        assert_eq!(t.snapshots.len(), 1);
        assert_eq!(t.errors, vec![0]);
        assert!(t.success);
    }

    #[test]
    fn csv_blocks_round_trip() {
        let t = trajectory_demo::<f64>(
            &TrajectorySource::Iid {
                k: 12,
                epsilon: 0.2,
            },
            DecoderKind::Bf,
            5,
            4,
        )
        .unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let parsed = Trajectory::parse_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(parsed.len(), t.snapshots.len());
        for ((e, m), (e0, m0)) in parsed.iter().zip(t.errors.iter().zip(&t.snapshots)) {
            assert_eq!((e, m), (e0, m0));
        }
    }

    #[test]
    fn sampled_source_runs_with_bp() {
        let inst = gen_instance::<f64>(8, 5).unwrap();
        let src = TrajectorySource::McmcSample {
            instance: inst,
            beta: 2.0,
            gamma: 0.1,
            steps: 100,
            family: SyndromeFamily::Weight4,
        };
        let t = trajectory_demo(&src, DecoderKind::Bp, 5, 3).unwrap();
        assert_eq!(t.errors.len(), t.snapshots.len());
    }
}
