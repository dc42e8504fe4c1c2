//! Post-readout decoders.
//!
//! * [`bf`]: the parallel majority-vote bit-flip decoder on weight-3 checks.
//! * [`inversion`]: inversion functions and matching Hamiltonians for the
//!   BF / WBF / GDBF / MCMC family.
//! * [`bp`]: flooding sum-product on the weight-3 factor graph.
//! * [`mwd`]: exhaustive minimum-weight decoding for small codes.

pub mod bf;
pub mod bp;
pub mod inversion;
pub mod mwd;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spin::SpinMatrix;

pub use bf::{bf_decode, bf_step, BfConfig, BfStep, TieBreaker, TiePolicy};
pub use bp::{bp_decode, BpConfig, BpOutcome};
pub use inversion::{
    hamiltonian, inversion_function, weighted_vote, InversionKind, InversionWeights,
};
pub use mwd::{mwd_bruteforce, MwdResult, MWD_MAX_K};

/// Outcome of a deterministic decode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeResult {
    pub final_state: SpinMatrix,
    /// A further iteration would leave `final_state` unchanged.
    pub converged: bool,
    /// `final_state` equals the target when one was given, otherwise it is a codeword.
    pub success: bool,
    pub iterations: usize,
    /// Majority votes that came out exactly zero (BF only).
    pub ties: usize,
    /// Snapshots starting with the input, one per applied iteration.
    pub trajectory: Option<Vec<SpinMatrix>>,
}

impl DecodeResult {
    /// Success with any tie counted as failure.
    pub fn success_without_ties(&self) -> bool {
        self.success && self.ties == 0
    }
}

/// Decoder families exposed by the benchmark drivers and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    Bf,
    Bp,
    Mcmc,
}

impl std::fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DecoderKind::Bf => "bf",
            DecoderKind::Bp => "bp",
            DecoderKind::Mcmc => "mcmc",
        })
    }
}

impl std::str::FromStr for DecoderKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bf" => Ok(DecoderKind::Bf),
            "bp" => Ok(DecoderKind::Bp),
            "mcmc" => Ok(DecoderKind::Mcmc),
            _ => Err(crate::error::invalid(format!("unknown decoder {s:?}"))),
        }
    }
}

/// Number of pairs on which `x` and `z` differ.
pub fn count_errors(x: &SpinMatrix, z: &SpinMatrix) -> Result<usize> {
    x.hamming(z)
}
