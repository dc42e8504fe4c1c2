//! Classical decoders for parity-encoded (LHZ) Ising spin systems.
//!
//! `K` all-to-all coupled logical spins are embedded into `C(K,2)` physical
//! spins, one per logical pair, subject to local parity constraints. A
//! physical readout is a [`SpinMatrix`]; the codewords are the `2^(K-1)`
//! matrices `x_ij = Z_i Z_j`. This crate provides
//!
//! * the code itself ([`ParityCode`]) with its weight-3 and weight-4 checks,
//! * readout noise models ([`channels`]),
//! * bit-flip, belief-propagation and minimum-weight decoders ([`decoders`]),
//! * rejection-free MCMC sampling and the MCMC-BF hybrid ([`mcmc`]),
//! * seeded, parallel benchmark drivers ([`experiments`]).
//!
//! Soft-valued types are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix them to `f64`.
//!
//! ```
//! use parity_decode::{bf_decode, BfConfig, ParityCode, SpinMatrix};
//!
//! let code = ParityCode::new(8).unwrap();
//! let mut readout = SpinMatrix::ones(8);
//! readout.flip(2, 5);
//! let result = bf_decode(&code, &readout, &BfConfig::default(), None).unwrap();
//! assert!(result.success);
//! assert_eq!(result.final_state, SpinMatrix::ones(8));
//! ```

pub mod channels;
pub mod code;
pub mod decoders;
pub mod error;
pub mod experiments;
pub mod gf2;
pub mod mcmc;
pub mod rng;
pub mod scalar;
pub mod spin;

pub use code::{error_matrix, LogicalState, ParityCode, SyndromeFamily, SyndromeVector};
pub use decoders::{
    bf_decode, bf_step, bp_decode, count_errors, mwd_bruteforce, BfConfig, BpConfig, DecodeResult,
    DecoderKind, InversionKind, TiePolicy,
};
pub use error::{Error, Result};
pub use scalar::Scalar;
pub use spin::SpinMatrix;

/// AWGN channel parameters in `f64`.
pub type Awgn = channels::AwgnParams<f64>;
/// Channel observation in `f64`.
pub type Observation = channels::Observation<f64>;
/// Log-likelihood ratios in `f64`.
pub type Llr = channels::LlrVector<f64>;
/// Inversion-function weights in `f64`.
pub type Weights = decoders::InversionWeights<f64>;
/// Sampled Hamiltonian parameters in `f64`.
pub type SlhzParams = mcmc::SlhzParams<f64>;
/// Recorded MCMC run in `f64`.
pub type SampleRun = mcmc::SampleRun<f64>;
/// Benchmark instance in `f64`.
pub type Instance = experiments::ProblemInstance<f64>;
