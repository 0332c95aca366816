//! Achievable rates and random-coding error exponents for probabilistic
//! amplitude shaping (PAS) over discrete memoryless channels, together with a
//! small-blocklength simulator that checks the error-probability bounds by
//! exact enumeration and Monte Carlo.
//!
//! Modules, bottom up:
//!
//! - [`prob`]: distributions, entropy, Renyi entropy, divergence, mutual
//!   information and Arimoto's conditional Renyi entropy.
//! - [`typeclass`]: n-types, type-class sizes, quantization and ranking.
//! - [`channel`]: channel matrices, `X = A x S` factoring, ASK/AWGN.
//! - [`exponents`]: `E_0`, `E_G`, `E_S`, `E_M`, `E_SM` and rate thresholds.
//! - [`optimize`]: Blahut-Arimoto and product-input optimization.
//! - [`simulate`]: code ensembles, (mismatched) MAP decoding and bound checks.
//! - [`cli`]: the command implementations behind the `pas-exponents` binary.

pub mod channel;
pub mod cli;
pub mod error;
pub mod exponents;
pub mod format;
pub mod optimize;
pub mod prob;
pub mod simulate;
pub mod typeclass;

pub use channel::{make_ask_awgn, make_bsc, maxwell_boltzmann, product_input, AskAwgn, Dmc, FactoredDmc};
pub use error::{Error, Result};
pub use exponents::{ExponentResult, RateThresholds, RhoCurve};
pub use prob::{JointPmf, Pmf};
pub use typeclass::{NType, TypeClassInfo};
