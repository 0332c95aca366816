//! Small-blocklength simulation of the coding setups: random code
//! ensembles, exhaustive MAP and mismatched MAP decoding, exact and Monte
//! Carlo error probabilities, and comparison with `2^{-nE}`.

pub mod code;
pub mod decode;
pub mod experiment;

pub use code::{
    sample_code_affine_binary, sample_code_iid, sample_direct_code_affine_binary, sample_permuter, AffineMap, CodeKind,
    CodeTable, Permuter,
};
pub use decode::{map_decode, mmap_decode, Decoder, SourceModel};
pub use experiment::{
    run_ensemble_experiment, stream_rng, wilson_interval, Ensemble, EvalMode, SimConfig, SimReport, Setup, Z_99,
};

use crate::error::Result;

/// Exact error probability of one fixed code under `config`'s source and
/// decoder, with an optional permuter.
pub fn exact_error_probability(code: &CodeTable, permuter: Option<&Permuter>, config: &SimConfig) -> Result<f64> {
    experiment::exact_for_code(code, permuter, config)
}
