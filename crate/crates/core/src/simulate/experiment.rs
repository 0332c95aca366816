//! Ensemble experiments: sample codes, measure the average error
//! probability and compare it with `2^{-nE}`.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::FactoredDmc;
use crate::error::{Error, Result};
use crate::exponents::{dms_renyi, exponent_eg, exponent_em, exponent_es, exponent_esm, ExponentResult};
use crate::prob::Pmf;
use crate::typeclass::NType;

use super::code::{
    enumeration_size, sample_code_affine_binary, sample_code_iid, sample_direct_code_affine_binary, sample_permuter,
    CodeKind, CodeTable, Permuter,
};
use super::decode::{effective_codebook, Decoder, SourceModel};

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.5758293035489004;

const CODE_STREAM: u64 = u64::MAX;
const PERMUTER_STREAM: u64 = u64::MAX - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setup {
    /// DMS source, unconstrained code, MAP decoder.
    Classical,
    /// DMS source, systematic code, MAP decoder.
    Systematic,
    /// Type-class source, unconstrained code, decoder assumes `P_A^n`.
    Mismatched,
    /// Type-class source, permuted systematic code, decoder assumes `P_A^n`.
    Pas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    Iid,
    AffineBinary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalMode {
    /// Exact when `Y^n` can be enumerated, Monte Carlo otherwise.
    Auto,
    Exact,
    MonteCarlo,
}

macro_rules! text_enum {
    ($ty:ty { $($name:literal => $v:path),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok($v),)+
                    _ => Err(Error::Parse(format!("unknown {} '{s}'", stringify!($ty).to_lowercase()))),
                }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let name = match self { $($v => $name,)+ };
                f.write_str(name)
            }
        }
    };
}

text_enum!(Setup { "classical" => Setup::Classical, "systematic" => Setup::Systematic, "mismatched" => Setup::Mismatched, "pas" => Setup::Pas });
text_enum!(Ensemble { "iid" => Ensemble::Iid, "affine-binary" => Ensemble::AffineBinary });
text_enum!(EvalMode { "auto" => EvalMode::Auto, "exact" => EvalMode::Exact, "monte-carlo" => EvalMode::MonteCarlo });

impl Setup {
    fn kind(self) -> CodeKind {
        match self {
            Setup::Classical | Setup::Mismatched => CodeKind::Direct,
            Setup::Systematic | Setup::Pas => CodeKind::Systematic,
        }
    }

    fn type_class_source(self) -> bool {
        matches!(self, Setup::Mismatched | Setup::Pas)
    }
}

/// One experiment. Which distributions are used depends on `setup`:
///
/// | setup | source | code symbols | decoder prior |
/// |---|---|---|---|
/// | classical | `P_A^n` | `P_X` | `P_A^n` |
/// | systematic | `P_A^n` | parities from `P_S` | `P_A^n` |
/// | mismatched | uniform on part of `T(P_bar)` | `P_X` | `P_A^n` |
/// | pas | uniform on part of `T(P_bar)` | parities from `P_S` | `P_A^n` |
///
/// `px` and `ps` default to uniform.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub setup: Setup,
    pub n: usize,
    pub channel: FactoredDmc,
    pub pa: Pmf,
    pub ps: Option<Pmf>,
    pub px: Option<Pmf>,
    pub pbar: Option<Pmf>,
    pub q_support_fraction: f64,
    pub ensemble: Ensemble,
    pub permuter_enabled: bool,
    pub num_codes: usize,
    pub trials_per_code: usize,
    pub seed: u64,
    pub mode: EvalMode,
}

impl SimConfig {
    /// Defaults: full type class, i.i.d. ensemble, no permuter, 200 codes,
    /// 1000 trials per code in Monte Carlo mode, seed 1, automatic mode.
    pub fn new(setup: Setup, n: usize, channel: FactoredDmc, pa: Pmf) -> Self {
        Self {
            setup,
            n,
            channel,
            pa,
            ps: None,
            px: None,
            pbar: None,
            q_support_fraction: 1.0,
            ensemble: Ensemble::Iid,
            permuter_enabled: false,
            num_codes: 200,
            trials_per_code: 1000,
            seed: 1,
            mode: EvalMode::Auto,
        }
    }

    fn ps_or_uniform(&self) -> Result<Pmf> {
        match &self.ps {
            Some(p) => Ok(p.clone()),
            None => Pmf::uniform(self.channel.s_labels().to_vec()),
        }
    }

    fn px_or_uniform(&self) -> Result<Pmf> {
        match &self.px {
            Some(p) => Ok(p.clone()),
            None => Pmf::uniform(self.channel.base().input_labels().to_vec()),
        }
    }

    fn pbar_type(&self) -> Result<NType> {
        let pbar = self
            .pbar
            .as_ref()
            .ok_or_else(|| Error::OutOfRange(format!("setup {} needs pbar", self.setup)))?;
        pbar.ensure_alphabet(self.pa.labels(), "pbar vs pa")?;
        NType::from_pmf_exact(pbar, self.n as u64)
    }

    /// The code alphabet for entries and whether `Y^n` is enumerable.
    fn check(&self) -> Result<bool> {
        if self.n == 0 {
            return Err(Error::OutOfRange("blocklength must be positive".into()));
        }
        if self.num_codes == 0 {
            return Err(Error::OutOfRange("num_codes must be positive".into()));
        }
        enumeration_size(self.pa.len(), self.n)?;
        if self.setup.kind() == CodeKind::Systematic && self.pa.labels() != self.channel.a_labels() {
            return Err(Error::AlphabetMismatch("pa must be on the channel's A alphabet".into()));
        }
        if self.permuter_enabled && !self.setup.type_class_source() {
            return Err(Error::OutOfRange("a permuter needs a type-class source (mismatched or pas)".into()));
        }
        let exact_ok = enumeration_size(self.channel.base().num_outputs(), self.n).is_ok();
        match self.mode {
            EvalMode::Exact => {
                enumeration_size(self.channel.base().num_outputs(), self.n)?;
                Ok(true)
            }
            EvalMode::Auto if exact_ok => Ok(true),
            _ => {
                if self.trials_per_code == 0 {
                    return Err(Error::OutOfRange("trials_per_code must be positive in Monte Carlo mode".into()));
                }
                Ok(false)
            }
        }
    }

    /// The law of the transmitted message.
    pub fn source(&self) -> Result<SourceModel> {
        if self.setup.type_class_source() {
            SourceModel::type_class_prefix(&self.pbar_type()?, self.q_support_fraction)
        } else {
            SourceModel::iid(&self.pa, self.n)
        }
    }

    /// The prior the decoder uses. It equals the source law except in the
    /// mismatched setups, where it is `P_A^n`.
    pub fn decoder_prior(&self, source: &SourceModel) -> Result<SourceModel> {
        if self.setup.type_class_source() {
            SourceModel::iid(&self.pa, self.n)
        } else {
            Ok(source.clone())
        }
    }

    /// The exponent whose bound this setup is checked against.
    pub fn exponent(&self) -> Result<ExponentResult> {
        let fd = &self.channel;
        match self.setup {
            Setup::Classical => exponent_eg(&self.px_or_uniform()?, fd.base(), dms_renyi(&self.pa)),
            Setup::Systematic => exponent_es(&self.pa, &self.ps_or_uniform()?, fd),
            Setup::Mismatched => {
                self.pbar_type()?;
                exponent_em(self.pbar.as_ref().unwrap(), &self.pa, &self.px_or_uniform()?, fd.base())
            }
            Setup::Pas => {
                self.pbar_type()?;
                exponent_esm(self.n as u64, self.pbar.as_ref().unwrap(), &self.pa, &self.ps_or_uniform()?, fd)
            }
        }
    }

    fn sample_code(&self, rng: &mut ChaCha8Rng) -> Result<CodeTable> {
        let kind = self.setup.kind();
        let num_a = self.pa.len();
        match (self.ensemble, kind) {
            (Ensemble::Iid, CodeKind::Systematic) => sample_code_iid(kind, self.n, num_a, &self.ps_or_uniform()?, rng),
            (Ensemble::Iid, CodeKind::Direct) => sample_code_iid(kind, self.n, num_a, &self.px_or_uniform()?, rng),
            (Ensemble::AffineBinary, CodeKind::Systematic) => {
                let num_s = self.channel.num_s();
                if !num_a.is_power_of_two() || !num_s.is_power_of_two() {
                    return Err(Error::AlphabetMismatch("affine-binary codes need |A| and |S| powers of two".into()));
                }
                let p = num_s.trailing_zeros() as usize;
                sample_code_affine_binary(self.n, num_a.trailing_zeros() as usize + p, p, rng)
            }
            (Ensemble::AffineBinary, CodeKind::Direct) => {
                sample_direct_code_affine_binary(self.n, num_a, self.channel.base().num_inputs(), rng)
            }
        }
    }
}

/// Independent RNG stream for `(seed, code, trial)`; the three words form
/// the ChaCha key, so streams never overlap.
pub fn stream_rng(seed: u64, code_index: u64, trial_index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&code_index.to_le_bytes());
    key[16..24].copy_from_slice(&trial_index.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: f64, trials: u64, z: f64) -> (f64, f64) {
    let nt = trials as f64;
    let p = successes / nt;
    let z2 = z * z;
    let denom = 1.0 + z2 / nt;
    let centre = p + z2 / (2.0 * nt);
    let half = z * (p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)).max(0.0).sqrt();
    (((centre - half) / denom).max(0.0), ((centre + half) / denom).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub setup: Setup,
    pub n: usize,
    pub mode: EvalMode,
    /// Codes in exact mode, transmissions in Monte Carlo mode.
    pub trials: u64,
    /// Error count; in exact mode the summed per-code error probabilities.
    pub errors: f64,
    pub p_hat: f64,
    pub ci_99_upper: f64,
    pub analytic_exponent: f64,
    pub rho_star: f64,
    pub analytic_bound: f64,
    /// `ci_within_bound`, or in exact mode also `point_within_bound`.
    pub verdict: bool,
    /// `ci_99_upper <= analytic_bound`.
    pub ci_within_bound: bool,
    /// `p_hat <= analytic_bound`.
    pub point_within_bound: bool,
    /// The bound is at least one and says nothing.
    pub vacuous_bound: bool,
    pub num_codes: usize,
    pub source_support: usize,
}

impl SimReport {
    pub const CSV_HEADER: [&'static str; 7] = ["setup", "n", "exponent_bits", "bound", "p_exact_or_hat", "ci_upper", "verdict"];

    pub fn csv_record(&self) -> Vec<String> {
        use crate::format::fmt_sig;
        vec![
            self.setup.to_string(),
            self.n.to_string(),
            fmt_sig(self.analytic_exponent),
            fmt_sig(self.analytic_bound),
            fmt_sig(self.p_hat),
            fmt_sig(self.ci_99_upper),
            self.verdict.to_string(),
        ]
    }
}

pub(crate) fn exact_for_code(code: &CodeTable, permuter: Option<&Permuter>, config: &SimConfig) -> Result<f64> {
    config.check()?;
    let source = config.source()?;
    let cws = effective_codebook(code, &config.channel, permuter)?;
    Decoder::new(&cws, &config.decoder_prior(&source)?, config.channel.base())?.exact_error_probability(&source)
}

/// Error probability (or error count, in Monte Carlo mode) of every sampled code, in code order.
pub fn per_code_error_probabilities(config: &SimConfig) -> Result<(Vec<f64>, EvalMode)> {
    let exact = config.check()?;
    let source = config.source()?;
    let prior = config.decoder_prior(&source)?;
    let pbar_t = if config.permuter_enabled { Some(config.pbar_type()?) } else { None };
    let w = config.channel.base();
    let per_code = (0..config.num_codes)
        .into_par_iter()
        .map(|c| -> Result<f64> {
            let code = config.sample_code(&mut stream_rng(config.seed, c as u64, CODE_STREAM))?;
            let permuter: Option<Permuter> = match &pbar_t {
                Some(t) => Some(sample_permuter(t, &mut stream_rng(config.seed, c as u64, PERMUTER_STREAM))?),
                None => None,
            };
            let cws = effective_codebook(&code, &config.channel, permuter.as_ref())?;
            let decoder = Decoder::new(&cws, &prior, w)?;
            if exact {
                return decoder.exact_error_probability(&source);
            }
            let mut errors = 0u64;
            for t in 0..config.trials_per_code {
                let mut rng = stream_rng(config.seed, c as u64, t as u64);
                let m = source.sample(&mut rng);
                let y = decoder.transmit(m, w, &mut rng);
                errors += (decoder.decode(&y) != m) as u64;
            }
            Ok(errors as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok((per_code, if exact { EvalMode::Exact } else { EvalMode::MonteCarlo }))
}

/// Samples `num_codes` codes (and permuters), measures each, and compares
/// the ensemble average with the setup's bound.
pub fn run_ensemble_experiment(config: &SimConfig) -> Result<SimReport> {
    config.check()?;
    let exponent = config.exponent()?;
    let source_support = config.source()?.support().len();
    let (per_code, mode) = per_code_error_probabilities(config)?;
    let errors: f64 = per_code.iter().sum();
    let trials = match mode {
        EvalMode::Exact => config.num_codes as u64,
        _ => (config.num_codes * config.trials_per_code) as u64,
    };
    let p_hat = errors / trials as f64;
    let (_, ci_99_upper) = wilson_interval(errors, trials, Z_99);
    let bound = exponent.bound(config.n as u64);
    Ok(SimReport {
        setup: config.setup,
        n: config.n,
        mode,
        trials,
        errors,
        p_hat,
        ci_99_upper,
        analytic_exponent: exponent.exponent,
        rho_star: exponent.rho_star,
        analytic_bound: bound,
        verdict: ci_99_upper <= bound || (mode == EvalMode::Exact && p_hat <= bound),
        ci_within_bound: ci_99_upper <= bound,
        point_within_bound: p_hat <= bound,
        vacuous_bound: bound >= 1.0,
        num_codes: config.num_codes,
        source_support,
    })
}
