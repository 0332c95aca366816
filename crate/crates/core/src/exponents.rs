//! Random-coding error exponents for the four transmission setups, each as a
//! pointwise integrand in `rho` and as a maximized exponent.
//!
//! | setup | exponent | integrand |
//! |---|---|---|
//! | classical, MAP | `E_G` | `E_0(rho) - rho/n H_{1/(1+rho)}(Q_n)` |
//! | systematic encoder, MAP | `E_S` | `-log2 sum_y {sum_{a,s} P_S(s) [P_A(a) W(y|as)]^{1/(1+rho)}}^{1+rho}` |
//! | source-mismatched MAP | `E_M` | `E_0 - rho/(1+rho) (D + H(P_bar)) - rho^2/(1+rho) H_{1/(1+rho)}(P_A)` |
//! | PAS with type permuter | `E_SM` | `E_S integrand - alpha(n) - D` |
//!
//! Integrands accept any `rho > -1` so that derivatives at zero can be taken
//! by central differences; maximization is always over `[0, 1]`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::channel::{product_input, Dmc, FactoredDmc};
use crate::error::{Error, Result};
use crate::format::fmt_sig;
use crate::prob::{arimoto_cond_renyi, entropy, kl_divergence, mutual_information, renyi_entropy, JointPmf, Pmf};
use crate::typeclass::NType;

/// Coarse grid resolution for the maximization over `rho`.
pub const RHO_GRID_STEPS: usize = 256;
/// Width at which golden-section refinement stops.
pub const RHO_TOLERANCE: f64 = 1e-6;

/// An integrand sampled on the `rho` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoCurve {
    pub rho_values: Vec<f64>,
    pub integrand_values: Vec<f64>,
}

impl RhoCurve {
    pub fn len(&self) -> usize {
        self.rho_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho_values.is_empty()
    }

    /// Writes `rho,integrand_bits` rows with a header, 12 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Parse(e.to_string());
        w.write_record(["rho", "integrand_bits"]).map_err(io)?;
        for (r, v) in self.rho_values.iter().zip(&self.integrand_values) {
            w.write_record([fmt_sig(*r), fmt_sig(*v)]).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let headers = r.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
        if headers.iter().collect::<Vec<_>>() != ["rho", "integrand_bits"] {
            return Err(Error::Parse(format!("unexpected curve header {headers:?}")));
        }
        let mut curve = RhoCurve { rho_values: Vec::new(), integrand_values: Vec::new() };
        for record in r.records() {
            let record = record.map_err(|e| Error::Parse(e.to_string()))?;
            let field = |i: usize| -> Result<f64> {
                record
                    .get(i)
                    .ok_or_else(|| Error::Parse("short curve row".into()))?
                    .parse()
                    .map_err(|e| Error::Parse(format!("{e}")))
            };
            curve.rho_values.push(field(0)?);
            curve.integrand_values.push(field(1)?);
        }
        Ok(curve)
    }
}

/// Maximized exponent, its maximizer and the sampled curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentResult {
    /// Raw maximum; may be negative for `E_SM`, in which case the bound
    /// `2^{-nE}` exceeds one.
    pub exponent: f64,
    pub rho_star: f64,
    pub curve: RhoCurve,
}

impl ExponentResult {
    pub fn clamped(&self) -> f64 {
        self.exponent.max(0.0)
    }

    pub fn is_negative(&self) -> bool {
        self.exponent < 0.0
    }

    /// `2^{-n E}` using the raw exponent.
    pub fn bound(&self, n: u64) -> f64 {
        (-(n as f64) * self.exponent).exp2()
    }
}

/// Achievable-rate thresholds of a setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateThresholds {
    pub mutual_info: f64,
    /// `mutual_info - penalty`, unclamped.
    pub rate_limit: f64,
    pub penalty: f64,
    /// `max(rate_limit, 0)`.
    pub rate_limit_clamped: f64,
    /// Set when the penalty exceeds the mutual information.
    pub negative_rate_limit: bool,
    /// Per-symbol entropy of the source feeding the encoder.
    pub source_entropy: f64,
    /// Whether the exponent is positive at this operating point.
    pub positive_exponent: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub redundancy: Option<RedundancyCondition>,
}

/// The systematic-encoding condition stated as redundancy versus equivocation:
/// `H(A) < I(AS;Y)` holds exactly when `H(S) > H(X|Y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedundancyCondition {
    pub parity_entropy: f64,
    pub equivocation: f64,
    pub satisfied: bool,
}

impl RateThresholds {
    fn new(mutual_info: f64, penalty: f64, source_entropy: f64) -> Self {
        let rate_limit = mutual_info - penalty;
        Self {
            mutual_info,
            rate_limit,
            penalty,
            rate_limit_clamped: rate_limit.max(0.0),
            negative_rate_limit: rate_limit < 0.0,
            source_entropy,
            positive_exponent: source_entropy < rate_limit,
            redundancy: None,
        }
    }
}

/// Maximizes `integrand` over `[0, 1]`: a grid of step 1/256, then
/// golden-section refinement inside the grid cells around the best point.
pub fn maximize_over_rho<F: Fn(f64) -> f64>(integrand: F) -> ExponentResult {
    let rho_values: Vec<f64> = (0..=RHO_GRID_STEPS).map(|k| k as f64 / RHO_GRID_STEPS as f64).collect();
    let integrand_values: Vec<f64> = rho_values.iter().map(|&r| integrand(r)).collect();
    let mut best = 0;
    for (k, v) in integrand_values.iter().enumerate() {
        if *v > integrand_values[best] {
            best = k;
        }
    }
    let mut rho_star = rho_values[best];
    let mut exponent = integrand_values[best];

    let h = 1.0 / RHO_GRID_STEPS as f64;
    let (mut lo, mut hi) = ((rho_star - h).max(0.0), (rho_star + h).min(1.0));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (integrand(c), integrand(d));
    while hi - lo > RHO_TOLERANCE {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = integrand(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = integrand(d);
        }
    }
    let refined = 0.5 * (lo + hi);
    let value = integrand(refined);
    if value > exponent {
        exponent = value;
        rho_star = refined;
    }
    ExponentResult { exponent, rho_star, curve: RhoCurve { rho_values, integrand_values } }
}

fn e0_unchecked(rho: f64, px: &[f64], w: &Dmc) -> f64 {
    if rho == 0.0 {
        return 0.0;
    }
    let s = 1.0 / (1.0 + rho);
    let mut total = 0.0;
    for y in 0..w.num_outputs() {
        let inner: f64 = px
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(x, p)| {
                let wyx = w.prob(x, y);
                if wyx > 0.0 {
                    p * wyx.powf(s)
                } else {
                    0.0
                }
            })
            .sum();
        if inner > 0.0 {
            total += inner.powf(1.0 + rho);
        }
    }
    -total.log2()
}

/// Gallager's function `E_0(rho, P_X) = -log2 sum_y {sum_x P_X(x) W(y|x)^{1/(1+rho)}}^{1+rho}`.
pub fn gallager_e0(rho: f64, px: &Pmf, w: &Dmc) -> Result<f64> {
    px.ensure_alphabet(w.input_labels(), "input distribution")?;
    check_rho(rho)?;
    Ok(e0_unchecked(rho, px.probs(), w))
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > -1.0) || !rho.is_finite() {
        return Err(Error::OutOfRange(format!("rho = {rho} must exceed -1")));
    }
    Ok(())
}

/// `E_G` for a source whose normalized Renyi entropy `(1/n) H_alpha(Q_n)` is
/// given by `per_symbol_renyi(alpha)`.
pub fn exponent_eg<F: Fn(f64) -> f64>(px: &Pmf, w: &Dmc, per_symbol_renyi: F) -> Result<ExponentResult> {
    px.ensure_alphabet(w.input_labels(), "input distribution")?;
    Ok(maximize_over_rho(|rho| {
        let e0 = e0_unchecked(rho, px.probs(), w);
        if rho == 0.0 {
            e0
        } else {
            e0 - rho * per_symbol_renyi(1.0 / (1.0 + rho))
        }
    }))
}

/// `(1/n) H_alpha(P_A^n) = H_alpha(P_A)` for a memoryless source.
pub fn dms_renyi(pa: &Pmf) -> impl Fn(f64) -> f64 + '_ {
    move |alpha| {
        if alpha == 1.0 {
            entropy(pa)
        } else {
            renyi_entropy(alpha, pa).expect("order in (0, 1)")
        }
    }
}

fn check_factored(pa: &Pmf, ps: &Pmf, fd: &FactoredDmc) -> Result<()> {
    pa.ensure_alphabet(fd.a_labels(), "amplitude distribution")?;
    ps.ensure_alphabet(fd.s_labels(), "parity distribution")
}

fn es_unchecked(rho: f64, pa: &[f64], ps: &[f64], fd: &FactoredDmc) -> f64 {
    if rho == 0.0 {
        return 0.0;
    }
    let s = 1.0 / (1.0 + rho);
    let w = fd.base();
    let mut total = 0.0;
    for y in 0..w.num_outputs() {
        let mut inner = 0.0;
        for (a, &pav) in pa.iter().enumerate() {
            if pav == 0.0 {
                continue;
            }
            for (si, &psv) in ps.iter().enumerate() {
                let wyx = w.prob(fd.x_of(a, si), y);
                if psv > 0.0 && wyx > 0.0 {
                    inner += psv * (pav * wyx).powf(s);
                }
            }
        }
        if inner > 0.0 {
            total += inner.powf(1.0 + rho);
        }
    }
    -total.log2()
}

/// Systematic-encoding integrand
/// `-log2 sum_y {sum_{a,s} P_S(s) [P_A(a) W(y|(a,s))]^{1/(1+rho)}}^{1+rho}`.
pub fn exponent_es_integrand(rho: f64, pa: &Pmf, ps: &Pmf, fd: &FactoredDmc) -> Result<f64> {
    check_factored(pa, ps, fd)?;
    check_rho(rho)?;
    Ok(es_unchecked(rho, pa.probs(), ps.probs(), fd))
}

/// Closed form of the systematic integrand for uniform parities,
/// `rho (log2|S| - H_{1/(1+rho)}(X|Y))` with Arimoto's conditional entropy.
pub fn es_integrand_uniform_parity(rho: f64, pa: &Pmf, fd: &FactoredDmc) -> Result<f64> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::OutOfRange(format!("rho = {rho} must be positive")));
    }
    let ps = Pmf::uniform(fd.s_labels().to_vec())?;
    let px = product_input(pa, &ps, fd)?;
    let joint = JointPmf::from_input_and_channel(&px, fd.base())?;
    let h = arimoto_cond_renyi(1.0 / (1.0 + rho), &joint)?;
    Ok(rho * ((fd.num_s() as f64).log2() - h))
}

/// `E_S`, the maximum of [`exponent_es_integrand`] over `rho` in `[0, 1]`.
pub fn exponent_es(pa: &Pmf, ps: &Pmf, fd: &FactoredDmc) -> Result<ExponentResult> {
    check_factored(pa, ps, fd)?;
    Ok(maximize_over_rho(|rho| es_unchecked(rho, pa.probs(), ps.probs(), fd)))
}

/// Divergence `D(P_bar||P_A)`, rejecting `P_A` that does not dominate `P_bar`.
fn mismatch_penalty(pbar: &Pmf, pa: &Pmf) -> Result<f64> {
    pbar.ensure_alphabet(pa.labels(), "type distribution vs decoder distribution")?;
    let d = kl_divergence(pbar, pa)?;
    if d.is_infinite() {
        return Err(Error::SupportViolation(
            "P_A must dominate P_bar: supp(P_bar) is not contained in supp(P_A)".into(),
        ));
    }
    Ok(d)
}

struct MismatchTerms {
    penalty: f64,
    pbar_entropy: f64,
}

fn em_unchecked(rho: f64, terms: &MismatchTerms, pa: &Pmf, px: &[f64], w: &Dmc) -> f64 {
    let e0 = e0_unchecked(rho, px, w);
    if rho == 0.0 {
        return e0;
    }
    let renyi = renyi_entropy(1.0 / (1.0 + rho), pa).expect("order differs from one");
    e0 - rho / (1.0 + rho) * (terms.penalty + terms.pbar_entropy) - rho * rho / (1.0 + rho) * renyi
}

fn mismatch_terms(pbar: &Pmf, pa: &Pmf, px: &Pmf, w: &Dmc) -> Result<MismatchTerms> {
    px.ensure_alphabet(w.input_labels(), "input distribution")?;
    let penalty = mismatch_penalty(pbar, pa)?;
    Ok(MismatchTerms { penalty, pbar_entropy: entropy(pbar) })
}

/// Source-mismatch integrand
/// `E_0 - rho/(1+rho) (D(P_bar||P_A) + H(P_bar)) - rho^2/(1+rho) H_{1/(1+rho)}(P_A)`.
pub fn exponent_em_integrand(rho: f64, pbar: &Pmf, pa: &Pmf, px: &Pmf, w: &Dmc) -> Result<f64> {
    check_rho(rho)?;
    let terms = mismatch_terms(pbar, pa, px, w)?;
    Ok(em_unchecked(rho, &terms, pa, px.probs(), w))
}

/// `E_M`: source statistics `P_bar` (a type) decoded as if drawn from `P_A`.
pub fn exponent_em(pbar: &Pmf, pa: &Pmf, px: &Pmf, w: &Dmc) -> Result<ExponentResult> {
    let terms = mismatch_terms(pbar, pa, px, w)?;
    Ok(maximize_over_rho(|rho| em_unchecked(rho, &terms, pa, px.probs(), w)))
}

/// `alpha(n) = |A| log2(n+1) / n`.
pub fn alpha_n(n: u64, num_a: usize) -> f64 {
    num_a as f64 * ((n + 1) as f64).log2() / n as f64
}

fn check_esm(n: u64, pbar: &Pmf, pa: &Pmf, ps: &Pmf, fd: &FactoredDmc) -> Result<f64> {
    if n == 0 {
        return Err(Error::OutOfRange("blocklength must be positive".into()));
    }
    check_factored(pa, ps, fd)?;
    NType::from_pmf_exact(pbar, n)?;
    mismatch_penalty(pbar, pa)
}

/// PAS integrand `E_S(rho) - alpha(n) - D(P_bar||P_A)`.
pub fn exponent_esm_integrand(rho: f64, n: u64, pbar: &Pmf, pa: &Pmf, ps: &Pmf, fd: &FactoredDmc) -> Result<f64> {
    check_rho(rho)?;
    let d = check_esm(n, pbar, pa, ps, fd)?;
    Ok(es_unchecked(rho, pa.probs(), ps.probs(), fd) - alpha_n(n, fd.num_a()) - d)
}

/// `E_SM` at blocklength `n`; `pbar` must be an n-type dominated by `pa`.
pub fn exponent_esm(n: u64, pbar: &Pmf, pa: &Pmf, ps: &Pmf, fd: &FactoredDmc) -> Result<ExponentResult> {
    let d = check_esm(n, pbar, pa, ps, fd)?;
    let offset = alpha_n(n, fd.num_a()) + d;
    Ok(maximize_over_rho(|rho| es_unchecked(rho, pa.probs(), ps.probs(), fd) - offset))
}

/// Thresholds for systematic encoding: any rate below `I(X;Y)` with
/// `P_X = P_A P_S`, and `E_S > 0` while `H(A) < I(AS;Y)`.
pub fn rate_thresholds_es(pa: &Pmf, ps: &Pmf, fd: &FactoredDmc) -> Result<RateThresholds> {
    check_factored(pa, ps, fd)?;
    let px = product_input(pa, ps, fd)?;
    let mi = mutual_information(&px, fd.base())?;
    let mut t = RateThresholds::new(mi, 0.0, entropy(pa));
    let parity_entropy = entropy(ps);
    let equivocation = (entropy(&px) - mi).max(0.0);
    t.redundancy = Some(RedundancyCondition {
        parity_entropy,
        equivocation,
        satisfied: parity_entropy > equivocation,
    });
    Ok(t)
}

/// Thresholds for the source-mismatched decoder: rates below
/// `I(X;Y) - D(P_bar||P_A)`.
pub fn rate_thresholds_em(pbar: &Pmf, pa: &Pmf, px: &Pmf, w: &Dmc) -> Result<RateThresholds> {
    let terms = mismatch_terms(pbar, pa, px, w)?;
    let mi = mutual_information(px, w)?;
    Ok(RateThresholds::new(mi, terms.penalty, terms.pbar_entropy))
}
