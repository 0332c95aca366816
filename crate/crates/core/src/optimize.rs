//! Input-distribution optimization: channel capacity by Blahut-Arimoto and
//! alternating ascent of `I(X;Y)` over product inputs `P_A x P_S`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::channel::{product_input, Dmc, FactoredDmc};
use crate::error::{Error, Result};
use crate::prob::{mutual_information, Pmf};
use crate::typeclass::{quantize_to_ntype, NType};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 10_000;
pub const DEFAULT_RESTARTS: usize = 8;
pub const DEFAULT_SEED: u64 = 0x05ee_d0fa_110c;

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    pub capacity: f64,
    pub px_star: Pmf,
    pub iterations: usize,
    /// Upper minus lower capacity bound at termination.
    pub gap: f64,
    pub converged: bool,
    /// `I(X;Y)` of the iterate at each step.
    pub trace: Vec<f64>,
}

impl CapacityResult {
    /// `{"capacity_bits":..., "px":[...], "gap":..., ...}`.
    pub fn to_json(&self) -> Value {
        json!({
            "capacity_bits": self.capacity,
            "px": self.px_star.probs(),
            "gap": self.gap,
            "iterations": self.iterations,
            "converged": self.converged,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductOptResult {
    pub mi: f64,
    pub pa_star: Pmf,
    pub ps_star: Pmf,
    pub converged: bool,
}

/// `log2 sum_y W(y) log2(W(y)/q(y))` over the support of `row`.
fn divergence_bits(row: &[f64], q: &[f64]) -> f64 {
    row.iter()
        .zip(q)
        .filter(|(w, _)| **w > 0.0)
        .map(|(w, qy)| w * (w / qy).log2())
        .sum()
}

/// Capacity of `w` by Blahut-Arimoto. Stops once
/// `max_x D(W_x||q) - log2 sum_x p(x) 2^{D(W_x||q)}` drops below `tol`.
pub fn blahut_arimoto(w: &Dmc, tol: f64, max_iter: usize) -> Result<CapacityResult> {
    if !(tol > 0.0) {
        return Err(Error::OutOfRange(format!("tolerance {tol} must be positive")));
    }
    let nx = w.num_inputs();
    let mut p = vec![1.0 / nx as f64; nx];
    let mut trace = Vec::new();
    let mut iterations = 0;
    loop {
        let q = w.output_distribution(&p);
        let d: Vec<f64> = (0..nx).map(|x| divergence_bits(w.row(x), &q)).collect();
        let mi: f64 = p.iter().zip(&d).map(|(px, dx)| px * dx).sum();
        trace.push(mi.max(0.0));
        let dmax = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        // work relative to dmax so that 2^{D} cannot overflow
        let weights: Vec<f64> = p.iter().zip(&d).map(|(px, dx)| px * (dx - dmax).exp2()).collect();
        let z: f64 = weights.iter().sum();
        let lower = dmax + z.log2();
        let gap = (dmax - lower).max(0.0);
        if gap < tol || iterations >= max_iter {
            let px_star = Pmf::new(w.input_labels().to_vec(), p)?;
            return Ok(CapacityResult {
                capacity: lower.max(0.0),
                px_star,
                iterations,
                gap,
                converged: gap < tol,
                trace,
            });
        }
        p = weights.into_iter().map(|v| v / z).collect();
        iterations += 1;
    }
}

/// One multiplicative step on a block of the product input. `scores[i]` is
/// the average divergence of the rows belonging to block symbol `i`; returns
/// the block's optimality gap before the step.
fn block_step(p: &mut [f64], scores: &[f64], current_mi: f64) -> f64 {
    let smax = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = p.iter().zip(scores).map(|(pi, si)| pi * (si - smax).exp2()).collect();
    let z: f64 = weights.iter().sum();
    for (pi, wi) in p.iter_mut().zip(weights) {
        *pi = wi / z;
    }
    (smax - current_mi).max(0.0)
}

struct Ascent {
    pa: Vec<f64>,
    ps: Vec<f64>,
    mi: f64,
    converged: bool,
}

fn product_probs(pa: &[f64], ps: &[f64], fd: &FactoredDmc) -> Vec<f64> {
    let mut px = vec![0.0; fd.base().num_inputs()];
    for (a, pav) in pa.iter().enumerate() {
        for (s, psv) in ps.iter().enumerate() {
            px[fd.x_of(a, s)] = pav * psv;
        }
    }
    px
}

fn row_scores(fd: &FactoredDmc, pa: &[f64], ps: &[f64]) -> (Vec<Vec<f64>>, f64) {
    let w = fd.base();
    let q = w.output_distribution(&product_probs(pa, ps, fd));
    let mut d = vec![vec![0.0; fd.num_s()]; fd.num_a()];
    let mut mi = 0.0;
    for (a, row) in d.iter_mut().enumerate() {
        for (s, slot) in row.iter_mut().enumerate() {
            *slot = divergence_bits(w.row(fd.x_of(a, s)), &q);
            mi += pa[a] * ps[s] * *slot;
        }
    }
    (d, mi)
}

fn alternating_ascent(fd: &FactoredDmc, mut pa: Vec<f64>, mut ps: Vec<f64>, tol: f64, max_iter: usize) -> Ascent {
    let mut converged = false;
    for _ in 0..max_iter {
        let (d, mi) = row_scores(fd, &pa, &ps);
        let scores_a: Vec<f64> = d.iter().map(|row| row.iter().zip(&ps).map(|(v, p)| v * p).sum()).collect();
        let gap_a = block_step(&mut pa, &scores_a, mi);

        let (d, mi) = row_scores(fd, &pa, &ps);
        let scores_s: Vec<f64> = (0..fd.num_s())
            .map(|s| d.iter().zip(&pa).map(|(row, p)| row[s] * p).sum())
            .collect();
        let gap_s = block_step(&mut ps, &scores_s, mi);
        if gap_a < tol && gap_s < tol {
            converged = true;
            break;
        }
    }
    let (_, mi) = row_scores(fd, &pa, &ps);
    Ascent { pa, ps, mi: mi.max(0.0), converged }
}

fn random_simplex(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    // exponential spacings give a uniform draw on the simplex
    let w: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

/// `max I(X;Y)` over `P_X = P_A P_S` with the default seed.
pub fn maximize_product_mi(fd: &FactoredDmc, tol: f64, max_iter: usize, restarts: usize) -> Result<ProductOptResult> {
    maximize_product_mi_seeded(fd, tol, max_iter, restarts, DEFAULT_SEED)
}

/// Alternating ascent from the uniform pair plus `restarts` random pairs.
/// `I` is not jointly concave in `(P_A, P_S)`, so each start may stop at a
/// different local optimum; the best one wins, exact ties going to the
/// lexicographically smallest `(P_A, P_S)`.
pub fn maximize_product_mi_seeded(
    fd: &FactoredDmc,
    tol: f64,
    max_iter: usize,
    restarts: usize,
    seed: u64,
) -> Result<ProductOptResult> {
    if !(tol > 0.0) {
        return Err(Error::OutOfRange(format!("tolerance {tol} must be positive")));
    }
    let (na, ns) = (fd.num_a(), fd.num_s());
    let mut starts = vec![(vec![1.0 / na as f64; na], vec![1.0 / ns as f64; ns])];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..restarts {
        let pa = random_simplex(&mut rng, na);
        let ps = random_simplex(&mut rng, ns);
        starts.push((pa, ps));
    }
    let results: Vec<Ascent> = starts
        .into_par_iter()
        .map(|(pa, ps)| alternating_ascent(fd, pa, ps, tol, max_iter))
        .collect();
    let best = results
        .into_iter()
        .reduce(|best, r| {
            let better = r.mi > best.mi
                || (r.mi == best.mi
                    && (r.pa.as_slice(), r.ps.as_slice()).partial_cmp(&(best.pa.as_slice(), best.ps.as_slice()))
                        == Some(std::cmp::Ordering::Less));
            if better {
                r
            } else {
                best
            }
        })
        .expect("at least the uniform start");
    let pa_star = Pmf::new(fd.a_labels().to_vec(), best.pa)?;
    let ps_star = Pmf::new(fd.s_labels().to_vec(), best.ps)?;
    // report the mutual information of the returned pair itself
    let mi = mutual_information(&product_input(&pa_star, &ps_star, fd)?, fd.base())?;
    Ok(ProductOptResult { mi, pa_star, ps_star, converged: best.converged })
}

/// Second step of the design procedure: the divergence-closest n-type to
/// the optimized amplitude law.
pub fn project_to_ntype_design(pa_star: &Pmf, n: u64) -> Result<NType> {
    quantize_to_ntype(pa_star, n)
}
