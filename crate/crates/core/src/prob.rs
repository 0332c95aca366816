//! Finite probability distributions and the information measures built on them.
//!
//! All logarithms are base 2 and every quantity is reported in bits. The
//! conventions `0 log 0 = 0` and `0^a = 0` hold throughout.

use serde::{Deserialize, Serialize};

use crate::channel::Dmc;
use crate::error::{Error, Result};

/// Tolerance on the total mass of a distribution before renormalization.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// A probability mass function over a labeled finite alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pmf {
    labels: Vec<String>,
    probs: Vec<f64>,
}

impl Pmf {
    /// Builds a distribution, checking the invariants and renormalizing the
    /// probabilities so that they sum to one.
    pub fn new(labels: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidPmf("empty alphabet".into()));
        }
        if labels.len() != probs.len() {
            return Err(Error::InvalidPmf(format!(
                "{} labels but {} probabilities",
                labels.len(),
                probs.len()
            )));
        }
        check_distinct(&labels).map_err(Error::InvalidPmf)?;
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidPmf(format!("entry {p} is not a probability")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidPmf(format!("probabilities sum to {total}")));
        }
        let probs = probs.into_iter().map(|p| p / total).collect();
        Ok(Self { labels, probs })
    }

    /// Like [`Pmf::new`] but accepts arbitrary non-negative weights.
    pub fn from_weights(labels: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidPmf(format!("weights sum to {total}")));
        }
        if weights.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidPmf("negative weight".into()));
        }
        Self::new(labels, weights.iter().map(|w| w / total).collect())
    }

    /// Distribution with labels `"0"`, `"1"`, ...
    pub fn indexed(probs: Vec<f64>) -> Result<Self> {
        Self::new(index_labels(probs.len()), probs)
    }

    pub fn uniform(labels: Vec<String>) -> Result<Self> {
        let k = labels.len();
        Self::new(labels, vec![1.0 / k as f64; k])
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.probs[i]
    }

    /// Indices with strictly positive probability.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.probs[i] > 0.0).collect()
    }

    pub fn same_alphabet(&self, other: &Pmf) -> bool {
        self.labels == other.labels
    }

    pub(crate) fn ensure_alphabet(&self, labels: &[String], what: &str) -> Result<()> {
        if self.labels != labels {
            return Err(Error::AlphabetMismatch(format!(
                "{what}: distribution over {:?}, expected {:?}",
                self.labels, labels
            )));
        }
        Ok(())
    }
}

pub(crate) fn index_labels(k: usize) -> Vec<String> {
    (0..k).map(|i| i.to_string()).collect()
}

pub(crate) fn check_distinct(labels: &[String]) -> std::result::Result<(), String> {
    let mut seen = std::collections::HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(format!("duplicate label {l:?}"));
        }
    }
    Ok(())
}

/// A joint distribution `P(x, y)` stored row-major, rows indexed by `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    probs: Vec<f64>,
}

impl JointPmf {
    pub fn new(row_labels: Vec<String>, col_labels: Vec<String>, probs: Vec<Vec<f64>>) -> Result<Self> {
        if probs.len() != row_labels.len() || probs.iter().any(|r| r.len() != col_labels.len()) {
            return Err(Error::InvalidPmf("joint matrix shape does not match labels".into()));
        }
        if row_labels.is_empty() || col_labels.is_empty() {
            return Err(Error::InvalidPmf("empty alphabet".into()));
        }
        let flat: Vec<f64> = probs.into_iter().flatten().collect();
        if flat.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidPmf("negative or non-finite joint entry".into()));
        }
        let total: f64 = flat.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidPmf(format!("joint probabilities sum to {total}")));
        }
        Ok(Self {
            row_labels,
            col_labels,
            probs: flat.into_iter().map(|p| p / total).collect(),
        })
    }

    /// `P(x, y) = P_X(x) W(y|x)`.
    pub fn from_input_and_channel(px: &Pmf, w: &Dmc) -> Result<Self> {
        px.ensure_alphabet(w.input_labels(), "input distribution")?;
        let ny = w.num_outputs();
        let mut probs = Vec::with_capacity(px.len() * ny);
        for x in 0..px.len() {
            probs.extend(w.row(x).iter().map(|wyx| px.prob(x) * wyx));
        }
        Ok(Self {
            row_labels: px.labels().to_vec(),
            col_labels: w.output_labels().to_vec(),
            probs,
        })
    }

    pub fn rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.probs[x * self.cols() + y]
    }

    pub fn row_marginal(&self) -> Pmf {
        let probs = (0..self.rows())
            .map(|x| (0..self.cols()).map(|y| self.get(x, y)).sum())
            .collect();
        Pmf { labels: self.row_labels.clone(), probs }
    }

    pub fn col_marginal(&self) -> Pmf {
        let probs = (0..self.cols())
            .map(|y| (0..self.rows()).map(|x| self.get(x, y)).sum())
            .collect();
        Pmf { labels: self.col_labels.clone(), probs }
    }

    /// Entropy of the joint distribution in bits.
    pub fn joint_entropy(&self) -> f64 {
        entropy_of(&self.probs)
    }
}

fn entropy_of(probs: &[f64]) -> f64 {
    -probs.iter().filter(|p| **p > 0.0).map(|p| p * p.log2()).sum::<f64>()
}

/// Shannon entropy `H(p)` in bits.
pub fn entropy(p: &Pmf) -> f64 {
    entropy_of(p.probs()).max(0.0)
}

fn check_order(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || alpha == 1.0 || !alpha.is_finite() {
        return Err(Error::OutOfRange(format!(
            "Renyi order must be positive, finite and different from 1, got {alpha}"
        )));
    }
    Ok(())
}

/// Renyi entropy of order `alpha`, `1/(1-alpha) log2 sum p^alpha`.
pub fn renyi_entropy(alpha: f64, p: &Pmf) -> Result<f64> {
    check_order(alpha)?;
    let s: f64 = p.probs().iter().filter(|q| **q > 0.0).map(|q| q.powf(alpha)).sum();
    Ok(s.log2() / (1.0 - alpha))
}

/// Kullback-Leibler divergence `D(p||q)` in bits; `f64::INFINITY` when the
/// support of `p` is not contained in the support of `q`.
pub fn kl_divergence(p: &Pmf, q: &Pmf) -> Result<f64> {
    p.ensure_alphabet(q.labels(), "divergence")?;
    let mut d = 0.0;
    for (pi, qi) in p.probs().iter().zip(q.probs()) {
        if *pi == 0.0 {
            continue;
        }
        if *qi == 0.0 {
            return Ok(f64::INFINITY);
        }
        d += pi * (pi / qi).log2();
    }
    Ok(d.max(0.0))
}

/// Mutual information `I(X;Y)` in bits for input `px` through channel `w`.
pub fn mutual_information(px: &Pmf, w: &Dmc) -> Result<f64> {
    px.ensure_alphabet(w.input_labels(), "input distribution")?;
    let py = w.output_distribution(px.probs());
    let mut mi = 0.0;
    for x in px.support() {
        let pxv = px.prob(x);
        for (y, &wyx) in w.row(x).iter().enumerate() {
            if wyx > 0.0 {
                mi += pxv * wyx * (wyx / py[y]).log2();
            }
        }
    }
    Ok(mi.max(0.0))
}

/// Arimoto's conditional Renyi entropy `H_alpha(X|Y)` for `alpha` in (0, 1):
/// `alpha/(1-alpha) log2 sum_y (sum_x P(x,y)^alpha)^(1/alpha)`.
pub fn arimoto_cond_renyi(alpha: f64, pxy: &JointPmf) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfRange(format!(
            "conditional Renyi order must lie in (0, 1), got {alpha}"
        )));
    }
    let mut total = 0.0;
    for y in 0..pxy.cols() {
        let inner: f64 = (0..pxy.rows())
            .map(|x| pxy.get(x, y))
            .filter(|p| *p > 0.0)
            .map(|p| p.powf(alpha))
            .sum();
        if inner > 0.0 {
            total += inner.powf(1.0 / alpha);
        }
    }
    Ok(alpha / (1.0 - alpha) * total.log2())
}
