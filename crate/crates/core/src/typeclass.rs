//! Method-of-types machinery: n-types, type-class sizes and bounds,
//! per-sequence probabilities, divergence-optimal quantization, and
//! lexicographic enumeration, ranking and unranking of type classes.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::prob::{entropy, kl_divergence, Pmf};

/// Blocklengths up to this value get exact big-integer multinomials.
pub const EXACT_MULTINOMIAL_MAX_N: u64 = 64;

/// Integer-count representation of an n-type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NType {
    alphabet: Vec<String>,
    counts: Vec<u64>,
    n: u64,
}

/// Exact size of a type class together with its entropy bounds, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypeClassInfo {
    pub log2_cardinality_exact: f64,
    pub lower_bound_bits: f64,
    pub upper_bound_bits: f64,
}

impl NType {
    pub fn new(alphabet: Vec<String>, counts: Vec<u64>) -> Result<Self> {
        if alphabet.is_empty() || alphabet.len() != counts.len() {
            return Err(Error::InvalidPmf(format!(
                "{} symbols but {} counts",
                alphabet.len(),
                counts.len()
            )));
        }
        crate::prob::check_distinct(&alphabet).map_err(Error::InvalidPmf)?;
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::InvalidPmf("blocklength must be positive".into()));
        }
        Ok(Self { alphabet, counts, n })
    }

    /// Reads `p` as an n-type, failing unless every `n p_i` is an integer.
    pub fn from_pmf_exact(p: &Pmf, n: u64) -> Result<Self> {
        let mut counts = Vec::with_capacity(p.len());
        for &pi in p.probs() {
            let c = pi * n as f64;
            let r = c.round();
            if (c - r).abs() > 1e-9 {
                return Err(Error::OutOfRange(format!(
                    "distribution {:?} is not an {n}-type",
                    p.probs()
                )));
            }
            counts.push(r as u64);
        }
        Self::new(p.labels().to_vec(), counts)
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// The same composition repeated `j` times (blocklength `j n`).
    pub fn scaled(&self, j: u64) -> Self {
        Self {
            alphabet: self.alphabet.clone(),
            counts: self.counts.iter().map(|c| c * j).collect(),
            n: self.n * j,
        }
    }

    pub fn as_pmf(&self) -> Pmf {
        let n = self.n as f64;
        Pmf::new(self.alphabet.clone(), self.counts.iter().map(|&c| c as f64 / n).collect())
            .expect("counts sum to n")
    }

    /// `n! / prod(c_i!)` if it fits in a `u128`.
    pub fn cardinality(&self) -> Option<u128> {
        multinomial_u128(&self.counts)
    }

    /// Whether `seq` has exactly these counts.
    pub fn contains(&self, seq: &[usize]) -> bool {
        if seq.len() as u64 != self.n {
            return false;
        }
        let mut counts = vec![0u64; self.counts.len()];
        for &s in seq {
            match counts.get_mut(s) {
                Some(c) => *c += 1,
                None => return false,
            }
        }
        counts == self.counts
    }
}

/// Multinomial coefficient via a product of binomials, `None` on overflow.
pub fn multinomial_u128(counts: &[u64]) -> Option<u128> {
    let mut total: u128 = 1;
    let mut placed: u64 = 0;
    for &c in counts {
        for k in 1..=c {
            placed += 1;
            // k / gcd(total, k) divides placed, so the product never exceeds the result
            let g = gcd(total, k as u128);
            total = (total / g).checked_mul(placed as u128 / (k as u128 / g))?;
        }
    }
    Some(total)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn multinomial_big(counts: &[u64]) -> BigUint {
    let mut total = BigUint::one();
    let mut placed: u64 = 0;
    for &c in counts {
        for k in 1..=c {
            placed += 1;
            total = total * BigUint::from(placed) / BigUint::from(k);
        }
    }
    total
}

fn log2_multinomial(counts: &[u64], n: u64) -> f64 {
    if n <= EXACT_MULTINOMIAL_MAX_N {
        let m = multinomial_big(counts);
        m.to_f64().expect("finite for n <= 64").log2()
    } else {
        let ln = ln_gamma(n as f64 + 1.0) - counts.iter().map(|&c| ln_gamma(c as f64 + 1.0)).sum::<f64>();
        ln / std::f64::consts::LN_2
    }
}

/// Exact `log2 |T(P)|` with the bounds `nH(P) - |Z| log2(n+1) <= . <= nH(P)`.
pub fn type_class_info(t: &NType) -> TypeClassInfo {
    let n = t.n as f64;
    let nh = n * entropy(&t.as_pmf());
    TypeClassInfo {
        log2_cardinality_exact: log2_multinomial(&t.counts, t.n),
        lower_bound_bits: nh - t.alphabet.len() as f64 * (n + 1.0).log2(),
        upper_bound_bits: nh,
    }
}

/// `log2 q^n(z^n)` for any `z^n` of type `t`, i.e. `-n (H(P) + D(P||q))`.
/// Returns `-inf` when the type puts mass outside the support of `q`.
pub fn type_sequence_prob(t: &NType, q: &Pmf) -> Result<f64> {
    q.ensure_alphabet(&t.alphabet, "type sequence probability")?;
    let p = t.as_pmf();
    let d = kl_divergence(&p, q)?;
    if d.is_infinite() {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(-(t.n as f64) * (entropy(&p) + d))
}

/// Contribution of symbol `i` with count `c` to `D(c/n || target)`.
fn divergence_term(c: i64, n: f64, target: f64) -> f64 {
    if c == 0 {
        0.0
    } else {
        let p = c as f64 / n;
        p * (p / target).log2()
    }
}

/// Divergence-closest n-type to `target` among types supported inside
/// `supp(target)`.
///
/// `D(c/n || target)` is a sum of convex functions of the individual counts,
/// so handing out the `n` counts one at a time to the symbol with the
/// smallest marginal increase is optimal. Ties go to the lowest index.
pub fn quantize_to_ntype(target: &Pmf, n: u64) -> Result<NType> {
    if n == 0 {
        return Err(Error::OutOfRange("blocklength must be positive".into()));
    }
    let nf = n as f64;
    let probs = target.probs();
    let support: Vec<usize> = target.support();
    let mut counts = vec![0i64; probs.len()];
    let increment =
        |c: i64, i: usize| divergence_term(c + 1, nf, probs[i]) - divergence_term(c, nf, probs[i]);
    for _ in 0..n {
        let mut best = support[0];
        let mut best_inc = increment(counts[best], best);
        for &i in &support[1..] {
            let inc = increment(counts[i], i);
            if inc < best_inc {
                best = i;
                best_inc = inc;
            }
        }
        counts[best] += 1;
    }
    NType::new(target.labels().to_vec(), counts.into_iter().map(|c| c as u64).collect())
}

/// All sequences of type `t` in lexicographic order of symbol indices.
/// Refuses when `|T(t)|` exceeds `max_count`.
pub fn enumerate_type_class(t: &NType, max_count: u128) -> Result<Vec<Vec<usize>>> {
    let card = t.cardinality().unwrap_or(u128::MAX);
    if card > max_count {
        return Err(Error::TypeClassTooLarge { cardinality: card, limit: max_count });
    }
    let mut seq: Vec<usize> = t
        .counts
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| std::iter::repeat_n(i, c as usize))
        .collect();
    let mut out = Vec::with_capacity(card as usize);
    loop {
        out.push(seq.clone());
        if !next_permutation(&mut seq) {
            break;
        }
    }
    Ok(out)
}

fn next_permutation(seq: &mut [usize]) -> bool {
    if seq.len() < 2 {
        return false;
    }
    let mut i = seq.len() - 1;
    while i > 0 && seq[i - 1] >= seq[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = seq.len() - 1;
    while seq[j] <= seq[i - 1] {
        j -= 1;
    }
    seq.swap(i - 1, j);
    seq[i..].reverse();
    true
}

/// Number of completions of a prefix given the remaining counts.
fn completions(remaining: &[u64]) -> Result<u128> {
    multinomial_u128(remaining).ok_or_else(|| Error::Infeasible("type class cardinality overflows u128".into()))
}

/// The `rank`-th member of `T(t)` in lexicographic order.
pub fn unrank_type_sequence(t: &NType, rank: u128) -> Result<Vec<usize>> {
    let total = completions(&t.counts)?;
    if rank >= total {
        return Err(Error::OutOfRange(format!("rank {rank} outside 0..{total}")));
    }
    let mut remaining = t.counts.clone();
    let mut rank = rank;
    let mut seq = Vec::with_capacity(t.n as usize);
    for _ in 0..t.n {
        for s in 0..remaining.len() {
            if remaining[s] == 0 {
                continue;
            }
            remaining[s] -= 1;
            let block = completions(&remaining)?;
            if rank < block {
                seq.push(s);
                break;
            }
            rank -= block;
            remaining[s] += 1;
        }
    }
    Ok(seq)
}

/// Inverse of [`unrank_type_sequence`].
pub fn rank_type_sequence(t: &NType, seq: &[usize]) -> Result<u128> {
    if !t.contains(seq) {
        return Err(Error::OutOfRange("sequence is not a member of the type class".into()));
    }
    let mut remaining = t.counts.clone();
    let mut rank = 0u128;
    for &sym in seq {
        for s in 0..sym {
            if remaining[s] > 0 {
                remaining[s] -= 1;
                rank += completions(&remaining)?;
                remaining[s] += 1;
            }
        }
        remaining[sym] -= 1;
    }
    Ok(rank)
}
