//! Source models, exhaustive (mismatched) MAP decoding and exact error
//! probability by enumeration of `Y^n`.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{Dmc, FactoredDmc};
use crate::error::{Error, Result};
use crate::prob::Pmf;
use crate::typeclass::{unrank_type_sequence, NType};

use super::code::{enumeration_size, sequence_index, CodeTable, Permuter};

/// Metrics closer than this (in bits) count as tied; the tie goes to the
/// smaller message index.
pub const TIE_TOLERANCE_BITS: f64 = 1e-9;

/// A law on `A^n`, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceModel {
    n: usize,
    num_a: usize,
    probs: Vec<f64>,
    support: Vec<usize>,
}

impl SourceModel {
    /// The DMS `P_A^n`.
    pub fn iid(pa: &Pmf, n: usize) -> Result<Self> {
        let size = enumeration_size(pa.len(), n)?;
        let mut probs = vec![1.0; size];
        // probs[i] = prod_k pa(a_k), built one position at a time
        let mut block = 1;
        for _ in 0..n {
            let prev: Vec<f64> = probs[..block].to_vec();
            for (a, &p) in pa.probs().iter().enumerate() {
                for (j, &q) in prev.iter().enumerate() {
                    probs[a * block + j] = q * p;
                }
            }
            block *= pa.len();
        }
        Self::from_probs(n, pa.len(), probs)
    }

    /// Uniform on the listed message indices.
    pub fn uniform_on(num_a: usize, n: usize, support: &[usize]) -> Result<Self> {
        let size = enumeration_size(num_a, n)?;
        if support.is_empty() || support.iter().any(|&i| i >= size) {
            return Err(Error::OutOfRange("support must be a nonempty subset of A^n".into()));
        }
        let mut probs = vec![0.0; size];
        let mass = 1.0 / support.len() as f64;
        for &i in support {
            probs[i] = mass;
        }
        Self::from_probs(n, num_a, probs)
    }

    /// Uniform on the lexicographically first `ceil(fraction |T|)` members
    /// of `T(t)`.
    pub fn type_class_prefix(t: &NType, fraction: f64) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::OutOfRange(format!("support fraction {fraction} outside (0, 1]")));
        }
        let k = t.alphabet().len();
        let n = t.n() as usize;
        enumeration_size(k, n)?;
        let card = t.cardinality().expect("fits after the size check");
        let keep = ((fraction * card as f64).ceil() as u128).clamp(1, card);
        let support = (0..keep)
            .map(|r| unrank_type_sequence(t, r).map(|s| sequence_index(&s, k)))
            .collect::<Result<Vec<_>>>()?;
        Self::uniform_on(k, n, &support)
    }

    fn from_probs(n: usize, num_a: usize, probs: Vec<f64>) -> Result<Self> {
        let support = (0..probs.len()).filter(|&i| probs[i] > 0.0).collect();
        Ok(Self { n, num_a, probs, support })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_a(&self) -> usize {
        self.num_a
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probs[index]
    }

    pub fn log2_prob(&self, index: usize) -> f64 {
        self.probs[index].log2()
    }

    /// Message indices with positive probability, increasing.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        let weights: Vec<f64> = self.support.iter().map(|&i| self.probs[i]).collect();
        if weights.iter().all(|&w| w == weights[0]) {
            return self.support[rng.gen_range(0..self.support.len())];
        }
        let sampler = WeightedIndex::new(&weights).expect("positive weights");
        self.support[sampler.sample(rng)]
    }
}

/// `x^n` for each message: `codewords[m] = code(phi(m))`.
pub fn effective_codebook(code: &CodeTable, fd: &FactoredDmc, permuter: Option<&Permuter>) -> Result<Vec<Vec<usize>>> {
    code.check_channel(fd)?;
    if let Some(p) = permuter {
        if p.len() != code.num_messages() {
            return Err(Error::AlphabetMismatch("permuter and code cover different message sets".into()));
        }
    }
    Ok((0..code.num_messages())
        .map(|m| code.codeword(permuter.map_or(m, |p| p.apply(m)), fd))
        .collect())
}

/// Exhaustive argmax of `log2 W^n(y|x(m)) + log2 prior(m)` over all of `A^n`.
#[derive(Debug, Clone)]
pub struct Decoder {
    n: usize,
    num_y: usize,
    /// Row-major `|X| x |Y|` table of `log2 W(y|x)`.
    log_w: Vec<f64>,
    /// Message-major `M x n` channel inputs.
    codewords: Vec<usize>,
    log_prior: Vec<f64>,
}

impl Decoder {
    pub fn new(codewords: &[Vec<usize>], prior: &SourceModel, w: &Dmc) -> Result<Self> {
        let n = prior.n();
        if codewords.len() != prior.probs.len() || codewords.iter().any(|c| c.len() != n) {
            return Err(Error::AlphabetMismatch("codebook does not cover A^n".into()));
        }
        if codewords.iter().flatten().any(|&x| x >= w.num_inputs()) {
            return Err(Error::AlphabetMismatch("codeword symbol outside the channel input alphabet".into()));
        }
        let log_w = (0..w.num_inputs())
            .flat_map(|x| w.row(x).iter().map(|p| p.log2()).collect::<Vec<_>>())
            .collect();
        Ok(Self {
            n,
            num_y: w.num_outputs(),
            log_w,
            codewords: codewords.iter().flatten().copied().collect(),
            log_prior: (0..prior.probs.len()).map(|i| prior.log2_prob(i)).collect(),
        })
    }

    pub fn num_messages(&self) -> usize {
        self.log_prior.len()
    }

    fn log_w(&self, x: usize, y: usize) -> f64 {
        self.log_w[x * self.num_y + y]
    }

    /// `log2 W^n(y|x(m))`, summed left to right.
    pub fn log_likelihood(&self, m: usize, y: &[usize]) -> f64 {
        let cw = &self.codewords[m * self.n..(m + 1) * self.n];
        cw.iter().zip(y).fold(0.0, |acc, (&x, &yk)| acc + self.log_w(x, yk))
    }

    fn pick(&self, log_lik: impl Iterator<Item = f64>) -> usize {
        let mut best = 0;
        let mut best_metric = f64::NEG_INFINITY;
        for (m, ll) in log_lik.enumerate() {
            let metric = ll + self.log_prior[m];
            if m == 0 || metric > best_metric + TIE_TOLERANCE_BITS {
                best = m;
                best_metric = metric;
            }
        }
        best
    }

    pub fn decode(&self, y: &[usize]) -> usize {
        self.pick((0..self.num_messages()).map(|m| self.log_likelihood(m, y)))
    }

    /// `sum_y sum_{m in supp Q, m != g(y)} Q(m) W^n(y|x(m))`.
    pub fn exact_error_probability(&self, source: &SourceModel) -> Result<f64> {
        let n = self.n;
        let big_m = self.num_messages();
        enumeration_size(self.num_y, n)?;
        // levels[k*M + m] = log-likelihood of the first k received symbols
        let mut levels = vec![0.0; (n + 1) * big_m];
        let mut y = vec![0usize; n];
        let refresh = |levels: &mut Vec<f64>, y: &[usize], from: usize| {
            for k in from..n {
                for m in 0..big_m {
                    let x = self.codewords[m * n + k];
                    levels[(k + 1) * big_m + m] = levels[k * big_m + m] + self.log_w(x, y[k]);
                }
            }
        };
        refresh(&mut levels, &y, 0);
        let mut total = 0.0;
        loop {
            let leaf = &levels[n * big_m..];
            let best = self.pick(leaf.iter().copied());
            for &m in source.support() {
                if m != best {
                    total += source.prob(m) * leaf[m].exp2();
                }
            }
            let mut k = n;
            loop {
                if k == 0 {
                    return Ok(total);
                }
                k -= 1;
                y[k] += 1;
                if y[k] < self.num_y {
                    break;
                }
                y[k] = 0;
            }
            refresh(&mut levels, &y, k);
        }
    }

    /// Draws `y^n` for message `m`.
    pub fn transmit(&self, m: usize, w: &Dmc, rng: &mut ChaCha8Rng) -> Vec<usize> {
        self.codewords[m * self.n..(m + 1) * self.n]
            .iter()
            .map(|&x| WeightedIndex::new(w.row(x)).expect("stochastic row").sample(rng))
            .collect()
    }
}

/// MAP decoding of `y` with the given prior over `A^n`.
pub fn map_decode(y: &[usize], code: &CodeTable, prior: &SourceModel, fd: &FactoredDmc) -> Result<usize> {
    let cws = effective_codebook(code, fd, None)?;
    Ok(Decoder::new(&cws, prior, fd.base())?.decode(y))
}

/// Mismatched MAP decoding: prior `P_A^n` over all of `A^n`, codewords
/// `code(phi(a))`.
pub fn mmap_decode(y: &[usize], code: &CodeTable, pa: &Pmf, fd: &FactoredDmc, permuter: Option<&Permuter>) -> Result<usize> {
    let cws = effective_codebook(code, fd, permuter)?;
    let prior = SourceModel::iid(pa, code.n())?;
    Ok(Decoder::new(&cws, &prior, fd.base())?.decode(y))
}

#[cfg(test)]
mod tests {
    use super::super::code::{sample_code_iid, sequence_from_index, CodeKind};
    use super::*;
    use crate::channel::make_bsc;
    use crate::prob::index_labels;
    use crate::typeclass::NType;
    use rand::SeedableRng;

    fn bsc_pair(p: f64) -> FactoredDmc {
        FactoredDmc::parallel(&make_bsc(p).unwrap(), &make_bsc(p).unwrap()).unwrap()
    }

    fn noiseless_pair() -> FactoredDmc {
        FactoredDmc::row_major(Dmc::identity(4).unwrap(), index_labels(2), index_labels(2)).unwrap()
    }

    fn half() -> Pmf {
        Pmf::indexed(vec![0.5, 0.5]).unwrap()
    }

    fn all_y(num_y: usize, n: usize) -> Vec<Vec<usize>> {
        (0..num_y.pow(n as u32)).map(|i| sequence_from_index(i, num_y, n)).collect()
    }

    /// Straight product formulas, no logs, lowest index wins ties.
    fn oracle_argmax(y: &[usize], cws: &[Vec<usize>], prior: &[f64], w: &Dmc) -> usize {
        let post: Vec<f64> = cws
            .iter()
            .zip(prior)
            .map(|(cw, p)| cw.iter().zip(y).map(|(&x, &yk)| w.prob(x, yk)).product::<f64>() * p)
            .collect();
        let top = post.iter().cloned().fold(0.0, f64::max);
        post.iter().position(|&v| v >= top * (1.0 - 1e-9)).unwrap()
    }

    #[test]
    fn iid_source_probabilities() {
        let pa = Pmf::indexed(vec![0.2, 0.3, 0.5]).unwrap();
        let q = SourceModel::iid(&pa, 3).unwrap();
        for i in 0..27 {
            let seq = sequence_from_index(i, 3, 3);
            let expect: f64 = seq.iter().map(|&a| pa.prob(a)).product();
            assert!((q.prob(i) - expect).abs() < 1e-15);
        }
        assert_eq!(q.support().len(), 27);
    }

    #[test]
    fn type_class_prefix_takes_lexicographic_head() {
        let t = NType::new(index_labels(2), vec![2, 2]).unwrap();
        let q = SourceModel::type_class_prefix(&t, 0.5).unwrap();
        // T = 0011, 0101, 0110, 1001, 1010, 1100
        assert_eq!(q.support(), &[3, 5, 6]);
        assert!((q.prob(5) - 1.0 / 3.0).abs() < 1e-15);
        let full = SourceModel::type_class_prefix(&t, 1.0).unwrap();
        assert_eq!(full.support(), &[3, 5, 6, 9, 10, 12]);
        let tiny = SourceModel::type_class_prefix(&t, 1e-9).unwrap();
        assert_eq!(tiny.support(), &[3]);
        assert!(SourceModel::type_class_prefix(&t, 0.0).is_err());
    }

    #[test]
    fn noiseless_channel_recovers_message() {
        let fd = noiseless_pair();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let code = sample_code_iid(CodeKind::Systematic, 3, 2, &half(), &mut rng).unwrap();
        let prior = SourceModel::iid(&Pmf::indexed(vec![0.7, 0.3]).unwrap(), 3).unwrap();
        for m in 0..8 {
            let y = code.codeword(m, &fd);
            assert_eq!(map_decode(&y, &code, &prior, &fd).unwrap(), m);
        }
    }

    #[test]
    fn exact_ties_go_to_smaller_message() {
        let fd = FactoredDmc::unfactored(make_bsc(0.2).unwrap());
        let entries = vec![vec![0, 1], vec![1, 0], vec![0, 0], vec![1, 1]];
        let code = CodeTable::from_entries(CodeKind::Direct, 2, 2, &entries).unwrap();
        let prior = SourceModel::iid(&half(), 2).unwrap();
        // y = 00 is at distance 1 from messages 0 and 1, distance 0 from 2
        assert_eq!(map_decode(&[0, 0], &code, &prior, &fd).unwrap(), 2);
        // y = 01: message 0 matches exactly; y = 10 likewise for message 1
        assert_eq!(map_decode(&[0, 1], &code, &prior, &fd).unwrap(), 0);
        // duplicate codewords: both equal, smaller wins
        let dup = CodeTable::from_entries(CodeKind::Direct, 2, 2, &[vec![1, 1], vec![0, 0], vec![1, 1], vec![0, 0]]).unwrap();
        assert_eq!(map_decode(&[1, 1], &dup, &prior, &fd).unwrap(), 0);
        assert_eq!(map_decode(&[0, 0], &dup, &prior, &fd).unwrap(), 1);
    }

    #[test]
    fn map_decoder_matches_posterior_table() {
        let fd = bsc_pair(0.1);
        let pa = Pmf::indexed(vec![0.8, 0.2]).unwrap();
        let prior = SourceModel::iid(&pa, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let code = sample_code_iid(CodeKind::Systematic, 2, 2, &half(), &mut rng).unwrap();
            let cws: Vec<Vec<usize>> = (0..4).map(|m| code.codeword(m, &fd)).collect();
            let pri: Vec<f64> = (0..4).map(|m| prior.prob(m)).collect();
            for y in all_y(4, 2) {
                let want = oracle_argmax(&y, &cws, &pri, fd.base());
                assert_eq!(map_decode(&y, &code, &prior, &fd).unwrap(), want);
            }
        }
    }

    #[test]
    fn mmap_with_matched_prior_and_noiseless_channel() {
        let fd = noiseless_pair();
        let t = NType::new(index_labels(2), vec![2, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let code = sample_code_iid(CodeKind::Systematic, 4, 2, &half(), &mut rng).unwrap();
        let id = Permuter::identity(16);
        for m in super::super::code::type_class_indices(&t).unwrap() {
            let y = code.codeword(m, &fd);
            assert_eq!(mmap_decode(&y, &code, &half(), &fd, Some(&id)).unwrap(), m);
        }
    }

    #[test]
    fn mmap_searches_beyond_type_class() {
        let fd = FactoredDmc::unfactored(Dmc::identity(2).unwrap());
        let t = NType::new(index_labels(2), vec![1, 1]).unwrap();
        assert_eq!(t.cardinality(), Some(2));
        // message 00 (outside T) owns codeword 11; the decoder can return it
        let entries = vec![vec![1, 1], vec![0, 1], vec![1, 0], vec![0, 0]];
        let code = CodeTable::from_entries(CodeKind::Direct, 2, 2, &entries).unwrap();
        assert_eq!(code.num_messages(), 4);
        assert_eq!(mmap_decode(&[1, 1], &code, &half(), &fd, None).unwrap(), 0);
    }

    #[test]
    fn mmap_decoder_matches_mismatched_posterior_table() {
        let fd = bsc_pair(0.15);
        let pa = Pmf::indexed(vec![0.75, 0.25]).unwrap();
        let t = NType::new(index_labels(2), vec![1, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let code = sample_code_iid(CodeKind::Systematic, 2, 2, &half(), &mut rng).unwrap();
            let perm = super::super::code::sample_permuter(&t, &mut rng).unwrap();
            let cws: Vec<Vec<usize>> = (0..4).map(|m| code.codeword(perm.apply(m), &fd)).collect();
            let pri: Vec<f64> = (0..4)
                .map(|m| sequence_from_index(m, 2, 2).iter().map(|&a| pa.prob(a)).product())
                .collect();
            for y in all_y(4, 2) {
                let want = oracle_argmax(&y, &cws, &pri, fd.base());
                assert_eq!(mmap_decode(&y, &code, &pa, &fd, Some(&perm)).unwrap(), want);
            }
        }
    }

    #[test]
    fn exact_error_probability_examples() {
        let fd = noiseless_pair();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let code = sample_code_iid(CodeKind::Systematic, 3, 2, &half(), &mut rng).unwrap();
        let q = SourceModel::iid(&half(), 3).unwrap();
        let dec = Decoder::new(&effective_codebook(&code, &fd, None).unwrap(), &q, fd.base()).unwrap();
        assert_eq!(dec.exact_error_probability(&q).unwrap(), 0.0);

        // every message sent with the same codeword: the decoder always says 0
        let w = make_bsc(0.3).unwrap();
        let cws = vec![vec![1, 0, 1]; 8];
        for k in [2usize, 5, 8] {
            let q = SourceModel::uniform_on(2, 3, &(0..k).collect::<Vec<_>>()).unwrap();
            let dec = Decoder::new(&cws, &q, &w).unwrap();
            let pe = dec.exact_error_probability(&q).unwrap();
            assert!((pe - (k - 1) as f64 / k as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_error_probability_matches_direct_sum() {
        let fd = bsc_pair(0.2);
        let pa = Pmf::indexed(vec![0.6, 0.4]).unwrap();
        let q = SourceModel::iid(&pa, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let code = sample_code_iid(CodeKind::Systematic, 2, 2, &half(), &mut rng).unwrap();
        let cws = effective_codebook(&code, &fd, None).unwrap();
        let dec = Decoder::new(&cws, &q, fd.base()).unwrap();
        let pri: Vec<f64> = (0..4).map(|m| q.prob(m)).collect();
        let mut want = 0.0;
        for y in all_y(4, 2) {
            let g = oracle_argmax(&y, &cws, &pri, fd.base());
            for m in 0..4 {
                if m != g {
                    let lik: f64 = cws[m].iter().zip(&y).map(|(&x, &yk)| fd.base().prob(x, yk)).product();
                    want += pri[m] * lik;
                }
            }
        }
        assert!((dec.exact_error_probability(&q).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn monte_carlo_agrees_with_exact() {
        let fd = bsc_pair(0.2);
        let pa = Pmf::indexed(vec![0.7, 0.3]).unwrap();
        let q = SourceModel::iid(&pa, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let code = sample_code_iid(CodeKind::Systematic, 2, 2, &half(), &mut rng).unwrap();
        let dec = Decoder::new(&effective_codebook(&code, &fd, None).unwrap(), &q, fd.base()).unwrap();
        let exact = dec.exact_error_probability(&q).unwrap();
        let trials = 200_000u64;
        let mut errors = 0u64;
        for _ in 0..trials {
            let m = q.sample(&mut rng);
            let y = dec.transmit(m, fd.base(), &mut rng);
            errors += (dec.decode(&y) != m) as u64;
        }
        let p_hat = errors as f64 / trials as f64;
        let (lo, hi) = super::super::experiment::wilson_interval(errors as f64, trials, super::super::experiment::Z_99);
        assert!(lo <= exact && exact <= hi, "{exact} not in [{lo}, {hi}] (p_hat {p_hat})");
    }
}
