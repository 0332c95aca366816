//! Discrete memoryless channels, the factored input alphabet `X = A x S`
//! used by amplitude shaping, and discretized ASK/AWGN channels.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::prob::{check_distinct, index_labels, Pmf};

/// Row-stochastic transition matrix `W(y|x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dmc {
    input_labels: Vec<String>,
    output_labels: Vec<String>,
    w: Vec<f64>,
}

/// JSON form of a channel: `{"input_labels":[...], "output_labels":[...], "w":[[...]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DmcDocument {
    pub input_labels: Vec<String>,
    pub output_labels: Vec<String>,
    pub w: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_labels: Option<Vec<String>>,
}

impl Dmc {
    /// Validates shape, non-negativity and row sums (within 1e-12), then
    /// renormalizes each row.
    pub fn new(input_labels: Vec<String>, output_labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_tolerance(input_labels, output_labels, rows, crate::prob::SUM_TOLERANCE)
    }

    fn with_tolerance(
        input_labels: Vec<String>,
        output_labels: Vec<String>,
        rows: Vec<Vec<f64>>,
        tol: f64,
    ) -> Result<Self> {
        if input_labels.is_empty() || output_labels.is_empty() {
            return Err(Error::InvalidChannel("empty alphabet".into()));
        }
        check_distinct(&input_labels).map_err(Error::InvalidChannel)?;
        check_distinct(&output_labels).map_err(Error::InvalidChannel)?;
        if rows.len() != input_labels.len() {
            return Err(Error::InvalidChannel(format!(
                "{} rows for {} inputs",
                rows.len(),
                input_labels.len()
            )));
        }
        let mut w = Vec::with_capacity(rows.len() * output_labels.len());
        for (x, row) in rows.into_iter().enumerate() {
            if row.len() != output_labels.len() {
                return Err(Error::InvalidChannel(format!(
                    "row {x} has {} entries, expected {}",
                    row.len(),
                    output_labels.len()
                )));
            }
            if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(Error::InvalidChannel(format!("row {x} has a negative or non-finite entry")));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > tol {
                return Err(Error::InvalidChannel(format!("row {x} sums to {total}")));
            }
            w.extend(row.iter().map(|p| p / total));
        }
        Ok(Self { input_labels, output_labels, w })
    }

    /// The `k x k` noiseless channel.
    pub fn identity(k: usize) -> Result<Self> {
        let rows = (0..k)
            .map(|x| (0..k).map(|y| if x == y { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(index_labels(k), index_labels(k), rows)
    }

    pub fn input_labels(&self) -> &[String] {
        &self.input_labels
    }

    pub fn output_labels(&self) -> &[String] {
        &self.output_labels
    }

    pub fn num_inputs(&self) -> usize {
        self.input_labels.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.output_labels.len()
    }

    pub fn row(&self, x: usize) -> &[f64] {
        let ny = self.num_outputs();
        &self.w[x * ny..(x + 1) * ny]
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.w[x * self.num_outputs() + y]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.num_inputs()).map(|x| self.row(x).to_vec()).collect()
    }

    /// Output law `sum_x p(x) W(y|x)` for input weights `px`.
    pub fn output_distribution(&self, px: &[f64]) -> Vec<f64> {
        let mut py = vec![0.0; self.num_outputs()];
        for (x, &p) in px.iter().enumerate() {
            if p > 0.0 {
                for (acc, wyx) in py.iter_mut().zip(self.row(x)) {
                    *acc += p * wyx;
                }
            }
        }
        py
    }

    pub fn to_document(&self) -> DmcDocument {
        DmcDocument {
            input_labels: self.input_labels.clone(),
            output_labels: self.output_labels.clone(),
            w: self.rows(),
            a_labels: None,
            s_labels: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document()).expect("channel document serializes")
    }

    /// Parses the JSON document. Rows are accepted within 1e-9 of unit sum,
    /// since hand-written decimal matrices rarely sum to one exactly.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DmcDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_document(doc)
    }

    pub fn from_document(doc: DmcDocument) -> Result<Self> {
        Self::with_tolerance(doc.input_labels, doc.output_labels, doc.w, 1e-9)
    }
}

/// A channel whose input alphabet is partitioned as `X = A x S`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactoredDmc {
    base: Dmc,
    a_labels: Vec<String>,
    s_labels: Vec<String>,
    /// `index_map[a * |S| + s]` is the input index of the pair `(a, s)`.
    index_map: Vec<usize>,
    inverse: Vec<(usize, usize)>,
}

impl FactoredDmc {
    pub fn new(base: Dmc, a_labels: Vec<String>, s_labels: Vec<String>, index_map: Vec<usize>) -> Result<Self> {
        let (na, ns) = (a_labels.len(), s_labels.len());
        if na == 0 || ns == 0 {
            return Err(Error::InvalidChannel("empty A or S alphabet".into()));
        }
        check_distinct(&a_labels).map_err(Error::InvalidChannel)?;
        check_distinct(&s_labels).map_err(Error::InvalidChannel)?;
        if na * ns != base.num_inputs() || index_map.len() != na * ns {
            return Err(Error::InvalidChannel(format!(
                "|A| x |S| = {} x {} does not match {} channel inputs",
                na,
                ns,
                base.num_inputs()
            )));
        }
        let mut inverse = vec![None; na * ns];
        for (pair, &x) in index_map.iter().enumerate() {
            match inverse.get_mut(x) {
                Some(slot @ None) => *slot = Some((pair / ns, pair % ns)),
                _ => return Err(Error::InvalidChannel("index map is not a bijection".into())),
            }
        }
        let inverse = inverse.into_iter().map(|p| p.expect("bijection")).collect();
        Ok(Self { base, a_labels, s_labels, index_map, inverse })
    }

    /// Factoring with `x = a * |S| + s`.
    pub fn row_major(base: Dmc, a_labels: Vec<String>, s_labels: Vec<String>) -> Result<Self> {
        let k = a_labels.len() * s_labels.len();
        Self::new(base, a_labels, s_labels, (0..k).collect())
    }

    /// Trivial factoring `A = X`, `|S| = 1`, for channels used without a
    /// systematic encoder.
    pub fn unfactored(base: Dmc) -> Self {
        let a = base.input_labels().to_vec();
        Self::row_major(base, a, vec!["-".into()]).expect("trivial factoring is valid")
    }

    /// Two independent channels used in parallel: `A` drives `first`, `S`
    /// drives `second`, and the output is the pair of their outputs.
    pub fn parallel(first: &Dmc, second: &Dmc) -> Result<Self> {
        let (na, ns) = (first.num_inputs(), second.num_inputs());
        let mut inputs = Vec::with_capacity(na * ns);
        let mut rows = Vec::with_capacity(na * ns);
        for a in 0..na {
            for s in 0..ns {
                inputs.push(format!("{}{}", first.input_labels()[a], second.input_labels()[s]));
                let mut row = Vec::with_capacity(first.num_outputs() * second.num_outputs());
                for p1 in first.row(a) {
                    row.extend(second.row(s).iter().map(|p2| p1 * p2));
                }
                rows.push(row);
            }
        }
        let outputs = first
            .output_labels()
            .iter()
            .flat_map(|y1| second.output_labels().iter().map(move |y2| format!("{y1}{y2}")))
            .collect();
        let base = Dmc::new(inputs, outputs, rows)?;
        Self::row_major(base, first.input_labels().to_vec(), second.input_labels().to_vec())
    }

    /// Row-major factoring when the document names `a_labels` and
    /// `s_labels`, the trivial one otherwise.
    pub fn from_document(mut doc: DmcDocument) -> Result<Self> {
        let factors = (doc.a_labels.take(), doc.s_labels.take());
        let base = Dmc::from_document(doc)?;
        match factors {
            (Some(a), Some(s)) => Self::row_major(base, a, s),
            (None, None) => Ok(Self::unfactored(base)),
            _ => Err(Error::InvalidChannel("a_labels and s_labels must be given together".into())),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DmcDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_document(doc)
    }

    pub fn base(&self) -> &Dmc {
        &self.base
    }

    pub fn a_labels(&self) -> &[String] {
        &self.a_labels
    }

    pub fn s_labels(&self) -> &[String] {
        &self.s_labels
    }

    pub fn num_a(&self) -> usize {
        self.a_labels.len()
    }

    pub fn num_s(&self) -> usize {
        self.s_labels.len()
    }

    /// Channel input index for the pair `(a, s)`.
    pub fn x_of(&self, a: usize, s: usize) -> usize {
        self.index_map[a * self.num_s() + s]
    }

    /// The pair `(a, s)` carried by input `x`.
    pub fn pair_of(&self, x: usize) -> (usize, usize) {
        self.inverse[x]
    }

    pub fn to_document(&self) -> DmcDocument {
        // The document form stores a row-major factoring, so rows are
        // emitted in (a, s) order.
        let xs: Vec<usize> = self.index_map.clone();
        DmcDocument {
            input_labels: xs.iter().map(|&x| self.base.input_labels()[x].clone()).collect(),
            output_labels: self.base.output_labels().to_vec(),
            w: xs.iter().map(|&x| self.base.row(x).to_vec()).collect(),
            a_labels: Some(self.a_labels.clone()),
            s_labels: Some(self.s_labels.clone()),
        }
    }
}

/// Binary symmetric channel with crossover probability `p` in `[0, 0.5]`.
pub fn make_bsc(p: f64) -> Result<Dmc> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::OutOfRange(format!("BSC crossover {p} outside [0, 0.5]")));
    }
    Dmc::new(index_labels(2), index_labels(2), vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
}

/// Parameters of a discretized `2^m`-ASK AWGN channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AskAwgn {
    pub m: u32,
    pub snr_db: f64,
    pub bins: usize,
    pub span_sigmas: f64,
}

impl AskAwgn {
    pub const DEFAULT_BINS: usize = 64;
    pub const DEFAULT_SPAN_SIGMAS: f64 = 4.0;

    pub fn new(m: u32, snr_db: f64) -> Self {
        Self { m, snr_db, bins: Self::DEFAULT_BINS, span_sigmas: Self::DEFAULT_SPAN_SIGMAS }
    }

    /// Scale factor making the average power one under uniform input.
    pub fn scale(&self) -> f64 {
        let order = (1u64 << self.m) as f64;
        (3.0 / (order * order - 1.0)).sqrt()
    }

    pub fn sigma(&self) -> f64 {
        10f64.powf(-self.snr_db / 20.0)
    }

    /// Unscaled amplitudes `1, 3, ..., 2^m - 1`.
    pub fn amplitudes(&self) -> Vec<f64> {
        (0..1u64 << (self.m - 1)).map(|i| (2 * i + 1) as f64).collect()
    }

    pub fn build(&self) -> Result<FactoredDmc> {
        make_ask_awgn(self.m, self.snr_db, self.bins, self.span_sigmas)
    }
}

/// Probability that `N(mean, sigma^2)` falls in `[lo, hi)`, computed through
/// complementary error functions so that tail cells keep their precision.
fn gaussian_mass(lo: f64, hi: f64, mean: f64, sigma: f64) -> f64 {
    let q = |t: f64| 0.5 * erfc(t / std::f64::consts::SQRT_2);
    let (l, h) = ((lo - mean) / sigma, (hi - mean) / sigma);
    if l >= 0.0 {
        q(l) - q(h)
    } else if h <= 0.0 {
        q(-h) - q(-l)
    } else {
        1.0 - q(h) - q(-l)
    }
}

/// `2^m`-ASK over AWGN with the output quantized into `bins` equal cells
/// spanning `+-(x_max + span_sigmas * sigma)` plus two unbounded tail cells.
///
/// Points are `{+-1, +-3, ...}` scaled to unit average power under uniform
/// input, and `SNR = 1 / sigma^2`. The amplitude alphabet is `{1, 3, ...}`
/// and the sign alphabet is `{+, -}`.
pub fn make_ask_awgn(m: u32, snr_db: f64, bins: usize, span_sigmas: f64) -> Result<FactoredDmc> {
    if !(1..=4).contains(&m) {
        return Err(Error::OutOfRange(format!("ASK order exponent m = {m} outside 1..=4")));
    }
    if !(2..=512).contains(&bins) {
        return Err(Error::OutOfRange(format!("bins = {bins} outside 2..=512")));
    }
    if !(span_sigmas > 0.0) || !span_sigmas.is_finite() || !snr_db.is_finite() {
        return Err(Error::OutOfRange("span and SNR must be finite, span positive".into()));
    }
    let params = AskAwgn { m, snr_db, bins, span_sigmas };
    let half = 1usize << (m - 1);
    let order = 2 * half;
    let scale = params.scale();
    let sigma = params.sigma();
    // Points in ascending order: -(M-1), ..., -1, 1, ..., M-1.
    let points: Vec<f64> = (0..order).map(|i| (2.0 * i as f64 - (order as f64 - 1.0)) * scale).collect();
    let reach = (order as f64 - 1.0) * scale + span_sigmas * sigma;
    let width = 2.0 * reach / bins as f64;
    let mut edges = Vec::with_capacity(bins + 3);
    edges.push(f64::NEG_INFINITY);
    edges.extend((0..=bins).map(|k| -reach + k as f64 * width));
    edges.push(f64::INFINITY);
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|&mu| {
            let row: Vec<f64> = edges.windows(2).map(|c| gaussian_mass(c[0], c[1], mu, sigma).max(0.0)).collect();
            let total: f64 = row.iter().sum();
            row.into_iter().map(|p| p / total).collect()
        })
        .collect();
    let input_labels = (0..order)
        .map(|i| format!("{}", 2 * i as i64 - (order as i64 - 1)))
        .collect();
    let output_labels = (0..bins + 2).map(|k| format!("y{k}")).collect();
    let base = Dmc::new(input_labels, output_labels, rows)?;
    let a_labels = (0..half).map(|i| format!("{}", 2 * i + 1)).collect();
    let s_labels = vec!["+".to_string(), "-".to_string()];
    let mut index_map = Vec::with_capacity(order);
    for a in 0..half {
        index_map.push(half + a);
        index_map.push(half - 1 - a);
    }
    FactoredDmc::new(base, a_labels, s_labels, index_map)
}

/// Maxwell-Boltzmann law `P(a) ~ exp(-nu a^2)` over the given amplitudes.
pub fn maxwell_boltzmann(amplitudes: &[f64], nu: f64) -> Result<Pmf> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::OutOfRange(format!("nu = {nu} must be finite and non-negative")));
    }
    if amplitudes.is_empty() {
        return Err(Error::InvalidPmf("no amplitudes".into()));
    }
    let min_sq = amplitudes.iter().map(|a| a * a).fold(f64::INFINITY, f64::min);
    let weights = amplitudes.iter().map(|a| (-nu * (a * a - min_sq)).exp()).collect();
    let labels = amplitudes.iter().map(|a| format!("{a}")).collect();
    Pmf::from_weights(labels, weights)
}

/// Product input `P_X(x) = P_A(a) P_S(s)` on the factored alphabet.
pub fn product_input(pa: &Pmf, ps: &Pmf, fd: &FactoredDmc) -> Result<Pmf> {
    if pa.len() != fd.num_a() || ps.len() != fd.num_s() {
        return Err(Error::AlphabetMismatch(format!(
            "P_A has {} symbols and P_S has {}, channel factors as {} x {}",
            pa.len(),
            ps.len(),
            fd.num_a(),
            fd.num_s()
        )));
    }
    let mut probs = vec![0.0; fd.base().num_inputs()];
    for a in 0..fd.num_a() {
        for s in 0..fd.num_s() {
            probs[fd.x_of(a, s)] = pa.prob(a) * ps.prob(s);
        }
    }
    Pmf::new(fd.base().input_labels().to_vec(), probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::mutual_information;

    #[test]
    fn bsc_shapes() {
        assert_eq!(make_bsc(0.0).unwrap().rows(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(make_bsc(0.5).unwrap().rows(), vec![vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert_eq!(make_bsc(0.11).unwrap().rows(), vec![vec![0.89, 0.11], vec![0.11, 0.89]]);
        assert!(make_bsc(0.6).is_err());
        assert!(make_bsc(-0.1).is_err());
    }

    #[test]
    fn dmc_validation() {
        let l = index_labels(2);
        assert!(Dmc::new(l.clone(), l.clone(), vec![vec![0.5, 0.4], vec![0.5, 0.5]]).is_err());
        assert!(Dmc::new(l.clone(), l.clone(), vec![vec![1.0, 0.0]]).is_err());
        assert!(Dmc::new(l.clone(), l.clone(), vec![vec![1.5, -0.5], vec![0.5, 0.5]]).is_err());
        assert!(Dmc::new(l.clone(), l.clone(), vec![vec![1.0], vec![1.0]]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let w = make_bsc(0.2).unwrap();
        let back = Dmc::from_json(&w.to_json()).unwrap();
        assert_eq!(back, w);
        assert!(Dmc::from_json(r#"{"input_labels":["a"],"output_labels":["x","y"],"w":[[0.5]]}"#).is_err());
        assert!(Dmc::from_json("not json").is_err());
        let lenient = Dmc::from_json(r#"{"input_labels":["a"],"output_labels":["x","y"],"w":[[0.3333333333,0.6666666667]]}"#);
        assert!(lenient.is_ok());
    }

    #[test]
    fn ask_binary_structure() {
        let fd = make_ask_awgn(1, 3.0, 32, 4.0).unwrap();
        assert_eq!(fd.num_a(), 1);
        assert_eq!(fd.num_s(), 2);
        assert_eq!(fd.base().num_inputs(), 2);
        assert_eq!(fd.base().num_outputs(), 34);
        assert_eq!(fd.base().input_labels(), &["-1".to_string(), "1".to_string()]);
        assert_eq!(fd.x_of(0, 0), 1);
        assert_eq!(fd.x_of(0, 1), 0);
    }

    #[test]
    fn ask_rows_stochastic_and_partition() {
        let fd = make_ask_awgn(2, 10.0, 64, 4.0).unwrap();
        for x in 0..4 {
            let s: f64 = fd.base().row(x).iter().sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
        // amplitude 3 with sign - is the leftmost point
        assert_eq!(fd.base().input_labels()[fd.x_of(1, 1)], "-3");
        assert_eq!(fd.base().input_labels()[fd.x_of(1, 0)], "3");
        assert_eq!(fd.base().input_labels()[fd.x_of(0, 1)], "-1");
        for x in 0..4 {
            let (a, s) = fd.pair_of(x);
            assert_eq!(fd.x_of(a, s), x);
        }
        // symmetric channel: row of -3 mirrors row of +3
        let (lo, hi) = (fd.base().row(0), fd.base().row(3));
        for k in 0..lo.len() {
            assert!((lo[k] - hi[lo.len() - 1 - k]).abs() < 1e-12);
        }
        // tail cells hold less than 1e-4 of any row at the default span
        for x in 0..4 {
            let row = fd.base().row(x);
            assert!(row[0] + row[row.len() - 1] < 1e-4);
        }
    }

    #[test]
    fn ask_mi_increases_with_bins() {
        let mut prev = 0.0;
        for bins in [8, 16, 32, 64] {
            let fd = make_ask_awgn(2, 10.0, bins, 4.0).unwrap();
            let px = Pmf::uniform(fd.base().input_labels().to_vec()).unwrap();
            let mi = mutual_information(&px, fd.base()).unwrap();
            assert!(mi > prev, "bins {bins}: {mi} <= {prev}");
            prev = mi;
        }
        assert!(prev < 2.0);
    }

    #[test]
    fn ask_binary_approaches_biawgn_capacity() {
        // BI-AWGN capacity at 0 dB by quadrature of the exact formula.
        let sigma: f64 = 1.0;
        let pdf = |y: f64, m: f64| (-(y - m).powi(2) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt());
        let steps = 200_000;
        let (lo, hi) = (-12.0, 12.0);
        let dy = (hi - lo) / steps as f64;
        let mut cap = 0.0;
        for k in 0..steps {
            let y = lo + (k as f64 + 0.5) * dy;
            let (p1, p0) = (pdf(y, 1.0), pdf(y, -1.0));
            let py = 0.5 * (p1 + p0);
            if p1 > 0.0 {
                cap += 0.5 * p1 * (p1 / py).log2() * dy;
            }
            if p0 > 0.0 {
                cap += 0.5 * p0 * (p0 / py).log2() * dy;
            }
        }
        let mut prev = 0.0;
        for bins in [4, 16, 64, 256] {
            let fd = make_ask_awgn(1, 0.0, bins, 6.0).unwrap();
            let px = Pmf::uniform(fd.base().input_labels().to_vec()).unwrap();
            let mi = mutual_information(&px, fd.base()).unwrap();
            assert!(mi > prev && mi < cap + 1e-9);
            prev = mi;
        }
        assert!(cap - prev < 1e-3, "cap {cap} mi {prev}");
    }

    #[test]
    fn ask_rejects_bad_parameters() {
        assert!(make_ask_awgn(0, 10.0, 64, 4.0).is_err());
        assert!(make_ask_awgn(5, 10.0, 64, 4.0).is_err());
        assert!(make_ask_awgn(2, 10.0, 1, 4.0).is_err());
        assert!(make_ask_awgn(2, 10.0, 1000, 4.0).is_err());
        assert!(make_ask_awgn(2, 10.0, 64, 0.0).is_err());
    }

    #[test]
    fn maxwell_boltzmann_examples() {
        let u = maxwell_boltzmann(&[1.0, 3.0, 5.0], 0.0).unwrap();
        assert!(u.probs().iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-15));
        let peaked = maxwell_boltzmann(&[1.0, 3.0], 50.0).unwrap();
        assert!(peaked.prob(1) < 1e-100);
        let mb = maxwell_boltzmann(&[1.0, 3.0], 0.1).unwrap();
        let (e1, e9) = ((-0.1f64).exp(), (-0.9f64).exp());
        assert!((mb.prob(0) - e1 / (e1 + e9)).abs() < 1e-15);
        assert!((mb.prob(0) - 0.6900).abs() < 1e-4);
        assert!(maxwell_boltzmann(&[1.0, 1.0], 0.1).is_err());
    }

    #[test]
    fn product_input_examples() {
        let bsc = make_bsc(0.1).unwrap();
        let fd = FactoredDmc::parallel(&bsc, &bsc).unwrap();
        let pa = Pmf::indexed(vec![0.7, 0.3]).unwrap();
        let ps = Pmf::indexed(vec![0.5, 0.5]).unwrap();
        let px = product_input(&pa, &ps, &fd).unwrap();
        assert_eq!(px.probs(), &[0.35, 0.35, 0.15, 0.15]);
        let u = Pmf::indexed(vec![0.5, 0.5]).unwrap();
        assert!(product_input(&u, &u, &fd).unwrap().probs().iter().all(|p| *p == 0.25));
        let point = Pmf::indexed(vec![0.0, 1.0]).unwrap();
        assert_eq!(product_input(&point, &ps, &fd).unwrap().probs(), &[0.0, 0.0, 0.5, 0.5]);
        assert!(product_input(&Pmf::indexed(vec![1.0]).unwrap(), &ps, &fd).is_err());
    }

    #[test]
    fn product_marginals_recover_factors() {
        let fd = make_ask_awgn(3, 8.0, 16, 4.0).unwrap();
        let pa = maxwell_boltzmann(&[1.0, 3.0, 5.0, 7.0], 0.07).unwrap();
        let pa = Pmf::new(fd.a_labels().to_vec(), pa.probs().to_vec()).unwrap();
        let ps = Pmf::new(fd.s_labels().to_vec(), vec![0.3, 0.7]).unwrap();
        let px = product_input(&pa, &ps, &fd).unwrap();
        for a in 0..4 {
            let m: f64 = (0..2).map(|s| px.prob(fd.x_of(a, s))).sum();
            assert!((m - pa.prob(a)).abs() < 1e-15);
        }
        for s in 0..2 {
            let m: f64 = (0..4).map(|a| px.prob(fd.x_of(a, s))).sum();
            assert!((m - ps.prob(s)).abs() < 1e-15);
        }
    }

    #[test]
    fn parallel_channel_is_product() {
        let (b1, b2) = (make_bsc(0.1).unwrap(), make_bsc(0.2).unwrap());
        let fd = FactoredDmc::parallel(&b1, &b2).unwrap();
        assert_eq!(fd.base().num_outputs(), 4);
        for a in 0..2 {
            for s in 0..2 {
                for y1 in 0..2 {
                    for y2 in 0..2 {
                        let p = fd.base().prob(fd.x_of(a, s), 2 * y1 + y2);
                        assert!((p - b1.prob(a, y1) * b2.prob(s, y2)).abs() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn factored_rejects_non_bijection() {
        let base = Dmc::identity(4).unwrap();
        assert!(FactoredDmc::new(base.clone(), index_labels(2), index_labels(2), vec![0, 0, 1, 2]).is_err());
        assert!(FactoredDmc::new(base, index_labels(3), index_labels(2), vec![0, 1, 2, 3]).is_err());
    }

    #[test]
    fn factored_document_roundtrip() {
        let fd = make_ask_awgn(2, 6.0, 8, 4.0).unwrap();
        let text = serde_json::to_string(&fd.to_document()).unwrap();
        let back = FactoredDmc::from_json(&text).unwrap();
        for a in 0..2 {
            for s in 0..2 {
                let (r1, r2) = (back.base().row(back.x_of(a, s)), fd.base().row(fd.x_of(a, s)));
                assert!(r1.iter().zip(r2).all(|(u, v)| (u - v).abs() < 1e-15));
            }
        }
        assert_eq!(back.a_labels(), fd.a_labels());
        let plain = FactoredDmc::from_json(&make_bsc(0.1).unwrap().to_json()).unwrap();
        assert_eq!(plain.num_s(), 1);
        let half = r#"{"input_labels":["0","1"],"output_labels":["0","1"],"w":[[1,0],[0,1]],"a_labels":["0","1"]}"#;
        assert!(FactoredDmc::from_json(half).is_err());
    }
}
