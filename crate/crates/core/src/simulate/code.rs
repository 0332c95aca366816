//! Code tables over `A^n`, the two random ensembles, and type-class permuters.

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::channel::FactoredDmc;
use crate::error::{Error, Result};
use crate::prob::Pmf;
use crate::typeclass::{enumerate_type_class, NType};

/// Exhaustive search and enumeration are limited to `2^24` sequences.
pub const MAX_ENUMERATION_BITS: f64 = 24.0;

/// `k^n` when `n log2 k <= 24`.
pub fn enumeration_size(k: usize, n: usize) -> Result<usize> {
    if k == 0 || n == 0 {
        return Err(Error::OutOfRange("alphabet and blocklength must be positive".into()));
    }
    let bits = n as f64 * (k as f64).log2();
    if bits > MAX_ENUMERATION_BITS + 1e-12 {
        return Err(Error::Infeasible(format!(
            "n*log2|alphabet| = {n}*log2({k}) = {bits:.3} exceeds {MAX_ENUMERATION_BITS}"
        )));
    }
    Ok(k.pow(n as u32))
}

/// Index of a sequence with the first symbol most significant, so index
/// order is lexicographic order.
pub fn sequence_index(seq: &[usize], k: usize) -> usize {
    seq.iter().fold(0, |acc, &s| acc * k + s)
}

pub fn sequence_from_index(mut index: usize, k: usize, n: usize) -> Vec<usize> {
    let mut seq = vec![0; n];
    for slot in seq.iter_mut().rev() {
        *slot = index % k;
        index /= k;
    }
    seq
}

/// What the table entries are.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeKind {
    /// Entries are parity sequences `s^n`; the codeword is `(a^n, s^n)`.
    Systematic,
    /// Entries are channel-input sequences `x^n`.
    Direct,
}

/// A code defined on every `a^n` in `A^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeTable {
    kind: CodeKind,
    n: usize,
    num_a: usize,
    num_entry_symbols: usize,
    entries: Vec<u16>,
}

impl CodeTable {
    /// `entries[i]` belongs to the message with index `i`.
    pub fn from_entries(kind: CodeKind, num_a: usize, num_entry_symbols: usize, entries: &[Vec<usize>]) -> Result<Self> {
        let n = entries.first().map_or(0, Vec::len);
        let size = enumeration_size(num_a, n)?;
        if entries.len() != size {
            return Err(Error::Infeasible(format!("table has {} entries, expected {size}", entries.len())));
        }
        if num_entry_symbols == 0 || num_entry_symbols > u16::MAX as usize {
            return Err(Error::OutOfRange(format!("entry alphabet size {num_entry_symbols}")));
        }
        let mut flat = Vec::with_capacity(size * n);
        for e in entries {
            if e.len() != n || e.iter().any(|&s| s >= num_entry_symbols) {
                return Err(Error::OutOfRange("malformed table entry".into()));
            }
            flat.extend(e.iter().map(|&s| s as u16));
        }
        Ok(Self { kind, n, num_a, num_entry_symbols, entries: flat })
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_a(&self) -> usize {
        self.num_a
    }

    pub fn num_entry_symbols(&self) -> usize {
        self.num_entry_symbols
    }

    pub fn num_messages(&self) -> usize {
        self.entries.len() / self.n
    }

    pub fn entry(&self, index: usize) -> Vec<usize> {
        self.entries[index * self.n..(index + 1) * self.n].iter().map(|&s| s as usize).collect()
    }

    /// Channel-input sequence for the message with index `index`.
    pub fn codeword(&self, index: usize, fd: &FactoredDmc) -> Vec<usize> {
        let entry = self.entry(index);
        match self.kind {
            CodeKind::Direct => entry,
            CodeKind::Systematic => sequence_from_index(index, self.num_a, self.n)
                .into_iter()
                .zip(entry)
                .map(|(a, s)| fd.x_of(a, s))
                .collect(),
        }
    }

    /// Checks that the table can be sent over `fd`.
    pub fn check_channel(&self, fd: &FactoredDmc) -> Result<()> {
        let ok = match self.kind {
            CodeKind::Direct => self.num_entry_symbols == fd.base().num_inputs(),
            CodeKind::Systematic => self.num_a == fd.num_a() && self.num_entry_symbols == fd.num_s(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch("code table does not fit the channel alphabets".into()))
        }
    }
}

/// Every entry symbol drawn i.i.d. from `dist`: parities from `P_S` for a
/// systematic code, codewords from `P_X` for a direct one.
pub fn sample_code_iid(kind: CodeKind, n: usize, num_a: usize, dist: &Pmf, rng: &mut ChaCha8Rng) -> Result<CodeTable> {
    let size = enumeration_size(num_a, n)?;
    let sampler = WeightedIndex::new(dist.probs()).map_err(|e| Error::InvalidPmf(e.to_string()))?;
    let entries: Vec<Vec<usize>> = (0..size).map(|_| (0..n).map(|_| sampler.sample(rng)).collect()).collect();
    CodeTable::from_entries(kind, num_a, dist.len(), &entries)
}

/// `v = G u xor b` over GF(2) with `u` of `in_bits` and `v` of `out_bits`
/// bits. Rows of `G` are bit masks over the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    in_bits: usize,
    rows: Vec<u64>,
    offset: u64,
}

impl AffineMap {
    pub fn from_parts(in_bits: usize, rows: Vec<u64>, offset: u64) -> Result<Self> {
        if in_bits > 64 || rows.len() > 64 {
            return Err(Error::Infeasible("affine maps are limited to 64 input and output bits".into()));
        }
        let in_mask = if in_bits == 64 { u64::MAX } else { (1u64 << in_bits) - 1 };
        let out_mask = if rows.len() == 64 { u64::MAX } else { (1u64 << rows.len()) - 1 };
        if rows.iter().any(|r| r & !in_mask != 0) || offset & !out_mask != 0 {
            return Err(Error::OutOfRange("affine map entries exceed the declared widths".into()));
        }
        Ok(Self { in_bits, rows, offset })
    }

    /// Uniform `G` and `b`.
    pub fn sample(in_bits: usize, out_bits: usize, rng: &mut ChaCha8Rng) -> Result<Self> {
        let in_mask = if in_bits >= 64 { u64::MAX } else { (1u64 << in_bits) - 1 };
        let out_mask = if out_bits >= 64 { u64::MAX } else { (1u64 << out_bits) - 1 };
        let rows = (0..out_bits).map(|_| rng.gen::<u64>() & in_mask).collect();
        let offset = rng.gen::<u64>() & out_mask;
        Self::from_parts(in_bits, rows, offset)
    }

    pub fn in_bits(&self) -> usize {
        self.in_bits
    }

    pub fn out_bits(&self) -> usize {
        self.rows.len()
    }

    pub fn apply(&self, u: u64) -> u64 {
        self.rows
            .iter()
            .enumerate()
            .fold(self.offset, |v, (j, row)| v ^ ((((row & u).count_ones() & 1) as u64) << j))
    }
}

fn bits_for(k: usize, what: &str) -> Result<usize> {
    if k == 0 || !k.is_power_of_two() {
        return Err(Error::AlphabetMismatch(format!("|{what}| = {k} is not a power of two")));
    }
    Ok(k.trailing_zeros() as usize)
}

/// Packs a sequence of `bits`-bit symbols, first symbol in the top bits.
fn pack(seq: &[usize], bits: usize) -> u64 {
    seq.iter().fold(0u64, |acc, &s| (acc << bits) | s as u64)
}

fn unpack(mut v: u64, bits: usize, n: usize) -> Vec<usize> {
    let mask = (1u64 << bits) - 1;
    let mut seq = vec![0; n];
    for slot in seq.iter_mut().rev() {
        *slot = (v & mask) as usize;
        v >>= bits;
    }
    seq
}

/// Tabulates an affine map as a code: message bits in, entry bits out.
pub fn code_from_affine_map(kind: CodeKind, n: usize, num_a: usize, num_entry_symbols: usize, map: &AffineMap) -> Result<CodeTable> {
    let a_bits = bits_for(num_a, "A")?;
    let e_bits = bits_for(num_entry_symbols, "entry alphabet")?;
    if map.in_bits() != n * a_bits || map.out_bits() != n * e_bits {
        return Err(Error::AlphabetMismatch("affine map widths do not match n and the alphabets".into()));
    }
    let size = enumeration_size(num_a, n)?;
    let entries: Vec<Vec<usize>> = (0..size)
        .map(|i| unpack(map.apply(pack(&sequence_from_index(i, num_a, n), a_bits)), e_bits, n))
        .collect();
    CodeTable::from_entries(kind, num_a, num_entry_symbols, &entries)
}

/// Systematic code from a uniformly drawn affine map with
/// `|A| = 2^(m-p)` and `|S| = 2^p`.
pub fn sample_code_affine_binary(n: usize, m_bits: usize, p_bits: usize, rng: &mut ChaCha8Rng) -> Result<CodeTable> {
    if p_bits > m_bits || n * p_bits > 64 {
        return Err(Error::OutOfRange(format!("need p <= m and n*p <= 64, got m={m_bits}, p={p_bits}, n={n}")));
    }
    let a_bits = m_bits - p_bits;
    enumeration_size(1usize << a_bits, n)?;
    let map = AffineMap::sample(n * a_bits, n * p_bits, rng)?;
    code_from_affine_map(CodeKind::Systematic, n, 1 << a_bits, 1 << p_bits, &map)
}

/// Direct code from a uniformly drawn affine map `A^n -> X^n`.
pub fn sample_direct_code_affine_binary(n: usize, num_a: usize, num_x: usize, rng: &mut ChaCha8Rng) -> Result<CodeTable> {
    let a_bits = bits_for(num_a, "A")?;
    let x_bits = bits_for(num_x, "X")?;
    if n * x_bits > 64 {
        return Err(Error::OutOfRange("affine codewords are limited to 64 bits".into()));
    }
    enumeration_size(num_a, n)?;
    let map = AffineMap::sample(n * a_bits, n * x_bits, rng)?;
    code_from_affine_map(CodeKind::Direct, n, num_a, num_x, &map)
}

/// A permutation of `A^n` that permutes one type class and fixes every
/// other sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permuter {
    forward: Vec<u32>,
    inverse: Vec<u32>,
}

impl Permuter {
    pub fn identity(num_messages: usize) -> Self {
        let forward: Vec<u32> = (0..num_messages as u32).collect();
        Self { inverse: forward.clone(), forward }
    }

    pub fn apply(&self, index: usize) -> usize {
        self.forward[index] as usize
    }

    pub fn invert(&self, index: usize) -> usize {
        self.inverse[index] as usize
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }
}

/// Indices of the members of `T(t)` in increasing (lexicographic) order.
pub fn type_class_indices(t: &NType) -> Result<Vec<usize>> {
    let k = t.alphabet().len();
    enumeration_size(k, t.n() as usize)?;
    let members = enumerate_type_class(t, 1u128 << MAX_ENUMERATION_BITS as u32)?;
    Ok(members.iter().map(|s| sequence_index(s, k)).collect())
}

/// Uniformly random permutation of `T(t)`, identity elsewhere.
pub fn sample_permuter(t: &NType, rng: &mut ChaCha8Rng) -> Result<Permuter> {
    let size = enumeration_size(t.alphabet().len(), t.n() as usize)?;
    let members = type_class_indices(t)?;
    let mut images = members.clone();
    images.shuffle(rng);
    let mut p = Permuter::identity(size);
    for (&from, &to) in members.iter().zip(&images) {
        p.forward[from] = to as u32;
        p.inverse[to] = from as u32;
    }
    Ok(p)
}
