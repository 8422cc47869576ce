//! Bit blocks, index sets, the polar transform and the binary entropy.

use std::fmt;
use std::ops::Index;

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An ordered string of binary symbols stored one per byte.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitBlock(Vec<u8>);

impl BitBlock {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some((index, &value)) = bits.iter().enumerate().find(|(_, &b)| b > 1) {
            return Err(Error::NonBinary { index, value });
        }
        Ok(BitBlock(bits))
    }

    pub fn zeros(len: usize) -> Self {
        BitBlock(vec![0; len])
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        BitBlock(bits.iter().map(|&b| b as u8).collect())
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .enumerate()
            .map(|(index, c)| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::NonBinary { index, value: c as u8 }),
            })
            .collect::<Result<Vec<u8>>>()
            .map(BitBlock)
    }

    /// Unpacks bytes most-significant bit first.
    pub fn from_bytes_msb(bytes: &[u8]) -> Self {
        BitBlock(
            bytes
                .iter()
                .flat_map(|&byte| (0..8).rev().map(move |k| (byte >> k) & 1))
                .collect(),
        )
    }

    /// Low `width` bits of `value`, most significant first.
    pub fn from_u64(value: u64, width: usize) -> Self {
        BitBlock((0..width).rev().map(|k| ((value >> k) & 1) as u8).collect())
    }

    /// Interprets the block as an unsigned integer, most significant first.
    pub fn to_u64(&self) -> Option<u64> {
        if self.0.len() > 64 {
            return None;
        }
        Some(self.0.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64))
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut bits = Vec::with_capacity(len);
        while bits.len() < len {
            let word: u64 = rng.gen();
            let take = (len - bits.len()).min(64);
            bits.extend((0..take).map(|k| ((word >> k) & 1) as u8));
        }
        BitBlock(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [u8] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.0
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    /// Sets position `index` to `bit & 1`.
    pub fn set(&mut self, index: usize, bit: u8) {
        self.0[index] = bit & 1;
    }

    pub fn flip(&mut self, index: usize) {
        self.0[index] ^= 1;
    }

    /// Bits at `positions`, in the order given.
    pub fn gather(&self, positions: &[usize]) -> BitBlock {
        BitBlock(positions.iter().map(|&i| self.0[i]).collect())
    }

    pub fn concat(&self, other: &BitBlock) -> BitBlock {
        let mut bits = self.0.clone();
        bits.extend_from_slice(&other.0);
        BitBlock(bits)
    }

    /// Positions where the two blocks differ.
    pub fn hamming_distance(&self, other: &BitBlock) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl Index<usize> for BitBlock {
    type Output = u8;

    fn index(&self, index: usize) -> &u8 {
        &self.0[index]
    }
}

impl fmt::Debug for BitBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitBlock(")?;
        for &b in &self.0 {
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for BitBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// A strictly increasing set of positions inside a block of size `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexSet {
    n: usize,
    indices: Vec<usize>,
}

impl IndexSet {
    /// Builds a set from arbitrary-order indices. Duplicates and out-of-range
    /// values are rejected.
    pub fn new(n: usize, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidIndexSet(format!("duplicate index {}", w[0])));
        }
        if let Some(&last) = indices.last() {
            if last >= n {
                return Err(Error::InvalidIndexSet(format!("index {last} >= n = {n}")));
            }
        }
        Ok(IndexSet { n, indices })
    }

    pub fn empty(n: usize) -> Self {
        IndexSet { n, indices: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        IndexSet { n, indices: (0..n).collect() }
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// Membership mask of length `n`.
    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.n];
        for &i in &self.indices {
            mask[i] = true;
        }
        mask
    }

    /// Positions in `[0, n)` not in the set, increasing.
    pub fn complement(&self) -> IndexSet {
        let mask = self.mask();
        IndexSet {
            n: self.n,
            indices: (0..self.n).filter(|&i| !mask[i]).collect(),
        }
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }
}

/// Applies `F^{⊗m}` in natural order, in place, with `m` butterfly stages.
///
/// The caller guarantees a power-of-two length.
pub(crate) fn transform_in_place(bits: &mut [u8]) {
    let n = bits.len();
    debug_assert!(n.is_power_of_two());
    let mut half = 1;
    while half < n {
        for block in bits.chunks_exact_mut(2 * half) {
            let (left, right) = block.split_at_mut(half);
            for (l, r) in left.iter_mut().zip(right.iter()) {
                *l ^= *r;
            }
        }
        half *= 2;
    }
}

/// Computes `x = uG` with `G = F^{⊗m}`, `F = [[1,0],[1,1]]`, no bit reversal.
///
/// The map is an involution over GF(2).
pub fn polar_transform(u: &BitBlock) -> Result<BitBlock> {
    if !u.len().is_power_of_two() {
        return Err(Error::NotPowerOfTwo(u.len()));
    }
    let mut x = u.clone();
    transform_in_place(x.as_mut_slice());
    Ok(x)
}

pub fn xor_blocks(a: &BitBlock, b: &BitBlock) -> Result<BitBlock> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { expected: a.len(), actual: b.len() });
    }
    Ok(BitBlock(a.0.iter().zip(&b.0).map(|(x, y)| x ^ y).collect()))
}

/// Binary entropy in bits, with `h(0) = h(1) = 0`.
pub fn binary_entropy<T: Scalar>(p: T) -> Result<T> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::ProbabilityOutOfRange { value: p.as_f64(), range: "[0, 1]" });
    }
    let term = |q: T| if q > T::zero() { -q * q.log2() } else { T::zero() };
    Ok(term(p) + term(T::one() - p))
}
