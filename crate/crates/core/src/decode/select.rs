use crate::bits::BitBlock;
use crate::crc::CrcSpec;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::DecodeCandidate;

/// Where the CRC-protected message and its check bits sit inside a
/// transform-domain word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrcLayout {
    message: Vec<usize>,
    check: Vec<usize>,
}

impl CrcLayout {
    /// `message` and `check` are read in the order given; they must be
    /// disjoint and inside `[0, n)`.
    pub fn new(n: usize, message: Vec<usize>, check: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; n];
        for &i in message.iter().chain(&check) {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidIndexSet(format!("CRC layout position {i} repeated or >= {n}")));
            }
        }
        Ok(CrcLayout { message, check })
    }

    pub fn message(&self) -> &[usize] {
        &self.message
    }

    pub fn check(&self) -> &[usize] {
        &self.check
    }

    pub fn verify(&self, word: &BitBlock, spec: &CrcSpec) -> bool {
        let body = word.gather(&self.message);
        let stored = word.gather(&self.check);
        stored.len() == spec.len() && Some(spec.remainder(body.as_slice())) == stored.to_u64()
    }
}

/// Picks the lowest-metric candidate whose CRC verifies. When none does, the
/// lowest-metric candidate is returned with `crc_ok = Some(false)`.
pub fn crc_aided_select<T: Scalar>(
    candidates: &[DecodeCandidate<T>],
    spec: &CrcSpec,
    layout: &CrcLayout,
) -> Result<DecodeCandidate<T>> {
    fn best<'a, T: Scalar>(it: impl Iterator<Item = &'a DecodeCandidate<T>>) -> Option<&'a DecodeCandidate<T>> {
        it.fold(None, |acc: Option<&DecodeCandidate<T>>, c| match acc {
            Some(a) if a.metric <= c.metric => Some(a),
            _ => Some(c),
        })
    }
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let passing = best(candidates.iter().filter(|c| layout.verify(&c.transform_word, spec)));
    let (chosen, ok) = match passing {
        Some(c) => (c, true),
        None => (best(candidates.iter()).expect("non-empty"), false),
    };
    Ok(DecodeCandidate { crc_ok: Some(ok), ..chosen.clone() })
}
