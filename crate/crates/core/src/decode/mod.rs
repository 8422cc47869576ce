//! Successive-cancellation (SC) and list (SCL) decoding over soft inputs.
//!
//! Everything runs in the log-likelihood-ratio domain with the exact
//! check-node combine, so decoders agree with brute-force likelihood oracles
//! at small block sizes. LLRs are clamped to `±LLR_CLAMP` after every update.

mod kernel;
mod plan;
mod sc;
mod scl;
mod select;

use crate::bits::{BitBlock, IndexSet};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use plan::FrozenPlan;
pub use sc::ScDecoder;
pub use scl::ListDecoder;
pub use select::{crc_aided_select, CrcLayout};

pub(crate) use sc::genie_first_errors;

/// Magnitude bound applied to every LLR.
pub const LLR_CLAMP: f64 = 40.0;

/// Per-position `log(P(bit = 0 | obs) / P(bit = 1 | obs))`.
#[derive(Clone, Debug, PartialEq)]
pub struct LlrVector<T>(Vec<T>);

impl<T: Scalar> LlrVector<T> {
    /// Wraps raw values, clamping them into `±LLR_CLAMP`. Non-finite values
    /// other than infinities are rejected.
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidParameter("NaN log-likelihood ratio".into()));
        }
        Ok(LlrVector(values.into_iter().map(kernel::clamp).collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    /// Hard decisions: 0 where the LLR is non-negative.
    pub fn hard_decisions(&self) -> BitBlock {
        BitBlock::new(self.0.iter().map(|&l| kernel::hard(l)).collect()).expect("binary")
    }
}

/// LLRs of a word observed through BSC(p).
pub fn llr_from_bsc<T: Scalar>(observed: &BitBlock, p: T) -> Result<LlrVector<T>> {
    if !(p > T::zero() && p < T::lit(0.5)) {
        return Err(Error::ProbabilityOutOfRange { value: p.as_f64(), range: "(0, 0.5)" });
    }
    let mag = kernel::clamp(((T::one() - p) / p).ln());
    Ok(LlrVector(
        observed.as_slice().iter().map(|&b| if b == 0 { mag } else { -mag }).collect(),
    ))
}

/// One decoding path.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodeCandidate<T> {
    /// Estimate of the transform-domain word (`û` or `v̂`).
    pub transform_word: BitBlock,
    /// Accumulated `-log P` of every decision; lower is more probable.
    pub metric: T,
    /// Set by [`crc_aided_select`]; `None` until a CRC has been evaluated.
    pub crc_ok: Option<bool>,
}

/// Single-path successive-cancellation decoding.
///
/// Frozen positions take `frozen_values` (given in increasing index order);
/// every other position decides 0 when its LLR is `>= 0` and 1 otherwise.
pub fn sc_decode<T: Scalar>(
    llr: &LlrVector<T>,
    frozen: &IndexSet,
    frozen_values: &BitBlock,
) -> Result<DecodeCandidate<T>> {
    let plan = FrozenPlan::new(frozen, frozen_values)?;
    let mut decoder = ScDecoder::new(plan.len())?;
    decoder.decode(llr, &plan)
}

/// Successive-cancellation list decoding with at most `list_size` survivors.
///
/// Candidates are returned best first. With `list_size = 1` the decision
/// sequence is identical to [`sc_decode`].
pub fn scl_decode<T: Scalar>(
    llr: &LlrVector<T>,
    frozen: &IndexSet,
    frozen_values: &BitBlock,
    list_size: usize,
) -> Result<Vec<DecodeCandidate<T>>> {
    let plan = FrozenPlan::new(frozen, frozen_values)?;
    let mut decoder = ListDecoder::new(plan.len(), list_size)?;
    decoder.decode(llr, &plan)
}

#[cfg(test)]
mod tests;
