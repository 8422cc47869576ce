use crate::bits::{transform_in_place, BitBlock};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::kernel::{bit_node, check_node, hard, penalty};
use super::{DecodeCandidate, FrozenPlan, LlrVector};

enum Mode<'a, T> {
    Decode { plan: &'a FrozenPlan, metric: T },
    /// Every leaf is forced to the true bit after its decision is scored.
    Genie { truth: &'a [u8], errors: &'a mut [u64] },
}

/// Reusable single-path SC decoder for block size `n`.
///
/// `alpha[d]` holds the LLRs entering the current node at depth `d`;
/// `left[d]`/`right[d]` hold the re-encoded output of the last left/right
/// child at that depth.
#[derive(Clone, Debug)]
pub struct ScDecoder<T> {
    n: usize,
    m: usize,
    alpha: Vec<Vec<T>>,
    left: Vec<Vec<u8>>,
    right: Vec<Vec<u8>>,
    scratch: Vec<u8>,
}

impl<T: Scalar> ScDecoder<T> {
    pub fn new(n: usize) -> Result<Self> {
        if !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        let m = n.trailing_zeros() as usize;
        Ok(ScDecoder {
            n,
            m,
            alpha: (0..=m).map(|d| vec![T::zero(); n >> d]).collect(),
            left: (0..=m).map(|d| vec![0; n >> d]).collect(),
            right: (0..=m).map(|d| vec![0; n >> d]).collect(),
            scratch: vec![0; n],
        })
    }

    pub fn block_size(&self) -> usize {
        self.n
    }

    pub fn decode(&mut self, llr: &LlrVector<T>, plan: &FrozenPlan) -> Result<DecodeCandidate<T>> {
        self.check_len(llr.len())?;
        self.check_len(plan.len())?;
        self.alpha[0].copy_from_slice(llr.as_slice());
        let mut mode = Mode::Decode { plan, metric: T::zero() };
        self.node(0, 0, &mut mode);
        let Mode::Decode { metric, .. } = mode else { unreachable!() };
        let mut u = self.left[0].clone();
        transform_in_place(&mut u);
        Ok(DecodeCandidate {
            transform_word: BitBlock::new(u).expect("binary"),
            metric,
            crc_ok: None,
        })
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::LengthMismatch { expected: self.n, actual: len });
        }
        Ok(())
    }

    fn node(&mut self, d: usize, j: usize, mode: &mut Mode<'_, T>) {
        if let Mode::Decode { plan, metric } = mode {
            if plan.is_rate0(d, j) {
                let len = self.n >> d;
                let code = &mut self.scratch[..len];
                plan.subtree_codeword(d, j, code);
                let mut charge = T::zero();
                for (&a, &b) in self.alpha[d].iter().zip(code.iter()) {
                    charge += penalty(a, b);
                }
                *metric += charge;
                let out = if j % 2 == 0 { &mut self.left[d] } else { &mut self.right[d] };
                out.copy_from_slice(code);
                return;
            }
        }
        if d == self.m {
            let llr = self.alpha[d][0];
            let bit = match mode {
                Mode::Decode { metric, .. } => {
                    let bit = hard(llr);
                    *metric += penalty(llr, bit);
                    bit
                }
                Mode::Genie { truth, errors } => {
                    errors[j] += (hard(llr) != truth[j]) as u64;
                    truth[j]
                }
            };
            let out = if j % 2 == 0 { &mut self.left[d] } else { &mut self.right[d] };
            out[0] = bit;
            return;
        }

        let half = (self.n >> d) / 2;
        {
            let (lo, hi) = self.alpha.split_at_mut(d + 1);
            let (src, dst) = (&lo[d], &mut hi[0]);
            for i in 0..half {
                dst[i] = check_node(src[i], src[i + half]);
            }
        }
        self.node(d + 1, 2 * j, mode);
        {
            let (lo, hi) = self.alpha.split_at_mut(d + 1);
            let (src, dst) = (&lo[d], &mut hi[0]);
            let bits = &self.left[d + 1];
            for i in 0..half {
                dst[i] = bit_node(src[i], src[i + half], bits[i]);
            }
        }
        self.node(d + 1, 2 * j + 1, mode);

        let (l_lo, l_hi) = self.left.split_at_mut(d + 1);
        let (r_lo, r_hi) = self.right.split_at_mut(d + 1);
        let (lb, rb) = (&l_hi[0], &r_hi[0]);
        let out = if j % 2 == 0 { &mut l_lo[d] } else { &mut r_lo[d] };
        for i in 0..half {
            out[i] = lb[i] ^ rb[i];
            out[i + half] = rb[i];
        }
    }
}

/// Genie-aided SC pass: counts, per index, whether the hard decision from the
/// LLR disagrees with `truth_u`, then continues with the true bit.
pub(crate) fn genie_first_errors<T: Scalar>(
    decoder: &mut ScDecoder<T>,
    channel: &[T],
    truth_u: &[u8],
    errors: &mut [u64],
) {
    debug_assert_eq!(channel.len(), decoder.n);
    debug_assert_eq!(truth_u.len(), decoder.n);
    decoder.alpha[0].copy_from_slice(channel);
    let mut mode = Mode::Genie { truth: truth_u, errors };
    decoder.node(0, 0, &mut mode);
}
