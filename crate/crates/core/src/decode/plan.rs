use crate::bits::{transform_in_place, BitBlock, IndexSet};
use crate::error::{Error, Result};

/// Frozen positions and their values laid out for the decoding tree.
///
/// `rate0[d][j]` marks tree nodes whose leaves are all frozen; decoders emit
/// the encoded frozen values for such subtrees without descending.
#[derive(Clone, Debug)]
pub struct FrozenPlan {
    n: usize,
    values: Vec<u8>,
    rate0: Vec<Vec<bool>>,
}

impl FrozenPlan {
    pub fn new(frozen: &IndexSet, frozen_values: &BitBlock) -> Result<Self> {
        let n = frozen.universe();
        if !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        if frozen_values.len() != frozen.len() {
            return Err(Error::LengthMismatch {
                expected: frozen.len(),
                actual: frozen_values.len(),
            });
        }
        let mut values = vec![0u8; n];
        for (&i, &v) in frozen.as_slice().iter().zip(frozen_values.as_slice()) {
            values[i] = v;
        }
        let mask = frozen.mask();
        let m = n.trailing_zeros() as usize;
        let mut rate0 = vec![Vec::new(); m + 1];
        rate0[m] = mask;
        for d in (0..m).rev() {
            let below = &rate0[d + 1];
            rate0[d] = (0..(1usize << d)).map(|j| below[2 * j] && below[2 * j + 1]).collect();
        }
        Ok(FrozenPlan { n, values, rate0 })
    }

    /// Plan with nothing frozen.
    pub fn unfrozen(n: usize) -> Result<Self> {
        Self::new(&IndexSet::empty(n), &BitBlock::zeros(0))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub(crate) fn is_rate0(&self, depth: usize, node: usize) -> bool {
        self.rate0[depth][node]
    }

    /// Encoded frozen values of a fully frozen subtree.
    pub(crate) fn subtree_codeword(&self, depth: usize, node: usize, out: &mut [u8]) {
        let len = self.n >> depth;
        out.copy_from_slice(&self.values[node * len..(node + 1) * len]);
        transform_in_place(out);
    }
}
