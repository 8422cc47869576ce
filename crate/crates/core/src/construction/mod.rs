//! Code construction: per-index reliability estimates, high-entropy set
//! selection and the [`CodeProfile`] that ties them together.
//!
//! The ranking statistic is the genie-aided first-error rate of each
//! synthetic index under SC decoding. It orders indices the same way as the
//! source Bhattacharyya parameter in practice and is checked against the
//! exact small-block values from [`exact_reliabilities_small`].

mod exact;
mod profile_io;

use rand::distributions::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bits::{binary_entropy, transform_in_place, BitBlock, IndexSet};
use crate::decode::{genie_first_errors, llr_from_bsc, CrcLayout, ScDecoder};
use crate::error::{Error, Result};

pub use exact::exact_reliabilities_small;
pub use profile_io::{load_profile, save_profile, PROFILE_HEADER};
pub(crate) use profile_io::{check_header, verify_checksum};
#[cfg(test)]
pub(crate) use profile_io::checksum_hex;

/// Trials per RNG stream in the Monte-Carlo estimator.
const TRIALS_PER_STREAM: u64 = 1024;

/// Default Monte-Carlo trials per profile.
pub const DEFAULT_TRIALS: u64 = 100_000;

/// Estimated unreliability of one synthetic index; higher is worse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReliabilityEstimate {
    pub index: usize,
    pub score: f64,
    pub trials: u64,
}

fn check_design_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 0.5 {
        Ok(())
    } else {
        Err(Error::ProbabilityOutOfRange { value: p, range: "(0, 0.5)" })
    }
}

/// Genie-aided SC simulation over BSC(p).
///
/// Each trial draws a uniform source word `x` and noise `e`, decodes
/// `u = xG` from `y = x ⊕ e` with every earlier decision replaced by the
/// truth, and counts per-index hard-decision errors. Trials are split into
/// fixed streams of a ChaCha generator seeded by `seed`, so the result does
/// not depend on how streams are scheduled across threads.
pub fn mc_estimate_reliabilities(
    n: usize,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<Vec<ReliabilityEstimate>> {
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    check_design_p(p)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial required".into()));
    }
    let noise = Bernoulli::new(p).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let streams = trials.div_ceil(TRIALS_PER_STREAM);
    let counts = (0..streams)
        .into_par_iter()
        .map_init(
            || ScDecoder::<f64>::new(n).expect("power of two"),
            |decoder, stream| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(stream);
                let start = stream * TRIALS_PER_STREAM;
                let count = TRIALS_PER_STREAM.min(trials - start);
                let mut errors = vec![0u64; n];
                for _ in 0..count {
                    let x = BitBlock::random(n, &mut rng);
                    let y = BitBlock::new(
                        x.as_slice().iter().map(|&b| b ^ noise.sample(&mut rng) as u8).collect(),
                    )
                    .expect("binary");
                    let mut u = x.into_vec();
                    transform_in_place(&mut u);
                    let llr = llr_from_bsc(&y, p).expect("p checked");
                    genie_first_errors(decoder, llr.as_slice(), &u, &mut errors);
                }
                errors
            },
        )
        .reduce(
            || vec![0u64; n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(index, c)| ReliabilityEstimate { index, score: c as f64 / trials as f64, trials })
        .collect())
}

/// `⌈f·n·h(p)⌉`, capped at `n`; fails when it leaves no room for `crc_len`
/// check bits.
pub fn high_entropy_set_size(f: f64, n: usize, p: f64, crc_len: usize) -> Result<usize> {
    if !(f > 0.0 && f.is_finite()) {
        return Err(Error::InvalidParameter(format!("efficiency {f} must be positive")));
    }
    let h = binary_entropy(p)?;
    // Absorb rounding noise so exact products do not round up one extra bit.
    let raw = (f * n as f64 * h - 1e-9).ceil().max(0.0) as usize;
    let alpha = raw.min(n);
    if alpha + crc_len > n {
        return Err(Error::NoInformationPositions { alpha, crc_len, n });
    }
    Ok(alpha)
}

/// All indices ordered worst first: descending score, ties to the lower index.
pub fn worst_first_order(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

/// The `alpha` least reliable indices.
pub fn select_high_entropy_set(reliabilities: &[ReliabilityEstimate], alpha: usize) -> Result<IndexSet> {
    let n = reliabilities.len();
    if alpha > n {
        return Err(Error::InvalidParameter(format!("alpha {alpha} exceeds n = {n}")));
    }
    let mut scores = vec![0.0; n];
    for r in reliabilities {
        if r.index >= n {
            return Err(Error::InvalidIndexSet(format!("reliability index {} >= {n}", r.index)));
        }
        scores[r.index] = r.score;
    }
    let order = worst_first_order(&scores);
    IndexSet::new(n, order[..alpha].to_vec())
}

/// A constructed code for one block size and design crossover probability.
#[derive(Clone, Debug, PartialEq)]
pub struct CodeProfile {
    n: usize,
    design_p: f64,
    scores: Vec<f64>,
    trials: u64,
    seed: u64,
    high_entropy_set: IndexSet,
    crc_len: usize,
    /// Indices worst first, derived from `scores`.
    order: Vec<usize>,
    crc_positions: Vec<usize>,
    data_positions: Vec<usize>,
}

impl CodeProfile {
    /// Runs the Monte-Carlo construction and fixes `alpha = ⌈f·n·h(p)⌉`.
    pub fn construct(n: usize, design_p: f64, trials: u64, seed: u64, f: f64, crc_len: usize) -> Result<Self> {
        let rel = mc_estimate_reliabilities(n, design_p, trials, seed)?;
        let alpha = high_entropy_set_size(f, n, design_p, crc_len)?;
        let scores = rel.iter().map(|r| r.score).collect();
        Self::from_scores(n, design_p, scores, trials, seed, alpha, crc_len)
    }

    pub fn from_scores(
        n: usize,
        design_p: f64,
        scores: Vec<f64>,
        trials: u64,
        seed: u64,
        alpha: usize,
        crc_len: usize,
    ) -> Result<Self> {
        if !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        check_design_p(design_p)?;
        if scores.len() != n {
            return Err(Error::LengthMismatch { expected: n, actual: scores.len() });
        }
        if scores.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::InvalidParameter("reliability scores must be finite and >= 0".into()));
        }
        if trials == 0 {
            return Err(Error::InvalidParameter("trials must be positive".into()));
        }
        if alpha + crc_len > n {
            return Err(Error::NoInformationPositions { alpha, crc_len, n });
        }
        let order = worst_first_order(&scores);
        let high_entropy_set = IndexSet::new(n, order[..alpha].to_vec())?;
        let mut crc_positions = order[n - crc_len..].to_vec();
        crc_positions.sort_unstable();
        let mut data_positions = order[alpha..n - crc_len].to_vec();
        data_positions.sort_unstable();
        Ok(CodeProfile {
            n,
            design_p,
            scores,
            trials,
            seed,
            high_entropy_set,
            crc_len,
            order,
            crc_positions,
            data_positions,
        })
    }

    /// Same reliabilities with a different high-entropy set size.
    pub fn with_alpha(&self, alpha: usize) -> Result<Self> {
        Self::from_scores(self.n, self.design_p, self.scores.clone(), self.trials, self.seed, alpha, self.crc_len)
    }

    /// Same reliabilities with a different CRC length; `alpha` is kept.
    pub fn with_crc_len(&self, crc_len: usize) -> Result<Self> {
        Self::from_scores(self.n, self.design_p, self.scores.clone(), self.trials, self.seed, self.alpha(), crc_len)
    }

    /// Re-targets the profile to efficiency `f` on a channel with crossover
    /// `qber`, with `crc_len` check bits.
    pub fn for_efficiency(&self, f: f64, qber: f64, crc_len: usize) -> Result<Self> {
        let alpha = high_entropy_set_size(f, self.n, qber, crc_len)?;
        Self::from_scores(self.n, self.design_p, self.scores.clone(), self.trials, self.seed, alpha, crc_len)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn design_p(&self) -> f64 {
        self.design_p
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn reliabilities(&self) -> Vec<ReliabilityEstimate> {
        self.scores
            .iter()
            .enumerate()
            .map(|(index, &score)| ReliabilityEstimate { index, score, trials: self.trials })
            .collect()
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn high_entropy_set(&self) -> &IndexSet {
        &self.high_entropy_set
    }

    pub fn alpha(&self) -> usize {
        self.high_entropy_set.len()
    }

    pub fn crc_len(&self) -> usize {
        self.crc_len
    }

    /// Number of uniformly random payload bits, `n - alpha - c`.
    pub fn k(&self) -> usize {
        self.n - self.alpha() - self.crc_len
    }

    /// Positions outside the high-entropy set, increasing.
    pub fn information_set(&self) -> IndexSet {
        self.high_entropy_set.complement()
    }

    /// The `c` most reliable information positions, increasing.
    pub fn crc_positions(&self) -> &[usize] {
        &self.crc_positions
    }

    /// Information positions that carry random bits, increasing.
    pub fn data_positions(&self) -> &[usize] {
        &self.data_positions
    }

    /// All indices ordered worst first.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// CRC over every non-check position in index order (the `alpha + k`
    /// leading payload bits), stored at [`Self::crc_positions`].
    pub fn crc_layout(&self) -> CrcLayout {
        let check = self.crc_positions.clone();
        let message = (0..self.n).filter(|i| check.binary_search(i).is_err()).collect();
        CrcLayout::new(self.n, message, check).expect("disjoint by construction")
    }
}
