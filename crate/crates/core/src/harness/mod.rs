//! BSC simulation: sifted-key pairs, frame-error estimation, the minimal
//! efficiency search and CSV reports.
//!
//! Frame `i` of a run draws everything it needs (Alice's key, the channel
//! noise, the virtual string) from ChaCha stream `i` of the base seed. Runs
//! with the same seed are therefore paired across list sizes and
//! efficiencies, and results do not depend on thread scheduling.

mod config;
mod report;

use std::collections::HashMap;
use std::time::Instant;

use rand::distributions::{Bernoulli, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bits::BitBlock;
use crate::construction::CodeProfile;
use crate::crc::CrcSpec;
use crate::error::{Error, Result};
use crate::protocol::{cl_alice_message, cl_precode, sc_alice_message, ClBob, ProtocolId, ScBob};

pub use config::{SweepConfig, SweepMode, SWEEP_HEADER};
pub use report::{emit_report, parse_report, render_report, sort_records, CSV_HEADER};

/// Frames evaluated between checks of the stopping rule.
const BATCH: u64 = 256;

/// Smallest crossover probability used to build a profile or derive LLRs.
/// A zero-QBER point still needs a finite channel model for the decoder.
pub const MIN_DESIGN_P: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq)]
pub struct SiftedKeyPair {
    pub x: BitBlock,
    pub y: BitBlock,
    pub p: f64,
    pub seed: u64,
}

fn check_qber(p: f64) -> Result<Bernoulli> {
    if !(p >= 0.0 && p < 0.5) {
        return Err(Error::ProbabilityOutOfRange { value: p, range: "[0, 0.5)" });
    }
    Bernoulli::new(p).map_err(|e| Error::InvalidParameter(e.to_string()))
}

fn draw_pair<R: Rng + ?Sized>(n: usize, noise: &Bernoulli, rng: &mut R) -> (BitBlock, BitBlock) {
    let x = BitBlock::random(n, rng);
    let y = BitBlock::new(x.as_slice().iter().map(|&b| b ^ noise.sample(rng) as u8).collect())
        .expect("binary");
    (x, y)
}

/// A uniform `x` and `y = x ⊕ e` with `e` i.i.d. Bernoulli(p).
pub fn generate_sifted_pair(n: usize, p: f64, seed: u64) -> Result<SiftedKeyPair> {
    let noise = check_qber(p)?;
    let (x, y) = draw_pair(n, &noise, &mut ChaCha8Rng::seed_from_u64(seed));
    Ok(SiftedKeyPair { x, y, p, seed })
}

fn frame_rng(seed: u64, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(frame);
    rng
}

/// Protocol parameters for a batch of simulated frames.
#[derive(Clone, Debug)]
pub struct FrameSetup {
    pub profile: CodeProfile,
    pub protocol: ProtocolId,
    pub list_size: usize,
    pub crc: CrcSpec,
    pub qber: f64,
}

/// Outcome counts of a simulation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FrameStats {
    pub frames: u64,
    pub frame_errors: u64,
    /// Wrong frames whose CRC verified anyway (CL with a CRC only).
    pub undetected: u64,
    /// Frames whose selected candidate failed the CRC.
    pub crc_failures: u64,
}

#[derive(Clone, Copy, Default)]
struct FrameOutcome {
    error: bool,
    crc_ok: Option<bool>,
}

enum Bob {
    Sc(ScBob),
    Cl(ClBob),
}

fn run_frame(setup: &FrameSetup, bob: &mut Bob, noise: &Bernoulli, seed: u64, frame: u64) -> Result<FrameOutcome> {
    let n = setup.profile.n();
    let mut rng = frame_rng(seed, frame);
    let (x, y) = draw_pair(n, noise, &mut rng);
    let (x_hat, transcript) = match bob {
        Bob::Sc(bob) => bob.decode(&y, &sc_alice_message(&x, setup.profile.high_entropy_set())?)?,
        Bob::Cl(bob) => {
            let v = cl_precode(&setup.profile, &setup.crc, &mut rng)?;
            bob.decode(&y, &cl_alice_message(&x, &v)?)?
        }
    };
    let expected_wire = match setup.protocol {
        ProtocolId::Sc => setup.profile.alpha(),
        ProtocolId::Cl => n,
    };
    if transcript.wire_bits() != expected_wire || transcript.leak_bits() != n - transcript.k() {
        return Err(Error::LeakageInvariant { charged: transcript.leak_bits(), expected: n - transcript.k() });
    }
    Ok(FrameOutcome { error: x_hat != x, crc_ok: transcript.crc_ok() })
}

/// Runs frames `0, 1, ...` until `min_errors` frame errors have been seen or
/// `max_frames` frames have run. The count stops exactly at the frame that
/// reaches `min_errors`, so the result is independent of batching.
pub fn simulate(setup: &FrameSetup, seed: u64, max_frames: u64, min_errors: u64) -> Result<FrameStats> {
    let noise = check_qber(setup.qber)?;
    let make_bob = || -> Result<Bob> {
        Ok(match setup.protocol {
            ProtocolId::Sc => Bob::Sc(ScBob::new(&setup.profile)?),
            ProtocolId::Cl => Bob::Cl(ClBob::new(&setup.profile, setup.list_size, &setup.crc)?),
        })
    };
    make_bob()?;
    let mut stats = FrameStats::default();
    let mut start = 0;
    while start < max_frames {
        let end = (start + BATCH).min(max_frames);
        let outcomes: Vec<FrameOutcome> = (start..end)
            .into_par_iter()
            .map_init(
                || make_bob().expect("checked above"),
                |bob, frame| run_frame(setup, bob, &noise, seed, frame),
            )
            .collect::<Result<_>>()?;
        for o in outcomes {
            stats.frames += 1;
            if o.crc_ok == Some(false) {
                stats.crc_failures += 1;
            }
            if o.error {
                stats.frame_errors += 1;
                if o.crc_ok == Some(true) {
                    stats.undetected += 1;
                }
                if stats.frame_errors >= min_errors {
                    return Ok(stats);
                }
            }
        }
        start = end;
    }
    Ok(stats)
}

/// One measured point of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub n: usize,
    pub qber: f64,
    pub list_size: usize,
    pub f: f64,
    pub alpha: usize,
    pub frames: u64,
    pub frame_errors: u64,
    pub fer: f64,
    pub elapsed_s: f64,
    pub seed: u64,
}

/// Result of [`Sweeper::estimate_fer`].
#[derive(Clone, Debug, PartialEq)]
pub enum FerEstimate {
    Measured(SweepRecord),
    /// `alpha + c > n`: no room for payload at this efficiency.
    Skipped { n: usize, qber: f64, list_size: usize, f: f64, alpha: usize, crc_len: usize },
}

impl FerEstimate {
    pub fn record(&self) -> Option<&SweepRecord> {
        match self {
            FerEstimate::Measured(r) => Some(r),
            FerEstimate::Skipped { .. } => None,
        }
    }
}

/// Result of [`Sweeper::min_efficiency_search`]. Both variants carry every
/// measured point in visiting order.
#[derive(Clone, Debug, PartialEq)]
pub enum SearchResult {
    Found { f: f64, trail: Vec<SweepRecord> },
    NotFound { trail: Vec<SweepRecord> },
}

impl SearchResult {
    pub fn efficiency(&self) -> Option<f64> {
        match self {
            SearchResult::Found { f, .. } => Some(*f),
            SearchResult::NotFound { .. } => None,
        }
    }

    pub fn trail(&self) -> &[SweepRecord] {
        match self {
            SearchResult::Found { trail, .. } | SearchResult::NotFound { trail } => trail,
        }
    }
}

/// Runs sweep points, building one code profile per `(n, qber)` on demand.
pub struct Sweeper {
    config: SweepConfig,
    profiles: HashMap<(usize, u64), CodeProfile>,
}

impl Sweeper {
    pub fn new(config: SweepConfig) -> Result<Self> {
        config.validate()?;
        Ok(Sweeper { config, profiles: HashMap::new() })
    }

    pub fn config(&self) -> &SweepConfig {
        &self.config
    }

    /// Supplies a ready-made profile for `(n, qber)` instead of constructing
    /// one. The profile's design probability is used for decoding.
    pub fn insert_profile(&mut self, qber: f64, profile: CodeProfile) {
        self.profiles.insert((profile.n(), qber.to_bits()), profile);
    }

    /// The base profile for `(n, qber)`: reliabilities estimated at
    /// `max(qber, MIN_DESIGN_P)` with the configured trials and seed.
    pub fn profile(&mut self, n: usize, qber: f64) -> Result<&CodeProfile> {
        let key = (n, qber.to_bits());
        if !self.profiles.contains_key(&key) {
            let p = qber.max(MIN_DESIGN_P);
            let profile = CodeProfile::construct(n, p, self.config.construction_trials, self.config.seed, 1.0, 0)?;
            self.profiles.insert(key, profile);
        }
        Ok(&self.profiles[&key])
    }

    /// Runs the CL protocol at efficiency `f` until the configured error or
    /// frame budget is spent. Any `x̂ ≠ x` counts as a frame error, whether
    /// or not the CRC caught it.
    pub fn estimate_fer(&mut self, n: usize, qber: f64, list_size: usize, f: f64) -> Result<FerEstimate> {
        let crc_len = self.config.crc_len();
        let crc = self.config.crc.unwrap_or_default();
        let base = self.profile(n, qber)?.clone();
        // alpha = ⌈f·n·h(qber)⌉; at qber = 0 nothing needs to be disclosed.
        let alpha = if qber == 0.0 { 0 } else { crate::construction::high_entropy_set_size(f, n, qber, 0)? };
        if alpha + crc_len > n {
            return Ok(FerEstimate::Skipped { n, qber, list_size, f, alpha, crc_len });
        }
        let profile = base.with_alpha(alpha)?.with_crc_len(crc_len)?;
        let setup = FrameSetup { profile, protocol: ProtocolId::Cl, list_size, crc, qber };
        let started = Instant::now();
        let stats = simulate(&setup, self.config.seed, self.config.max_frames, self.config.min_errors)?;
        let elapsed_s = if self.config.timing { (started.elapsed().as_secs_f64() * 1e3).round() / 1e3 } else { 0.0 };
        Ok(FerEstimate::Measured(SweepRecord {
            n,
            qber,
            list_size,
            f,
            alpha,
            frames: stats.frames,
            frame_errors: stats.frame_errors,
            fer: stats.frame_errors as f64 / stats.frames as f64,
            elapsed_s,
            seed: self.config.seed,
        }))
    }

    /// Scans the efficiency grid upward and returns the first point whose
    /// FER is at most the target.
    pub fn min_efficiency_search(&mut self, n: usize, qber: f64, list_size: usize) -> Result<SearchResult> {
        let mut trail = Vec::new();
        for f in self.config.efficiency_grid() {
            match self.estimate_fer(n, qber, list_size, f)? {
                FerEstimate::Measured(r) => {
                    let pass = r.fer <= self.config.target_fer;
                    trail.push(r);
                    if pass {
                        return Ok(SearchResult::Found { f, trail });
                    }
                }
                // alpha only grows with f, so nothing further fits either.
                FerEstimate::Skipped { .. } => break,
            }
        }
        Ok(SearchResult::NotFound { trail })
    }

    /// Runs the whole configuration and returns sorted records. In search
    /// mode every visited point is kept.
    pub fn run(&mut self) -> Result<Vec<SweepRecord>> {
        let mut records = Vec::new();
        let cfg = self.config.clone();
        for &n in &cfg.block_sizes {
            for &qber in &cfg.qbers {
                for &l in &cfg.list_sizes {
                    match cfg.mode {
                        SweepMode::Search => {
                            records.extend(self.min_efficiency_search(n, qber, l)?.trail().iter().cloned())
                        }
                        SweepMode::Grid => {
                            for f in cfg.efficiency_grid() {
                                if let FerEstimate::Measured(r) = self.estimate_fer(n, qber, l, f)? {
                                    records.push(r);
                                }
                            }
                        }
                    }
                }
            }
        }
        sort_records(&mut records);
        Ok(records)
    }
}

/// Convenience wrapper around a one-off [`Sweeper`].
pub fn estimate_fer(n: usize, qber: f64, list_size: usize, f: f64, config: &SweepConfig) -> Result<FerEstimate> {
    Sweeper::new(config.clone())?.estimate_fer(n, qber, list_size, f)
}

/// Convenience wrapper around a one-off [`Sweeper`].
pub fn min_efficiency_search(n: usize, qber: f64, list_size: usize, config: &SweepConfig) -> Result<SearchResult> {
    Sweeper::new(config.clone())?.min_efficiency_search(n, qber, list_size)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> SweepConfig {
        SweepConfig {
            block_sizes: vec![64],
            qbers: vec![0.05],
            list_sizes: vec![1, 4],
            f_start: 1.0,
            f_stop: 2.0,
            f_step: 0.1,
            target_fer: 0.1,
            max_frames: 2000,
            min_errors: 20,
            seed: 3,
            construction_trials: 5000,
            ..Default::default()
        }
    }

    #[test]
    fn sifted_pairs() {
        let a = generate_sifted_pair(256, 0.1, 4).unwrap();
        assert_eq!(a, generate_sifted_pair(256, 0.1, 4).unwrap());
        assert_ne!(a.x, generate_sifted_pair(256, 0.1, 5).unwrap().x);
        let z = generate_sifted_pair(256, 0.0, 4).unwrap();
        assert_eq!(z.x, z.y);
        assert!(generate_sifted_pair(8, 0.5, 1).is_err());
        assert!(generate_sifted_pair(8, -0.1, 1).is_err());
    }

    #[test]
    fn noise_weight_within_three_sigma() {
        let (n, p) = (4096usize, 0.03);
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        for seed in 0..20 {
            let pair = generate_sifted_pair(n, p, seed).unwrap();
            let w = pair.x.hamming_distance(&pair.y) as f64;
            assert!((w - n as f64 * p).abs() <= 3.0 * sigma + 1.0, "seed {seed}: weight {w}");
        }
    }

    #[test]
    fn stopping_rule_is_exact() {
        let mut s = Sweeper::new(small_config()).unwrap();
        let FerEstimate::Measured(r) = s.estimate_fer(64, 0.05, 1, 1.0).unwrap() else { panic!() };
        assert!(r.frame_errors == 20 || r.frames == 2000);
        assert_eq!(r.fer, r.frame_errors as f64 / r.frames as f64);
        assert_eq!(r.elapsed_s, 0.0);
        // Same point again: identical.
        let FerEstimate::Measured(again) = s.estimate_fer(64, 0.05, 1, 1.0).unwrap() else { panic!() };
        assert_eq!(r, again);
    }

    #[test]
    fn degenerate_points() {
        let mut s = Sweeper::new(SweepConfig { qbers: vec![0.0], ..small_config() }).unwrap();
        let FerEstimate::Measured(r) = s.estimate_fer(64, 0.0, 1, 1.0).unwrap() else { panic!() };
        assert_eq!((r.alpha, r.frame_errors, r.frames), (0, 0, 2000));
        let res = s.min_efficiency_search(64, 0.0, 1).unwrap();
        assert_eq!(res.efficiency(), Some(1.0));

        let mut s = Sweeper::new(small_config()).unwrap();
        // f = 5.6 at p = 0.05 wants alpha = 64 of 64 bits: no room for the CRC.
        assert!(matches!(s.estimate_fer(64, 0.05, 1, 5.6).unwrap(), FerEstimate::Skipped { .. }));
        // alpha + c = n exactly: everything is disclosed and nothing fails.
        let f = 48.0 / (64.0 * crate::bits::binary_entropy(0.05f64).unwrap());
        let FerEstimate::Measured(r) = s.estimate_fer(64, 0.05, 2, f).unwrap() else { panic!() };
        assert_eq!((r.alpha, r.frame_errors), (48, 0));
    }

    #[test]
    fn permissive_target_takes_first_grid_point() {
        let cfg = SweepConfig { target_fer: 1.0, ..small_config() };
        let res = min_efficiency_search(64, 0.05, 1, &cfg).unwrap();
        assert_eq!(res.efficiency(), Some(1.0));
        assert_eq!(res.trail().len(), 1);
    }

    #[test]
    fn not_found_keeps_trail() {
        let cfg = SweepConfig { f_stop: 1.1, target_fer: 1e-9, min_errors: 1, ..small_config() };
        let res = min_efficiency_search(64, 0.05, 1, &cfg).unwrap();
        assert_eq!(res.efficiency(), None);
        assert_eq!(res.trail().len(), 2);
    }

    #[test]
    fn sc_and_cl_frames() {
        let mut s = Sweeper::new(small_config()).unwrap();
        let base = s.profile(64, 0.05).unwrap().with_alpha(30).unwrap();
        for (protocol, c) in [(ProtocolId::Sc, 0), (ProtocolId::Cl, 0), (ProtocolId::Cl, 16)] {
            let setup = FrameSetup {
                profile: base.with_crc_len(c).unwrap(),
                protocol,
                list_size: 1,
                crc: CrcSpec::default(),
                qber: 0.05,
            };
            let st = simulate(&setup, 1, 500, u64::MAX).unwrap();
            assert_eq!(st.frames, 500);
            assert!(st.frame_errors < 500);
            assert!(st.undetected <= st.frame_errors);
        }
    }
}
