//! `polar-sweep v1` configuration files.
//!
//! Same line-oriented `key=value` layout as profile files. Keys may come in
//! any order and every key has a default; unknown keys are rejected. A final
//! `checksum=` line is optional and verified when present.
//!
//! ```text
//! polar-sweep v1
//! block_sizes=2048
//! qbers=0.02 0.04
//! list_sizes=1 8 16
//! f_start=1.00
//! f_stop=1.60
//! f_step=0.01
//! target_fer=0.01
//! max_frames=100000
//! min_errors=100
//! seed=1
//! crc=16:1021:FFFF
//! construction_trials=100000
//! mode=search
//! timing=off
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::construction::DEFAULT_TRIALS;
use crate::crc::CrcSpec;
use crate::error::{Error, Result};

pub const SWEEP_HEADER: &str = "polar-sweep v1";
const MAGIC: &str = "polar-sweep";

/// What a sweep does at each `(n, qber, L)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMode {
    /// Scan the efficiency grid upward and stop at the first passing point.
    Search,
    /// Measure every grid point.
    Grid,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub block_sizes: Vec<usize>,
    pub qbers: Vec<f64>,
    pub list_sizes: Vec<usize>,
    pub f_start: f64,
    pub f_stop: f64,
    pub f_step: f64,
    pub target_fer: f64,
    pub max_frames: u64,
    pub min_errors: u64,
    pub seed: u64,
    /// `None` runs the CL protocol without a CRC (`c = 0`).
    pub crc: Option<CrcSpec>,
    pub construction_trials: u64,
    pub mode: SweepMode,
    /// Record wall-clock time per point. Off by default so that reruns
    /// produce byte-identical reports.
    pub timing: bool,
}

impl Default for SweepConfig {
    /// Desk-scale defaults: FER target 1e-2, 100 errors or 1e5 frames per
    /// point, QBER 0.010 to 0.050 in steps of 0.005.
    fn default() -> Self {
        SweepConfig {
            block_sizes: vec![2048],
            qbers: (0..9).map(|i| (10 + 5 * i) as f64 / 1000.0).collect(),
            list_sizes: vec![1, 2, 4, 8, 16, 32],
            f_start: 1.0,
            f_stop: 2.0,
            f_step: 0.01,
            target_fer: 1e-2,
            max_frames: 100_000,
            min_errors: 100,
            seed: 1,
            crc: Some(CrcSpec::default()),
            construction_trials: DEFAULT_TRIALS,
            mode: SweepMode::Search,
            timing: false,
        }
    }
}

impl SweepConfig {
    /// The long-running preset: FER target 1e-3 with up to 1e6 frames.
    pub fn extended() -> Self {
        SweepConfig {
            block_sizes: vec![2048, 4096],
            target_fer: 1e-3,
            max_frames: 1_000_000,
            ..Self::default()
        }
    }

    pub fn crc_len(&self) -> usize {
        self.crc.map_or(0, |s| s.len())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.block_sizes.is_empty() || self.qbers.is_empty() || self.list_sizes.is_empty() {
            return bad("block_sizes, qbers and list_sizes must be non-empty".into());
        }
        if let Some(&n) = self.block_sizes.iter().find(|n| !n.is_power_of_two()) {
            return Err(Error::NotPowerOfTwo(n));
        }
        if let Some(&q) = self.qbers.iter().find(|q| !(**q >= 0.0 && **q < 0.5)) {
            return Err(Error::ProbabilityOutOfRange { value: q, range: "[0, 0.5)" });
        }
        if self.list_sizes.contains(&0) {
            return bad("list sizes must be >= 1".into());
        }
        if !(self.f_step > 0.0 && self.f_step.is_finite()) {
            return bad(format!("f_step must be positive, got {}", self.f_step));
        }
        if !(self.f_start > 0.0 && self.f_stop >= self.f_start && self.f_stop.is_finite()) {
            return bad(format!("need 0 < f_start <= f_stop, got {} and {}", self.f_start, self.f_stop));
        }
        if !(self.target_fer > 0.0 && self.target_fer < 1.0) && self.target_fer != 1.0 {
            return bad(format!("target_fer must lie in (0, 1], got {}", self.target_fer));
        }
        if self.max_frames == 0 || self.min_errors == 0 || self.construction_trials == 0 {
            return bad("max_frames, min_errors and construction_trials must be positive".into());
        }
        if let Some(spec) = &self.crc {
            spec.validate()?;
        }
        Ok(())
    }

    /// Grid points `f_start + i·f_step` up to `f_stop`, rounded to 1e-9 so
    /// that accumulated steps print cleanly.
    pub fn efficiency_grid(&self) -> Vec<f64> {
        let count = ((self.f_stop - self.f_start) / self.f_step + 1e-9).floor() as u64;
        (0..=count).map(|i| ((self.f_start + i as f64 * self.f_step) * 1e9).round() / 1e9).collect()
    }

    pub fn render(&self) -> String {
        let join = |v: Vec<String>| v.join(" ");
        let mut out = String::new();
        let _ = writeln!(out, "{SWEEP_HEADER}");
        let _ = writeln!(out, "block_sizes={}", join(self.block_sizes.iter().map(|v| v.to_string()).collect()));
        let _ = writeln!(out, "qbers={}", join(self.qbers.iter().map(|v| v.to_string()).collect()));
        let _ = writeln!(out, "list_sizes={}", join(self.list_sizes.iter().map(|v| v.to_string()).collect()));
        let _ = writeln!(out, "f_start={}", self.f_start);
        let _ = writeln!(out, "f_stop={}", self.f_stop);
        let _ = writeln!(out, "f_step={}", self.f_step);
        let _ = writeln!(out, "target_fer={}", self.target_fer);
        let _ = writeln!(out, "max_frames={}", self.max_frames);
        let _ = writeln!(out, "min_errors={}", self.min_errors);
        let _ = writeln!(out, "seed={}", self.seed);
        let _ = writeln!(out, "crc={}", self.crc.map_or("none".to_string(), |s| s.to_string()));
        let _ = writeln!(out, "construction_trials={}", self.construction_trials);
        let _ = writeln!(out, "mode={}", if self.mode == SweepMode::Search { "search" } else { "grid" });
        let _ = writeln!(out, "timing={}", if self.timing { "on" } else { "off" });
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.render())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        fs::read_to_string(path)?.parse()
    }
}

fn list<T: FromStr>(value: &str) -> Option<Vec<T>> {
    value.split_whitespace().map(|t| t.parse().ok()).collect()
}

fn flag(value: &str) -> Option<bool> {
    match value {
        "on" | "true" | "1" => Some(true),
        "off" | "false" | "0" => Some(false),
        _ => None,
    }
}

impl FromStr for SweepConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        crate::construction::check_header(text.lines().next(), MAGIC, SWEEP_HEADER)?;
        let has_checksum = text.lines().last().is_some_and(|l| l.starts_with("checksum="));
        let body = if has_checksum { crate::construction::verify_checksum(text)? } else { text };

        let mut cfg = SweepConfig::default();
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in body.lines().enumerate().skip(1) {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed
                .split_once('=')
                .ok_or_else(|| Error::Format { line, msg: format!("expected key=value, found {trimmed:?}") })?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(Error::Format { line, msg: format!("duplicate key {key:?}") });
            }
            let bad = || Error::Format { line, msg: format!("bad value for {key}: {value:?}") };
            match key {
                "block_sizes" => cfg.block_sizes = list(value).ok_or_else(bad)?,
                "qbers" => cfg.qbers = list(value).ok_or_else(bad)?,
                "list_sizes" => cfg.list_sizes = list(value).ok_or_else(bad)?,
                "f_start" => cfg.f_start = value.parse().map_err(|_| bad())?,
                "f_stop" => cfg.f_stop = value.parse().map_err(|_| bad())?,
                "f_step" => cfg.f_step = value.parse().map_err(|_| bad())?,
                "target_fer" => cfg.target_fer = value.parse().map_err(|_| bad())?,
                "max_frames" => cfg.max_frames = value.parse().map_err(|_| bad())?,
                "min_errors" => cfg.min_errors = value.parse().map_err(|_| bad())?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad())?,
                "crc" => {
                    cfg.crc = if value == "none" { None } else { Some(value.parse().map_err(|_| bad())?) }
                }
                "construction_trials" => cfg.construction_trials = value.parse().map_err(|_| bad())?,
                "mode" => {
                    cfg.mode = match value {
                        "search" => SweepMode::Search,
                        "grid" => SweepMode::Grid,
                        _ => return Err(bad()),
                    }
                }
                "timing" => cfg.timing = flag(value).ok_or_else(bad)?,
                _ => return Err(Error::Format { line, msg: format!("unknown key {key:?}") }),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
