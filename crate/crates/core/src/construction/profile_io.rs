//! Line-oriented profile files.
//!
//! ```text
//! polar-profile v1
//! n=<int>
//! design_p=<decimal>
//! crc_len=<int>
//! trials=<int>
//! seed=<int>
//! alpha=<int>
//! <index> <score>        (n lines, index order)
//! set=<i> <i> ...        (alpha indices)
//! checksum=<hex>         (CRC-32 of every preceding byte)
//! ```

use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::CodeProfile;
use crate::crc::CrcSpec;
use crate::error::{Error, Result};

pub const PROFILE_HEADER: &str = "polar-profile v1";
const MAGIC: &str = "polar-profile";

pub(crate) fn checksum_hex(bytes: &[u8]) -> String {
    let bits: Vec<u8> = bytes.iter().flat_map(|&b| (0..8).rev().map(move |k| (b >> k) & 1)).collect();
    format!("{:08x}", CrcSpec::CRC32.remainder(&bits))
}

pub fn render_profile(profile: &CodeProfile) -> String {
    let mut out = String::new();
    out.push_str(PROFILE_HEADER);
    out.push('\n');
    out.push_str(&format!("n={}\n", profile.n()));
    out.push_str(&format!("design_p={}\n", profile.design_p()));
    out.push_str(&format!("crc_len={}\n", profile.crc_len()));
    out.push_str(&format!("trials={}\n", profile.trials()));
    out.push_str(&format!("seed={}\n", profile.seed()));
    out.push_str(&format!("alpha={}\n", profile.alpha()));
    for (i, s) in profile.scores().iter().enumerate() {
        out.push_str(&format!("{i} {s}\n"));
    }
    let set: Vec<String> = profile.high_entropy_set().as_slice().iter().map(|i| i.to_string()).collect();
    out.push_str(&format!("set={}\n", set.join(" ")));
    let sum = checksum_hex(out.as_bytes());
    out.push_str(&format!("checksum={sum}\n"));
    out
}

pub fn save_profile(profile: &CodeProfile, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, render_profile(profile))?;
    Ok(())
}

pub fn load_profile(path: impl AsRef<Path>) -> Result<CodeProfile> {
    parse_profile(&fs::read_to_string(path)?)
}

/// Splits off and verifies a trailing `checksum=` line. Returns the body.
pub(crate) fn verify_checksum(text: &str) -> Result<&str> {
    let trimmed = text.strip_suffix('\n').ok_or_else(|| Error::Format {
        line: text.lines().count(),
        msg: "file truncated (no final newline)".into(),
    })?;
    let cut = trimmed.rfind('\n').map_or(0, |i| i + 1);
    let last = &trimmed[cut..];
    let stored = last.strip_prefix("checksum=").ok_or_else(|| Error::Format {
        line: text.lines().count(),
        msg: "missing checksum line (file truncated?)".into(),
    })?;
    let body = &text[..cut];
    let computed = checksum_hex(body.as_bytes());
    if stored != computed {
        return Err(Error::Checksum { stored: stored.to_string(), computed });
    }
    Ok(body)
}

/// Checks the `<magic> v<version>` header line.
pub(crate) fn check_header(first: Option<&str>, magic: &str, expected: &'static str) -> Result<()> {
    let first = first.unwrap_or("");
    if first == expected {
        return Ok(());
    }
    match first.strip_prefix(magic).and_then(|rest| rest.strip_prefix(' ')) {
        Some(v) => Err(Error::Version { found: v.to_string(), supported: "v1" }),
        None => Err(Error::Format { line: 1, msg: format!("expected header {expected:?}, found {first:?}") }),
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next_line(&mut self) -> Result<(usize, &'a str)> {
        self.inner
            .next()
            .map(|(i, l)| (i + 1, l))
            .ok_or_else(|| Error::Format { line: 0, msg: "unexpected end of file".into() })
    }

    fn field<T: FromStr>(&mut self, key: &str) -> Result<T> {
        let (line, text) = self.next_line()?;
        let value = text
            .strip_prefix(key)
            .and_then(|r| r.strip_prefix('='))
            .ok_or_else(|| Error::Format { line, msg: format!("expected `{key}=`, found {text:?}") })?;
        value.parse().map_err(|_| Error::Format { line, msg: format!("bad value for {key}: {value:?}") })
    }
}

pub fn parse_profile(text: &str) -> Result<CodeProfile> {
    check_header(text.lines().next(), MAGIC, PROFILE_HEADER)?;
    let body = verify_checksum(text)?;
    let mut lines = Lines { inner: body.lines().enumerate() };
    lines.next_line()?;
    let n: usize = lines.field("n")?;
    let design_p: f64 = lines.field("design_p")?;
    let crc_len: usize = lines.field("crc_len")?;
    let trials: u64 = lines.field("trials")?;
    let seed: u64 = lines.field("seed")?;
    let alpha: usize = lines.field("alpha")?;
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let mut scores = Vec::with_capacity(n);
    for expected in 0..n {
        let (line, text) = lines.next_line()?;
        let bad = || Error::Format { line, msg: format!("expected `{expected} <score>`, found {text:?}") };
        let (idx, score) = text.split_once(' ').ok_or_else(bad)?;
        if idx.parse::<usize>().map_err(|_| bad())? != expected {
            return Err(bad());
        }
        scores.push(score.parse::<f64>().map_err(|_| bad())?);
    }
    let (line, text) = lines.next_line()?;
    let set_text = text
        .strip_prefix("set=")
        .ok_or_else(|| Error::Format { line, msg: format!("expected `set=`, found {text:?}") })?;
    let set = set_text
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Error::Format { line, msg: "bad index in set".into() })?;
    if let Ok((line, text)) = lines.next_line() {
        return Err(Error::Format { line, msg: format!("unexpected trailing line {text:?}") });
    }

    let profile = CodeProfile::from_scores(n, design_p, scores, trials, seed, alpha, crc_len)?;
    if profile.high_entropy_set().as_slice() != set.as_slice() {
        return Err(Error::Format {
            line,
            msg: "stored high-entropy set disagrees with the stored scores".into(),
        });
    }
    Ok(profile)
}
