use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::SweepRecord;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "n,qber,L,f,alpha,frames,frame_errors,fer,elapsed_s,seed";

/// Orders records by `(n, qber, L, f)`.
pub fn sort_records(records: &mut [SweepRecord]) {
    records.sort_by(|a, b| {
        a.n.cmp(&b.n)
            .then(a.qber.total_cmp(&b.qber))
            .then(a.list_size.cmp(&b.list_size))
            .then(a.f.total_cmp(&b.f))
    });
}

/// CSV text for `records`, sorted. Floats use the shortest representation
/// that parses back to the same value.
pub fn render_report(records: &[SweepRecord]) -> String {
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &sorted {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.n, r.qber, r.list_size, r.f, r.alpha, r.frames, r.frame_errors, r.fer, r.elapsed_s, r.seed
        );
    }
    out
}

pub fn emit_report(records: &[SweepRecord], path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, render_report(records))?;
    Ok(())
}

pub fn parse_report(text: &str) -> Result<Vec<SweepRecord>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == CSV_HEADER => {}
        other => {
            return Err(Error::Format {
                line: 1,
                msg: format!("expected CSV header, found {:?}", other.map(|(_, h)| h)),
            })
        }
    }
    lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let line = i + 1;
            let cols: Vec<&str> = l.split(',').collect();
            if cols.len() != 10 {
                return Err(Error::Format { line, msg: format!("expected 10 columns, found {}", cols.len()) });
            }
            let bad = |c: usize| Error::Format { line, msg: format!("bad value in column {}: {:?}", c + 1, cols[c]) };
            macro_rules! col {
                ($i:expr) => {
                    cols[$i].parse().map_err(|_| bad($i))?
                };
            }
            Ok(SweepRecord {
                n: col!(0),
                qber: col!(1),
                list_size: col!(2),
                f: col!(3),
                alpha: col!(4),
                frames: col!(5),
                frame_errors: col!(6),
                fer: col!(7),
                elapsed_s: col!(8),
                seed: col!(9),
            })
        })
        .collect()
}
