//! Range scans of iterated ratio monotonicity with a resumable JSON-lines
//! ledger.
//!
//! The first line of a ledger is a header carrying the scan parameters that
//! determine verdicts (depth, strictness, property). Every later line is one
//! finished cell. Lines are only ever appended, and a torn final line left by
//! a crash is dropped on the next open, so the file is always a valid prefix
//! of some complete run.

use crate::bmcoeff::closed_form_row;
use crate::exactnum::{Dyadic, Exact};
use crate::seqprops::{check, k_property, l_iterate, l_operator, witness_is_genuine, Property, Witness};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;
use std::sync::mpsc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};
use thiserror::Error;

pub const LEDGER_VERSION: u32 = 1;
pub const DEFAULT_BIT_BUDGET: u64 = 1 << 22;

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("ledger I/O: {0}")]
    Io(#[from] io::Error),
    #[error("ledger line {line}: {reason}")]
    Corrupt { line: usize, reason: String },
    #[error("ledger parameters differ from this run:\n{0}")]
    Mismatch(String),
    #[error("invalid scan parameters: {0}")]
    Params(String),
    #[error("no ledger at {0}")]
    Missing(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerHeader {
    pub depth: usize,
    pub strict: bool,
    pub property: Property,
    pub version: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Verified,
    FailedAtLevel { level: usize, witness: Witness },
    PositivityFailedAtLevel { level: usize, index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerRecord {
    pub m: usize,
    pub depth_requested: usize,
    pub depth_verified: usize,
    pub verdict: Verdict,
    pub wall_time_ms: u64,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum LedgerLine {
    Header(LedgerHeader),
    Record(LedgerRecord),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanParams {
    pub from: usize,
    pub to: usize,
    pub depth: usize,
    pub strict: bool,
    pub property: Property,
    pub workers: usize,
    /// Stop after this many new cells, leaving the rest for a later resume.
    pub max_cells: Option<usize>,
}

impl ScanParams {
    pub fn new(from: usize, to: usize, depth: usize, strict: bool) -> Self {
        ScanParams {
            from,
            to,
            depth,
            strict,
            property: Property::RatioMonotone,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            max_cells: None,
        }
    }

    fn header(&self) -> LedgerHeader {
        LedgerHeader {
            depth: self.depth,
            strict: self.strict,
            property: self.property,
            version: LEDGER_VERSION,
        }
    }

    fn validate(&self) -> Result<(), ScanError> {
        if self.from < 2 {
            return Err(ScanError::Params(format!("--from must be at least 2, got {}", self.from)));
        }
        if self.from > self.to {
            return Err(ScanError::Params(format!("empty range {}..={}", self.from, self.to)));
        }
        if self.depth < 1 {
            return Err(ScanError::Params("depth must be at least 1".into()));
        }
        if self.workers < 1 {
            return Err(ScanError::Params("workers must be at least 1".into()));
        }
        Ok(())
    }
}

/// Ledger contents after a scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanLedger {
    pub header: LedgerHeader,
    /// Every record in the file, keyed by `m`.
    pub records: BTreeMap<usize, LedgerRecord>,
    /// Cells computed by this call.
    pub appended: Vec<usize>,
    /// Cells found already complete.
    pub skipped: Vec<usize>,
}

impl ScanLedger {
    /// Records for `from..=to`, in order of `m`.
    pub fn in_range(&self, from: usize, to: usize) -> impl Iterator<Item = &LedgerRecord> {
        self.records.range(from..=to).map(|(_, r)| r)
    }

    pub fn all_verified(&self, from: usize, to: usize) -> bool {
        (from..=to).all(|m| matches!(self.records.get(&m), Some(r) if r.verdict == Verdict::Verified))
    }
}

/// Verdict for a single `m`: the property on `L^0 .. L^{depth-1}` of the row.
pub fn scan_cell(m: usize, depth: usize, strict: bool, property: Property) -> LedgerRecord {
    let start = Instant::now();
    let row = closed_form_row(m);
    let v = k_property(row.coeffs(), depth, property, strict);
    let verdict = match (&v.witness, v.holds) {
        (_, true) | (None, _) => Verdict::Verified,
        (Some(w), false) if v.positivity_failure() => Verdict::PositivityFailedAtLevel {
            level: v.level,
            index: w.i,
        },
        (Some(w), false) => Verdict::FailedAtLevel {
            level: v.level,
            witness: w.clone(),
        },
    };
    LedgerRecord {
        m,
        depth_requested: depth,
        depth_verified: v.level,
        verdict,
        wall_time_ms: start.elapsed().as_millis() as u64,
        timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
    }
}

struct Loaded {
    header: Option<LedgerHeader>,
    records: BTreeMap<usize, LedgerRecord>,
    /// Byte length of the valid prefix.
    valid_len: u64,
}

fn load(path: &Path) -> Result<Loaded, ScanError> {
    let mut loaded = Loaded {
        header: None,
        records: BTreeMap::new(),
        valid_len: 0,
    };
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(loaded),
        Err(e) => return Err(e.into()),
    };
    let mut reader = BufReader::new(file);
    let mut buf = String::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        let n = reader.read_line(&mut buf)?;
        if n == 0 {
            break;
        }
        line_no += 1;
        if !buf.ends_with('\n') {
            // Torn write from an interrupted run.
            break;
        }
        let text = buf.trim();
        if text.is_empty() {
            loaded.valid_len += n as u64;
            continue;
        }
        let parsed: LedgerLine = match serde_json::from_str(text) {
            Ok(p) => p,
            Err(e) => {
                return Err(ScanError::Corrupt {
                    line: line_no,
                    reason: e.to_string(),
                })
            }
        };
        match (parsed, loaded.header.is_some()) {
            (LedgerLine::Header(h), false) => loaded.header = Some(h),
            (LedgerLine::Header(_), true) => {
                return Err(ScanError::Corrupt {
                    line: line_no,
                    reason: "second header".into(),
                })
            }
            (LedgerLine::Record(_), false) => {
                return Err(ScanError::Corrupt {
                    line: line_no,
                    reason: "record before header".into(),
                })
            }
            (LedgerLine::Record(r), true) => {
                loaded.records.insert(r.m, r);
            }
        }
        loaded.valid_len += n as u64;
    }
    Ok(loaded)
}

fn header_diff(found: &LedgerHeader, wanted: &LedgerHeader) -> Option<String> {
    let mut lines = Vec::new();
    if found.depth != wanted.depth {
        lines.push(format!("  depth: ledger {} vs requested {}", found.depth, wanted.depth));
    }
    if found.strict != wanted.strict {
        lines.push(format!("  strict: ledger {} vs requested {}", found.strict, wanted.strict));
    }
    if found.property != wanted.property {
        lines.push(format!("  property: ledger {} vs requested {}", found.property, wanted.property));
    }
    if found.version != wanted.version {
        lines.push(format!("  version: ledger {} vs this build {}", found.version, wanted.version));
    }
    (!lines.is_empty()).then(|| lines.join("\n"))
}

fn write_line(out: &mut File, line: &LedgerLine) -> io::Result<()> {
    let mut text = serde_json::to_string(line).expect("ledger lines serialize");
    text.push('\n');
    out.write_all(text.as_bytes())?;
    out.flush()
}

/// Scans `from..=to`, creating the ledger or continuing an existing one with
/// matching parameters. Cells already recorded are not recomputed.
pub fn scan(params: &ScanParams, ledger: &Path) -> Result<ScanLedger, ScanError> {
    params.validate()?;
    let wanted = params.header();
    let loaded = load(ledger)?;
    if let Some(found) = &loaded.header {
        if let Some(diff) = header_diff(found, &wanted) {
            return Err(ScanError::Mismatch(diff));
        }
    }

    let mut out = OpenOptions::new().create(true).append(true).open(ledger)?;
    // Drop a torn trailing line so appends start on a clean boundary.
    if out.metadata()?.len() != loaded.valid_len {
        out.set_len(loaded.valid_len)?;
    }
    if loaded.header.is_none() {
        out.set_len(0)?;
        write_line(&mut out, &LedgerLine::Header(wanted))?;
    }

    let mut records = loaded.records;
    let (skipped, mut pending): (Vec<usize>, Vec<usize>) =
        (params.from..=params.to).partition(|m| records.contains_key(m));
    if let Some(cap) = params.max_cells {
        pending.truncate(cap);
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(params.workers)
        .build()
        .map_err(|e| ScanError::Params(e.to_string()))?;
    let (tx, rx) = mpsc::channel::<LedgerRecord>();
    let mut appended = Vec::with_capacity(pending.len());
    let write_result: io::Result<()> = std::thread::scope(|s| {
        let jobs = &pending;
        s.spawn(move || {
            pool.install(|| {
                jobs.par_iter().for_each_with(tx, |tx, &m| {
                    // A closed receiver means the writer hit an I/O error.
                    let _ = tx.send(scan_cell(m, params.depth, params.strict, params.property));
                });
            });
        });
        for rec in rx {
            write_line(&mut out, &LedgerLine::Record(rec.clone()))?;
            appended.push(rec.m);
            records.insert(rec.m, rec);
        }
        Ok(())
    });
    write_result?;
    appended.sort_unstable();

    Ok(ScanLedger {
        header: wanted,
        records,
        appended,
        skipped,
    })
}

/// Like [`scan`], but the ledger must already exist.
pub fn scan_resume(ledger: &Path, params: &ScanParams) -> Result<ScanLedger, ScanError> {
    if !ledger.exists() {
        return Err(ScanError::Missing(ledger.display().to_string()));
    }
    scan(params, ledger)
}

/// Reads a ledger without modifying it.
pub fn read_ledger(ledger: &Path) -> Result<(LedgerHeader, Vec<LedgerRecord>), ScanError> {
    let loaded = load(ledger)?;
    let header = loaded
        .header
        .ok_or_else(|| ScanError::Missing(ledger.display().to_string()))?;
    Ok((header, loaded.records.into_values().collect()))
}

/// Re-derives a stored verdict from the row and the recorded level alone.
pub fn replay_record(header: &LedgerHeader, rec: &LedgerRecord) -> bool {
    let row = closed_form_row(rec.m);
    let (prop, strict) = (header.property, header.strict);
    match &rec.verdict {
        Verdict::Verified => {
            rec.depth_verified == rec.depth_requested
                && (0..rec.depth_requested).all(|j| check(prop, &l_iterate(row.coeffs(), j), strict).holds)
        }
        Verdict::FailedAtLevel { level, witness } => {
            let seq = l_iterate(row.coeffs(), *level);
            let v = check(prop, &seq, strict);
            rec.depth_verified == *level && v.witness.as_ref() == Some(witness) && witness_is_genuine(&seq, &v)
        }
        Verdict::PositivityFailedAtLevel { level, index } => {
            let seq = l_iterate(row.coeffs(), *level);
            rec.depth_verified == *level && seq.get(*index).is_some_and(|x| !x.is_positive())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxDepth,
    BitBudget,
    NotRatioMonotone,
    NonPositive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub m: usize,
    pub max_depth: usize,
    pub bit_budget: u64,
    /// Levels `0..depth_confirmed` are strictly ratio monotone.
    pub depth_confirmed: usize,
    pub stop: StopReason,
    /// Largest numerator size reached, in bits.
    pub max_bits: u64,
}

/// Iterates `L` on row `m` while entries stay positive, strictly ratio
/// monotone and below `bit_budget` bits, up to `max_depth` levels.
pub fn deep_probe(m: usize, max_depth: usize, bit_budget: u64) -> ProbeReport {
    let mut cur: Vec<Dyadic> = closed_form_row(m).coeffs().to_vec();
    let mut report = ProbeReport {
        m,
        max_depth,
        bit_budget,
        depth_confirmed: 0,
        stop: StopReason::MaxDepth,
        max_bits: 0,
    };
    while report.depth_confirmed < max_depth {
        let bits = cur.iter().map(Exact::numer_bits).max().unwrap_or(0);
        report.max_bits = report.max_bits.max(bits);
        if bits > bit_budget {
            report.stop = StopReason::BitBudget;
            return report;
        }
        let v = check(Property::RatioMonotone, &cur, true);
        if !v.holds {
            report.stop = if v.positivity_failure() {
                StopReason::NonPositive
            } else {
                StopReason::NotRatioMonotone
            };
            return report;
        }
        report.depth_confirmed += 1;
        if report.depth_confirmed < max_depth {
            cur = l_operator(&cur);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Read;

    fn params(from: usize, to: usize, depth: usize) -> ScanParams {
        ScanParams {
            workers: 4,
            ..ScanParams::new(from, to, depth, true)
        }
    }

    fn lines(path: &Path) -> Vec<String> {
        let mut s = String::new();
        File::open(path).unwrap().read_to_string(&mut s).unwrap();
        s.lines().map(str::to_string).collect()
    }

    #[test]
    fn fresh_scan_writes_header_and_records() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ledger.jsonl");
        let out = scan(&params(2, 30, 2), &path).unwrap();
        assert!(out.all_verified(2, 30));
        assert_eq!(out.appended, (2..=30).collect::<Vec<_>>());
        let text = lines(&path);
        assert_eq!(text.len(), 30);
        assert_eq!(
            text[0],
            r#"{"kind":"header","depth":2,"strict":true,"property":"ratio_monotone","version":1}"#
        );
        assert!(text[1].starts_with(r#"{"kind":"record","m":"#));
    }

    #[test]
    fn interrupted_scan_resumes_without_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l.jsonl");
        let first = scan(&ScanParams { max_cells: Some(10), ..params(2, 40, 2) }, &path).unwrap();
        assert_eq!(first.appended.len(), 10);
        let second = scan_resume(&path, &params(2, 40, 2)).unwrap();
        assert_eq!(second.skipped.len(), 10);
        assert_eq!(second.appended.len(), 29);
        let (_, recs) = read_ledger(&path).unwrap();
        assert_eq!(recs.len(), 39);
        assert_eq!(lines(&path).len(), 40);
        let third = scan_resume(&path, &params(2, 40, 2)).unwrap();
        assert!(third.appended.is_empty());
        assert_eq!(lines(&path).len(), 40);
    }

    #[test]
    fn resumed_verdicts_match_fresh_ones() {
        let dir = tempfile::tempdir().unwrap();
        let fresh = dir.path().join("a");
        let chopped = dir.path().join("b");
        let a = scan(&ScanParams { workers: 1, ..params(2, 25, 3) }, &fresh).unwrap();
        for cap in [3, 5, 100] {
            scan(&ScanParams { max_cells: Some(cap), ..params(2, 25, 3) }, &chopped).unwrap();
        }
        let (_, b) = read_ledger(&chopped).unwrap();
        let verdicts = |recs: Vec<&LedgerRecord>| -> Vec<(usize, Verdict, usize)> {
            recs.into_iter().map(|r| (r.m, r.verdict.clone(), r.depth_verified)).collect()
        };
        assert_eq!(verdicts(a.records.values().collect()), verdicts(b.iter().collect()));
    }

    #[test]
    fn mismatched_parameters_are_refused() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l");
        scan(&params(2, 5, 2), &path).unwrap();
        match scan_resume(&path, &params(2, 5, 3)) {
            Err(ScanError::Mismatch(diff)) => assert!(diff.contains("depth: ledger 2 vs requested 3"), "{diff}"),
            other => panic!("{other:?}"),
        }
        let lax = ScanParams {
            strict: false,
            ..params(2, 5, 2)
        };
        assert!(matches!(scan(&lax, &path), Err(ScanError::Mismatch(_))));
        assert!(matches!(
            scan_resume(&dir.path().join("nope"), &params(2, 5, 2)),
            Err(ScanError::Missing(_))
        ));
    }

    #[test]
    fn torn_line_is_discarded() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l");
        scan(&ScanParams { max_cells: Some(3), ..params(2, 8, 1) }, &path).unwrap();
        OpenOptions::new()
            .append(true)
            .open(&path)
            .unwrap()
            .write_all(br#"{"kind":"record","m":5,"dep"#)
            .unwrap();
        let out = scan(&params(2, 8, 1), &path).unwrap();
        assert!(out.all_verified(2, 8));
        let text = lines(&path);
        assert_eq!(text.len(), 8);
        for l in &text {
            serde_json::from_str::<serde_json::Value>(l).unwrap();
        }
    }

    #[test]
    fn corrupt_ledger_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l");
        std::fs::write(&path, "not json\n").unwrap();
        assert!(matches!(scan(&params(2, 3, 1), &path), Err(ScanError::Corrupt { line: 1, .. })));
    }

    #[test]
    fn bad_parameters() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l");
        for p in [params(1, 5, 1), params(6, 5, 1), params(2, 5, 0)] {
            assert!(matches!(scan(&p, &path), Err(ScanError::Params(_))));
        }
        assert!(!path.exists());
    }

    #[test]
    fn worker_count_does_not_change_verdicts() {
        let dir = tempfile::tempdir().unwrap();
        let runs: Vec<_> = [1, 3, 8]
            .iter()
            .map(|&w| {
                let path = dir.path().join(format!("w{w}"));
                let out = scan(&ScanParams { workers: w, ..params(2, 20, 2) }, &path).unwrap();
                out.records
                    .into_values()
                    .map(|r| (r.m, r.verdict, r.depth_verified))
                    .collect::<Vec<_>>()
            })
            .collect();
        assert_eq!(runs[0], runs[1]);
        assert_eq!(runs[1], runs[2]);
    }

    #[test]
    fn ledger_replays() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l");
        let lc = ScanParams {
            property: Property::LogConcave,
            ..params(2, 12, 4)
        };
        scan(&lc, &path).unwrap();
        let (header, recs) = read_ledger(&path).unwrap();
        assert!(recs.iter().all(|r| replay_record(&header, r)));
        // A tampered verdict no longer replays.
        let mut forged = recs[0].clone();
        forged.verdict = Verdict::FailedAtLevel {
            level: 0,
            witness: Witness {
                kind: crate::seqprops::WitnessKind::LogConcavity,
                i: 1,
                j: None,
                terminal: false,
            },
        };
        forged.depth_verified = 0;
        assert!(!replay_record(&header, &forged));
    }

    #[test]
    fn failing_cells_are_recorded_with_levels() {
        let rec = scan_cell(3, 8, true, Property::RatioMonotone);
        let header = LedgerHeader {
            depth: 8,
            strict: true,
            property: Property::RatioMonotone,
            version: LEDGER_VERSION,
        };
        assert!(replay_record(&header, &rec));
        if rec.verdict != Verdict::Verified {
            assert!(rec.depth_verified < 8);
        }
    }

    #[test]
    fn probe_examples() {
        let p = deep_probe(8, 4, 1_000_000);
        assert!(p.depth_confirmed >= 2, "{p:?}");
        let p = deep_probe(2, 3, 2);
        assert_eq!(p.stop, StopReason::BitBudget);
        assert_eq!(p.depth_confirmed, 0);
        for m in [2, 7, 30] {
            let p = deep_probe(m, 1, DEFAULT_BIT_BUDGET);
            assert_eq!((p.depth_confirmed, p.stop), (1, StopReason::MaxDepth));
            assert_eq!(scan_cell(m, 1, true, Property::RatioMonotone).verdict, Verdict::Verified);
        }
    }
}
