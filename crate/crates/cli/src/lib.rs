//! Argument parsing and report rendering for the `bmtk` binary.

use bmtk_core::bmcoeff::{row_by, rows_to_csv, Method};
use bmtk_core::boundcheck::{run_bound, BoundError, BoundId, BoundReport};
use bmtk_core::exactnum::{parse_rational, rational_to_string, to_decimal, BigRational, Exact};
use bmtk_core::polyident::{run_suite, suite_summary, DEFAULT_GRID};
use bmtk_core::quadoracle::{quartic_integral, QuadError, QuadResult};
use bmtk_core::scanner::{scan, ScanParams, Verdict};
use bmtk_core::seqprops::{k_property, parse_sequence, Property, PropertyVerdict};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "bmtk", version, about = "Exact checks on Boros-Moll coefficient sequences")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Plain)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the coefficients d_0(m) .. d_m(m).
    Gen {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "closed_form", value_parser = parse_method)]
        method: Method,
    },
    /// Check sequence properties on a coefficient row or an ad-hoc sequence.
    Check(CheckArgs),
    /// Check the ratio bounds at one m.
    Bounds {
        #[arg(long)]
        m: usize,
        /// Comma-separated subset of thm21,thm22,l31,l32,l33,l34,sec4.
        #[arg(long, value_delimiter = ',', value_parser = parse_bound)]
        which: Vec<BoundId>,
    },
    /// Verify the polynomial identities and grouped-term nonnegativity.
    Identities {
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: u32,
    },
    /// Compare the quartic integral with its closed form.
    Quad {
        #[arg(long)]
        m: usize,
        /// Exact rational: integer, p/q, p/2^e or a finite decimal.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Scan a range of m with a resumable ledger.
    Scan(ScanArgs),
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, conflicts_with = "seq", required_unless_present = "seq")]
    pub m: Option<usize>,
    /// Comma-separated values, e.g. 2,10,3,1 or 1/2,3/4.
    #[arg(long, allow_hyphen_values = true)]
    pub seq: Option<String>,
    /// Comma-separated: ratio, spiral, logconcave, unimodal.
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_property)]
    pub props: Vec<Property>,
    #[arg(long)]
    pub strict: bool,
    /// Check L^0 .. L^{depth-1}.
    #[arg(long, default_value_t = 1)]
    pub depth: usize,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub from: usize,
    #[arg(long)]
    pub to: usize,
    #[arg(long)]
    pub depth: usize,
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub ledger: PathBuf,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, default_value = "ratio", value_parser = parse_property)]
    pub property: Property,
    /// Stop after this many new cells; a later run resumes.
    #[arg(long)]
    pub max_cells: Option<usize>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse::<Method>().map_err(|e| e.to_string())
}

fn parse_bound(s: &str) -> Result<BoundId, String> {
    s.parse::<BoundId>().map_err(|e| e.to_string())
}

fn parse_property(s: &str) -> Result<Property, String> {
    s.parse::<Property>()
}

/// A rendered report and whether every check in it held.
#[derive(Debug, Clone)]
pub struct Report {
    pub ok: bool,
    pub json: Value,
    pub csv: String,
    pub plain: String,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("json renders");
                s.push('\n');
                s
            }
            Format::Csv => self.csv.clone(),
            Format::Plain => self.plain.clone(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.ok {
            EXIT_OK
        } else {
            EXIT_FAILED
        }
    }
}

/// Bad input that is not a failed check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn usage(msg: impl std::fmt::Display) -> UsageError {
    UsageError(msg.to_string())
}

pub fn execute(command: &Command) -> Result<Report, UsageError> {
    match command {
        Command::Gen { m, method } => gen(*m, *method),
        Command::Check(args) => check(args),
        Command::Bounds { m, which } => bounds(*m, which),
        Command::Identities { grid } => identities(*grid),
        Command::Quad { m, a, tol } => quad(*m, a, *tol),
        Command::Scan(args) => scan_cmd(args),
    }
}

/// Parses `args` (program name first), runs, writes the report, and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let report = match execute(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let text = report.render(cli.format);
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
        }
        None => print!("{text}"),
    }
    report.exit_code()
}

fn decimal(r: &BigRational) -> String {
    to_decimal(r, 20)
}

fn gen(m: usize, method: Method) -> Result<Report, UsageError> {
    let row = match row_by(method, m) {
        Ok(row) => row,
        Err(e) => {
            return Ok(Report {
                ok: false,
                json: json!({ "m": m, "method": method, "error": e.to_string() }),
                csv: String::new(),
                plain: format!("generation failed: {e}\n"),
            })
        }
    };
    let decimals: Vec<String> = row.coeffs().iter().map(|d| decimal(&d.to_rational())).collect();
    let mut json = row.to_json();
    json["decimals"] = json!(decimals);
    let mut plain = format!("P_{m}(a) coefficients ({method}):\n");
    for (i, (d, dec)) in row.coeffs().iter().zip(&decimals).enumerate() {
        plain.push_str(&format!("d_{i} = {d}  ~ {dec}\n"));
    }
    Ok(Report {
        ok: true,
        json,
        csv: rows_to_csv(std::slice::from_ref(&row)),
        plain,
    })
}

fn verdict_line(v: &PropertyVerdict, depth: usize) -> String {
    let mode = if v.strict { "strict" } else { "non-strict" };
    if v.holds {
        return format!("{} ({mode}, depth {depth}): holds\n", v.property);
    }
    let w = v.witness.as_ref().expect("failed verdict has a witness");
    let mut at = format!("i={}", w.i);
    if let Some(j) = w.j {
        at.push_str(&format!(", j={j}"));
    }
    if w.terminal {
        at.push_str(", terminal link");
    }
    format!(
        "{} ({mode}, depth {depth}): FAILS at level {} [{:?} at {at}]\n",
        v.property, v.level, w.kind
    )
}

fn check_on<T: Exact>(seq: &[T], args: &CheckArgs, input: Value) -> Report {
    let verdicts: Vec<PropertyVerdict> = args
        .props
        .iter()
        .map(|&p| k_property(seq, args.depth, p, args.strict))
        .collect();
    let ok = verdicts.iter().all(|v| v.holds);
    let mut plain = String::new();
    let mut csv = String::from("property,strict,depth,holds,level,witness_kind,witness_i\n");
    for v in &verdicts {
        plain.push_str(&verdict_line(v, args.depth));
        let (kind, i) = match &v.witness {
            Some(w) => (format!("{:?}", w.kind), w.i.to_string()),
            None => (String::new(), String::new()),
        };
        csv.push_str(&format!(
            "{},{},{},{},{},{kind},{i}\n",
            v.property, v.strict, args.depth, v.holds, v.level
        ));
    }
    Report {
        ok,
        json: json!({
            "input": input,
            "strict": args.strict,
            "depth": args.depth,
            "verdicts": verdicts.iter().map(PropertyVerdict::to_json).collect::<Vec<_>>(),
            "all_hold": ok,
        }),
        csv,
        plain,
    }
}

fn check(args: &CheckArgs) -> Result<Report, UsageError> {
    if args.depth < 1 {
        return Err(usage("--depth must be at least 1"));
    }
    if let Some(m) = args.m {
        let row = bmtk_core::closed_form_row(m);
        return Ok(check_on(row.coeffs(), args, json!({ "m": m })));
    }
    let list = args.seq.as_deref().expect("clap requires --m or --seq");
    let seq = parse_sequence(list).map_err(usage)?;
    if seq.is_empty() {
        return Err(usage("--seq is empty"));
    }
    let shown: Vec<String> = seq.iter().map(rational_to_string).collect();
    Ok(check_on(&seq, args, json!({ "seq": shown })))
}

fn bounds(m: usize, which: &[BoundId]) -> Result<Report, UsageError> {
    let explicit = !which.is_empty();
    let ids: Vec<BoundId> = if explicit { which.to_vec() } else { BoundId::ALL.to_vec() };
    let mut reports: Vec<BoundReport> = Vec::new();
    let mut skipped = Vec::new();
    for id in ids {
        match run_bound(id, m) {
            Ok(r) => reports.push(r),
            Err(BoundError::Precondition { .. }) if !explicit => skipped.push(id),
            Err(e) => return Err(usage(e)),
        }
    }
    let ok = reports.iter().all(BoundReport::all_hold);
    let mut plain = String::new();
    let mut csv = String::from("bound,label,i,relation,lhs,rhs,holds,margin\n");
    for r in &reports {
        let verdict = if r.all_hold() { "all hold" } else { "FAILED" };
        plain.push_str(&format!("{} at m={}: {verdict} ({} records)", r.bound, r.m, r.records.len()));
        if let Some(dec) = &r.summary.min_ratio_decimal {
            plain.push_str(&format!(", min ratio {dec}"));
        }
        plain.push('\n');
        for f in r.failures() {
            plain.push_str(&format!(
                "  {} i={}: {} {} {} (margin {})\n",
                f.label,
                f.i,
                rational_to_string(&f.lhs),
                f.relation.symbol(),
                rational_to_string(&f.rhs),
                rational_to_string(&f.margin)
            ));
        }
        for rec in &r.records {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.bound,
                rec.label,
                rec.i,
                rec.relation.symbol(),
                rational_to_string(&rec.lhs),
                rational_to_string(&rec.rhs),
                rec.holds,
                rational_to_string(&rec.margin)
            ));
        }
    }
    for id in &skipped {
        plain.push_str(&format!("{id}: skipped, needs m >= {}\n", id.min_m()));
    }
    Ok(Report {
        ok,
        json: json!({
            "m": m,
            "reports": reports,
            "skipped": skipped,
            "all_hold": ok,
        }),
        csv,
        plain,
    })
}

fn identities(grid: u32) -> Result<Report, UsageError> {
    if grid < 1 {
        return Err(usage("--grid must be at least 1"));
    }
    let results = run_suite(grid);
    let summary = suite_summary(&results);
    let ok = summary.iter().all(|e| e.equal && e.grid_ok != Some(false));
    let mut plain = String::new();
    let mut csv = String::from("identity,equal,grid_ok\n");
    for ((res, report), entry) in results.iter().zip(&summary) {
        plain.push_str(&res.describe());
        if let Some(g) = report {
            plain.push_str(&format!(
                ", grid N={}: {} ({} evaluations",
                g.bound,
                if g.ok() { "nonnegative" } else { "NEGATIVE VALUES" },
                g.points
            ));
            if let Some(first) = g.negatives.first() {
                plain.push_str(&format!(
                    "; first: group {} at ({}, {}) = {}",
                    first.group, first.x, first.y, first.value
                ));
            }
            plain.push(')');
        }
        plain.push('\n');
        let grid_ok = entry.grid_ok.map_or(String::new(), |b| b.to_string());
        csv.push_str(&format!("{},{},{grid_ok}\n", entry.identity, entry.equal));
    }
    Ok(Report {
        ok,
        json: json!({ "grid": grid, "results": summary, "all_ok": ok }),
        csv,
        plain,
    })
}

fn quad_report(q: &QuadResult, tol: f64, ok: bool, note: Option<String>) -> Report {
    let mut json = serde_json::to_value(q).expect("quad result serializes");
    json["tol"] = json!(tol);
    json["ok"] = json!(ok);
    if let Some(n) = &note {
        json["error"] = json!(n);
    }
    let mut plain = format!(
        "m={} a={}\n  integral   {:.17e}\n  closed form {:.17e}\n  relative deviation {:.3e} (error estimate {:.3e}, {} subintervals)\n",
        q.m, q.a_exact, q.integral_estimate, q.rhs_value, q.relative_deviation, q.abs_error_estimate, q.subintervals
    );
    if let Some(n) = note {
        plain.push_str(&format!("  {n}\n"));
    }
    let csv = format!(
        "m,a,integral_estimate,rhs_value,abs_error_estimate,relative_deviation\n{},{},{:e},{:e},{:e},{:e}\n",
        q.m, q.a_exact, q.integral_estimate, q.rhs_value, q.abs_error_estimate, q.relative_deviation
    );
    Report { ok, json, csv, plain }
}

fn quad(m: usize, a: &str, tol: f64) -> Result<Report, UsageError> {
    let a = parse_rational(a).map_err(usage)?;
    match quartic_integral(m, &a, tol) {
        Ok(q) => {
            let ok = q.relative_deviation <= 10.0 * tol;
            Ok(quad_report(&q, tol, ok, None))
        }
        Err(QuadError::NotConverged { best }) => {
            let note = format!("tolerance {tol:e} not reached; best estimate shown");
            Ok(quad_report(&best, tol, false, Some(note)))
        }
        Err(e) => Err(usage(e)),
    }
}

fn scan_cmd(args: &ScanArgs) -> Result<Report, UsageError> {
    let mut params = ScanParams::new(args.from, args.to, args.depth, args.strict);
    params.property = args.property;
    params.max_cells = args.max_cells;
    if let Some(w) = args.workers {
        params.workers = w;
    }
    let ledger = scan(&params, &args.ledger).map_err(usage)?;
    let recs: Vec<_> = ledger.in_range(args.from, args.to).collect();
    let verified = recs.iter().filter(|r| r.verdict == Verdict::Verified).count();
    let failures: Vec<_> = recs.iter().filter(|r| r.verdict != Verdict::Verified).collect();
    let pending = (args.to - args.from + 1) - recs.len();
    let ok = failures.is_empty();
    let mode = if args.strict { "strictly " } else { "" };
    let mut plain = format!(
        "m in {}..={}: {verified} {mode}{} to depth {}, {} failed, {pending} pending ({} new, {} already in ledger)\n",
        args.from,
        args.to,
        args.property,
        args.depth,
        failures.len(),
        ledger.appended.len(),
        ledger.skipped.len()
    );
    for f in &failures {
        plain.push_str(&format!("  m={} verified to depth {}: {:?}\n", f.m, f.depth_verified, f.verdict));
    }
    let mut csv = String::from("m,depth_requested,depth_verified,status\n");
    for r in &recs {
        let status = match r.verdict {
            Verdict::Verified => "verified",
            Verdict::FailedAtLevel { .. } => "failed_at_level",
            Verdict::PositivityFailedAtLevel { .. } => "positivity_failed_at_level",
        };
        csv.push_str(&format!("{},{},{},{status}\n", r.m, r.depth_requested, r.depth_verified));
    }
    Ok(Report {
        ok,
        json: json!({
            "from": args.from,
            "to": args.to,
            "depth": args.depth,
            "strict": args.strict,
            "property": args.property,
            "ledger": args.ledger.display().to_string(),
            "appended": ledger.appended.len(),
            "skipped": ledger.skipped.len(),
            "verified": verified,
            "pending": pending,
            "failures": failures,
            "all_verified": ok && pending == 0,
        }),
        csv,
        plain,
    })
}
