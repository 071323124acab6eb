//! The `lsqrank` command line.
//!
//! Exit codes: 0 success, 1 usage, 2 I/O or file format, 3 numerical or
//! check failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::instances::{gen_adversarial_uniform, gen_near_rank1, gen_rank2_counter};
use crate::io::{is_bin_file, load_matrix, save_bin, save_csv, BinFile};
use crate::matrix::{frobenius_sq, DenseMatrix};
use crate::oracle::{check_lemmas, decompose, default_l, exact_expected_mapping_error, monte_carlo_mapping_error};
use crate::rng::RngStream;
use crate::spanfit::{
    mean_se, ratio_sweep, run_trials, Method, SweepCell, TrialContext, TrialReport, REPORT_HEADER,
    SWEEP_HEADER,
};
use crate::stream::{space_budget, two_pass_approx};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "lsqrank",
    version,
    about = "Length-squared row sampling for rank-1 approximation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate an instance and write it to a file
    Gen(GenArgs),
    /// Sample rows, fit the best rank-1 matrix in their span, report ratios
    Approx(ApproxArgs),
    /// Two-pass streaming approximation over a binary matrix file
    Stream(StreamArgs),
    /// Check every bound of the sampling analysis in closed form
    Verify(VerifyArgs),
    /// Sweep sample sizes and methods, aggregate mean ratios
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Adv,
    R2,
    #[value(name = "near-rank1", alias = "near_rank1")]
    NearRank1,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Bin,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    y: Option<f64>,
    /// Spike strength for near-rank1
    #[arg(long)]
    spike: Option<f64>,
    /// Noise level for near-rank1
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Output format; inferred from a `.bin` extension when omitted
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct ApproxArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    s: usize,
    #[arg(long, default_value = "lsq")]
    method: Method,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-trial CSV report
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StreamArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    s: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
    passes: u8,
    /// Prefix for factor files: PREFIX.right.csv, and PREFIX.left.csv with --passes 3
    #[arg(long)]
    factors: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    eps: f64,
    /// Sample count; defaults to ceil(2/eps^4)
    #[arg(long)]
    l: Option<usize>,
    /// Monte Carlo draws of the mapping construction to cross-check the closed form
    #[arg(long)]
    mc: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Machine-readable lemma CSV
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long = "s-list", value_delimiter = ',', required = true)]
    s_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "lsq")]
    methods: Vec<Method>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Aggregated CSV report
    #[arg(long)]
    report: Option<PathBuf>,
    /// Per-trial CSV of every cell
    #[arg(long)]
    raw: Option<PathBuf>,
}

/// A parsed line of the per-trial report CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub trial: usize,
    pub method: Method,
    pub s: usize,
    pub err_sq: f64,
    pub opt_err_sq: f64,
    pub ratio: f64,
    pub status: String,
    pub seed: u64,
    pub stream_id: u64,
}

impl ReportRow {
    pub fn parse(line: &str) -> Result<Self> {
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 9 {
            return Err(Error::Format(format!("expected 9 report fields, got {}", fields.len())));
        }
        fn num<T: std::str::FromStr>(s: &str) -> Result<T> {
            s.parse().map_err(|_| Error::Format(format!("bad report field '{s}'")))
        }
        Ok(Self {
            trial: num(fields[0])?,
            method: fields[1].parse()?,
            s: num(fields[2])?,
            err_sq: num(fields[3])?,
            opt_err_sq: num(fields[4])?,
            ratio: num(fields[5])?,
            status: fields[6].to_string(),
            seed: num(fields[7])?,
            stream_id: num(fields[8])?,
        })
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) | Error::Format(_) | Error::EmptyStream | Error::InvalidMatrix(_) => EXIT_IO,
        Error::Parameter(_) => EXIT_USAGE,
        Error::ZeroMatrix
        | Error::ConvergenceFailure { .. }
        | Error::AllZeroRows
        | Error::DimensionMismatch { .. } => EXIT_NUMERIC,
    }
}

/// A command's failure: an exit code and a message for stderr.
struct Failure(i32, String);

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure(exit_code(&err), err.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Failure(EXIT_IO, err.to_string())
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure(EXIT_USAGE, msg.into())
}

/// Parses `args` (including the program name) and runs the command,
/// writing normal output to `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a, out),
        Command::Approx(a) => cmd_approx(a, out),
        Command::Stream(a) => cmd_stream(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Bench(a) => cmd_bench(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn required<T>(value: Option<T>, flag: &str, kind: &str) -> std::result::Result<T, Failure> {
    value.ok_or_else(|| usage(format!("--{flag} is required for --kind {kind}")))
}

fn cmd_gen(args: GenArgs, out: &mut dyn Write) -> CmdResult {
    let a = match args.kind {
        Kind::Adv | Kind::R2 => {
            let name = if matches!(args.kind, Kind::Adv) { "adv" } else { "r2" };
            let n = required(args.n, "n", name)?;
            let x = required(args.x, "x", name)?;
            let y = required(args.y, "y", name)?;
            if matches!(args.kind, Kind::Adv) {
                gen_adversarial_uniform(n, x, y)?
            } else {
                gen_rank2_counter(n, x, y)?
            }
        }
        Kind::NearRank1 => gen_near_rank1(
            required(args.n, "n", "near-rank1")?,
            required(args.d, "d", "near-rank1")?,
            required(args.spike, "spike", "near-rank1")?,
            required(args.rho, "rho", "near-rank1")?,
            args.seed,
        )?,
    };
    let format = args.format.unwrap_or_else(|| {
        if args.out.extension().is_some_and(|e| e == "bin") {
            Format::Bin
        } else {
            Format::Csv
        }
    });
    match format {
        Format::Csv => save_csv(&args.out, &a)?,
        Format::Bin => save_bin(&args.out, &a)?,
    }
    writeln!(out, "n={} d={} fn={}", a.nrows(), a.ncols(), frobenius_sq(&a))?;
    Ok(())
}

fn write_trial_report(path: &Path, reports: &[TrialReport]) -> std::io::Result<()> {
    let mut text = String::from(REPORT_HEADER);
    text.push('\n');
    for (t, r) in reports.iter().enumerate() {
        text.push_str(&r.csv_row(t));
        text.push('\n');
    }
    fs::write(path, text)
}

fn cmd_approx(args: ApproxArgs, out: &mut dyn Write) -> CmdResult {
    if args.s == 0 || args.trials == 0 {
        return Err(usage("--s and --trials must be at least 1"));
    }
    let a = load_matrix(&args.input)?;
    let ctx = TrialContext::new(&a)?;
    let reports = run_trials(&ctx, args.s, args.method, args.trials, args.seed);
    if let Some(path) = &args.report {
        write_trial_report(path, &reports)?;
    }
    let cell = SweepCell::from_reports(args.method, args.s, &reports);
    writeln!(
        out,
        "method={} s={} trials={} failed={} mean_ratio={} se={}",
        cell.method, cell.s, cell.trials, cell.failed, cell.mean_ratio, cell.se_ratio
    )?;
    if cell.failed == cell.trials {
        return Err(Failure(EXIT_NUMERIC, "every trial failed".into()));
    }
    Ok(())
}

fn write_column_csv(path: &Path, values: &[f64], as_row: bool) -> std::io::Result<()> {
    let text = if as_row {
        let fields: Vec<String> = values.iter().map(|v| v.to_string()).collect();
        format!("{}\n", fields.join(","))
    } else {
        values.iter().map(|v| format!("{v}\n")).collect()
    };
    fs::write(path, text)
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_stream(args: StreamArgs, out: &mut dyn Write) -> CmdResult {
    if args.s == 0 {
        return Err(usage("--s must be at least 1"));
    }
    if !is_bin_file(&args.input)? {
        return Err(Failure(
            EXIT_IO,
            "streaming requires the LSQ1 binary format (convert with `gen --format bin`)".into(),
        ));
    }
    let mut source = BinFile::open(&args.input)?;
    let materialize_left = args.passes == 3;
    let fit = two_pass_approx(
        &mut source,
        args.s,
        &mut RngStream::new(args.seed, 0),
        materialize_left,
    )?;
    let budget = space_budget(fit.stats.s, fit.stats.d);
    writeln!(
        out,
        "err_sq={} fn={} peak_scalars={} budget={} passes={} span_rank={} n={} d={}",
        fit.err_sq,
        fit.total_sq,
        fit.stats.peak_scalars,
        budget,
        fit.stats.passes,
        fit.span_rank,
        fit.stats.n,
        fit.stats.d
    )?;
    let prefix = args
        .factors
        .clone()
        .or_else(|| materialize_left.then(|| args.input.with_extension("")));
    if let Some(prefix) = prefix {
        let right = with_suffix(&prefix, ".right.csv");
        write_column_csv(&right, &fit.right, true)?;
        writeln!(out, "right factor: {}", right.display())?;
        if let Some(left) = &fit.left {
            let path = with_suffix(&prefix, ".left.csv");
            write_column_csv(&path, left, false)?;
            writeln!(out, "left factor: {}", path.display())?;
        }
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs, out: &mut dyn Write) -> CmdResult {
    if !(args.eps > 0.0 && args.eps < 1.0) {
        return Err(usage("--eps must lie in (0, 1)"));
    }
    let a = load_matrix(&args.input)?;
    let frame = decompose(&a)?;
    let l_default = default_l(args.eps);
    let l = args.l.unwrap_or(l_default);
    if l == 0 {
        return Err(usage("--l must be at least 1"));
    }
    writeln!(out, "eps={} -> l=ceil(2/eps^4)={}; using l={}", args.eps, l_default, l)?;
    let report = check_lemmas(&frame, args.eps, l, &frame.dist)?;
    write!(out, "{report}")?;
    if let Some(path) = &args.csv {
        fs::write(path, report.to_csv())?;
    }
    if let Some(draws) = args.mc {
        if draws == 0 {
            return Err(usage("--mc must be at least 1"));
        }
        let closed = exact_expected_mapping_error(&frame, args.eps, l, &frame.dist);
        let (mean, se) = monte_carlo_mapping_error(
            &a,
            &frame,
            args.eps,
            l,
            draws,
            &mut RngStream::new(args.seed, 0),
        )?;
        let z = if se > 0.0 { (mean - closed).abs() / se } else { f64::INFINITY };
        writeln!(
            out,
            "mc draws={draws} mean={mean} se={se} closed_form={closed} z={z} within_3se={}",
            (mean - closed).abs() <= 3.0 * se
        )?;
    }
    if report.all_pass() {
        writeln!(out, "result: all applicable checks pass")?;
        Ok(())
    } else {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| c.asserted && !c.pass)
            .map(|c| c.name)
            .collect();
        writeln!(out, "result: FAILED {}", failed.join(","))?;
        Err(Failure(EXIT_NUMERIC, format!("bound checks failed: {}", failed.join(", "))))
    }
}

fn cmd_bench(args: BenchArgs, out: &mut dyn Write) -> CmdResult {
    if args.trials == 0 || args.s_list.contains(&0) || args.methods.is_empty() {
        return Err(usage("--trials and every --s-list entry must be at least 1"));
    }
    let a = load_matrix(&args.input)?;
    let sweep = ratio_sweep(&a, &args.s_list, &args.methods, args.trials, args.seed)?;
    let mut text = String::from(SWEEP_HEADER);
    text.push('\n');
    for cell in &sweep.cells {
        text.push_str(&cell.csv_row());
        text.push('\n');
    }
    write!(out, "{text}")?;
    if let Some(path) = &args.report {
        fs::write(path, &text)?;
    }
    if let Some(path) = &args.raw {
        let mut raw = String::from(REPORT_HEADER);
        raw.push('\n');
        for reports in &sweep.raw {
            for (t, r) in reports.iter().enumerate() {
                raw.push_str(&r.csv_row(t));
                raw.push('\n');
            }
        }
        fs::write(path, raw)?;
    }
    if sweep.cells.iter().all(|c| c.failed == c.trials) {
        return Err(Failure(EXIT_NUMERIC, "every trial failed".into()));
    }
    Ok(())
}

/// Re-aggregates a per-trial report CSV into one cell per `(method, s)`, in
/// first-seen order.
pub fn aggregate_report(text: &str) -> Result<Vec<SweepCell>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == REPORT_HEADER => {}
        _ => return Err(Error::Format("missing report header".into())),
    }
    // Per cell: ratios of finished trials and the failed count.
    let mut groups: Vec<((Method, usize), Vec<f64>, usize)> = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let row = ReportRow::parse(line)?;
        let key = (row.method, row.s);
        let slot = match groups.iter().position(|g| g.0 == key) {
            Some(p) => p,
            None => {
                groups.push((key, Vec::new(), 0));
                groups.len() - 1
            }
        };
        if row.is_ok() {
            groups[slot].1.push(row.ratio);
        } else {
            groups[slot].2 += 1;
        }
    }
    Ok(groups
        .into_iter()
        .map(|((method, s), ratios, failed)| {
            let (mean_ratio, se_ratio) = mean_se(&ratios);
            SweepCell {
                method,
                s,
                trials: ratios.len() + failed,
                mean_ratio,
                se_ratio,
                failed,
            }
        })
        .collect())
}

/// Loads a factor CSV written by `stream` back into a vector.
pub fn load_factor(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let m: DenseMatrix = crate::io::load_csv(path)?;
    Ok(m.into_vec())
}
