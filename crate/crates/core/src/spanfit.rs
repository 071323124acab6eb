//! Best rank-1 approximation constrained to the span of sampled rows, and the
//! trial/sweep machinery that measures approximation ratios.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::{
    axpy, best_rank1, canonicalize_sign, frobenius_sq, norm, orthonormalize_owned, residual_error_sq,
    sym_top_eigen, Basis, DenseMatrix, Rank1, POWER_MAX_ITER, POWER_TOL,
};
use crate::par;
use crate::rng::RngStream;
use crate::sampling::{adaptive_sample, reservoir_sample, uniform_sample, SPAN_TOL};

/// Relative threshold (against `‖A‖²_F`) below which an error counts as zero
/// when forming ratios.
pub const ZERO_ERR_REL: f64 = 1e-12;

/// Running `Σ (Q aᵢ)(Q aᵢ)ᵀ` for a fixed orthonormal basis `Q`.
///
/// Both the in-memory fit and the streaming second pass feed rows through
/// this accumulator in stream order, so they agree to the last bit.
#[derive(Debug, Clone)]
pub struct ProjectedGram {
    k: usize,
    gram: Vec<f64>,
    coords: Vec<f64>,
}

impl ProjectedGram {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            gram: vec![0.0; k * k],
            coords: vec![0.0; k],
        }
    }

    /// Scalars held: the `k x k` accumulator and one coordinate vector.
    pub fn stored_scalars(&self) -> usize {
        self.k * self.k + self.k
    }

    pub fn add_row(&mut self, basis: &Basis, row: &[f64]) {
        for (c, q) in self.coords.iter_mut().zip(&basis.vectors) {
            *c = crate::matrix::dot(q, row);
        }
        for (i, &ci) in self.coords.iter().enumerate() {
            if ci != 0.0 {
                axpy(ci, &self.coords, &mut self.gram[i * self.k..(i + 1) * self.k]);
            }
        }
    }

    /// Top eigenpair `(λ, q)` with `q = Qᵀw` lifted to the ambient space.
    pub fn solve(&self, basis: &Basis, d: usize) -> Result<(f64, Vec<f64>)> {
        let (lambda, w) = sym_top_eigen(&self.gram, self.k, POWER_TOL, POWER_MAX_ITER)?;
        let mut q = basis.lift(&w, d);
        let nq = norm(&q);
        q.iter_mut().for_each(|x| *x /= nq);
        canonicalize_sign(&mut q);
        Ok((lambda, q))
    }
}

/// Result of [`best_rank1_in_span`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpanFit {
    pub approx: Rank1,
    /// `‖A − Ã‖²_F = ‖A‖²_F − ‖Aq‖²`, clamped at zero.
    pub err_sq: f64,
    /// Dimension of the span of the sample.
    pub span_rank: usize,
}

/// Best rank-1 matrix whose rows lie in the span of `sample_rows`.
///
/// Maximizes `‖Aq‖²` over unit `q` in the span through the top eigenpair of
/// the small matrix `(AQᵀ)ᵀ(AQᵀ)`. An all-zero sample gives the zero matrix
/// with `err_sq = ‖A‖²_F` and `span_rank = 0`.
pub fn best_rank1_in_span<R: AsRef<[f64]>>(a: &DenseMatrix, sample_rows: &[R]) -> Result<SpanFit> {
    let d = a.ncols();
    let mut rows = Vec::with_capacity(sample_rows.len());
    for r in sample_rows {
        let r = r.as_ref();
        if r.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: r.len(),
            });
        }
        rows.push(r.to_vec());
    }
    let basis = orthonormalize_owned(rows, SPAN_TOL);
    fit_in_basis(a, &basis)
}

pub(crate) fn fit_in_basis(a: &DenseMatrix, basis: &Basis) -> Result<SpanFit> {
    let total = frobenius_sq(a);
    if basis.rank == 0 {
        return Ok(SpanFit {
            approx: Rank1::zero(a.nrows(), a.ncols()),
            err_sq: total,
            span_rank: 0,
        });
    }
    let mut gram = ProjectedGram::new(basis.rank);
    for row in a.rows() {
        gram.add_row(basis, row);
    }
    let (lambda, q) = gram.solve(basis, a.ncols())?;
    let left = a.mul_vec(&q);
    Ok(SpanFit {
        approx: Rank1::new(left, q)?,
        err_sq: (total - lambda).max(0.0),
        span_rank: basis.rank,
    })
}

/// `err / opt`, with `1` when both vanish and `+∞` when only `opt` does.
pub fn approximation_ratio(err_sq: f64, opt_err_sq: f64, total_sq: f64) -> f64 {
    let zero = ZERO_ERR_REL * total_sq;
    if opt_err_sq <= zero {
        if err_sq <= zero {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        err_sq / opt_err_sq
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Lsq,
    Uniform,
    Adaptive,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Lsq => "lsq",
            Method::Uniform => "uniform",
            Method::Adaptive => "adaptive",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "lsq" => Ok(Method::Lsq),
            "uniform" => Ok(Method::Uniform),
            "adaptive" => Ok(Method::Adaptive),
            other => Err(Error::Parameter(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrialStatus {
    Ok,
    Failed(String),
}

impl TrialStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, TrialStatus::Ok)
    }

    fn from_error(err: &Error) -> Self {
        let kind = match err {
            Error::ZeroMatrix => "zero_matrix",
            Error::ConvergenceFailure { .. } => "convergence_failure",
            Error::EmptyStream => "empty_stream",
            Error::AllZeroRows => "all_zero_rows",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            _ => "error",
        };
        TrialStatus::Failed(kind.to_string())
    }
}

impl fmt::Display for TrialStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrialStatus::Ok => f.write_str("ok"),
            TrialStatus::Failed(kind) => f.write_str(kind),
        }
    }
}

/// Outcome of one sampling-and-fit trial. Errors are squared Frobenius norms.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialReport {
    pub method: Method,
    pub s: usize,
    pub err_sq: f64,
    pub opt_err_sq: f64,
    pub ratio: f64,
    pub status: TrialStatus,
    pub seed: u64,
    pub stream_id: u64,
    /// Sampled row indices (not serialized).
    pub sample: Vec<usize>,
}

/// Header of the per-trial report CSV.
pub const REPORT_HEADER: &str = "trial,method,s,err_sq,opt_err_sq,ratio,status,seed,stream_id";

impl TrialReport {
    pub fn csv_row(&self, trial: usize) -> String {
        format!(
            "{trial},{},{},{},{},{},{},{},{}",
            self.method,
            self.s,
            self.err_sq,
            self.opt_err_sq,
            self.ratio,
            self.status,
            self.seed,
            self.stream_id
        )
    }
}

/// Per-matrix quantities shared by every trial on that matrix.
#[derive(Debug, Clone)]
pub struct TrialContext<'a> {
    a: &'a DenseMatrix,
    total_sq: f64,
    opt_err_sq: f64,
}

impl<'a> TrialContext<'a> {
    pub fn new(a: &'a DenseMatrix) -> Result<Self> {
        let total_sq = frobenius_sq(a);
        if total_sq == 0.0 {
            return Err(Error::ZeroMatrix);
        }
        let opt = best_rank1(a)?;
        let opt_err_sq = residual_error_sq(a, &opt)?;
        Ok(Self {
            a,
            total_sq,
            opt_err_sq,
        })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        self.a
    }

    pub fn total_sq(&self) -> f64 {
        self.total_sq
    }

    /// `‖A − π₁(A)‖²_F`.
    pub fn opt_err_sq(&self) -> f64 {
        self.opt_err_sq
    }

    /// Draws a sample of size `s` with `method`. Length-squared samples come
    /// from the one-pass reservoir sampler so that the in-memory and
    /// streaming paths consume identical draws.
    pub fn draw(&self, s: usize, method: Method, rng: &mut RngStream) -> Result<Vec<usize>> {
        match method {
            Method::Lsq => Ok(reservoir_sample(self.a.rows(), s, rng)?.indices),
            Method::Uniform => uniform_sample(self.a.nrows(), s, rng),
            Method::Adaptive => {
                let rounds = if s >= 2 { 2 } else { 1 };
                Ok(adaptive_sample(self.a, rounds, s / rounds, rng)?.indices)
            }
        }
    }

    pub fn run(&self, s: usize, method: Method, rng: &mut RngStream) -> TrialReport {
        let mut report = TrialReport {
            method,
            s,
            err_sq: f64::NAN,
            opt_err_sq: self.opt_err_sq,
            ratio: f64::NAN,
            status: TrialStatus::Ok,
            seed: rng.seed(),
            stream_id: rng.stream_id(),
            sample: Vec::new(),
        };
        if s == 0 {
            report.status = TrialStatus::Failed("empty_sample".into());
            return report;
        }
        let outcome = self.draw(s, method, rng).and_then(|sample| {
            let rows: Vec<&[f64]> = sample.iter().map(|&i| self.a.row(i)).collect();
            let fit = best_rank1_in_span(self.a, &rows)?;
            Ok((sample, fit))
        });
        match outcome {
            Ok((sample, fit)) => {
                report.sample = sample;
                report.err_sq = fit.err_sq;
                if fit.span_rank == 0 {
                    report.status = TrialStatus::Failed("empty_span".into());
                } else {
                    report.ratio = approximation_ratio(fit.err_sq, self.opt_err_sq, self.total_sq);
                }
            }
            Err(err) => report.status = TrialStatus::from_error(&err),
        }
        report
    }
}

/// One trial on `a`. Failures land in the report's status, never as a panic.
pub fn run_trial(a: &DenseMatrix, s: usize, method: Method, rng: &mut RngStream) -> TrialReport {
    match TrialContext::new(a) {
        Ok(ctx) => ctx.run(s, method, rng),
        Err(err) => TrialReport {
            method,
            s,
            err_sq: f64::NAN,
            opt_err_sq: f64::NAN,
            ratio: f64::NAN,
            status: TrialStatus::from_error(&err),
            seed: rng.seed(),
            stream_id: rng.stream_id(),
            sample: Vec::new(),
        },
    }
}

/// `trials` independent trials; trial `t` uses stream `t` of `seed`.
/// Output order is by trial index regardless of scheduling.
pub fn run_trials(
    ctx: &TrialContext<'_>,
    s: usize,
    method: Method,
    trials: usize,
    seed: u64,
) -> Vec<TrialReport> {
    par::map_indexed(trials, |t| ctx.run(s, method, &mut RngStream::new(seed, t as u64)))
}

/// Mean and standard error of the mean. The standard error is zero for a
/// single value and `+∞` if any value is infinite.
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let m = values.len();
    if m == 0 {
        return (f64::NAN, f64::NAN);
    }
    if values.iter().any(|v| v.is_infinite()) {
        return (f64::INFINITY, f64::INFINITY);
    }
    let mean = values.iter().sum::<f64>() / m as f64;
    if m == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1) as f64;
    (mean, (var / m as f64).sqrt())
}

/// Aggregate of one `(method, s)` cell of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub method: Method,
    pub s: usize,
    pub trials: usize,
    pub mean_ratio: f64,
    pub se_ratio: f64,
    pub failed: usize,
}

/// Header of the aggregated sweep CSV.
pub const SWEEP_HEADER: &str = "method,s,trials,mean_ratio,se_ratio,failed";

impl SweepCell {
    /// Aggregates finished trials; failed trials are counted and excluded.
    pub fn from_reports(method: Method, s: usize, reports: &[TrialReport]) -> Self {
        let ratios: Vec<f64> = reports
            .iter()
            .filter(|r| r.status.is_ok())
            .map(|r| r.ratio)
            .collect();
        let (mean_ratio, se_ratio) = mean_se(&ratios);
        Self {
            method,
            s,
            trials: reports.len(),
            mean_ratio,
            se_ratio,
            failed: reports.len() - ratios.len(),
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.method, self.s, self.trials, self.mean_ratio, self.se_ratio, self.failed
        )
    }
}

/// Full sweep output: aggregated cells ordered by `(method, s)` as given,
/// plus the raw trials of each cell in the same order.
#[derive(Debug, Clone)]
pub struct Sweep {
    pub cells: Vec<SweepCell>,
    pub raw: Vec<Vec<TrialReport>>,
}

/// Runs `trials` trials for every `(method, s)` pair.
///
/// Every cell reuses streams `0..trials` of `seed`, so cells are compared on
/// common random numbers and a single-cell sweep reproduces [`run_trials`].
pub fn ratio_sweep(
    a: &DenseMatrix,
    s_values: &[usize],
    methods: &[Method],
    trials: usize,
    seed: u64,
) -> Result<Sweep> {
    if trials == 0 {
        return Err(Error::Parameter("a sweep needs at least one trial".into()));
    }
    let ctx = TrialContext::new(a)?;
    let mut cells = Vec::new();
    let mut raw = Vec::new();
    for &method in methods {
        for &s in s_values {
            let reports = run_trials(&ctx, s, method, trials, seed);
            cells.push(SweepCell::from_reports(method, s, &reports));
            raw.push(reports);
        }
    }
    Ok(Sweep { cells, raw })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adv_small() -> DenseMatrix {
        let mut rows = vec![vec![0.0, 1.0]; 1000];
        rows.push(vec![100.0, 0.0]);
        DenseMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn full_span_recovers_optimum() {
        let a = DenseMatrix::from_rows(&[[3.0, 1.0], [0.5, 4.0], [1.0, 1.0]]).unwrap();
        let fit = best_rank1_in_span(&a, &[[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let opt = residual_error_sq(&a, &best_rank1(&a).unwrap()).unwrap();
        assert!((fit.err_sq - opt).abs() <= 1e-9 * opt);
        assert_eq!(fit.span_rank, 2);
    }

    #[test]
    fn orthogonal_span_keeps_only_light_rows() {
        let a = adv_small();
        let fit = best_rank1_in_span(&a, &[[0.0, 1.0]]).unwrap();
        assert!((fit.err_sq - 10_000.0).abs() < 1e-9);
    }

    #[test]
    fn empty_span_gives_zero_matrix() {
        let a = adv_small();
        let fit = best_rank1_in_span(&a, &[[0.0, 0.0]]).unwrap();
        assert_eq!(fit.span_rank, 0);
        assert!(fit.approx.is_zero());
        assert_eq!(fit.err_sq, frobenius_sq(&a));
    }

    #[test]
    fn dimension_checked() {
        let a = adv_small();
        assert!(matches!(
            best_rank1_in_span(&a, &[[1.0, 0.0, 0.0]]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn ratio_conventions() {
        assert_eq!(approximation_ratio(0.0, 0.0, 10.0), 1.0);
        assert_eq!(approximation_ratio(1e-13, 1e-14, 10.0), 1.0);
        assert_eq!(approximation_ratio(1.0, 0.0, 10.0), f64::INFINITY);
        assert_eq!(approximation_ratio(3.0, 2.0, 10.0), 1.5);
    }

    #[test]
    fn rank_one_trials_have_unit_ratio() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0], [2.0, 4.0], [0.5, 1.0]]).unwrap();
        for method in [Method::Lsq, Method::Uniform, Method::Adaptive] {
            let r = run_trial(&a, 1, method, &mut RngStream::new(3, 0));
            assert!(r.status.is_ok());
            assert_eq!(r.ratio, 1.0, "{method}");
        }
    }

    #[test]
    fn zero_matrix_trial_is_a_failed_record() {
        let z = DenseMatrix::zeros(2, 2).unwrap();
        let r = run_trial(&z, 3, Method::Lsq, &mut RngStream::new(1, 0));
        assert_eq!(r.status, TrialStatus::Failed("zero_matrix".into()));
    }

    #[test]
    fn uniform_hitting_zero_rows_only_is_failed() {
        let a = DenseMatrix::from_rows(&[[0.0, 0.0], [1.0, 0.0]]).unwrap();
        let ctx = TrialContext::new(&a).unwrap();
        let reports = run_trials(&ctx, 1, Method::Uniform, 64, 8);
        let failed = reports.iter().filter(|r| !r.status.is_ok()).count();
        assert!(failed > 0 && failed < 64);
        let cell = SweepCell::from_reports(Method::Uniform, 1, &reports);
        assert_eq!(cell.failed, failed);
        assert_eq!(cell.mean_ratio, 1.0);
    }

    #[test]
    fn method_parse_roundtrip() {
        for m in [Method::Lsq, Method::Uniform, Method::Adaptive] {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("volume".parse::<Method>().is_err());
    }

    #[test]
    fn mean_se_edges() {
        assert_eq!(mean_se(&[2.0]), (2.0, 0.0));
        let (m, se) = mean_se(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((se - 1.0).abs() < 1e-15);
        assert_eq!(mean_se(&[1.0, f64::INFINITY]).0, f64::INFINITY);
        assert!(mean_se(&[]).0.is_nan());
    }

    #[test]
    fn csv_row_layout() {
        let a = adv_small();
        let r = run_trial(&a, 4, Method::Lsq, &mut RngStream::new(2, 7));
        let row = r.csv_row(7);
        assert_eq!(row.split(',').count(), REPORT_HEADER.split(',').count());
        assert!(row.starts_with("7,lsq,4,"));
        assert!(row.ends_with(",ok,2,7"));
    }
}
