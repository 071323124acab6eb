//! Two-pass streaming rank-1 approximation.
//!
//! Pass 1 length-squared samples `s` rows with independent weighted
//! reservoirs and accumulates `‖A‖²_F`. The sampled rows are then
//! orthonormalized in place into `Q` (`s' x d`). Pass 2 accumulates the
//! `s' x s'` matrix `Σ (Q aᵢ)(Q aᵢ)ᵀ`; its top eigenpair `(λ, w)` gives the
//! right factor `q = Qᵀw` and the error `‖A‖²_F − λ`. The left factor
//! `A q` needs a third pass because `q` is unknown until pass 2 ends.
//!
//! Working storage is metered in stored scalars. Row indices and counters
//! are bookkeeping and are not counted, and neither is the length-`n` left
//! factor when it is requested (it is output, written as it is produced).

use crate::error::{Error, Result};
use crate::matrix::{dot, orthonormalize_owned, DenseMatrix};
use crate::rng::RngStream;
use crate::sampling::{Reservoir, SPAN_TOL};
use crate::spanfit::ProjectedGram;

/// A row stream that can be replayed from the start.
pub trait RowSource {
    fn ncols(&self) -> usize;

    /// Visits every row in order and returns the number of rows visited.
    fn scan(&mut self, visit: &mut dyn FnMut(usize, &[f64]) -> Result<()>) -> Result<usize>;
}

impl RowSource for DenseMatrix {
    fn ncols(&self) -> usize {
        DenseMatrix::ncols(self)
    }

    fn scan(&mut self, visit: &mut dyn FnMut(usize, &[f64]) -> Result<()>) -> Result<usize> {
        for (i, row) in self.rows().enumerate() {
            visit(i, row)?;
        }
        Ok(self.nrows())
    }
}

/// Rows produced on demand by a closure `fill(i, row)`, for streams too large
/// to hold.
pub struct GeneratedRows<F> {
    n: usize,
    d: usize,
    fill: F,
}

impl<F: FnMut(usize, &mut [f64])> GeneratedRows<F> {
    pub fn new(n: usize, d: usize, fill: F) -> Self {
        Self { n, d, fill }
    }
}

impl<F: FnMut(usize, &mut [f64])> RowSource for GeneratedRows<F> {
    fn ncols(&self) -> usize {
        self.d
    }

    fn scan(&mut self, visit: &mut dyn FnMut(usize, &[f64]) -> Result<()>) -> Result<usize> {
        let mut row = vec![0.0; self.d];
        for i in 0..self.n {
            (self.fill)(i, &mut row);
            visit(i, &row)?;
        }
        Ok(self.n)
    }
}

/// Additive constant `c` in the storage budget `s·d + s² + c·(s + d)`.
pub const SPACE_CONSTANT: usize = 8;

/// Storage budget for sample size `s` and dimension `d`, in scalars.
pub fn space_budget(s: usize, d: usize) -> usize {
    s * d + s * s + SPACE_CONSTANT * (s + d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceStats {
    pub passes: usize,
    pub peak_scalars: usize,
    pub n: usize,
    pub d: usize,
    pub s: usize,
}

#[derive(Debug, Default)]
struct ScalarMeter {
    current: usize,
    peak: usize,
}

impl ScalarMeter {
    fn hold(&mut self, k: usize) {
        self.current += k;
        self.peak = self.peak.max(self.current);
    }

    fn release(&mut self, k: usize) {
        self.current -= k;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamFit {
    /// Unit right factor `q`, lying in the span of the sample.
    pub right: Vec<f64>,
    /// `A q`, present only after the optional third pass.
    pub left: Option<Vec<f64>>,
    /// `‖A‖²_F − λ`, clamped at zero.
    pub err_sq: f64,
    pub total_sq: f64,
    pub sample: Vec<usize>,
    pub span_rank: usize,
    pub stats: SpaceStats,
}

/// Runs the two-pass algorithm (three passes with `materialize_left`).
pub fn two_pass_approx<S: RowSource + ?Sized>(
    source: &mut S,
    s: usize,
    rng: &mut RngStream,
    materialize_left: bool,
) -> Result<StreamFit> {
    if s == 0 {
        return Err(Error::Parameter("sample size must be at least 1".into()));
    }
    let d = source.ncols();
    let mut meter = ScalarMeter::default();

    // Pass 1: reservoirs plus the running ‖A‖², and one row buffer.
    let mut reservoir = Reservoir::new(s, d);
    meter.hold(reservoir.stored_scalars());
    meter.hold(d);
    let n = source.scan(&mut |_, row| reservoir.offer(row, rng))?;
    let sample = reservoir.finish()?;
    let total_sq = sample.total_sq;

    let basis = orthonormalize_owned(sample.rows, SPAN_TOL);
    let k = basis.rank;
    meter.release((s - k) * d);

    // Pass 2.
    let mut gram = ProjectedGram::new(k);
    meter.hold(gram.stored_scalars());
    let n2 = source.scan(&mut |_, row| {
        gram.add_row(&basis, row);
        Ok(())
    })?;
    if n2 != n {
        return Err(Error::Parameter(format!(
            "source yielded {n} rows on the first pass and {n2} on the second"
        )));
    }
    // Eigen-solve workspace: iterate, its image, and the lifted result.
    meter.hold(2 * k + d);
    let (lambda, right) = gram.solve(&basis, d)?;
    meter.release(2 * k);
    meter.release(gram.stored_scalars());
    drop(gram);
    meter.release(k * d);
    drop(basis);

    let mut passes = 2;
    let left = if materialize_left {
        passes = 3;
        let mut left = Vec::with_capacity(n);
        source.scan(&mut |_, row| {
            left.push(dot(row, &right));
            Ok(())
        })?;
        Some(left)
    } else {
        None
    };

    Ok(StreamFit {
        err_sq: (total_sq - lambda).max(0.0),
        right,
        left,
        total_sq,
        sample: sample.indices,
        span_rank: k,
        stats: SpaceStats {
            passes,
            peak_scalars: meter.peak,
            n,
            d,
            s,
        },
    })
}
