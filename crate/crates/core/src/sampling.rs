//! Length-squared row sampling.
//!
//! Row `i` of `A` is drawn with probability `pᵢ = ‖Aᵢ‖² / ‖A‖²_F`. All
//! samplers here draw with replacement; zero rows get probability zero and
//! are never returned.

use crate::error::{Error, Result};
use crate::matrix::{norm_sq, orthonormal_basis, DenseMatrix};
use crate::rng::RngStream;

/// Tolerance used when orthonormalizing previously sampled rows in
/// [`adaptive_sample`]; also the relative residual norm below which a row
/// counts as lying in the span.
pub const SPAN_TOL: f64 = 1e-10;

/// Length-squared distribution over the rows of a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LsqDist {
    p: Vec<f64>,
    cum: Vec<f64>,
    total_sq: f64,
}

impl LsqDist {
    /// Builds the distribution from row weights (squared norms).
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyStream);
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Parameter(
                "row weights must be finite and non-negative".into(),
            ));
        }
        let total_sq: f64 = weights.iter().sum();
        if total_sq == 0.0 {
            return Err(Error::ZeroMatrix);
        }
        let p: Vec<f64> = weights.iter().map(|w| w / total_sq).collect();
        let mut cum = Vec::with_capacity(p.len());
        let mut running = 0.0;
        for w in weights {
            running += w;
            cum.push(running / total_sq);
        }
        // Pin the tail to exactly 1 from the last reachable row onward.
        if let Some(last) = weights.iter().rposition(|&w| w > 0.0) {
            cum[last..].iter_mut().for_each(|c| *c = 1.0);
        }
        Ok(Self { p, cum, total_sq })
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn cum(&self) -> &[f64] {
        &self.cum
    }

    /// `‖A‖²_F` of the matrix the distribution was built from.
    pub fn total_sq(&self) -> f64 {
        self.total_sq
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// Inverse CDF: the smallest index whose cumulative mass exceeds `u`.
    /// Zero-probability rows share their predecessor's cumulative value and
    /// so are never selected.
    pub fn index_for(&self, u: f64) -> usize {
        let i = self.cum.partition_point(|&c| c <= u);
        i.min(self.cum.len() - 1)
    }
}

/// Length-squared distribution of the rows of `a`.
pub fn build_dist(a: &DenseMatrix) -> Result<LsqDist> {
    LsqDist::from_weights(&a.row_norms_sq())
}

/// `s` i.i.d. draws from `dist`, with replacement.
pub fn sample_iid(dist: &LsqDist, s: usize, rng: &mut RngStream) -> Vec<usize> {
    (0..s).map(|_| dist.index_for(rng.uniform())).collect()
}

/// `s` independent single-item weighted reservoirs fed from one pass.
///
/// Each reservoir keeps its current row and replaces it with row `i` with
/// probability `‖Aᵢ‖² / Σ_{j≤i} ‖Aⱼ‖²`, so its final content is row `i`
/// with probability `pᵢ` by telescoping. The reservoirs share the running
/// total but draw independently.
#[derive(Debug, Clone)]
pub struct Reservoir {
    dim: usize,
    indices: Vec<Option<usize>>,
    rows: Vec<Vec<f64>>,
    total_sq: f64,
    seen: usize,
}

impl Reservoir {
    pub fn new(s: usize, dim: usize) -> Self {
        Self {
            dim,
            indices: vec![None; s],
            rows: vec![vec![0.0; dim]; s],
            total_sq: 0.0,
            seen: 0,
        }
    }

    /// Number of scalars held: `s` candidate rows plus the running total.
    pub fn stored_scalars(&self) -> usize {
        self.rows.len() * self.dim + 1
    }

    /// Offers the next row of the stream.
    pub fn offer(&mut self, row: &[f64], rng: &mut RngStream) -> Result<()> {
        if row.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: row.len(),
            });
        }
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMatrix(format!(
                "non-finite entry in row {}",
                self.seen
            )));
        }
        let index = self.seen;
        self.seen += 1;
        let weight = norm_sq(row);
        if weight == 0.0 {
            return Ok(());
        }
        self.total_sq += weight;
        let keep_prob = weight / self.total_sq;
        for (slot, stored) in self.indices.iter_mut().zip(self.rows.iter_mut()) {
            if rng.uniform() < keep_prob {
                *slot = Some(index);
                stored.copy_from_slice(row);
            }
        }
        Ok(())
    }

    pub fn rows_seen(&self) -> usize {
        self.seen
    }

    pub fn finish(self) -> Result<ReservoirSample> {
        if self.seen == 0 {
            return Err(Error::EmptyStream);
        }
        if self.total_sq == 0.0 {
            return Err(Error::AllZeroRows);
        }
        let indices = self
            .indices
            .into_iter()
            .map(|i| i.expect("a positive-weight row fills every reservoir"))
            .collect();
        Ok(ReservoirSample {
            indices,
            rows: self.rows,
            total_sq: self.total_sq,
            rows_seen: self.seen,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReservoirSample {
    pub indices: Vec<usize>,
    pub rows: Vec<Vec<f64>>,
    /// `‖A‖²_F` accumulated during the pass.
    pub total_sq: f64,
    pub rows_seen: usize,
}

/// One-pass length-squared sampling of `s` rows (with replacement) from a
/// row iterator.
pub fn reservoir_sample<I, R>(stream: I, s: usize, rng: &mut RngStream) -> Result<ReservoirSample>
where
    I: IntoIterator<Item = R>,
    R: AsRef<[f64]>,
{
    if s == 0 {
        return Err(Error::Parameter("reservoir sample size must be at least 1".into()));
    }
    let mut stream = stream.into_iter().peekable();
    let dim = match stream.peek() {
        Some(row) => row.as_ref().len(),
        None => return Err(Error::EmptyStream),
    };
    let mut reservoir = Reservoir::new(s, dim);
    for row in stream {
        reservoir.offer(row.as_ref(), rng)?;
    }
    reservoir.finish()
}

/// `s` uniform row indices in `0..n`, with replacement.
pub fn uniform_sample(n: usize, s: usize, rng: &mut RngStream) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::Parameter("uniform sampling needs n >= 1".into()));
    }
    Ok((0..s).map(|_| rng.index(n)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveSample {
    pub indices: Vec<usize>,
    pub rounds_completed: usize,
    /// Set when a round found the residual matrix to be zero, i.e. the span
    /// of the rows sampled so far already contains every row.
    pub degenerate_residual: bool,
}

/// Adaptive length-squared sampling: round one samples from `A`, each later
/// round samples from the residual of `A` after projecting its rows onto the
/// span of everything sampled so far.
pub fn adaptive_sample(
    a: &DenseMatrix,
    rounds: usize,
    s_per_round: usize,
    rng: &mut RngStream,
) -> Result<AdaptiveSample> {
    if rounds == 0 {
        return Err(Error::Parameter("adaptive sampling needs at least one round".into()));
    }
    let mut indices = build_dist(a).map(|dist| sample_iid(&dist, s_per_round, rng))?;
    for round in 1..rounds {
        let dist = match residual_dist(a, &indices) {
            Some(dist) => dist,
            None => {
                return Ok(AdaptiveSample {
                    indices,
                    rounds_completed: round,
                    degenerate_residual: true,
                })
            }
        };
        indices.extend(sample_iid(&dist, s_per_round, rng));
    }
    Ok(AdaptiveSample {
        indices,
        rounds_completed: rounds,
        degenerate_residual: false,
    })
}

/// Length-squared distribution of `A − π_S(A)` where `S` is the set of rows
/// at `sampled`; `None` if the residual vanishes.
pub fn residual_dist(a: &DenseMatrix, sampled: &[usize]) -> Option<LsqDist> {
    let basis = orthonormal_basis(
        &sampled.iter().map(|&i| a.row(i)).collect::<Vec<_>>(),
        SPAN_TOL,
    );
    let weights: Vec<f64> = a
        .rows()
        .map(|row| {
            let original = norm_sq(row);
            let projected = basis.project(row);
            let residual: f64 = row
                .iter()
                .zip(&projected)
                .map(|(x, p)| (x - p) * (x - p))
                .sum();
            if residual <= SPAN_TOL * SPAN_TOL * original {
                0.0
            } else {
                residual
            }
        })
        .collect();
    if weights.iter().all(|&w| w == 0.0) {
        return None;
    }
    LsqDist::from_weights(&weights).ok()
}
