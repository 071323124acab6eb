//! Rank-1 approximation from length-squared row samples.
//!
//! Rows of `A` are drawn with probability proportional to their squared
//! length; the best rank-1 matrix whose rows lie in the span of the sample is
//! compared against the best rank-1 approximation overall. All errors in this
//! crate are squared Frobenius norms, `‖A − X‖²_F`.
//!
//! - [`matrix`]: dense row-major matrices, rank-1 factors, power iteration.
//! - [`sampling`]: the length-squared distribution, i.i.d. and reservoir
//!   sampling, uniform and adaptive baselines.
//! - [`spanfit`]: the best rank-1 fit inside a sampled span, trials and sweeps.
//! - [`stream`]: the two-pass streaming variant with space accounting.
//! - [`oracle`]: closed-form checks of the sampling analysis on a concrete matrix.
//! - [`instances`]: test-matrix generators.
//! - [`io`]: CSV and `LSQ1` binary matrix files.
//! - [`cli`]: the `lsqrank` command line.

pub mod cli;
pub mod error;
pub mod instances;
pub mod io;
pub mod matrix;
pub mod oracle;
pub mod par;
pub mod rng;
pub mod sampling;
pub mod spanfit;
pub mod stream;

pub use error::{Error, Result};
pub use matrix::{best_rank1, residual_error_sq, top_singular, DenseMatrix, Rank1, SingularTriplet};
pub use rng::RngStream;
pub use sampling::{build_dist, reservoir_sample, sample_iid, LsqDist};
pub use spanfit::{best_rank1_in_span, Method, SpanFit, TrialReport};
pub use stream::{two_pass_approx, RowSource, StreamFit};
