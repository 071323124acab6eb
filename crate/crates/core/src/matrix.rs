//! Dense row-major matrices, factored rank-1 matrices, and the handful of
//! spectral routines the rest of the crate needs.
//!
//! All error quantities are squared Frobenius norms.

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Relative change in successive Rayleigh quotients at which power iteration stops.
pub const POWER_TOL: f64 = 1e-12;
/// Iteration cap for power iteration.
pub const POWER_MAX_ITER: usize = 10_000;
/// Seed of the fixed start vector used by [`best_rank1`] and [`sym_top_eigen`].
pub const START_SEED: u64 = 0x5eed_1e57;

/// An `n x d` matrix of finite `f64` entries stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    d: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(n: usize, d: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidMatrix(format!(
                "shape {n}x{d} has an empty dimension"
            )));
        }
        if data.len() != n * d {
            return Err(Error::DimensionMismatch {
                expected: n * d,
                found: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidMatrix(format!(
                "non-finite entry at row {}, column {}",
                pos / d,
                pos % d
            )));
        }
        Ok(Self { n, d, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(n * d);
        for row in rows {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(n, d, data)
    }

    pub fn zeros(n: usize, d: usize) -> Result<Self> {
        Self::new(n, d, vec![0.0; n * d])
    }

    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn ncols(&self) -> usize {
        self.d
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.d + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.d)
    }

    pub fn row_norms_sq(&self) -> Vec<f64> {
        self.rows().map(norm_sq).collect()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.n, self.d, self.data.iter().map(|x| c * x).collect())
    }

    /// `A x` for a d-vector `x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.d);
        self.rows().map(|row| dot(row, x)).collect()
    }

    /// `Aᵀ y` for an n-vector `y`.
    pub fn t_mul_vec(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.n);
        let mut out = vec![0.0; self.d];
        for (row, &yi) in self.rows().zip(y) {
            axpy(yi, row, &mut out);
        }
        out
    }

    /// Dense product `A B`.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if other.n != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: other.n,
            });
        }
        let mut data = vec![0.0; self.n * other.d];
        for (out, row) in data.chunks_exact_mut(other.d).zip(self.rows()) {
            for (k, &a) in row.iter().enumerate() {
                if a != 0.0 {
                    axpy(a, other.row(k), out);
                }
            }
        }
        DenseMatrix::new(self.n, other.d, data)
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut data = vec![0.0; self.n * self.d];
        for i in 0..self.n {
            for j in 0..self.d {
                data[j * self.n + i] = self.data[i * self.d + j];
            }
        }
        DenseMatrix {
            n: self.d,
            d: self.n,
            data,
        }
    }

    pub fn frobenius_sq(&self) -> f64 {
        frobenius_sq(self)
    }
}

/// A rank-1 matrix `a bᵀ` kept in factored form. `b` has unit norm and the
/// scale lives in `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rank1 {
    left: Vec<f64>,
    right: Vec<f64>,
}

impl Rank1 {
    pub fn new(left: Vec<f64>, right: Vec<f64>) -> Result<Self> {
        let norm = norm_sq(&right).sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Parameter(format!(
                "right factor must be a unit vector, has norm {norm}"
            )));
        }
        if left.iter().chain(&right).any(|x| !x.is_finite()) {
            return Err(Error::Parameter("non-finite factor entry".into()));
        }
        Ok(Self { left, right })
    }

    /// The zero matrix, with the `e₁` convention for the right factor.
    pub fn zero(n: usize, d: usize) -> Self {
        let mut right = vec![0.0; d];
        right[0] = 1.0;
        Self {
            left: vec![0.0; n],
            right,
        }
    }

    pub fn left(&self) -> &[f64] {
        &self.left
    }

    pub fn right(&self) -> &[f64] {
        &self.right
    }

    pub fn nrows(&self) -> usize {
        self.left.len()
    }

    pub fn ncols(&self) -> usize {
        self.right.len()
    }

    pub fn is_zero(&self) -> bool {
        self.left.iter().all(|&x| x == 0.0)
    }

    /// Squared Frobenius norm, `‖a‖²` since `‖b‖ = 1`.
    pub fn frobenius_sq(&self) -> f64 {
        norm_sq(&self.left)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut data = Vec::with_capacity(self.left.len() * self.right.len());
        for &a in &self.left {
            data.extend(self.right.iter().map(|b| a * b));
        }
        DenseMatrix::new(self.left.len(), self.right.len(), data)
            .expect("finite factors give a finite product")
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn scale_in_place(x: &mut [f64], c: f64) {
    x.iter_mut().for_each(|v| *v *= c);
}

/// Flip `v` so that its first largest-magnitude entry is positive. Returns
/// `true` if a flip happened.
pub fn canonicalize_sign(v: &mut [f64]) -> bool {
    let mut best = 0;
    for (j, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = j;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        scale_in_place(v, -1.0);
        true
    } else {
        false
    }
}

/// Squared Frobenius norm `Σ Aᵢⱼ²`.
pub fn frobenius_sq(a: &DenseMatrix) -> f64 {
    norm_sq(a.as_slice())
}

/// Orthonormal basis of the span of `rows`, in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    pub vectors: Vec<Vec<f64>>,
    pub rank: usize,
}

impl Basis {
    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }

    /// Coordinates `Q x` of `x` in this basis.
    pub fn coords(&self, x: &[f64]) -> Vec<f64> {
        self.vectors.iter().map(|q| dot(q, x)).collect()
    }

    /// Lift coordinates `w` back to the ambient space, `Qᵀ w`.
    pub fn lift(&self, w: &[f64], d: usize) -> Vec<f64> {
        let mut out = vec![0.0; d];
        for (q, &wk) in self.vectors.iter().zip(w) {
            axpy(wk, q, &mut out);
        }
        out
    }

    /// Orthogonal projection of `x` onto the span.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        self.lift(&self.coords(x), x.len())
    }
}

/// Gram–Schmidt with one reorthogonalization sweep. A row is dropped when
/// the norm left after projecting out the earlier basis vectors is at most
/// `tol` times its original norm; zero rows are always dropped.
pub fn orthonormal_basis<R: AsRef<[f64]>>(rows: &[R], tol: f64) -> Basis {
    let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.as_ref().to_vec()).collect();
    orthonormalize_owned(rows, tol)
}

/// Same as [`orthonormal_basis`] but reuses the buffers of `rows`, so the
/// peak storage is that of the input.
pub fn orthonormalize_owned(mut rows: Vec<Vec<f64>>, tol: f64) -> Basis {
    let mut kept = 0;
    for i in 0..rows.len() {
        let (done, rest) = rows.split_at_mut(i);
        let row = &mut rest[0];
        let original = norm(row);
        if original == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for q in &done[..kept] {
                let c = dot(q, row);
                axpy(-c, q, row);
            }
        }
        let residual = norm(row);
        if residual <= tol * original {
            continue;
        }
        scale_in_place(row, 1.0 / residual);
        rows.swap(kept, i);
        kept += 1;
    }
    rows.truncate(kept);
    Basis {
        rank: kept,
        vectors: rows,
    }
}

/// Top singular triplet `(σ, u, v)` with `Av = σu`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularTriplet {
    pub sigma: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub iterations: usize,
}

fn random_unit(dim: usize, rng: &mut RngStream) -> Vec<f64> {
    loop {
        let mut x: Vec<f64> = (0..dim).map(|_| rng.normal()).collect();
        let nx = norm(&x);
        if nx > 0.0 {
            scale_in_place(&mut x, 1.0 / nx);
            return x;
        }
    }
}

fn unit_basis(dim: usize, k: usize) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    e[k] = 1.0;
    e
}

/// Power iteration on `AᵀA` from a random start drawn from `rng`.
///
/// Stops once successive Rayleigh quotients agree to `tol` (relative). If the
/// cap is hit first the result is still accepted when the eigen-residual
/// `‖AᵀAv − σ²v‖` is within `√tol·σ²`; for tied top singular values any
/// maximizer is returned. A zero matrix yields `σ = 0` with `u = e₁`, `v = e₁`.
pub fn top_singular(
    a: &DenseMatrix,
    tol: f64,
    max_iter: usize,
    rng: &mut RngStream,
) -> Result<SingularTriplet> {
    if frobenius_sq(a) == 0.0 {
        return Ok(SingularTriplet {
            sigma: 0.0,
            u: unit_basis(a.nrows(), 0),
            v: unit_basis(a.ncols(), 0),
            iterations: 0,
        });
    }

    let mut v = random_unit(a.ncols(), rng);
    let mut av = a.mul_vec(&v);
    let mut lambda = norm_sq(&av);
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        iterations += 1;
        let mut next = a.t_mul_vec(&av);
        let nn = norm(&next);
        if nn == 0.0 {
            // Start vector fell in the null space; restart elsewhere.
            v = random_unit(a.ncols(), rng);
            av = a.mul_vec(&v);
            lambda = norm_sq(&av);
            continue;
        }
        scale_in_place(&mut next, 1.0 / nn);
        v = next;
        av = a.mul_vec(&v);
        let next_lambda = norm_sq(&av);
        let delta = (next_lambda - lambda).abs();
        lambda = next_lambda;
        if delta <= tol * lambda {
            converged = true;
            break;
        }
    }

    if !converged {
        let mut resid = a.t_mul_vec(&av);
        axpy(-lambda, &v, &mut resid);
        let residual = norm(&resid);
        if residual > tol.sqrt() * lambda {
            return Err(Error::ConvergenceFailure {
                iterations,
                residual,
            });
        }
    }

    if canonicalize_sign(&mut v) {
        scale_in_place(&mut av, -1.0);
    }
    let sigma = lambda.sqrt();
    let mut u = av;
    if sigma > 0.0 {
        scale_in_place(&mut u, 1.0 / sigma);
    } else {
        u = unit_basis(a.nrows(), 0);
    }
    Ok(SingularTriplet {
        sigma,
        u,
        v,
        iterations,
    })
}

/// [`top_singular`] with the default tolerances and the fixed start seed.
pub fn top_singular_default(a: &DenseMatrix) -> Result<SingularTriplet> {
    top_singular(
        a,
        POWER_TOL,
        POWER_MAX_ITER,
        &mut RngStream::new(START_SEED, 0),
    )
}

/// Best rank-1 approximation `σ u vᵀ` under the Frobenius norm.
pub fn best_rank1(a: &DenseMatrix) -> Result<Rank1> {
    let SingularTriplet { sigma, u, v, .. } = top_singular_default(a)?;
    let left = u.into_iter().map(|x| sigma * x).collect();
    Ok(Rank1 { left, right: v })
}

/// `‖A − X‖²_F`, computed row by row without materializing `X`.
pub fn residual_error_sq(a: &DenseMatrix, x: &Rank1) -> Result<f64> {
    if x.nrows() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: x.nrows(),
        });
    }
    if x.ncols() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.ncols(),
            found: x.ncols(),
        });
    }
    let total = a
        .rows()
        .zip(&x.left)
        .map(|(row, &ai)| {
            row.iter()
                .zip(&x.right)
                .map(|(r, b)| {
                    let e = r - ai * b;
                    e * e
                })
                .sum::<f64>()
        })
        .sum();
    Ok(total)
}

/// Top eigenpair of a symmetric positive semidefinite `k x k` matrix stored
/// row-major, by power iteration from a fixed pseudo-random start. The
/// returned eigenvector has canonical sign; the eigenvalue is its Rayleigh
/// quotient.
pub fn sym_top_eigen(m: &[f64], k: usize, tol: f64, max_iter: usize) -> Result<(f64, Vec<f64>)> {
    if m.len() != k * k {
        return Err(Error::DimensionMismatch {
            expected: k * k,
            found: m.len(),
        });
    }
    if k == 0 {
        return Ok((0.0, Vec::new()));
    }
    let apply = |x: &[f64]| -> Vec<f64> { m.chunks_exact(k).map(|row| dot(row, x)).collect() };
    if m.iter().all(|&x| x == 0.0) {
        return Ok((0.0, unit_basis(k, 0)));
    }

    let mut rng = RngStream::new(START_SEED, 1);
    let mut w = random_unit(k, &mut rng);
    let mut mw = apply(&w);
    let mut lambda = dot(&w, &mw);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        let nn = norm(&mw);
        if nn == 0.0 {
            w = random_unit(k, &mut rng);
            mw = apply(&w);
            lambda = dot(&w, &mw);
            continue;
        }
        w = mw.iter().map(|x| x / nn).collect();
        mw = apply(&w);
        let next = dot(&w, &mw);
        let delta = (next - lambda).abs();
        lambda = next;
        if delta <= tol * lambda.abs() {
            converged = true;
            break;
        }
    }
    if !converged {
        let mut resid = mw.clone();
        axpy(-lambda, &w, &mut resid);
        let residual = norm(&resid);
        if residual > tol.sqrt() * lambda.abs() {
            return Err(Error::ConvergenceFailure {
                iterations,
                residual,
            });
        }
    }
    canonicalize_sign(&mut w);
    Ok((lambda, w))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag34() -> DenseMatrix {
        DenseMatrix::from_rows(&[[3.0, 0.0], [0.0, 4.0]]).unwrap()
    }

    #[test]
    fn rejects_non_finite_and_ragged() {
        assert!(DenseMatrix::new(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(DenseMatrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![1.0]]).is_err());
        assert!(DenseMatrix::new(0, 2, vec![]).is_err());
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(frobenius_sq(&diag34()), 25.0);
        assert_eq!(frobenius_sq(&DenseMatrix::zeros(3, 4).unwrap()), 0.0);
    }

    #[test]
    fn basis_of_orthogonal_rows() {
        let b = orthonormal_basis(&[[2.0, 0.0], [0.0, 3.0]], 1e-10);
        assert_eq!(b.rank, 2);
        assert_eq!(b.vectors, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn basis_drops_duplicate_direction_and_zero_rows() {
        let b = orthonormal_basis(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]], 1e-10);
        assert_eq!(b.rank, 1);
        let empty = orthonormal_basis::<[f64; 2]>(&[], 1e-10);
        assert_eq!(empty.rank, 0);
        assert_eq!(empty.dim(), 0);
    }

    #[test]
    fn top_singular_of_diagonal() {
        let t = top_singular_default(&diag34()).unwrap();
        assert!((t.sigma - 4.0).abs() < 1e-12);
        assert!((t.v[1] - 1.0).abs() < 1e-10 && t.v[0].abs() < 1e-5);
        assert!((t.u[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn zero_matrix_convention() {
        let z = DenseMatrix::zeros(3, 2).unwrap();
        let t = top_singular_default(&z).unwrap();
        assert_eq!(t.sigma, 0.0);
        assert_eq!(t.v, vec![1.0, 0.0]);
    }

    #[test]
    fn tied_spectrum_accepts_any_maximizer() {
        let a = DenseMatrix::from_rows(&[[4.0, 0.0], [0.0, 4.0]]).unwrap();
        let t = top_singular_default(&a).unwrap();
        assert!((t.sigma - 4.0).abs() < 1e-12);
        assert!((norm_sq(&a.mul_vec(&t.v)) - 16.0).abs() < 1e-9);
        assert!((norm(&t.v) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn convergence_failure_is_reported() {
        // Nearly tied singular values with a one-iteration cap and a tolerance
        // that cannot be met in one step.
        let a = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0 + 1e-3]]).unwrap();
        let err = top_singular(&a, 1e-300, 1, &mut RngStream::new(1, 0)).unwrap_err();
        assert!(matches!(err, Error::ConvergenceFailure { .. }));
    }

    #[test]
    fn best_rank1_of_diagonal() {
        let a = diag34();
        let x = best_rank1(&a).unwrap();
        assert!((residual_error_sq(&a, &x).unwrap() - 9.0).abs() < 1e-9);
    }

    #[test]
    fn residual_of_zero_rank1_is_frobenius() {
        let a = diag34();
        assert_eq!(residual_error_sq(&a, &Rank1::zero(2, 2)).unwrap(), 25.0);
        assert!(matches!(
            residual_error_sq(&a, &Rank1::zero(3, 2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rank1_requires_unit_right_factor() {
        assert!(Rank1::new(vec![1.0], vec![2.0, 0.0]).is_err());
        let x = Rank1::new(vec![2.0, 3.0], vec![0.6, 0.8]).unwrap();
        assert_eq!(x.to_dense().row(1), &[3.0 * 0.6, 3.0 * 0.8]);
        assert!((x.frobenius_sq() - 13.0).abs() < 1e-12);
    }

    #[test]
    fn sym_top_eigen_small() {
        let m = [2.0, 1.0, 1.0, 2.0];
        let (lambda, w) = sym_top_eigen(&m, 2, POWER_TOL, POWER_MAX_ITER).unwrap();
        assert!((lambda - 3.0).abs() < 1e-10);
        assert!((w[0] - w[1]).abs() < 1e-5);
        let (zero, e) = sym_top_eigen(&[0.0; 4], 2, POWER_TOL, POWER_MAX_ITER).unwrap();
        assert_eq!(zero, 0.0);
        assert_eq!(e, vec![1.0, 0.0]);
    }

    #[test]
    fn canonical_sign_picks_largest_entry() {
        let mut v = vec![0.3, -0.9, 0.3];
        assert!(canonicalize_sign(&mut v));
        assert_eq!(v, vec![-0.3, 0.9, -0.3]);
    }

    #[test]
    fn matmul_and_transpose() {
        let a = DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap();
        let at = a.transpose();
        assert_eq!(at.row(0), &[1.0, 3.0, 5.0]);
        let g = at.matmul(&a).unwrap();
        assert_eq!(g.as_slice(), &[35.0, 44.0, 44.0, 56.0]);
    }
}
