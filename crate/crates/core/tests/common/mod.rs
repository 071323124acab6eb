#![allow(dead_code)]

use lsqrank::matrix::DenseMatrix;
use lsqrank::RngStream;

pub fn gaussian(n: usize, d: usize, seed: u64) -> DenseMatrix {
    let mut rng = RngStream::new(seed, 99);
    let data = (0..n * d).map(|_| rng.normal()).collect();
    DenseMatrix::new(n, d, data).unwrap()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Elementwise sum of squares, written independently of the library.
pub fn sum_sq_loop(a: &DenseMatrix) -> f64 {
    let mut total = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            total += a.get(i, j) * a.get(i, j);
        }
    }
    total
}

/// All eigenvalues of a symmetric `k x k` matrix by cyclic Jacobi rotations,
/// sorted descending.
pub fn jacobi_eigenvalues(m: &[f64], k: usize) -> Vec<f64> {
    let mut a = m.to_vec();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..k {
            for q in p + 1..k {
                off += a[p * k + q] * a[p * k + q];
            }
        }
        let scale: f64 = (0..k).map(|i| a[i * k + i] * a[i * k + i]).sum::<f64>().max(1e-300);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..k {
            for q in p + 1..k {
                let apq = a[p * k + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * k + q] - a[p * k + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..k {
                    let arp = a[r * k + p];
                    let arq = a[r * k + q];
                    a[r * k + p] = c * arp - s * arq;
                    a[r * k + q] = s * arp + c * arq;
                }
                for r in 0..k {
                    let apr = a[p * k + r];
                    let aqr = a[q * k + r];
                    a[p * k + r] = c * apr - s * aqr;
                    a[q * k + r] = s * apr + c * aqr;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..k).map(|i| a[i * k + i]).collect();
    ev.sort_by(|x, y| y.partial_cmp(x).unwrap());
    ev
}

/// `AᵀA` as a dense `d x d` buffer.
pub fn gram(a: &DenseMatrix) -> Vec<f64> {
    let d = a.ncols();
    let mut g = vec![0.0; d * d];
    for i in 0..a.nrows() {
        for p in 0..d {
            for q in 0..d {
                g[p * d + q] += a.get(i, p) * a.get(i, q);
            }
        }
    }
    g
}

pub fn top_eigen_of_gram(a: &DenseMatrix) -> f64 {
    jacobi_eigenvalues(&gram(a), a.ncols())[0]
}

/// Dense `d x d` orthogonal projector onto the row span of `rows`.
pub fn span_projector(rows: &[Vec<f64>], d: usize) -> Vec<f64> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for row in rows {
        let mut v = row.clone();
        for _ in 0..2 {
            for b in &basis {
                let c: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let nv: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let n0: f64 = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nv > 1e-10 * n0 && nv > 0.0 {
            basis.push(v.iter().map(|x| x / nv).collect());
        }
    }
    let mut p = vec![0.0; d * d];
    for b in &basis {
        for i in 0..d {
            for j in 0..d {
                p[i * d + j] += b[i] * b[j];
            }
        }
    }
    p
}

/// Best rank-1 error with rows constrained to span(rows): densely forms
/// `A Π`, then `FN(A) − λ_max((AΠ)ᵀ(AΠ))`.
pub fn constrained_error_oracle(a: &DenseMatrix, rows: &[Vec<f64>]) -> f64 {
    let d = a.ncols();
    let p = span_projector(rows, d);
    let mut ap = vec![0.0; a.nrows() * d];
    for i in 0..a.nrows() {
        for j in 0..d {
            ap[i * d + j] = (0..d).map(|k| a.get(i, k) * p[k * d + j]).sum();
        }
    }
    let ap = DenseMatrix::new(a.nrows(), d, ap).unwrap();
    sum_sq_loop(a) - top_eigen_of_gram(&ap)
}

/// Random orthonormal `d x d` matrix from Gram-Schmidt on Gaussian columns.
pub fn random_orthogonal(d: usize, seed: u64) -> DenseMatrix {
    let g = gaussian(d, d, seed);
    let rows: Vec<Vec<f64>> = g.rows().map(|r| r.to_vec()).collect();
    let mut q: Vec<Vec<f64>> = Vec::new();
    for mut v in rows {
        for _ in 0..2 {
            for b in &q {
                let c: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let nv: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        q.push(v.iter().map(|x| x / nv).collect());
    }
    DenseMatrix::from_rows(&q).unwrap()
}
