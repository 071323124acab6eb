//! A rank-2 matrix whose rare direction a length-squared sample almost
//! always misses, and how adaptive sampling recovers it.

use lsqrank::instances::gen_rank2_counter;
use lsqrank::matrix::orthonormal_basis;
use lsqrank::sampling::{adaptive_sample, build_dist, sample_iid, SPAN_TOL};
use lsqrank::RngStream;

fn span_error(a: &lsqrank::DenseMatrix, sample: &[usize]) -> f64 {
    let rows: Vec<&[f64]> = sample.iter().map(|&i| a.row(i)).collect();
    let basis = orthonormal_basis(&rows, SPAN_TOL);
    a.rows()
        .map(|row| {
            let p = basis.project(row);
            row.iter().zip(&p).map(|(x, y)| (x - y) * (x - y)).sum::<f64>()
        })
        .sum()
}

fn main() -> lsqrank::Result<()> {
    let a = gen_rank2_counter(100, 10.0, 1.0)?;
    let dist = build_dist(&a)?;
    let miss = (1.0 - dist.p()[99]).powi(32);
    println!("P(32 samples miss the rare row) = {miss:.5}");

    let lsq = sample_iid(&dist, 32, &mut RngStream::new(4, 0));
    println!("length-squared sample: rank-2 span error {}", span_error(&a, &lsq));

    let adaptive = adaptive_sample(&a, 2, 16, &mut RngStream::new(4, 0))?;
    println!("adaptive sample:       rank-2 span error {}", span_error(&a, &adaptive.indices));
    Ok(())
}
