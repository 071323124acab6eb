//! Mean approximation ratio against sample size, as the CSV the `bench`
//! command writes.

use lsqrank::instances::gen_near_rank1;
use lsqrank::spanfit::{ratio_sweep, Method, SWEEP_HEADER};

fn main() -> lsqrank::Result<()> {
    let a = gen_near_rank1(200, 50, 100.0, 0.05, 1)?;
    let sweep = ratio_sweep(&a, &[1, 2, 4, 8, 16, 32], &[Method::Lsq, Method::Uniform, Method::Adaptive], 300, 0)?;
    println!("{SWEEP_HEADER}");
    for cell in &sweep.cells {
        println!("{}", cell.csv_row());
    }
    Ok(())
}
