//! Two passes over a binary file on disk, never holding the matrix.

use lsqrank::instances::gen_near_rank1;
use lsqrank::io::{save_bin, BinFile};
use lsqrank::stream::{space_budget, two_pass_approx};
use lsqrank::RngStream;

fn main() -> lsqrank::Result<()> {
    let dir = std::env::temp_dir().join("lsqrank-streaming-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("near_rank1.bin");
    save_bin(&path, &gen_near_rank1(20_000, 64, 300.0, 0.1, 5)?)?;

    let mut file = BinFile::open(&path)?;
    println!("streaming {} x {} from {}", file.nrows(), file.ncols(), path.display());
    let s = 32;
    let fit = two_pass_approx(&mut file, s, &mut RngStream::new(11, 0), false)?;
    println!("err_sq = {:.4} of |A|^2 = {:.1}", fit.err_sq, fit.total_sq);
    println!(
        "passes = {}, peak stored scalars = {} (budget {}), span rank = {}",
        fit.stats.passes,
        fit.stats.peak_scalars,
        space_budget(s, file.ncols()),
        fit.span_rank
    );
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
