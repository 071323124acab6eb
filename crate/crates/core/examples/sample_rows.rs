//! Length-squared sampling three ways: i.i.d. from the distribution, one
//! pass of weighted reservoirs, and the uniform baseline.

use lsqrank::instances::gen_adversarial_uniform;
use lsqrank::sampling::{build_dist, reservoir_sample, sample_iid, uniform_sample};
use lsqrank::RngStream;

fn main() -> lsqrank::Result<()> {
    let a = gen_adversarial_uniform(1001, 100.0, 1.0)?;
    let dist = build_dist(&a)?;
    println!("p(heavy row) = {:.6}, p(light row) = {:.3e}", dist.p()[1000], dist.p()[0]);

    let draws = 100_000;
    let mut rng = RngStream::new(1, 0);
    let iid = sample_iid(&dist, draws, &mut rng);
    let heavy = iid.iter().filter(|&&i| i == 1000).count();
    println!("iid:       heavy row in {:.4} of draws", heavy as f64 / draws as f64);

    let res = reservoir_sample(a.rows(), 32, &mut RngStream::new(2, 0))?;
    println!(
        "reservoir: 32 samples, {} heavy, running norm {}",
        res.indices.iter().filter(|&&i| i == 1000).count(),
        res.total_sq
    );

    let uni = uniform_sample(a.nrows(), 32, &mut RngStream::new(3, 0))?;
    println!(
        "uniform:   32 samples, {} heavy",
        uni.iter().filter(|&&i| i == 1000).count()
    );
    Ok(())
}
