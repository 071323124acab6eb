//! Best rank-1 fit inside the span of a row sample, compared with the
//! unconstrained optimum, for uniform and length-squared samples.

use lsqrank::instances::gen_adversarial_uniform;
use lsqrank::spanfit::{mean_se, run_trials, Method, TrialContext};

fn main() -> lsqrank::Result<()> {
    let a = gen_adversarial_uniform(1001, 100.0, 1.0)?;
    let ctx = TrialContext::new(&a)?;
    println!("|A|^2 = {}, best rank-1 error = {:.3}", ctx.total_sq(), ctx.opt_err_sq());

    for method in [Method::Uniform, Method::Lsq, Method::Adaptive] {
        let reports = run_trials(&ctx, 32, method, 500, 7);
        let ratios: Vec<f64> = reports.iter().filter(|r| r.status.is_ok()).map(|r| r.ratio).collect();
        let (mean, se) = mean_se(&ratios);
        println!("{method:>8}: mean ratio {mean:.4} +- {se:.4} over {} trials", ratios.len());
    }
    Ok(())
}
