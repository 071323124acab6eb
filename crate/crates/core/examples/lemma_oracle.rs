//! Closed-form checks of the sampling analysis, cross-checked by simulation.

use lsqrank::instances::{gen_adversarial_uniform, gen_near_rank1};
use lsqrank::oracle::{check_lemmas, decompose, default_l, exact_expected_mapping_error, monte_carlo_mapping_error};
use lsqrank::RngStream;

fn main() -> lsqrank::Result<()> {
    let a = gen_adversarial_uniform(1001, 100.0, 1.0)?;
    let frame = decompose(&a)?;
    let eps = 0.5;
    let l = default_l(eps);
    let report = check_lemmas(&frame, eps, l, &frame.dist)?;
    print!("{report}");

    let exact = exact_expected_mapping_error(&frame, eps, l, &frame.dist);
    let (mean, se) = monte_carlo_mapping_error(&a, &frame, eps, l, 20_000, &mut RngStream::new(3, 0))?;
    println!("expected error {exact:.3}, simulated {mean:.3} +- {se:.3}");

    let noisy = gen_near_rank1(60, 8, 5.0, 1.0, 2)?;
    let frame = decompose(&noisy)?;
    let report = check_lemmas(&frame, 0.3, default_l(0.3), &frame.dist)?;
    println!("noisy instance: {}, all applicable checks pass: {}", report.regime(), report.all_pass());
    Ok(())
}
