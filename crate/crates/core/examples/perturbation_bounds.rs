//! Intervals for the singular values of `R` after zeroing its bottom-right
//! block, and bounds on `sigma_(k+1)` from a single block rotation.

use blocksvd::bounds::{corollary5, example1_sigma2_r0, mu_bounds, theorem2_bounds, weyl_gap_bounds, RANK_REL};
use blocksvd::{BlockPartition, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> blocksvd::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let r = Matrix::from_fn(12, 8, |_, _| rng.random_range(-1.0..1.0));
    let p = BlockPartition::new(r, 3)?;
    for i in [1, 3, 5] {
        let (mu, reports) = mu_bounds(&p, i)?;
        println!("i = {i}: mu_bar = {:.4} ({:?} branch)", mu.mu_bar, mu.branch_r);
        for b in weyl_gap_bounds(&p, i)?.iter().chain(&reports) {
            println!("  {:<24} [{:.4}, {:.4}] oracle {:.4}", b.formula, b.lower, b.upper, b.oracle.unwrap_or(f64::NAN));
        }
    }
    let t = theorem2_bounds(&p, RANK_REL)?;
    for b in [&t.r0_ratio, &t.r0_closed, &t.r] {
        println!("{:<24} sigma_4 <= {:.4} (oracle {:.4})", b.formula, b.upper, b.oracle.unwrap_or(f64::NAN));
    }
    let scalar = BlockPartition::new(Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 0.0]), 1)?;
    let b = corollary5(&scalar)?;
    println!("scalar case: sigma_2 <= {:.4}, actual {:.4}", b.upper, b.oracle.unwrap_or(f64::NAN));
    println!("2x2 family at s = 0.8: sigma_2(R0) = {:.6}", example1_sigma2_r0(0.8));
    Ok(())
}
