//! Expected Gram matrix of a column profile and the sandwich bounds on its
//! spectrum in terms of the squared column norms.

use blocksvd::randmat::{expected_gram, theorem3_bounds, ColumnProfile, DEFAULT_SLACK_C};

fn main() -> blocksvd::Result<()> {
    let hand = ColumnProfile::binary(4, &[2, 2])?;
    let rep = theorem3_bounds(&hand, DEFAULT_SLACK_C)?;
    println!("hand case: delta {}, rho {}", rep.delta, rep.rho);
    for row in &rep.rows {
        println!("  sigma_{} = {:.4} in [{:.4}, {:.4}]", row.i, row.oracle, row.lower_pure, row.upper);
    }

    let ones: Vec<usize> = (0..20).map(|j| 5 + (j * 7) % 40).collect();
    let p = ColumnProfile::binary(1000, &ones)?;
    let eg = expected_gram(&p)?;
    println!("k = 20 profile: factorization residual {:.2e}", eg.factorization_residual());
    let rep = theorem3_bounds(&p, DEFAULT_SLACK_C)?;
    println!("S1 passed: {}, all contained: {}", rep.s1.passed(), rep.all_contained());
    for row in rep.rows.iter().take(5) {
        println!("  i={:<2} w={:<5.1} [{:.3}, {:.3}] contains {:.3}", row.i, row.weight, row.lower, row.upper, row.oracle);
    }
    Ok(())
}
