//! Average `X^T X` over sampled random matrices and compare it with the
//! expected Gram matrix, then check the pair inner-product moments.

use blocksvd::randmat::{empirical_gram, expected_gram, lemma13_stats, ColumnModel, ColumnProfile, RandomColumnModel};

fn main() -> blocksvd::Result<()> {
    let p = ColumnProfile::binary(50, &[10, 8, 6, 4, 3])?;
    let model = RandomColumnModel::from_profile(&p, 5)?;
    let g = expected_gram(&p)?.g;
    let mc = empirical_gram(&model, &g, 5_000)?;
    println!("5000 draws: max |G_hat - G| = {:.4}, max z = {:.2}", mc.max_abs_dev, mc.max_z);

    let pair = ColumnModel::Binary { l: 2 };
    let rep = lemma13_stats(4, pair, pair, 50_000, 5)?;
    println!(
        "<x, y> for 2-subsets of 4: mean {:.4} (exact {:.4}), variance {:.4} (exact {:.4})",
        rep.mean.empirical, rep.mean.expected, rep.variance.empirical, rep.variance.expected
    );
    Ok(())
}
