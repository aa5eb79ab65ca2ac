//! Alternate left and right block rotations until the off-diagonal blocks
//! vanish, then compare the limit spectrum with a direct SVD.

use blocksvd::blockdiag::{block_diagonalize, check_lemma11, BlockDiagOptions};
use blocksvd::matcore::singular_values;
use blocksvd::{BlockPartition, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> blocksvd::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (m, n, k) = (30, 12, 4);
    let mut r = Matrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
    r.columns_mut(0, k).scale_mut(10.0);
    let p = BlockPartition::new(r.clone(), k)?;
    let res = block_diagonalize(&p, &BlockDiagOptions::default())?;
    println!("termination {:?} after {} rotations", res.termination, res.iterations);
    println!("off-diagonal norm {:.2e}", res.off_diagonal_norm());
    let direct = singular_values(&r)?;
    let limit = res.spectrum()?;
    let gap = direct.iter().zip(&limit).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("top {k} singular values {:?}", &limit[..k]);
    println!("max deviation from direct SVD {gap:.2e}");
    let lemma = check_lemma11(&res.trace, 1e-9);
    for item in lemma.items() {
        println!("  {:<28} {:>4}/{:<4} worst margin {:+.3e}", item.label, item.violations, item.checks, item.worst_margin);
    }
    Ok(())
}
