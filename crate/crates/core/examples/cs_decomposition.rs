//! Factor an orthogonal block rotation into block-diagonal orthogonal
//! factors around a middle matrix of plane rotations.

use blocksvd::givens::{block_rotation_decompose, build_right_rotation};
use blocksvd::matcore::operator_norm;
use blocksvd::{BlockPartition, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> blocksvd::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let r = Matrix::from_fn(10, 7, |_, _| rng.random_range(-1.0..1.0));
    let p = BlockPartition::new(r, 3)?;
    let q = build_right_rotation(&p)?.matrix();
    let f = block_rotation_decompose(&q, 3)?;
    println!("cosines {:?}", f.c);
    println!("sines   {:?}", f.s);
    println!("trivial planes {}, trailing identity {}", f.r, f.l);
    println!("omega {:?}", f.omega());
    println!("reassembly error {:.2e}", operator_norm(&(f.reassemble() - &q)));
    Ok(())
}
