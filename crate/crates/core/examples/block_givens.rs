//! Build both block-Givens rotations for a random partition and check that
//! each is orthogonal and clears its off-diagonal block.

use blocksvd::givens::{build_left_rotation, build_right_rotation, rotation_weight};
use blocksvd::matcore::{operator_norm, orthogonality_defect};
use blocksvd::{BlockPartition, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> blocksvd::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (m, n, k) = (9, 6, 2);
    let r = Matrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
    let p = BlockPartition::new(r.clone(), k)?;

    let right = build_right_rotation(&p)?;
    let q = right.matrix();
    let cleared = (&r * &q).view((0, k), (k, n - k)).into_owned();
    println!("right rotation: ||Q^T Q - I|| = {:.2e}, ||top-right block|| = {:.2e}", orthogonality_defect(&q), operator_norm(&cleared));
    println!("  ratio singular values {:?}", right.ratio_singular_values());
    println!("  weight {:.4}", rotation_weight(&right).omega);

    let left = build_left_rotation(&p)?;
    let q = left.matrix();
    let cleared = (&q * &r).view((k, 0), (m - k, k)).into_owned();
    println!("left rotation:  ||Q^T Q - I|| = {:.2e}, ||bottom-left block|| = {:.2e}", orthogonality_defect(&q), operator_norm(&cleared));
    Ok(())
}
