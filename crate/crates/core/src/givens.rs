//! Block-Givens rotations and the block-rotation (CS-type) decomposition of
//! an orthogonal matrix.
//!
//! A right rotation built from the row band `[A B]` of `R` maps `R` to
//! `R * G_R` with a zero top-right block; a left rotation built from the
//! column band `[A; C]` maps `R` to `G_L * R` with a zero bottom-left block.
//! Both are stored implicitly through the ratio matrix `X` (`A^{-1}B`, or
//! `(CA^{-1})^T`) and its singular value decomposition, so applying a
//! rotation costs `O(dim * k * (dim - k))` and never forms a `dim x dim`
//! array.

use crate::error::{Error, Result};
use crate::matcore::{
    check_finite, complete_basis, nearest_orthogonal, operator_norm, orthogonality_defect,
    psd_apply, sigma_at, singular_values, svd, BlockPartition, Matrix,
};

/// Relative threshold below which `sigma_k(A)` counts as singular.
pub const SINGULAR_REL: f64 = 1e-13;

/// Threshold on `s_j` separating trivial from genuine rotation planes.
const TRIVIAL_SINE: f64 = 1e-10;

fn inv_sqrt_one_plus(t: f64) -> f64 {
    1.0 / (1.0 + t).sqrt()
}

/// Explicit block trigonometric functions of a pair `(A, B)`.
#[derive(Debug, Clone)]
pub struct BlockTrig {
    /// `(I + X X^T)^{-1/2}`, `k x k`.
    pub cos_ab: Matrix,
    /// `(I + X^T X)^{-1/2}`, `(n-k) x (n-k)`.
    pub cos_ba: Matrix,
    /// `X (I + X^T X)^{-1/2}`, `k x (n-k)`.
    pub sin_ab: Matrix,
    /// Partial isometry of the polar factorization `X = b0 * q_b`.
    pub q_b: Matrix,
    /// Symmetric positive semi-definite factor `(X X^T)^{1/2}`.
    pub b0: Matrix,
}

fn require_invertible(a: &Matrix, scale: f64) -> Result<()> {
    let s = singular_values(a)?;
    let smin = s.last().copied().unwrap_or(0.0);
    let floor = SINGULAR_REL * scale.max(f64::MIN_POSITIVE);
    if !(smin > floor) {
        return Err(Error::Singular { sigma_min: smin });
    }
    Ok(())
}

/// Solves `A X = B` after checking that `A` is square and not singular.
fn ratio(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.nrows() != a.ncols() || a.nrows() != b.nrows() {
        return Err(Error::Dimension(format!(
            "A is {}x{}, B is {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    check_finite(a)?;
    check_finite(b)?;
    require_invertible(a, operator_norm(a).max(operator_norm(b)))?;
    a.clone()
        .lu()
        .solve(b)
        .ok_or(Error::Singular { sigma_min: 0.0 })
}

/// Block cosines and sines of `(A, B)` with `A` square `k x k`.
pub fn block_trig(a: &Matrix, b: &Matrix) -> Result<BlockTrig> {
    let x = ratio(a, b)?;
    let (k, p) = x.shape();
    let xxt = &x * x.transpose();
    let cos_ab = psd_apply(inv_sqrt_one_plus, &xxt)?;
    let cos_ba = psd_apply(inv_sqrt_one_plus, &(x.transpose() * &x))?;
    let sin_ab = &cos_ab * &x;
    let f = svd(&x)?;
    let r = k.min(p);
    let u = f.u();
    let ur = u.columns(0, r);
    let sig = Matrix::from_diagonal(&nalgebra::DVector::from_column_slice(&f.sigma[..r]));
    let b0 = ur * sig * ur.transpose();
    let q_b = ur * f.qp.columns(0, r).transpose();
    Ok(BlockTrig {
        cos_ab,
        cos_ba,
        sin_ab,
        q_b,
        b0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Multiplies from the right, annihilating the top-right block.
    Right,
    /// Multiplies from the left, annihilating the bottom-left block.
    Left,
}

/// A block-Givens rotation held in implicit form.
///
/// With the SVD `X = U diag(s) V^T` the rotation is a product of plane
/// rotations with angles `atan(s_j)`; it is exactly orthogonal for any
/// orthonormal `U`, `V`, however ill-conditioned `X` is.
#[derive(Debug, Clone)]
pub struct BlockGivens {
    side: Side,
    k: usize,
    x: Matrix,
    /// Full `k x k` left singular vectors of `X`.
    u: Matrix,
    /// Leading `r = min(k, p)` right singular vectors of `X`, `p x r`.
    v: Matrix,
    ratio_sigma: Vec<f64>,
    degenerate: bool,
}

fn diag(values: impl Iterator<Item = f64>) -> Matrix {
    Matrix::from_diagonal(&nalgebra::DVector::from_vec(values.collect()))
}

/// `(1 + s^2)^{-1/2} - 1` without cancellation.
fn cos_minus_one(s: f64) -> f64 {
    let r = (1.0 + s * s).sqrt();
    -s * s / (r * (1.0 + r))
}

impl BlockGivens {
    fn from_ratio(side: Side, x: Matrix) -> Result<Self> {
        let (k, p) = x.shape();
        let degenerate = x.iter().all(|&v| v == 0.0);
        let r = k.min(p);
        let (u, v, ratio_sigma) = if r == 0 {
            (Matrix::identity(k, k), Matrix::zeros(p, 0), Vec::new())
        } else {
            let f = svd(&x)?;
            (f.u(), f.qp.columns(0, r).into_owned(), f.sigma[..r].to_vec())
        };
        Ok(Self {
            side,
            k,
            x,
            u,
            v,
            ratio_sigma,
            degenerate,
        })
    }

    fn u_r(&self) -> Matrix {
        self.u.columns(0, self.ratio_sigma.len()).into_owned()
    }

    /// `(I + X X^T)^{-1/2} = U diag(c) U^T`.
    fn cos_small(&self) -> Matrix {
        let c = (0..self.k).map(|j| inv_sqrt_one_plus(sigma_at(&self.ratio_sigma, j + 1).powi(2)));
        &self.u * diag(c) * self.u.transpose()
    }

    /// `(I + X X^T)^{-1/2} X = U_r diag(s c) V_r^T`.
    fn sin(&self) -> Matrix {
        let sc = self.ratio_sigma.iter().map(|&s| s * inv_sqrt_one_plus(s * s));
        self.u_r() * diag(sc) * self.v.transpose()
    }

    /// `diag(c - 1)` on the right singular subspace.
    fn cos_large_shift(&self) -> Matrix {
        diag(self.ratio_sigma.iter().map(|&s| cos_minus_one(s)))
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Order of the rotation (`n` for right, `m` for left).
    pub fn dim(&self) -> usize {
        self.k + self.x.ncols()
    }

    /// True when the off-diagonal block was already zero.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// `A^{-1}B` for a right rotation, `(C A^{-1})^T` for a left one.
    pub fn ratio(&self) -> &Matrix {
        &self.x
    }

    /// Singular values of the ratio matrix, descending.
    pub fn ratio_singular_values(&self) -> &[f64] {
        &self.ratio_sigma
    }

    /// `||(I + X X^T)^{-1/2}||`, the norm of the `k x k` cosine.
    pub fn cos_small_norm(&self) -> f64 {
        inv_sqrt_one_plus(sigma_at(&self.ratio_sigma, self.k).powi(2))
    }

    /// `||(I + X^T X)^{-1/2}||`; equals one when `X` has a nontrivial kernel.
    pub fn cos_large_norm(&self) -> f64 {
        inv_sqrt_one_plus(sigma_at(&self.ratio_sigma, self.x.ncols()).powi(2))
    }

    /// `R * G` for `Side::Right` on the right-rotation form, used by both sides.
    fn rotate_columns(&self, r: &Matrix) -> Matrix {
        let k = self.k;
        let p = self.x.ncols();
        let r1 = r.columns(0, k);
        let r2 = r.columns(k, p);
        let sin = self.sin();
        let mut out = Matrix::zeros(r.nrows(), k + p);
        let new1 = r1 * self.cos_small() + r2 * sin.transpose();
        let new2 = r2 + (r2 * &self.v) * self.cos_large_shift() * self.v.transpose() - r1 * &sin;
        out.columns_mut(0, k).copy_from(&new1);
        out.columns_mut(k, p).copy_from(&new2);
        out
    }

    /// Applies the rotation to `r`: `r * G` for right, `G * r` for left.
    pub fn apply(&self, r: &Matrix) -> Result<Matrix> {
        let d = self.dim();
        match self.side {
            Side::Right if r.ncols() == d => Ok(self.rotate_columns(r)),
            Side::Left if r.nrows() == d => {
                Ok(self.rotate_columns(&r.transpose()).transpose())
            }
            _ => Err(Error::Dimension(format!(
                "{:?} rotation of order {d} cannot act on {}x{}",
                self.side,
                r.nrows(),
                r.ncols()
            ))),
        }
    }

    /// The explicit orthogonal matrix.
    pub fn matrix(&self) -> Matrix {
        let d = self.dim();
        let g = self.rotate_columns(&Matrix::identity(d, d));
        match self.side {
            Side::Right => g,
            Side::Left => g.transpose(),
        }
    }

    /// Explicit block cosines and sines.
    pub fn trig(&self) -> Result<BlockTrig> {
        let p = self.x.ncols();
        let ur = self.u_r();
        Ok(BlockTrig {
            cos_ab: self.cos_small(),
            cos_ba: Matrix::identity(p, p) + &self.v * self.cos_large_shift() * self.v.transpose(),
            sin_ab: self.sin(),
            b0: &ur * diag(self.ratio_sigma.iter().copied()) * ur.transpose(),
            q_b: &ur * self.v.transpose(),
        })
    }
}

/// Rotation `G_R` with `(R G_R)` having a zero top-right block.
pub fn build_right_rotation(p: &BlockPartition) -> Result<BlockGivens> {
    let a = p.a();
    let b = p.b();
    let x = ratio(&a, &b)?;
    BlockGivens::from_ratio(Side::Right, x)
}

/// Rotation `G_L` with `(G_L R)` having a zero bottom-left block.
pub fn build_left_rotation(p: &BlockPartition) -> Result<BlockGivens> {
    let a = p.a();
    let c = p.c();
    let x = ratio(&a.transpose(), &c.transpose())?;
    BlockGivens::from_ratio(Side::Left, x)
}

/// Orthogonal `H` with `H [a; v] = [sqrt(a^2 + |v|^2); 0]`, built as the
/// `k = 1` block rotation with ratio `v / a`.
pub fn householder_block(a: f64, v: &[f64]) -> Result<Matrix> {
    if !a.is_finite() || v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("non-finite input".into()));
    }
    if a == 0.0 {
        return Err(Error::Singular { sigma_min: 0.0 });
    }
    let x = Matrix::from_row_slice(1, v.len(), v) / a;
    let g = BlockGivens::from_ratio(Side::Left, x)?;
    let mut h = g.matrix();
    if a < 0.0 {
        h.row_mut(0).neg_mut();
    }
    Ok(h)
}

/// Rotation weight `omega` of a block rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationWeight {
    pub omega: f64,
    /// Set when the rotation is the identity (zero ratio).
    pub degenerate: bool,
}

/// `omega = max(||cos||, ||sin||)` over the nontrivial planes: with `sigma`
/// the nonzero singular values of the ratio, the largest cosine is
/// `(1 + sigma_min^2)^{-1/2}` and the largest sine
/// `sigma_max (1 + sigma_max^2)^{-1/2}`.
pub fn rotation_weight(g: &BlockGivens) -> RotationWeight {
    let s = g.ratio_singular_values();
    let top = s.first().copied().unwrap_or(0.0);
    if g.is_degenerate() || top == 0.0 {
        return RotationWeight {
            omega: 1.0,
            degenerate: true,
        };
    }
    let smin = s
        .iter()
        .copied()
        .filter(|&x| x > 1e-12 * top)
        .fold(f64::INFINITY, f64::min);
    let cos = inv_sqrt_one_plus(smin * smin);
    let sin = top * inv_sqrt_one_plus(top * top);
    RotationWeight {
        omega: cos.max(sin),
        degenerate: false,
    }
}

/// `Q = diag(q1, q2) * M * diag(q1p, q2p)` with `M` the block-rotation
/// middle factor: `I_r`, then planes `[[c, -s], [s, c]]`, then `I_l`.
#[derive(Debug, Clone)]
pub struct BlockRotationFactors {
    pub k: usize,
    pub q1: Matrix,
    pub q2: Matrix,
    pub q1p: Matrix,
    pub q2p: Matrix,
    /// Cosines of the nontrivial planes, descending.
    pub c: Vec<f64>,
    /// Sines of the nontrivial planes, ascending.
    pub s: Vec<f64>,
    /// Number of trivial (`c = 1`) planes.
    pub r: usize,
    /// Size of the trailing identity block in the second coordinate group.
    pub l: usize,
}

impl BlockRotationFactors {
    pub fn n(&self) -> usize {
        self.q1.nrows() + self.q2.nrows()
    }

    /// The middle factor `M`.
    pub fn middle(&self) -> Matrix {
        let n = self.n();
        let mut m = Matrix::identity(n, n);
        for (t, (&c, &s)) in self.c.iter().zip(&self.s).enumerate() {
            let a = self.r + t;
            let b = self.k + t;
            m[(a, a)] = c;
            m[(a, b)] = -s;
            m[(b, a)] = s;
            m[(b, b)] = c;
        }
        m
    }

    fn block_diag(x: &Matrix, y: &Matrix) -> Matrix {
        let (a, b) = (x.nrows(), y.nrows());
        let mut out = Matrix::zeros(a + b, a + b);
        out.view_mut((0, 0), (a, a)).copy_from(x);
        out.view_mut((a, a), (b, b)).copy_from(y);
        out
    }

    pub fn left(&self) -> Matrix {
        Self::block_diag(&self.q1, &self.q2)
    }

    pub fn right(&self) -> Matrix {
        Self::block_diag(&self.q1p, &self.q2p)
    }

    pub fn reassemble(&self) -> Matrix {
        self.left() * self.middle() * self.right()
    }

    /// `omega = max(max c, max s)` over the nontrivial planes, or `None`
    /// when every plane is trivial.
    pub fn omega(&self) -> Option<f64> {
        let c = self.c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let s = self.s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (!self.c.is_empty()).then(|| c.max(s))
    }
}

/// Block-rotation decomposition of an orthogonal `n x n` matrix split at
/// `k <= n - k`.
pub fn block_rotation_decompose(q: &Matrix, k: usize) -> Result<BlockRotationFactors> {
    let n = q.nrows();
    if q.ncols() != n {
        return Err(Error::Dimension(format!("{}x{} is not square", n, q.ncols())));
    }
    if k == 0 || 2 * k > n {
        return Err(Error::InvalidArgument(format!(
            "split k={k} needs 1 <= k <= n-k for n={n}"
        )));
    }
    check_finite(q)?;
    let dev = orthogonality_defect(q);
    if dev > 1e-10 * n as f64 {
        return Err(Error::NotOrthogonal { deviation: dev });
    }
    let p = n - k;
    let q11 = q.view((0, 0), (k, k)).into_owned();
    let q12 = q.view((0, k), (k, p)).into_owned();
    let q21 = q.view((k, 0), (p, k)).into_owned();
    let q22 = q.view((k, k), (p, p)).into_owned();

    let f = svd(&q11)?;
    let u1 = f.u();
    let v1 = f.qp.clone();
    let w = &q21 * &v1;
    let s_all: Vec<f64> = w.column_iter().map(|c| c.norm()).collect();
    let r = s_all.iter().take_while(|&&s| s <= TRIVIAL_SINE).count();
    if s_all[r..].iter().any(|&s| s <= TRIVIAL_SINE) {
        return Err(Error::NonConvergence {
            sweeps: 0,
            residual: dev,
        });
    }
    let mid = k - r;

    let mut c = Vec::with_capacity(mid);
    let mut s = Vec::with_capacity(mid);
    for j in r..k {
        let h = f.sigma[j].hypot(s_all[j]);
        c.push(f.sigma[j] / h);
        s.push(s_all[j] / h);
    }

    let mut u2_mid = Matrix::zeros(p, mid);
    for (t, j) in (r..k).enumerate() {
        u2_mid.set_column(t, &(w.column(j) / s_all[j]));
    }
    let u2 = if mid > 0 {
        complete_basis(&nearest_orthogonal(&u2_mid)?)
    } else {
        Matrix::identity(p, p)
    };

    let t12 = u1.transpose() * &q12;
    let t22 = u2.transpose() * &q22;
    let mut v2 = t22.clone();
    for t in 0..mid {
        let j = r + t;
        let row = t22.row(t) * c[t] - t12.row(j) * s[t];
        v2.set_row(t, &row);
    }
    let v2 = nearest_orthogonal(&v2)?;

    Ok(BlockRotationFactors {
        k,
        q1: u1,
        q2: u2,
        q1p: v1.transpose(),
        q2p: v2,
        c,
        s,
        r,
        l: p - mid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn mat(rows: usize, cols: usize, data: &[f64]) -> Matrix {
        Matrix::from_row_slice(rows, cols, data)
    }

    fn close(a: &Matrix, b: &Matrix, tol: f64) {
        assert_eq!(a.shape(), b.shape());
        let d = (a - b).abs().max();
        assert!(d <= tol, "difference {d:e}\n{a}\n{b}");
    }

    #[test]
    fn scalar_trig_equal_entries() {
        let t = block_trig(&mat(1, 1, &[1.0]), &mat(1, 1, &[1.0])).unwrap();
        let h = 0.5f64.sqrt();
        assert_abs_diff_eq!(t.cos_ab[(0, 0)], h, epsilon = 1e-15);
        assert_abs_diff_eq!(t.cos_ba[(0, 0)], h, epsilon = 1e-15);
        assert_abs_diff_eq!(t.sin_ab[(0, 0)], h, epsilon = 1e-15);
    }

    #[test]
    fn scalar_trig_and_weight() {
        let t = block_trig(&mat(1, 1, &[1.0]), &mat(1, 1, &[2.0])).unwrap();
        let r5 = 5f64.sqrt();
        assert_abs_diff_eq!(t.cos_ab[(0, 0)], 1.0 / r5, epsilon = 1e-15);
        assert_abs_diff_eq!(t.sin_ab[(0, 0)], 2.0 / r5, epsilon = 1e-15);
        assert_abs_diff_eq!(t.b0[(0, 0)], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t.q_b[(0, 0)], 1.0, epsilon = 1e-14);
        let p = BlockPartition::new(mat(2, 2, &[1.0, 2.0, 0.0, 1.0]), 1).unwrap();
        let g = build_right_rotation(&p).unwrap();
        assert_abs_diff_eq!(rotation_weight(&g).omega, 2.0 / r5, epsilon = 1e-15);
    }

    #[test]
    fn right_rotation_small_example() {
        let r = mat(2, 2, &[1.0, 1.0, 1.0, 0.0]);
        let g = build_right_rotation(&BlockPartition::new(r.clone(), 1).unwrap()).unwrap();
        let h = 0.5f64.sqrt();
        close(&g.matrix(), &mat(2, 2, &[h, -h, h, h]), 1e-15);
        let rg = g.apply(&r).unwrap();
        close(&rg, &mat(2, 2, &[2f64.sqrt(), 0.0, h, -h]), 1e-15);
        close(&rg, &(&r * g.matrix()), 1e-15);
    }

    #[test]
    fn identity_gives_degenerate_rotation() {
        let p = BlockPartition::new(Matrix::identity(2, 2), 1).unwrap();
        let g = build_right_rotation(&p).unwrap();
        assert!(g.is_degenerate());
        close(&g.matrix(), &Matrix::identity(2, 2), 0.0);
        let w = rotation_weight(&g);
        assert!(w.degenerate);
        assert_eq!(w.omega, 1.0);
    }

    #[test]
    fn singular_leading_block_rejected() {
        let p = BlockPartition::new(mat(2, 2, &[0.0, 1.0, 1.0, 0.0]), 1).unwrap();
        assert!(matches!(build_right_rotation(&p), Err(Error::Singular { .. })));
        assert!(matches!(build_left_rotation(&p), Err(Error::Singular { .. })));
    }

    #[test]
    fn left_rotation_zeroes_bottom_left() {
        let r = mat(
            4,
            3,
            &[
                4.0, 1.0, 0.5, //
                -1.0, 3.0, 0.2, //
                0.7, -0.4, 1.0, //
                0.3, 0.9, -0.6,
            ],
        );
        let p = BlockPartition::new(r.clone(), 2).unwrap();
        let g = build_left_rotation(&p).unwrap();
        let gm = g.matrix();
        assert!(orthogonality_defect(&gm) < 1e-14);
        let out = g.apply(&r).unwrap();
        close(&out, &(&gm * &r), 1e-13);
        assert!(out.view((2, 0), (2, 2)).abs().max() < 1e-14);
        let gr = build_right_rotation(&p).unwrap();
        let out = gr.apply(&r).unwrap();
        assert!(out.view((0, 2), (2, 1)).abs().max() < 1e-14);
        assert!(orthogonality_defect(&gr.matrix()) < 1e-14);
    }

    #[test]
    fn explicit_trig_matches_implicit_blocks() {
        let r = mat(3, 3, &[2.0, 0.5, -1.0, 0.3, 1.5, 0.4, 1.0, -2.0, 0.7]);
        let p = BlockPartition::new(r, 1).unwrap();
        let g = build_right_rotation(&p).unwrap();
        let t = block_trig(&p.a(), &p.b()).unwrap();
        let via = g.trig().unwrap();
        close(&t.cos_ab, &via.cos_ab, 1e-14);
        close(&t.cos_ba, &via.cos_ba, 1e-14);
        close(&t.sin_ab, &via.sin_ab, 1e-14);
        let gm = g.matrix();
        close(&gm.view((0, 0), (1, 1)).into_owned(), &t.cos_ab, 1e-14);
        close(&gm.view((1, 1), (2, 2)).into_owned(), &t.cos_ba, 1e-14);
        close(&gm.view((0, 1), (1, 2)).into_owned(), &(-&t.sin_ab), 1e-14);
        close(&(&t.b0 * &t.q_b), g.ratio(), 1e-13);
        assert_abs_diff_eq!(operator_norm(&t.cos_ba), g.cos_large_norm(), epsilon = 1e-14);
        assert_abs_diff_eq!(g.cos_large_norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn householder_examples() {
        let h = householder_block(3.0, &[4.0]).unwrap();
        let y = &h * mat(2, 1, &[3.0, 4.0]);
        close(&y, &mat(2, 1, &[5.0, 0.0]), 1e-14);
        let h = householder_block(1.0, &[1.0, 1.0, 1.0]).unwrap();
        let y = &h * mat(4, 1, &[1.0, 1.0, 1.0, 1.0]);
        close(&y, &mat(4, 1, &[2.0, 0.0, 0.0, 0.0]), 1e-14);
        assert!(orthogonality_defect(&h) < 1e-14);
        let h = householder_block(-2.0, &[0.0, 0.0]).unwrap();
        let y = &h * mat(3, 1, &[-2.0, 0.0, 0.0]);
        close(&y, &mat(3, 1, &[2.0, 0.0, 0.0]), 0.0);
        assert!(householder_block(0.0, &[1.0]).is_err());
    }

    #[test]
    fn decomposition_of_plane_rotation() {
        let (c, s) = (0.6, 0.8);
        let q = mat(2, 2, &[c, -s, s, c]);
        let f = block_rotation_decompose(&q, 1).unwrap();
        assert_eq!((f.r, f.l), (0, 0));
        assert_abs_diff_eq!(f.c[0], c, epsilon = 1e-15);
        assert_abs_diff_eq!(f.s[0], s, epsilon = 1e-15);
        close(&f.reassemble(), &q, 1e-14);
        assert_abs_diff_eq!(f.omega().unwrap(), 0.8, epsilon = 1e-15);
    }

    #[test]
    fn decomposition_of_identity_is_trivial() {
        let f = block_rotation_decompose(&Matrix::identity(5, 5), 2).unwrap();
        assert_eq!((f.r, f.l), (2, 3));
        assert!(f.omega().is_none());
        close(&f.reassemble(), &Matrix::identity(5, 5), 1e-15);
    }

    #[test]
    fn decomposition_of_rotation_matrix() {
        let r = mat(
            5,
            5,
            &[
                3.0, 0.2, 1.0, -0.5, 0.3, //
                0.1, 2.5, 0.4, 0.2, -1.0, //
                0.7, -0.3, 1.2, 0.6, 0.1, //
                -0.2, 0.8, 0.3, 0.9, 0.4, //
                0.5, 0.1, -0.6, 0.2, 1.1,
            ],
        );
        let g = build_right_rotation(&BlockPartition::new(r, 2).unwrap())
            .unwrap()
            .matrix();
        let f = block_rotation_decompose(&g, 2).unwrap();
        assert_eq!(f.r + f.c.len(), 2);
        assert_eq!(f.l, 3 - f.c.len());
        close(&f.reassemble(), &g, 1e-12);
        for m in [&f.q1, &f.q2, &f.q1p, &f.q2p] {
            assert!(orthogonality_defect(m) < 1e-12);
        }
        for (c, s) in f.c.iter().zip(&f.s) {
            assert_abs_diff_eq!(c * c + s * s, 1.0, epsilon = 1e-14);
            assert!(*c < 1.0 && *s > 0.0);
        }
    }

    #[test]
    fn decomposition_rejects_bad_input() {
        assert!(block_rotation_decompose(&Matrix::identity(4, 4), 3).is_err());
        assert!(matches!(
            block_rotation_decompose(&mat(2, 2, &[1.0, 1.0, 0.0, 1.0]), 1),
            Err(Error::NotOrthogonal { .. })
        ));
    }
}
