//! Dense numerical substrate shared by every other module.
//!
//! Matrices are plain `nalgebra::DMatrix<f64>`. The SVD is a one-sided
//! Jacobi (Hestenes) iteration, stored in the orientation `Q * M * Qp = Sigma`,
//! i.e. `Q` is the transpose of the conventional left factor `U` and `Qp`
//! is the conventional right factor `V`.
//!
//! All public slicing is 1-based and inclusive: `submatrix(m, (1, 2), (2, 3))`
//! designates rows 1..=2 and columns 2..=3.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;

const MAX_JACOBI_SWEEPS: usize = 80;

/// Global numerical tolerances. The defaults match the contract of
/// [`svd`]: orthogonality within `orthogonality * dim` and reconstruction
/// within `reconstruction * dim * ||M||`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub orthogonality: f64,
    pub reconstruction: f64,
    pub symmetry: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            orthogonality: 1e-12,
            reconstruction: 1e-10,
            symmetry: 1e-10,
        }
    }
}

pub fn check_finite(m: &Matrix) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if !m[(i, j)].is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// A matrix split as `[[A, B], [C, D]]` with square `k x k` leading block `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPartition {
    base: Matrix,
    k: usize,
}

impl BlockPartition {
    pub fn new(base: Matrix, k: usize) -> Result<Self> {
        let (m, n) = base.shape();
        if n == 0 || m < n {
            return Err(Error::Dimension(format!(
                "block partition needs m >= n >= 1, got {m}x{n}"
            )));
        }
        if k == 0 || k >= n {
            return Err(Error::InvalidArgument(format!(
                "split k = {k} must satisfy 1 <= k < n = {n}"
            )));
        }
        check_finite(&base)?;
        Ok(Self { base, k })
    }

    pub fn from_blocks(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Result<Self> {
        let k = a.nrows();
        if a.ncols() != k
            || b.nrows() != k
            || c.ncols() != k
            || d.nrows() != c.nrows()
            || d.ncols() != b.ncols()
        {
            return Err(Error::Dimension("blocks do not tile a partition".into()));
        }
        let m = k + c.nrows();
        let n = k + b.ncols();
        let mut base = Matrix::zeros(m, n);
        base.view_mut((0, 0), (k, k)).copy_from(a);
        base.view_mut((0, k), (k, n - k)).copy_from(b);
        base.view_mut((k, 0), (m - k, k)).copy_from(c);
        base.view_mut((k, k), (m - k, n - k)).copy_from(d);
        Self::new(base, k)
    }

    pub fn base(&self) -> &Matrix {
        &self.base
    }

    pub fn into_base(self) -> Matrix {
        self.base
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.base.nrows()
    }

    pub fn n(&self) -> usize {
        self.base.ncols()
    }

    pub fn a(&self) -> Matrix {
        self.base.view((0, 0), (self.k, self.k)).into_owned()
    }

    pub fn b(&self) -> Matrix {
        self.base.view((0, self.k), (self.k, self.n() - self.k)).into_owned()
    }

    pub fn c(&self) -> Matrix {
        self.base.view((self.k, 0), (self.m() - self.k, self.k)).into_owned()
    }

    pub fn d(&self) -> Matrix {
        self.base
            .view((self.k, self.k), (self.m() - self.k, self.n() - self.k))
            .into_owned()
    }

    /// `R[1:m, 1:k]`
    pub fn left_band(&self) -> Matrix {
        self.base.columns(0, self.k).into_owned()
    }

    /// `R[1:m, k+1:n]`
    pub fn right_band(&self) -> Matrix {
        self.base.columns(self.k, self.n() - self.k).into_owned()
    }

    /// The same partition with the bottom-right block zeroed (`R0`).
    pub fn zeroed(&self) -> Self {
        let mut base = self.base.clone();
        let (m, n, k) = (self.m(), self.n(), self.k);
        base.view_mut((k, k), (m - k, n - k)).fill(0.0);
        Self { base, k }
    }

    /// Same matrix, different split.
    pub fn with_split(&self, k: usize) -> Result<Self> {
        Self::new(self.base.clone(), k)
    }
}

/// SVD factors in the orientation `q * M * qp = diag(sigma)`.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub q: Matrix,
    pub qp: Matrix,
    pub sigma: Vec<f64>,
}

impl SvdFactors {
    /// Conventional left factor `U = q^T`.
    pub fn u(&self) -> Matrix {
        self.q.transpose()
    }

    pub fn v(&self) -> &Matrix {
        &self.qp
    }

    /// The rectangular diagonal `Sigma` matching the source shape.
    pub fn sigma_matrix(&self) -> Matrix {
        rect_diag(self.q.nrows(), self.qp.nrows(), &self.sigma)
    }

    /// `||q * M * qp - Sigma||`.
    pub fn residual(&self, m: &Matrix) -> f64 {
        operator_norm(&(&self.q * m * &self.qp - self.sigma_matrix()))
    }

    /// `max(||q^T q - I||, ||qp^T qp - I||)`.
    pub fn orthogonality(&self) -> f64 {
        orthogonality_defect(&self.q).max(orthogonality_defect(&self.qp))
    }
}

/// Rectangular `m x n` matrix with `values` on its main diagonal.
pub fn rect_diag(m: usize, n: usize, values: &[f64]) -> Matrix {
    let mut out = Matrix::zeros(m, n);
    for (i, &v) in values.iter().enumerate().take(m.min(n)) {
        out[(i, i)] = v;
    }
    out
}

/// `||Q^T Q - I||` in the operator norm.
pub fn orthogonality_defect(q: &Matrix) -> f64 {
    if q.is_empty() {
        return 0.0;
    }
    let g = q.transpose() * q - Matrix::identity(q.ncols(), q.ncols());
    operator_norm(&g)
}

/// One-sided Jacobi on the columns of a tall matrix (`m >= n`).
///
/// Returns the rotated working matrix (columns mutually orthogonal) and the
/// accumulated right rotations when `want_v` is set.
fn jacobi_columns(mut w: Matrix, want_v: bool) -> Result<(Matrix, Option<Matrix>)> {
    let (m, n) = w.shape();
    let mut v = want_v.then(|| Matrix::identity(n, n));
    let tol = (m.max(1) as f64) * f64::EPSILON;
    // Columns below rounding level of the whole matrix are treated as zero.
    let floor = (f64::EPSILON * w.norm()).powi(2);
    let mut worst = 0.0f64;
    for _sweep in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        worst = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                let (alpha, beta, gamma) = {
                    let cp = w.column(p);
                    let cq = w.column(q);
                    (cp.norm_squared(), cq.norm_squared(), cp.dot(&cq))
                };
                if gamma == 0.0 || alpha <= floor || beta <= floor {
                    continue;
                }
                let scale = (alpha * beta).sqrt();
                let off = gamma.abs() / scale;
                worst = worst.max(off);
                if off <= tol {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut w, p, q, c, s);
                if let Some(v) = v.as_mut() {
                    rotate_columns(v, p, q, c, s);
                }
            }
        }
        if !rotated {
            return Ok((w, v));
        }
    }
    Err(Error::NonConvergence {
        sweeps: MAX_JACOBI_SWEEPS,
        residual: worst,
    })
}

fn rotate_columns(w: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let rows = w.nrows();
    let data = w.as_mut_slice();
    let (head, tail) = data.split_at_mut(q * rows);
    let cp = &mut head[p * rows..(p + 1) * rows];
    let cq = &mut tail[..rows];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

fn sorted_column_norms(w: &Matrix) -> (Vec<usize>, Vec<f64>) {
    let norms: Vec<f64> = w.column_iter().map(|c| c.norm()).collect();
    let mut order: Vec<usize> = (0..norms.len()).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let sorted = order.iter().map(|&j| norms[j]).collect();
    (order, sorted)
}

/// Extends orthonormal columns to a full orthogonal basis of `R^m`.
pub fn complete_basis(cols: &Matrix) -> Matrix {
    let (m, r) = cols.shape();
    let mut aug = Matrix::zeros(m, r + m);
    aug.columns_mut(0, r).copy_from(cols);
    aug.columns_mut(r, m).fill_with_identity();
    let mut q = aug.qr().q();
    for j in 0..r {
        if q.column(j).dot(&cols.column(j)) < 0.0 {
            let neg = -q.column(j);
            q.set_column(j, &neg);
        }
    }
    q
}

fn svd_tall(m: &Matrix) -> Result<SvdFactors> {
    let (rows, cols) = m.shape();
    let (w, v) = jacobi_columns(m.clone(), true)?;
    let v = v.expect("requested right factor");
    let (order, sigma) = sorted_column_norms(&w);
    let cutoff = sigma.first().copied().unwrap_or(0.0) * (rows as f64) * f64::EPSILON;
    let rank = sigma
        .iter()
        .take_while(|&&s| s > cutoff && s > f64::MIN_POSITIVE)
        .count();
    let mut u_good = Matrix::zeros(rows, rank);
    let mut qp = Matrix::zeros(cols, cols);
    for (dst, &src) in order.iter().enumerate() {
        qp.set_column(dst, &v.column(src));
        if dst < rank {
            u_good.set_column(dst, &(w.column(src) / sigma[dst]));
        }
    }
    let u = complete_basis(&u_good);
    Ok(SvdFactors {
        q: u.transpose(),
        qp,
        sigma,
    })
}

/// Full SVD with `q * m * qp = diag(sigma)`, `sigma` non-increasing.
pub fn svd(m: &Matrix) -> Result<SvdFactors> {
    check_finite(m)?;
    if m.nrows() >= m.ncols() {
        svd_tall(m)
    } else {
        let t = svd_tall(&m.transpose())?;
        Ok(SvdFactors {
            q: t.qp.transpose(),
            qp: t.q.transpose(),
            sigma: t.sigma,
        })
    }
}

/// Singular values only, descending, length `min(m, n)`.
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    check_finite(m)?;
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let work = if m.nrows() >= m.ncols() {
        m.clone()
    } else {
        m.transpose()
    };
    let (w, _) = jacobi_columns(work, false)?;
    Ok(sorted_column_norms(&w).1)
}

/// `sigma_i(m)` with 1-based `i`; zero beyond `min(m, n)`.
pub fn sigma_at(values: &[f64], i: usize) -> f64 {
    if i == 0 {
        return f64::INFINITY;
    }
    values.get(i - 1).copied().unwrap_or(0.0)
}

/// Largest singular value, via the eigenvalues of the smaller Gram matrix.
pub fn operator_norm(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    if m.nrows() == 1 || m.ncols() == 1 {
        return m.norm();
    }
    let gram = if m.nrows() >= m.ncols() {
        m.transpose() * m
    } else {
        m * m.transpose()
    };
    let eig = SymmetricEigen::new(gram).eigenvalues;
    eig.iter().copied().fold(0.0f64, f64::max).max(0.0).sqrt()
}

/// Maximum absolute row sum.
pub fn norm_inf(m: &Matrix) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Maximum absolute column sum.
pub fn norm_one(m: &Matrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `sqrt(||M||_inf * ||M||_1)`, an upper bound for the operator norm.
pub fn schur_test_bound(m: &Matrix) -> f64 {
    (norm_inf(m) * norm_one(m)).sqrt()
}

fn asymmetry(s: &Matrix) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..s.ncols() {
        for i in 0..j {
            worst = worst.max((s[(i, j)] - s[(j, i)]).abs());
        }
    }
    worst
}

fn require_symmetric(s: &Matrix, tol: f64) -> Result<()> {
    if !s.is_square() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            s.nrows(),
            s.ncols()
        )));
    }
    check_finite(s)?;
    let scale = s.amax().max(1.0);
    let asym = asymmetry(s);
    if asym > tol * scale {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    Ok(())
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues descending.
pub fn symmetric_eigen(s: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    require_symmetric(s, Tolerances::default().symmetry)?;
    let n = s.nrows();
    let sym = (s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

/// `f(S) = V f(Lambda) V^T` for a symmetric positive semi-definite `S`.
///
/// Round-off negative eigenvalues are clamped to zero before `f` is applied.
pub fn psd_apply<F: Fn(f64) -> f64>(f: F, s: &Matrix) -> Result<Matrix> {
    let (values, vectors) = symmetric_eigen(s)?;
    let mut scaled = vectors.clone();
    for (j, &lambda) in values.iter().enumerate() {
        let fv = f(lambda.max(0.0));
        scaled.column_mut(j).scale_mut(fv);
    }
    let out = scaled * vectors.transpose();
    Ok((&out + out.transpose()) * 0.5)
}

/// 1-based inclusive slice `M[r0:r1, c0:c1]`. An empty range is written
/// `hi = lo - 1`.
pub fn submatrix(m: &Matrix, rows: (usize, usize), cols: (usize, usize)) -> Result<Matrix> {
    let check = |what: &'static str, (lo, hi): (usize, usize), len: usize| -> Result<()> {
        if lo == 0 || hi > len || hi + 1 < lo {
            return Err(Error::OutOfRange {
                what,
                detail: format!("[{lo}:{hi}] within 1..={len}"),
            });
        }
        Ok(())
    };
    check("rows", rows, m.nrows())?;
    check("cols", cols, m.ncols())?;
    let nr = rows.1 + 1 - rows.0;
    let nc = cols.1 + 1 - cols.0;
    Ok(m.view((rows.0 - 1, cols.0 - 1), (nr, nc)).into_owned())
}

/// Number of singular values above `rel * sigma_1`.
pub fn numerical_rank(m: &Matrix, rel: f64) -> Result<usize> {
    let s = singular_values(m)?;
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(s.iter().filter(|&&x| x > rel * top).count())
}

/// Orthonormal basis (as columns) of the numerical kernel of `k`.
pub fn null_space(k: &Matrix, rel: f64) -> Result<Matrix> {
    let n = k.ncols();
    if k.nrows() == 0 {
        return Ok(Matrix::identity(n, n));
    }
    let f = svd(k)?;
    let top = f.sigma.first().copied().unwrap_or(0.0);
    let rank = if top == 0.0 {
        0
    } else {
        f.sigma.iter().filter(|&&x| x > rel * top).count()
    };
    Ok(f.qp.columns(rank, n - rank).into_owned())
}

/// Nearest matrix with orthonormal columns (or rows, when wide): the
/// orthogonal polar factor `U V^T` of the thin SVD.
pub fn nearest_orthogonal(m: &Matrix) -> Result<Matrix> {
    let f = svd(m)?;
    let r = m.nrows().min(m.ncols());
    let u = f.u();
    Ok(u.columns(0, r) * f.qp.columns(0, r).transpose())
}
