//! Perturbation bounds for the singular values of a block-partitioned `R`
//! when its bottom-right block `D` is dropped.
//!
//! Every bound is returned as a [`BoundReport`]: an interval claimed to
//! contain some singular value, together with that value computed directly
//! from an SVD so callers can see the slack.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{
    null_space, operator_norm, sigma_at, singular_values, submatrix, svd, BlockPartition, Matrix,
    SvdFactors,
};

/// Default relative threshold for numerical rank and kernels.
pub const RANK_REL: f64 = 1e-12;

/// An interval `[lower, upper]` claimed to contain `oracle`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub formula: String,
    pub i: usize,
    pub k: usize,
    pub lower: f64,
    pub upper: f64,
    pub oracle: Option<f64>,
    /// `min(oracle - lower, upper - oracle)`; negative means violated.
    pub slack: Option<f64>,
}

impl BoundReport {
    pub fn new(formula: &str, i: usize, k: usize, lower: f64, upper: f64, oracle: Option<f64>) -> Self {
        let slack = oracle.map(|o| (o - lower).min(upper - o));
        Self {
            formula: formula.to_string(),
            i,
            k,
            lower,
            upper,
            oracle,
            slack,
        }
    }

    /// True when the oracle (if any) lies within the interval up to `tol`.
    pub fn holds(&self, tol: f64) -> bool {
        self.slack.is_none_or(|s| s >= -tol)
    }
}

/// Singular values and norms shared by the bound routines.
struct Spectra {
    sigma_r: Vec<f64>,
    sigma_r0: Vec<f64>,
    d_norm: f64,
    b_norm: f64,
    c_norm: f64,
}

fn spectra(p: &BlockPartition) -> Result<Spectra> {
    Ok(Spectra {
        sigma_r: singular_values(p.base())?,
        sigma_r0: singular_values(p.zeroed().base())?,
        d_norm: operator_norm(&p.d()),
        b_norm: operator_norm(&p.b()),
        c_norm: operator_norm(&p.c()),
    })
}

fn check_index(i: usize, n: usize) -> Result<()> {
    if i == 0 || i > n {
        return Err(Error::InvalidArgument(format!("index i={i} outside 1..={n}")));
    }
    Ok(())
}

/// Best rank-`i` approximation from SVD factors.
fn truncation(f: &SvdFactors, i: usize) -> Matrix {
    let u = f.u();
    let r = i.min(f.sigma.len());
    let mut scaled = u.columns(0, r).into_owned();
    for j in 0..r {
        scaled.column_mut(j).scale_mut(f.sigma[j]);
    }
    scaled * f.qp.columns(0, r).transpose()
}

/// Weyl-type bounds on the rank-`i` truncation error:
/// `sigma_{i+1}(R)` within `||D||` of `sigma_{i+1}(R0)`, and within
/// `2||D||` of `||R - (R0)_i||`.
pub fn weyl_gap_bounds(p: &BlockPartition, i: usize) -> Result<Vec<BoundReport>> {
    check_index(i, p.n())?;
    let s = spectra(p)?;
    let k = p.k();
    let err_r = sigma_at(&s.sigma_r, i + 1);
    let err_r0 = sigma_at(&s.sigma_r0, i + 1);
    let f0 = svd(p.zeroed().base())?;
    let cross = operator_norm(&(p.base() - truncation(&f0, i)));
    Ok(vec![
        BoundReport::new(
            "weyl",
            i,
            k,
            (err_r0 - s.d_norm).max(0.0),
            err_r0 + s.d_norm,
            Some(err_r),
        ),
        BoundReport::new(
            "weyl_cross",
            i,
            k,
            (cross - 2.0 * s.d_norm).max(0.0),
            cross + 2.0 * s.d_norm,
            Some(err_r),
        ),
    ])
}

/// Bounds that follow from `rank(R0) <= 2k`: `sigma_{i+1}(R) <= ||D||` for
/// `i >= 2k`, `sigma_{k+1}(R0) <= min(||B||, ||C||)` and
/// `sigma_{k+1}(R) <= min(||B||, ||C||) + ||D||`.
pub fn small_rank_bounds(p: &BlockPartition, i: usize) -> Result<Vec<BoundReport>> {
    check_index(i, p.n())?;
    let s = spectra(p)?;
    let k = p.k();
    let band = s.b_norm.min(s.c_norm);
    let mut out = Vec::new();
    if i >= 2 * k {
        out.push(BoundReport::new(
            "rank_2k",
            i,
            k,
            0.0,
            s.d_norm,
            Some(sigma_at(&s.sigma_r, i + 1)),
        ));
    }
    out.push(BoundReport::new(
        "band_r0",
        k,
        k,
        0.0,
        band,
        Some(sigma_at(&s.sigma_r0, k + 1)),
    ));
    out.push(BoundReport::new(
        "band_r",
        k,
        k,
        0.0,
        band + s.d_norm,
        Some(sigma_at(&s.sigma_r, k + 1)),
    ));
    Ok(out)
}

/// Which slice achieved the minimum in `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `||D Q'[k+1:n, i:n]||`.
    Column,
    /// `||Q[i:m, k+1:m] D||`.
    Row,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MuQuantities {
    pub i: usize,
    pub k: usize,
    pub mu_r: f64,
    pub mu_r0: f64,
    pub mu_bar: f64,
    pub branch_r: Branch,
    pub branch_r0: Branch,
}

/// `min(||D Q'[k+1:n, i:n]||, ||Q[i:m, k+1:m] D||)` for the SVD factors of
/// one matrix; `D` is always the block removed from `R`.
fn slice_mu(f: &SvdFactors, d: &Matrix, i: usize, k: usize) -> Result<(f64, Branch)> {
    let m = f.q.nrows();
    let n = f.qp.nrows();
    let col = operator_norm(&(d * submatrix(&f.qp, (k + 1, n), (i, n))?));
    let row = operator_norm(&(submatrix(&f.q, (i, m), (k + 1, m))? * d));
    Ok(if col <= row {
        (col, Branch::Column)
    } else {
        (row, Branch::Row)
    })
}

/// The same slices taken from the `c2` / `c2'` corner blocks of the SVD
/// factors, valid for `i > k`.
fn corner_mu(f: &SvdFactors, d: &Matrix, i: usize, k: usize) -> Result<f64> {
    let m = f.q.nrows();
    let n = f.qp.nrows();
    let c2 = submatrix(&f.q, (k + 1, m), (k + 1, m))?;
    let c2p = submatrix(&f.qp, (k + 1, n), (k + 1, n))?;
    let c2_i = submatrix(&c2, (i - k, m - k), (1, m - k))?;
    let c2p_i = submatrix(&c2p, (1, n - k), (i - k, n - k))?;
    Ok(operator_norm(&(&c2_i * d)).min(operator_norm(&(d * &c2p_i))))
}

/// Slice bounds `|sigma_i(R) - sigma_i(R0)| <= mu_bar`, their corner-block
/// form for `i > k`, and the absolute form for `i > 2k`.
pub fn mu_bounds(p: &BlockPartition, i: usize) -> Result<(MuQuantities, Vec<BoundReport>)> {
    check_index(i, p.n())?;
    let k = p.k();
    let d = p.d();
    let r0 = p.zeroed();
    let f = svd(p.base())?;
    let f0 = svd(r0.base())?;
    let (mu_r, branch_r) = slice_mu(&f, &d, i, k)?;
    let (mu_r0, branch_r0) = slice_mu(&f0, &d, i, k)?;
    let mu_bar = mu_r.max(mu_r0);
    let s_r = sigma_at(&f.sigma, i);
    let s_r0 = sigma_at(&f0.sigma, i);
    let mut reports = vec![BoundReport::new(
        "mu",
        i,
        k,
        (s_r0 - mu_bar).max(0.0),
        s_r0 + mu_bar,
        Some(s_r),
    )];
    if i > k {
        let corner = corner_mu(&f, &d, i, k)?.max(corner_mu(&f0, &d, i, k)?);
        reports.push(BoundReport::new(
            "mu_corner",
            i,
            k,
            (s_r0 - corner).max(0.0),
            s_r0 + corner,
            Some(s_r),
        ));
        if i > 2 * k {
            reports.push(BoundReport::new("mu_absolute", i, k, 0.0, corner, Some(s_r)));
        }
    }
    Ok((
        MuQuantities {
            i,
            k,
            mu_r,
            mu_r0,
            mu_bar,
            branch_r,
            branch_r0,
        },
        reports,
    ))
}

/// `||D N||` with `N` an orthonormal basis of the numerical kernel of `K`.
pub fn kernel_restricted_norm(d: &Matrix, kmat: &Matrix, rank_rel: f64) -> Result<f64> {
    if d.ncols() != kmat.ncols() {
        return Err(Error::Dimension(format!(
            "D has {} columns, K has {}",
            d.ncols(),
            kmat.ncols()
        )));
    }
    let basis = null_space(kmat, rank_rel)?;
    if basis.ncols() == 0 {
        return Ok(0.0);
    }
    Ok(operator_norm(&(d * basis)))
}

/// Kernel-weighted correction terms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Theorem2Inputs {
    pub nu1: f64,
    pub nu2: f64,
    pub rho1: f64,
    pub rho2: f64,
    /// `||D restricted to ker B||`.
    pub d_on_ker_b: f64,
    /// `||D^T restricted to ker C^T||`.
    pub dt_on_ker_ct: f64,
    pub rank_b: usize,
    pub rank_c: usize,
    pub rank_rel: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Theorem2Report {
    pub inputs: Theorem2Inputs,
    /// `sigma_{k+1}(R0)` against the ratio-norm form.
    pub r0_ratio: BoundReport,
    /// `sigma_{k+1}(R0)` against `||B|| ||C|| / sqrt(sigma_k(A)^2 + max^2)`.
    pub r0_closed: BoundReport,
    /// `sigma_{k+1}(R)` with the kernel-weighted corrections.
    pub r: BoundReport,
}

fn numerical_rank_of(values: &[f64], rel: f64) -> usize {
    let top = values.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    values.iter().filter(|&&x| x > rel * top).count()
}

fn sine_like(x: f64) -> f64 {
    x / (1.0 + x * x).sqrt()
}

/// Block-rotation bounds on `sigma_{k+1}` of `R0` and `R`; `A` must be invertible.
pub fn theorem2_bounds(p: &BlockPartition, rank_rel: f64) -> Result<Theorem2Report> {
    let k = p.k();
    let (a, b, c, d) = (p.a(), p.b(), p.c(), p.d());
    let sa = singular_values(&a)?;
    let sk = sa[k - 1];
    if !(sk > crate::givens::SINGULAR_REL * sa[0]) {
        return Err(Error::Singular { sigma_min: sk });
    }
    let lu = a.clone().lu();
    let x = lu
        .solve(&b)
        .ok_or(Error::Singular { sigma_min: sk })?;
    let y = a
        .transpose()
        .lu()
        .solve(&c.transpose())
        .ok_or(Error::Singular { sigma_min: sk })?
        .transpose();
    let sx = singular_values(&x)?;
    let sy = singular_values(&y)?;
    let (nb, nc, nd) = (operator_norm(&b), operator_norm(&c), operator_norm(&d));
    let rank_b = numerical_rank_of(&singular_values(&b)?, rank_rel);
    let rank_c = numerical_rank_of(&singular_values(&c)?, rank_rel);
    let nu1 = if rank_b == 0 { 1.0 } else { 1.0 / (1.0 + sx[rank_b - 1].powi(2)).sqrt() };
    let nu2 = if rank_c == 0 { 1.0 } else { 1.0 / (1.0 + sy[rank_c - 1].powi(2)).sqrt() };
    let d_on_ker_b = kernel_restricted_norm(&d, &b, rank_rel)?;
    let dt_on_ker_ct = kernel_restricted_norm(&d.transpose(), &c.transpose(), rank_rel)?;
    let rho1 = nu1 * nd + (1.0 - nu1) * d_on_ker_b;
    let rho2 = nu2 * nd + (1.0 - nu2) * dt_on_ker_ct;

    let first = sine_like(sy[0]) * nb;
    let second = sine_like(sx[0]) * nc;
    let big = nb.max(nc);
    let denom = (sk * sk + big * big).sqrt();
    let closed = if denom > 0.0 { nb * nc / denom } else { 0.0 };

    let oracle_r0 = sigma_at(&singular_values(p.zeroed().base())?, k + 1);
    let oracle_r = sigma_at(&singular_values(p.base())?, k + 1);
    Ok(Theorem2Report {
        inputs: Theorem2Inputs {
            nu1,
            nu2,
            rho1,
            rho2,
            d_on_ker_b,
            dt_on_ker_ct,
            rank_b,
            rank_c,
            rank_rel,
        },
        r0_ratio: BoundReport::new("rotation_r0", k + 1, k, 0.0, first.min(second), Some(oracle_r0)),
        r0_closed: BoundReport::new("rotation_r0_closed", k + 1, k, 0.0, closed, Some(oracle_r0)),
        r: BoundReport::new(
            "rotation_r",
            k + 1,
            k,
            0.0,
            (first + rho2).min(second + rho1),
            Some(oracle_r),
        ),
    })
}

/// Square case `n = m = 2k` with `A`, `B`, `C` invertible.
pub fn corollary5(p: &BlockPartition) -> Result<BoundReport> {
    let k = p.k();
    if p.m() != 2 * k || p.n() != 2 * k {
        return Err(Error::InvalidArgument(format!(
            "needs m = n = 2k, got {}x{} with k={k}",
            p.m(),
            p.n()
        )));
    }
    let smallest = |x: &Matrix| -> Result<(f64, f64)> {
        let s = singular_values(x)?;
        Ok((s[0], s[s.len() - 1]))
    };
    let (na, sa) = smallest(&p.a())?;
    let (nb, sb) = smallest(&p.b())?;
    let (nc, sc) = smallest(&p.c())?;
    for (name, top, low) in [("A", na, sa), ("B", nb, sb), ("C", nc, sc)] {
        if !(low > crate::givens::SINGULAR_REL * top) {
            return Err(Error::InvalidArgument(format!("{name} is singular ({low:e})")));
        }
    }
    let nd = operator_norm(&p.d());
    let left = nb * nc / (sa * sa + nb * nb).sqrt() + na * nd / (na * na + sb * sb).sqrt();
    let right = nb * nc / (sa * sa + nc * nc).sqrt() + na * nd / (na * na + sc * sc).sqrt();
    let oracle = sigma_at(&singular_values(p.base())?, k + 1);
    Ok(BoundReport::new("rotation_square", k + 1, k, 0.0, left.min(right), Some(oracle)))
}

/// `sigma_2` of `[[c, -s], [s, 0]]` in closed form.
pub fn example1_sigma2_r0(s: f64) -> f64 {
    let h = (1.0 + s * s) / 2.0;
    (h - (h * h - s.powi(4)).sqrt()).sqrt()
}
