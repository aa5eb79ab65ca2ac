//! Partition planning for tall sparse non-negative matrices.
//!
//! Columns are sorted by descending norm and rows by descending size. For a
//! split `k` the feasibility index `i*` is the largest `i < k` with
//!
//! `||u_i|| >= sqrt(1 + sqrt(1 + 1/alpha)) * sqrt(|u_{k+1}| * r_max)`,
//!
//! where `r_max` is the largest row size of the columns after `k`. The rule
//! predicts from norms and sizes alone that block diagonalization at split
//! `k` recovers the top `i*` singular values; it is a guide, not a guarantee.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::Matrix;
use crate::randmat::moment_ratio;

/// `sqrt(1 + sqrt(1 + 1/alpha))`.
pub fn heuristic_factor(alpha: f64) -> f64 {
    (1.0 + (1.0 + 1.0 / alpha).sqrt()).sqrt()
}

/// Threshold on `||u_i||` in units of `|u_{k+1}|`, when the largest row size
/// of the right band is `row_to_column` times `|u_{k+1}|`.
pub fn threshold_ratio(alpha: f64, row_to_column: f64) -> f64 {
    heuristic_factor(alpha) * row_to_column.sqrt()
}

/// Largest `i < k` (1-based) with `norms[i-1] >= threshold`; `0` if none.
pub fn feasibility_index(norms: &[f64], k: usize, threshold: f64) -> usize {
    (1..k.min(norms.len() + 1))
        .rev()
        .find(|&i| norms[i - 1] >= threshold)
        .unwrap_or(0)
}

/// Evaluation of one candidate split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitCandidate {
    pub k: usize,
    pub feasibility_index: usize,
    pub threshold: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionPlan {
    /// Position `j` of the planned matrix holds original column `col_perm[j]`.
    pub col_perm: Vec<usize>,
    /// Position `i` of the planned matrix holds original row `row_perm[i]`.
    pub row_perm: Vec<usize>,
    pub k: usize,
    pub alpha: f64,
    /// `i*`, `0` when no index passes.
    pub feasibility_index: usize,
    pub threshold: f64,
    pub factor: f64,
    /// `|u_{k+1}|`.
    pub next_size: f64,
    /// Largest row size of the columns after `k`.
    pub max_row_size_right: f64,
    /// Column norms after sorting.
    pub col_norms: Vec<f64>,
    /// Moment ratio of `xi_i = |u_i| / ||u_i||^2` over the nonzero leading columns.
    pub rho_e: Option<f64>,
    /// `1 + m / (C k)` with `C` the largest leading column size.
    pub rho_e_bound: Option<f64>,
    /// `rho_e` exceeds its bound; planning proceeds regardless.
    pub rho_e_flag: bool,
    /// The split was chosen by scanning candidates.
    pub k_selected: bool,
    pub candidates: Vec<SplitCandidate>,
}

impl PartitionPlan {
    /// `R` with rows and columns in planned order.
    pub fn apply(&self, r: &Matrix) -> Result<Matrix> {
        if r.shape() != (self.row_perm.len(), self.col_perm.len()) {
            return Err(Error::Dimension(format!(
                "plan is for {}x{}, matrix is {}x{}",
                self.row_perm.len(),
                self.col_perm.len(),
                r.nrows(),
                r.ncols()
            )));
        }
        Ok(Matrix::from_fn(r.nrows(), r.ncols(), |i, j| r[(self.row_perm[i], self.col_perm[j])]))
    }

    pub fn is_identity(&self) -> bool {
        let id = |p: &[usize]| p.iter().enumerate().all(|(i, &v)| i == v);
        id(&self.col_perm) && id(&self.row_perm)
    }
}

fn descending_order(keys: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| keys[b].total_cmp(&keys[a]));
    idx
}

/// Candidate splits: a geometric grid of ratio 3/2 in `1..n`, plus `n - 1`.
pub fn split_grid(n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut x = 1.0f64;
    while (x.round() as usize) < n {
        let k = x.round() as usize;
        if out.last() != Some(&k) {
            out.push(k);
        }
        x *= 1.5;
    }
    if n >= 2 && out.last() != Some(&(n - 1)) {
        out.push(n - 1);
    }
    out
}

fn evaluate(sorted: &Matrix, norms: &[f64], k: usize, alpha: f64) -> (SplitCandidate, f64, f64) {
    let next_size = sorted.column(k).sum();
    let max_row = sorted
        .columns(k, sorted.ncols() - k)
        .row_iter()
        .map(|r| r.sum())
        .fold(0.0, f64::max);
    let threshold = heuristic_factor(alpha) * (next_size * max_row).sqrt();
    let cand = SplitCandidate {
        k,
        feasibility_index: feasibility_index(norms, k, threshold),
        threshold,
    };
    (cand, next_size, max_row)
}

/// Sorts `R` and picks the split. With `k = None` every grid split is
/// evaluated and the largest `i*` wins, ties going to the smaller split.
pub fn plan_partition(r: &Matrix, k: Option<usize>, alpha: f64) -> Result<PartitionPlan> {
    let (m, n) = r.shape();
    if n < 2 || m == 0 {
        return Err(Error::Dimension(format!("need at least 2 columns, got {m}x{n}")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} must be positive")));
    }
    crate::matcore::check_finite(r)?;
    for j in 0..n {
        for i in 0..m {
            if r[(i, j)] < 0.0 {
                return Err(Error::NegativeEntry { row: i, col: j, value: r[(i, j)] });
            }
        }
    }
    if let Some(k) = k {
        if k == 0 || k >= n {
            return Err(Error::InvalidArgument(format!("need 1 <= k < n = {n}, got {k}")));
        }
    }

    let col_norms_raw: Vec<f64> = r.column_iter().map(|c| c.norm()).collect();
    let col_perm = descending_order(&col_norms_raw);
    let row_sizes: Vec<f64> = r.row_iter().map(|row| row.sum()).collect();
    let row_perm = descending_order(&row_sizes);
    let sorted = Matrix::from_fn(m, n, |i, j| r[(row_perm[i], col_perm[j])]);
    let col_norms: Vec<f64> = col_perm.iter().map(|&j| col_norms_raw[j]).collect();

    let (chosen, candidates) = match k {
        Some(k) => (evaluate(&sorted, &col_norms, k, alpha), Vec::new()),
        None => {
            let evals: Vec<_> = split_grid(n)
                .into_iter()
                .map(|k| evaluate(&sorted, &col_norms, k, alpha))
                .collect();
            let best = evals
                .iter()
                .copied()
                .reduce(|best, e| if e.0.feasibility_index > best.0.feasibility_index { e } else { best })
                .expect("grid is non-empty for n >= 2");
            (best, evals.iter().map(|e| e.0).collect())
        }
    };
    let (cand, next_size, max_row) = chosen;

    let lead = sorted.columns(0, cand.k);
    let nonzero: Vec<(f64, f64)> = lead
        .column_iter()
        .map(|c| (c.sum(), c.norm_squared()))
        .filter(|&(s, _)| s > 0.0)
        .collect();
    let (rho_e, rho_e_bound) = if nonzero.is_empty() {
        (None, None)
    } else {
        let xi: Vec<f64> = nonzero.iter().map(|(s, w)| s / w).collect();
        let c = nonzero.iter().map(|p| p.0).fold(0.0, f64::max);
        (moment_ratio(&xi).ok(), Some(1.0 + m as f64 / (c * cand.k as f64)))
    };

    Ok(PartitionPlan {
        col_perm,
        row_perm,
        k: cand.k,
        alpha,
        feasibility_index: cand.feasibility_index,
        threshold: cand.threshold,
        factor: heuristic_factor(alpha),
        next_size,
        max_row_size_right: max_row,
        col_norms,
        rho_e_flag: matches!((rho_e, rho_e_bound), (Some(r), Some(b)) if r > b),
        rho_e,
        rho_e_bound,
        k_selected: k.is_none(),
        candidates,
    })
}
