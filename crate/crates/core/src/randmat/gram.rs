//! The expected Gram matrix `G = E(X^T X)` of a random matrix with a given
//! column profile, and the two-sided bounds on its spectrum.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::Result;
use crate::matcore::{operator_norm, symmetric_eigen, Matrix};

use super::profile::{check_s1, ColumnProfile, S1Report};

/// Default constant of the additive `c L / m` slack.
pub const DEFAULT_SLACK_C: f64 = 4.0;

/// `G = D (H + E U^T / m)` and its factors.
#[derive(Debug, Clone)]
pub struct ExpectedGram {
    pub g: Matrix,
    /// Diagonal of `D`: squared norms (or their expectations).
    pub d: Vec<f64>,
    /// Diagonal of `H`: `1 - |u_i|^2 / (m ||u_i||^2)`.
    pub h: Vec<f64>,
    /// `E = (xi_i)`.
    pub e: Vec<f64>,
    /// `U = (|u_i|)`.
    pub u: Vec<f64>,
    /// `Z = H + E U^T / m`.
    pub z: Matrix,
}

impl ExpectedGram {
    /// `||G - D Z||_max`.
    pub fn factorization_residual(&self) -> f64 {
        let dz = Matrix::from_diagonal(&DVector::from_column_slice(&self.d)) * &self.z;
        (&self.g - dz).abs().max()
    }

    /// Eigenvalues of `G` (its singular values), descending.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        Ok(symmetric_eigen(&self.g)?.0)
    }
}

/// `G_ii = ||u_i||^2`, `G_ij = |u_i| |u_j| / m`.
pub fn expected_gram(p: &ColumnProfile) -> Result<ExpectedGram> {
    p.validate()?;
    let k = p.k;
    let m = p.m as f64;
    let d = p.weights();
    let u = p.sizes.clone();
    let e = p.xi();
    let h: Vec<f64> = u.iter().zip(&d).map(|(s, w)| 1.0 - s * s / (m * w)).collect();
    let g = Matrix::from_fn(k, k, |i, j| if i == j { d[i] } else { u[i] * u[j] / m });
    let z = Matrix::from_fn(k, k, |i, j| {
        let rank_one = e[i] * u[j] / m;
        if i == j {
            h[i] + rank_one
        } else {
            rank_one
        }
    });
    Ok(ExpectedGram { g, d, h, e, u, z })
}

/// Bounds for one index `i` (1-based) of the spectrum of `G`.
#[derive(Debug, Clone, Serialize)]
pub struct SandwichRow {
    pub i: usize,
    /// `w_{tau(i)}`, the `i`-th largest weight.
    pub weight: f64,
    pub upper: f64,
    /// Lower bound without the slack term.
    pub lower_pure: f64,
    /// Lower bound with the `c L / m` slack.
    pub lower: f64,
    pub oracle: f64,
    pub contained: bool,
    pub contained_pure: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem3Report {
    pub s1: S1Report,
    pub delta: f64,
    pub rho: f64,
    pub slack_c: f64,
    /// `c L / m`.
    pub slack: f64,
    /// `||Z||` against `1 + k delta rho`.
    pub z_norm: f64,
    pub z_bound: f64,
    /// `||Z^{-1}||` against `1 + rho` (pure) and `1 + rho + c L / m`.
    pub z_inv_norm: f64,
    pub z_inv_bound_pure: f64,
    pub z_inv_bound: f64,
    pub rows: Vec<SandwichRow>,
}

impl Theorem3Report {
    pub fn all_contained(&self) -> bool {
        self.rows.iter().all(|r| r.contained)
    }
}

/// Per-index sandwich `(1 + rho + slack)^{-1} w_{tau(i)} <= sigma_i(G) <= (1 + k delta rho) w_{tau(i)}`.
///
/// In expected-norm mode the upper factor also carries the slack.
pub fn theorem3_bounds(p: &ColumnProfile, slack_c: f64) -> Result<Theorem3Report> {
    let eg = expected_gram(p)?;
    let stats = p.derived();
    let spectrum = eg.spectrum()?;
    let k = p.k as f64;
    let slack = slack_c * p.l() as f64 / p.m as f64;
    let up_factor = 1.0 + k * stats.delta * stats.rho + if p.expected_mode() { slack } else { 0.0 };
    let low_pure = 1.0 / (1.0 + stats.rho);
    let low = 1.0 / (1.0 + stats.rho + slack);
    let w = p.weights();
    let tol = 1e-12;
    let rows = stats
        .tau
        .iter()
        .enumerate()
        .map(|(idx, &col)| {
            let weight = w[col];
            let oracle = spectrum[idx];
            let upper = up_factor * weight;
            let scale = tol * weight.max(1.0);
            SandwichRow {
                i: idx + 1,
                weight,
                upper,
                lower_pure: low_pure * weight,
                lower: low * weight,
                oracle,
                contained: oracle <= upper + scale && oracle >= low * weight - scale,
                contained_pure: oracle <= upper + scale && oracle >= low_pure * weight - scale,
            }
        })
        .collect();
    let z_inv = eg.z.clone().try_inverse();
    Ok(Theorem3Report {
        s1: check_s1(p),
        delta: stats.delta,
        rho: stats.rho,
        slack_c,
        slack,
        z_norm: operator_norm(&eg.z),
        z_bound: 1.0 + k * stats.delta * stats.rho,
        z_inv_norm: z_inv.map_or(f64::INFINITY, |zi| operator_norm(&zi)),
        z_inv_bound_pure: 1.0 + stats.rho,
        z_inv_bound: 1.0 + stats.rho + slack,
        rows,
    })
}
