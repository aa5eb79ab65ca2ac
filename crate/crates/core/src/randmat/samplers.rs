//! Random non-negative columns whose law is invariant under coordinate
//! permutations, with prescribed size (and optionally norm).

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::Matrix;

use super::profile::ColumnProfile;

/// Minimum acceptance rate of the fixed-norm sampler.
pub const ACCEPTANCE_FLOOR: f64 = 1e-4;
/// Attempts allowed for one fixed-norm draw.
pub const DRAW_BUDGET: usize = 1_000_000;

/// Independent generator for `(seed, trial, column)`.
pub fn stream(seed: u64, trial: u64, column: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((trial << 32) ^ column);
    rng
}

/// Indicator of a uniformly random `l`-subset of `0..m`.
pub fn sample_column_binary<R: Rng + ?Sized>(m: usize, l: usize, rng: &mut R) -> Result<Vec<f64>> {
    if l == 0 || l > m {
        return Err(Error::InvalidArgument(format!("need 1 <= l <= m, got l={l}, m={m}")));
    }
    let mut x = vec![0.0; m];
    for i in index::sample(rng, m, l) {
        x[i] = 1.0;
    }
    Ok(x)
}

/// Uniform point of the simplex `{x >= 0, sum x = s}`.
pub fn sample_column_fixed_size<R: Rng + ?Sized>(m: usize, s: f64, rng: &mut R) -> Result<Vec<f64>> {
    if m == 0 || !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidArgument(format!("need m >= 1 and s > 0, got m={m}, s={s}")));
    }
    let mut x: Vec<f64> = (0..m).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = x.iter().sum();
    for v in &mut x {
        *v *= s / total;
    }
    Ok(x)
}

/// Point of `{x >= 0, sum x = s, ||x|| = b}` obtained by radially moving a
/// uniform simplex point from the center `(s/m, ..., s/m)` to the sphere;
/// draws that leave the orthant are rejected.
pub fn sample_column_fixed_size_norm<R: Rng + ?Sized>(
    m: usize,
    s: f64,
    b: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if m == 0 || !(s > 0.0 && s.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!("m={m}, s={s}, b={b}")));
    }
    let mf = m as f64;
    let center = s / mf;
    let lo = s / mf.sqrt();
    let tol = 1e-12 * s;
    if b < lo - tol || b > s + tol {
        return Err(Error::Infeasible(format!("norm {b} outside [{lo}, {s}] for size {s}")));
    }
    let radius = (b * b - s * s / mf).max(0.0).sqrt();
    if radius <= 1e-15 * s {
        return Ok(vec![center; m]);
    }
    for _ in 0..DRAW_BUDGET {
        let mut x = sample_column_fixed_size(m, s, rng)?;
        let r2: f64 = x.iter().map(|v| (v - center).powi(2)).sum();
        if r2 == 0.0 {
            continue;
        }
        let t = radius / r2.sqrt();
        let mut ok = true;
        for v in &mut x {
            *v = center + t * (*v - center);
            if *v < 0.0 {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(x);
        }
    }
    Err(Error::Starvation {
        accepted: 0,
        attempts: DRAW_BUDGET,
    })
}

/// Law of one random column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColumnModel {
    /// Zero-one column with `l` ones.
    Binary { l: usize },
    /// Uniform on the simplex of size `s`.
    FixedSize { s: f64 },
    /// Size `s` and norm `b`.
    FixedSizeNorm { s: f64, b: f64 },
}

impl ColumnModel {
    pub fn sample<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> Result<Vec<f64>> {
        match *self {
            ColumnModel::Binary { l } => sample_column_binary(m, l, rng),
            ColumnModel::FixedSize { s } => sample_column_fixed_size(m, s, rng),
            ColumnModel::FixedSizeNorm { s, b } => sample_column_fixed_size_norm(m, s, b, rng),
        }
    }

    /// `|x|`.
    pub fn size(&self) -> f64 {
        match *self {
            ColumnModel::Binary { l } => l as f64,
            ColumnModel::FixedSize { s } | ColumnModel::FixedSizeNorm { s, .. } => s,
        }
    }

    /// `E ||x||^2`; for the simplex it is `2 s^2 / (m + 1)`.
    pub fn expected_sq_norm(&self, m: usize) -> f64 {
        match *self {
            ColumnModel::Binary { l } => l as f64,
            ColumnModel::FixedSize { s } => 2.0 * s * s / (m as f64 + 1.0),
            ColumnModel::FixedSizeNorm { b, .. } => b * b,
        }
    }

    /// The squared norm is the same for every draw.
    pub fn fixed_norm(&self) -> bool {
        !matches!(self, ColumnModel::FixedSize { .. })
    }
}

/// Independent columns over a common row count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomColumnModel {
    pub m: usize,
    pub columns: Vec<ColumnModel>,
    pub seed: u64,
}

impl RandomColumnModel {
    /// Binary columns when a column has integer size equal to its squared
    /// norm, fixed size and norm otherwise; uniform simplex columns in
    /// expected-norm mode.
    pub fn from_profile(p: &ColumnProfile, seed: u64) -> Result<Self> {
        p.validate()?;
        let columns = match &p.norms {
            Some(norms) => p
                .sizes
                .iter()
                .zip(norms)
                .map(|(&s, &b)| {
                    let binary = s.fract() == 0.0 && (b * b - s).abs() <= 1e-9 * s;
                    if binary {
                        ColumnModel::Binary { l: s as usize }
                    } else {
                        ColumnModel::FixedSizeNorm { s, b }
                    }
                })
                .collect(),
            None => p.sizes.iter().map(|&s| ColumnModel::FixedSize { s }).collect(),
        };
        Ok(Self {
            m: p.m,
            columns,
            seed,
        })
    }

    pub fn k(&self) -> usize {
        self.columns.len()
    }

    /// The `m x k` matrix of trial `trial`; column `j` uses `stream(seed, trial, j)`.
    pub fn sample(&self, trial: u64) -> Result<Matrix> {
        let mut x = Matrix::zeros(self.m, self.k());
        for (j, c) in self.columns.iter().enumerate() {
            let mut rng = stream(self.seed, trial, j as u64);
            let col = c.sample(self.m, &mut rng)?;
            x.column_mut(j).copy_from_slice(&col);
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn binary_edges() {
        let mut rng = stream(1, 0, 0);
        assert_eq!(sample_column_binary(5, 5, &mut rng).unwrap(), vec![1.0; 5]);
        let x = sample_column_binary(7, 1, &mut rng).unwrap();
        assert_eq!(x.iter().sum::<f64>(), 1.0);
        assert!(sample_column_binary(3, 4, &mut rng).is_err());
        assert!(sample_column_binary(3, 0, &mut rng).is_err());
    }

    #[test]
    fn simplex_exact_size() {
        let mut rng = stream(2, 0, 0);
        assert_eq!(sample_column_fixed_size(1, 3.5, &mut rng).unwrap(), vec![3.5]);
        for _ in 0..100 {
            let x = sample_column_fixed_size(9, 10.0, &mut rng).unwrap();
            assert!(x.iter().all(|&v| v >= 0.0));
            assert_abs_diff_eq!(x.iter().sum::<f64>(), 10.0, epsilon = 1e-12 * 10.0);
        }
    }

    #[test]
    fn fixed_norm_center_and_two_points() {
        let mut rng = stream(3, 0, 0);
        let x = sample_column_fixed_size_norm(4, 2.0, 1.0, &mut rng).unwrap();
        assert_eq!(x, vec![0.5; 4]);
        let b: f64 = 0.8;
        let disc = (2.0 * b * b - 1.0).sqrt();
        let (p, q) = ((1.0 + disc) / 2.0, (1.0 - disc) / 2.0);
        for _ in 0..50 {
            let x = sample_column_fixed_size_norm(2, 1.0, b, &mut rng).unwrap();
            let hit = (x[0] - p).abs() < 1e-12 || (x[0] - q).abs() < 1e-12;
            assert!(hit, "{x:?}");
        }
        for _ in 0..50 {
            let x = sample_column_fixed_size_norm(6, 3.0, 2.0, &mut rng).unwrap();
            assert_abs_diff_eq!(x.iter().sum::<f64>(), 3.0, epsilon = 1e-12 * 3.0);
            let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert_abs_diff_eq!(n, 2.0, epsilon = 1e-12 * 2.0);
        }
        assert!(matches!(
            sample_column_fixed_size_norm(4, 2.0, 2.5, &mut rng),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn vertex_norm_starves() {
        let mut rng = stream(4, 0, 0);
        let r = sample_column_fixed_size_norm(40, 1.0, 1.0, &mut rng);
        assert!(matches!(r, Err(Error::Starvation { .. })));
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let model = RandomColumnModel::from_profile(&ColumnProfile::binary(30, &[5, 7]).unwrap(), 9)
            .unwrap();
        assert_eq!(model.sample(3).unwrap(), model.sample(3).unwrap());
        assert_ne!(model.sample(3).unwrap(), model.sample(4).unwrap());
        assert!(matches!(model.columns[0], ColumnModel::Binary { l: 5 }));
    }
}
