//! Column profiles of non-negative matrices: sizes `|u_i|` (coordinate
//! sums), norms `||u_i||` or expected squared norms, and the statistics
//! derived from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::Matrix;

/// Sizes and norms of the `k` columns of an `m x k` non-negative matrix.
///
/// Exactly one of `norms` (fixed norms) and `expected_sq_norms` (fixed
/// sizes, random norms) is present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnProfile {
    pub m: usize,
    pub k: usize,
    pub sizes: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norms: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_sq_norms: Option<Vec<f64>>,
    /// Largest number of nonzeros in a column (`L`); `m` when unknown.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_support: Option<usize>,
}

fn positive(what: &str, v: &[f64]) -> Result<()> {
    if let Some((i, x)) = v.iter().enumerate().find(|(_, x)| !(x.is_finite() && **x > 0.0)) {
        return Err(Error::InvalidArgument(format!("{what}[{i}] = {x} must be positive")));
    }
    Ok(())
}

impl ColumnProfile {
    /// Fixed sizes and norms; each norm must lie in `[s/sqrt(m), s]`.
    pub fn with_norms(m: usize, sizes: Vec<f64>, norms: Vec<f64>) -> Result<Self> {
        let p = Self {
            m,
            k: sizes.len(),
            sizes,
            norms: Some(norms),
            expected_sq_norms: None,
            max_support: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Fixed sizes with expected squared norms `w_i`.
    pub fn with_expected_sq_norms(m: usize, sizes: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        let p = Self {
            m,
            k: sizes.len(),
            sizes,
            norms: None,
            expected_sq_norms: Some(w),
            max_support: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Zero-one columns with `l_i` ones each: `|u_i| = ||u_i||^2 = l_i`, `L = max l_i`.
    pub fn binary(m: usize, ones: &[usize]) -> Result<Self> {
        let sizes: Vec<f64> = ones.iter().map(|&l| l as f64).collect();
        let norms = sizes.iter().map(|s| s.sqrt()).collect();
        let mut p = Self::with_norms(m, sizes, norms)?;
        p.max_support = ones.iter().copied().max();
        p.validate()?;
        Ok(p)
    }

    pub fn with_max_support(mut self, l: usize) -> Result<Self> {
        self.max_support = Some(l);
        self.validate()?;
        Ok(self)
    }

    /// Profile of a realized matrix; entries above `1e-12` count as nonzero.
    pub fn from_matrix(x: &Matrix) -> Result<Self> {
        let m = x.nrows();
        for ((i, j), v) in x.iter().enumerate().map(|(p, v)| ((p % m, p / m), v)) {
            if *v < 0.0 {
                return Err(Error::NegativeEntry { row: i, col: j, value: *v });
            }
        }
        let sizes = x.column_iter().map(|c| c.sum()).collect();
        let norms = x.column_iter().map(|c| c.norm()).collect();
        let support = x
            .column_iter()
            .map(|c| c.iter().filter(|&&v| v > 1e-12).count())
            .max()
            .unwrap_or(0);
        Self::with_norms(m, sizes, norms)?.with_max_support(support)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.k == 0 {
            return Err(Error::InvalidArgument("empty profile".into()));
        }
        if self.sizes.len() != self.k {
            return Err(Error::Dimension(format!("{} sizes for k={}", self.sizes.len(), self.k)));
        }
        positive("sizes", &self.sizes)?;
        match (&self.norms, &self.expected_sq_norms) {
            (Some(n), None) => {
                if n.len() != self.k {
                    return Err(Error::Dimension(format!("{} norms for k={}", n.len(), self.k)));
                }
                positive("norms", n)?;
                let root_m = (self.m as f64).sqrt();
                for (i, (&s, &b)) in self.sizes.iter().zip(n).enumerate() {
                    let tol = 1e-12 * s;
                    if b > s + tol || b < s / root_m - tol {
                        return Err(Error::Infeasible(format!(
                            "column {i}: norm {b} outside [{}, {s}]",
                            s / root_m
                        )));
                    }
                }
            }
            (None, Some(w)) => {
                if w.len() != self.k {
                    return Err(Error::Dimension(format!("{} weights for k={}", w.len(), self.k)));
                }
                positive("expected_sq_norms", w)?;
            }
            _ => {
                return Err(Error::InvalidArgument(
                    "exactly one of norms and expected_sq_norms is required".into(),
                ))
            }
        }
        if let Some(l) = self.max_support {
            if l == 0 || l > self.m {
                return Err(Error::InvalidArgument(format!("max_support {l} outside 1..={}", self.m)));
            }
        }
        Ok(())
    }

    /// `||u_i||^2`, or `E ||u_i||^2` in expected-norm mode.
    pub fn weights(&self) -> Vec<f64> {
        match (&self.norms, &self.expected_sq_norms) {
            (Some(n), _) => n.iter().map(|x| x * x).collect(),
            (None, Some(w)) => w.clone(),
            (None, None) => Vec::new(),
        }
    }

    /// True when the squared norms are random and only their expectations are known.
    pub fn expected_mode(&self) -> bool {
        self.norms.is_none()
    }

    /// `L`, the largest column support.
    pub fn l(&self) -> usize {
        self.max_support.unwrap_or(self.m)
    }

    /// `C`, the largest column size.
    pub fn cmax(&self) -> f64 {
        self.sizes.iter().copied().fold(0.0, f64::max)
    }

    /// `xi_i = |u_i| / ||u_i||^2`.
    pub fn xi(&self) -> Vec<f64> {
        self.sizes.iter().zip(self.weights()).map(|(s, w)| s / w).collect()
    }

    pub fn derived(&self) -> DerivedStats {
        let xi = self.xi();
        let k = self.k as f64;
        let xi1 = xi.iter().sum::<f64>() / k;
        let xi2 = (xi.iter().map(|x| x * x).sum::<f64>() / k).sqrt();
        let w = self.weights();
        let mut tau: Vec<usize> = (0..self.k).collect();
        tau.sort_by(|&a, &b| w[b].total_cmp(&w[a]));
        DerivedStats {
            delta: density(self),
            rho: moment_ratio(&self.sizes).expect("validated sizes are positive"),
            xi1,
            xi2,
            tau,
        }
    }
}

/// Statistics of a profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivedStats {
    /// `sum |u_i| / (m k)`.
    pub delta: f64,
    /// Moment ratio of the sizes.
    pub rho: f64,
    /// Mean of `xi`.
    pub xi1: f64,
    /// Root mean square of `xi`, `||E|| / sqrt(k)`.
    pub xi2: f64,
    /// Column order by descending squared norm (or expected squared norm).
    pub tau: Vec<usize>,
}

/// Average entry mass `sum |u_i| / (m k)`.
pub fn density(p: &ColumnProfile) -> f64 {
    p.sizes.iter().sum::<f64>() / (p.m as f64 * p.k as f64)
}

/// Density of the sub-matrix `X[rows, cols]`.
pub fn submatrix_density(x: &Matrix, rows: &[usize], cols: &[usize]) -> Result<f64> {
    if rows.is_empty() || cols.is_empty() {
        return Err(Error::InvalidArgument("empty index set".into()));
    }
    let mut total = 0.0;
    for &j in cols {
        for &i in rows {
            if i >= x.nrows() || j >= x.ncols() {
                return Err(Error::OutOfRange {
                    what: "index",
                    detail: format!("({i}, {j}) in {}x{}", x.nrows(), x.ncols()),
                });
            }
            total += x[(i, j)];
        }
    }
    Ok(total / (rows.len() * cols.len()) as f64)
}

/// `sqrt(mean of squares) / mean` of a positive sequence.
pub fn moment_ratio(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("empty sequence".into()));
    }
    positive("values", values)?;
    let t = values.len() as f64;
    let mean = values.iter().sum::<f64>() / t;
    let rms = (values.iter().map(|v| v * v).sum::<f64>() / t).sqrt();
    Ok((rms / mean).max(1.0))
}

/// One named condition with its margin (`>= 0` means satisfied).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub passed: bool,
    pub margin: f64,
}

impl ConditionCheck {
    fn new(name: &'static str, margin: f64) -> Self {
        Self {
            name,
            passed: margin >= -1e-12 * margin.abs().max(1.0),
            margin,
        }
    }
}

/// Structural conditions on sizes and norms, plus their stated consequences.
#[derive(Debug, Clone, Serialize)]
pub struct S1Report {
    /// `min_i (||u_i||^2 - |u_i|)`.
    pub norm_exceeds_size: ConditionCheck,
    /// `m - C`.
    pub size_within_rows: ConditionCheck,
    /// `1 + m/(C k) - rho(E)`.
    pub xi_moment_ratio: ConditionCheck,
    /// `1 - max xi_i`.
    pub xi_at_most_one: ConditionCheck,
    /// `sqrt(k) - ||E||`.
    pub e_norm: ConditionCheck,
    /// `L/m - max |u_i|^2 / (m ||u_i||^2)`.
    pub support_ratio: ConditionCheck,
    /// `m - sum (Xi2 - xi_i) |u_i|`.
    pub weighted_sum: ConditionCheck,
}

impl S1Report {
    /// The three defining conditions hold.
    pub fn passed(&self) -> bool {
        self.norm_exceeds_size.passed && self.size_within_rows.passed && self.xi_moment_ratio.passed
    }

    pub fn consequences_hold(&self) -> bool {
        self.xi_at_most_one.passed
            && self.e_norm.passed
            && self.support_ratio.passed
            && self.weighted_sum.passed
    }
}

pub fn check_s1(p: &ColumnProfile) -> S1Report {
    let w = p.weights();
    let xi = p.xi();
    let d = p.derived();
    let m = p.m as f64;
    let k = p.k as f64;
    let c = p.cmax();
    let e_norm = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
    let rho_e = moment_ratio(&xi).unwrap_or(f64::INFINITY);
    let worst_support = p
        .sizes
        .iter()
        .zip(&w)
        .map(|(s, w)| s * s / (m * w))
        .fold(0.0, f64::max);
    let weighted: f64 = xi.iter().zip(&p.sizes).map(|(x, s)| (d.xi2 - x) * s).sum();
    S1Report {
        norm_exceeds_size: ConditionCheck::new(
            "norm_exceeds_size",
            w.iter().zip(&p.sizes).map(|(w, s)| w - s).fold(f64::INFINITY, f64::min),
        ),
        size_within_rows: ConditionCheck::new("size_within_rows", m - c),
        xi_moment_ratio: ConditionCheck::new("xi_moment_ratio", 1.0 + m / (c * k) - rho_e),
        xi_at_most_one: ConditionCheck::new(
            "xi_at_most_one",
            1.0 - xi.iter().copied().fold(0.0, f64::max),
        ),
        e_norm: ConditionCheck::new("e_norm", k.sqrt() - e_norm),
        support_ratio: ConditionCheck::new("support_ratio", p.l() as f64 / m - worst_support),
        weighted_sum: ConditionCheck::new("weighted_sum", m - weighted),
    }
}
