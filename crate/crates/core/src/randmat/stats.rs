//! Monte Carlo statistics of random columns and of their Gram matrices.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{symmetric_eigen, Matrix};

use super::gram::expected_gram;
use super::profile::ColumnProfile;
use super::samplers::{stream, ColumnModel, RandomColumnModel};

/// Running mean and variance (Welford), with a fourth central moment for
/// the standard error of the variance.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        let n1 = self.n;
        self.n += 1.0;
        let n = self.n;
        let delta = x - self.mean;
        let dn = delta / n;
        let dn2 = dn * dn;
        let term = delta * dn * n1;
        self.mean += dn;
        self.m4 += term * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * self.m2 - 4.0 * dn * self.m3;
        self.m3 += term * dn * (n - 2.0) - 3.0 * dn * self.m2;
        self.m2 += term;
    }

    fn variance(&self) -> f64 {
        if self.n > 1.0 {
            self.m2 / (self.n - 1.0)
        } else {
            0.0
        }
    }

    fn mean_se(&self) -> f64 {
        (self.variance() / self.n).sqrt()
    }

    fn variance_se(&self) -> f64 {
        let pop_var = self.m2 / self.n;
        let mu4 = self.m4 / self.n;
        ((mu4 - pop_var * pop_var).max(0.0) / self.n).sqrt()
    }
}

/// Empirical value against a formula, with its standard error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MomentCheck {
    pub empirical: f64,
    pub se: f64,
    pub expected: f64,
    /// `(empirical - expected) / se`; zero when both differences vanish.
    pub z: f64,
}

impl MomentCheck {
    fn new(empirical: f64, se: f64, expected: f64) -> Self {
        let diff = empirical - expected;
        let z = if diff.abs() <= 1e-12 * expected.abs().max(1.0) {
            0.0
        } else if se > 0.0 {
            diff / se
        } else {
            f64::INFINITY
        };
        Self {
            empirical,
            se,
            expected,
            z,
        }
    }

    pub fn within(&self, sigmas: f64) -> bool {
        self.z.abs() <= sigmas
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma13Report {
    pub m: usize,
    pub trials: usize,
    /// `E <x, y>` against `|x| |y| / m`.
    pub mean: MomentCheck,
    /// `Var <x, y>` against `(||x||^2 - |x|^2/m)(||y||^2 - |y|^2/m) / (m - 1)`.
    pub variance: MomentCheck,
    /// False when a norm is random and the formula uses `E ||x||^2`.
    pub fixed_norms: bool,
}

/// Inner products of independent draws from two column laws.
pub fn lemma13_stats(
    m: usize,
    x: ColumnModel,
    y: ColumnModel,
    trials: usize,
    seed: u64,
) -> Result<Lemma13Report> {
    if m < 2 || trials < 2 {
        return Err(Error::InvalidArgument(format!("need m >= 2 and trials >= 2, got {m}, {trials}")));
    }
    let mut acc = Moments::default();
    for t in 0..trials as u64 {
        let a = x.sample(m, &mut stream(seed, t, 0))?;
        let b = y.sample(m, &mut stream(seed, t, 1))?;
        acc.push(a.iter().zip(&b).map(|(p, q)| p * q).sum());
    }
    let mf = m as f64;
    let radial = |c: &ColumnModel| c.expected_sq_norm(m) - c.size().powi(2) / mf;
    Ok(Lemma13Report {
        m,
        trials,
        mean: MomentCheck::new(acc.mean, acc.mean_se(), x.size() * y.size() / mf),
        variance: MomentCheck::new(
            acc.variance(),
            acc.variance_se(),
            radial(&x) * radial(&y) / (mf - 1.0),
        ),
        fixed_norms: x.fixed_norm() && y.fixed_norm(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalGram {
    pub trials: usize,
    #[serde(skip)]
    pub mean: Matrix,
    #[serde(skip)]
    pub se: Matrix,
    /// `max |G_hat - G|`.
    pub max_abs_dev: f64,
    /// Largest deviation in standard errors.
    pub max_z: f64,
}

/// Average of `X^T X` over `trials` draws, compared entrywise with `expected`.
pub fn empirical_gram(model: &RandomColumnModel, expected: &Matrix, trials: usize) -> Result<EmpiricalGram> {
    let k = model.k();
    if expected.shape() != (k, k) || trials == 0 {
        return Err(Error::Dimension(format!(
            "expected Gram is {}x{} for k={k}, trials={trials}",
            expected.nrows(),
            expected.ncols()
        )));
    }
    let mut acc = vec![Moments::default(); k * k];
    for t in 0..trials as u64 {
        let x = model.sample(t)?;
        let g = x.transpose() * &x;
        for (a, v) in acc.iter_mut().zip(g.iter()) {
            a.push(*v);
        }
    }
    let mean = Matrix::from_iterator(k, k, acc.iter().map(|a| a.mean));
    let se = Matrix::from_iterator(k, k, acc.iter().map(|a| a.mean_se()));
    let mut max_abs_dev = 0.0f64;
    let mut max_z = 0.0f64;
    for ((m, s), e) in mean.iter().zip(se.iter()).zip(expected.iter()) {
        let d = (m - e).abs();
        max_abs_dev = max_abs_dev.max(d);
        let z = if d <= 1e-12 * e.abs().max(1.0) {
            0.0
        } else if *s > 0.0 {
            d / s
        } else {
            f64::INFINITY
        };
        max_z = max_z.max(z);
    }
    Ok(EmpiricalGram {
        trials,
        mean,
        se,
        max_abs_dev,
        max_z,
    })
}

/// Number of standard errors allowed for Monte Carlo noise in containment flags.
pub const MC_SIGMAS: f64 = 4.0;

#[derive(Debug, Clone, Serialize)]
pub struct FluctuationRow {
    pub i: usize,
    /// `sigma_i(G)`.
    pub sigma_g: f64,
    /// Empirical `E sigma_i^2(X)` and its standard error.
    pub mean_sq: f64,
    pub se: f64,
    pub within_frak_n: bool,
    pub within_r0: bool,
    pub within_constant: bool,
    /// Sandwich combining the profile bounds with the constant band.
    pub combined_lower: f64,
    pub combined_upper: f64,
    pub within_combined: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FluctuationReport {
    pub trials: usize,
    /// `sum_p ||r_p|| ||X'_p||_F`.
    pub frak_n: f64,
    /// `max_p ||r_p||`.
    pub r0: f64,
    /// `sqrt((k-1)/(m-1)) frak_n`.
    pub band_frak_n: f64,
    /// `(k-1)/sqrt(m-1) r0^2`.
    pub band_r0: f64,
    /// `sqrt((k-1)/(m-1)) c r0^2`.
    pub band_constant: f64,
    pub constant: f64,
    pub rows: Vec<FluctuationRow>,
    /// Smallest `sum_{j<=i} E sigma_j^2(X) - sum_{j<=i} sigma_j(G)` in standard errors.
    pub kyfan_head_worst_z: f64,
    /// Smallest `(1+rho+slack) sum_{j>i} sigma_j(G) - sum_{j>i} (E sigma_j(X))^2` in standard errors.
    pub kyfan_tail_worst_z: f64,
}

impl FluctuationReport {
    pub fn kyfan_holds(&self) -> bool {
        self.kyfan_head_worst_z >= -MC_SIGMAS && self.kyfan_tail_worst_z >= -MC_SIGMAS
    }
}

/// Fluctuation of `E sigma_i^2(X)` around `sigma_i(G)` measured by Monte Carlo.
///
/// `constant` is the unnamed constant of the sub-gaussian band (default 2);
/// `slack_c` scales the `L/m` slack of the profile bounds.
pub fn fluctuation_bounds(
    p: &ColumnProfile,
    model: &RandomColumnModel,
    trials: usize,
    constant: f64,
    slack_c: f64,
) -> Result<FluctuationReport> {
    let k = p.k;
    if model.k() != k || model.m != p.m || trials < 2 {
        return Err(Error::Dimension("model does not match profile".into()));
    }
    let m = p.m as f64;
    let kf = k as f64;
    let w = p.weights();
    let r_sq: Vec<f64> = w
        .iter()
        .zip(&p.sizes)
        .map(|(w, s)| (w - s * s / m).max(0.0))
        .collect();
    let total: f64 = r_sq.iter().sum();
    let frak_n: f64 = r_sq.iter().map(|r| r.sqrt() * (total - r).max(0.0).sqrt()).sum();
    let r0 = r_sq.iter().copied().fold(0.0, f64::max).sqrt();
    let scale = ((kf - 1.0) / (m - 1.0)).sqrt();
    let band_frak_n = scale * frak_n;
    let band_r0 = (kf - 1.0) / (m - 1.0).sqrt() * r0 * r0;
    let band_constant = scale * constant * r0 * r0;

    let eg = expected_gram(p)?;
    let sigma_g = eg.spectrum()?;
    let stats = p.derived();
    let slack = slack_c * p.l() as f64 / m;

    let mut per_index = vec![Moments::default(); k];
    let mut head = vec![Moments::default(); k];
    let mut tail_sv = vec![Moments::default(); k];
    for t in 0..trials as u64 {
        let x = model.sample(t)?;
        let (ev, _) = symmetric_eigen(&(x.transpose() * &x))?;
        let mut run = 0.0;
        for j in 0..k {
            let e = ev[j].max(0.0);
            per_index[j].push(e);
            run += e;
            head[j].push(run);
            tail_sv[j].push(e.sqrt());
        }
    }

    let mut head_worst = f64::INFINITY;
    let mut tail_worst = f64::INFINITY;
    let mut g_run = 0.0;
    for i in 0..k {
        g_run += sigma_g[i];
        let diff = head[i].mean - g_run;
        let se = head[i].mean_se();
        head_worst = head_worst.min(z_of(diff, se));
        if i + 1 < k {
            let g_tail: f64 = sigma_g[i + 1..].iter().sum();
            let e_tail: f64 = tail_sv[i + 1..].iter().map(|a| a.mean * a.mean).sum();
            let se_tail: f64 = tail_sv[i + 1..]
                .iter()
                .map(|a| (2.0 * a.mean * a.mean_se()).powi(2))
                .sum::<f64>()
                .sqrt();
            tail_worst = tail_worst.min(z_of((1.0 + stats.rho + slack) * g_tail - e_tail, se_tail));
        }
    }

    let up_factor = 1.0 + kf * stats.delta * stats.rho + slack;
    let low_factor = 1.0 / (1.0 + stats.rho + slack);
    let rows = (0..k)
        .map(|i| {
            let mean_sq = per_index[i].mean;
            let se = per_index[i].mean_se();
            let gap = (mean_sq - sigma_g[i]).abs();
            let allow = MC_SIGMAS * se;
            let weight = w[stats.tau[i]];
            let combined_upper = up_factor * weight + band_constant;
            let combined_lower = low_factor * weight - band_constant;
            FluctuationRow {
                i: i + 1,
                sigma_g: sigma_g[i],
                mean_sq,
                se,
                within_frak_n: gap <= band_frak_n + allow + 1e-12,
                within_r0: gap <= band_r0 + allow + 1e-12,
                within_constant: gap <= band_constant + allow + 1e-12,
                combined_lower,
                combined_upper,
                within_combined: mean_sq <= combined_upper + allow && mean_sq >= combined_lower - allow,
            }
        })
        .collect();

    Ok(FluctuationReport {
        trials,
        frak_n,
        r0,
        band_frak_n,
        band_r0,
        band_constant,
        constant,
        rows,
        kyfan_head_worst_z: head_worst,
        kyfan_tail_worst_z: tail_worst,
    })
}

fn z_of(margin: f64, se: f64) -> f64 {
    if se > 0.0 {
        margin / se
    } else if margin >= -1e-12 {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    }
}
