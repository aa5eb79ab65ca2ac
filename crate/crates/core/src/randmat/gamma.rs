//! Column sizes drawn from a left-truncated gamma law, and the spectrum
//! bounds for expected Gram matrices built from such sizes.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::gram::{expected_gram, SandwichRow};
use super::profile::{moment_ratio, ColumnProfile};
use super::samplers::stream;

/// Gamma law with shape `alpha`, rate `beta`, conditioned on `t >= a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaSpec {
    pub alpha: f64,
    pub beta: f64,
    #[serde(default = "default_a")]
    pub a: f64,
}

fn default_a() -> f64 {
    1.0
}

impl GammaSpec {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let s = Self { alpha, beta, a: 1.0 };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 1.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("alpha = {} must be >= 1", self.alpha)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidArgument(format!("beta = {} must be > 0", self.beta)));
        }
        if !(self.a >= 0.0 && self.a.is_finite()) {
            return Err(Error::InvalidArgument(format!("a = {} must be >= 0", self.a)));
        }
        Ok(())
    }

    /// Limit of the moment ratio for small `beta`: `sqrt(1 + 1/alpha)`.
    pub fn limiting_moment_ratio(&self) -> f64 {
        (1.0 + 1.0 / self.alpha).sqrt()
    }
}

/// `k` independent draws, by rejection from the untruncated law.
pub fn sample_sizes_truncated_gamma<R: Rng + ?Sized>(
    k: usize,
    spec: &GammaSpec,
    rng: &mut R,
) -> Result<Vec<f64>> {
    spec.validate()?;
    let g = Gamma::new(spec.alpha, 1.0 / spec.beta)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut out = Vec::with_capacity(k);
    let mut attempts = 0usize;
    while out.len() < k {
        attempts += 1;
        if attempts > 1_000 * k.max(1_000) {
            return Err(Error::Starvation {
                accepted: out.len(),
                attempts,
            });
        }
        let t: f64 = g.sample(rng);
        if t >= spec.a {
            out.push(t);
        }
    }
    Ok(out)
}

/// Zero-one profile whose column `i` has `round(size_i)` ones (clamped to `1..=m`).
pub fn binarized_profile(m: usize, sizes: &[f64]) -> Result<ColumnProfile> {
    let ones: Vec<usize> = sizes
        .iter()
        .map(|s| (s.round() as usize).clamp(1, m))
        .collect();
    ColumnProfile::binary(m, &ones)
}

#[derive(Debug, Clone, Serialize)]
pub struct Corollary10Report {
    /// `1/k <= L/m`.
    pub support_condition: bool,
    /// `a = 1`, `alpha >= 1`, `beta <= 1/sqrt(k)`.
    pub spec_condition: bool,
    pub slack: f64,
    pub upper_factor: f64,
    pub lower_factor: f64,
    /// Moment ratio of the realized sizes.
    pub rho: f64,
    pub rows: Vec<SandwichRow>,
}

impl Corollary10Report {
    pub fn preconditions_hold(&self) -> bool {
        self.support_condition && self.spec_condition
    }

    pub fn all_contained(&self) -> bool {
        self.rows.iter().all(|r| r.contained)
    }
}

/// Sandwich `(1 + sqrt(1+1/alpha) + slack)^{-1} w <= sigma_i(G) <= (1 + k/(m beta) sqrt(alpha(alpha+1)) + slack) w`.
///
/// Failed preconditions are flagged; the bounds are still reported.
pub fn corollary10_bounds(p: &ColumnProfile, spec: &GammaSpec, slack_c: f64) -> Result<Corollary10Report> {
    spec.validate()?;
    let eg = expected_gram(p)?;
    let spectrum = eg.spectrum()?;
    let stats = p.derived();
    let (m, k) = (p.m as f64, p.k as f64);
    let l = p.l() as f64;
    let slack = slack_c * l / m;
    let upper_factor = 1.0 + k / (m * spec.beta) * (spec.alpha * (spec.alpha + 1.0)).sqrt() + slack;
    let lower_factor = 1.0 / (1.0 + spec.limiting_moment_ratio() + slack);
    let pure_lower = 1.0 / (1.0 + spec.limiting_moment_ratio());
    let w = p.weights();
    let rows = stats
        .tau
        .iter()
        .enumerate()
        .map(|(idx, &col)| {
            let weight = w[col];
            let oracle = spectrum[idx];
            let tol = 1e-12 * weight.max(1.0);
            let upper = upper_factor * weight;
            SandwichRow {
                i: idx + 1,
                weight,
                upper,
                lower_pure: pure_lower * weight,
                lower: lower_factor * weight,
                oracle,
                contained: oracle <= upper + tol && oracle >= lower_factor * weight - tol,
                contained_pure: oracle <= upper + tol && oracle >= pure_lower * weight - tol,
            }
        })
        .collect();
    Ok(Corollary10Report {
        support_condition: 1.0 / k <= l / m,
        spec_condition: spec.a == 1.0 && spec.alpha >= 1.0 && spec.beta <= 1.0 / k.sqrt(),
        slack,
        upper_factor,
        lower_factor,
        rho: moment_ratio(&p.sizes)?,
        rows,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ResampleSummary {
    pub resamples: usize,
    /// Fraction of resamples with every index contained.
    pub containment_fraction: f64,
    /// Fraction of resamples meeting both preconditions.
    pub precondition_fraction: f64,
    /// Mean density over resamples, its standard error, and `alpha / (m beta)`.
    pub mean_density: f64,
    pub density_se: f64,
    pub expected_density: f64,
}

/// Repeats [`corollary10_bounds`] over independent size vectors, each
/// rounded to a zero-one profile.
pub fn corollary10_resample(
    m: usize,
    k: usize,
    spec: &GammaSpec,
    resamples: usize,
    seed: u64,
    slack_c: f64,
) -> Result<ResampleSummary> {
    if resamples == 0 {
        return Err(Error::InvalidArgument("resamples must be positive".into()));
    }
    let mut hits = 0usize;
    let mut pre = 0usize;
    let mut dens = Vec::with_capacity(resamples);
    for r in 0..resamples as u64 {
        let sizes = sample_sizes_truncated_gamma(k, spec, &mut stream(seed, r, 0))?;
        dens.push(sizes.iter().sum::<f64>() / (m * k) as f64);
        let p = binarized_profile(m, &sizes)?;
        let rep = corollary10_bounds(&p, spec, slack_c)?;
        hits += usize::from(rep.all_contained());
        pre += usize::from(rep.preconditions_hold());
    }
    let n = resamples as f64;
    let mean = dens.iter().sum::<f64>() / n;
    let var = if resamples > 1 {
        dens.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(ResampleSummary {
        resamples,
        containment_fraction: hits as f64 / n,
        precondition_fraction: pre as f64 / n,
        mean_density: mean,
        density_se: (var / n).sqrt(),
        expected_density: spec.alpha / (m as f64 * spec.beta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_respected() {
        let spec = GammaSpec::new(2.0, 0.5).unwrap();
        let s = sample_sizes_truncated_gamma(500, &spec, &mut stream(1, 0, 0)).unwrap();
        assert_eq!(s.len(), 500);
        assert!(s.iter().all(|&t| t >= 1.0));
        assert!(GammaSpec::new(0.5, 1.0).is_err());
        assert!(GammaSpec::new(1.0, 0.0).is_err());
    }

    #[test]
    fn single_column_is_contained() {
        let spec = GammaSpec::new(1.0, 0.1).unwrap();
        let p = binarized_profile(100, &[7.4]).unwrap();
        assert_eq!(p.sizes, vec![7.0]);
        let r = corollary10_bounds(&p, &spec, 4.0).unwrap();
        assert!(r.all_contained());
    }

    #[test]
    fn binarized_sizes_are_clamped() {
        let p = binarized_profile(10, &[0.2, 30.0]).unwrap();
        assert_eq!(p.sizes, vec![1.0, 10.0]);
    }
}
