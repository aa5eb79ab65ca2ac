//! Self-check harness behind `blocksvd verify`.
//!
//! Every suite draws its instances from `stream(seed, suite, trial)`, so a
//! report depends only on `(suite, seed, trials)` and serializes to the same
//! bytes on every run. Margins are normalized so that a check passes when
//! its margin is at least `-tol`. Checks marked `asserted: false` are
//! reported but do not fail the suite.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::approx::{algorithm2, synthetic_sparse, SyntheticSpec};
use crate::blockdiag::{
    block_diagonalize, check_lemma11, kyfan_column_bounds, top_singular_values, BlockDiagOptions, CheckItem,
};
use crate::bounds::{corollary5, example1_sigma2_r0, mu_bounds, small_rank_bounds, theorem2_bounds, weyl_gap_bounds, BoundReport, RANK_REL};
use crate::error::{Error, Result};
use crate::givens::{block_rotation_decompose, build_left_rotation, build_right_rotation, rotation_weight};
use crate::matcore::{
    operator_norm, orthogonality_defect, psd_apply, schur_test_bound, singular_values, svd, symmetric_eigen,
    BlockPartition, Matrix,
};
use crate::plan::{feasibility_index, plan_partition, threshold_ratio};
use crate::randmat::{
    check_s1, corollary10_resample, empirical_gram, expected_gram, fluctuation_bounds, lemma13_stats, moment_ratio,
    sample_sizes_truncated_gamma, stream, theorem3_bounds, ColumnModel, ColumnProfile, GammaSpec,
    RandomColumnModel, DEFAULT_SLACK_C,
};

/// Suite names accepted by [`verify`], in the order `all` runs them.
pub const SUITES: [&str; 8] = [
    "matcore",
    "givens",
    "blockdiag",
    "bounds",
    "theorem3",
    "corollaries",
    "gamma",
    "pipeline",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Random instances (or Monte Carlo draws) per check family.
    pub trials: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { seed: 7, trials: 200 }
    }
}

/// A family of checks of one inequality.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub asserted: bool,
    pub checks: usize,
    pub violations: usize,
    /// Smallest normalized margin seen; `null` when no check ran.
    pub worst_margin: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            asserted: true,
            checks: 0,
            violations: 0,
            worst_margin: f64::INFINITY,
            passed: true,
        }
    }

    fn advisory(name: &str) -> Self {
        Self {
            asserted: false,
            ..Self::new(name)
        }
    }

    fn margin(&mut self, margin: f64, tol: f64) {
        self.checks += 1;
        self.worst_margin = self.worst_margin.min(margin);
        if margin.is_nan() || margin < -tol {
            self.violations += 1;
            self.passed = false;
        }
    }

    fn holds(&mut self, ok: bool) {
        self.margin(if ok { 0.0 } else { -1.0 }, 0.0);
    }

    fn bound(&mut self, b: &BoundReport, tol: f64) {
        self.margin(b.slack.unwrap_or(f64::INFINITY), tol);
    }

    fn absorb(&mut self, item: &CheckItem) {
        self.checks += item.checks;
        self.violations += item.violations;
        self.worst_margin = self.worst_margin.min(item.worst_margin);
        self.passed = self.violations == 0;
    }

    fn counts(&self) -> bool {
        self.passed || !self.asserted
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

/// Runs one suite, or every suite for `"all"`.
pub fn verify(suite: &str, cfg: &VerifyConfig) -> Result<VerifyReport> {
    let names: Vec<&str> = match suite {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown suite '{other}'; expected one of {} or all",
                SUITES.join(", ")
            )))
        }
    };
    if cfg.trials < 2 {
        return Err(Error::InvalidArgument("trials must be at least 2".into()));
    }
    let mut suites = Vec::with_capacity(names.len());
    for name in names {
        let checks = match name {
            "matcore" => suite_matcore(cfg)?,
            "givens" => suite_givens(cfg)?,
            "blockdiag" => suite_blockdiag(cfg)?,
            "bounds" => suite_bounds(cfg)?,
            "theorem3" => suite_theorem3(cfg)?,
            "corollaries" => suite_corollaries(cfg)?,
            "gamma" => suite_gamma(cfg)?,
            _ => suite_pipeline(cfg)?,
        };
        suites.push(SuiteReport {
            suite: name.to_string(),
            passed: checks.iter().all(Check::counts),
            checks,
        });
    }
    Ok(VerifyReport {
        suite: suite.to_string(),
        seed: cfg.seed,
        trials: cfg.trials,
        passed: suites.iter().all(|s| s.passed),
        suites,
    })
}

fn suite_rng(cfg: &VerifyConfig, suite: u64, trial: usize) -> ChaCha8Rng {
    stream(cfg.seed, suite, trial as u64)
}

fn uniform(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Matrix {
    Matrix::from_fn(m, n, |_, _| rng.random_range(-1.0..=1.0))
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn suite_matcore(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut residual = Check::new("svd_residual");
    let mut orth = Check::new("svd_orthogonality");
    let mut lemma1 = Check::new("psd_function_reverses_order");
    let mut schur = Check::new("schur_test_dominates_norm");
    let mut lemma4 = Check::new("psd_sum_eigenvalue_floor");
    let mut weyl = Check::new("weyl_additive");
    for t in 0..cfg.trials {
        let mut rng = suite_rng(cfg, 1, t);
        let (m, n) = (rng.random_range(1..=50), rng.random_range(1..=30));
        let a = uniform(&mut rng, m, n);
        let f = svd(&a)?;
        let dim = m.max(n) as f64;
        residual.margin(1e-10 * dim - f.residual(&a), 0.0);
        orth.margin(1e-12 * dim - f.orthogonality(), 0.0);

        let s = rng.random_range(1..=8);
        let x = uniform(&mut rng, s + 2, s);
        let psd = x.transpose() * &x;
        let (ev, _) = symmetric_eigen(&psd)?;
        let g = |t: f64| 1.0 / (1.0 + t.max(0.0)).sqrt();
        let (fv, _) = symmetric_eigen(&psd_apply(g, &psd)?)?;
        let expect: Vec<f64> = ev.iter().rev().map(|&t| g(t)).collect();
        lemma1.margin(1e-10 - max_gap(&fv, &expect), 0.0);

        let op = operator_norm(&a);
        schur.margin((schur_test_bound(&a) - op) / op.max(f64::MIN_POSITIVE), 1e-12);

        let y = uniform(&mut rng, s + 1, s);
        let psd2 = y.transpose() * &y;
        let (e_sum, _) = symmetric_eigen(&(&psd + &psd2))?;
        let (e2, _) = symmetric_eigen(&psd2)?;
        let floor = e2[e2.len() - 1];
        for (lhs, base) in e_sum.iter().zip(&ev) {
            lemma4.margin(lhs - (base + floor), 1e-10);
        }

        let pert = uniform(&mut rng, m, n) * rng.random_range(0.0..1.0);
        let sx = singular_values(&a)?;
        let sxy = singular_values(&(&a + &pert))?;
        let top = operator_norm(&pert);
        for (p, q) in sxy.iter().zip(&sx) {
            weyl.margin(top - (p - q).abs(), 1e-10);
        }
    }
    Ok(vec![residual, orth, lemma1, schur, lemma4, weyl])
}

/// Random partition with `m <= 40`, `n <= 30`, `k <= 8`, entries in `[-1, 1]`.
fn random_partition(rng: &mut ChaCha8Rng) -> Result<BlockPartition> {
    let n = rng.random_range(2..=30);
    let m = rng.random_range(n..=40);
    let k = rng.random_range(1..=8.min(n - 1));
    BlockPartition::new(uniform(rng, m, n), k)
}

fn suite_givens(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut orth = Check::new("rotation_orthogonality");
    let mut zero = Check::new("block_annihilated");
    let mut spectrum = Check::new("spectrum_preserved");
    let mut top_left = Check::new("left_rotation_top_block_spectrum");
    let mut cos = Check::new("cosine_invertible");
    let mut weight = Check::new("weight_matches_decomposition");
    let mut singular = Check::advisory("singular_leading_block_skipped");
    for t in 0..cfg.trials {
        let mut rng = suite_rng(cfg, 2, t);
        let p = random_partition(&mut rng)?;
        let (r, k) = (p.base(), p.k());
        let (m, n) = (p.m(), p.n());
        let (gl, gr) = match (build_left_rotation(&p), build_right_rotation(&p)) {
            (Ok(l), Ok(rr)) => (l, rr),
            (Err(Error::Singular { .. }), _) | (_, Err(Error::Singular { .. })) => {
                singular.holds(false);
                continue;
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        let scale = operator_norm(r);
        orth.margin(1e-11 * n as f64 - orthogonality_defect(&gr.matrix()), 0.0);
        orth.margin(1e-11 * m as f64 - orthogonality_defect(&gl.matrix()), 0.0);
        let left = gl.apply(r)?;
        let right = gr.apply(r)?;
        zero.margin(1e-10 - left.view((k, 0), (m - k, k)).amax() / scale, 0.0);
        zero.margin(1e-10 - right.view((0, k), (k, n - k)).amax() / scale, 0.0);
        let both = gr.apply(&left)?;
        spectrum.margin(1e-10 - max_gap(&singular_values(r)?, &singular_values(&both)?) / scale, 0.0);
        let band = singular_values(&p.left_band())?;
        let tl = singular_values(&left.view((0, 0), (k, k)).into_owned())?;
        top_left.margin(1e-10 - max_gap(&band, &tl) / scale, 0.0);
        let trig = gr.trig()?;
        let sv = singular_values(&trig.cos_ba)?;
        cos.holds(sv[sv.len() - 1] > 0.0);
        if 2 * k <= n {
            let f = block_rotation_decompose(&gr.matrix(), k)?;
            if let Some(omega) = f.omega() {
                weight.margin(1e-10 - (omega - rotation_weight(&gr).omega).abs(), 0.0);
            }
        }
    }
    Ok(vec![orth, zero, spectrum, top_left, cos, weight, singular])
}

const SHAPES: [(usize, usize, usize); 5] = [(30, 10, 3), (20, 12, 4), (12, 8, 2), (40, 30, 8), (16, 16, 5)];

/// Uniform entries with the first `k` columns scaled by 10.
fn gapped_instance(rng: &mut ChaCha8Rng, t: usize) -> Result<BlockPartition> {
    let (m, n, k) = SHAPES[t % SHAPES.len()];
    let mut r = uniform(rng, m, n);
    r.columns_mut(0, k).scale_mut(10.0);
    BlockPartition::new(r, k)
}

fn suite_blockdiag(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let opts = BlockDiagOptions::default();
    let mut converged = Check::new("converged_within_budget");
    let mut spectrum = Check::new("spectrum_of_limit_blocks");
    let mut reconstruct = Check::new("factors_reconstruct_input");
    let mut monotone = Check::new("leading_block_monotone");
    let mut first = Check::new("first_step_structure");
    let mut band = Check::new("right_band_preserved");
    let mut d_stated = Check::advisory("contraction_d_stated_factor");
    let mut offdiag = Check::new("contraction_offdiagonal");
    let mut d_exact = Check::new("contraction_d_exact_cosine");
    let mut gap = Check::new("gap_persists");
    let mut certificate = Check::new("certified_top_values");
    let mut kyfan = Check::new("column_norm_majorization");
    let runs = cfg.trials.min(500);
    for t in 0..runs {
        let mut rng = suite_rng(cfg, 3, t);
        let p = gapped_instance(&mut rng, t)?;
        let scale = operator_norm(p.base());
        let res = block_diagonalize(&p, &opts)?;
        converged.holds(res.converged());
        let oracle = singular_values(p.base())?;
        spectrum.margin(1e-9 - max_gap(&res.spectrum()?, &oracle) / scale, 0.0);
        if let Some(back) = res.reconstruct() {
            reconstruct.margin(1e-9 - (back - p.base()).amax() / scale, 0.0);
        }
        let report = check_lemma11(&res.trace, 1e-9);
        monotone.absorb(&report.monotone);
        first.absorb(&report.first_step);
        band.absorb(&report.right_band);
        d_stated.absorb(&report.contraction_d);
        offdiag.absorb(&report.contraction_offdiag);
        d_exact.absorb(&report.contraction_d_exact);
        gap.absorb(&report.gap);
        let top = top_singular_values(&p, p.k(), &opts)?;
        if top.certified {
            certificate.margin(1e-8 - max_gap(&top.values, &oracle) / scale, 0.0);
        }
        let y = p.base();
        for i in 1..=y.ncols() {
            let ky = kyfan_column_bounds(y, i)?;
            let s = scale * scale;
            kyfan.margin(ky.head_margin.min(ky.tail_margin) / s, 1e-12);
        }
    }
    let golden = BlockPartition::new(Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 0.0]), 1)?;
    let top = top_singular_values(&golden, 1, &opts)?;
    certificate.holds(top.certified);
    certificate.margin(1e-12 - (top.values[0] - (1.0 + 5f64.sqrt()) / 2.0).abs(), 0.0);
    Ok(vec![
        converged,
        spectrum,
        reconstruct,
        monotone,
        first,
        band,
        d_stated,
        offdiag,
        d_exact,
        gap,
        certificate,
        kyfan,
    ])
}

fn suite_bounds(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let tol = 1e-10;
    let mut weyl = Check::new("weyl_bounds");
    let mut rank = Check::new("small_rank_bounds");
    let mut mu = Check::new("slice_bounds");
    let mut refine = Check::new("slice_bound_at_most_d_norm");
    let mut rot = Check::new("rotation_bounds");
    let mut order = Check::new("rotation_ratio_below_closed_form");
    let mut square = Check::new("rotation_square_bound");
    for t in 0..cfg.trials {
        let mut rng = suite_rng(cfg, 4, t);
        let n = rng.random_range(2..=20);
        let m = rng.random_range(n..=30);
        let k = rng.random_range(1..=6.min(n - 1));
        let p = BlockPartition::new(uniform(&mut rng, m, n), k)?;
        let i = rng.random_range(1..=n);
        for b in weyl_gap_bounds(&p, i)? {
            weyl.bound(&b, tol);
        }
        for b in small_rank_bounds(&p, i)? {
            rank.bound(&b, tol);
        }
        let (q, reports) = mu_bounds(&p, i)?;
        for b in &reports {
            mu.bound(b, tol);
        }
        refine.margin(operator_norm(&p.d()) - q.mu_bar, 1e-12);
        match theorem2_bounds(&p, RANK_REL) {
            Ok(r) => {
                rot.bound(&r.r0_ratio, tol);
                rot.bound(&r.r0_closed, tol);
                rot.bound(&r.r, tol);
                order.margin(r.r0_closed.upper - r.r0_ratio.upper, 1e-12);
            }
            Err(Error::Singular { .. }) => {}
            Err(e) => return Err(e),
        }
        let sq = rng.random_range(1..=5);
        let ps = BlockPartition::new(uniform(&mut rng, 2 * sq, 2 * sq), sq)?;
        match corollary5(&ps) {
            Ok(b) => square.bound(&b, tol),
            Err(Error::InvalidArgument(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let scalar = BlockPartition::new(Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 0.0]), 1)?;
    let b = corollary5(&scalar)?;
    square.margin(1e-12 - (b.upper - 0.5f64.sqrt()).abs(), 0.0);
    let mut example = Check::new("two_by_two_closed_form");
    let r0 = Matrix::from_row_slice(2, 2, &[0.6, -0.8, 0.8, 0.0]);
    example.margin(1e-12 - (singular_values(&r0)?[1] - example1_sigma2_r0(0.8)).abs(), 0.0);
    Ok(vec![weyl, rank, mu, refine, rot, order, square, example])
}

/// Random profile at `m = 2000`, `k = 40`: binary columns or fractional
/// columns with `||u||^2` slightly above `|u|`.
fn random_profile(rng: &mut ChaCha8Rng) -> Result<ColumnProfile> {
    let (m, k) = (2000, 40);
    if rng.random_bool(0.5) {
        let ones: Vec<usize> = (0..k).map(|_| rng.random_range(1..=60)).collect();
        ColumnProfile::binary(m, &ones)
    } else {
        let sizes: Vec<f64> = (0..k).map(|_| rng.random_range(2.0..60.0)).collect();
        let norms = sizes
            .iter()
            .map(|&s| (s * rng.random_range(1.0..1.5)).sqrt().min(s))
            .collect();
        ColumnProfile::with_norms(m, sizes, norms)?.with_max_support(60)
    }
}

fn suite_theorem3(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut tight = Check::new("hand_case_lower_tight");
    let hand = theorem3_bounds(&ColumnProfile::binary(4, &[2, 2])?, DEFAULT_SLACK_C)?;
    let low = &hand.rows[1];
    tight.margin(-(low.oracle - low.lower_pure).abs(), 1e-12);
    tight.margin(hand.rows[0].upper - hand.rows[0].oracle, 1e-12);
    tight.holds(hand.s1.passed());

    let mut contained = Check::new("sandwich_with_slack");
    let mut z_up = Check::new("z_norm_bound");
    let mut z_inv = Check::new("z_inverse_bound");
    let mut consequences = Check::new("structural_consequences");
    let mut factor = Check::new("gram_factorization");
    let mut pure = Check::advisory("sandwich_without_slack");
    let mut skipped = Check::advisory("profiles_failing_s1");
    for t in 0..cfg.trials.min(100) {
        let mut rng = suite_rng(cfg, 5, t);
        let p = random_profile(&mut rng)?;
        let rep = theorem3_bounds(&p, DEFAULT_SLACK_C)?;
        if !rep.s1.passed() {
            skipped.holds(false);
            continue;
        }
        for row in &rep.rows {
            let w = row.weight;
            contained.margin((row.upper - row.oracle).min(row.oracle - row.lower) / w, 1e-12);
            pure.margin((row.oracle - row.lower_pure) / w, 1e-12);
        }
        z_up.margin(rep.z_bound - rep.z_norm, 1e-12);
        z_inv.margin(rep.z_inv_bound - rep.z_inv_norm, 1e-12);
        consequences.holds(check_s1(&p).consequences_hold());
        factor.margin(1e-12 - expected_gram(&p)?.factorization_residual(), 0.0);
    }
    Ok(vec![tight, contained, z_up, z_inv, consequences, factor, pure, skipped])
}

/// Exact `E sigma_i^2(X)` for `k` independent binary columns of length `m`
/// with `l` ones each, by enumerating every matrix.
pub fn enumerate_binary_spectrum(m: usize, l: usize, k: usize) -> Result<Vec<f64>> {
    let subsets: Vec<Vec<f64>> = (0u32..1 << m)
        .filter(|b| b.count_ones() as usize == l)
        .map(|b| (0..m).map(|i| f64::from((b >> i) & 1)).collect())
        .collect();
    let total = subsets.len().pow(k as u32);
    let mut acc = vec![0.0; k];
    for idx in 0..total {
        let mut rest = idx;
        let mut x = Matrix::zeros(m, k);
        for j in 0..k {
            let col = &subsets[rest % subsets.len()];
            rest /= subsets.len();
            x.column_mut(j).copy_from_slice(col);
        }
        let (ev, _) = symmetric_eigen(&(x.transpose() * &x))?;
        for (a, e) in acc.iter_mut().zip(ev) {
            *a += e;
        }
    }
    Ok(acc.into_iter().map(|a| a / total as f64).collect())
}

fn suite_corollaries(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mc = cfg.trials.max(2) * 100;
    let mut lemma13 = Check::new("pair_moments_exact_law");
    let pair = ColumnModel::Binary { l: 2 };
    let rep = lemma13_stats(4, pair, pair, mc, cfg.seed)?;
    lemma13.margin(3.0 - rep.mean.z.abs(), 0.0);
    lemma13.margin(3.0 - rep.variance.z.abs(), 0.0);

    let mut bands = Check::new("exact_band_small_case");
    let p = ColumnProfile::binary(4, &[2, 2])?;
    let sigma_g = expected_gram(&p)?.spectrum()?;
    let exact = enumerate_binary_spectrum(4, 2, 2)?;
    let band = (1.0f64 / 3.0).sqrt() * 2.0;
    for (e, g) in exact.iter().zip(&sigma_g) {
        bands.margin(band - (e - g).abs(), 1e-12);
    }

    let mut kyfan = Check::new("partial_sums_in_expectation");
    let mut constant = Check::new("constant_band_containment");
    let mut gram = Check::new("empirical_gram_matches");
    let mut exact_size = Check::new("sampler_sizes_exact");
    let mut rng = suite_rng(cfg, 6, 0);
    let ones: Vec<usize> = (0..20).map(|_| rng.random_range(5..=40)).collect();
    let prof = ColumnProfile::binary(500, &ones)?;
    let model = RandomColumnModel::from_profile(&prof, cfg.seed)?;
    let fl = fluctuation_bounds(&prof, &model, cfg.trials, 2.0, DEFAULT_SLACK_C)?;
    kyfan.margin(fl.kyfan_head_worst_z.min(fl.kyfan_tail_worst_z) + crate::randmat::MC_SIGMAS, 0.0);
    for row in &fl.rows {
        constant.holds(row.within_constant);
    }
    let eg = empirical_gram(&model, &expected_gram(&prof)?.g, cfg.trials)?;
    gram.margin(5.0 - eg.max_z, 0.0);

    let simplex = ColumnModel::FixedSize { s: 7.5 };
    let normed = ColumnModel::FixedSizeNorm { s: 6.0, b: 1.4 };
    for t in 0..cfg.trials.min(200) {
        let mut r = suite_rng(cfg, 6, t + 1);
        for c in [simplex, normed, pair] {
            let x = c.sample(40, &mut r)?;
            let s: f64 = x.iter().sum();
            exact_size.margin(1e-12 - (s - c.size()).abs() / c.size(), 0.0);
        }
    }
    Ok(vec![lemma13, bands, kyfan, constant, gram, exact_size])
}

fn suite_gamma(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let k = 10_000;
    let mut ratio4 = Check::new("moment_ratio_alpha4");
    let spec4 = GammaSpec::new(4.0, 0.05)?;
    let s4 = sample_sizes_truncated_gamma(k, &spec4, &mut stream(cfg.seed, 7, 0))?;
    ratio4.margin(0.02 - (moment_ratio(&s4)? / 1.25f64.sqrt() - 1.0).abs(), 0.0);

    let mut ratio1 = Check::new("moment_ratio_alpha1_small_beta");
    let spec1 = GammaSpec::new(1.0, 0.01)?;
    let s1 = sample_sizes_truncated_gamma(k, &spec1, &mut stream(cfg.seed, 7, 1))?;
    ratio1.margin(0.02 - (moment_ratio(&s1)? / 2f64.sqrt() - 1.0).abs(), 0.0);

    let mut memoryless = Check::new("exponential_truncated_mean");
    let spec = GammaSpec::new(1.0, 0.1)?;
    let draws = sample_sizes_truncated_gamma(100 * cfg.trials.max(1000), &spec, &mut stream(cfg.seed, 7, 2))?;
    let n = draws.len() as f64;
    let mean = draws.iter().sum::<f64>() / n;
    let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
    memoryless.margin(3.0 - (mean - 11.0).abs() / (var / n).sqrt(), 0.0);

    let resamples = cfg.trials.min(200);
    let summary = corollary10_resample(2000, 50, &spec, resamples, cfg.seed, DEFAULT_SLACK_C)?;
    let mut containment = Check::new("resampled_containment");
    containment.margin(summary.containment_fraction - 0.95, 0.0);
    let mut density = Check::new("density_truncated_mean");
    let truncated = (spec.a + 1.0 / spec.beta) / 2000.0;
    density.margin(3.0 - (summary.mean_density - truncated).abs() / summary.density_se, 0.0);
    let mut density_formula = Check::advisory("density_untruncated_formula");
    density_formula.margin(
        3.0 - (summary.mean_density - summary.expected_density).abs() / summary.density_se,
        0.0,
    );
    Ok(vec![ratio4, ratio1, memoryless, containment, density, density_formula])
}

fn suite_pipeline(cfg: &VerifyConfig) -> Result<Vec<Check>> {
    let mut example = Check::new("threshold_factor_four_digits");
    let f = threshold_ratio(1.0, 0.01);
    example.holds(format!("{f:.4}") == "0.1554");
    example.margin(1e-15 - (f - (1.0 + 2f64.sqrt()).sqrt() / 10.0).abs(), 0.0);

    let mut scan = Check::new("feasibility_index_scan");
    let mut idempotent = Check::new("planning_idempotent");
    for t in 0..cfg.trials.min(20) {
        let mut rng = suite_rng(cfg, 8, t);
        let r = exponential_sparse(&mut rng, 400, 60);
        let plan = plan_partition(&r, Some(20), 1.0)?;
        let sorted = plan.apply(&r)?;
        let next: f64 = sorted.column(20).sum();
        let rows = sorted.columns(20, 40).row_iter().map(|x| x.sum()).fold(0.0, f64::max);
        let thr = (1.0 + 2f64.sqrt()).sqrt() * (next * rows).sqrt();
        let brute = (1..20).filter(|&i| sorted.column(i - 1).norm() >= thr).max().unwrap_or(0);
        scan.holds(brute == plan.feasibility_index);
        scan.holds(feasibility_index(&plan.col_norms, 20, thr) == brute);
        idempotent.holds(plan_partition(&sorted, Some(20), 1.0)?.is_identity());
    }

    let mut exact = Check::new("zero_block_exact");
    let opts = BlockDiagOptions::default();
    let r = synthetic_sparse(&SyntheticSpec::new(60, 24, 6, 0.0), cfg.seed)?;
    let rep = algorithm2(&r, 6, 3, &opts, true)?;
    exact.holds(rep.bound == 0.0);
    for row in rep.oracle.iter().flatten() {
        exact.margin(1e-9 - row.error / rep.r_norm, 0.0);
    }

    let mut certificate = Check::new("certificate_within_two_d_norms");
    let mut bound_field = Check::new("bound_is_twice_d_norm");
    for t in 0..cfg.trials.min(20) {
        let r = synthetic_sparse(&SyntheticSpec::new(200, 80, 20, 0.01), cfg.seed.wrapping_add(t as u64))?;
        let rep = algorithm2(&r, 20, 5, &opts, true)?;
        for row in rep.oracle.iter().flatten() {
            certificate.margin((rep.bound - row.error) / rep.r_norm, 1e-9);
        }
        bound_field.margin(1e-12 - (rep.bound - 2.0 * rep.d_norm).abs() / rep.bound.max(1.0), 0.0);
    }
    Ok(vec![example, scan, idempotent, exact, certificate, bound_field])
}

/// Sparse non-negative matrix with exponentially distributed column sizes.
fn exponential_sparse(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Matrix {
    let mut r = Matrix::zeros(m, n);
    for j in 0..n {
        let target = 1.0 + (-rng.random::<f64>().ln()) * 20.0;
        let nnz = (target.round() as usize).clamp(1, m);
        for i in rand::seq::index::sample(rng, m, nnz) {
            r[(i, j)] = rng.random_range(0.5..1.5);
        }
    }
    r
}
