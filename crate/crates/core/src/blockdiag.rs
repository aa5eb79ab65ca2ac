//! Iterative block diagonalization by alternating block-Givens rotations.
//!
//! Starting from `R_0 = R`, even steps apply a left rotation (zeroing the
//! bottom-left block) and odd steps a right rotation (zeroing the top-right
//! block). Every step is orthogonal, so the spectrum of `R_t` never changes,
//! while the off-diagonal blocks shrink. Each iterate is recorded in a
//! [`SweepTrace`] that [`check_lemma11`] audits afterwards.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::givens::{build_left_rotation, build_right_rotation, Side};
use crate::matcore::{operator_norm, singular_values, BlockPartition, Matrix};

/// Relative floor on `sigma_k(A_t)` below which the run aborts.
pub const SINGULAR_FLOOR: f64 = 1e-13;

/// Orthogonality drift of accumulated factors that triggers re-orthogonalization.
const DRIFT_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceLevel {
    /// Every quantity, including `||D_t||` and the band spectra.
    Full,
    /// Only the `A`, `B`, `C` quantities; cheap for large problems.
    Light,
}

#[derive(Debug, Clone)]
pub struct BlockDiagOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Side of the first rotation; left by default.
    pub first: Side,
    /// Keep the products of all left and right rotations.
    pub accumulate: bool,
    pub trace: TraceLevel,
}

impl Default for BlockDiagOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 200,
            first: Side::Left,
            accumulate: true,
            trace: TraceLevel::Full,
        }
    }
}

/// State of the iterate `R_t` and the rotation that leaves it.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    pub t: usize,
    /// Side of the rotation applied to `R_t`, absent for the final iterate.
    pub side: Option<&'static str>,
    pub a_norm: f64,
    /// All singular values of `A_t`, descending.
    pub a_sigma: Vec<f64>,
    pub b_norm: f64,
    pub c_norm: f64,
    pub d_norm: Option<f64>,
    /// Singular values of the left band `R_t[1:m, 1:k]`.
    pub left_band_sigma: Option<Vec<f64>>,
    /// `||R_t[1:m, k+1:n]||`.
    pub right_band_norm: Option<f64>,
    /// The rotation leaving `R_t` was the identity.
    pub degenerate: bool,
    /// Norm of the `(dim-k)` cosine of that rotation, the exact contraction
    /// factor of the bottom-right block.
    pub cos_large: Option<f64>,
}

impl SweepRecord {
    pub fn sigma_k(&self) -> f64 {
        self.a_sigma.last().copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepTrace {
    pub k: usize,
    pub r_norm: f64,
    pub records: Vec<SweepRecord>,
}

impl SweepTrace {
    /// One JSON object per iterate.
    pub fn to_json_lines(&self) -> Result<String> {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r)?);
            out.push('\n');
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIterations,
    /// `sigma_k(A_t)` fell below the floor at step `t`.
    SingularLeadingBlock { t: usize, sigma_k: f64 },
}

#[derive(Debug, Clone)]
pub struct BlockDiagResult {
    k: usize,
    /// The last iterate `R_T`.
    pub matrix: Matrix,
    /// Product of the left rotations, `L` with `R_T = L R Q`.
    pub left: Option<Matrix>,
    /// Product of the right rotations, `Q` with `R_T = L R Q`.
    pub right: Option<Matrix>,
    pub trace: SweepTrace,
    pub termination: Termination,
    /// Number of rotations applied.
    pub iterations: usize,
}

impl BlockDiagResult {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn a_inf(&self) -> Matrix {
        self.matrix.view((0, 0), (self.k, self.k)).into_owned()
    }

    pub fn d_inf(&self) -> Matrix {
        let (m, n) = self.matrix.shape();
        self.matrix
            .view((self.k, self.k), (m - self.k, n - self.k))
            .into_owned()
    }

    /// `max(||B_T||, ||C_T||)`.
    pub fn off_diagonal_norm(&self) -> f64 {
        let (m, n) = self.matrix.shape();
        let k = self.k;
        let b = operator_norm(&self.matrix.view((0, k), (k, n - k)).into_owned());
        let c = operator_norm(&self.matrix.view((k, 0), (m - k, k)).into_owned());
        b.max(c)
    }

    /// Singular values of `A_inf (+) D_inf`, descending.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let mut s = singular_values(&self.a_inf())?;
        s.extend(singular_values(&self.d_inf())?);
        s.sort_by(|a, b| b.total_cmp(a));
        Ok(s)
    }

    /// `L^T R_T Q^T`, which equals `R` up to round-off.
    pub fn reconstruct(&self) -> Option<Matrix> {
        match (&self.left, &self.right) {
            (Some(l), Some(q)) => Some(l.transpose() * &self.matrix * q.transpose()),
            _ => None,
        }
    }
}

fn block_norms(r: &Matrix, k: usize) -> (Matrix, f64, f64) {
    let (m, n) = r.shape();
    let a = r.view((0, 0), (k, k)).into_owned();
    let b = operator_norm(&r.view((0, k), (k, n - k)).into_owned());
    let c = operator_norm(&r.view((k, 0), (m - k, k)).into_owned());
    (a, b, c)
}

fn record(r: &Matrix, k: usize, t: usize, level: TraceLevel) -> Result<SweepRecord> {
    let (m, n) = r.shape();
    let (a, b_norm, c_norm) = block_norms(r, k);
    let a_sigma = singular_values(&a)?;
    let full = level == TraceLevel::Full;
    let d_norm = full.then(|| operator_norm(&r.view((k, k), (m - k, n - k)).into_owned()));
    let left_band_sigma = if full {
        Some(singular_values(&r.columns(0, k).into_owned())?)
    } else {
        None
    };
    let right_band_norm = full.then(|| operator_norm(&r.columns(k, n - k).into_owned()));
    Ok(SweepRecord {
        t,
        side: None,
        a_norm: a_sigma.first().copied().unwrap_or(0.0),
        a_sigma,
        b_norm,
        c_norm,
        d_norm,
        left_band_sigma,
        right_band_norm,
        degenerate: false,
        cos_large: None,
    })
}

fn reorthogonalize(q: &mut Matrix) -> Result<()> {
    let n = q.ncols();
    let drift = (q.transpose() * &*q - Matrix::identity(n, n)).norm();
    if drift > DRIFT_LIMIT {
        *q = crate::matcore::nearest_orthogonal(q)?;
    }
    Ok(())
}

/// Alternating block-Givens iteration until `max(||B_t||, ||C_t||) <= tol ||R||`.
///
/// Input validation errors are returned as `Err`; a run that stalls or meets
/// a singular leading block still returns its trace, with the reason in
/// [`BlockDiagResult::termination`].
pub fn block_diagonalize(p: &BlockPartition, opts: &BlockDiagOptions) -> Result<BlockDiagResult> {
    if !(opts.tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("tol = {}", opts.tol)));
    }
    let k = p.k();
    let (m, n) = (p.m(), p.n());
    let r_norm = operator_norm(p.base());
    let mut r = p.base().clone();
    let mut left = opts.accumulate.then(|| Matrix::identity(m, m));
    let mut right = opts.accumulate.then(|| Matrix::identity(n, n));
    let mut records = Vec::new();
    let mut side = opts.first;
    let threshold = opts.tol * r_norm;
    let mut termination = Termination::MaxIterations;
    let mut iterations = 0;

    for t in 0..=opts.max_iter {
        let mut rec = record(&r, k, t, opts.trace)?;
        if rec.b_norm.max(rec.c_norm) <= threshold {
            records.push(rec);
            termination = Termination::Converged;
            break;
        }
        let sigma_k = rec.sigma_k();
        if !(sigma_k >= SINGULAR_FLOOR * r_norm) {
            records.push(rec);
            termination = Termination::SingularLeadingBlock { t, sigma_k };
            break;
        }
        if t == opts.max_iter {
            records.push(rec);
            break;
        }
        let part = BlockPartition::new(r, k)?;
        let g = match side {
            Side::Left => build_left_rotation(&part),
            Side::Right => build_right_rotation(&part),
        };
        let g = match g {
            Ok(g) => g,
            Err(Error::Singular { sigma_min }) => {
                records.push(rec);
                termination = Termination::SingularLeadingBlock {
                    t,
                    sigma_k: sigma_min,
                };
                r = part.into_base();
                break;
            }
            Err(e) => return Err(e),
        };
        r = g.apply(part.base())?;
        match side {
            Side::Left => {
                if let Some(l) = left.as_mut() {
                    *l = g.apply(l)?;
                    reorthogonalize(l)?;
                }
            }
            Side::Right => {
                if let Some(q) = right.as_mut() {
                    *q = g.apply(q)?;
                    reorthogonalize(q)?;
                }
            }
        }
        rec.side = Some(match side {
            Side::Left => "left",
            Side::Right => "right",
        });
        rec.degenerate = g.is_degenerate();
        rec.cos_large = Some(g.cos_large_norm());
        records.push(rec);
        iterations += 1;
        side = match side {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        };
    }

    Ok(BlockDiagResult {
        k,
        matrix: r,
        left,
        right,
        trace: SweepTrace {
            k,
            r_norm,
            records,
        },
        termination,
        iterations,
    })
}

/// Outcome of one family of checks.
#[derive(Debug, Clone, Serialize)]
pub struct CheckItem {
    pub label: &'static str,
    pub checks: usize,
    pub violations: usize,
    /// Smallest `(rhs - lhs) / ||R||` over all checks; `+inf` when none ran.
    pub worst_margin: f64,
}

impl CheckItem {
    fn new(label: &'static str) -> Self {
        Self {
            label,
            checks: 0,
            violations: 0,
            worst_margin: f64::INFINITY,
        }
    }

    /// Records `lhs <= rhs` with margin normalized by `scale`.
    fn leq(&mut self, lhs: f64, rhs: f64, scale: f64, tol: f64) {
        let margin = (rhs - lhs) / scale;
        self.checks += 1;
        self.worst_margin = self.worst_margin.min(margin);
        if margin < -tol {
            self.violations += 1;
        }
    }

    fn eq(&mut self, lhs: f64, rhs: f64, scale: f64, tol: f64) {
        let margin = -(lhs - rhs).abs() / scale;
        self.checks += 1;
        self.worst_margin = self.worst_margin.min(margin);
        if margin < -tol {
            self.violations += 1;
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Audit of a block-diagonalization trace.
#[derive(Debug, Clone, Serialize)]
pub struct Lemma11Report {
    /// (i) singular values of `A_t` never decrease.
    pub monotone: CheckItem,
    /// (ii) `C_1 = 0` and `sigma(A_1) = sigma(R[1:m, 1:k])`.
    pub first_step: CheckItem,
    /// (iii) the right band norm is unchanged by the first step.
    pub right_band: CheckItem,
    /// (iv) contraction of `D` with the `||A_t||` factor as stated.
    pub contraction_d: CheckItem,
    /// (iv) contraction of the off-diagonal block with the `sigma_k(A_t)` factor.
    pub contraction_offdiag: CheckItem,
    /// `||D_{t+1}|| <= ||cos|| ||D_t||` with the exact cosine norm.
    pub contraction_d_exact: CheckItem,
    /// (v) the gap `sigma_i(left band) >= ||right band||` persists.
    pub gap: CheckItem,
}

impl Lemma11Report {
    /// Every stated item (all but the exact-cosine line) holds.
    pub fn all_stated_pass(&self) -> bool {
        self.items()[..6].iter().all(|c| c.passed())
    }

    pub fn items(&self) -> [&CheckItem; 7] {
        [
            &self.monotone,
            &self.first_step,
            &self.right_band,
            &self.contraction_d,
            &self.contraction_offdiag,
            &self.gap,
            &self.contraction_d_exact,
        ]
    }
}

/// Checks the structural properties of a trace; margins are divided by `||R||`
/// and a check fails when its margin is below `-tol`.
pub fn check_lemma11(trace: &SweepTrace, tol: f64) -> Lemma11Report {
    let scale = if trace.r_norm > 0.0 { trace.r_norm } else { 1.0 };
    let recs = &trace.records;
    let mut monotone = CheckItem::new("monotone");
    let mut first_step = CheckItem::new("first_step");
    let mut right_band = CheckItem::new("right_band");
    let mut contraction_d = CheckItem::new("contraction_d");
    let mut contraction_offdiag = CheckItem::new("contraction_offdiag");
    let mut contraction_d_exact = CheckItem::new("contraction_d_exact");
    let mut gap = CheckItem::new("gap");

    for w in recs.windows(2) {
        let (now, next) = (&w[0], &w[1]);
        for (x, y) in now.a_sigma.iter().zip(&next.a_sigma) {
            monotone.leq(*x, *y, scale, tol);
        }
    }

    if let (Some(r0), Some(r1)) = (recs.first(), recs.get(1)) {
        if r0.side == Some("left") {
            first_step.leq(r1.c_norm, 0.0, scale, tol);
            if let Some(band) = &r0.left_band_sigma {
                for (x, y) in r1.a_sigma.iter().zip(band) {
                    first_step.eq(*x, *y, scale, tol);
                }
            }
            if let (Some(x), Some(y)) = (r0.right_band_norm, r1.right_band_norm) {
                right_band.eq(x, y, scale, tol);
            }
        }
    }

    for w in recs.windows(2).skip(1) {
        let (now, next) = (&w[0], &w[1]);
        let Some(side) = now.side else { continue };
        let (off, next_off) = match side {
            "left" => (now.c_norm, next.b_norm),
            _ => (now.b_norm, next.c_norm),
        };
        if let (Some(d), Some(d_next)) = (now.d_norm, next.d_norm) {
            let factor = if now.a_norm > 0.0 {
                (1.0 + (off / now.a_norm).powi(2)).powf(-0.5)
            } else {
                0.0
            };
            contraction_d.leq(d_next, factor * d, scale, tol);
            if let Some(c) = now.cos_large {
                contraction_d_exact.leq(d_next, c * d, scale, tol);
            }
            let sk = now.sigma_k();
            let denom = (sk * sk + off * off).sqrt();
            let bound = if denom > 0.0 { off * d / denom } else { 0.0 };
            contraction_offdiag.leq(next_off, bound, scale, tol);
        }
    }

    if let Some(r0) = recs.first() {
        if let (Some(band), Some(right)) = (&r0.left_band_sigma, r0.right_band_norm) {
            let gapped: Vec<usize> = (0..band.len()).filter(|&i| band[i] >= right).collect();
            for rec in &recs[1..] {
                if let (Some(b), Some(rn)) = (&rec.left_band_sigma, rec.right_band_norm) {
                    for &i in &gapped {
                        gap.leq(rn, b[i], scale, tol);
                    }
                }
            }
        }
    }

    Lemma11Report {
        monotone,
        first_step,
        right_band,
        contraction_d,
        contraction_offdiag,
        contraction_d_exact,
        gap,
    }
}

/// Top `i` singular values of `R` read off the limit block `A_inf`.
#[derive(Debug, Clone, Serialize)]
pub struct TopSpectrum {
    pub values: Vec<f64>,
    /// The gap condition held, so the values equal `sigma_1..sigma_i(R)`.
    pub certified: bool,
    /// `sigma_i(R[1:m, 1:k])`.
    pub left_sigma_i: f64,
    /// `||R[1:m, k+1:n]||`.
    pub right_norm: f64,
    pub converged: bool,
    /// `max(||B_T||, ||C_T||)` of the last iterate.
    pub off_diagonal: f64,
    pub iterations: usize,
}

pub fn top_singular_values(
    p: &BlockPartition,
    i: usize,
    opts: &BlockDiagOptions,
) -> Result<TopSpectrum> {
    let k = p.k();
    if i == 0 || i > k {
        return Err(Error::InvalidArgument(format!("need 1 <= i <= k = {k}, got {i}")));
    }
    let left_sigma_i = singular_values(&p.left_band())?[i - 1];
    let right_norm = operator_norm(&p.right_band());
    let run = block_diagonalize(p, opts)?;
    if let Termination::SingularLeadingBlock { sigma_k, .. } = run.termination {
        return Err(Error::Singular { sigma_min: sigma_k });
    }
    let mut values = singular_values(&run.a_inf())?;
    values.truncate(i);
    Ok(TopSpectrum {
        values,
        certified: left_sigma_i >= right_norm && run.converged(),
        left_sigma_i,
        right_norm,
        converged: run.converged(),
        off_diagonal: run.off_diagonal_norm(),
        iterations: run.iterations,
    })
}

/// Margins of the two column-norm majorization inequalities; both are
/// non-negative when the inequalities hold.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KyFanReport {
    /// `sum_{j<=i} sigma_j^2 - sum_{j<=i} |v_j|^2`.
    pub head_margin: f64,
    /// `sum_{j>i} |v_j|^2 - sum_{j>i} sigma_j^2`.
    pub tail_margin: f64,
}

pub fn kyfan_column_bounds(y: &Matrix, i: usize) -> Result<KyFanReport> {
    let q = y.ncols();
    if i == 0 || i > q {
        return Err(Error::InvalidArgument(format!("need 1 <= i <= {q}, got {i}")));
    }
    let mut norms: Vec<f64> = y.column_iter().map(|c| c.norm_squared()).collect();
    norms.sort_by(|a, b| b.total_cmp(a));
    let mut sig: Vec<f64> = singular_values(y)?.iter().map(|s| s * s).collect();
    sig.resize(q, 0.0);
    let head = |v: &[f64]| v[..i].iter().sum::<f64>();
    let tail = |v: &[f64]| v[i..].iter().sum::<f64>();
    Ok(KyFanReport {
        head_margin: head(&sig) - head(&norms),
        tail_margin: tail(&norms) - tail(&sig),
    })
}
