use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use blocksvd::approx::algorithm2;
use blocksvd::blockdiag::{block_diagonalize, check_lemma11, BlockDiagOptions};
use blocksvd::bounds::{corollary5, mu_bounds, small_rank_bounds, theorem2_bounds, weyl_gap_bounds, RANK_REL};
use blocksvd::givens::Side;
use blocksvd::io::{emit_json, read_matrix_market, write_matrix_market};
use blocksvd::matcore::singular_values;
use blocksvd::plan::plan_partition;
use blocksvd::randmat::{empirical_gram, theorem3_bounds, ColumnProfile, RandomColumnModel, DEFAULT_SLACK_C};
use blocksvd::verify::{verify, VerifyConfig};
use blocksvd::{BlockPartition, Error};

/// Block-Givens block diagonalization, singular value bounds and
/// expected-Gram spectra of sparse non-negative matrices.
#[derive(Parser)]
#[command(name = "blocksvd", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Relative stopping tolerance of block diagonalization.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,
    /// Rotation budget of block diagonalization.
    #[arg(long = "max-iter", global = true, default_value_t = 200)]
    max_iter: usize,
    /// Random instances or Monte Carlo draws.
    #[arg(long, global = true, default_value_t = 200)]
    trials: usize,
    /// Compare against a full SVD.
    #[arg(long, global = true)]
    oracle: bool,
    /// Write the JSON report here instead of standard output.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FirstSide {
    Left,
    Right,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Matcore,
    Givens,
    Blockdiag,
    Bounds,
    Theorem3,
    Corollaries,
    Gamma,
    Pipeline,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Matcore => "matcore",
            Suite::Givens => "givens",
            Suite::Blockdiag => "blockdiag",
            Suite::Bounds => "bounds",
            Suite::Theorem3 => "theorem3",
            Suite::Corollaries => "corollaries",
            Suite::Gamma => "gamma",
            Suite::Pipeline => "pipeline",
            Suite::All => "all",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Block-diagonalize a Matrix Market matrix at split k.
    Blockdiag {
        matrix: PathBuf,
        #[arg(short, long)]
        k: usize,
        /// Side of the first rotation.
        #[arg(long, value_enum, default_value_t = FirstSide::Left)]
        first: FirstSide,
        /// Write the per-rotation trace as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Perturbation bounds for zeroing the bottom-right block.
    Bounds {
        matrix: PathBuf,
        #[arg(short, long)]
        k: usize,
        /// 1-based singular value index.
        #[arg(short, long)]
        i: usize,
    },
    /// Sort rows and columns and pick a split by the feasibility heuristic.
    Plan {
        matrix: PathBuf,
        #[arg(short, long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Write the permuted matrix.
        #[arg(long)]
        permuted: Option<PathBuf>,
    },
    /// Top singular values with a certified error after dropping the bottom-right block.
    Approx {
        matrix: PathBuf,
        #[arg(short, long)]
        k: Option<usize>,
        /// Number of singular values; defaults to the feasibility index.
        #[arg(short, long)]
        rank: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Use the matrix as given instead of sorting it first.
        #[arg(long)]
        no_plan: bool,
    },
    /// Expected Gram matrix of a column profile and its spectrum bounds.
    Gram {
        /// Column profile as JSON.
        profile: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SLACK_C)]
        slack_c: f64,
        /// Also average the Gram matrix over `--trials` sampled matrices.
        #[arg(long)]
        monte_carlo: bool,
        /// Write one sampled matrix (trial 0).
        #[arg(long)]
        sample: Option<PathBuf>,
    },
    /// Run the self-check suites.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
}

fn options(c: &Common, first: FirstSide) -> BlockDiagOptions {
    BlockDiagOptions {
        tol: c.tol,
        max_iter: c.max_iter,
        first: match first {
            FirstSide::Left => Side::Left,
            FirstSide::Right => Side::Right,
        },
        ..BlockDiagOptions::default()
    }
}

fn run(cli: Cli) -> blocksvd::Result<bool> {
    let c = &cli.common;
    let out = c.output.as_deref();
    match cli.command {
        Command::Blockdiag { matrix, k, first, trace } => {
            let p = BlockPartition::new(read_matrix_market(matrix)?, k)?;
            let res = block_diagonalize(&p, &options(c, first))?;
            if let Some(path) = trace {
                std::fs::write(path, res.trace.to_json_lines()?)?;
            }
            let lemma = check_lemma11(&res.trace, 1e-9);
            let spectrum = res.spectrum()?;
            let oracle = if c.oracle {
                let exact = singular_values(p.base())?;
                let gap = exact.iter().zip(&spectrum).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                Some(json!({ "singular_values": exact, "max_abs_error": gap }))
            } else {
                None
            };
            emit_json(
                &json!({
                    "k": k,
                    "termination": res.termination,
                    "converged": res.converged(),
                    "iterations": res.iterations,
                    "off_diagonal_norm": res.off_diagonal_norm(),
                    "r_norm": res.trace.r_norm,
                    "a_inf_singular_values": singular_values(&res.a_inf())?,
                    "spectrum": spectrum,
                    "lemma11": lemma,
                    "oracle": oracle,
                }),
                out,
            )?;
            Ok(res.converged())
        }
        Command::Bounds { matrix, k, i } => {
            let p = BlockPartition::new(read_matrix_market(matrix)?, k)?;
            let mut reports = weyl_gap_bounds(&p, i)?;
            reports.extend(small_rank_bounds(&p, i)?);
            let (mu, mu_reports) = mu_bounds(&p, i)?;
            reports.extend(mu_reports);
            let theorem2 = match theorem2_bounds(&p, RANK_REL) {
                Ok(t) => {
                    reports.extend([t.r0_ratio.clone(), t.r0_closed.clone(), t.r.clone()]);
                    Some(t.inputs)
                }
                Err(Error::Singular { .. }) => None,
                Err(e) => return Err(e),
            };
            if p.m() == 2 * k && p.n() == 2 * k {
                if let Ok(b) = corollary5(&p) {
                    reports.push(b);
                }
            }
            let ok = reports.iter().all(|b| b.holds(1e-10));
            emit_json(
                &json!({ "k": k, "i": i, "bounds": reports, "mu": mu, "rotation_inputs": theorem2 }),
                out,
            )?;
            Ok(ok)
        }
        Command::Plan { matrix, k, alpha, permuted } => {
            let r = read_matrix_market(matrix)?;
            let plan = plan_partition(&r, k, alpha)?;
            if let Some(path) = permuted {
                write_matrix_market(&plan.apply(&r)?, path)?;
            }
            emit_json(&plan, out)?;
            Ok(true)
        }
        Command::Approx { matrix, k, rank, alpha, no_plan } => {
            let r = read_matrix_market(matrix)?;
            let (work, plan) = if no_plan {
                (r, None)
            } else {
                let plan = plan_partition(&r, k, alpha)?;
                (plan.apply(&r)?, Some(plan))
            };
            let k = match (k, &plan) {
                (Some(k), _) => k,
                (None, Some(p)) => p.k,
                (None, None) => return Err(Error::InvalidArgument("--k is required with --no-plan".into())),
            };
            let rank = match (rank, &plan) {
                (Some(i), _) => i,
                (None, Some(p)) if p.feasibility_index > 0 => p.feasibility_index,
                _ => return Err(Error::InvalidArgument("--rank is required (no feasible index)".into())),
            };
            let rep = algorithm2(&work, k, rank, &options(c, FirstSide::Left), c.oracle)?;
            for w in &rep.warnings {
                eprintln!("warning: {w}");
            }
            let ok = rep.certificate_holds(1e-9 * rep.r_norm);
            emit_json(&json!({ "plan": plan, "approx": rep }), out)?;
            Ok(ok)
        }
        Command::Gram { profile, slack_c, monte_carlo, sample } => {
            let p: ColumnProfile = serde_json::from_str(&std::fs::read_to_string(profile)?)?;
            p.validate()?;
            let rep = theorem3_bounds(&p, slack_c)?;
            let model = RandomColumnModel::from_profile(&p, c.seed)?;
            if let Some(path) = sample {
                write_matrix_market(&model.sample(0)?, path)?;
            }
            let mc = if monte_carlo {
                let g = blocksvd::randmat::expected_gram(&p)?.g;
                Some(empirical_gram(&model, &g, c.trials)?)
            } else {
                None
            };
            let ok = rep.all_contained();
            emit_json(&json!({ "profile": p, "theorem3": rep, "monte_carlo": mc }), out)?;
            Ok(ok)
        }
        Command::Verify { suite } => {
            let rep = verify(suite.name(), &VerifyConfig { seed: c.seed, trials: c.trials })?;
            emit_json(&rep, out)?;
            Ok(rep.passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            let usage = matches!(
                e,
                Error::InvalidArgument(_) | Error::Parse { .. } | Error::Io(_) | Error::Json(_) | Error::Dimension(_)
            );
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
