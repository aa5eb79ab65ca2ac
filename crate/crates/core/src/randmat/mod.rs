//! Sparse non-negative random matrices: column profiles, permutation-invariant
//! samplers, the expected Gram matrix and bounds on its spectrum.

pub mod gamma;
pub mod gram;
pub mod profile;
pub mod samplers;
pub mod stats;

pub use gamma::{
    binarized_profile, corollary10_bounds, corollary10_resample, sample_sizes_truncated_gamma, Corollary10Report,
    GammaSpec, ResampleSummary,
};
pub use gram::{expected_gram, theorem3_bounds, ExpectedGram, SandwichRow, Theorem3Report, DEFAULT_SLACK_C};
pub use profile::{
    check_s1, density, moment_ratio, submatrix_density, ColumnProfile, ConditionCheck, DerivedStats, S1Report,
};
pub use samplers::{
    sample_column_binary, sample_column_fixed_size, sample_column_fixed_size_norm, stream,
    ColumnModel, RandomColumnModel,
};
pub use stats::{
    empirical_gram, fluctuation_bounds, lemma13_stats, EmpiricalGram, FluctuationReport, FluctuationRow,
    Lemma13Report, MomentCheck, MC_SIGMAS,
};
